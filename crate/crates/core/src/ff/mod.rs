//! Exact arithmetic over finite fields and (Laurent) polynomial rings.

mod encoding;
mod factor;
mod field;
mod laurent;
mod poly;

pub use encoding::{parse_laurent, parse_t_polynomial};
pub use factor::{frobenius_descend, is_irreducible, poly_factor, Factorization};
pub use field::{is_prime, prime_power, Fq, FqElem, MAX_FIELD_SIZE};
pub use laurent::{LaurentPoly, LaurentRing, Monomial};
pub use poly::FqPoly;
