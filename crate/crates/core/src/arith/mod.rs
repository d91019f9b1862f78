//! Integer arithmetic building blocks: residues mod a word-sized modulus,
//! prime enumeration and factorization.

pub mod factor;
pub mod modp;
pub mod sieve;

pub use factor::{factor_big, factor_u64, is_prime_big, is_prime_u64, Factorization};
pub use modp::{inv_mod, jacobi, legendre, mul_mod, pow_mod, sqrt_mod_prime};
pub use sieve::{prime_count, primes_up_to, SegmentedPrimes};
