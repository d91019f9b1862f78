//! Ternary linear recurrences `U_{n+3} = a1 U_{n+2} + a2 U_{n+1} + a3 U_n`:
//! exact terms, the characteristic polynomial, arithmetic modulo primes,
//! the equation `U_n = u^2 + n v^2`, and experiments built on them.

pub mod arith;
pub mod charpoly;
pub mod error;
pub mod experiments;
pub mod modular;
pub mod recurrence;
pub mod representation;

pub use charpoly::{check_conditions, solve_exponents, Exponents, Factorization, GaloisLabel, PolyAnalysis};
pub use error::{Error, Result};
pub use experiments::ExperimentReport;
pub use modular::{classify_prime, profile_any, PrimeProfile, RootCount};
pub use recurrence::{Preset, RecurrenceSpec};
pub use representation::{
    count_range, membership, represent, CountReport, MembershipRecord, MembershipStatus, Method, Representation,
};
