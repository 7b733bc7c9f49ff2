//! Exact rational-point counting on the non-normal cubic hypersurfaces
//!
//! ```text
//!   t0 t1 t2 + t3 (t0^2 + a t1^2) = 0      in P^3   (a squarefree, nonzero)
//!   t0^2 t2 + t1^2 t3 + t0 t1 t4   = 0      in P^4
//! ```
//!
//! with the height `H(t) = sqrt(t0^2 + ... + tn^2)` on primitive integer
//! representatives. Points on the non-normal line `t0 = t1 = 0` are excluded.
//!
//! * [`oracle`] enumerates points by brute force.
//! * [`fibration`] counts them fiber by fiber over `(t0 : t1)` in `P^1`.
//! * [`asymptotics`] evaluates the leading constants of the counting function.
//! * [`tamagawa`] computes the local densities of the fibers.
//! * [`verify`] bundles the cross-checks into named suites.

pub mod asymptotics;
pub mod error;
pub mod exactarith;
pub mod fibration;
pub mod forms;
pub mod numeric;
pub mod oracle;
pub mod tamagawa;
pub mod verify;

pub use error::{Error, Result};
