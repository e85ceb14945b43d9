//! Positional number systems `(Z, b, D)` over the integers with arbitrary
//! irredundant digit sets, zero not required.
//!
//! [`system`] holds the digit function and the map `T(a) = (a - d(a)) / b`;
//! [`orbits`] decides validity from the attractor of `T`. The other modules
//! build expansions, explicit digit-set constructions, the rewrite systems
//! behind shifted families, and the full treatment of base `-2`.

pub mod constructions;
pub mod expansions;
pub mod json;
pub mod minus_two;
pub mod orbits;
pub mod rewrite;
pub mod system;

pub use constructions::{BadSet, ConstructionError, Family};
pub use expansions::{Expansion, ExpansionError};
pub use minus_two::{CycleCertificate, Minus2Error, Minus2Verdict};
pub use orbits::{AttractorReport, Bounds, OrbitError, Verdict};
pub use rewrite::{RewriteError, RewriteSystem, Trace};
pub use system::{Digit, PreNumberSystem, SystemError};

/// Any error raised by this crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Minus2(#[from] Minus2Error),
}
