//! Linear stability, center-manifold reduction and dynamic-transition
//! classification for surface-tension-driven convection in a box
//! (0,L1)×(0,L2)×(0,1) with a free, flat upper surface.
//!
//! The solvers are generic over [`Real`]; the aliases at the crate root fix
//! the scalar to `f64`, which is what the tolerances are tuned for.

pub mod center_manifold;
pub mod eigenfunctions;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod linear_stability;
pub mod numerics;
pub mod products;
pub mod profile;
pub mod reduced_dynamics;
pub mod scalar;
pub mod transition;

pub use error::{Error, Result};
pub use geometry::{ModeIndex, Wave};
pub use scalar::Real;
pub use transition::TransitionType;

pub type BoxGeometry = geometry::BoxGeometry<f64>;
pub type StabilityParams = linear_stability::StabilityParams<f64>;
pub type CriticalResult = linear_stability::CriticalResult<f64>;
pub type EigenPair = eigenfunctions::EigenPair<f64>;
pub type VerticalProfile = profile::VerticalProfile<f64>;
pub type Field3D = geometry::Field3D<f64>;
pub type ManifoldTable = center_manifold::ManifoldTable<f64>;
pub type SingleModeReport = transition::SingleModeReport<f64>;
pub type HexReport = transition::HexReport<f64>;
pub type ReducedSystem = reduced_dynamics::ReducedSystem<f64>;
pub type PhasePortrait = reduced_dynamics::PhasePortrait<f64>;
