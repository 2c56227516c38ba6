//! Cut-and-project model sets over `ℝ^d × ℝ^m` and numerical diagnostics for
//! their autocorrelation, diffraction, torus parametrization and Meyer
//! structure.

pub mod autocorr;
pub mod cps;
pub mod error;
pub mod linalg;
pub mod meyer;
pub mod pointset;
pub mod quadratic;
pub mod region;
pub mod scalar;
pub mod schemes;
pub mod spectral;
pub mod torus;
pub mod window;

pub use autocorr::{almost_periods, eta_table, pairwise_d, predicted_d, symdiff_density, AlmostPeriods, AutocorrelationTable};
pub use cps::{ArithmeticMode, DualCandidate, LatticePoint, LatticeScheme, ValidationReport};
pub use error::{Error, Result};
pub use meyer::{generator_norm, m1_cover, stepping_certificate, weak_ud_bound, MeyerCertificate, MeyerContext};
pub use pointset::{IndexedPointSet, SetPoint};
pub use quadratic::QuadSurd;
pub use region::{BoxKind, Region, VanHove};
pub use scalar::{Rational, Scalar};
pub use spectral::{diffraction_table, separation_fraction, weyl_sum, PeakTable};
pub use torus::{beta_of_cut, fiber_enumerate, reconstruct_window, singularity_test, FiberReport, TorusPoint};
pub use window::{IntervalComponent, Membership, WindowShape, WindowSpec};

/// Scheme with `f64` entries and tolerance-based comparisons.
pub type FloatScheme = LatticeScheme<f64>;
/// Scheme with single-precision entries.
pub type F32Scheme = LatticeScheme<f32>;
/// Scheme with entries in a real quadratic field.
pub type ExactScheme = LatticeScheme<QuadSurd>;
pub type FloatWindow = WindowSpec<f64>;
pub type ExactWindow = WindowSpec<QuadSurd>;
pub type FloatTorusPoint = TorusPoint<f64>;
pub type ExactTorusPoint = TorusPoint<QuadSurd>;
