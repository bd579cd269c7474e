//! Solvers for the Dirichlet problem of the fractional Laplacian
//!
//! ```text
//! (-Δ)^s u = f  in Ω,   u = 0  outside Ω,   0 < s < 1,
//! ```
//!
//! in one and two dimensions, through a weakly singular reformulation.
//! The solution is sought as `u = d^s φ` where `d` is a smooth function
//! vanishing on the boundary and `φ` is smooth up to the boundary. In 2D
//! the unknowns are `φ` on a volume grid, a double-layer density `ζ` on the
//! boundary and one constant per hole; in 1D they are Chebyshev
//! coefficients of `φ` and two constants.
//!
//! The numerical core is generic over the floating point type through
//! [`Real`]. The accuracy targets of the solvers are stated for `f64`; the
//! `*64` aliases at the crate root name the concrete types used by the CLI.

pub mod error;
pub mod fl_oracle;
pub mod geometry;
pub mod linalg;
pub mod manufactured;
pub mod potentials;
pub mod quadrature;
pub mod solver1d;
pub mod solver2d;
pub mod special_fn;
pub mod spectral;

mod real;

pub use error::{Error, Result};
pub use real::Real;

/// Double precision domain geometry.
pub type DomainGeometry64 = geometry::DomainGeometry<f64>;
/// Double precision 2D problem.
pub type Problem2D64 = solver2d::Problem2D<f64>;
/// Double precision 2D solution.
pub type Solution2D64 = solver2d::Solution2D<f64>;
/// Double precision 1D problem.
pub type Problem1D64 = solver1d::Problem1D<f64>;
/// Double precision 1D solution.
pub type Solution1D64 = solver1d::Solution1D<f64>;
/// Double precision dense matrix.
pub type Matrix64 = linalg::Matrix<f64>;
/// Single precision dense matrix.
pub type Matrix32 = linalg::Matrix<f32>;
/// Double precision convergence report.
pub type ConvergenceReport64 = manufactured::ConvergenceReport<f64>;
