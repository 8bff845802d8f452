//! Exact polynomial algebra on boxes and Gauss–Legendre quadrature.
//!
//! Polynomials are sparse coefficient maps in scaled variables; integrals of
//! polynomials are computed monomial by monomial in closed form, while
//! non-polynomial integrands go through tensor Gauss rules.

mod field;
mod gauss;
mod poly;

pub use field::{position_cross, Frame, PolyField};
pub use gauss::GaussRule;
pub use poly::{monomial_integral, AxisBox, Monomial, Poly};

/// Gauss order used for every non-polynomial integrand unless configured.
pub const DEFAULT_QUAD_ORDER: usize = 6;
