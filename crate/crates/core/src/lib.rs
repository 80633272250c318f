//! Numerical geometry of the left quotient `SO(n)\SO0(n,1)`.
//!
//! The space is realized on the chart `R^{n-1} x R^+` through the solvable
//! factor NA of the Iwasawa decomposition. The crate builds its metric from
//! the Lie group (`lie`, `chart`, `metric`), integrates its geodesics
//! (`geodesic`) and exposes the warped-product description of the space
//! minus its fixed point (`warped`), together with the closed-form results
//! each of these is checked against.

pub mod chart;
pub mod error;
pub mod geodesic;
pub mod lie;
pub mod metric;
pub mod ode;
pub mod sample;
pub mod tolerance;
pub mod warped;

pub use chart::ChartPoint;
pub use error::{GeomError, Result};
pub use lie::{AlgebraElement, GroupElement};
