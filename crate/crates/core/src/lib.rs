//! Computations with G2- and SU(3)-structures on Lie algebras given by
//! structure constants: metrics, intrinsic torsion, curvature, Ricci
//! solitons and the Laplacian flow.

pub mod catalog;
pub mod curvature;
pub mod error;
pub mod exterior;
pub mod flow;
pub mod g2;
pub mod input;
pub mod liealg;
pub mod linalg;
pub mod su3;

pub use error::{Error, Result};
pub use exterior::{HodgeStar, KForm, Metric, MultiIndex};
pub use liealg::LieAlgebra;
