//! Numerical checks of curvature, isoperimetric, conformal, lifting and
//! limit estimates for surfaces of bounded mean curvature in model spaces.

pub mod ambient;
pub mod conformal;
pub mod curvature;
pub mod error;
pub mod iso_net;
pub mod lifting;
pub mod limits;
pub mod schwarz;
pub mod surface;

pub use error::{Error, Result};
