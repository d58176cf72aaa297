//! Full-connectivity analytics for dense wireless networks confined in convex
//! right prisms, with a Monte Carlo random-geometric-graph simulator for
//! verification.

pub mod connmass;
pub mod error;
pub mod geometry;
pub mod linkmodels;
pub mod mc_sim;
pub mod pfc_analytic;
pub mod quadrature;
pub mod specfun;
pub mod validation;

pub use error::{Error, Result};
