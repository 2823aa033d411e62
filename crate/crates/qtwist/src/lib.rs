//! Central values of quadratic twists of elliptic curve L-functions.
//!
//! The crate computes L(E, D, 1) for fundamental discriminants D two ways:
//! through weight-3/2 theta series attached to ternary quadratic forms that
//! arise from quaternion orders (a Waldspurger-type formula turns theta
//! coefficients into central values), and through a direct smoothed Dirichlet
//! series used as an independent cross-check. Fixture files describe a curve
//! together with its quaternionic data and calibration constants; the
//! `fixture` module ties everything together and reproduces full twist tables.

pub mod error;
pub mod fixture;
pub mod lift;
pub mod lseries;
pub mod numbers;
pub mod quaternion;
pub mod ternary;
pub mod waldspurger;
pub mod weights;

pub use error::{Error, Result};
