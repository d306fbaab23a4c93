//! Exact distance energies, distinct-distance spectra, and expansion
//! experiments for planar point sets and bivariate polynomials.
//!
//! Everything is exact: coordinates and polynomial coefficients are
//! rationals, distances are compared through their squares, and energies are
//! arbitrary-precision integers.

pub mod caps;
pub mod checks;
pub mod constructions;
pub mod energy;
pub mod error;
pub mod expansion;
pub mod extraction;
pub mod geometry;
pub mod harness;
pub mod incidence;
pub mod local;
pub mod polynomial;
pub mod rational;

mod pairs;

pub use caps::Caps;
pub use error::{Error, Result};
pub use geometry::{cross_sqdist, parse_point_file, parse_pointset, sqdist, Point, PointSet, QuadPoint, QuadPointSet};
pub use rational::Rational;
