//! A simulation laboratory for the homology of Čech complexes built from
//! unbounded noise.
//!
//! Samples from power-law, exponential and Gaussian clouds; builds Čech
//! complexes on the points outside a centered ball; computes GF(2) Betti
//! numbers and the combinatorial cycle counters that bracket them; and
//! compares the empirical results against the closed-form core radii,
//! critical radii and limit constants of the three models.

// `!(x > 0.0)` guards reject NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index arithmetic reads clearer than iterator chains in the numeric kernels
#![allow(clippy::needless_range_loop)]

pub mod cech;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod homology;
pub mod io;
pub mod numerics;
pub mod rng;
pub mod sampler;
pub mod theory;

pub use error::{CrackleError, Result};
pub use sampler::{DistributionParams, DistributionSpec, NoiseKind, PointCloud};
