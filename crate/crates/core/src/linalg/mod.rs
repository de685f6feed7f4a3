//! Dense linear algebra, seeded randomness, least squares and weighted sampling.

mod matrix;
mod rng;
mod sample;
mod solve;

pub use matrix::{inner_product, norm, squared_distance, Matrix};
pub(crate) use matrix::dot;
pub use rng::{derive_seed, Rng, RNG_ALGORITHM};
pub use sample::weighted_sample_with_replacement;
pub use solve::{default_relative_ridge, default_ridge, gram_scale, least_squares, AffineFit, DEFAULT_RELATIVE_RIDGE};
