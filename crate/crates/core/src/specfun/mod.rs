//! Special functions used by the closed-form solutions, all evaluated
//! in-crate from recurrences and series.

mod airy;
mod factorial;
mod laguerre;
mod spherical;

pub use airy::{airy_ai, airy_ai_pair, airy_ai_prime, MAX_ARG as AIRY_MAX_ARG, MIN_ARG as AIRY_MIN_ARG};
pub use factorial::{ln_factorial, MAX_LN_FACTORIAL};
pub use laguerre::{laguerre, laguerre_derivative, laguerre_second_derivative, MAX_STABLE_DEGREE};
pub use spherical::{legendre_normalized, spherical_harmonic, MAX_DEGREE as YLM_MAX_DEGREE};
