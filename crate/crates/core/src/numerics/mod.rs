//! Special functions, scalar root finding and random variates.

mod lambert;
mod root;
mod sampling;

pub use lambert::lambert_w0;
pub use root::{find_root, sign_changes, Monotonicity, RootResult, RootSpec};
pub use sampling::{sample_exponential, sample_gamma_integer_shape, stream_rng, SimRng};
