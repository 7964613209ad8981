//! Dense MLP engine: forward pass, exact reverse-mode gradients, MSE loss,
//! Adam and a checksummed little-endian weight format.

mod adam;
mod io;
mod loss;
mod mlp;

pub use adam::{Adam, AdamConfig};
pub use io::{load_weights, save_weights, weights_from_bytes, weights_to_bytes, WEIGHT_MAGIC, WEIGHT_VERSION};
pub use loss::mse_loss;
pub use mlp::{Activation, ForwardCache, Mlp};
