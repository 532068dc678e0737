//! Similitude systems, condensation parameters and the word algebra that
//! indexes every cylinder quantity.

mod similitude;
mod system;
mod word;

pub use similitude::{distance, Similitude};
pub use system::{CondensationSystem, MapConfig, Normalization, OscStatus, SystemConfig, WordProducts};
pub use word::{is_maximal_antichain, Word};
