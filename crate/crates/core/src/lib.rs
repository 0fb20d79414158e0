//! Analysis and pinning control of two coupled k-valued logical networks.
//!
//! The augmented dynamics of a coupled pair are represented as a logic
//! matrix over δ-indices (semi-tensor product calculus); on top of that the
//! crate provides attractor enumeration, approximate/complete
//! synchronization tests, synchronization basins and times, and synthesis
//! of pinning state-feedback controllers.

pub mod dynamics;
pub mod error;
pub mod expr;
pub mod network;
pub mod parse;
pub mod pinning;
pub mod report;
pub mod stp;
pub mod sync;

pub use error::{Error, Result};
pub use network::{
    assemble, build_augmented, decode_state, encode_state, simulate, AugmentedSystem, Network,
};
pub use parse::parse_network;
pub use sync::{analyze, SyncSpec};
