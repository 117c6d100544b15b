//! Seeded channel realizations: node placement, path loss, Rician fading and
//! noise normalization.
//!
//! Path loss is `intercept + 10·exponent·log10(d)` dB per link class. Line-of-sight
//! components are far-field steering products of the transmit ULA and the IRS
//! array. Realization `r` of seed `s` draws from its own ChaCha stream, so
//! realizations can be generated in any order or in parallel.

mod budget;
mod channels;
pub mod dump;
mod geometry;

pub use budget::{dbm_to_watts, noise_power_dbm, LinkBudget, LinkModel};
pub use channels::{
    generate_channels, generate_raw, realization_rng, rician_matrix, steering_vector, ArrayLayout, RawChannels,
    ScenarioConfig,
};
pub use geometry::{place_nodes, GeometryConfig, NodePositions, Point3, MAX_PLACEMENT_ATTEMPTS, SPEED_OF_LIGHT};
