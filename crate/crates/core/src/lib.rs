//! Compression-aware spectrum auction simulator.
//!
//! IoT devices compress their payload with a parametric autoencoder model,
//! value a bundle of uplink channels by how likely the transmission is to
//! succeed, and bid their net value in a single-minded sealed-bid auction.
//! The provider allocates channels by exact welfare maximisation and charges
//! VCG or uniform clearing prices. The [`harness`] module runs seeded
//! experiments over channel budgets and payment rules and writes CSV.

pub mod auction;
pub mod channel;
pub mod compression;
pub mod device;
pub mod error;
pub mod harness;
pub mod valuation;
pub mod verify;

pub use error::{Error, Result};
