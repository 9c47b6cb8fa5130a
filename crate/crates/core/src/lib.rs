//! Ground-state entanglement and classical bifurcations of the E⊗β and E⊗ε
//! Jahn-Teller models.

pub mod ansatz;
pub mod classical;
pub mod eb;
pub mod ee;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod par;
pub mod special;
pub mod sweep;
pub mod truncation;
pub mod verify;

pub use error::{Error, Result};
