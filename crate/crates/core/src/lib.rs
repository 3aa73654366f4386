// SPDX-License-Identifier: Apache-2.0

//! Average fidelity and fidelity deviation of qudit teleportation through a
//! noisy isotropic channel, with differential-evolution control recovery.
//!
//! ```
//! use qudit_teleport::bloch::qubit_deviation;
//! use qudit_teleport::teleport::{Channel, Protocol, GAMMA_BV};
//!
//! let ch = Channel::new(2, GAMMA_BV)?;
//! let rep = qubit_deviation(&Protocol::optimal(2)?, &ch)?;
//! assert!((rep.f - ch.f_max()).abs() < 1e-12);
//! assert!(rep.d < 1e-9);
//! # Ok::<(), qudit_teleport::Error>(())
//! ```

pub mod bloch;
pub mod error;
pub mod montecarlo;
pub mod qlinalg;
pub mod stabilizer;
pub mod teleport;

pub use error::{Error, Result};
