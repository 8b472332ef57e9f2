//! Random instances, channels, inequality batteries, file formats and the
//! command-line front end for `oneshot-core`.
//!
//! - [`instance`]: seeded random states and positive operators.
//! - [`channel`]: Stinespring and pinching channels.
//! - [`verify`]: one verifier per inequality family, returning named slacks.
//! - [`battery`]: all verifiers over a parameter grid, with JSON/CSV reports.
//! - [`io`]: JSON formats for matrices, certificates and SDP dumps.
//! - [`cli`]: the `oneshot` command.

pub mod battery;
pub mod channel;
pub mod cli;
mod error;
pub mod instance;
pub mod io;
pub mod verify;

pub use error::{OneshotError, Result};
