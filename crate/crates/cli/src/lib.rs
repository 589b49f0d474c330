//! Document handling and command implementations behind the `homfib` binary.

pub mod certificate;
pub mod commands;
pub mod document;
pub mod json;

pub use certificate::{CertificateFile, CheckOutcome};
pub use document::{Payload, SpecDocument};
pub use json::DocError;
