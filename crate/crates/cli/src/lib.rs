//! Command-line plumbing for the `bouncer` binary: configuration, the
//! coefficient cache and the figure bundles.

pub mod bundle;
pub mod config;
pub mod figures;
pub mod report;
pub mod session;
pub mod spectrum;

pub use config::RunConfig;
pub use session::Session;
