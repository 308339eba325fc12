//! Spectral simulation of the quantum bouncer: a particle above a hard
//! floor under a constant downward force.
//!
//! A Gaussian packet is expanded in the Airy eigenstates of the bouncer
//! ([`spectrum`], [`wavepacket`]) and evolved exactly by phase rotation
//! ([`evolution`]). [`classical`] holds the classical trajectories,
//! ensemble averages and timescales the quantum motion is compared with,
//! and [`reference`] the closed-form packets used as oracles.
//!
//! ```
//! use quantum_bouncer::{classical, wavepacket, UnitSystem};
//!
//! let units = UnitSystem::natural();
//! let spec = wavepacket::PacketSpec::new(25.0, 1.0, 0.0)?;
//! let ts = classical::timescales(&spec, &units);
//! assert_eq!(ts.t_cl, 10.0);
//! # Ok::<(), quantum_bouncer::Error>(())
//! ```

pub mod classical;
pub mod error;
pub mod evolution;
pub mod quadrature;
pub mod reference;
pub mod spectrum;
pub mod units;
pub mod wavepacket;

pub use error::{Error, Result};
pub use units::UnitSystem;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/timescales.md")]
    mod timescales {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/projection.md")]
    mod projection {}
    #[doc = include_str!("../../../book/src/evolution.md")]
    mod evolution {}
    #[doc = include_str!("../../../book/src/revivals.md")]
    mod revivals {}
    #[doc = include_str!("../../../book/src/oracles.md")]
    mod oracles {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
