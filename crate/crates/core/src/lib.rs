//! Block-diagonalization (BD) precoding lab for single-cell large-scale
//! MU-MIMO downlinks.
//!
//! * [`channel`]: i.i.d. Rayleigh channel ensembles and system configuration.
//! * [`bd`]: null-space outer precoders and equivalent channels.
//! * [`precoders`]: SVD/water-filling, ZF and RZF inner precoders with exact rates.
//! * [`asymptotics`]: Marčenko–Pastur machinery and large-system rate formulas.
//! * [`experiments`]: Monte Carlo engine, sweeps, optimal user count and
//!   antenna-increment studies.
//! * [`cli`]: command-line front end and CSV/JSON output.
//!
//! Numerical code is generic over the scalar type ([`Scalar`] for real-only
//! code, [`Real`] where complex matrices are involved); the aliases below fix
//! it to `f64` or `f32`.

pub mod asymptotics;
pub mod bd;
pub mod channel;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod numerics;
pub mod precoders;
pub mod scalar;

pub use asymptotics::{AsymptoticParams, RateDecomposition, Regime};
pub use bd::BdDecomposition;
pub use channel::{CMatrix, ChannelRealization, SystemConfig};
pub use error::{Error, Result};
pub use experiments::{RateReport, SweepAxis, SweepPoint, SweepResult};
pub use precoders::{InnerPrecoder, PrecoderKind, WaterfillSolution};
pub use scalar::{Real, Scalar};

pub type CMatrix64 = CMatrix<f64>;
pub type CMatrix32 = CMatrix<f32>;
pub type ChannelRealization64 = ChannelRealization<f64>;
pub type ChannelRealization32 = ChannelRealization<f32>;
pub type BdDecomposition64 = BdDecomposition<f64>;
pub type BdDecomposition32 = BdDecomposition<f32>;
pub type InnerPrecoder64 = InnerPrecoder<f64>;
pub type InnerPrecoder32 = InnerPrecoder<f32>;
pub type WaterfillSolution64 = WaterfillSolution<f64>;
pub type WaterfillSolution32 = WaterfillSolution<f32>;
pub type AsymptoticParams64 = AsymptoticParams<f64>;
pub type AsymptoticParams32 = AsymptoticParams<f32>;
pub type RateDecomposition64 = RateDecomposition<f64>;
pub type RateDecomposition32 = RateDecomposition<f32>;
