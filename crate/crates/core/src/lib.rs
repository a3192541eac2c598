//! Link-level simulator for a multiuser hybrid mmWave MIMO downlink.
//!
//! The library models a base station with a large uniform linear array and a
//! handful of RF chains serving single-RF-chain users over block Rician
//! fading. It implements:
//!
//! - steering vectors and angular detection grids ([`geometry`]);
//! - rank-one LOS plus i.i.d. or clustered scattering channels ([`channel`]);
//! - a three-step beam-sweep/pilot estimation of the equivalent baseband
//!   channel with no feedback and overhead linear in the user count
//!   ([`estimation`]);
//! - zero-forcing precoding over the equivalent channel, with analog-only
//!   and fully digital references ([`precoding`]);
//! - closed-form achievable-rate upper bounds and the trace inequality
//!   behind them ([`bounds`]);
//! - a seeded, thread-parallel Monte Carlo harness with CSV output
//!   ([`experiment`], [`config`], [`output`]);
//! - an end-to-end validation suite ([`checks`]).

pub mod bounds;
pub mod channel;
pub mod checks;
pub mod config;
pub mod error;
pub mod estimation;
pub mod experiment;
pub mod geometry;
pub mod output;
pub mod precoding;
pub mod rng;

pub use bounds::{corollary1_asymptotic, corollary2_fully_digital, theorem1_upper, BoundInputs};
pub use channel::{ClusterConfig, RicianFactor, UserChannel};
pub use config::{parse_config, parse_config_str, ConfigError, RunManifest};
pub use error::{Result, SimError};
pub use estimation::{BeamformerSet, EquivalentChannel, PilotMatrix};
pub use experiment::{
    figure4_config, figure5_config, quick_config, run_experiment, run_experiment_detailed,
    CurveId, CurvePoint, EstimationMode, ExperimentConfig, ScatterMode,
};
pub use geometry::{AngleGrid, ArrayGeometry, PhaseSign};
pub use output::{curves_to_csv, parse_curves_csv, write_curves, write_manifest, OutputError};
pub use precoding::{LinkResult, Precoder};
