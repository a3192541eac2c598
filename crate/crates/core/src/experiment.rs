//! Monte Carlo harness: draws channels, runs the estimation pipeline, builds
//! precoders, and sweeps the data SNR for every requested curve.
//!
//! Within a trial every curve sees the identical channel realization, so
//! curve differences at one SNR point reflect method differences only.
//! Trials are independent work items scheduled on the ambient rayon pool;
//! results are accumulated in trial order, so the output is bit-identical
//! regardless of thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use crate::bounds::{corollary1_asymptotic, corollary2_fully_digital, theorem1_upper, BoundInputs};
use crate::channel::{
    los_channel, scatter_clustered, scatter_iid, ClusterConfig, RicianFactor, UserChannel,
};
use crate::error::{Result, SimError};
use crate::estimation::{
    make_pilots, step1_uplink_aoa, step2_downlink_aoa, step3_ls_estimate, true_equivalent_channel,
    BeamformerSet,
};
use crate::geometry::{detection_matrix, AngleGrid, ArrayGeometry};
use crate::precoding::{
    analog_only_baseline, evaluate_downlink, fully_digital_baseline, rate_per_user, zf_precoder,
};
use crate::rng::{derive_rng, Stage};

/// Curves the harness can produce.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum CurveId {
    HybridZf,
    AnalogOnly,
    FullyDigital,
    BoundThm1,
    BoundCor1,
    BoundCor2,
}

impl CurveId {
    pub fn as_str(&self) -> &'static str {
        match self {
            CurveId::HybridZf => "hybrid_zf",
            CurveId::AnalogOnly => "analog_only",
            CurveId::FullyDigital => "fully_digital",
            CurveId::BoundThm1 => "bound_thm1",
            CurveId::BoundCor1 => "bound_cor1",
            CurveId::BoundCor2 => "bound_cor2",
        }
    }

    /// True for curves that are averaged over channel draws rather than
    /// evaluated in closed form.
    pub fn is_stochastic(&self) -> bool {
        matches!(
            self,
            CurveId::HybridZf | CurveId::AnalogOnly | CurveId::FullyDigital
        )
    }
}

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScatterMode {
    #[default]
    Iid,
    Clustered,
}

/// How the hybrid transmitter obtains its equivalent channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EstimationMode {
    /// Noisy sweeps plus pilot least squares; the precoder uses the
    /// estimate.
    #[default]
    Proposed,
    /// Noiseless sweeps and an exact equivalent channel.
    PerfectEquivalent,
    /// Full channel knowledge. The hybrid path behaves as with
    /// [`EstimationMode::PerfectEquivalent`]; the fully digital reference
    /// always assumes full knowledge regardless of this setting.
    PerfectFull,
}

/// Clustered-scattering parameters as they appear in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterSpec {
    pub num_clusters: usize,
    /// Paths contributed by each cluster; one path per cluster when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths_per_cluster: Option<Vec<usize>>,
    #[serde(default = "default_angle_spread")]
    pub angle_spread_rad: f64,
}

fn default_angle_spread() -> f64 {
    ClusterConfig::DEFAULT_ANGLE_SPREAD
}

impl ClusterSpec {
    pub fn to_cluster_config(&self) -> Result<ClusterConfig> {
        let paths = match &self.paths_per_cluster {
            Some(list) => {
                if list.len() != self.num_clusters {
                    return Err(SimError::BadClusterConfig(format!(
                        "paths_per_cluster has {} entries for {} clusters",
                        list.len(),
                        self.num_clusters
                    )));
                }
                list.clone()
            }
            None => vec![1; self.num_clusters],
        };
        ClusterConfig::new(paths, self.angle_spread_rad)
    }

    pub fn total_paths(&self) -> usize {
        match &self.paths_per_cluster {
            Some(list) => list.iter().sum(),
            None => self.num_clusters,
        }
    }
}

fn default_grid_points() -> usize {
    AngleGrid::DEFAULT_POINTS
}

fn default_spacing_ratio() -> f64 {
    ArrayGeometry::DEFAULT_SPACING_RATIO
}

fn default_kappa() -> f64 {
    1.0
}

fn default_snr_range() -> Vec<f64> {
    vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0]
}

fn default_trials() -> usize {
    500
}

fn default_curves() -> Vec<CurveId> {
    vec![CurveId::HybridZf]
}

/// Full description of one Monte Carlo run. Unknown keys are rejected when
/// parsing, and every field serializes back out, so an emitted config echo
/// reproduces the run exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Base-station antennas.
    pub m: usize,
    /// Users (equal to the number of base-station RF chains).
    pub n: usize,
    /// Antennas per user.
    pub p: usize,
    /// Detection-grid points per sweep.
    #[serde(default = "default_grid_points")]
    pub j: usize,
    #[serde(default = "default_spacing_ratio")]
    pub spacing_ratio: f64,
    /// Rician K-factor shared by all users (linear scale).
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default)]
    pub scatter_mode: ScatterMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster: Option<ClusterSpec>,
    /// Fixed LOS angles `[theta, phi]` per user in radians; drawn uniformly
    /// over [0, pi] each trial when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub los_angles_rad: Option<Vec<[f64; 2]>>,
    /// Data SNR sweep in dB (symbol energy over receiver noise power).
    #[serde(default = "default_snr_range")]
    pub snr_db_range: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Pilot symbol energy in dB. When omitted the pilot energy tracks the
    /// data SNR point, matching estimation and payload sharing one coherence
    /// block.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pilot_energy_db: Option<f64>,
    /// SNR of the sweep tones in dB; tracks the data SNR point when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimation_snr_db: Option<f64>,
    #[serde(default)]
    pub estimation: EstimationMode,
    #[serde(default = "default_curves")]
    pub curves: Vec<CurveId>,
}

impl ExperimentConfig {
    /// Checks every cross-field invariant; parsing alone only enforces
    /// per-field shape.
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 || self.p == 0 {
            return Err(SimError::InvalidExperiment(
                "m, n, and p must all be positive".into(),
            ));
        }
        if self.n > self.m {
            return Err(SimError::InvalidExperiment(format!(
                "n must not exceed m (one RF chain per user): n = {}, m = {}",
                self.n, self.m
            )));
        }
        if self.j == 0 {
            return Err(SimError::InvalidExperiment("j must be positive".into()));
        }
        if !(self.spacing_ratio > 0.0 && self.spacing_ratio.is_finite()) {
            return Err(SimError::InvalidExperiment(format!(
                "spacing_ratio must be positive, got {}",
                self.spacing_ratio
            )));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(SimError::InvalidExperiment(format!(
                "kappa must be nonnegative and finite, got {}",
                self.kappa
            )));
        }
        if self.snr_db_range.is_empty() {
            return Err(SimError::InvalidExperiment(
                "snr_db_range must not be empty".into(),
            ));
        }
        if self.snr_db_range.iter().any(|s| !s.is_finite()) {
            return Err(SimError::InvalidExperiment(
                "snr_db_range entries must be finite".into(),
            ));
        }
        if self.trials == 0 {
            return Err(SimError::InvalidExperiment("trials must be at least 1".into()));
        }
        if self.curves.is_empty() {
            return Err(SimError::InvalidExperiment(
                "curves must name at least one curve".into(),
            ));
        }
        for (i, curve) in self.curves.iter().enumerate() {
            if self.curves[..i].contains(curve) {
                return Err(SimError::InvalidExperiment(format!(
                    "curve {curve} listed more than once"
                )));
            }
        }
        match self.scatter_mode {
            ScatterMode::Clustered => {
                let spec = self.cluster.as_ref().ok_or_else(|| {
                    SimError::InvalidExperiment(
                        "scatter_mode = clustered requires a cluster section".into(),
                    )
                })?;
                spec.to_cluster_config()?;
            }
            ScatterMode::Iid => {}
        }
        if let Some(angles) = &self.los_angles_rad {
            if angles.len() != self.n {
                return Err(SimError::InvalidExperiment(format!(
                    "los_angles_rad has {} entries for {} users",
                    angles.len(),
                    self.n
                )));
            }
            for pair in angles {
                for &a in pair {
                    if !(0.0..=PI).contains(&a) || !a.is_finite() {
                        return Err(SimError::InvalidExperiment(format!(
                            "LOS angle {a} is outside [0, pi]"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn with_master_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }
}

/// One aggregated point of one curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub curve_id: CurveId,
    pub snr_db: f64,
    pub mean_rate: f64,
    pub std_err: f64,
    pub trials_used: usize,
    pub outages: usize,
}

/// Per-trial rates (None marks a beam-collision outage) plus the realized
/// beam Gram norms and equivalent-channel energies, indexed
/// `[snr point][trial]`.
#[derive(Debug, Clone)]
pub struct DetailedRun {
    pub snr_db: Vec<f64>,
    pub curves: BTreeMap<CurveId, Vec<Vec<Option<f64>>>>,
    pub gram_fro_sq: Vec<Vec<f64>>,
    pub heq_fro_sq: Vec<Vec<f64>>,
}

struct TrialRow {
    curves: BTreeMap<CurveId, Vec<Option<f64>>>,
    gram: Vec<f64>,
    heq: Vec<f64>,
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn draw_users(cfg: &ExperimentConfig, trial: usize) -> Result<Vec<UserChannel>> {
    let bs = ArrayGeometry::new(cfg.m, cfg.spacing_ratio)?;
    let ue = ArrayGeometry::new(cfg.p, cfg.spacing_ratio)?;
    let rician = RicianFactor::new(cfg.kappa)?;
    let cluster = match (cfg.scatter_mode, &cfg.cluster) {
        (ScatterMode::Clustered, Some(spec)) => Some(spec.to_cluster_config()?),
        (ScatterMode::Clustered, None) => {
            return Err(SimError::InvalidExperiment(
                "clustered scattering without cluster parameters".into(),
            ))
        }
        (ScatterMode::Iid, _) => None,
    };
    (0..cfg.n)
        .map(|k| {
            let mut rng = derive_rng(cfg.master_seed, Stage::Channel, trial as u64, k as u64);
            use rand::Rng as _;
            // Angle draws happen regardless so that fixing the angles does
            // not shift the scatter stream.
            let drawn = (rng.random::<f64>() * PI, rng.random::<f64>() * PI);
            let (theta, phi) = match &cfg.los_angles_rad {
                Some(angles) => (angles[k][0], angles[k][1]),
                None => drawn,
            };
            let los = los_channel(&bs, &ue, theta, phi)?;
            let scatter = match &cluster {
                Some(cc) => scatter_clustered(&bs, &ue, cc, &mut rng)?,
                None => scatter_iid(cfg.m, cfg.p, &mut rng),
            };
            UserChannel::new(los, scatter, rician, theta, phi)
        })
        .collect()
}

struct EstimateOutcome {
    beams: BeamformerSet,
    downlink_true: nalgebra::DMatrix<num_complex::Complex64>,
    downlink_for_precoder: nalgebra::DMatrix<num_complex::Complex64>,
    gram: f64,
}

/// Runs steps 1-3 for one trial at one estimation operating point.
fn estimate(
    cfg: &ExperimentConfig,
    users: &[UserChannel],
    bs_det: &nalgebra::DMatrix<num_complex::Complex64>,
    ue_det: &nalgebra::DMatrix<num_complex::Complex64>,
    sweep_noise_var: f64,
    pilot_energy: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<EstimateOutcome> {
    let s1 = step1_uplink_aoa(users, bs_det, sweep_noise_var, rng)?;
    let s2 = step2_downlink_aoa(users, &s1, ue_det, sweep_noise_var, rng)?;
    let beams = BeamformerSet::from_parts(s1, s2)?;
    let gram = beams.frf_gram_fro_sq();
    let (downlink_true, downlink_for_precoder) = match cfg.estimation {
        EstimationMode::Proposed => {
            let pilots = make_pilots(cfg.n, pilot_energy)?;
            // Receiver noise power is normalized to one throughout.
            let eq = step3_ls_estimate(users, &beams, &pilots, 1.0, rng)?;
            (eq.true_downlink().clone(), eq.estimate_downlink().clone())
        }
        EstimationMode::PerfectEquivalent | EstimationMode::PerfectFull => {
            let d = true_equivalent_channel(users, &beams)?;
            (d.clone(), d)
        }
    };
    Ok(EstimateOutcome { beams, downlink_true, downlink_for_precoder, gram })
}

fn run_trial(
    cfg: &ExperimentConfig,
    bs_det: &nalgebra::DMatrix<num_complex::Complex64>,
    ue_det: &nalgebra::DMatrix<num_complex::Complex64>,
    trial: usize,
) -> Result<TrialRow> {
    let users = draw_users(cfg, trial)?;
    let noise_power = 1.0;

    let want = |id: CurveId| cfg.curves.contains(&id);
    let mut row = TrialRow {
        curves: cfg
            .curves
            .iter()
            .filter(|c| c.is_stochastic())
            .map(|&c| (c, Vec::with_capacity(cfg.snr_db_range.len())))
            .collect(),
        gram: Vec::with_capacity(cfg.snr_db_range.len()),
        heq: Vec::with_capacity(cfg.snr_db_range.len()),
    };

    // The estimation stage depends on the SNR point only when its operating
    // point tracks the data SNR; otherwise run it once and reuse it across
    // the sweep (channel and beams are reused within a trial regardless).
    let tracking = matches!(cfg.estimation, EstimationMode::Proposed)
        && (cfg.estimation_snr_db.is_none() || cfg.pilot_energy_db.is_none());
    let mut cached: Option<EstimateOutcome> = None;

    for (si, &snr_db) in cfg.snr_db_range.iter().enumerate() {
        let symbol_energy = db_to_linear(snr_db);
        if tracking || cached.is_none() {
            let sweep_noise_var = match cfg.estimation {
                EstimationMode::Proposed => {
                    1.0 / db_to_linear(cfg.estimation_snr_db.unwrap_or(snr_db))
                }
                _ => 0.0,
            };
            let pilot_energy = db_to_linear(cfg.pilot_energy_db.unwrap_or(snr_db));
            let mut rng =
                derive_rng(cfg.master_seed, Stage::Estimation, trial as u64, si as u64);
            cached = Some(estimate(
                cfg,
                &users,
                bs_det,
                ue_det,
                sweep_noise_var,
                pilot_energy,
                &mut rng,
            )?);
        }
        let outcome = cached.as_ref().expect("estimate cached above");
        row.gram.push(outcome.gram);
        row.heq.push(outcome.downlink_true.norm_squared());
        evaluate_point(&users, outcome, symbol_energy, noise_power, &mut row, want)?;
    }
    Ok(row)
}

fn evaluate_point(
    users: &[UserChannel],
    outcome: &EstimateOutcome,
    symbol_energy: f64,
    noise_power: f64,
    row: &mut TrialRow,
    want: impl Fn(CurveId) -> bool,
) -> Result<()> {
    let mut hybrid = None;
    let mut collided = false;

    if want(CurveId::HybridZf) {
        match zf_precoder(&outcome.downlink_for_precoder) {
            Ok(precoder) => {
                let links =
                    evaluate_downlink(users, &outcome.beams, &precoder, symbol_energy, noise_power)?;
                hybrid = Some(rate_per_user(&[links]));
            }
            Err(SimError::SingularEquivalentChannel { .. }) => collided = true,
            Err(other) => return Err(other),
        }
    }

    let analog = if want(CurveId::AnalogOnly) {
        Some(rate_per_user(&[analog_only_baseline(
            users,
            &outcome.beams,
            symbol_energy,
            noise_power,
        )?]))
    } else {
        None
    };

    let mut digital = None;
    if want(CurveId::FullyDigital) {
        match fully_digital_baseline(users, symbol_energy, noise_power) {
            Ok(links) => digital = Some(rate_per_user(&[links])),
            Err(SimError::SingularEquivalentChannel { .. }) => collided = true,
            Err(other) => return Err(other),
        }
    }

    // A collision anywhere voids the whole point for every stochastic curve
    // so that cross-curve comparisons keep their common random numbers.
    for (&id, series) in row.curves.iter_mut() {
        let value = if collided {
            None
        } else {
            match id {
                CurveId::HybridZf => hybrid,
                CurveId::AnalogOnly => analog,
                CurveId::FullyDigital => digital,
                _ => unreachable!("bound curves are not stochastic"),
            }
        };
        series.push(value);
    }
    Ok(())
}

/// Runs every trial and returns the raw per-trial samples.
pub fn run_experiment_detailed(cfg: &ExperimentConfig) -> Result<DetailedRun> {
    cfg.validate()?;
    let bs = ArrayGeometry::new(cfg.m, cfg.spacing_ratio)?;
    let ue = ArrayGeometry::new(cfg.p, cfg.spacing_ratio)?;
    let grid = AngleGrid::uniform(cfg.j)?;
    let bs_det = detection_matrix(&bs, &grid);
    let ue_det = detection_matrix(&ue, &grid);

    let rows: Vec<TrialRow> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, &bs_det, &ue_det, t))
        .collect::<Result<_>>()?;

    let num_points = cfg.snr_db_range.len();
    let mut curves: BTreeMap<CurveId, Vec<Vec<Option<f64>>>> = cfg
        .curves
        .iter()
        .filter(|c| c.is_stochastic())
        .map(|&c| (c, vec![Vec::with_capacity(cfg.trials); num_points]))
        .collect();
    let mut gram = vec![Vec::with_capacity(cfg.trials); num_points];
    let mut heq = vec![Vec::with_capacity(cfg.trials); num_points];
    for row in &rows {
        for (id, series) in &row.curves {
            let dst = curves.get_mut(id).expect("curve present");
            for (si, value) in series.iter().enumerate() {
                dst[si].push(*value);
            }
        }
        for (si, g) in row.gram.iter().enumerate() {
            gram[si].push(*g);
        }
        for (si, h) in row.heq.iter().enumerate() {
            heq[si].push(*h);
        }
    }
    Ok(DetailedRun {
        snr_db: cfg.snr_db_range.clone(),
        curves,
        gram_fro_sq: gram,
        heq_fro_sq: heq,
    })
}

fn mean_and_std_err(samples: &[Option<f64>]) -> (f64, f64, usize, usize) {
    let used: Vec<f64> = samples.iter().flatten().copied().collect();
    let outages = samples.len() - used.len();
    if used.is_empty() {
        return (f64::NAN, 0.0, 0, outages);
    }
    let n = used.len() as f64;
    let mean = used.iter().sum::<f64>() / n;
    let std_err = if used.len() < 2 {
        0.0
    } else {
        let var = used.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    };
    (mean, std_err, used.len(), outages)
}

/// Runs the configured experiment and aggregates every requested curve.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<CurvePoint>> {
    let detailed = run_experiment_detailed(cfg)?;
    let mut points = Vec::new();

    for &curve in &cfg.curves {
        if !curve.is_stochastic() {
            continue;
        }
        let series = &detailed.curves[&curve];
        for (si, &snr_db) in detailed.snr_db.iter().enumerate() {
            let (mean, std_err, used, outages) = mean_and_std_err(&series[si]);
            points.push(CurvePoint {
                curve_id: curve,
                snr_db,
                mean_rate: mean,
                std_err,
                trials_used: used,
                outages,
            });
        }
    }

    for &curve in &cfg.curves {
        if curve.is_stochastic() {
            continue;
        }
        for (si, &snr_db) in detailed.snr_db.iter().enumerate() {
            let snr = db_to_linear(snr_db);
            let gram = match curve {
                // Realized beam Gram norm averaged over the trials at this
                // point; the other bounds do not depend on it.
                CurveId::BoundThm1 => {
                    let g = &detailed.gram_fro_sq[si];
                    g.iter().sum::<f64>() / g.len() as f64
                }
                _ => cfg.n as f64,
            };
            let inputs = BoundInputs::new(cfg.m, cfg.p, cfg.n, cfg.kappa, snr, gram)?;
            let mean_rate = match curve {
                CurveId::BoundThm1 => theorem1_upper(&inputs),
                CurveId::BoundCor1 => corollary1_asymptotic(&inputs),
                CurveId::BoundCor2 => corollary2_fully_digital(&inputs),
                _ => unreachable!(),
            };
            points.push(CurvePoint {
                curve_id: curve,
                snr_db,
                mean_rate,
                std_err: 0.0,
                trials_used: cfg.trials,
                outages: 0,
            });
        }
    }

    Ok(points)
}

/// Preset: large array serving ten single-antenna users over an i.i.d.
/// Rician channel with K-factor 2, compared against the fully digital
/// reference and all closed-form bounds. Equivalent-channel knowledge is
/// exact (the regime the bounds are derived for); set `estimation` to
/// `proposed` to see the finite-pilot-energy behavior instead.
pub fn figure4_config() -> ExperimentConfig {
    ExperimentConfig {
        m: 100,
        n: 10,
        p: 1,
        j: default_grid_points(),
        spacing_ratio: default_spacing_ratio(),
        kappa: 2.0,
        scatter_mode: ScatterMode::Iid,
        cluster: None,
        los_angles_rad: None,
        snr_db_range: default_snr_range(),
        trials: default_trials(),
        master_seed: 0,
        pilot_energy_db: None,
        estimation_snr_db: None,
        estimation: EstimationMode::PerfectEquivalent,
        curves: vec![
            CurveId::HybridZf,
            CurveId::FullyDigital,
            CurveId::BoundThm1,
            CurveId::BoundCor1,
            CurveId::BoundCor2,
        ],
    }
}

/// Preset: non-sparse clustered channel (eight single-path clusters) with
/// sixteen-antenna users, contrasting ZF against plain beam steering under
/// perfect equivalent-channel knowledge.
pub fn figure5_config() -> ExperimentConfig {
    ExperimentConfig {
        m: 100,
        n: 4,
        p: 16,
        j: default_grid_points(),
        spacing_ratio: default_spacing_ratio(),
        kappa: 1.0,
        scatter_mode: ScatterMode::Clustered,
        cluster: Some(ClusterSpec {
            num_clusters: 8,
            paths_per_cluster: None,
            angle_spread_rad: default_angle_spread(),
        }),
        los_angles_rad: None,
        snr_db_range: default_snr_range(),
        trials: default_trials(),
        master_seed: 0,
        pilot_energy_db: None,
        estimation_snr_db: None,
        estimation: EstimationMode::PerfectEquivalent,
        curves: vec![CurveId::HybridZf, CurveId::AnalogOnly],
    }
}

/// Preset: reduced array for fast iteration; same structure as the first
/// figure preset at roughly a quarter of the work.
pub fn quick_config() -> ExperimentConfig {
    ExperimentConfig {
        m: 64,
        n: 4,
        p: 8,
        kappa: 2.0,
        trials: 200,
        ..figure4_config()
    }
}
