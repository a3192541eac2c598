//! End-to-end validation suite.
//!
//! Each check pins one verifiable property of the pipeline — bound
//! dominance, estimator consistency, nulling depth, ordering claims,
//! determinism — with fixed seeds and tolerances. The `check` subcommand of
//! the CLI runs them all and prints one line per check; the acceptance
//! integration test asserts them.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng as _;

use crate::bounds::{
    corollary1_asymptotic, corollary2_fully_digital, theorem1_upper, trace_inverse_bound_check,
    BoundInputs,
};
use crate::channel::{los_channel, scatter_iid, RicianFactor, UserChannel};
use crate::error::Result;
use crate::estimation::{
    make_pilots, step1_uplink_aoa, step2_downlink_aoa, step3_ls_estimate, true_equivalent_channel,
    BeamformerSet,
};
use crate::experiment::{
    figure4_config, figure5_config, run_experiment, run_experiment_detailed, CurveId,
    EstimationMode, ExperimentConfig, ScatterMode,
};
use crate::geometry::{detection_matrix, AngleGrid, ArrayGeometry};
use crate::output::curves_to_csv;
use crate::precoding::{evaluate_downlink, zf_precoder};
use crate::rng::{derive_rng, standard_complex, Stage};

/// Outcome of one validation check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckReport {
    pub fn status_line(&self) -> String {
        format!(
            "{} criterion {:2} [{}] {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

fn report(id: usize, name: &'static str, body: Result<(bool, String)>) -> CheckReport {
    match body {
        Ok((passed, detail)) => CheckReport { id, name, passed, detail },
        Err(err) => CheckReport { id, name, passed: false, detail: format!("error: {err}") },
    }
}

fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// 1: every per-trial ZF rate with exact equivalent knowledge stays below
/// the closed-form bound evaluated at that trial's realized beam Gram norm.
///
/// The strict per-draw form asserted here is known not to hold: the bound's
/// bracket carries the scattering energy at its expectation, and on a small
/// share of draws the realized scattering plus LOS/scatter cross energy
/// exceeds that expectation by more than the beam-alignment slack. The check
/// reports the per-draw verdict (the criterion as stated) together with the
/// two forms that do hold: the per-draw chain through the realized
/// equivalent-channel energy, and dominance of the trial mean at every SNR
/// point.
pub fn check_bound_dominance() -> CheckReport {
    report(1, "bound dominance", (|| {
        let cfg = ExperimentConfig {
            m: 64,
            n: 4,
            p: 8,
            kappa: 2.0,
            scatter_mode: ScatterMode::Iid,
            cluster: None,
            trials: 500,
            master_seed: 101,
            estimation: EstimationMode::PerfectEquivalent,
            curves: vec![CurveId::HybridZf],
            ..figure4_config()
        };
        let started = Instant::now();
        let run = run_experiment_detailed(&cfg)?;
        let elapsed = started.elapsed().as_secs_f64();
        let rates = &run.curves[&CurveId::HybridZf];
        let n2 = (cfg.n * cfg.n) as f64;
        let mut min_margin = f64::INFINITY;
        let mut violations = 0usize;
        let mut chain_violations = 0usize;
        let mut mean_violations = 0usize;
        let mut checked = 0usize;
        for (si, &snr_db) in run.snr_db.iter().enumerate() {
            let snr = 10f64.powf(snr_db / 10.0);
            let mut rate_sum = 0.0;
            let mut rate_count = 0usize;
            let mut gram_sum = 0.0;
            for (t, rate) in rates[si].iter().enumerate() {
                let Some(rate) = rate else { continue };
                let gram = run.gram_fro_sq[si][t];
                let bound =
                    theorem1_upper(&BoundInputs::new(cfg.m, cfg.p, cfg.n, cfg.kappa, snr, gram)?);
                let margin = bound - rate;
                min_margin = min_margin.min(margin);
                checked += 1;
                if *rate > bound + 1e-9 {
                    violations += 1;
                }
                // Realized-energy chain: always true, by the trace
                // inequality applied to this draw's equivalent channel.
                let realized = (1.0 + run.heq_fro_sq[si][t] / n2 * snr).log2();
                if *rate > realized + 1e-9 {
                    chain_violations += 1;
                }
                rate_sum += rate;
                rate_count += 1;
                gram_sum += gram;
            }
            let mean_rate = rate_sum / rate_count as f64;
            let mean_gram = gram_sum / rate_count as f64;
            let mean_bound = theorem1_upper(&BoundInputs::new(
                cfg.m, cfg.p, cfg.n, cfg.kappa, snr, mean_gram,
            )?);
            if mean_rate > mean_bound {
                mean_violations += 1;
            }
        }
        let passed = violations == 0 && elapsed < 60.0;
        Ok((passed, format!(
            "per-draw violations {violations}/{checked} (min margin {min_margin:.3e} bits); \
             realized-energy chain violations {chain_violations}/{checked}; \
             mean-above-bound points {mean_violations}/{}; elapsed {elapsed:.1} s",
            run.snr_db.len()
        )))
    })())
}

/// 2: the hybrid and fully digital asymptotic bounds coincide for a very
/// large K-factor.
pub fn check_corollary_coincidence() -> CheckReport {
    report(2, "corollary coincidence", (|| {
        let mut worst: f64 = 0.0;
        for snr_db in [-10.0f64, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0] {
            let snr = 10f64.powf(snr_db / 10.0);
            let inputs = BoundInputs::new(100, 1, 10, 1e9, snr, 10.0)?;
            let gap = (corollary1_asymptotic(&inputs) - corollary2_fully_digital(&inputs)).abs();
            worst = worst.max(gap);
        }
        Ok((worst < 1e-3, format!("max |cor1 - cor2| = {worst:.3e} bits")))
    })())
}

/// 3: the rate gap between the fully digital reference and the proposed
/// hybrid pipeline shrinks as the K-factor grows.
pub fn check_gap_shrinks_with_kappa() -> CheckReport {
    report(3, "gap shrinks with K-factor", (|| {
        let base = ExperimentConfig {
            m: 100,
            n: 10,
            p: 1,
            snr_db_range: vec![10.0],
            trials: 500,
            master_seed: 103,
            estimation: EstimationMode::Proposed,
            scatter_mode: ScatterMode::Iid,
            cluster: None,
            curves: vec![CurveId::HybridZf, CurveId::FullyDigital],
            ..figure4_config()
        };
        let gap_stats = |kappa: f64| -> Result<(f64, f64, usize)> {
            let mut cfg = base.clone();
            cfg.kappa = kappa;
            let run = run_experiment_detailed(&cfg)?;
            let hybrid = &run.curves[&CurveId::HybridZf][0];
            let digital = &run.curves[&CurveId::FullyDigital][0];
            let gaps: Vec<f64> = hybrid
                .iter()
                .zip(digital)
                .filter_map(|(h, d)| match (h, d) {
                    (Some(h), Some(d)) => Some(d - h),
                    _ => None,
                })
                .collect();
            let (mean, se) = mean_and_se(&gaps);
            Ok((mean, se, gaps.len()))
        };
        let (g1, se1, n1) = gap_stats(1.0)?;
        let (g10, se10, n10) = gap_stats(10.0)?;
        let sigma = (se1 * se1 + se10 * se10).sqrt();
        let passed = g1 > g10 + 2.0 * sigma;
        Ok((passed, format!(
            "gap(k=1) = {g1:.4} ({n1} trials), gap(k=10) = {g10:.4} ({n10} trials), \
             separation {:.1} sigma",
            (g1 - g10) / sigma
        )))
    })())
}

/// 4: under the clustered non-sparse preset, ZF beats analog-only steering
/// by at least two standard errors at every nonnegative SNR point.
pub fn check_hybrid_beats_analog() -> CheckReport {
    report(4, "ZF over analog-only ordering", (|| {
        let cfg = figure5_config().with_trials(300).with_master_seed(104);
        let run = run_experiment_detailed(&cfg)?;
        let mut worst_sep = f64::INFINITY;
        let mut all_hold = true;
        for (si, &snr_db) in run.snr_db.iter().enumerate() {
            if snr_db < 0.0 {
                continue;
            }
            let hybrid: Vec<f64> =
                run.curves[&CurveId::HybridZf][si].iter().flatten().copied().collect();
            let analog: Vec<f64> =
                run.curves[&CurveId::AnalogOnly][si].iter().flatten().copied().collect();
            let (mh, seh) = mean_and_se(&hybrid);
            let (ma, sea) = mean_and_se(&analog);
            let sigma = (seh * seh + sea * sea).sqrt();
            let sep = (mh - ma) / sigma;
            worst_sep = worst_sep.min(sep);
            if mh - ma < 2.0 * sigma {
                all_hold = false;
            }
        }
        Ok((all_hold, format!("smallest separation {worst_sep:.1} sigma at snr >= 0 dB")))
    })())
}

/// 5: a precoder built from the exact equivalent channel drives residual
/// interference at least twenty orders of magnitude below the signal.
pub fn check_zf_nulling() -> CheckReport {
    report(5, "ZF nulling depth", (|| {
        let bs = ArrayGeometry::half_wavelength(32)?;
        let ue = ArrayGeometry::half_wavelength(4)?;
        let grid = AngleGrid::uniform(180)?;
        let bs_det = detection_matrix(&bs, &grid);
        let ue_det = detection_matrix(&ue, &grid);
        let kappa = RicianFactor::new(1.0)?;
        let mut worst: f64 = 0.0;
        let mut rng = derive_rng(105, Stage::Aux, 0, 0);
        for _ in 0..100 {
            let users: Vec<UserChannel> = (0..4)
                .map(|_| {
                    let theta = rng.random::<f64>() * PI;
                    let phi = rng.random::<f64>() * PI;
                    let los = los_channel(&bs, &ue, theta, phi)?;
                    let scatter = scatter_iid(32, 4, &mut rng);
                    UserChannel::new(los, scatter, kappa, theta, phi)
                })
                .collect::<Result<_>>()?;
            let s1 = step1_uplink_aoa(&users, &bs_det, 0.0, &mut rng)?;
            let s2 = step2_downlink_aoa(&users, &s1, &ue_det, 0.0, &mut rng)?;
            let beams = BeamformerSet::from_parts(s1, s2)?;
            let d = true_equivalent_channel(&users, &beams)?;
            let precoder = match zf_precoder(&d) {
                Ok(p) => p,
                // Beam collisions are an accounted failure mode elsewhere;
                // nulling depth is only defined for solvable draws.
                Err(_) => continue,
            };
            for link in evaluate_downlink(&users, &beams, &precoder, 1.0, 1.0)? {
                worst = worst.max(link.interference_power / link.desired_power);
            }
        }
        Ok((worst < 1e-20, format!("worst leakage ratio {worst:.3e}")))
    })())
}

/// 6: noiseless sweeps with a dominant line of sight recover exact on-grid
/// directions on both ends, every trial.
pub fn check_on_grid_recovery() -> CheckReport {
    report(6, "on-grid direction recovery", (|| {
        let m = 32;
        let p = 8;
        let n = 4;
        let grid = AngleGrid::uniform(180)?;
        let bs = ArrayGeometry::half_wavelength(m)?;
        let ue = ArrayGeometry::half_wavelength(p)?;
        let bs_det = detection_matrix(&bs, &grid);
        let ue_det = detection_matrix(&ue, &grid);
        let kappa = RicianFactor::new(1e9)?;
        let mut rng = derive_rng(106, Stage::Aux, 0, 0);
        let mut exact = 0usize;
        let trials = 100usize;
        for _ in 0..trials {
            let bs_idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..180)).collect();
            let ue_idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..180)).collect();
            let users: Vec<UserChannel> = bs_idx
                .iter()
                .zip(&ue_idx)
                .map(|(&bi, &ui)| {
                    let theta = grid.angle(bi);
                    let phi = grid.angle(ui);
                    let los = los_channel(&bs, &ue, theta, phi)?;
                    let scatter = scatter_iid(m, p, &mut rng);
                    UserChannel::new(los, scatter, kappa, theta, phi)
                })
                .collect::<Result<_>>()?;
            let s1 = step1_uplink_aoa(&users, &bs_det, 0.0, &mut rng)?;
            let s2 = step2_downlink_aoa(&users, &s1, &ue_det, 0.0, &mut rng)?;
            if s1.grid_indices == bs_idx && s2.grid_indices == ue_idx {
                exact += 1;
            }
        }
        Ok((exact == trials, format!("exact recoveries {exact}/{trials}")))
    })())
}

/// 7: pilot least squares reaches one percent relative error when the pilot
/// energy is a million times the noise power.
pub fn check_ls_consistency() -> CheckReport {
    report(7, "least-squares consistency", (|| {
        let m = 16;
        let p = 4;
        let n = 4;
        let bs = ArrayGeometry::half_wavelength(m)?;
        let ue = ArrayGeometry::half_wavelength(p)?;
        let grid = AngleGrid::uniform(90)?;
        let bs_det = detection_matrix(&bs, &grid);
        let ue_det = detection_matrix(&ue, &grid);
        let kappa = RicianFactor::new(2.0)?;
        let mut rng = derive_rng(107, Stage::Aux, 0, 0);
        let users: Vec<UserChannel> = (0..n)
            .map(|_| {
                let theta = rng.random::<f64>() * PI;
                let phi = rng.random::<f64>() * PI;
                let los = los_channel(&bs, &ue, theta, phi)?;
                let scatter = scatter_iid(m, p, &mut rng);
                UserChannel::new(los, scatter, kappa, theta, phi)
            })
            .collect::<Result<_>>()?;
        let s1 = step1_uplink_aoa(&users, &bs_det, 0.0, &mut rng)?;
        let s2 = step2_downlink_aoa(&users, &s1, &ue_det, 0.0, &mut rng)?;
        let beams = BeamformerSet::from_parts(s1, s2)?;
        let sigma2 = 1.0;
        let pilots = make_pilots(n, 1e6 * sigma2)?;
        let trials = 100usize;
        let mut rel = 0.0;
        for _ in 0..trials {
            let eq = step3_ls_estimate(&users, &beams, &pilots, sigma2, &mut rng)?;
            rel += (eq.estimate_downlink() - eq.true_downlink()).norm()
                / eq.true_downlink().norm();
        }
        rel /= trials as f64;
        Ok((rel < 1e-2, format!("mean relative error {rel:.3e}")))
    })())
}

/// 8: the harmonic/arithmetic trace inequality holds on a thousand random
/// Hermitian positive-definite matrices and is tight on scaled identities.
pub fn check_trace_inequality() -> CheckReport {
    report(8, "trace inequality", (|| {
        let mut rng = derive_rng(108, Stage::Aux, 0, 0);
        let mut violations = 0usize;
        for _ in 0..1000 {
            let n = rng.random_range(2usize..=16);
            let b = DMatrix::from_fn(n, n, |_, _| standard_complex(&mut rng));
            let a = b.adjoint() * &b + DMatrix::identity(n, n) * Complex64::new(1e-3, 0.0);
            if !trace_inverse_bound_check(&a)?.holds {
                violations += 1;
            }
        }
        let mut equality_ok = true;
        let mut worst_eq_gap: f64 = 0.0;
        for c in [0.5f64, 1.0, 7.0] {
            for n in [2usize, 5, 11] {
                let a = DMatrix::<Complex64>::identity(n, n) * Complex64::new(c, 0.0);
                let tb = trace_inverse_bound_check(&a)?;
                let gap = (tb.inverse_trace_side - tb.trace_side).abs();
                worst_eq_gap = worst_eq_gap.max(gap / tb.trace_side.abs());
                if gap > 1e-12 * tb.trace_side.abs().max(1.0) {
                    equality_ok = false;
                }
            }
        }
        Ok((violations == 0 && equality_ok, format!(
            "violations {violations}/1000, worst identity-case relative gap {worst_eq_gap:.2e}"
        )))
    })())
}

/// 9: with beams frozen and fresh pure-scattering draws, the mean squared
/// Frobenius norm of the equivalent channel converges to N^2 — the scatter
/// term of the closed-form bound.
pub fn check_scatter_expectation() -> CheckReport {
    report(9, "scatter-term expectation", (|| {
        let m = 32;
        let p = 8;
        let n = 4;
        let bs = ArrayGeometry::half_wavelength(m)?;
        let ue = ArrayGeometry::half_wavelength(p)?;
        let grid = AngleGrid::uniform(180)?;
        let bs_det = detection_matrix(&bs, &grid);
        let ue_det = detection_matrix(&ue, &grid);
        let mut rng = derive_rng(109, Stage::Aux, 0, 0);

        // Select beams from a strongly line-of-sight draw; the later scatter
        // draws are independent of this selection.
        let strong = RicianFactor::new(1e9)?;
        let seed_users: Vec<UserChannel> = (0..n)
            .map(|_| {
                let theta = rng.random::<f64>() * PI;
                let phi = rng.random::<f64>() * PI;
                let los = los_channel(&bs, &ue, theta, phi)?;
                let scatter = scatter_iid(m, p, &mut rng);
                UserChannel::new(los, scatter, strong, theta, phi)
            })
            .collect::<Result<_>>()?;
        let s1 = step1_uplink_aoa(&seed_users, &bs_det, 0.0, &mut rng)?;
        let s2 = step2_downlink_aoa(&seed_users, &s1, &ue_det, 0.0, &mut rng)?;
        let beams = BeamformerSet::from_parts(s1, s2)?;

        let pure = RicianFactor::new(0.0)?;
        let draws = 2000usize;
        let mut acc = 0.0;
        for _ in 0..draws {
            let users: Vec<UserChannel> = seed_users
                .iter()
                .map(|u| {
                    UserChannel::new(
                        u.los().clone(),
                        scatter_iid(m, p, &mut rng),
                        pure,
                        u.theta(),
                        u.phi(),
                    )
                })
                .collect::<Result<_>>()?;
            acc += true_equivalent_channel(&users, &beams)?.norm_squared();
        }
        let mean = acc / draws as f64;
        let target = (n * n) as f64;
        let rel = (mean - target).abs() / target;
        Ok((rel < 0.05, format!(
            "mean ||H_eq||_F^2 = {mean:.3} over {draws} draws, target {target} (rel dev {rel:.3})"
        )))
    })())
}

/// 10: two runs of the first figure preset with the same seed serialize to
/// byte-identical CSV.
pub fn check_determinism() -> CheckReport {
    report(10, "run determinism", (|| {
        let cfg = figure4_config().with_master_seed(7);
        let a = curves_to_csv(&run_experiment(&cfg)?).expect("nonempty");
        let b = curves_to_csv(&run_experiment(&cfg)?).expect("nonempty");
        Ok((a == b, format!("{} bytes per file, identical: {}", a.len(), a == b)))
    })())
}

/// Runs every check in order.
pub fn run_all() -> Vec<CheckReport> {
    vec![
        check_bound_dominance(),
        check_corollary_coincidence(),
        check_gap_shrinks_with_kappa(),
        check_hybrid_beats_analog(),
        check_zf_nulling(),
        check_on_grid_recovery(),
        check_ls_consistency(),
        check_trace_inequality(),
        check_scatter_expectation(),
        check_determinism(),
    ]
}
