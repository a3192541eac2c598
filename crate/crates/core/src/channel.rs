//! Per-user Rician channel synthesis.
//!
//! The uplink channel of a user is `H = sqrt(k/(k+1)) H_los + sqrt(1/(k+1)) H_scatter`
//! with a rank-one line-of-sight matrix and either i.i.d. CN(0,1) or clustered
//! multipath scattering. Time-division duplexing is assumed throughout: the
//! downlink channel is the transpose of the same draw, never a second draw.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

use crate::error::{Result, SimError};
use crate::geometry::{steering_vector, ArrayGeometry, PhaseSign};
use crate::rng::standard_complex;

/// Rician K-factor on a linear scale. Zero means pure scattering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianFactor {
    kappa: f64,
}

impl RicianFactor {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(SimError::BadRicianFactor(kappa));
        }
        Ok(Self { kappa })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// sqrt(k / (k + 1)); amplitude weight of the line-of-sight part.
    pub fn los_weight(&self) -> f64 {
        (self.kappa / (self.kappa + 1.0)).sqrt()
    }

    /// sqrt(1 / (k + 1)); amplitude weight of the scattering part.
    pub fn scatter_weight(&self) -> f64 {
        (1.0 / (self.kappa + 1.0)).sqrt()
    }
}

/// Clustered multipath layout: each cluster owns a mean direction on both
/// link ends and contributes a few paths spread around it.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterConfig {
    num_clusters: usize,
    paths_per_cluster: Vec<usize>,
    angle_spread: f64,
}

impl ClusterConfig {
    /// Narrow default spread of one tenth of a radian.
    pub const DEFAULT_ANGLE_SPREAD: f64 = 0.1;

    pub fn new(paths_per_cluster: Vec<usize>, angle_spread: f64) -> Result<Self> {
        if paths_per_cluster.is_empty() {
            return Err(SimError::BadClusterConfig(
                "need at least one cluster".into(),
            ));
        }
        if paths_per_cluster.contains(&0) {
            return Err(SimError::BadClusterConfig(
                "every cluster must contribute at least one path".into(),
            ));
        }
        if !(angle_spread >= 0.0 && angle_spread.is_finite()) {
            return Err(SimError::BadClusterConfig(format!(
                "angle spread must be nonnegative, got {angle_spread}"
            )));
        }
        Ok(Self {
            num_clusters: paths_per_cluster.len(),
            paths_per_cluster,
            angle_spread,
        })
    }

    /// `num_clusters` clusters with one path each.
    pub fn single_path_clusters(num_clusters: usize, angle_spread: f64) -> Result<Self> {
        Self::new(vec![1; num_clusters], angle_spread)
    }

    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    pub fn paths_per_cluster(&self) -> &[usize] {
        &self.paths_per_cluster
    }

    pub fn total_paths(&self) -> usize {
        self.paths_per_cluster.iter().sum()
    }

    pub fn angle_spread(&self) -> f64 {
        self.angle_spread
    }
}

/// One user's channel state: the rank-one LOS matrix, the scattering matrix,
/// the Rician weighting between them, and the LOS incidence angles on both
/// ends (base-station side `theta`, user side `phi`).
#[derive(Debug, Clone, PartialEq)]
pub struct UserChannel {
    los: DMatrix<Complex64>,
    scatter: DMatrix<Complex64>,
    rician: RicianFactor,
    theta: f64,
    phi: f64,
}

impl UserChannel {
    pub fn new(
        los: DMatrix<Complex64>,
        scatter: DMatrix<Complex64>,
        rician: RicianFactor,
        theta: f64,
        phi: f64,
    ) -> Result<Self> {
        if los.shape() != scatter.shape() {
            return Err(SimError::DimensionMismatch(format!(
                "LOS is {:?} but scatter is {:?}",
                los.shape(),
                scatter.shape()
            )));
        }
        Ok(Self { los, scatter, rician, theta, phi })
    }

    pub fn los(&self) -> &DMatrix<Complex64> {
        &self.los
    }

    pub fn scatter(&self) -> &DMatrix<Complex64> {
        &self.scatter
    }

    pub fn rician(&self) -> &RicianFactor {
        &self.rician
    }

    /// Base-station-side LOS angle of arrival.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// User-side LOS angle of arrival.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn num_bs_antennas(&self) -> usize {
        self.los.nrows()
    }

    pub fn num_ue_antennas(&self) -> usize {
        self.los.ncols()
    }

    /// Combined uplink channel `sqrt(k/(k+1)) LOS + sqrt(1/(k+1)) scatter`.
    pub fn assemble(&self) -> DMatrix<Complex64> {
        let wl = Complex64::new(self.rician.los_weight(), 0.0);
        let ws = Complex64::new(self.rician.scatter_weight(), 0.0);
        &self.los * wl + &self.scatter * ws
    }
}

/// Rank-one LOS matrix: outer product of the base-station response at `theta`
/// and the conjugated user response at `phi` (negative phase sign on both
/// ends). Its squared Frobenius norm is always `M * P`.
pub fn los_channel(
    bs: &ArrayGeometry,
    ue: &ArrayGeometry,
    theta: f64,
    phi: f64,
) -> Result<DMatrix<Complex64>> {
    let bs_resp = steering_vector(bs, theta, PhaseSign::Negative)?;
    let ue_resp = steering_vector(ue, phi, PhaseSign::Negative)?;
    Ok(bs_resp * ue_resp.adjoint())
}

/// Scattering matrix with i.i.d. CN(0, 1) entries, drawn column by column.
pub fn scatter_iid<R: Rng + ?Sized>(m: usize, p: usize, rng: &mut R) -> DMatrix<Complex64> {
    let data: Vec<Complex64> = (0..m * p).map(|_| standard_complex(rng)).collect();
    DMatrix::from_vec(m, p, data)
}

/// A single propagation path: directions on both ends plus its complex gain.
#[derive(Debug, Clone, Copy)]
pub struct PathRealization {
    pub theta: f64,
    pub phi: f64,
    pub gain: Complex64,
}

/// Sum of path outer products scaled by `1/sqrt(total paths)`.
///
/// This is the deterministic core of the clustered model; the random variant
/// below draws the path list first and then delegates here.
pub fn scatter_from_paths(
    bs: &ArrayGeometry,
    ue: &ArrayGeometry,
    paths: &[PathRealization],
) -> Result<DMatrix<Complex64>> {
    if paths.is_empty() {
        return Err(SimError::BadClusterConfig("path list is empty".into()));
    }
    let mut sum = DMatrix::<Complex64>::zeros(bs.num_elements(), ue.num_elements());
    for path in paths {
        let outer = los_channel(bs, ue, path.theta, path.phi)?;
        sum += outer * path.gain;
    }
    let scale = Complex64::new(1.0 / (paths.len() as f64).sqrt(), 0.0);
    Ok(sum * scale)
}

fn clip_angle(angle: f64) -> f64 {
    angle.clamp(0.0, PI)
}

/// Clustered scattering: cluster centers are uniform over [0, pi] on both
/// ends, per-path offsets are Gaussian with the configured spread (clipped
/// back into range), and path gains are CN(0, 1).
pub fn scatter_clustered<R: Rng + ?Sized>(
    bs: &ArrayGeometry,
    ue: &ArrayGeometry,
    cfg: &ClusterConfig,
    rng: &mut R,
) -> Result<DMatrix<Complex64>> {
    let mut paths = Vec::with_capacity(cfg.total_paths());
    for &num_paths in cfg.paths_per_cluster() {
        let center_theta = rng.random::<f64>() * PI;
        let center_phi = rng.random::<f64>() * PI;
        for _ in 0..num_paths {
            let dt: f64 = rng.sample(StandardNormal);
            let dp: f64 = rng.sample(StandardNormal);
            paths.push(PathRealization {
                theta: clip_angle(center_theta + cfg.angle_spread() * dt),
                phi: clip_angle(center_phi + cfg.angle_spread() * dp),
                gain: standard_complex(rng),
            });
        }
    }
    scatter_from_paths(bs, ue, &paths)
}
