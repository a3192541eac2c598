//! Zero-forcing precoding over the equivalent channel, link-level power
//! accounting, and the analog-only / fully digital reference schemes.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use crate::channel::UserChannel;
use crate::error::{Result, SimError};
use crate::estimation::{true_equivalent_channel, BeamformerSet};

/// Condition-estimate ceiling beyond which an equivalent channel is treated
/// as a beam collision rather than silently regularized.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Baseband precoder: unnormalized column weights plus the transmit power
/// normalization `beta = sqrt(1 / tr(W W^H))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    weights: DMatrix<Complex64>,
    beta: f64,
}

impl Precoder {
    /// Identity weights with equal per-user power; no interference
    /// suppression.
    pub fn identity(n: usize) -> Self {
        Self {
            weights: DMatrix::identity(n, n),
            beta: 1.0 / (n as f64).sqrt(),
        }
    }

    pub fn weights(&self) -> &DMatrix<Complex64> {
        &self.weights
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `beta * W`, the matrix actually applied to the symbol vector.
    pub fn scaled_weights(&self) -> DMatrix<Complex64> {
        &self.weights * Complex64::new(self.beta, 0.0)
    }
}

/// Right-inverse ZF weights for a (possibly wide) downlink matrix D:
/// `W = D^H (D D^H)^{-1}`, so `D W = I`. Returns the weights and beta.
fn zf_weights(downlink: &DMatrix<Complex64>) -> Result<(DMatrix<Complex64>, f64)> {
    let n = downlink.nrows();
    let gram = downlink * downlink.adjoint();
    let chol = Cholesky::new(gram.clone())
        .ok_or(SimError::SingularEquivalentChannel { cond: f64::INFINITY })?;
    // Frobenius-based condition estimate; at most a factor N away from the
    // spectral condition number, which is plenty for a collision guard.
    let cond = gram.norm() * chol.inverse().norm();
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(SimError::SingularEquivalentChannel { cond });
    }
    // W^H = G^{-1} D via triangular solves, then one refinement step on the
    // residual of D W = I to push the nulling depth to machine level:
    // W += D^H G^{-1} (I - D W).
    let mut weights = chol.solve(downlink).adjoint();
    let residual = DMatrix::identity(n, n) - downlink * &weights;
    weights += downlink.adjoint() * chol.solve(&residual);
    let beta = 1.0 / weights.norm();
    Ok((weights, beta))
}

/// Zero-forcing precoder built from the (estimated or exact) downlink
/// equivalent channel. Fails with a beam-collision error when two users were
/// assigned effectively identical beams.
pub fn zf_precoder(downlink_eq: &DMatrix<Complex64>) -> Result<Precoder> {
    if downlink_eq.nrows() != downlink_eq.ncols() {
        return Err(SimError::DimensionMismatch(format!(
            "equivalent channel must be square, got {:?}",
            downlink_eq.shape()
        )));
    }
    let (weights, beta) = zf_weights(downlink_eq)?;
    Ok(Precoder { weights, beta })
}

/// Per-user link budget for one channel realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkResult {
    pub desired_power: f64,
    pub interference_power: f64,
    pub noise_power: f64,
    pub sinr: f64,
    pub rate: f64,
    pub symbol_energy: f64,
}

impl LinkResult {
    pub fn from_powers(
        desired_power: f64,
        interference_power: f64,
        noise_power: f64,
        symbol_energy: f64,
    ) -> Self {
        let sinr = desired_power / (interference_power + noise_power);
        Self {
            desired_power,
            interference_power,
            noise_power,
            sinr,
            rate: (1.0 + sinr).log2(),
            symbol_energy,
        }
    }
}

fn links_from_gains(
    gains: &DMatrix<Complex64>,
    symbol_energy: f64,
    noise_power: f64,
) -> Vec<LinkResult> {
    let n = gains.nrows();
    (0..n)
        .map(|k| {
            let mut desired = 0.0;
            let mut interference = 0.0;
            for j in 0..n {
                let p = gains[(k, j)].norm_sqr() * symbol_energy;
                if j == k {
                    desired = p;
                } else {
                    interference += p;
                }
            }
            LinkResult::from_powers(desired, interference, noise_power, symbol_energy)
        })
        .collect()
}

/// Evaluates the downlink through the true channels: user k's combined gain
/// from the stream of user j is its combiner applied to `H_k^T F beta w_j`.
/// Unit-norm combiners leave the noise power at the receiver unchanged.
pub fn evaluate_downlink(
    users: &[UserChannel],
    beams: &BeamformerSet,
    precoder: &Precoder,
    symbol_energy: f64,
    noise_power: f64,
) -> Result<Vec<LinkResult>> {
    let d_true = true_equivalent_channel(users, beams)?;
    let gains = d_true * precoder.scaled_weights();
    Ok(links_from_gains(&gains, symbol_energy, noise_power))
}

/// Analog-only steering: the selected beams with identity baseband weights
/// and equal power split. Inter-user interference is left standing.
pub fn analog_only_baseline(
    users: &[UserChannel],
    beams: &BeamformerSet,
    symbol_energy: f64,
    noise_power: f64,
) -> Result<Vec<LinkResult>> {
    let precoder = Precoder::identity(users.len());
    evaluate_downlink(users, beams, &precoder, symbol_energy, noise_power)
}

/// Dominant left singular vector of `a`, computed as the top eigenvector of
/// `a a^H` by power iteration. The result has unit norm; its global phase is
/// arbitrary but deterministic.
pub fn dominant_left_singular_vector(a: &DMatrix<Complex64>) -> DVector<Complex64> {
    let rows = a.nrows();
    if rows == 1 {
        return DVector::from_element(1, Complex64::new(1.0, 0.0));
    }
    let gram = a * a.adjoint();
    // Start from the strongest column of the Gram matrix.
    let start = (0..rows)
        .max_by(|&i, &j| {
            gram.column(i)
                .norm()
                .partial_cmp(&gram.column(j).norm())
                .unwrap()
        })
        .unwrap();
    let mut v = gram.column(start).into_owned();
    let norm = v.norm();
    if norm == 0.0 {
        // Zero matrix: any unit vector is a valid answer.
        let mut e = DVector::zeros(rows);
        e[0] = Complex64::new(1.0, 0.0);
        return e;
    }
    v /= Complex64::new(norm, 0.0);
    for _ in 0..200 {
        let mut next = &gram * &v;
        let n = next.norm();
        if n == 0.0 {
            break;
        }
        next /= Complex64::new(n, 0.0);
        let delta = (&next - &v).norm();
        v = next;
        if delta < 1e-14 {
            break;
        }
    }
    v
}

/// Fully digital reference: every base-station antenna has its own RF chain
/// and channel state is perfectly known. Each user combines with the
/// dominant left singular vector of its downlink channel; the base station
/// zero-forces the stacked effective rows.
pub fn fully_digital_baseline(
    users: &[UserChannel],
    symbol_energy: f64,
    noise_power: f64,
) -> Result<Vec<LinkResult>> {
    if users.is_empty() {
        return Err(SimError::NoUsers);
    }
    let n = users.len();
    let m = users[0].num_bs_antennas();
    let mut effective = DMatrix::zeros(n, m);
    for (k, user) in users.iter().enumerate() {
        let downlink = user.assemble().transpose();
        let combiner = dominant_left_singular_vector(&downlink);
        let row = combiner.adjoint() * downlink;
        effective.set_row(k, &row.row(0));
    }
    let (weights, beta) = zf_weights(&effective)?;
    let gains = effective * (weights * Complex64::new(beta, 0.0));
    Ok(links_from_gains(&gains, symbol_energy, noise_power))
}

/// Mean achievable rate per user across a set of per-trial link results.
pub fn rate_per_user(trials: &[Vec<LinkResult>]) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for trial in trials {
        for link in trial {
            sum += link.rate;
            count += 1;
        }
    }
    sum / count as f64
}
