//! Closed-form achievable-rate bounds and the trace inequality they rest on.

use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;

use crate::error::{Result, SimError};

/// Inputs shared by the closed-form bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    bs_antennas: usize,
    ue_antennas: usize,
    num_users: usize,
    kappa: f64,
    snr: f64,
    frf_gram_fro_sq: f64,
}

impl BoundInputs {
    pub fn new(
        bs_antennas: usize,
        ue_antennas: usize,
        num_users: usize,
        kappa: f64,
        snr: f64,
        frf_gram_fro_sq: f64,
    ) -> Result<Self> {
        if bs_antennas == 0 || ue_antennas == 0 || num_users == 0 {
            return Err(SimError::InvalidExperiment(
                "antenna and user counts must be positive".into(),
            ));
        }
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(SimError::BadRicianFactor(kappa));
        }
        if !(snr >= 0.0 && snr.is_finite()) {
            return Err(SimError::InvalidExperiment(format!(
                "snr must be nonnegative and finite, got {snr}"
            )));
        }
        // The Gram matrix of N unit-norm beams has a unit diagonal, so its
        // squared Frobenius norm cannot fall below N.
        if frf_gram_fro_sq < num_users as f64 - 1e-9 {
            return Err(SimError::InvalidExperiment(format!(
                "beam Gram norm {frf_gram_fro_sq} below the user count {num_users}"
            )));
        }
        Ok(Self {
            bs_antennas,
            ue_antennas,
            num_users,
            kappa,
            snr,
            frf_gram_fro_sq,
        })
    }

    pub fn with_snr(mut self, snr: f64) -> Self {
        self.snr = snr;
        self
    }

    pub fn with_gram(mut self, frf_gram_fro_sq: f64) -> Self {
        self.frf_gram_fro_sq = frf_gram_fro_sq;
        self
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }
}

/// Upper bound on the per-user ZF rate through the selected analog beams:
/// `log2(1 + (1/N^2) [ k/(k+1) M P ||F^H F||_F^2 + N^2/(k+1) ] snr)`.
pub fn theorem1_upper(inputs: &BoundInputs) -> f64 {
    let n2 = (inputs.num_users * inputs.num_users) as f64;
    let mp = (inputs.bs_antennas * inputs.ue_antennas) as f64;
    let los = inputs.kappa / (inputs.kappa + 1.0) * mp * inputs.frf_gram_fro_sq;
    let scatter = n2 / (inputs.kappa + 1.0);
    (1.0 + (los + scatter) / n2 * inputs.snr).log2()
}

/// Large-array limit of [`theorem1_upper`], where the beam Gram matrix
/// converges to the identity:
/// `log2(1 + [ (MP/N) k/(k+1) + 1/(k+1) ] snr)`.
pub fn corollary1_asymptotic(inputs: &BoundInputs) -> f64 {
    let mp_over_n = (inputs.bs_antennas * inputs.ue_antennas) as f64 / inputs.num_users as f64;
    let gain = mp_over_n * inputs.kappa / (inputs.kappa + 1.0) + 1.0 / (inputs.kappa + 1.0);
    (1.0 + gain * inputs.snr).log2()
}

/// Large-array rate ceiling of the fully digital system with perfect
/// channel knowledge: `log2(1 + (MP/N) snr)`.
pub fn corollary2_fully_digital(inputs: &BoundInputs) -> f64 {
    let mp_over_n = (inputs.bs_antennas * inputs.ue_antennas) as f64 / inputs.num_users as f64;
    (1.0 + mp_over_n * inputs.snr).log2()
}

/// Both sides of the harmonic/arithmetic trace inequality for a Hermitian
/// positive-definite matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceBound {
    /// `1 / tr(A^{-1})`.
    pub inverse_trace_side: f64,
    /// `tr(A) / N^2`.
    pub trace_side: f64,
    /// Whether `inverse_trace_side <= trace_side` up to a 1e-12 relative
    /// margin (the two sides meet exactly when A is a scaled identity).
    pub holds: bool,
}

/// Evaluates `1/tr(A^{-1}) <= tr(A)/N^2` for a Hermitian positive-definite
/// matrix. Rejects inputs that are not Hermitian or not positive definite.
pub fn trace_inverse_bound_check(a: &DMatrix<Complex64>) -> Result<TraceBound> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(SimError::NotPositiveDefinite);
    }
    let hermitian_defect = (a - a.adjoint()).norm();
    if hermitian_defect > 1e-10 * a.norm().max(1.0) {
        return Err(SimError::NotPositiveDefinite);
    }
    let chol = Cholesky::new(a.clone()).ok_or(SimError::NotPositiveDefinite)?;
    // The complex Cholesky factorization goes through even for indefinite
    // Hermitian input; positive definiteness shows up as a strictly
    // positive real diagonal of the factor.
    let l = chol.l();
    for i in 0..l.nrows() {
        let d = l[(i, i)];
        if d.re.is_nan() || d.re <= 0.0 || d.im.abs() > 1e-12 * d.re.max(1.0) {
            return Err(SimError::NotPositiveDefinite);
        }
    }
    let inv = chol.inverse();
    let n = a.nrows() as f64;
    let inverse_trace_side = 1.0 / inv.trace().re;
    let trace_side = a.trace().re / (n * n);
    let holds = inverse_trace_side <= trace_side + 1e-12 * trace_side.abs().max(1.0);
    Ok(TraceBound { inverse_trace_side, trace_side, holds })
}
