//! Uniform linear array geometry: steering vectors and angular detection
//! matrices used by the beam sweeps.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Result, SimError};

/// A uniform linear array described by its element count and the element
/// spacing as a fraction of the carrier wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    num_elements: usize,
    spacing_ratio: f64,
}

impl ArrayGeometry {
    /// Half-wavelength spacing, the usual choice for grating-lobe-free scans.
    pub const DEFAULT_SPACING_RATIO: f64 = 0.5;

    pub fn new(num_elements: usize, spacing_ratio: f64) -> Result<Self> {
        if num_elements == 0 {
            return Err(SimError::EmptyArray);
        }
        if !(spacing_ratio > 0.0 && spacing_ratio.is_finite()) {
            return Err(SimError::BadSpacingRatio(spacing_ratio));
        }
        Ok(Self { num_elements, spacing_ratio })
    }

    /// Array with the default half-wavelength spacing.
    pub fn half_wavelength(num_elements: usize) -> Result<Self> {
        Self::new(num_elements, Self::DEFAULT_SPACING_RATIO)
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn spacing_ratio(&self) -> f64 {
        self.spacing_ratio
    }
}

/// Uniform scan grid over [0, pi): point i sits at `i * pi / num_points`.
/// The endpoint pi is excluded; cosine is injective on the covered range so
/// every grid point maps to a distinct spatial frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid {
    angles: Vec<f64>,
}

impl AngleGrid {
    /// Default number of scan directions (one-degree steps).
    pub const DEFAULT_POINTS: usize = 180;

    pub fn uniform(num_points: usize) -> Result<Self> {
        if num_points == 0 {
            return Err(SimError::EmptyGrid);
        }
        let angles = (0..num_points)
            .map(|i| i as f64 * PI / num_points as f64)
            .collect();
        Ok(Self { angles })
    }

    pub fn num_points(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn angle(&self, index: usize) -> f64 {
        self.angles[index]
    }
}

/// Sign of the phase progression in a steering vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseSign {
    /// exp(+j 2 pi m d/lambda cos angle); used by the detection matrices.
    Positive,
    /// exp(-j 2 pi m d/lambda cos angle); the physical array response.
    Negative,
}

impl PhaseSign {
    fn factor(self) -> f64 {
        match self {
            PhaseSign::Positive => 1.0,
            PhaseSign::Negative => -1.0,
        }
    }
}

/// Array response vector for a plane wave at `angle` (radians, in [0, pi]).
///
/// Element m carries the phase `sign * 2 pi m (d/lambda) cos(angle)`; entries
/// are unit modulus and the vector is unnormalized, so its squared norm
/// equals the element count.
pub fn steering_vector(
    geometry: &ArrayGeometry,
    angle: f64,
    sign: PhaseSign,
) -> Result<DVector<Complex64>> {
    if !angle.is_finite() {
        return Err(SimError::NonFiniteAngle);
    }
    if !(0.0..=PI).contains(&angle) {
        return Err(SimError::AngleOutOfRange(angle));
    }
    let step = sign.factor() * 2.0 * PI * geometry.spacing_ratio() * angle.cos();
    Ok(DVector::from_fn(geometry.num_elements(), |m, _| {
        Complex64::from_polar(1.0, step * m as f64)
    }))
}

/// Detection matrix whose column i is the unit-norm positive-sign steering
/// vector at grid angle i. A column paired with the physical response at the
/// same angle acts as a matched filter with gain sqrt(num_elements).
pub fn detection_matrix(geometry: &ArrayGeometry, grid: &AngleGrid) -> DMatrix<Complex64> {
    let m = geometry.num_elements();
    let scale = 1.0 / (m as f64).sqrt();
    let mut out = DMatrix::zeros(m, grid.num_points());
    for (i, &angle) in grid.angles().iter().enumerate() {
        let col = steering_vector(geometry, angle, PhaseSign::Positive)
            .expect("grid angles are always in range");
        out.set_column(i, &(col * Complex64::new(scale, 0.0)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_rng, Stage};
    use rand::Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn broadside_steering_is_all_ones() {
        let geom = ArrayGeometry::half_wavelength(8).unwrap();
        let v = steering_vector(&geom, PI / 2.0, PhaseSign::Negative).unwrap();
        for z in v.iter() {
            assert!(close(z.re, 1.0, 1e-12) && close(z.im, 0.0, 1e-12));
        }
    }

    #[test]
    fn endfire_two_element_vector() {
        let geom = ArrayGeometry::new(2, 0.5).unwrap();
        let v = steering_vector(&geom, 0.0, PhaseSign::Negative).unwrap();
        // exp(-j pi) = -1 at the second element
        assert!(close(v[0].re, 1.0, 1e-12));
        assert!(close(v[1].re, -1.0, 1e-12) && close(v[1].im, 0.0, 1e-12));
    }

    #[test]
    fn steering_norm_is_element_count() {
        let geom = ArrayGeometry::half_wavelength(13).unwrap();
        let mut rng = derive_rng(3, Stage::Aux, 0, 0);
        for _ in 0..16 {
            let angle: f64 = rng.random::<f64>() * PI;
            let v = steering_vector(&geom, angle, PhaseSign::Negative).unwrap();
            assert!(close(v.norm_squared(), 13.0, 1e-9));
        }
    }

    #[test]
    fn steering_rejects_bad_angles() {
        let geom = ArrayGeometry::half_wavelength(4).unwrap();
        assert!(matches!(
            steering_vector(&geom, -0.1, PhaseSign::Negative),
            Err(SimError::AngleOutOfRange(_))
        ));
        assert!(matches!(
            steering_vector(&geom, PI + 0.1, PhaseSign::Positive),
            Err(SimError::AngleOutOfRange(_))
        ));
        assert!(matches!(
            steering_vector(&geom, f64::NAN, PhaseSign::Positive),
            Err(SimError::NonFiniteAngle)
        ));
    }

    #[test]
    fn grid_spans_zero_inclusive_pi_exclusive() {
        let grid = AngleGrid::uniform(180).unwrap();
        assert_eq!(grid.num_points(), 180);
        assert_eq!(grid.angle(0), 0.0);
        assert!(grid.angle(179) < PI);
        for w in grid.angles().windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn detection_columns_are_unit_norm() {
        let geom = ArrayGeometry::half_wavelength(16).unwrap();
        let grid = AngleGrid::uniform(180).unwrap();
        let det = detection_matrix(&geom, &grid);
        assert_eq!(det.nrows(), 16);
        assert_eq!(det.ncols(), 180);
        for i in 0..det.ncols() {
            assert!(close(det.column(i).norm(), 1.0, 1e-12));
        }
    }

    #[test]
    fn two_point_grid_detection_values() {
        let geom = ArrayGeometry::half_wavelength(4).unwrap();
        let grid = AngleGrid::uniform(2).unwrap();
        assert_eq!(grid.angles(), &[0.0, PI / 2.0]);
        let det = detection_matrix(&geom, &grid);
        // Broadside column is (1/2) * ones for a 4-element array.
        for z in det.column(1).iter() {
            assert!(close(z.re, 0.5, 1e-12) && close(z.im, 0.0, 1e-12));
        }
    }

    #[test]
    fn matched_filter_peaks_on_grid() {
        let geom = ArrayGeometry::half_wavelength(32).unwrap();
        let grid = AngleGrid::uniform(90).unwrap();
        let det = detection_matrix(&geom, &grid);
        for &i in &[0usize, 17, 45, 89] {
            let response =
                steering_vector(&geom, grid.angle(i), PhaseSign::Negative).unwrap();
            let mut best = (0usize, 0.0f64);
            for j in 0..grid.num_points() {
                let mag = det.column(j).dot(&response).norm();
                if mag > best.1 {
                    best = (j, mag);
                }
            }
            assert_eq!(best.0, i);
            // Peak value is M / sqrt(M).
            assert!(close(best.1, 32.0f64.sqrt(), 1e-9));
        }
    }

    #[test]
    fn inner_product_depends_on_cosine_difference() {
        let geom = ArrayGeometry::half_wavelength(12).unwrap();
        let grid = AngleGrid::uniform(180).unwrap();
        let det = detection_matrix(&geom, &grid);
        // Pick pairs (grid index, angle) with the same cos difference.
        let i = 30usize;
        let delta = 0.07;
        let a = (grid.angle(i).cos() - delta).acos();
        let j = 100usize;
        let b = (grid.angle(j).cos() - delta).acos();
        let va = steering_vector(&geom, a, PhaseSign::Negative).unwrap();
        let vb = steering_vector(&geom, b, PhaseSign::Negative).unwrap();
        let ma = det.column(i).dot(&va).norm();
        let mb = det.column(j).dot(&vb).norm();
        assert!(close(ma, mb, 1e-9), "{ma} vs {mb}");
    }
}
