use std::f64::consts::PI;

use crate::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_n.
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `P_n(z)` and `P_n'(z)` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Resolution of the light-cone integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss-Legendre nodes in the cosine of the polar angle.
    pub n_polar: usize,
    /// Trapezoid nodes in azimuth.
    pub n_azimuth: usize,
    /// Gauss-Legendre nodes along the radius of volume integrals.
    pub radial_steps: usize,
    /// Step of the central differences that apply the outer bigradient.
    pub diff_step: f64,
}

impl QuadratureSpec {
    pub fn new(n_polar: usize, n_azimuth: usize, radial_steps: usize, diff_step: f64) -> Result<Self> {
        let check = |name, v: usize, min: usize| {
            if v < min {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("{v} is below the minimum {min}"),
                })
            } else {
                Ok(())
            }
        };
        check("n_polar", n_polar, 8)?;
        check("n_azimuth", n_azimuth, 16)?;
        check("radial_steps", radial_steps, 16)?;
        if !(diff_step.is_finite() && diff_step > 0.0) {
            return Err(Error::InvalidParameter {
                name: "diff_step",
                reason: format!("{diff_step} must be positive"),
            });
        }
        Ok(Self {
            n_polar,
            n_azimuth,
            radial_steps,
            diff_step,
        })
    }

    /// Smallest time at which the integral representation is evaluated;
    /// earlier times return the Cauchy datum.
    pub fn min_tau(&self) -> f64 {
        2.0 * self.diff_step
    }

    pub(crate) fn sphere(&self) -> SphereRule {
        SphereRule::new(self.n_polar, self.n_azimuth)
    }

    pub(crate) fn radial(&self) -> (Vec<f64>, Vec<f64>) {
        gauss_legendre(self.radial_steps)
    }
}

/// Product rule on the unit sphere; weights sum to `4π`.
#[derive(Clone, Debug)]
pub(crate) struct SphereRule {
    pub dirs: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(n_polar: usize, n_azimuth: usize) -> Self {
        let (mu, wmu) = gauss_legendre(n_polar);
        let dphi = 2.0 * PI / n_azimuth as f64;
        let mut dirs = Vec::with_capacity(n_polar * n_azimuth);
        let mut weights = Vec::with_capacity(n_polar * n_azimuth);
        for (&m, &wm) in mu.iter().zip(&wmu) {
            let s = (1.0 - m * m).sqrt();
            for j in 0..n_azimuth {
                let phi = (j as f64 + 0.5) * dphi;
                dirs.push([s * phi.cos(), s * phi.sin(), m]);
                weights.push(wm * dphi);
            }
        }
        Self { dirs, weights }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [2, 5, 8, 16, 33] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for deg in 0..2 * n {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-12, "n={n} deg={deg}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn known_three_point_rule() {
        let (x, w) = gauss_legendre(3);
        assert!((x[2] - (0.6f64).sqrt()).abs() < 1e-15);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn sphere_rule_area_and_moments() {
        let r = SphereRule::new(8, 16);
        let area: f64 = r.weights.iter().sum();
        assert!((area - 4.0 * PI).abs() < 1e-12);
        let second: f64 = r.dirs.iter().zip(&r.weights).map(|(d, w)| w * d[0] * d[0]).sum();
        assert!((second - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(7, 16, 16, 0.01).is_err());
        assert!(QuadratureSpec::new(8, 15, 16, 0.01).is_err());
        assert!(QuadratureSpec::new(8, 16, 15, 0.01).is_err());
        assert!(QuadratureSpec::new(8, 16, 16, 0.0).is_err());
        assert!(QuadratureSpec::new(8, 16, 16, 0.01).is_ok());
    }
}
