//! Light-cone solvers for the biwave equations `∇±K = G`.
//!
//! With `K(0, ·) = K₀` the solution is
//!
//! ```text
//! K(τ, x) = (1/4π) ∇∓ { ∫_{r≤τ} G(τ − r, y)/r dV(y) + τ⁻¹ ∫_{r=τ} K₀(y) dS(y) },   r = |x − y|,
//! ```
//!
//! because `∇∓∇± = □` and the braces hold the retarded potential of `G`
//! plus the Poisson (spherical mean) solution with zero datum and velocity `4πK₀`.
//! The outer bigradient is applied by central differences of the assembled
//! integrals.

mod picard;
mod quadrature;

pub use picard::{cauchy_on_grid, picard_transform, PicardHistory};
pub use quadrature::{gauss_legendre, QuadratureSpec};

use std::f64::consts::PI;

use crate::algebra::{Biquaternion, I};
use crate::fields::{nabla_product, BiqField, SampleStack, Sign};
use crate::{Error, Result};
use quadrature::SphereRule;

/// A biquaternion-valued function of `(τ, y)`.
pub trait SourceSampler: Sync {
    fn sample(&self, tau: f64, y: [f64; 3]) -> Biquaternion;

    /// Latest time at which the sampler is defined.
    fn horizon(&self) -> f64 {
        f64::INFINITY
    }

    /// Lets solvers skip integrals of a source known to vanish.
    fn is_zero(&self) -> bool {
        false
    }
}

impl<F> SourceSampler for F
where
    F: Fn(f64, [f64; 3]) -> Biquaternion + Sync,
{
    fn sample(&self, tau: f64, y: [f64; 3]) -> Biquaternion {
        self(tau, y)
    }
}

/// Stored slices: cubic Lagrange in time, trilinear in space.
impl SourceSampler for SampleStack {
    fn sample(&self, tau: f64, y: [f64; 3]) -> Biquaternion {
        SampleStack::sample(self, tau, y)
    }

    fn horizon(&self) -> f64 {
        self.tau_end()
    }
}

/// A single time-independent field, sampled trilinearly.
impl SourceSampler for BiqField {
    fn sample(&self, _tau: f64, y: [f64; 3]) -> Biquaternion {
        self.sample_trilinear(y)
    }
}

/// The zero source.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroSource;

impl SourceSampler for ZeroSource {
    fn sample(&self, _tau: f64, _y: [f64; 3]) -> Biquaternion {
        Biquaternion::ZERO
    }

    fn is_zero(&self) -> bool {
        true
    }
}

fn check_tau(tau: f64, horizon: f64) -> Result<()> {
    if tau > 0.0 && tau <= horizon * (1.0 + 1e-12) {
        Ok(())
    } else {
        Err(Error::OutsideHorizon { tau, horizon })
    }
}

#[inline]
fn on_sphere(x: [f64; 3], r: f64, d: [f64; 3]) -> [f64; 3] {
    [x[0] + r * d[0], x[1] + r * d[1], x[2] + r * d[2]]
}

fn sphere_integral<S: SourceSampler + ?Sized>(
    f: &S,
    t: f64,
    x: [f64; 3],
    r: f64,
    rule: &SphereRule,
) -> Biquaternion {
    rule.dirs
        .iter()
        .zip(&rule.weights)
        .map(|(&d, &w)| f.sample(t, on_sphere(x, r, d)) * w)
        .sum()
}

/// `τ⁻¹ ∫_{|y−x|=τ} K₀(y) dS(y) = τ ∫_{S²} K₀(x + τω) dω`.
pub fn sphere_mean<S: SourceSampler + ?Sized>(
    k0: &S,
    x: [f64; 3],
    tau: f64,
    q: &QuadratureSpec,
) -> Result<Biquaternion> {
    check_tau(tau, f64::INFINITY)?;
    Ok(sphere_integral(k0, 0.0, x, tau, &q.sphere()) * tau)
}

/// `∫_{|y−x|≤τ} G(τ − r, y)/r dV(y)`.
pub fn retarded_volume<S: SourceSampler + ?Sized>(
    g: &S,
    x: [f64; 3],
    tau: f64,
    q: &QuadratureSpec,
) -> Result<Biquaternion> {
    check_tau(tau, f64::INFINITY)?;
    let (xr, wr) = q.radial();
    Ok(volume_with(g, x, tau, &xr, &wr, &q.sphere()))
}

fn volume_with<S: SourceSampler + ?Sized>(
    g: &S,
    x: [f64; 3],
    tau: f64,
    xr: &[f64],
    wr: &[f64],
    rule: &SphereRule,
) -> Biquaternion {
    if g.is_zero() || tau <= 0.0 {
        return Biquaternion::ZERO;
    }
    xr.iter()
        .zip(wr)
        .map(|(&u, &w)| {
            let r = 0.5 * tau * (1.0 + u);
            sphere_integral(g, tau - r, x, r, rule) * (0.5 * tau * w * r)
        })
        .sum()
}

/// Precomputed rules for repeated point evaluations.
struct Kernel<'a, G: ?Sized, K: ?Sized> {
    g: &'a G,
    k0: &'a K,
    rule: SphereRule,
    xr: Vec<f64>,
    wr: Vec<f64>,
}

impl<G: SourceSampler + ?Sized, K: SourceSampler + ?Sized> Kernel<'_, G, K> {
    /// The braces of the solution formula.
    fn potential(&self, tau: f64, x: [f64; 3]) -> Biquaternion {
        if tau <= 0.0 {
            return Biquaternion::ZERO;
        }
        volume_with(self.g, x, tau, &self.xr, &self.wr, &self.rule)
            + sphere_integral(self.k0, 0.0, x, tau, &self.rule) * tau
    }
}

/// `K(τ, x)` solving `∇±K = G` (`sign` selects the equation) with
/// `K(0, ·) = K₀`.
pub fn solve_cauchy<G, K>(
    g: &G,
    k0: &K,
    sign: Sign,
    x: [f64; 3],
    tau: f64,
    q: &QuadratureSpec,
) -> Result<Biquaternion>
where
    G: SourceSampler + ?Sized,
    K: SourceSampler + ?Sized,
{
    let horizon = g.horizon().min(k0.horizon());
    check_tau(tau, horizon)?;
    if tau < q.min_tau() {
        return Ok(k0.sample(0.0, x));
    }
    let (xr, wr) = q.radial();
    let kernel = Kernel {
        g,
        k0,
        rule: q.sphere(),
        xr,
        wr,
    };
    let d = q.diff_step;
    let phi = |t: f64, y: [f64; 3]| kernel.potential(t, y);

    let dt = if tau + d <= horizon {
        (phi(tau + d, x) - phi(tau - d, x)) * (0.5 / d)
    } else {
        (phi(tau, x) * 3.0 - phi(tau - d, x) * 4.0 + phi(tau - 2.0 * d, x)) * (0.5 / d)
    };
    let partials = [0, 1, 2].map(|k| {
        let mut xp = x;
        let mut xm = x;
        xp[k] += d;
        xm[k] -= d;
        (phi(tau, xp) - phi(tau, xm)) * (0.5 / d)
    });
    let outer = I * sign.opposite().factor();
    Ok((dt + nabla_product(partials) * outer) * (0.25 / PI))
}

/// `Θ(τ, x)` of the free charge-current field `∇⁻Θ = 0` with `Θ(0) = Θ₀`.
pub fn free_field_cauchy<K: SourceSampler + ?Sized>(
    theta0: &K,
    x: [f64; 3],
    tau: f64,
    q: &QuadratureSpec,
) -> Result<Biquaternion> {
    solve_cauchy(&ZeroSource, theta0, Sign::Minus, x, tau, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Complex, Vec3C};

    fn q() -> QuadratureSpec {
        QuadratureSpec::new(16, 32, 24, 1e-3).unwrap()
    }

    fn scalar(v: f64) -> Biquaternion {
        Biquaternion::scalar(Complex::new(v, 0.0))
    }

    #[test]
    fn sphere_mean_of_constant_and_linear_data() {
        let c0 = Biquaternion::from_components([1.0, -2.0, 0.5, 0.0, 0.0, 3.0, 0.0, 0.0]);
        let m = sphere_mean(&|_: f64, _: [f64; 3]| c0, [0.3, 0.0, 0.0], 0.7, &q()).unwrap();
        assert!(m.max_abs_diff(c0 * (4.0 * PI * 0.7)) < 1e-12);
        let x = [0.3, -1.0, 2.0];
        let m = sphere_mean(&|_: f64, y: [f64; 3]| scalar(y[0]), x, 0.9, &q()).unwrap();
        assert!((m.s.re - 4.0 * PI * 0.9 * x[0]).abs() < 1e-12);
    }

    #[test]
    fn sphere_mean_of_quadrupole_vanishes() {
        let x = [0.1, 0.2, 0.3];
        let y2 = move |_: f64, y: [f64; 3]| {
            let d = [y[0] - x[0], y[1] - x[1], y[2] - x[2]];
            scalar(3.0 * d[2] * d[2] - (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]))
        };
        let m = sphere_mean(&y2, x, 0.8, &q()).unwrap();
        assert!(m.max_abs() < 1e-12);
    }

    #[test]
    fn retarded_volume_of_unit_source() {
        let v = retarded_volume(&|_: f64, _: [f64; 3]| scalar(1.0), [0.0; 3], 0.6, &q()).unwrap();
        assert!((v.s.re - 2.0 * PI * 0.36).abs() < 1e-12);
        let z = retarded_volume(&ZeroSource, [0.0; 3], 0.6, &q()).unwrap();
        assert_eq!(z, Biquaternion::ZERO);
        assert!(matches!(
            retarded_volume(&ZeroSource, [0.0; 3], 0.0, &q()),
            Err(Error::OutsideHorizon { .. })
        ));
    }

    #[test]
    fn constant_source_grows_linearly() {
        // ∇±K = c with K₀ = 0 is solved by K = τc.
        let c = Biquaternion::from_components([0.5, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 2.0]);
        let k = solve_cauchy(&|_: f64, _: [f64; 3]| c, &ZeroSource, Sign::Plus, [0.0; 3], 0.4, &q()).unwrap();
        assert!(k.max_abs_diff(c * 0.4) < 1e-9, "{k}");
    }

    #[test]
    fn constant_data_is_stationary_for_the_free_field() {
        let t0 = Biquaternion::from_components([0.0, -1.0, 0.2, 0.0, 0.0, 0.0, 0.1, 0.3]);
        let k = free_field_cauchy(&|_: f64, _: [f64; 3]| t0, [0.5, 0.0, 0.0], 0.3, &q()).unwrap();
        assert!(k.max_abs_diff(t0) < 1e-9);
    }

    #[test]
    fn plane_wave_data_propagates() {
        // Θ = e^{i(x1 − τ)}(e2 − i e3) solves ∇⁻Θ = 0.
        let wave = |tau: f64, y: [f64; 3]| {
            let g = Complex::new(0.0, y[0] - tau).exp();
            Biquaternion::vector(Vec3C::new(Complex::new(0.0, 0.0), g, -I * g))
        };
        let x = [0.3, -0.2, 0.1];
        let got = free_field_cauchy(&|_: f64, y: [f64; 3]| wave(0.0, y), x, 0.5, &q()).unwrap();
        assert!(got.max_abs_diff(wave(0.5, x)) < 1e-5, "{got} vs {}", wave(0.5, x));
    }

    #[test]
    fn early_times_return_the_datum() {
        let t0 = |_: f64, y: [f64; 3]| scalar(y[1]);
        let k = free_field_cauchy(&t0, [0.0, 0.7, 0.0], 1e-4, &q()).unwrap();
        assert_eq!(k, scalar(0.7));
    }
}
