use std::f64::consts::PI;

use rayon::prelude::*;

use super::quadrature::{QuadratureSpec, SphereRule};
use super::SourceSampler;
use crate::algebra::{Biquaternion, I};
use crate::fields::{quaternion_derivative, BiqField, Field, SampleStack, Sign, Stencil};
use crate::{Error, Result};

/// Grid version of the light-cone solver. Returns `K` at
/// `τ = 0, dτ, …, steps·dτ` on the grid of `k0`, solving `∇±K = G` with
/// `K(0) = K₀`. `G`, when given, must cover `[0, steps·dτ]`.
///
/// The braces of the solution formula are evaluated on the grid; the outer
/// bigradient takes a central time difference with step `q.diff_step` and
/// grid stencils in space. The source is extrapolated by at most that step
/// past its last slice.
pub fn cauchy_on_grid(
    g: Option<&SampleStack>,
    k0: &BiqField,
    sign: Sign,
    dtau: f64,
    steps: usize,
    q: &QuadratureSpec,
    stencil: Stencil,
) -> Result<SampleStack> {
    if steps < 1 {
        return Err(Error::InvalidParameter {
            name: "steps",
            reason: "need at least one time step".into(),
        });
    }
    if let Some(g) = g {
        crate::fields::ensure_same_grid(g.grid(), k0.grid(), "source and datum")?;
        if g.tau_end() < steps as f64 * dtau * (1.0 - 1e-12) || g.tau0() > 0.0 {
            return Err(Error::OutsideHorizon {
                tau: steps as f64 * dtau,
                horizon: g.tau_end(),
            });
        }
    }
    let rule = q.sphere();
    let (xr, wr) = q.radial();

    // The braces of the solution formula at time `tau`.
    let braces = |tau: f64| -> Result<BiqField> {
        let mut acc = surface_term(k0, tau, &rule).scale((1.0 / tau).into());
        if let Some(g) = g {
            for (&u, &w) in xr.iter().zip(&wr) {
                let r = 0.5 * tau * (1.0 + u);
                let shell = surface_term(&g.snapshot(tau - r), r, &rule);
                let weight = 0.5 * tau * w / r;
                acc = acc.zip_map(&shell, |a, b| a + b * weight)?;
            }
        }
        Ok(acc)
    };

    let d = q.diff_step.min(0.5 * dtau);
    let outer = I * sign.opposite().factor();
    let scale = 0.25 / PI;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(k0.clone());
    for j in 1..=steps {
        let tau = j as f64 * dtau;
        let dt = braces(tau + d)?.zip_map(&braces(tau - d)?, |a, b| (a - b) * (0.5 / d))?;
        let nabla = quaternion_derivative(&braces(tau)?, stencil);
        out.push(dt.zip_map(&nabla, |d, n| (d + n * outer) * scale)?);
    }
    SampleStack::new(out, 0.0, dtau)
}

/// `∫_{|y−x|=r} f dS = r² ∫_{S²} f(x + rω) dω` at every grid point.
fn surface_term(f: &BiqField, r: f64, rule: &SphereRule) -> BiqField {
    let grid = f.grid();
    let data = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let x = grid.position(idx);
            let s: Biquaternion = rule
                .dirs
                .iter()
                .zip(&rule.weights)
                .map(|(d, &w)| {
                    f.sample_trilinear([x[0] + r * d[0], x[1] + r * d[1], x[2] + r * d[2]]) * w
                })
                .sum();
            s * (r * r)
        })
        .collect();
    Field::from_vec(grid, data).expect("same grid")
}

/// Iterates and convergence record of the Picard scheme.
#[derive(Clone, Debug)]
pub struct PicardHistory {
    /// `Θ⁽⁰⁾, Θ⁽¹⁾, …` as stacks over `[0, horizon]`.
    pub iterates: Vec<SampleStack>,
    /// `‖Θ⁽ᵐ⁺¹⁾ − Θ⁽ᵐ⁾‖∞` over all slices.
    pub residuals: Vec<f64>,
    /// Set when the residual grew three iterations in a row; iteration stops.
    pub diverged: bool,
}

/// Fixed-point iteration for a charge-current driven by a prescribed
/// background tension, `κ∇⁻Θ + Θ∘A_ext = 0` with `Θ(0) = Θ₀`:
///
/// `Θ⁽ᵐ⁺¹⁾ = (1/4π)∇⁺{ ∫ G⁽ᵐ⁾(τ − r, y)/r dV + τ⁻¹∫ Θ₀ dS }`,
/// `G⁽ᵐ⁾ = −κ⁻¹ Θ⁽ᵐ⁾∘A_ext`, starting from `Θ⁽⁰⁾ ≡ Θ₀`.
#[allow(clippy::too_many_arguments)]
pub fn picard_transform<A: SourceSampler + ?Sized>(
    theta0: &BiqField,
    a_ext: &A,
    kappa: f64,
    iters: usize,
    q: &QuadratureSpec,
    dtau: f64,
    steps: usize,
    stencil: Stencil,
) -> Result<PicardHistory> {
    if iters < 1 {
        return Err(Error::InvalidParameter {
            name: "iters",
            reason: "at least one iteration is required".into(),
        });
    }
    if !(kappa.is_finite() && kappa != 0.0) {
        return Err(Error::InvalidParameter {
            name: "kappa",
            reason: format!("{kappa} must be finite and nonzero"),
        });
    }
    let grid = theta0.grid();
    let background: Vec<BiqField> = (0..=steps)
        .map(|j| {
            let tau = j as f64 * dtau;
            Field::from_fn(grid, |x| a_ext.sample(tau, x))
        })
        .collect();

    let first = SampleStack::new(vec![theta0.clone(); steps + 1], 0.0, dtau)?;
    let mut iterates = vec![first];
    let mut residuals: Vec<f64> = Vec::new();
    let mut growth = 0;
    let mut diverged = false;
    for _ in 0..iters {
        let prev = iterates.last().expect("non-empty");
        let source = prev
            .slices()
            .iter()
            .zip(&background)
            .map(|(t, a)| t.zip_map(a, |t, a| t * a * (-1.0 / kappa)))
            .collect::<Result<Vec<_>>>()?;
        let source = SampleStack::new(source, 0.0, dtau)?;
        let next = cauchy_on_grid(Some(&source), theta0, Sign::Minus, dtau, steps, q, stencil)?;
        let res = next
            .slices()
            .iter()
            .zip(prev.slices())
            .map(|(a, b)| a.max_abs_diff(b))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        if residuals.last().is_some_and(|&r| res > r) {
            growth += 1;
        } else {
            growth = 0;
        }
        residuals.push(res);
        iterates.push(next);
        if growth >= 3 {
            diverged = true;
            break;
        }
    }
    Ok(PicardHistory {
        iterates,
        residuals,
        diverged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Complex;
    use crate::fields::Grid;
    use crate::propagator::{free_field_cauchy, ZeroSource};

    fn q() -> QuadratureSpec {
        QuadratureSpec::new(12, 24, 16, 0.01).unwrap()
    }

    fn bump(x: [f64; 3]) -> Biquaternion {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        Biquaternion::scalar(Complex::new(0.0, -(-r2 / (2.0 * 0.3 * 0.3)).exp()))
    }

    #[test]
    fn grid_solver_converges_to_point_solver() {
        // Trilinear sampling of the datum limits the grid solver to O(h²).
        let datum = |_: f64, y: [f64; 3]| bump(y);
        let err = |n: usize| {
            let grid = Grid::with_extent(n, 2.4).unwrap();
            let theta0 = Field::from_fn(grid, bump);
            let st = cauchy_on_grid(None, &theta0, Sign::Minus, 0.05, 4, &q(), Stencil::Fourth).unwrap();
            [[0.0, 0.0, 0.0], [0.3, 0.0, -0.15], [-0.45, 0.15, 0.0]]
                .iter()
                .map(|&x| {
                    let idx = grid.index(x.map(|c| (c / grid.h()).round() as usize % n + n / 2).map(|i| i % n));
                    let want = free_field_cauchy(&datum, grid.position(idx), 0.15, &q()).unwrap();
                    st.slice(3).get(idx).max_abs_diff(want)
                })
                .fold(0.0, f64::max)
        };
        let (coarse, fine) = (err(16), err(32));
        assert!(coarse < 0.05, "coarse error {coarse}");
        assert!(coarse / fine > 3.0, "errors {coarse} -> {fine}");
    }

    #[test]
    fn constant_source_on_grid() {
        let grid = Grid::new(8, 0.2).unwrap();
        let c = Biquaternion::from_components([0.0, 1.0, 0.5, 0.0, 0.0, 0.0, 0.0, -1.0]);
        let g = SampleStack::from_fn(grid, 0.0, 0.05, 5, |_, _| c).unwrap();
        let zero = BiqField::filled(grid, Biquaternion::ZERO);
        let st = cauchy_on_grid(Some(&g), &zero, Sign::Plus, 0.05, 4, &q(), Stencil::Second).unwrap();
        for j in 1..=4 {
            assert!(st.slice(j).get(0).max_abs_diff(c * (0.05 * j as f64)) < 1e-9);
        }
    }

    #[test]
    fn without_background_picard_stops_after_one_step() {
        let grid = Grid::new(8, 0.2).unwrap();
        let theta0 = Field::from_fn(grid, bump);
        let h = picard_transform(&theta0, &ZeroSource, 1.0, 3, &q(), 0.05, 3, Stencil::Second).unwrap();
        assert_eq!(h.iterates.len(), 4);
        assert!(h.residuals[0] > 0.0);
        assert!(h.residuals[1] < 1e-15 && h.residuals[2] < 1e-15);
        assert!(!h.diverged);
    }

    #[test]
    fn picard_validation() {
        let grid = Grid::new(8, 0.2).unwrap();
        let theta0 = BiqField::filled(grid, Biquaternion::ZERO);
        assert!(picard_transform(&theta0, &ZeroSource, 1.0, 0, &q(), 0.05, 3, Stencil::Second).is_err());
        assert!(picard_transform(&theta0, &ZeroSource, 0.0, 1, &q(), 0.05, 3, Stencil::Second).is_err());
    }
}
