//! Tension, charge-current and energy-pulse of the electro-gravimagnetic field.
//!
//! The tension `A = i·a + √ε E + i√μ H` carries the resistance `a` in its
//! scalar part. The charge-current is `Θ = −iρ − J` with complex densities
//! `ρ = ρᴱ/√ε − iρᴴ/√μ` and `J = √μ jᴱ − i√ε jᴴ`, and Maxwell's equations
//! read `∇⁺A = Θ`.

use crate::algebra::{Biquaternion, Complex, Vec3C, I};
use crate::fields::{
    bigradient, bigradient_at, divergence_by, ensure_same_grid, time_derivative, BiqField,
    ComplexField, CVecField, Field, RealField, RealVecField, SampleStack, Sign, Stencil,
};
use crate::{Error, Result};

/// Homogeneous medium: electric and magnetic constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Medium {
    eps: f64,
    mu: f64,
    c: f64,
}

impl Medium {
    pub const VACUUM: Medium = Medium {
        eps: 1.0,
        mu: 1.0,
        c: 1.0,
    };

    pub fn new(eps: f64, mu: f64) -> Result<Self> {
        for (name, v) in [("eps", eps), ("mu", mu)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("{v} must be positive"),
                });
            }
        }
        Ok(Self {
            eps,
            mu,
            c: 1.0 / (eps * mu).sqrt(),
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Wave speed `1/√(εμ)`.
    pub fn c(&self) -> f64 {
        self.c
    }
}

impl Default for Medium {
    fn default() -> Self {
        Self::VACUUM
    }
}

/// Electric and magnetic tensions plus the scalar resistance.
#[derive(Clone, Debug)]
pub struct EgmState {
    pub e: RealVecField,
    pub h: RealVecField,
    pub a: RealField,
    pub medium: Medium,
}

/// Real electric and magnetic charge and current densities.
#[derive(Clone, Debug)]
pub struct ChargeCurrent {
    pub rho_e: RealField,
    pub rho_h: RealField,
    pub j_e: RealVecField,
    pub j_h: RealVecField,
}

/// Scalar and vector potentials, combined as `Φ = iφ − Ψ`.
#[derive(Clone, Debug)]
pub struct Potential {
    pub phi: ComplexField,
    pub psi: CVecField,
}

impl Potential {
    pub fn to_biq(&self) -> Result<BiqField> {
        self.phi.zip_map(&self.psi, |phi, psi| Biquaternion {
            s: I * phi,
            v: -psi,
        })
    }
}

/// Pointwise tension `i·a + √ε E + i√μ H`.
pub fn tension_at(e: [f64; 3], h: [f64; 3], a: f64, m: Medium) -> Biquaternion {
    let (se, sm) = (m.eps.sqrt(), m.mu.sqrt());
    Biquaternion {
        s: Complex::new(0.0, a),
        v: Vec3C::from_re_im(e.map(|x| se * x), h.map(|x| sm * x)),
    }
}

/// Pointwise charge-current `−iρ − J`.
pub fn charge_current_at(rho_e: f64, rho_h: f64, j_e: [f64; 3], j_h: [f64; 3], m: Medium) -> Biquaternion {
    let (se, sm) = (m.eps.sqrt(), m.mu.sqrt());
    let rho = Complex::new(rho_e / se, -rho_h / sm);
    let j = Vec3C::from_re_im(j_e.map(|x| sm * x), j_h.map(|x| -se * x));
    Biquaternion { s: -I * rho, v: -j }
}

/// Complex charge density `ρ` and current `J` carried by `Θ = −iρ − J`.
#[inline]
pub fn rho_j(theta: Biquaternion) -> (Complex, Vec3C) {
    (I * theta.s, -theta.v)
}

/// Builds `(A, Θ)` from real fields.
pub fn assemble(state: &EgmState, cc: &ChargeCurrent) -> Result<(BiqField, BiqField)> {
    let grid = state.e.grid();
    for g in [state.h.grid(), state.a.grid(), cc.rho_e.grid(), cc.rho_h.grid(), cc.j_e.grid(), cc.j_h.grid()] {
        ensure_same_grid(grid, g, "assemble inputs")?;
    }
    let m = state.medium;
    let a = Field::from_vec(
        grid,
        (0..grid.len())
            .map(|i| tension_at(state.e.get(i), state.h.get(i), state.a.get(i), m))
            .collect(),
    )?;
    let theta = Field::from_vec(
        grid,
        (0..grid.len())
            .map(|i| charge_current_at(cc.rho_e.get(i), cc.rho_h.get(i), cc.j_e.get(i), cc.j_h.get(i), m))
            .collect(),
    )?;
    Ok((a, theta))
}

/// Inverse of [`assemble`]. Imaginary parts that a physical pair cannot carry
/// (the real part of the tension's scalar) are dropped.
pub fn split(a: &BiqField, theta: &BiqField, medium: Medium) -> Result<(EgmState, ChargeCurrent)> {
    ensure_same_grid(a.grid(), theta.grid(), "split inputs")?;
    let (se, sm) = (medium.eps.sqrt(), medium.mu.sqrt());
    let state = EgmState {
        e: a.map(|b| b.v.re().map(|x| x / se)),
        h: a.map(|b| b.v.im().map(|x| x / sm)),
        a: a.map(|b| b.s.im),
        medium,
    };
    let cc = ChargeCurrent {
        rho_e: theta.map(|t| se * rho_j(t).0.re),
        rho_h: theta.map(|t| -sm * rho_j(t).0.im),
        j_e: theta.map(|t| rho_j(t).1.re().map(|x| x / sm)),
        j_h: theta.map(|t| rho_j(t).1.im().map(|x| -x / se)),
    };
    Ok((state, cc))
}

/// `ρ = div A − ∂τa` and `J = grad a − ∂τA − i rot A` at the central slice,
/// with `a = −i·scalar(A)`. This is `∇⁺A` read back as a charge-current.
pub fn extract_charge_current(a_stack: &SampleStack, stencil: Stencil) -> Result<(ComplexField, CVecField)> {
    let theta = bigradient(a_stack, Sign::Plus, stencil)?;
    Ok((theta.map(|t| rho_j(t).0), theta.map(|t| rho_j(t).1)))
}

/// `∇⁺A − Θ` at the central slice.
pub fn maxwell_residual(a_stack: &SampleStack, theta: &BiqField, stencil: Stencil) -> Result<BiqField> {
    bigradient(a_stack, Sign::Plus, stencil)?.sub(theta)
}

/// Energy density, Poynting vector and energy-pulse of one tension field.
#[derive(Clone, Debug)]
pub struct EnergyPulse {
    pub w: RealField,
    pub p: RealVecField,
    pub xi: BiqField,
}

/// Relative bound on the imaginary residue of `W` and `P`.
pub const REALNESS_TOL: f64 = 1e-12;

/// `W = ½(A, Ā)` and `P = ½ i A⃗ × Ā⃗` at one point, checked for realness.
pub fn energy_at(a: Biquaternion) -> Result<(f64, [f64; 3])> {
    let ab = a.conj_complex();
    let w = a.scalar_product(ab) * 0.5;
    let p = a.v.cross(ab.v) * (I * 0.5);
    let scale = a.norm().powi(2).max(f64::MIN_POSITIVE);
    let residue = w.im.abs().max(p.im().iter().fold(0.0, |m, x| m.max(x.abs())));
    if residue > REALNESS_TOL * scale {
        return Err(Error::NonReal {
            quantity: "energy density",
            residue,
        });
    }
    Ok((w.re, p.re()))
}

/// Pointwise `Ξ = ½ A∘A*`, which equals `W + iP` for a pure-vector tension.
#[inline]
pub fn xi_at(a: Biquaternion) -> Biquaternion {
    a * a.conj_quat() * 0.5
}

pub fn energy_pulse(a: &BiqField) -> Result<EnergyPulse> {
    let wp = a.data().iter().map(|&b| energy_at(b)).collect::<Result<Vec<_>>>()?;
    let grid = a.grid();
    Ok(EnergyPulse {
        w: Field::from_vec(grid, wp.iter().map(|x| x.0).collect())?,
        p: Field::from_vec(grid, wp.iter().map(|x| x.1).collect())?,
        xi: a.map(xi_at),
    })
}

/// `A = ∇⁻Φ` at the central slice together with the calibration residual
/// `∂τφ − div Ψ`.
pub fn tension_from_potential(
    pot_stack: &SampleStack,
    stencil: Stencil,
) -> Result<(BiqField, ComplexField)> {
    let a = bigradient(pot_stack, Sign::Minus, stencil)?;
    let k = pot_stack.center();
    let phi: Vec<ComplexField> = pot_stack.map(|b| -I * b.s);
    let dphi = time_derivative(&phi, k, pot_stack.dtau(), stencil)?;
    // Ψ = −vector(Φ).
    let div_psi = divergence_by(pot_stack.slice(k), stencil, |b, i| -b.v[i]);
    Ok((a, dphi.zip_map(&div_psi, |x, y| x - y)?))
}

/// Residuals of charge and energy conservation at the central slice.
#[derive(Clone, Debug)]
pub struct ConservationResiduals {
    /// `∂τρ + div J`.
    pub charge: ComplexField,
    /// `∂τW + div(P + Im(s̄A⃗)) + Re(J, Ā) − Im(ρs̄)` with `s` the scalar
    /// part of `A`; the two `s` terms vanish for a pure-vector tension.
    pub energy: RealField,
}

/// Charge and energy balance for aligned stacks of the tension and the
/// charge-current.
pub fn conservation_residuals(
    a_stack: &SampleStack,
    theta_stack: &SampleStack,
    stencil: Stencil,
) -> Result<ConservationResiduals> {
    check_aligned(a_stack, theta_stack)?;
    let k = a_stack.center();
    let dt = a_stack.dtau();

    let rho: Vec<ComplexField> = theta_stack.map(|t| rho_j(t).0);
    let drho = time_derivative(&rho, k, dt, stencil)?;
    let div_j = divergence_by(theta_stack.slice(k), stencil, |t, i| -t.v[i]);
    let charge = drho.zip_map(&div_j, |a, b| a + b)?;

    // W = ½(A, Ā) is half the squared norm, so only the central slice needs `energy_at`.
    let w: Vec<RealField> = a_stack.map(|a| 0.5 * a.norm().powi(2));
    let dw = time_derivative(&w, k, dt, stencil)?;
    let flux = energy_pulse(a_stack.slice(k))?.p.zip_map(a_stack.slice(k), |p, a| {
        let sv = (a.v * a.s.conj()).im();
        [p[0] + sv[0], p[1] + sv[1], p[2] + sv[2]]
    })?;
    let div_p = divergence_by(&flux, stencil, |p, i| p[i]);
    let work = theta_stack
        .slice(k)
        .zip_map(a_stack.slice(k), |t, a| {
            let (rho, j) = rho_j(t);
            j.dot(a.v.conj()).re - (rho * a.s.conj()).im
        })?;
    let energy = Field::from_vec(
        dw.grid(),
        (0..dw.grid().len())
            .map(|i| dw.get(i) + div_p.get(i) + work.get(i))
            .collect(),
    )?;
    Ok(ConservationResiduals { charge, energy })
}

pub(crate) fn check_aligned(a: &SampleStack, b: &SampleStack) -> Result<()> {
    ensure_same_grid(a.grid(), b.grid(), "stack grids")?;
    if a.len() != b.len() || a.dtau() != b.dtau() || (a.tau0() - b.tau0()).abs() > 1e-12 * a.dtau() {
        return Err(Error::GridMismatch("stack time axes"));
    }
    Ok(())
}

/// `∇⁺A` at every slice where the stencil fits, as a stack of charge-currents.
pub fn charge_current_stack(a_stack: &SampleStack, stencil: Stencil) -> Result<SampleStack> {
    let r = stencil.radius();
    let slices = (r..a_stack.len().saturating_sub(r))
        .map(|k| bigradient_at(a_stack, k, Sign::Plus, stencil))
        .collect::<Result<Vec<_>>>()?;
    SampleStack::new(slices, a_stack.tau_at(r), a_stack.dtau())
}
