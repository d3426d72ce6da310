//! Interaction of charge-current fields.
//!
//! A field `(A, Θ)` acted on by partner tensions `A'` evolves as
//!
//! ```text
//! κ∇⁻Θ + Θ∘A' = 0,    ∇⁺A = Θ,
//! ```
//!
//! whose scalar and vector parts are `iκ(∂τρ + div J) = M` and
//! `iκ(∂τJ − i rot J + ∇ρ) = F` for the power-force `Θ∘A' = M − iF`.
//! Without partners `∇⁻Θ = 0` and charge is conserved.

mod diagnostics;
mod system;

pub use diagnostics::{step_diagnostics, StepRecord};
pub use system::{step_interaction, FieldState, InteractionSystem};

use rayon::prelude::*;

use crate::algebra::{Biquaternion, Vec3C, I};
use crate::egm::{rho_j, Medium};
use crate::fields::{
    divergence_by, ensure_same_grid, partial, quaternion_derivative, tensor_divergence,
    time_derivative, BiqField, ComplexField, CVecField, Field, RealField, RealVecField,
    SampleStack, Stencil, Tensor3,
};
use crate::{Error, Result};

/// Power `M` and force `F = Fᴴ + iFᴱ` densities, with `raw = M − iF = Θ∘A'`.
#[derive(Clone, Debug)]
pub struct PowerForce {
    pub m: ComplexField,
    pub f_h: RealVecField,
    pub f_e: RealVecField,
    pub raw: BiqField,
}

/// The complex force `F` carried by `M − iF`.
#[inline]
pub fn force_of(raw: Biquaternion) -> Vec3C {
    raw.v * I
}

/// `Θ∘A'`, split into power and force. A resistance in the scalar part of
/// `A'` contributes its `−i a'J` force automatically.
pub fn power_force(theta: &BiqField, a_other: &BiqField) -> Result<PowerForce> {
    let raw = theta.mul(a_other)?;
    Ok(PowerForce {
        m: raw.map(|r| r.s),
        f_h: raw.map(|r| force_of(r).re()),
        f_e: raw.map(|r| force_of(r).im()),
        raw,
    })
}

/// `Θ¹∘A² + Θ²∘A¹`, zero when action equals reaction.
pub fn action_reaction_residual(
    theta1: &BiqField,
    a2: &BiqField,
    theta2: &BiqField,
    a1: &BiqField,
) -> Result<BiqField> {
    theta1.mul(a2)?.add(&theta2.mul(a1)?)
}

/// `∂τΘ = i∇∘Θ`, the free-field law `∇⁻Θ = 0` solved for the time derivative.
pub fn free_field_rhs(theta: &BiqField, stencil: Stencil) -> BiqField {
    quaternion_derivative(theta, stencil).scale(I)
}

/// Non-symmetric stress pseudotensors of one charge-current field.
#[derive(Clone, Debug)]
pub struct StressTensors {
    pub sigma_h: Field<Tensor3>,
    pub sigma_e: Field<Tensor3>,
}

/// Real split `(ρᴱ, ρᴴ, jᴱ, jᴴ)` of a charge-current value.
#[inline]
pub fn real_parts(theta: Biquaternion, m: Medium) -> (f64, f64, [f64; 3], [f64; 3]) {
    let (se, sm) = (m.eps().sqrt(), m.mu().sqrt());
    let (rho, j) = rho_j(theta);
    (
        se * rho.re,
        -sm * rho.im,
        j.re().map(|x| x / sm),
        j.im().map(|x| -x / se),
    )
}

const LEVI: [[[f64; 3]; 3]; 3] = {
    let mut e = [[[0.0; 3]; 3]; 3];
    e[0][1][2] = 1.0;
    e[1][2][0] = 1.0;
    e[2][0][1] = 1.0;
    e[0][2][1] = -1.0;
    e[2][1][0] = -1.0;
    e[1][0][2] = -1.0;
    e
};

/// `σᴴ_ik = −κ(ρᴴ/√μ δ_ik + √μ jᴱ_l e_ikl)` and
/// `σᴱ_ik = −κ(ρᴱ/√ε δ_ik − √ε jᴴ_l e_ikl)` at one point.
pub fn stress_at(theta: Biquaternion, m: Medium, kappa: f64) -> (Tensor3, Tensor3) {
    let (rho_e, rho_h, j_e, j_h) = real_parts(theta, m);
    let (se, sm) = (m.eps().sqrt(), m.mu().sqrt());
    let mut sh = [[0.0; 3]; 3];
    let mut s_e = [[0.0; 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            let delta = if i == k { 1.0 } else { 0.0 };
            let (mut ah, mut ae) = (0.0, 0.0);
            for l in 0..3 {
                ah += j_e[l] * LEVI[i][k][l];
                ae += j_h[l] * LEVI[i][k][l];
            }
            sh[i][k] = -kappa * (rho_h / sm * delta + sm * ah);
            s_e[i][k] = -kappa * (rho_e / se * delta - se * ae);
        }
    }
    (Tensor3(sh), Tensor3(s_e))
}

pub fn stress_tensors(theta: &BiqField, medium: Medium, kappa: f64) -> StressTensors {
    StressTensors {
        sigma_h: theta.map(|t| stress_at(t, medium, kappa).0),
        sigma_e: theta.map(|t| stress_at(t, medium, kappa).1),
    }
}

/// Left minus right of the two stress balance laws at the central slice:
/// `∂_kσᴴ_ik + Fᴴ_i − κ√ε ∂τjᴴ_i` and `∂_kσᴱ_ik + Fᴱ_i − κ√μ ∂τjᴱ_i`.
pub fn stress_balance_residual(
    theta_stack: &SampleStack,
    a_partner: &BiqField,
    medium: Medium,
    kappa: f64,
    stencil: Stencil,
) -> Result<(RealVecField, RealVecField)> {
    let k = theta_stack.center();
    let theta = theta_stack.slice(k);
    ensure_same_grid(theta.grid(), a_partner.grid(), "stress balance")?;
    let pf = power_force(theta, a_partner)?;
    let st = stress_tensors(theta, medium, kappa);
    let div_h = tensor_divergence(&st.sigma_h, stencil);
    let div_e = tensor_divergence(&st.sigma_e, stencil);
    // κ√ε ∂τjᴴ = −κ ∂τ Im J and κ√μ ∂τjᴱ = κ ∂τ Re J.
    let currents: Vec<CVecField> = theta_stack.map(|t| rho_j(t).1);
    let dj = time_derivative(&currents, k, theta_stack.dtau(), stencil)?;
    let grid = theta.grid();
    let res = |div: &RealVecField, f: &RealVecField, rate: &(dyn Fn(Vec3C) -> [f64; 3] + Sync)| {
        Field::from_vec(
            grid,
            (0..grid.len())
                .into_par_iter()
                .map(|i| {
                    let (d, f, r) = (div.get(i), f.get(i), rate(dj.get(i)));
                    [d[0] + f[0] - r[0], d[1] + f[1] - r[1], d[2] + f[2] - r[2]]
                })
                .collect(),
        )
    };
    let res_h = res(&div_h, &pf.f_h, &|d| d.im().map(|x| -kappa * x))?;
    let res_e = res(&div_e, &pf.f_e, &|d| d.re().map(|x| kappa * x))?;
    Ok((res_h, res_e))
}

/// Pointwise stress balance from exact derivatives `d = [∂τΘ, ∂₁Θ, ∂₂Θ, ∂₃Θ]`.
/// The stresses are linear in `Θ`, so `∂_kσ = σ(∂_kΘ)`.
pub fn stress_balance_at(
    theta: Biquaternion,
    d: [Biquaternion; 4],
    a_partner: Biquaternion,
    medium: Medium,
    kappa: f64,
) -> ([f64; 3], [f64; 3]) {
    let f = force_of(theta * a_partner);
    let (se, sm) = (medium.eps().sqrt(), medium.mu().sqrt());
    let (_, _, je_t, jh_t) = real_parts(d[0], medium);
    let (mut rh, mut re) = ([0.0; 3], [0.0; 3]);
    for k in 0..3 {
        let (sh, s_e) = stress_at(d[k + 1], medium, kappa);
        for i in 0..3 {
            rh[i] += sh.0[i][k];
            re[i] += s_e.0[i][k];
        }
    }
    for i in 0..3 {
        rh[i] += f.re()[i] - kappa * se * jh_t[i];
        re[i] += f.im()[i] - kappa * sm * je_t[i];
    }
    (rh, re)
}

/// Pointwise thermodynamic residual from exact derivatives
/// `d = [∂τΘ, ∂₁Θ, ∂₂Θ, ∂₃Θ]` and the force `F` on the field.
pub fn thermo_at(theta: Biquaternion, d: [Biquaternion; 4], force: Vec3C, kappa: f64) -> f64 {
    let (_, j) = rho_j(theta);
    let jb = j.conj();
    let dq = rho_j(d[0]).1.dot(jb).re;
    let mut div_p = 0.0;
    let mut grad_rho = [crate::algebra::Complex::new(0.0, 0.0); 3];
    for k in 0..3 {
        let (drho, dj) = rho_j(d[k + 1]);
        grad_rho[k] = drho;
        div_p += ((dj.cross(jb) + j.cross(dj.conj())) * (I * 0.5)).re()[k];
    }
    let grad_rho = Vec3C::from_array(grad_rho);
    kappa * (dq - div_p + grad_rho.dot(jb).re) - force.dot(jb).im
}

/// Energy-impulse of a charge-current field.
#[derive(Clone, Debug)]
pub struct ChargeCurrentEnergy {
    /// `½‖J‖²`.
    pub q: RealField,
    /// `½ i J × J̄`.
    pub p_j: RealVecField,
    /// `½ Θ∘Θ*`.
    pub xi: BiqField,
}

#[inline]
pub fn current_energy_at(theta: Biquaternion) -> (f64, [f64; 3]) {
    let (_, j) = rho_j(theta);
    (0.5 * j.norm_sqr(), (j.cross(j.conj()) * (I * 0.5)).re())
}

pub fn charge_current_energy(theta: &BiqField) -> ChargeCurrentEnergy {
    ChargeCurrentEnergy {
        q: theta.map(|t| current_energy_at(t).0),
        p_j: theta.map(|t| current_energy_at(t).1),
        xi: theta.map(|t| t * t.conj_quat() * 0.5),
    }
}

/// `κ(∂τQ − div P_J + Re(∇ρ, J̄)) − Im(F, J̄)` at the central slice, where
/// `force` is the complex force `F` acting on the field there.
pub fn thermo_residual(
    theta_stack: &SampleStack,
    force: &CVecField,
    kappa: f64,
    stencil: Stencil,
) -> Result<RealField> {
    let k = theta_stack.center();
    let theta = theta_stack.slice(k);
    ensure_same_grid(theta.grid(), force.grid(), "thermo residual")?;
    let q: Vec<RealField> = theta_stack.map(|t| current_energy_at(t).0);
    let dq = time_derivative(&q, k, theta_stack.dtau(), stencil)?;
    let div_p = divergence_by(theta, stencil, |t, i| current_energy_at(t).1[i]);
    let rho: ComplexField = theta.map(|t| rho_j(t).0);
    let grad = [0, 1, 2].map(|a| partial(&rho, a, stencil));
    let grid = theta.grid();
    let data = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let (_, j) = rho_j(theta.get(i));
            let jb = j.conj();
            let grad_rho = Vec3C::new(grad[0].get(i), grad[1].get(i), grad[2].get(i));
            let work = force.get(i).dot(jb).im;
            kappa * (dq.get(i) - div_p.get(i) + grad_rho.dot(jb).re) - work
        })
        .collect();
    Field::from_vec(grid, data)
}

/// How the interaction changes the energy at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EnergyClass {
    Separation,
    Absorption,
    Conservation,
}

impl EnergyClass {
    pub fn name(self) -> &'static str {
        match self {
            EnergyClass::Separation => "separation",
            EnergyClass::Absorption => "absorption",
            EnergyClass::Conservation => "conservation",
        }
    }
}

/// Relative tolerance separating the three energy classes.
pub const CLASSIFY_TOL: f64 = 1e-12;

/// Energy-pulse of the total charge-current split into self and cross terms.
#[derive(Clone, Debug)]
pub struct InteractionEnergy {
    /// `½(ΣΘ)∘(ΣΘ)*`.
    pub total: BiqField,
    /// `½ Θᵏ∘Θᵏ*` per field.
    pub own: Vec<BiqField>,
    /// `Ξᵏˡ = ½(Θᵏ∘Θˡ* + Θˡ∘Θᵏ*)` for `k < l`.
    pub pairwise: Vec<((usize, usize), BiqField)>,
    /// `δΞ = Σ_{k<l} Ξᵏˡ`, so that `total = Σ own + δΞ`.
    pub delta: BiqField,
    pub classes: Vec<EnergyClass>,
}

impl InteractionEnergy {
    /// Point counts of separation, absorption and conservation.
    pub fn counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for cl in &self.classes {
            c[match cl {
                EnergyClass::Separation => 0,
                EnergyClass::Absorption => 1,
                EnergyClass::Conservation => 2,
            }] += 1;
        }
        c
    }
}

pub fn classify(delta_w: f64, scale: f64) -> EnergyClass {
    let tol = CLASSIFY_TOL * scale;
    if delta_w > tol {
        EnergyClass::Separation
    } else if delta_w < -tol {
        EnergyClass::Absorption
    } else {
        EnergyClass::Conservation
    }
}

pub fn interaction_energy(thetas: &[BiqField]) -> Result<InteractionEnergy> {
    let first = thetas.first().ok_or(Error::Empty("charge-current list"))?;
    let grid = first.grid();
    for t in &thetas[1..] {
        ensure_same_grid(grid, t.grid(), "interaction energy")?;
    }
    let own: Vec<BiqField> = thetas.iter().map(|t| t.map(|x| x * x.conj_quat() * 0.5)).collect();
    let mut pairwise = Vec::new();
    for k in 0..thetas.len() {
        for l in k + 1..thetas.len() {
            let x = thetas[k].zip_map(&thetas[l], |a, b| {
                (a * b.conj_quat() + b * a.conj_quat()) * 0.5
            })?;
            pairwise.push(((k, l), x));
        }
    }
    let mut delta = BiqField::filled(grid, Biquaternion::ZERO);
    for (_, x) in &pairwise {
        delta = delta.add(x)?;
    }
    let mut sum = first.clone();
    for t in &thetas[1..] {
        sum = sum.add(t)?;
    }
    let total = sum.map(|s| s * s.conj_quat() * 0.5);
    let classes = (0..grid.len())
        .map(|i| {
            let scale: f64 = thetas.iter().map(|t| t.get(i).norm().powi(2)).sum();
            classify(delta.get(i).s.re, scale)
        })
        .collect();
    Ok(InteractionEnergy {
        total,
        own,
        pairwise,
        delta,
        classes,
    })
}

/// Integral of a real field over the periodic box.
pub fn integrate(f: &RealField) -> f64 {
    f.sum_by(|x| x) * f.grid().h().powi(3)
}

/// Largest modulus in a complex field.
pub(crate) fn max_norm(f: &ComplexField) -> f64 {
    f.max_by(|z| z.norm())
}
