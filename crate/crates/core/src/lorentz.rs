//! Boosts and rotations as biquaternion conjugations.
//!
//! A boost with speed `v` along the unit vector `e` is `U = ch θ + i e sh θ`
//! with `ch 2θ = γ`, `sh 2θ = vγ`; a rotation by `2φ` about `e` is
//! `W = cos φ + e sin φ`. Their product `L = W∘U` satisfies `L̄∘L* = 1`.
//! Events `Z = τ + ix` and field values both transform as `Z' = L∘Z∘L*`,
//! while sources of `∇⁺K = G` transform as `G' = L̄∘G∘L*`, so that
//! `∇'⁺K' = G'` whenever `∇⁺K = G`.

use rayon::prelude::*;

use crate::algebra::{Biquaternion, Complex, Vec3C, I};
use crate::fields::{BiqField, Field, Grid};
use crate::propagator::SourceSampler;
use crate::{Error, Result};

/// A Lorentz transformation together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzBiq {
    l: Biquaternion,
    e: [f64; 3],
    theta: f64,
    phi: f64,
    v: f64,
}

const UNIT_TOL: f64 = 1e-12;

fn unit(e: [f64; 3]) -> Result<[f64; 3]> {
    let n = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
    if n.is_nan() || (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidParameter {
            name: "e",
            reason: format!("direction must be a unit vector, |e| = {n}"),
        });
    }
    Ok(e.map(|c| c / n))
}

fn check_speed(v: f64) -> Result<()> {
    if v.is_finite() && v.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::Superluminal(v))
    }
}

/// `(ch θ, sh θ)` for speed `v`, stable as `v → 0`.
fn half_rapidity(v: f64) -> (f64, f64) {
    let s = (1.0 - v * v).sqrt();
    let gamma = 1.0 / s;
    let gamma_m1 = v * v / (s * (1.0 + s));
    let ch = ((gamma + 1.0) / 2.0).sqrt();
    let sh = v.signum() * (gamma_m1 / 2.0).sqrt();
    (ch, if v == 0.0 { 0.0 } else { sh })
}

/// `L = W∘U` for speed `v` along `e` and rotation half-angle `phi` about `e`.
pub fn make_lorentz(v: f64, e: [f64; 3], phi: f64) -> Result<LorentzBiq> {
    check_speed(v)?;
    if !phi.is_finite() {
        return Err(Error::InvalidParameter {
            name: "phi",
            reason: "must be finite".into(),
        });
    }
    let e = unit(e)?;
    let (ch, sh) = half_rapidity(v);
    let ev = Vec3C::real(e);
    let u = Biquaternion {
        s: Complex::new(ch, 0.0),
        v: ev * (I * sh),
    };
    let w = Biquaternion {
        s: Complex::new(phi.cos(), 0.0),
        v: ev * phi.sin(),
    };
    Ok(LorentzBiq {
        l: w * u,
        e,
        theta: sh.asinh(),
        phi,
        v,
    })
}

impl LorentzBiq {
    pub fn l(&self) -> Biquaternion {
        self.l
    }

    /// `L*`.
    pub fn l_star(&self) -> Biquaternion {
        self.l.conj_quat()
    }

    /// `L̄`.
    pub fn l_bar(&self) -> Biquaternion {
        self.l.conj_complex()
    }

    /// `L̄* = L⁻¹`.
    pub fn l_bar_star(&self) -> Biquaternion {
        self.l.conj_complex().conj_quat()
    }

    pub fn e(&self) -> [f64; 3] {
        self.e
    }

    /// Half rapidity `θ`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Rotation half-angle `φ`.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn gamma(&self) -> f64 {
        (2.0 * self.theta).cosh()
    }

    /// The transformation undoing this one.
    pub fn inverse(&self) -> LorentzBiq {
        make_lorentz(-self.v, self.e, -self.phi).expect("parameters already validated")
    }
}

/// `Z' = L∘Z∘L*` for an event `Z = τ + ix` with real `τ`, `x`.
pub fn transform_event(l: &LorentzBiq, z: Biquaternion) -> Result<Biquaternion> {
    check_event(z)?;
    Ok(l.l * z * l.l_star())
}

/// `Z = L̄*∘Z'∘L̄`, the inverse of [`transform_event`].
pub fn inverse_event(l: &LorentzBiq, z: Biquaternion) -> Result<Biquaternion> {
    check_event(z)?;
    Ok(l.l_bar_star() * z * l.l_bar())
}

fn check_event(z: Biquaternion) -> Result<()> {
    let scale = z.max_abs().max(1.0);
    let stray = z.s.im.abs().max(z.v.re().iter().fold(0.0, |m, c| m.max(c.abs())));
    if !z.is_finite() || stray > 1e-12 * scale {
        return Err(Error::MalformedEvent(format!(
            "expected τ + ix with real τ and x, got {z}"
        )));
    }
    Ok(())
}

/// Splits an event into `(τ, x)`.
pub fn event_parts(z: Biquaternion) -> (f64, [f64; 3]) {
    (z.s.re, z.v.im())
}

/// `K' = L∘K∘L*` for tensions and charge-currents.
pub fn transform_biq(l: &LorentzBiq, k: Biquaternion) -> Biquaternion {
    l.l * k * l.l_star()
}

/// `G' = L̄∘G∘L*` for right-hand sides of `∇⁺K = G`.
pub fn transform_source(l: &LorentzBiq, g: Biquaternion) -> Biquaternion {
    l.l_bar() * g * l.l_star()
}

fn resample<S, F>(l: &LorentzBiq, k: &S, grid: Grid, tau: f64, value: F) -> BiqField
where
    S: SourceSampler + ?Sized,
    F: Fn(Biquaternion) -> Biquaternion + Sync,
{
    let data = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let zp = Biquaternion::event(tau, grid.position(idx));
            let (t, x) = event_parts(l.l_bar_star() * zp * l.l_bar());
            value(k.sample(t, x))
        })
        .collect();
    Field::from_vec(grid, data).expect("same grid")
}

/// The transformed field `K'(Z') = L∘K(Z)∘L*` on a primed grid at primed time `tau`.
pub fn transform_field<S: SourceSampler + ?Sized>(l: &LorentzBiq, k: &S, grid: Grid, tau: f64) -> BiqField {
    resample(l, k, grid, tau, |b| transform_biq(l, b))
}

/// The transformed source `G'(Z') = L̄∘G(Z)∘L*` on a primed grid.
pub fn transform_source_field<S: SourceSampler + ?Sized>(
    l: &LorentzBiq,
    g: &S,
    grid: Grid,
    tau: f64,
) -> BiqField {
    resample(l, g, grid, tau, |b| transform_source(l, b))
}

fn boost_parts(v: f64, e: [f64; 3]) -> Result<(f64, Vec3C)> {
    check_speed(v)?;
    Ok((1.0 / (1.0 - v * v).sqrt(), Vec3C::real(unit(e)?)))
}

/// Vector part of a boosted tension: `A − e(e,A) + γ(e,A)e`.
pub fn closed_form_tension(a: Vec3C, v: f64, e: [f64; 3]) -> Result<Vec3C> {
    let (gamma, e) = boost_parts(v, e)?;
    let ea = e.dot(a);
    Ok(a - e * ea + e * (ea * gamma))
}

/// Resistance `a'` acquired by a pure-vector tension, `A' = i a' + …` with
/// `a' = −vγ(e,A)`.
pub fn closed_form_resistance(a: Vec3C, v: f64, e: [f64; 3]) -> Result<Complex> {
    let (gamma, e) = boost_parts(v, e)?;
    Ok(e.dot(a) * (-v * gamma))
}

/// `ρ' = γ(ρ − v(e,J))`, `J' = J − e(e,J) + γ((e,J) − vρ)e`.
pub fn closed_form_charge_current(rho: Complex, j: Vec3C, v: f64, e: [f64; 3]) -> Result<(Complex, Vec3C)> {
    let (gamma, e) = boost_parts(v, e)?;
    let ej = e.dot(j);
    Ok(((rho - ej * v) * gamma, j - e * ej + e * ((ej - rho * v) * gamma)))
}

/// `M' = γ(M − v(e,F))`, `F' = F − e(e,F) + γ((e,F) − vM)e`. Power and force
/// combine as `M − iF`, which is `i` times a charge-current with `ρ = M` and
/// `J = F`, so both transform alike.
pub fn closed_form_power_force(m: Complex, f: Vec3C, v: f64, e: [f64; 3]) -> Result<(Complex, Vec3C)> {
    closed_form_charge_current(m, f, v, e)
}
