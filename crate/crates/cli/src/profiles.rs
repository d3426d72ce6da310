//! Initial data from profile descriptors.

use std::f64::consts::TAU;

use bqfield::{BiqField, Biquaternion, Complex, Field, Grid, Vec3C};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::config::{Profile, ProfileKind};

/// Which free equation a wave profile should satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// `∇⁺A = 0`.
    Tension,
    /// `∇⁻Θ = 0`.
    Charge,
}

fn norm(v: [f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// A unit vector orthogonal to `k`, built from the axis least aligned with it.
fn orthogonal(k: [f64; 3]) -> [f64; 3] {
    let axis = (0..3).min_by(|&a, &b| k[a].abs().total_cmp(&k[b].abs())).unwrap_or(0);
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let u = cross(k, e);
    let n = norm(u);
    u.map(|x| x / n)
}

/// `u ± i k̂×u`, whose waves along `k` solve the free equation of `role`.
pub fn polarization(k: [f64; 3], u: Option<[f64; 3]>, role: Role) -> Biquaternion {
    let kn = norm(k);
    let khat = k.map(|x| x / kn);
    let u = u.map_or_else(|| orthogonal(k), |u| u.map(|x| x / norm(u)));
    let sign = if role == Role::Tension { 1.0 } else { -1.0 };
    let w = cross(khat, u).map(|x| sign * x);
    Biquaternion::vector(Vec3C::from_re_im(u, w))
}

/// Pointwise values of `profile` at `τ = 0`. Random phases come from `rng`.
pub fn sampler(profile: &Profile, role: Role, rng: &mut ChaCha8Rng) -> impl Fn([f64; 3]) -> Biquaternion + Sync {
    let phase = if profile.random_phase { rng.gen_range(0.0..TAU) } else { profile.phase };
    let value = profile.value.map(Biquaternion::from_components);
    let kind = profile.profile;
    let (c, w) = (profile.center, profile.width.unwrap_or(1.0));
    let k = profile.k.unwrap_or([1.0, 0.0, 0.0]);
    let coeff = match kind {
        ProfileKind::Uniform | ProfileKind::GaussianBump => value.unwrap_or(Biquaternion::ZERO),
        ProfileKind::PlaneWave | ProfileKind::CircularWave => {
            value.unwrap_or_else(|| polarization(k, profile.polarization, role))
        }
    } * profile.amplitude;
    move |x: [f64; 3]| match kind {
        ProfileKind::Uniform => coeff,
        ProfileKind::GaussianBump => {
            let r2: f64 = (0..3).map(|i| (x[i] - c[i]).powi(2)).sum();
            coeff * (-r2 / (2.0 * w * w)).exp()
        }
        ProfileKind::PlaneWave | ProfileKind::CircularWave => {
            let arg = k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + phase;
            if kind == ProfileKind::CircularWave {
                coeff * Complex::new(0.0, arg).exp()
            } else {
                coeff * arg.cos()
            }
        }
    }
}

/// The field of `profile` on `grid` at `τ = 0`.
pub fn build(profile: &Profile, role: Role, grid: Grid, rng: &mut ChaCha8Rng) -> BiqField {
    Field::from_fn(grid, sampler(profile, role, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use bqfield::fields::{bigradient, SampleStack, Sign, Stencil};
    use rand::SeedableRng;

    fn wave(kind: ProfileKind, k: [f64; 3]) -> Profile {
        Profile {
            profile: kind,
            amplitude: 1.0,
            width: None,
            center: [0.0; 3],
            k: Some(k),
            value: None,
            polarization: None,
            phase: 0.3,
            random_phase: false,
        }
    }

    #[test]
    fn default_polarization_along_e1_is_the_circular_wave() {
        let p = polarization([1.0, 0.0, 0.0], Some([0.0, 1.0, 0.0]), Role::Tension);
        assert_eq!(p, Biquaternion::vector(Vec3C::from_re_im([0.0, 1.0, 0.0], [0.0, 0.0, 1.0])));
        let p = polarization([2.0, 0.0, 0.0], None, Role::Charge);
        assert_eq!(p.v.re().iter().map(|x| x * x).sum::<f64>(), 1.0);
    }

    #[test]
    fn waves_are_free_for_their_role() {
        // A wave profile continued as f(k·x − |k|τ) is annihilated by ∇⁺ (tension) or ∇⁻ (charge).
        let grid = Grid::with_extent(32, TAU).unwrap();
        for kind in [ProfileKind::PlaneWave, ProfileKind::CircularWave] {
            for (role, sign) in [(Role::Tension, Sign::Plus), (Role::Charge, Sign::Minus)] {
                let k = [1.0, 1.0, 0.0];
                let kn = 2f64.sqrt();
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                let base = build(&wave(kind, k), role, grid, &mut rng);
                let dt = 1e-3;
                let slices = (0..5)
                    .map(|j| {
                        let shift = kn * dt * (j as f64 - 2.0);
                        let mut p = wave(kind, k);
                        p.phase -= shift;
                        build(&p, role, grid, &mut rng)
                    })
                    .collect();
                let st = SampleStack::new(slices, -2.0 * dt, dt).unwrap();
                let r = bigradient(&st, sign, Stencil::Fourth).unwrap();
                assert!(r.max_abs() < 1e-3 * base.max_abs(), "{kind:?} {role:?}: {}", r.max_abs());
            }
        }
    }

    #[test]
    fn random_phase_follows_the_seed() {
        let grid = Grid::new(8, 0.5).unwrap();
        let mut p = wave(ProfileKind::CircularWave, [TAU / 4.0, 0.0, 0.0]);
        p.random_phase = true;
        let a = build(&p, Role::Tension, grid, &mut ChaCha8Rng::seed_from_u64(5));
        let b = build(&p, Role::Tension, grid, &mut ChaCha8Rng::seed_from_u64(5));
        let c = build(&p, Role::Tension, grid, &mut ChaCha8Rng::seed_from_u64(6));
        assert_eq!(a.data(), b.data());
        assert_ne!(a.data(), c.data());
    }
}
