//! Randomized identity batteries for the algebra and the Lorentz maps.
//!
//! Every identity reports its largest relative residual over the draws. The
//! algebra battery takes the product as a parameter so a deliberately broken
//! product can be run through it as a negative control.

use std::f64::consts::PI;
use std::fmt;

use bqfield::egm::rho_j;
use bqfield::lorentz::{
    closed_form_charge_current, closed_form_power_force, closed_form_resistance, closed_form_tension,
    inverse_event, make_lorentz, transform_biq, transform_event, LorentzBiq,
};
use bqfield::{Biquaternion, Complex, Vec3C};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::CliError;

/// Relative tolerance applied to every identity.
pub const IDENTITY_TOL: f64 = 1e-12;

/// The product under test.
pub type MulFn = fn(Biquaternion, Biquaternion) -> Biquaternion;

/// The library product.
pub fn library_mul(a: Biquaternion, b: Biquaternion) -> Biquaternion {
    a * b
}

/// Largest relative residual of one identity.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct IdentityResult {
    pub name: &'static str,
    pub max_residual: f64,
    pub tol: f64,
    pub passed: bool,
}

impl fmt::Display for IdentityResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<36} max residual {:.3e}  tol {:.0e}  {}",
            self.name,
            self.max_residual,
            self.tol,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

/// Running maxima keyed by identity name, in insertion order.
#[derive(Default)]
struct Tally(Vec<(&'static str, f64)>);

impl Tally {
    fn record(&mut self, name: &'static str, residual: f64) {
        // NaN must not hide behind `max`.
        let r = if residual.is_nan() { f64::INFINITY } else { residual };
        match self.0.iter_mut().find(|(n, _)| *n == name) {
            Some((_, m)) => *m = m.max(r),
            None => self.0.push((name, r)),
        }
    }

    fn finish(self) -> Vec<IdentityResult> {
        self.0
            .into_iter()
            .map(|(name, max_residual)| IdentityResult {
                name,
                max_residual,
                tol: IDENTITY_TOL,
                passed: max_residual <= IDENTITY_TOL,
            })
            .collect()
    }
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(f64::MIN_POSITIVE)
}

fn cpx(rng: &mut ChaCha8Rng) -> Complex {
    Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn cvec(rng: &mut ChaCha8Rng) -> Vec3C {
    Vec3C::new(cpx(rng), cpx(rng), cpx(rng))
}

fn biq(rng: &mut ChaCha8Rng) -> Biquaternion {
    Biquaternion { s: cpx(rng), v: cvec(rng) }
}

fn direction(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let c: f64 = rng.gen_range(-1.0..1.0);
    let p: f64 = rng.gen_range(0.0..2.0 * PI);
    let s = (1.0 - c * c).sqrt();
    [s * p.cos(), s * p.sin(), c]
}

fn event(rng: &mut ChaCha8Rng) -> Biquaternion {
    Biquaternion::event(rng.gen_range(-3.0..3.0), [0; 3].map(|_| rng.gen_range(-3.0..3.0)))
}

/// Algebra identities over `count` random draws.
pub fn algebra_battery(rng: &mut ChaCha8Rng, count: usize, mul: MulFn) -> Vec<IdentityResult> {
    let mut t = Tally::default();
    for _ in 0..count {
        let (a, b, c) = (biq(rng), biq(rng), biq(rng));
        let (na, nb, nc) = (a.norm(), b.norm(), c.norm());

        let assoc = mul(mul(a, b), c).max_abs_diff(mul(a, mul(b, c)));
        t.record("associativity", rel(assoc, na * nb * nc));
        let left = mul(a, b + c).max_abs_diff(mul(a, b) + mul(a, c));
        t.record("left distributivity", rel(left, na * (nb + nc)));
        let right = mul(a + b, c).max_abs_diff(mul(a, c) + mul(b, c));
        t.record("right distributivity", rel(right, (na + nb) * nc));

        let rev = mul(a, b).reverse().max_abs_diff(mul(b.reverse(), a.reverse()));
        t.record("reverse of a product", rel(rev, na * nb));
        let star = mul(a, b).conj_quat().max_abs_diff(mul(b.conj_quat(), a.conj_quat()));
        t.record("quaternion conjugate of a product", rel(star, na * nb));
        let inv = [
            a.conj_complex().conj_complex().max_abs_diff(a),
            a.conj_quat().conj_quat().max_abs_diff(a),
            a.reverse().reverse().max_abs_diff(a),
        ];
        t.record("involutions", rel(inv.into_iter().fold(0.0, f64::max), na));

        // q∘q̄ is the complex scalar f² + (F,F), and it is multiplicative.
        let n = |q: Biquaternion| mul(q, q.reverse());
        let comp = n(mul(a, b)).max_abs_diff(Biquaternion::scalar(n(a).s * n(b).s));
        t.record("composition q(ab) = q(a)q(b)", rel(comp, (na * nb).powi(2)));

        let theta: f64 = rng.gen_range(-2.0..2.0);
        let e = Vec3C::real(direction(rng));
        let u = Biquaternion {
            s: Complex::new(theta.cosh(), 0.0),
            v: e * Complex::new(0.0, theta.sinh()),
        };
        let unit = mul(u, u.reverse()).max_abs_diff(Biquaternion::ONE);
        t.record("hyperbolic unit U∘Ū = 1", rel(unit, u.norm().powi(2)));

        let z = event(rng);
        let zz = mul(z, z.reverse()).max_abs_diff(Biquaternion::scalar(Complex::new(z.pseudonorm_sq(), 0.0)));
        t.record("event Z∘Z̄ = pseudonorm", rel(zz, z.norm().powi(2)));
    }
    t.finish()
}

/// A fixed boost for [`lorentz_battery`]; random boosts are drawn otherwise.
#[derive(Clone, Copy, Debug)]
pub struct Boost {
    pub v: f64,
    pub e: [f64; 3],
    pub phi: f64,
}

/// Lorentz identities over `count` random events and field values.
///
/// Closed forms describe pure boosts, so they are compared against the
/// boost with the rotation removed.
pub fn lorentz_battery(
    rng: &mut ChaCha8Rng,
    count: usize,
    fixed: Option<Boost>,
) -> Result<Vec<IdentityResult>, CliError> {
    let mut t = Tally::default();
    for _ in 0..count {
        let b = fixed.unwrap_or_else(|| Boost {
            v: rng.gen_range(-0.95..0.95),
            e: direction(rng),
            phi: rng.gen_range(-PI..PI),
        });
        let en = b.e.iter().map(|x| x * x).sum::<f64>().sqrt();
        let e = b.e.map(|x| x / en);
        let l = make_lorentz(b.v, e, b.phi)?;
        let g2 = l.gamma().powi(2);

        let unit = (l.l_bar() * l.l_star()).max_abs_diff(Biquaternion::ONE);
        t.record("lorentz unit L̄∘L* = 1", rel(unit, g2));

        let z = event(rng);
        let zp = transform_event(&l, z)?;
        let scale = g2 * z.norm().powi(2);
        t.record("pseudonorm invariance", rel((zp.pseudonorm_sq() - z.pseudonorm_sq()).abs(), scale));
        t.record("inverse event", rel(inverse_event(&l, zp)?.max_abs_diff(z), g2 * z.norm()));

        let k = biq(rng);
        let back = transform_biq(&l.inverse(), transform_biq(&l, k));
        t.record("inverse transform", rel(back.max_abs_diff(k), g2 * k.norm()));

        closed_forms(&mut t, rng, &make_lorentz(b.v, e, 0.0)?)?;
    }
    Ok(t.finish())
}

fn closed_forms(t: &mut Tally, rng: &mut ChaCha8Rng, l: &LorentzBiq) -> Result<(), CliError> {
    let (v, e, g2) = (l.v(), l.e(), l.gamma().powi(2));
    let (rho, j) = (cpx(rng), cvec(rng));
    let size = (rho.norm_sqr() + j.norm_sqr()).sqrt();

    let theta = Biquaternion { s: -Complex::i() * rho, v: -j };
    let (rp, jp) = rho_j(transform_biq(l, theta));
    let (rc, jc) = closed_form_charge_current(rho, j, v, e)?;
    t.record("closed form: charge-current", rel((rp - rc).norm().max((jp - jc).max_abs()), g2 * size));

    // Power and force enter as M − iF.
    let raw = Biquaternion { s: rho, v: j * -Complex::i() };
    let pf = transform_biq(l, raw);
    let (m, f) = closed_form_power_force(rho, j, v, e)?;
    let d = (pf.s - m).norm().max((pf.v * Complex::i() - f).max_abs());
    t.record("closed form: power-force", rel(d, g2 * size));

    let a = cvec(rng);
    let ap = transform_biq(l, Biquaternion::vector(a));
    let scale = g2 * a.norm_sqr().sqrt();
    t.record("closed form: tension", rel((ap.v - closed_form_tension(a, v, e)?).max_abs(), scale));
    let res = closed_form_resistance(a, v, e)?;
    t.record("closed form: resistance −vγ(e,A)", rel((ap.s - Complex::i() * res).norm(), scale));
    Ok(())
}

/// Both batteries, the algebra one with `count` draws and the Lorentz one
/// with `count` random boosts.
pub fn check_identities(seed: u64, count: usize, mul: MulFn) -> Result<Vec<IdentityResult>, CliError> {
    use rand::SeedableRng;
    if count == 0 {
        return Err(CliError::Config {
            key: "--count".into(),
            reason: "must be at least 1".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = algebra_battery(&mut rng, count, mul);
    out.extend(lorentz_battery(&mut rng, count, None)?);
    Ok(out)
}
