//! Biquaternions: a complex scalar plus a complex 3-vector.
//!
//! The product is the quaternion product extended to complex coefficients,
//!
//! ```text
//! (f + F) ∘ (g + G) = (fg − (F, G)) + (fG + gF + [F, G])
//! ```
//!
//! where `(F, G)` is the bilinear (non-conjugating) dot product and `[F, G]`
//! the cross product. The algebra is associative but not commutative, and
//! unlike the real quaternions it has zero divisors (light-cone elements).

use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

use crate::{Error, Result};

pub type Complex = num_complex::Complex64;

pub const I: Complex = Complex::new(0.0, 1.0);

#[inline]
pub(crate) const fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// Three-vector with complex components.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3C {
    pub x: Complex,
    pub y: Complex,
    pub z: Complex,
}

impl Vec3C {
    pub const ZERO: Vec3C = Vec3C {
        x: c(0.0, 0.0),
        y: c(0.0, 0.0),
        z: c(0.0, 0.0),
    };

    #[inline]
    pub const fn new(x: Complex, y: Complex, z: Complex) -> Self {
        Self { x, y, z }
    }

    /// Real vector embedded with zero imaginary parts.
    #[inline]
    pub const fn real(v: [f64; 3]) -> Self {
        Self::new(c(v[0], 0.0), c(v[1], 0.0), c(v[2], 0.0))
    }

    /// Cartesian unit vector `e_{axis+1}`.
    #[inline]
    pub fn unit(axis: usize) -> Self {
        let mut r = [0.0; 3];
        r[axis] = 1.0;
        Self::real(r)
    }

    /// `re + i·im` built from two real vectors.
    #[inline]
    pub fn from_re_im(re: [f64; 3], im: [f64; 3]) -> Self {
        Self::new(c(re[0], im[0]), c(re[1], im[1]), c(re[2], im[2]))
    }

    #[inline]
    pub fn to_array(self) -> [Complex; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn from_array(a: [Complex; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    #[inline]
    pub fn re(self) -> [f64; 3] {
        [self.x.re, self.y.re, self.z.re]
    }

    #[inline]
    pub fn im(self) -> [f64; 3] {
        [self.x.im, self.y.im, self.z.im]
    }

    /// Bilinear dot product `Σ a_i b_i`, no conjugation.
    #[inline]
    pub fn dot(self, o: Self) -> Complex {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.x.conj(), self.y.conj(), self.z.conj())
    }

    /// `‖F‖² = (F, F̄)`, always real and non-negative.
    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.x.norm_sqr() + self.y.norm_sqr() + self.z.norm_sqr()
    }

    #[inline]
    pub fn scale(self, k: Complex) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Largest absolute component.
    #[inline]
    pub fn max_abs(self) -> f64 {
        self.x.norm().max(self.y.norm()).max(self.z.norm())
    }
}

impl Index<usize> for Vec3C {
    type Output = Complex;

    fn index(&self, i: usize) -> &Complex {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3C index {i} out of range"),
        }
    }
}

impl Add for Vec3C {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3C {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3C {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<Complex> for Vec3C {
    type Output = Self;
    #[inline]
    fn mul(self, k: Complex) -> Self {
        self.scale(k)
    }
}

impl Mul<f64> for Vec3C {
    type Output = Self;
    #[inline]
    fn mul(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

impl AddAssign for Vec3C {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

/// Scalar and vector norms of a biquaternion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norms {
    /// `sqrt(|f|² + ‖F‖²)`.
    pub norm: f64,
    /// `|f|² − ‖F‖²`. Reported squared; it is negative outside the light cone.
    pub pseudonorm_sq: f64,
}

/// `f + F` with complex scalar `f` and complex vector `F`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Biquaternion {
    pub s: Complex,
    pub v: Vec3C,
}

impl Biquaternion {
    pub const ZERO: Biquaternion = Biquaternion {
        s: c(0.0, 0.0),
        v: Vec3C::ZERO,
    };
    pub const ONE: Biquaternion = Biquaternion {
        s: c(1.0, 0.0),
        v: Vec3C::ZERO,
    };

    /// Checked constructor; rejects NaN and infinite components.
    pub fn new(s: Complex, v: Vec3C) -> Result<Self> {
        let b = Self { s, v };
        if b.is_finite() {
            Ok(b)
        } else {
            Err(Error::NonFinite("biquaternion component"))
        }
    }

    #[inline]
    pub const fn scalar(s: Complex) -> Self {
        Self { s, v: Vec3C::ZERO }
    }

    #[inline]
    pub const fn vector(v: Vec3C) -> Self {
        Self { s: c(0.0, 0.0), v }
    }

    /// The event biquaternion `Z = τ + i x` for real time and position.
    #[inline]
    pub fn event(tau: f64, x: [f64; 3]) -> Self {
        Self {
            s: c(tau, 0.0),
            v: Vec3C::from_re_im([0.0; 3], x),
        }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.s.is_finite() && self.v.is_finite()
    }

    /// Complex conjugate `f̄ + F̄`.
    #[inline]
    pub fn conj_complex(self) -> Self {
        Self {
            s: self.s.conj(),
            v: self.v.conj(),
        }
    }

    /// Quaternion conjugate `F* = f̄ − F̄`.
    #[inline]
    pub fn conj_quat(self) -> Self {
        Self {
            s: self.s.conj(),
            v: -self.v.conj(),
        }
    }

    /// Only the quaternion sign flip `f − F`, without complex conjugation.
    /// This is the algebra anti-automorphism; `F* = conj_complex(reverse(F))`.
    #[inline]
    pub fn reverse(self) -> Self {
        Self {
            s: self.s,
            v: -self.v,
        }
    }

    /// True when `F* = F` within an absolute tolerance.
    pub fn is_selfconjugate(self, tol: f64) -> bool {
        self.conj_quat().max_abs_diff(self) <= tol
    }

    /// Bilinear scalar product `f₁f₂ + (F₁, F₂)`.
    #[inline]
    pub fn scalar_product(self, o: Self) -> Complex {
        self.s * o.s + self.v.dot(o.v)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        (self.s.norm_sqr() + self.v.norm_sqr()).sqrt()
    }

    #[inline]
    pub fn pseudonorm_sq(self) -> f64 {
        self.s.norm_sqr() - self.v.norm_sqr()
    }

    pub fn norms(self) -> Norms {
        Norms {
            norm: self.norm(),
            pseudonorm_sq: self.pseudonorm_sq(),
        }
    }

    /// Largest absolute value over the four complex components.
    #[inline]
    pub fn max_abs(self) -> f64 {
        self.s.norm().max(self.v.max_abs())
    }

    #[inline]
    pub fn max_abs_diff(self, o: Self) -> f64 {
        (self - o).max_abs()
    }

    /// The eight real components in dump order.
    #[inline]
    pub fn to_components(self) -> [f64; 8] {
        [
            self.s.re, self.s.im, self.v.x.re, self.v.x.im, self.v.y.re, self.v.y.im, self.v.z.re,
            self.v.z.im,
        ]
    }

    #[inline]
    pub fn from_components(r: [f64; 8]) -> Self {
        Self {
            s: c(r[0], r[1]),
            v: Vec3C::new(c(r[2], r[3]), c(r[4], r[5]), c(r[6], r[7])),
        }
    }
}

impl Mul for Biquaternion {
    type Output = Self;

    #[inline]
    fn mul(self, o: Self) -> Self {
        Self {
            s: self.s * o.s - self.v.dot(o.v),
            v: o.v.scale(self.s) + self.v.scale(o.s) + self.v.cross(o.v),
        }
    }
}

impl Mul<Complex> for Biquaternion {
    type Output = Self;
    #[inline]
    fn mul(self, k: Complex) -> Self {
        Self {
            s: self.s * k,
            v: self.v.scale(k),
        }
    }
}

impl Mul<f64> for Biquaternion {
    type Output = Self;
    #[inline]
    fn mul(self, k: f64) -> Self {
        Self {
            s: self.s * k,
            v: self.v * k,
        }
    }
}

impl Add for Biquaternion {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self {
            s: self.s + o.s,
            v: self.v + o.v,
        }
    }
}

impl Sub for Biquaternion {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self {
            s: self.s - o.s,
            v: self.v - o.v,
        }
    }
}

impl Neg for Biquaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            s: -self.s,
            v: -self.v,
        }
    }
}

impl AddAssign for Biquaternion {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Biquaternion {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl std::iter::Sum for Biquaternion {
    fn sum<It: Iterator<Item = Self>>(iter: It) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl From<Complex> for Biquaternion {
    fn from(s: Complex) -> Self {
        Self::scalar(s)
    }
}

impl From<Vec3C> for Biquaternion {
    fn from(v: Vec3C) -> Self {
        Self::vector(v)
    }
}

impl fmt::Display for Biquaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}) + [({}), ({}), ({})]",
            self.s, self.v.x, self.v.y, self.v.z
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(i: usize) -> Biquaternion {
        Biquaternion::vector(Vec3C::unit(i))
    }

    fn hyperbolic(theta: f64, axis: [f64; 3]) -> (Biquaternion, Biquaternion) {
        let v = Vec3C::from_re_im([0.0; 3], axis);
        let u = Biquaternion {
            s: c(theta.cosh(), 0.0),
            v: v * theta.sinh(),
        };
        (u, u.conj_complex())
    }

    #[test]
    fn identity_element() {
        let f = Biquaternion {
            s: c(0.0, 2.0),
            v: Vec3C::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)),
        };
        assert_eq!(Biquaternion::ONE * f, f);
        assert_eq!(f * Biquaternion::ONE, f);
    }

    #[test]
    fn unit_vectors_anticommute() {
        assert_eq!(e(0) * e(1), e(2));
        assert_eq!(e(1) * e(0), -e(2));
        assert_ne!(e(0) * e(1), e(1) * e(0));
        assert_eq!(e(0) * e(0), -Biquaternion::ONE);
    }

    #[test]
    fn hyperbolic_unit_times_its_conjugate_is_one() {
        let (u, ubar) = hyperbolic(0.5, [0.0, 0.0, 1.0]);
        assert!((u * ubar).max_abs_diff(Biquaternion::ONE) <= 1e-15);
    }

    #[test]
    fn complex_conjugation() {
        let b = Biquaternion {
            s: I,
            v: Vec3C::new(c(0.0, 0.0), I, c(1.0, 0.0)),
        };
        let expect = Biquaternion {
            s: -I,
            v: Vec3C::new(c(0.0, 0.0), -I, c(1.0, 0.0)),
        };
        assert_eq!(b.conj_complex(), expect);
        let real = Biquaternion {
            s: c(3.0, 0.0),
            v: Vec3C::real([1.0, -2.0, 0.5]),
        };
        assert_eq!(real.conj_complex(), real);
    }

    #[test]
    fn quaternion_conjugation() {
        // f + iF with real f, F is selfconjugate
        let b = Biquaternion {
            s: c(1.5, 0.0),
            v: Vec3C::from_re_im([0.0; 3], [1.0, -2.0, 3.0]),
        };
        assert!(b.is_selfconjugate(0.0));
        assert_eq!(e(0).conj_quat(), -e(0));
        let b = Biquaternion {
            s: c(0.0, 2.0),
            v: Vec3C::unit(0),
        };
        let expect = Biquaternion {
            s: c(0.0, -2.0),
            v: -Vec3C::unit(0),
        };
        assert_eq!(b.conj_quat(), expect);
    }

    #[test]
    fn scalar_product_is_bilinear() {
        let a = Biquaternion::ONE + e(0);
        assert_eq!(a.scalar_product(a), c(2.0, 0.0));
        let i = Biquaternion::scalar(I);
        assert_eq!(i.scalar_product(i), c(-1.0, 0.0));
        assert_eq!(a.scalar_product(Biquaternion::ZERO), c(0.0, 0.0));
    }

    #[test]
    fn norms_examples() {
        let b = Biquaternion {
            s: I,
            v: Vec3C::unit(0),
        };
        let n = b.norms();
        assert!((n.norm - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(n.pseudonorm_sq, 0.0);
        assert_eq!(Biquaternion::event(5.0, [3.0, 0.0, 4.0]).pseudonorm_sq(), 0.0);
        assert_eq!(
            Biquaternion::ZERO.norms(),
            Norms {
                norm: 0.0,
                pseudonorm_sq: 0.0
            }
        );
    }

    #[test]
    fn checked_constructor_rejects_nan() {
        assert!(Biquaternion::new(c(f64::NAN, 0.0), Vec3C::ZERO).is_err());
        assert!(Biquaternion::new(c(0.0, 0.0), Vec3C::real([0.0, f64::INFINITY, 0.0])).is_err());
        assert!(Biquaternion::new(I, Vec3C::unit(2)).is_ok());
    }

    #[test]
    fn event_identities() {
        let z = Biquaternion::event(0.7, [0.1, -1.2, 2.0]);
        let zbar = z.conj_complex();
        assert_eq!(z.conj_quat(), z);
        let p = z * zbar;
        assert!((p.s.re - z.pseudonorm_sq()).abs() < 1e-14);
        assert!(p.v.max_abs() < 1e-14 && p.s.im.abs() < 1e-14);
    }

    fn cpx() -> impl Strategy<Value = Complex> {
        (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(a, b)| c(a, b))
    }

    fn biq() -> impl Strategy<Value = Biquaternion> {
        (cpx(), cpx(), cpx(), cpx()).prop_map(|(s, x, y, z)| Biquaternion {
            s,
            v: Vec3C::new(x, y, z),
        })
    }

    fn scale(bs: &[Biquaternion]) -> f64 {
        1.0 + bs.iter().map(|b| b.norm()).product::<f64>()
    }

    proptest! {
        #[test]
        fn associative(a in biq(), b in biq(), d in biq()) {
            let r = ((a * b) * d).max_abs_diff(a * (b * d));
            prop_assert!(r <= 1e-12 * scale(&[a, b, d]));
        }

        #[test]
        fn distributive(a in biq(), b in biq(), d in biq()) {
            let tol = 1e-12 * (1.0 + a.norm() * (b.norm() + d.norm()));
            prop_assert!((a * (b + d)).max_abs_diff(a * b + a * d) <= tol);
            prop_assert!(((b + d) * a).max_abs_diff(b * a + d * a) <= tol);
        }

        #[test]
        fn scalar_multiplication_commutes_with_product(a in biq(), b in biq(), k in cpx()) {
            let tol = 1e-12 * (1.0 + a.norm() * b.norm() * k.norm());
            prop_assert!(((a * k) * b).max_abs_diff((a * b) * k) <= tol);
            prop_assert!((a * (b * k)).max_abs_diff((a * b) * k) <= tol);
        }

        #[test]
        fn conjugations_are_involutions(a in biq()) {
            prop_assert_eq!(a.conj_complex().conj_complex(), a);
            prop_assert_eq!(a.conj_quat().conj_quat(), a);
            prop_assert_eq!(a + Biquaternion::ZERO, a);
        }

        #[test]
        fn quaternion_conjugate_reverses_products(a in biq(), b in biq()) {
            let r = (a * b).conj_quat().max_abs_diff(b.conj_quat() * a.conj_quat());
            prop_assert!(r <= 1e-12 * scale(&[a, b]));
        }

        #[test]
        fn hyperbolic_pair(theta in -3.0..3.0f64, u in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)) {
            let n = (u.0 * u.0 + u.1 * u.1 + u.2 * u.2).sqrt();
            prop_assume!(n > 1e-3);
            let (uu, ubar) = hyperbolic(theta, [u.0 / n, u.1 / n, u.2 / n]);
            prop_assert!((uu * ubar).max_abs_diff(Biquaternion::ONE) <= 1e-12 * uu.norm() * ubar.norm());
        }
    }
}
