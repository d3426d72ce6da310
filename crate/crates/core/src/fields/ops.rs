use std::ops::{Add, Mul, Sub};

use rayon::prelude::*;

use super::Field;
use crate::algebra::{Biquaternion, Complex, Vec3C};
use crate::{Error, Result};

/// Centered finite-difference stencil, second or fourth order accurate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Stencil {
    #[default]
    Second,
    Fourth,
}

impl Stencil {
    pub fn from_order(order: u32) -> Result<Self> {
        match order {
            2 => Ok(Stencil::Second),
            4 => Ok(Stencil::Fourth),
            _ => Err(Error::InvalidParameter {
                name: "order",
                reason: format!("{order} is not 2 or 4"),
            }),
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Stencil::Second => 2,
            Stencil::Fourth => 4,
        }
    }

    /// Number of neighbours used on each side.
    pub fn radius(self) -> usize {
        match self {
            Stencil::Second => 1,
            Stencil::Fourth => 2,
        }
    }

    /// First derivative from samples at offsets `-r..=r`, spacing `h`.
    #[inline]
    pub(crate) fn first<T: FieldValue>(self, f: impl Fn(isize) -> T, h: f64) -> T {
        match self {
            Stencil::Second => (f(1) - f(-1)) * (0.5 / h),
            Stencil::Fourth => {
                ((f(1) - f(-1)) * 8.0 - (f(2) - f(-2))) * (1.0 / (12.0 * h))
            }
        }
    }

    /// Second derivative from samples at offsets `-r..=r`, spacing `h`.
    #[inline]
    pub(crate) fn second<T: FieldValue>(self, f: impl Fn(isize) -> T, h: f64) -> T {
        match self {
            Stencil::Second => (f(1) + f(-1) - f(0) * 2.0) * (1.0 / (h * h)),
            Stencil::Fourth => {
                ((f(1) + f(-1)) * 16.0 - (f(2) + f(-2)) - f(0) * 30.0) * (1.0 / (12.0 * h * h))
            }
        }
    }
}

/// Values that can be differenced on a grid.
pub trait FieldValue:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    const ZERO: Self;
}

impl FieldValue for f64 {
    const ZERO: Self = 0.0;
}

impl FieldValue for Complex {
    const ZERO: Self = Complex::new(0.0, 0.0);
}

impl FieldValue for Vec3C {
    const ZERO: Self = Vec3C::ZERO;
}

impl FieldValue for Biquaternion {
    const ZERO: Self = Biquaternion::ZERO;
}

/// Real 3×3 tensor, `t.0[i][k]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Tensor3(pub [[f64; 3]; 3]);

impl Add for Tensor3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut r = self.0;
        for (row, orow) in r.iter_mut().zip(o.0) {
            for (a, b) in row.iter_mut().zip(orow) {
                *a += b;
            }
        }
        Tensor3(r)
    }
}

impl Sub for Tensor3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + o * -1.0
    }
}

impl Mul<f64> for Tensor3 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Tensor3(self.0.map(|row| row.map(|a| a * k)))
    }
}

impl FieldValue for Tensor3 {
    const ZERO: Self = Tensor3([[0.0; 3]; 3]);
}

/// Periodic neighbours of one grid point, up to two steps along each axis.
pub(crate) struct Neighbours<'a, T> {
    data: &'a [T],
    i: usize,
    base: usize,
    wx: &'a [usize; 5],
    yb: [usize; 5],
    zb: [usize; 5],
}

impl<T: Copy> Neighbours<'_, T> {
    /// Flat index of the point itself.
    #[inline(always)]
    pub(crate) fn index(&self) -> usize {
        self.base + self.i
    }

    /// The value `off` steps along `axis`, `|off| ≤ 2`.
    #[inline(always)]
    pub(crate) fn at(&self, axis: usize, off: isize) -> T {
        let s = (off + 2) as usize;
        match axis {
            0 => self.data[self.base + self.wx[s]],
            1 => self.data[self.yb[s] + self.i],
            _ => self.data[self.zb[s] + self.i],
        }
    }
}

/// Maps every point of `field` through `f` of its neighbourhood. Points are
/// visited row by row along `x` so periodic wrapping is resolved per row.
pub(crate) fn map_neighbours<T, U, F>(field: &Field<T>, f: F) -> Field<U>
where
    T: Copy + Send + Sync,
    U: Copy + Send + Sync,
    F: Fn(&Neighbours<'_, T>) -> U + Sync,
{
    let grid = field.grid();
    let n = grid.n();
    let data = field.data();
    let wrap = |i: usize| -> [usize; 5] { [-2isize, -1, 0, 1, 2].map(|o| (i as isize + o).rem_euclid(n as isize) as usize) };
    let wx: Vec<[usize; 5]> = (0..n).map(wrap).collect();
    let (wx, f) = (&wx, &f);
    let out = (0..n * n)
        .into_par_iter()
        .flat_map_iter(|row| {
            let (j, k) = (row % n, row / n);
            let yb = wrap(j).map(|jj| n * (jj + n * k));
            let zb = wrap(k).map(|kk| n * (j + n * kk));
            (0..n).map(move |i| {
                f(&Neighbours {
                    data,
                    i,
                    base: n * row,
                    wx: &wx[i],
                    yb,
                    zb,
                })
            })
        })
        .collect();
    Field::from_vec(grid, out).expect("same grid")
}

/// `∂f/∂x_axis` with periodic wrap.
pub fn partial<T: FieldValue>(field: &Field<T>, axis: usize, stencil: Stencil) -> Field<T> {
    assert!(axis < 3, "axis {axis} out of range");
    let h = field.grid().h();
    map_neighbours(field, |nb| stencil.first(|o| nb.at(axis, o), h))
}

/// Sum of the three second partials.
pub fn laplacian<T: FieldValue>(field: &Field<T>, stencil: Stencil) -> Field<T> {
    let h = field.grid().h();
    map_neighbours(field, |nb| {
        let mut acc = T::ZERO;
        for axis in 0..3 {
            acc = acc + stencil.second(|o| nb.at(axis, o), h);
        }
        acc
    })
}

/// The three first partials of a field.
#[derive(Clone, Debug)]
pub struct SpatialDerivatives<T> {
    pub d: [Field<T>; 3],
}

pub fn spatial_derivatives<T: FieldValue>(
    field: &Field<T>,
    stencil: Stencil,
) -> SpatialDerivatives<T> {
    SpatialDerivatives {
        d: [0, 1, 2].map(|axis| partial(field, axis, stencil)),
    }
}

/// `∇∘F = Σ_k e_k ∘ ∂_k F`, which for `F = f + F⃗` is
/// `−div F⃗ + grad f + rot F⃗`.
pub fn quaternion_derivative(field: &Field<Biquaternion>, stencil: Stencil) -> Field<Biquaternion> {
    let h = field.grid().h();
    map_neighbours(field, |nb| nabla_at(nb, stencil, h))
}

/// `∇∘F` at the centre of `nb`.
#[inline(always)]
pub(crate) fn nabla_at(nb: &Neighbours<'_, Biquaternion>, stencil: Stencil, h: f64) -> Biquaternion {
    nabla_product([0, 1, 2].map(|axis| stencil.first(|o| nb.at(axis, o), h)))
}

/// `Σ_k e_k ∘ d_k` for given partials `d_k` of a biquaternion.
#[inline]
pub(crate) fn nabla_product(d: [Biquaternion; 3]) -> Biquaternion {
    let div = d[0].v.x + d[1].v.y + d[2].v.z;
    let grad = Vec3C::new(d[0].s, d[1].s, d[2].s);
    let rot = Vec3C::new(
        d[1].v.z - d[2].v.y,
        d[2].v.x - d[0].v.z,
        d[0].v.y - d[1].v.x,
    );
    Biquaternion {
        s: -div,
        v: grad + rot,
    }
}

/// `Σ_k ∂_k comp(f, k)` for any field carrying a 3-vector.
pub fn divergence_by<T, U, C>(field: &Field<T>, stencil: Stencil, comp: C) -> Field<U>
where
    T: Copy + Send + Sync,
    U: FieldValue,
    C: Fn(T, usize) -> U + Sync,
{
    let h = field.grid().h();
    map_neighbours(field, |nb| {
        let mut acc = U::ZERO;
        for k in 0..3 {
            acc = acc + stencil.first(|o| comp(nb.at(k, o), k), h);
        }
        acc
    })
}

/// Centered first time derivative at slice `k` of equally spaced slices.
pub fn time_derivative<T: FieldValue>(
    slices: &[Field<T>],
    k: usize,
    dtau: f64,
    stencil: Stencil,
) -> Result<Field<T>> {
    time_stencil(slices, k, stencil, |f| stencil.first(f, dtau))
}

/// Centered second time derivative at slice `k`.
pub fn second_time_derivative<T: FieldValue>(
    slices: &[Field<T>],
    k: usize,
    dtau: f64,
    stencil: Stencil,
) -> Result<Field<T>> {
    time_stencil(slices, k, stencil, |f| stencil.second(f, dtau))
}

fn time_stencil<T, D>(slices: &[Field<T>], k: usize, stencil: Stencil, apply: D) -> Result<Field<T>>
where
    T: FieldValue,
    D: Fn(&dyn Fn(isize) -> T) -> T + Sync,
{
    let r = stencil.radius();
    if k < r || k + r >= slices.len() {
        return Err(Error::InsufficientSlices {
            needed: 2 * r + 1,
            got: slices.len(),
        });
    }
    let grid = slices[k].grid();
    for s in &slices[k - r..=k + r] {
        super::ensure_same_grid(grid, s.grid(), "time slices")?;
    }
    let out = (0..grid.len())
        .into_par_iter()
        .map(|idx| apply(&|o| slices[(k as isize + o) as usize].get(idx)))
        .collect();
    Field::from_vec(grid, out)
}

/// Row divergence `(div σ)_i = Σ_k ∂_k σ_ik`.
pub fn tensor_divergence(field: &Field<Tensor3>, stencil: Stencil) -> Field<[f64; 3]> {
    let h = field.grid().h();
    map_neighbours(field, |nb| {
        let mut r = [0.0; 3];
        for k in 0..3 {
            let dk = stencil.first(|o| nb.at(k, o), h);
            for (ri, row) in r.iter_mut().zip(dk.0) {
                *ri += row[k];
            }
        }
        r
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid;
    use crate::algebra::I;
    use std::f64::consts::TAU;

    fn periodic_grid(n: usize) -> Grid {
        Grid::with_extent(n, TAU).unwrap()
    }

    fn max_err(a: &Field<f64>, f: impl Fn([f64; 3]) -> f64) -> f64 {
        let g = a.grid();
        (0..g.len())
            .map(|i| (a.get(i) - f(g.position(i))).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn partial_of_sine_converges_at_stencil_order() {
        for (stencil, expected) in [(Stencil::Second, 2.0), (Stencil::Fourth, 4.0)] {
            let errs: Vec<f64> = [16, 32]
                .iter()
                .map(|&n| {
                    let f = Field::from_fn(periodic_grid(n), |x| (x[1]).sin() * (2.0 * x[0]).cos());
                    let d = partial(&f, 1, stencil);
                    max_err(&d, |x| x[1].cos() * (2.0 * x[0]).cos())
                })
                .collect();
            let rate = (errs[0] / errs[1]).log2();
            assert!((rate - expected).abs() < 0.2, "{stencil:?}: rate {rate}");
        }
    }

    #[test]
    fn laplacian_of_plane_wave() {
        let g = periodic_grid(32);
        let f = Field::from_fn(g, |x| (x[0] + 2.0 * x[2]).sin());
        let lap = laplacian(&f, Stencil::Fourth);
        assert!(max_err(&lap, |x| -5.0 * (x[0] + 2.0 * x[2]).sin()) < 2e-3);
    }

    #[test]
    fn quaternion_derivative_matches_div_grad_rot() {
        let g = periodic_grid(32);
        // F = sin(y) + (0, sin(x), cos(z)) i: div = -sin z i, grad = cos y e2, rot = (0,0,cos x) i.
        let f = Field::from_fn(g, |x| Biquaternion {
            s: Complex::new(x[1].sin(), 0.0),
            v: Vec3C::new(
                Complex::new(0.0, 0.0),
                I * x[0].sin(),
                I * x[2].cos(),
            ),
        });
        let d = quaternion_derivative(&f, Stencil::Fourth);
        for idx in (0..g.len()).step_by(97) {
            let x = g.position(idx);
            let want = Biquaternion {
                s: I * x[2].sin(),
                v: Vec3C::new(
                    Complex::new(0.0, 0.0),
                    Complex::new(x[1].cos(), 0.0),
                    I * x[0].cos(),
                ),
            };
            assert!(d.get(idx).max_abs_diff(want) < 1e-3);
        }
    }

    #[test]
    fn nabla_product_agrees_with_biquaternion_product() {
        let d = [
            Biquaternion::from_components([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]),
            Biquaternion::from_components([-1.0, 0.5, 2.0, 0.0, 1.0, -3.0, 0.2, 0.1]),
            Biquaternion::from_components([0.3, 0.0, -2.0, 1.0, 0.0, 4.0, 1.5, -1.0]),
        ];
        let via_mul: Biquaternion = (0..3)
            .map(|k| Biquaternion::vector(Vec3C::unit(k)) * d[k])
            .sum();
        assert!(nabla_product(d).max_abs_diff(via_mul) < 1e-14);
    }

    #[test]
    fn tensor_divergence_of_diagonal() {
        let g = periodic_grid(32);
        let t = Field::from_fn(g, |x| {
            Tensor3([[x[0].sin(), 0.0, 0.0], [0.0, 0.0, x[2].cos()], [0.0, 0.0, 0.0]])
        });
        let d = tensor_divergence(&t, Stencil::Fourth);
        for idx in (0..g.len()).step_by(61) {
            let x = g.position(idx);
            let r = d.get(idx);
            assert!((r[0] - x[0].cos()).abs() < 1e-3);
            assert!((r[1] + x[2].sin()).abs() < 1e-3);
            assert!(r[2].abs() < 1e-12);
        }
    }

    #[test]
    fn stencil_from_order() {
        assert_eq!(Stencil::from_order(2).unwrap(), Stencil::Second);
        assert_eq!(Stencil::from_order(4).unwrap().radius(), 2);
        assert!(Stencil::from_order(3).is_err());
    }
}
