//! Periodic Cartesian grids of field values and their discrete derivatives.
//!
//! All three axes share `n` points with spacing `h`. Point `(i1, i2, i3)`
//! sits at `((i1 − n/2)h, (i2 − n/2)h, (i3 − n/2)h)`, so the origin is a grid
//! point near the middle of the box. Storage is x-fastest:
//! `index = i1 + n·(i2 + n·i3)`.

mod dump;
mod ops;
mod stack;

pub(crate) use ops::{map_neighbours, nabla_at};
pub use dump::{read_dump, write_dump, DumpHeader, DUMP_MAGIC};
pub use ops::{
    divergence_by, laplacian, partial, quaternion_derivative, second_time_derivative,
    spatial_derivatives, tensor_divergence, time_derivative, FieldValue, SpatialDerivatives,
    Stencil, Tensor3,
};
pub(crate) use ops::nabla_product;
pub use stack::{bigradient, bigradient_at, bigradient_stack, wave_operator, SampleStack, Sign};

use rayon::prelude::*;

use crate::algebra::{Biquaternion, Complex, Vec3C};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    n: usize,
    h: f64,
}

impl Grid {
    pub const MIN_POINTS: usize = 8;

    pub fn new(n: usize, h: f64) -> Result<Self> {
        if n < Self::MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "n = {n} is below the minimum of {}",
                Self::MIN_POINTS
            )));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing h = {h} must be positive")));
        }
        Ok(Self { n, h })
    }

    /// Grid of `n` points spanning a periodic box of side `extent`.
    pub fn with_extent(n: usize, extent: f64) -> Result<Self> {
        Self::new(n, extent / n as f64)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn extent(&self) -> f64 {
        self.n as f64 * self.h
    }

    #[inline]
    pub fn index(&self, i: [usize; 3]) -> usize {
        i[0] + self.n * (i[1] + self.n * i[2])
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx % n, (idx / n) % n, idx / (n * n)]
    }

    #[inline]
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let i = self.coords(idx);
        let half = (self.n / 2) as f64;
        [
            (i[0] as f64 - half) * self.h,
            (i[1] as f64 - half) * self.h,
            (i[2] as f64 - half) * self.h,
        ]
    }

    /// Index of the neighbour `offset` steps along `axis`, wrapping periodically.
    #[inline]
    pub fn shifted(&self, i: [usize; 3], axis: usize, offset: isize) -> usize {
        let mut j = i;
        let n = self.n as isize;
        j[axis] = (i[axis] as isize + offset).rem_euclid(n) as usize;
        self.index(j)
    }

    /// Maps a physical coordinate onto the periodic box, returning the
    /// fractional grid coordinate in `[0, n)`.
    #[inline]
    pub fn fractional(&self, x: f64) -> f64 {
        let u = x / self.h + (self.n / 2) as f64;
        u.rem_euclid(self.n as f64)
    }
}

/// Values of type `T` at every point of a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    grid: Grid,
    data: Vec<T>,
}

pub type BiqField = Field<Biquaternion>;
pub type RealField = Field<f64>;
pub type RealVecField = Field<[f64; 3]>;
pub type ComplexField = Field<Complex>;
pub type CVecField = Field<Vec3C>;

impl<T: Copy + Send + Sync> Field<T> {
    pub fn from_vec(grid: Grid, data: Vec<T>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                data.len()
            )));
        }
        Ok(Self { grid, data })
    }

    pub fn filled(grid: Grid, value: T) -> Self {
        Self {
            grid,
            data: vec![value; grid.len()],
        }
    }

    /// Samples `f` at every grid position.
    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn([f64; 3]) -> T + Sync,
    {
        let data = (0..grid.len())
            .into_par_iter()
            .map(|idx| f(grid.position(idx)))
            .collect();
        Self { grid, data }
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    #[inline]
    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn get(&self, idx: usize) -> T {
        self.data[idx]
    }

    pub fn map<U, F>(&self, f: F) -> Field<U>
    where
        U: Copy + Send + Sync,
        F: Fn(T) -> U + Sync,
    {
        Field {
            grid: self.grid,
            data: self.data.par_iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map<U, V, F>(&self, other: &Field<U>, f: F) -> Result<Field<V>>
    where
        U: Copy + Send + Sync,
        V: Copy + Send + Sync,
        F: Fn(T, U) -> V + Sync,
    {
        ensure_same_grid(self.grid, other.grid, "zip_map operands")?;
        Ok(Field {
            grid: self.grid,
            data: self
                .data
                .par_iter()
                .zip(other.data.par_iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Deterministic reduction of `f` over all points, in index order.
    pub fn sum_by<F>(&self, f: F) -> f64
    where
        F: Fn(T) -> f64 + Sync,
    {
        const CHUNK: usize = 4096;
        let partial: Vec<f64> = self
            .data
            .par_chunks(CHUNK)
            .map(|chunk| chunk.iter().map(|&v| f(v)).sum::<f64>())
            .collect();
        partial.iter().sum()
    }

    pub fn max_by<F>(&self, f: F) -> f64
    where
        F: Fn(T) -> f64 + Sync,
    {
        self.data
            .par_iter()
            .map(|&v| f(v))
            .reduce(|| 0.0, f64::max)
    }
}

impl BiqField {
    /// Largest absolute component anywhere on the grid.
    pub fn max_abs(&self) -> f64 {
        self.max_by(|b| b.max_abs())
    }

    pub fn max_abs_diff(&self, other: &BiqField) -> Result<f64> {
        Ok(self.zip_map(other, |a, b| a.max_abs_diff(b))?.max_by(|r| r))
    }

    pub fn add(&self, other: &BiqField) -> Result<BiqField> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &BiqField) -> Result<BiqField> {
        self.zip_map(other, |a, b| a - b)
    }

    /// Pointwise product `self ∘ other`.
    pub fn mul(&self, other: &BiqField) -> Result<BiqField> {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn scale(&self, k: Complex) -> BiqField {
        self.map(|a| a * k)
    }

    /// First non-finite entry, if any.
    pub fn find_non_finite(&self) -> Option<usize> {
        self.data.iter().position(|b| !b.is_finite())
    }
}

impl<T: FieldValue> Field<T> {
    /// Trilinear interpolation at a physical point, wrapping periodically.
    pub fn sample_trilinear(&self, x: [f64; 3]) -> T {
        let g = self.grid;
        let n = g.n();
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for k in 0..3 {
            let u = g.fractional(x[k]);
            let i = u.floor();
            base[k] = (i as usize).min(n - 1);
            frac[k] = u - i;
        }
        let next = |i: usize| if i + 1 == n { 0 } else { i + 1 };
        let (i0, j0, k0) = (base[0], base[1], base[2]);
        let (i1, j1, k1) = (next(i0), next(j0), next(k0));
        let [tx, ty, tz] = frac;
        let at = |i, j, k| self.data[g.index([i, j, k])];
        let lerp = |a: T, b: T, t: f64| a * (1.0 - t) + b * t;
        let c00 = lerp(at(i0, j0, k0), at(i1, j0, k0), tx);
        let c10 = lerp(at(i0, j1, k0), at(i1, j1, k0), tx);
        let c01 = lerp(at(i0, j0, k1), at(i1, j0, k1), tx);
        let c11 = lerp(at(i0, j1, k1), at(i1, j1, k1), tx);
        lerp(lerp(c00, c10, ty), lerp(c01, c11, ty), tz)
    }
}

pub(crate) fn ensure_same_grid(a: Grid, b: Grid, what: &'static str) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch(what))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid::new(7, 0.1).is_err());
        assert!(Grid::new(8, 0.0).is_err());
        assert!(Grid::new(8, -1.0).is_err());
        assert!(Grid::new(8, f64::NAN).is_err());
        let g = Grid::new(8, 0.5).unwrap();
        assert_eq!(g.len(), 512);
        assert_eq!(g.extent(), 4.0);
    }

    #[test]
    fn indexing_is_x_fastest() {
        let g = Grid::new(8, 1.0).unwrap();
        assert_eq!(g.index([1, 0, 0]), 1);
        assert_eq!(g.index([0, 1, 0]), 8);
        assert_eq!(g.index([0, 0, 1]), 64);
        for idx in [0, 1, 77, 511] {
            assert_eq!(g.index(g.coords(idx)), idx);
        }
        assert_eq!(g.position(g.index([4, 4, 4])), [0.0, 0.0, 0.0]);
        assert_eq!(g.shifted([7, 0, 0], 0, 1), g.index([0, 0, 0]));
        assert_eq!(g.shifted([0, 0, 0], 2, -2), g.index([0, 0, 6]));
    }

    #[test]
    fn fractional_wraps() {
        let g = Grid::new(8, 0.5).unwrap();
        assert_eq!(g.fractional(0.0), 4.0);
        assert_eq!(g.fractional(-2.0), 0.0);
        assert_eq!(g.fractional(2.0), 0.0);
        assert!((g.fractional(2.25) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn trilinear_is_exact_for_affine_data_and_wraps() {
        let g = Grid::new(8, 0.5).unwrap();
        let f = Field::from_fn(g, |x| 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[2]);
        let x = [0.3, -0.7, 1.1];
        assert!((f.sample_trilinear(x) - (1.0 + 0.6 + 0.7 + 0.55)).abs() < 1e-12);
        let c = Field::from_fn(g, |x| (x[0] * std::f64::consts::PI / 2.0).cos());
        assert!((c.sample_trilinear([0.1, 0.0, 0.0]) - c.sample_trilinear([4.1, 0.0, 0.0])).abs() < 1e-12);
    }

    #[test]
    fn zip_map_rejects_mismatch() {
        let a = RealField::filled(Grid::new(8, 1.0).unwrap(), 1.0);
        let b = RealField::filled(Grid::new(8, 0.5).unwrap(), 1.0);
        assert!(matches!(a.zip_map(&b, |x, y| x + y), Err(Error::GridMismatch(_))));
    }
}
