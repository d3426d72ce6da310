use rayon::prelude::*;

use super::ops::{map_neighbours, nabla_product, second_time_derivative, time_derivative, Stencil};
use super::{ensure_same_grid, BiqField, Field, Grid};
use crate::algebra::{Biquaternion, I};
use crate::{Error, Result};

/// Which of the two bigradients `∇± = ∂τ ± i∇` to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    #[inline]
    pub fn opposite(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Consecutive time slices `F(τ0 + k·dτ)` of a field on a common grid.
#[derive(Clone, Debug)]
pub struct SampleStack {
    slices: Vec<BiqField>,
    tau0: f64,
    dtau: f64,
}

impl SampleStack {
    pub const MIN_SLICES: usize = 3;

    pub fn new(slices: Vec<BiqField>, tau0: f64, dtau: f64) -> Result<Self> {
        if slices.len() < Self::MIN_SLICES {
            return Err(Error::InsufficientSlices {
                needed: Self::MIN_SLICES,
                got: slices.len(),
            });
        }
        if !(dtau.is_finite() && dtau > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dtau",
                reason: format!("{dtau} must be positive"),
            });
        }
        let grid = slices[0].grid();
        for s in &slices[1..] {
            ensure_same_grid(grid, s.grid(), "stack slices")?;
        }
        Ok(Self { slices, tau0, dtau })
    }

    /// Samples `f(τ, x)` on `len` slices starting at `tau0`.
    pub fn from_fn<F>(grid: Grid, tau0: f64, dtau: f64, len: usize, f: F) -> Result<Self>
    where
        F: Fn(f64, [f64; 3]) -> Biquaternion + Sync,
    {
        let slices = (0..len)
            .map(|k| {
                let tau = tau0 + k as f64 * dtau;
                Field::from_fn(grid, |x| f(tau, x))
            })
            .collect();
        Self::new(slices, tau0, dtau)
    }

    /// Stack of `len` slices centred on `tau_center`.
    pub fn centered_from_fn<F>(
        grid: Grid,
        tau_center: f64,
        dtau: f64,
        len: usize,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(f64, [f64; 3]) -> Biquaternion + Sync,
    {
        let tau0 = tau_center - ((len.max(1) - 1) / 2) as f64 * dtau;
        Self::from_fn(grid, tau0, dtau, len, f)
    }

    pub fn grid(&self) -> Grid {
        self.slices[0].grid()
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn dtau(&self) -> f64 {
        self.dtau
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn tau_at(&self, k: usize) -> f64 {
        self.tau0 + k as f64 * self.dtau
    }

    /// Index of the middle slice (the earlier one for even lengths).
    pub fn center(&self) -> usize {
        (self.slices.len() - 1) / 2
    }

    pub fn slice(&self, k: usize) -> &BiqField {
        &self.slices[k]
    }

    pub fn slices(&self) -> &[BiqField] {
        &self.slices
    }

    pub fn into_slices(self) -> Vec<BiqField> {
        self.slices
    }

    /// Centered `∂τF` at slice `k`.
    pub fn time_derivative_at(&self, k: usize, stencil: Stencil) -> Result<BiqField> {
        time_derivative(&self.slices, k, self.dtau, stencil)
    }

    /// Centered `∂²τF` at slice `k`.
    pub fn second_time_derivative_at(&self, k: usize, stencil: Stencil) -> Result<BiqField> {
        second_time_derivative(&self.slices, k, self.dtau, stencil)
    }

    /// Four-point Lagrange weights (three for a three-slice stack) for time
    /// `tau`, returned with the index of the first slice used. Times outside
    /// the stack are extrapolated from the nearest window.
    pub fn time_weights(&self, tau: f64) -> (usize, [f64; 4]) {
        let m = self.slices.len().min(4);
        let s = (tau - self.tau0) / self.dtau;
        let start = (s.floor() as isize - (m as isize - 1) / 2)
            .clamp(0, (self.slices.len() - m) as isize) as usize;
        let mut w = [0.0; 4];
        for (a, wa) in w.iter_mut().enumerate().take(m) {
            let mut p = 1.0;
            for b in 0..m {
                if b != a {
                    p *= (s - (start + b) as f64) / (a as f64 - b as f64);
                }
            }
            *wa = p;
        }
        (start, w)
    }

    /// The field interpolated in time to `tau`.
    pub fn snapshot(&self, tau: f64) -> BiqField {
        let (start, w) = self.time_weights(tau);
        let m = self.slices.len().min(4);
        let grid = self.grid();
        let out = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                (0..m)
                    .map(|a| self.slices[start + a].get(idx) * w[a])
                    .sum()
            })
            .collect();
        Field::from_vec(grid, out).expect("same grid")
    }

    /// Value at `(tau, x)`: Lagrange in time, trilinear in space.
    pub fn sample(&self, tau: f64, x: [f64; 3]) -> Biquaternion {
        let (start, w) = self.time_weights(tau);
        let m = self.slices.len().min(4);
        (0..m)
            .map(|a| self.slices[start + a].sample_trilinear(x) * w[a])
            .sum()
    }

    /// Time of the last slice.
    pub fn tau_end(&self) -> f64 {
        self.tau_at(self.slices.len() - 1)
    }

    /// Applies `f` to every slice, keeping the time axis.
    pub fn map<T, F>(&self, f: F) -> Vec<Field<T>>
    where
        T: Copy + Send + Sync,
        F: Fn(Biquaternion) -> T + Sync,
    {
        self.slices.iter().map(|s| s.map(&f)).collect()
    }
}

/// `∇±F = ∂τF ± i∇∘F` at slice `k`.
pub fn bigradient_at(stack: &SampleStack, k: usize, sign: Sign, stencil: Stencil) -> Result<BiqField> {
    let dt = stack.time_derivative_at(k, stencil)?;
    let f = stack.slice(k);
    let h = stack.grid().h();
    let coeff = I * sign.factor();
    let nabla = map_neighbours(f, |nb| nabla_product([0, 1, 2].map(|axis| stencil.first(|o| nb.at(axis, o), h))));
    dt.zip_map(&nabla, |d, q| d + q * coeff)
}

/// `∇±F` at the central slice of the stack.
pub fn bigradient(stack: &SampleStack, sign: Sign, stencil: Stencil) -> Result<BiqField> {
    bigradient_at(stack, stack.center(), sign, stencil)
}

/// `∇±F` at every slice where the time stencil fits. The result holds slices
/// `r..len−r` with `r` the stencil radius, so it keeps the spacing of the input.
pub fn bigradient_stack(stack: &SampleStack, sign: Sign, stencil: Stencil) -> Result<SampleStack> {
    let r = stencil.radius();
    let slices = (r..stack.len().saturating_sub(r))
        .map(|k| bigradient_at(stack, k, sign, stencil))
        .collect::<Result<Vec<_>>>()?;
    SampleStack::new(slices, stack.tau_at(r), stack.dtau())
}

/// `□F = ∂²τF − ΔF` at the central slice.
pub fn wave_operator(stack: &SampleStack, stencil: Stencil) -> Result<BiqField> {
    let k = stack.center();
    let dtt = stack.second_time_derivative_at(k, stencil)?;
    let lap = super::ops::laplacian(stack.slice(k), stencil);
    dtt.sub(&lap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Complex, Vec3C};
    use std::f64::consts::TAU;

    fn wave(tau: f64, x: [f64; 3]) -> Biquaternion {
        // Circularly polarised wave along x1.
        let ph = Complex::new(0.0, x[0] - tau).exp();
        Biquaternion::vector(Vec3C::new(Complex::new(0.0, 0.0), ph, I * ph))
    }

    #[test]
    fn stack_validation() {
        let g = Grid::new(8, 0.1).unwrap();
        let f = BiqField::filled(g, Biquaternion::ZERO);
        assert!(matches!(
            SampleStack::new(vec![f.clone(), f.clone()], 0.0, 0.1),
            Err(Error::InsufficientSlices { needed: 3, got: 2 })
        ));
        assert!(SampleStack::new(vec![f.clone(); 3], 0.0, 0.0).is_err());
        let other = BiqField::filled(Grid::new(8, 0.2).unwrap(), Biquaternion::ZERO);
        assert!(matches!(
            SampleStack::new(vec![f.clone(), f.clone(), other], 0.0, 0.1),
            Err(Error::GridMismatch(_))
        ));
        let s = SampleStack::new(vec![f; 3], 0.0, 0.1).unwrap();
        assert!(matches!(
            bigradient(&s, Sign::Plus, Stencil::Fourth),
            Err(Error::InsufficientSlices { needed: 5, .. })
        ));
    }

    #[test]
    fn circular_wave_is_annihilated_by_plus_bigradient() {
        // ∇∘A = A and ∂τA = −iA for the circular wave, so ∇⁺A = 0.
        let g = Grid::with_extent(32, TAU).unwrap();
        let h = g.h();
        let st = SampleStack::centered_from_fn(g, 0.3, h / 2.0, 5, wave).unwrap();
        let r = bigradient(&st, Sign::Plus, Stencil::Fourth).unwrap();
        assert!(r.max_abs() < 1e-4, "residual {}", r.max_abs());
        let m = bigradient(&st, Sign::Minus, Stencil::Fourth).unwrap();
        assert!(m.max_abs() > 1.0);
    }

    #[test]
    fn wave_operator_vanishes_on_light_cone_profile() {
        let g = Grid::with_extent(32, TAU).unwrap();
        let st = SampleStack::centered_from_fn(g, 0.0, g.h() / 2.0, 5, wave).unwrap();
        let w = wave_operator(&st, Stencil::Fourth).unwrap();
        assert!(w.max_abs() < 1e-4);
    }

    #[test]
    fn cubic_time_interpolation_is_exact_for_cubics() {
        let g = Grid::new(8, 0.5).unwrap();
        let f = |t: f64| t * t * t - 2.0 * t + 0.5;
        let st = SampleStack::from_fn(g, 0.0, 0.25, 6, |t, _| Biquaternion::scalar(Complex::new(f(t), 0.0))).unwrap();
        for t in [0.0, 0.1, 0.6, 1.2, 1.25] {
            let v = st.sample(t, [0.2, 0.3, -0.1]).s.re;
            assert!((v - f(t)).abs() < 1e-12, "t = {t}");
            assert!((st.snapshot(t).get(5).s.re - f(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn bigradient_stack_keeps_spacing() {
        let g = Grid::new(8, 0.5).unwrap();
        let st = SampleStack::from_fn(g, 1.0, 0.1, 7, wave).unwrap();
        let b = bigradient_stack(&st, Sign::Plus, Stencil::Second).unwrap();
        assert_eq!(b.len(), 5);
        assert!((b.tau0() - 1.1).abs() < 1e-15);
        assert_eq!(b.dtau(), 0.1);
    }
}
