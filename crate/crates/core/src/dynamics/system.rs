use rayon::prelude::*;

use crate::algebra::{Biquaternion, I};
use crate::egm::Medium;
use crate::fields::{ensure_same_grid, map_neighbours, nabla_at, BiqField, Field, Grid, Stencil};
use crate::{Error, Result};

/// Tension and charge-current of one field.
#[derive(Clone, Debug)]
pub struct FieldState {
    pub a: BiqField,
    pub theta: BiqField,
    pub medium: Medium,
}

impl FieldState {
    pub fn new(a: BiqField, theta: BiqField, medium: Medium) -> Result<Self> {
        ensure_same_grid(a.grid(), theta.grid(), "tension and charge-current")?;
        Ok(Self { a, theta, medium })
    }
}

/// `N` interacting fields, optionally inside a prescribed background tension.
///
/// Field `k` obeys `∂τΘᵏ = i∇∘Θᵏ − κ⁻¹ Θᵏ∘Sᵏ` and `∂τAᵏ = Θᵏ − i∇∘Aᵏ`,
/// where `Sᵏ` sums the tensions of all other fields and the background.
/// The background stays frozen.
#[derive(Clone, Debug)]
pub struct InteractionSystem {
    pub fields: Vec<FieldState>,
    pub background: Option<BiqField>,
    pub kappa: f64,
    pub stencil: Stencil,
    pub tau: f64,
    pub steps: usize,
}

impl InteractionSystem {
    pub fn new(fields: Vec<FieldState>, kappa: f64, stencil: Stencil) -> Result<Self> {
        let first = fields.first().ok_or(Error::Empty("field list"))?;
        let grid = first.a.grid();
        for f in &fields {
            ensure_same_grid(grid, f.a.grid(), "interacting fields")?;
            ensure_same_grid(grid, f.theta.grid(), "interacting fields")?;
        }
        if !(kappa.is_finite() && kappa != 0.0) {
            return Err(Error::InvalidParameter {
                name: "kappa",
                reason: format!("{kappa} must be finite and nonzero"),
            });
        }
        Ok(Self {
            fields,
            background: None,
            kappa,
            stencil,
            tau: 0.0,
            steps: 0,
        })
    }

    /// Freezes `a_ext` as an external tension acting on every field.
    pub fn with_background(mut self, a_ext: BiqField) -> Result<Self> {
        ensure_same_grid(self.grid(), a_ext.grid(), "background tension")?;
        self.background = Some(a_ext);
        Ok(self)
    }

    pub fn grid(&self) -> Grid {
        self.fields[0].a.grid()
    }

    /// Largest admissible step, `h/2`.
    pub fn max_dt(&self) -> f64 {
        0.5 * self.grid().h()
    }

    /// `Sᵏ`, the tension acting on field `k`.
    pub fn partner_tension(&self, k: usize) -> Result<BiqField> {
        partner_sum(&self.fields.iter().map(|f| &f.a).collect::<Vec<_>>(), self.background.as_ref(), k, self.grid())
    }

    /// Advances by one classical Runge-Kutta step.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        let limit = self.max_dt();
        if !(dt.is_finite() && dt > 0.0 && dt <= limit * (1.0 + 1e-12)) {
            return Err(Error::TimeStep { dt, limit });
        }
        let step = self.steps + 1;
        let y0: Vec<(BiqField, BiqField)> =
            self.fields.iter().map(|f| (f.theta.clone(), f.a.clone())).collect();
        let k1 = self.rhs(&y0, step)?;
        let y1 = axpy(&y0, &k1, 0.5 * dt);
        let k2 = self.rhs(&y1, step)?;
        let y2 = axpy(&y0, &k2, 0.5 * dt);
        let k3 = self.rhs(&y2, step)?;
        let y3 = axpy(&y0, &k3, dt);
        let k4 = self.rhs(&y3, step)?;
        for (idx, f) in self.fields.iter_mut().enumerate() {
            let combine = |y: &BiqField, a: &BiqField, b: &BiqField, c: &BiqField, d: &BiqField| {
                let data = (0..y.data().len())
                    .into_par_iter()
                    .map(|i| {
                        y.get(i) + (a.get(i) + (b.get(i) + c.get(i)) * 2.0 + d.get(i)) * (dt / 6.0)
                    })
                    .collect();
                Field::from_vec(y.grid(), data).expect("same grid")
            };
            let (t0, a0) = &y0[idx];
            f.theta = combine(t0, &k1[idx].0, &k2[idx].0, &k3[idx].0, &k4[idx].0);
            f.a = combine(a0, &k1[idx].1, &k2[idx].1, &k3[idx].1, &k4[idx].1);
        }
        check_finite(self.fields.iter().map(|f| (&f.theta, &f.a)), step)?;
        self.tau += dt;
        self.steps = step;
        Ok(())
    }

    fn rhs(&self, y: &[(BiqField, BiqField)], step: usize) -> Result<Vec<(BiqField, BiqField)>> {
        check_finite(y.iter().map(|(t, a)| (t, a)), step)?;
        let tensions: Vec<&BiqField> = y.iter().map(|(_, a)| a).collect();
        let coupled = y.len() > 1 || self.background.is_some();
        let grid = self.grid();
        (0..y.len())
            .map(|k| {
                let (theta, a) = &y[k];
                let s = if coupled {
                    Some(partner_sum(&tensions, self.background.as_ref(), k, grid)?)
                } else {
                    None
                };
                let (st, h) = (self.stencil, grid.h());
                let inv = -1.0 / self.kappa;
                let rt = map_neighbours(theta, |nb| {
                    let free = nabla_at(nb, st, h) * I;
                    match &s {
                        Some(s) => free + nb.at(0, 0) * s.get(nb.index()) * inv,
                        None => free,
                    }
                });
                let ra = map_neighbours(a, |nb| theta.get(nb.index()) - nabla_at(nb, st, h) * I);
                Ok((rt, ra))
            })
            .collect()
    }
}

/// Functional form of [`InteractionSystem::step`].
pub fn step_interaction(sys: &InteractionSystem, dt: f64) -> Result<InteractionSystem> {
    let mut next = sys.clone();
    next.step(dt)?;
    Ok(next)
}

fn partner_sum(
    tensions: &[&BiqField],
    background: Option<&BiqField>,
    k: usize,
    grid: Grid,
) -> Result<BiqField> {
    let data = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let mut s = background.map_or(Biquaternion::ZERO, |b| b.get(i));
            for (m, a) in tensions.iter().enumerate() {
                if m != k {
                    s += a.get(i);
                }
            }
            s
        })
        .collect();
    Field::from_vec(grid, data)
}

fn axpy(y: &[(BiqField, BiqField)], k: &[(BiqField, BiqField)], dt: f64) -> Vec<(BiqField, BiqField)> {
    let go = |a: &BiqField, b: &BiqField| {
        let data = (0..a.data().len()).into_par_iter().map(|i| a.get(i) + b.get(i) * dt).collect();
        Field::from_vec(a.grid(), data).expect("same grid")
    };
    y.iter().zip(k).map(|((t, a), (kt, ka))| (go(t, kt), go(a, ka))).collect()
}

fn check_finite<'a>(
    fields: impl Iterator<Item = (&'a BiqField, &'a BiqField)>,
    step: usize,
) -> Result<()> {
    for (k, (theta, a)) in fields.enumerate() {
        for (name, f) in [("theta", theta), ("a", a)] {
            if let Some(index) = f.find_non_finite() {
                return Err(Error::NanDetected {
                    step,
                    field: format!("{name}[{k}]"),
                    index,
                });
            }
        }
    }
    Ok(())
}
