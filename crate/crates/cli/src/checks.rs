//! Cross-checks driven by scenario files: the light-cone solver against the
//! stepper, and the Lorentz closed forms against conjugation.

use std::fs;
use std::path::Path;

use bqfield::dynamics::{FieldState, InteractionSystem};
use bqfield::propagator::{free_field_cauchy, QuadratureSpec};
use bqfield::{BiqField, Biquaternion, Field, Stencil};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Kind, ProfileKind, Scenario};
use crate::identities::{lorentz_battery, Boost, IdentityResult};
use crate::profiles::{sampler, Role};
use crate::CliError;

pub const REPORT_FILE: &str = "report.json";

/// Tolerance on the light-cone solver against the stepper, relative to the peak.
pub const CAUCHY_DISCREPANCY_TOL: f64 = 0.02;
/// Tolerance on the solution outside the light cone, relative to the peak.
pub const CAUCHY_LEAK_TOL: f64 = 1e-4;
/// Widths beyond the light cone at which the datum counts as absent.
const CONE_MARGIN_WIDTHS: f64 = 5.0;

#[derive(Clone, Debug, Serialize)]
pub struct CauchyReport {
    pub kind: &'static str,
    pub n: usize,
    pub h: f64,
    pub horizon: f64,
    pub dt: f64,
    pub steps: usize,
    pub order: u32,
    /// Largest stepper value at the horizon.
    pub peak: f64,
    /// Largest light-cone minus stepper difference over the inner samples, over `peak`.
    pub discrepancy: f64,
    /// Largest light-cone value beyond the cone, over `peak`.
    pub leak: f64,
    /// The same for the stepper, which is only approximately causal.
    pub leak_stepper: f64,
    pub inner_samples: usize,
    pub outer_samples: usize,
    pub passed: bool,
}

fn write_report<T: Serialize>(dir: &Path, report: &T) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let text = serde_json::to_string_pretty(report).map_err(|e| CliError::Runtime(e.to_string()))?;
    fs::write(dir.join(REPORT_FILE), text + "\n")?;
    Ok(())
}

fn distance(x: [f64; 3], c: [f64; 3]) -> f64 {
    (0..3).map(|i| (x[i] - c[i]).powi(2)).sum::<f64>().sqrt()
}

/// Picks up to `count` of `candidates` reproducibly.
fn pick(candidates: Vec<usize>, count: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if candidates.len() <= count {
        return candidates;
    }
    let mut idx: Vec<usize> = sample(rng, candidates.len(), count).into_iter().map(|i| candidates[i]).collect();
    idx.sort_unstable();
    idx
}

/// Evolves a Gaussian charge-current bump freely to the horizon with the
/// stepper and compares against the light-cone solution at sampled grid
/// points. Writes `report.json` into `out`.
pub fn cauchy_check(sc: &Scenario, stencil: Stencil, out: &Path) -> Result<CauchyReport, CliError> {
    sc.validate()?;
    if sc.kind != Kind::CauchyCheck {
        return Err(CliError::Config {
            key: "kind".into(),
            reason: format!("expected `cauchy_check`, got `{}`", sc.kind.name()),
        });
    }
    let setup = sc.cauchy.as_ref().expect("validated");
    let profile = sc.fields[0].charge.as_ref().expect("validated");
    if profile.profile != ProfileKind::GaussianBump {
        return Err(CliError::Config {
            key: "fields[0].charge.profile".into(),
            reason: "`cauchy_check` needs a `gaussian_bump`".into(),
        });
    }
    let grid = sc.grid()?;
    let q = QuadratureSpec::new(setup.n_polar, setup.n_azimuth, setup.radial_steps, setup.diff_step)?;
    let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
    let theta0 = sampler(profile, Role::Charge, &mut rng);

    let steps = (setup.horizon / (grid.h() / 4.0)).ceil() as usize;
    let dt = setup.horizon / steps as f64;
    let zero = BiqField::filled(grid, Biquaternion::ZERO);
    let state = FieldState::new(zero, Field::from_fn(grid, &theta0), sc.medium(0)?)?;
    let mut sys = InteractionSystem::new(vec![state], sc.kappa, stencil)?;
    for _ in 0..steps {
        sys.step(dt)?;
    }
    let stepped = &sys.fields[0].theta;
    let peak = stepped.max_abs();

    let (c, w) = (profile.center, profile.width.expect("validated"));
    let inner_radius = setup.horizon + 3.0 * w;
    let outer_radius = setup.horizon + CONE_MARGIN_WIDTHS * w;
    let (mut inner, mut outer) = (Vec::new(), Vec::new());
    for idx in 0..grid.len() {
        let d = distance(grid.position(idx), c);
        if d <= inner_radius {
            inner.push(idx);
        } else if d > outer_radius {
            outer.push(idx);
        }
    }
    let inner = pick(inner, setup.samples, &mut rng);
    let outer = pick(outer, setup.samples, &mut rng);
    let kernel = |_: f64, y: [f64; 3]| theta0(y);
    let solve = |idx: &usize| free_field_cauchy(&kernel, grid.position(*idx), setup.horizon, &q);

    let cone: Vec<Biquaternion> = inner.par_iter().map(solve).collect::<Result<_, _>>()?;
    let discrepancy = inner
        .iter()
        .zip(&cone)
        .map(|(&i, k)| k.max_abs_diff(stepped.get(i)))
        .fold(0.0, f64::max)
        / peak;
    let beyond: Vec<Biquaternion> = outer.par_iter().map(solve).collect::<Result<_, _>>()?;
    let leak = beyond.iter().map(|k| k.max_abs()).fold(0.0, f64::max) / peak;
    let leak_stepper = outer.iter().map(|&i| stepped.get(i).max_abs()).fold(0.0, f64::max) / peak;

    let report = CauchyReport {
        kind: "cauchy_check",
        n: grid.n(),
        h: grid.h(),
        horizon: setup.horizon,
        dt,
        steps,
        order: stencil.order(),
        peak,
        discrepancy,
        leak,
        leak_stepper,
        inner_samples: inner.len(),
        outer_samples: outer.len(),
        passed: discrepancy <= CAUCHY_DISCREPANCY_TOL && leak <= CAUCHY_LEAK_TOL && !outer.is_empty(),
    };
    write_report(out, &report)?;
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct LorentzReport {
    pub kind: &'static str,
    pub v: f64,
    pub e: [f64; 3],
    pub phi: f64,
    pub count: usize,
    pub identities: Vec<IdentityResult>,
    pub passed: bool,
}

/// Runs the Lorentz battery for the configured boost over `boost.count`
/// random events and field values. Writes `report.json` into `out`.
pub fn lorentz_check(sc: &Scenario, out: &Path) -> Result<LorentzReport, CliError> {
    sc.validate()?;
    if sc.kind != Kind::LorentzCheck {
        return Err(CliError::Config {
            key: "kind".into(),
            reason: format!("expected `lorentz_check`, got `{}`", sc.kind.name()),
        });
    }
    let b = sc.boost.as_ref().expect("validated");
    let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
    let boost = Boost { v: b.v, e: b.e, phi: b.phi };
    let identities = lorentz_battery(&mut rng, b.count, Some(boost))?;
    let report = LorentzReport {
        kind: "lorentz_check",
        v: b.v,
        e: b.e,
        phi: b.phi,
        count: b.count,
        passed: identities.iter().all(|i| i.passed),
        identities,
    };
    write_report(out, &report)?;
    Ok(report)
}
