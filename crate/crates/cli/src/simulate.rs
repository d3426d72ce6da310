//! Evolution runs: `free`, `interact` and `background` scenarios.

use std::collections::VecDeque;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use bqfield::dynamics::{step_diagnostics, FieldState, InteractionSystem, StepRecord};
use bqfield::fields::write_dump;
use bqfield::{BiqField, Biquaternion, Stencil};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{Kind, Scenario};
use crate::profiles::{build, Role};
use crate::CliError;

pub const DIAGNOSTICS_FILE: &str = "diagnostics.ndjson";
pub const SUMMARY_FILE: &str = "summary.csv";

/// Settings that the command line may override.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out: PathBuf,
    pub dump_every: Option<usize>,
    pub stencil: Stencil,
}

impl RunOptions {
    /// Scenario values overridden by whichever flags were given.
    pub fn resolve(
        sc: &Scenario,
        out: Option<PathBuf>,
        dump_every: Option<usize>,
        order: Option<u32>,
    ) -> Result<Self, CliError> {
        let stencil = match order {
            Some(o) => Stencil::from_order(o).map_err(|_| CliError::Config {
                key: "--order".into(),
                reason: format!("{o} is not 2 or 4"),
            })?,
            None => sc.stencil()?,
        };
        if dump_every == Some(0) {
            return Err(CliError::Config {
                key: "--dump-every".into(),
                reason: "must be at least 1".into(),
            });
        }
        Ok(Self {
            out: out
                .or_else(|| sc.output.dir.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("out")),
            dump_every: dump_every.or(sc.output.dump_every),
            stencil,
        })
    }
}

/// One NDJSON line.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Record {
    pub step: usize,
    pub tau: f64,
    pub maxwell: f64,
    pub charge: f64,
    pub charge_open: f64,
    pub energy: f64,
    pub action_reaction: Option<f64>,
    pub thermo: f64,
    pub stress_h: f64,
    pub stress_e: f64,
    pub w: f64,
    pub q: f64,
    pub delta_w: f64,
    pub separation: usize,
    pub absorption: usize,
    pub conservation: usize,
}

impl Record {
    fn from_step(r: &StepRecord) -> Self {
        Self {
            step: r.step,
            tau: r.tau,
            maxwell: r.maxwell,
            charge: r.charge,
            charge_open: r.charge_open,
            energy: r.energy,
            action_reaction: r.action_reaction,
            thermo: r.thermo,
            stress_h: r.stress_h,
            stress_e: r.stress_e,
            w: r.w,
            q: r.q,
            delta_w: r.delta_w,
            separation: r.classes[0],
            absorption: r.classes[1],
            conservation: r.classes[2],
        }
    }

    /// Named numeric values, in output order.
    pub fn values(&self) -> Vec<(&'static str, f64)> {
        let mut v = vec![
            ("maxwell", self.maxwell),
            ("charge", self.charge),
            ("charge_open", self.charge_open),
            ("energy", self.energy),
        ];
        if let Some(a) = self.action_reaction {
            v.push(("action_reaction", a));
        }
        v.extend([
            ("thermo", self.thermo),
            ("stress_h", self.stress_h),
            ("stress_e", self.stress_e),
            ("w", self.w),
            ("q", self.q),
            ("delta_w", self.delta_w),
        ]);
        v
    }
}

/// Builds the initial system of an evolution scenario.
pub fn initial_system(sc: &Scenario, stencil: Stencil) -> Result<InteractionSystem, CliError> {
    let grid = sc.grid()?;
    let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
    let zero = || BiqField::filled(grid, Biquaternion::ZERO);
    let mut fields = Vec::with_capacity(sc.fields.len());
    for (k, f) in sc.fields.iter().enumerate() {
        let a = f.tension.as_ref().map_or_else(zero, |p| build(p, Role::Tension, grid, &mut rng));
        let theta = f.charge.as_ref().map_or_else(zero, |p| build(p, Role::Charge, grid, &mut rng));
        fields.push(FieldState::new(a, theta, sc.medium(k)?)?);
    }
    let mut sys = InteractionSystem::new(fields, sc.kappa, stencil)?;
    if let Some(b) = &sc.background {
        sys = sys.with_background(build(b, Role::Tension, grid, &mut rng))?;
    }
    Ok(sys)
}

/// Outcome of a completed run.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub records: Vec<Record>,
    pub out: PathBuf,
}

/// Runs an evolution scenario, writing diagnostics, the summary and dumps
/// into `opts.out`. Outputs written before a failure are flushed.
///
/// The record for step `j` is centred on state `j` and needs `r` states on
/// either side, `r` the stencil radius, so records cover steps
/// `r, …, steps + r − 1` and the run advances `steps + 2r − 1` times.
pub fn simulate(sc: &Scenario, opts: &RunOptions) -> Result<RunSummary, CliError> {
    sc.validate()?;
    if !sc.kind.is_evolution() {
        return Err(CliError::Config {
            key: "kind".into(),
            reason: format!("`{}` is not an evolution run", sc.kind.name()),
        });
    }
    let time = sc.time.as_ref().expect("validated");
    let mut sys = initial_system(sc, opts.stencil)?;
    fs::create_dir_all(&opts.out)?;
    let mut ndjson = BufWriter::new(File::create(opts.out.join(DIAGNOSTICS_FILE))?);
    let mut records = Vec::with_capacity(time.steps);
    let result = run_loop(&mut sys, time.dt, time.steps, opts, &mut ndjson, &mut records);
    ndjson.flush()?;
    write_summary(&opts.out.join(SUMMARY_FILE), sc.kind, &records)?;
    result?;
    Ok(RunSummary {
        records,
        out: opts.out.clone(),
    })
}

fn run_loop(
    sys: &mut InteractionSystem,
    dt: f64,
    steps: usize,
    opts: &RunOptions,
    ndjson: &mut impl Write,
    records: &mut Vec<Record>,
) -> Result<(), CliError> {
    let r = opts.stencil.radius();
    let len = 2 * r + 1;
    let mut window: VecDeque<InteractionSystem> = VecDeque::with_capacity(len);
    maybe_dump(sys, opts)?;
    window.push_back(sys.clone());
    for _ in 0..steps + 2 * r - 1 {
        sys.step(dt)?;
        if sys.steps < steps + r {
            maybe_dump(sys, opts)?;
        }
        window.push_back(sys.clone());
        if window.len() > len {
            window.pop_front();
        }
        if window.len() == len {
            let rec = Record::from_step(&step_diagnostics(window.make_contiguous(), dt)?);
            if let Some((name, _)) = rec.values().into_iter().find(|(_, v)| !v.is_finite()) {
                return Err(CliError::Runtime(format!("non-finite diagnostic `{name}` at step {}", rec.step)));
            }
            serde_json::to_writer(&mut *ndjson, &rec).map_err(|e| CliError::Runtime(e.to_string()))?;
            ndjson.write_all(b"\n")?;
            records.push(rec);
        }
    }
    Ok(())
}

fn maybe_dump(sys: &InteractionSystem, opts: &RunOptions) -> Result<(), CliError> {
    let Some(every) = opts.dump_every else {
        return Ok(());
    };
    if !sys.steps.is_multiple_of(every) {
        return Ok(());
    }
    let dir = opts.out.join("dumps");
    fs::create_dir_all(&dir)?;
    for (k, f) in sys.fields.iter().enumerate() {
        for (name, field) in [("a", &f.a), ("theta", &f.theta)] {
            let path = dir.join(format!("step{:06}_field{k}_{name}.bqf", sys.steps));
            let mut w = BufWriter::new(File::create(path)?);
            write_dump(&mut w, field, sys.tau, sys.stencil.order())?;
            w.flush()?;
        }
    }
    Ok(())
}

/// One row per diagnostic: largest magnitude over the run and final value.
fn write_summary(path: &Path, kind: Kind, records: &[Record]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Runtime(e.to_string()))?;
    let csv_err = |e: csv::Error| CliError::Runtime(e.to_string());
    w.write_record(["kind", "quantity", "max_abs", "final"]).map_err(csv_err)?;
    if let Some(last) = records.last() {
        for (i, (name, fin)) in last.values().into_iter().enumerate() {
            let max = records.iter().map(|r| r.values()[i].1.abs()).fold(0.0, f64::max);
            w.write_record([kind.name(), name, &format!("{max:e}"), &format!("{fin:e}")]).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}
