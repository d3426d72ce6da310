//! Scenario files.
//!
//! Scenarios are TOML documents. Unknown keys are rejected and every
//! validation failure names the offending key.

use std::path::Path;

use bqfield::egm::Medium;
use bqfield::{Grid, Stencil};
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Free,
    Interact,
    Background,
    CauchyCheck,
    LorentzCheck,
    Identities,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Free => "free",
            Kind::Interact => "interact",
            Kind::Background => "background",
            Kind::CauchyCheck => "cauchy_check",
            Kind::LorentzCheck => "lorentz_check",
            Kind::Identities => "identities",
        }
    }

    /// Kinds run by `simulate`.
    pub fn is_evolution(self) -> bool {
        matches!(self, Kind::Free | Kind::Interact | Kind::Background)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub kappa: f64,
    #[serde(default = "two")]
    pub order: u32,
    pub grid: GridSpec,
    pub time: Option<TimeSpec>,
    #[serde(default)]
    pub fields: Vec<FieldSpec>,
    pub background: Option<Profile>,
    pub boost: Option<BoostSpec>,
    pub cauchy: Option<CauchySpec>,
    pub identities: Option<IdentitySpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub h: Option<f64>,
    pub extent: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub dt: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    #[serde(default = "one")]
    pub eps: f64,
    #[serde(default = "one")]
    pub mu: f64,
    pub tension: Option<Profile>,
    pub charge: Option<Profile>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    GaussianBump,
    PlaneWave,
    CircularWave,
    Uniform,
}

/// Initial data for one biquaternion field.
///
/// * `uniform`: `amplitude·value` everywhere.
/// * `gaussian_bump`: `amplitude·value·exp(−|x − center|²/2width²)`.
/// * `plane_wave`: `amplitude·cos(k·x + phase)·P`.
/// * `circular_wave`: `amplitude·exp(i(k·x + phase))·P`.
///
/// The polarization `P` is `value` when given, else `u ± i k̂×u` with `u`
/// the unit `polarization` vector (or a default one orthogonal to `k`). The
/// sign makes the wave free: `+` for tensions, `−` for charge-currents.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    pub profile: ProfileKind,
    #[serde(default = "one")]
    pub amplitude: f64,
    pub width: Option<f64>,
    #[serde(default)]
    pub center: [f64; 3],
    pub k: Option<[f64; 3]>,
    /// Biquaternion coefficient as `[re s, im s, re x, im x, re y, im y, re z, im z]`.
    pub value: Option<[f64; 8]>,
    pub polarization: Option<[f64; 3]>,
    #[serde(default)]
    pub phase: f64,
    /// Draws the phase from the scenario seed instead.
    #[serde(default)]
    pub random_phase: bool,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoostSpec {
    pub v: f64,
    pub e: [f64; 3],
    #[serde(default)]
    pub phi: f64,
    #[serde(default = "thousand")]
    pub count: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CauchySpec {
    pub horizon: f64,
    #[serde(default = "twelve")]
    pub n_polar: usize,
    #[serde(default = "twenty_four")]
    pub n_azimuth: usize,
    #[serde(default = "sixteen")]
    pub radial_steps: usize,
    #[serde(default = "diff_step")]
    pub diff_step: f64,
    /// Grid points compared against the stepper.
    #[serde(default = "sixty_four")]
    pub samples: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitySpec {
    pub count: usize,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<String>,
    pub dump_every: Option<usize>,
}

fn one() -> f64 {
    1.0
}
fn two() -> u32 {
    2
}
fn thousand() -> usize {
    1000
}
fn twelve() -> usize {
    12
}
fn sixteen() -> usize {
    16
}
fn twenty_four() -> usize {
    24
}
fn sixty_four() -> usize {
    64
}
fn diff_step() -> f64 {
    0.01
}

fn invalid(key: impl Into<String>, reason: impl Into<String>) -> CliError {
    CliError::Config {
        key: key.into(),
        reason: reason.into(),
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let de = toml::Deserializer::new(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            invalid(if key == "." { "<root>".to_string() } else { key }, e.into_inner().message().trim().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid("<file>", format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        let g = &self.grid;
        let grid = match (g.h, g.extent) {
            (Some(h), None) => Grid::new(g.n, h),
            (None, Some(l)) => Grid::with_extent(g.n, l),
            _ => return Err(invalid("grid.h", "give exactly one of `h` and `extent`")),
        };
        grid.map_err(|e| invalid(if g.n < Grid::MIN_POINTS { "grid.n" } else { "grid.h" }, e.to_string()))
    }

    pub fn stencil(&self) -> Result<Stencil, CliError> {
        Stencil::from_order(self.order).map_err(|_| invalid("order", format!("{} is not 2 or 4", self.order)))
    }

    pub fn medium(&self, k: usize) -> Result<Medium, CliError> {
        let f = &self.fields[k];
        Medium::new(f.eps, f.mu).map_err(|e| {
            let which = if f.eps.is_finite() && f.eps > 0.0 { "mu" } else { "eps" };
            invalid(format!("fields[{k}].{which}"), e.to_string())
        })
    }

    /// Checks everything the chosen kind needs.
    pub fn validate(&self) -> Result<(), CliError> {
        let grid = self.grid()?;
        self.stencil()?;
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(invalid("kappa", format!("{} must be positive", self.kappa)));
        }
        for k in 0..self.fields.len() {
            self.medium(k)?;
            for (role, p) in [("tension", &self.fields[k].tension), ("charge", &self.fields[k].charge)] {
                if let Some(p) = p {
                    p.validate(&format!("fields[{k}].{role}"), grid)?;
                }
            }
        }
        if let Some(b) = &self.background {
            b.validate("background", grid)?;
        }
        if self.kind.is_evolution() {
            let t = self.time.as_ref().ok_or_else(|| invalid("time", "required for evolution runs"))?;
            if !(t.dt.is_finite() && t.dt > 0.0 && t.dt <= 0.5 * grid.h() * (1.0 + 1e-12)) {
                return Err(invalid("time.dt", format!("{} must lie in (0, h/2 = {}]", t.dt, 0.5 * grid.h())));
            }
            if t.steps == 0 {
                return Err(invalid("time.steps", "must be at least 1"));
            }
        }
        let nf = self.fields.len();
        match self.kind {
            Kind::Free | Kind::Background if nf != 1 => {
                return Err(invalid("fields", format!("`{}` runs take exactly one field, got {nf}", self.kind.name())))
            }
            Kind::Interact if nf < 2 => return Err(invalid("fields", format!("`interact` needs at least two fields, got {nf}"))),
            Kind::CauchyCheck if nf != 1 || self.fields[0].charge.is_none() => {
                return Err(invalid("fields", "`cauchy_check` takes one field with a `charge` profile"))
            }
            _ => {}
        }
        if self.kind == Kind::Background && self.background.is_none() {
            return Err(invalid("background", "required for `background` runs"));
        }
        if self.kind != Kind::Background && self.background.is_some() {
            return Err(invalid("background", format!("not used by `{}` runs", self.kind.name())));
        }
        if self.kind == Kind::LorentzCheck {
            let b = self.boost.as_ref().ok_or_else(|| invalid("boost", "required for `lorentz_check`"))?;
            if !(b.v.is_finite() && b.v.abs() < 1.0) {
                return Err(invalid("boost.v", format!("|v| = {} must be below 1", b.v)));
            }
            let n = b.e.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(n.is_finite() && n > 0.0) {
                return Err(invalid("boost.e", "must be a nonzero direction"));
            }
            if !b.phi.is_finite() {
                return Err(invalid("boost.phi", "must be finite"));
            }
            if b.count == 0 {
                return Err(invalid("boost.count", "must be at least 1"));
            }
        }
        if self.kind == Kind::CauchyCheck {
            let c = self.cauchy.as_ref().ok_or_else(|| invalid("cauchy", "required for `cauchy_check`"))?;
            if !(c.horizon.is_finite() && c.horizon > 0.0 && c.horizon < 0.5 * grid.extent()) {
                return Err(invalid("cauchy.horizon", format!("{} must lie in (0, extent/2)", c.horizon)));
            }
            bqfield::propagator::QuadratureSpec::new(c.n_polar, c.n_azimuth, c.radial_steps, c.diff_step)
                .map_err(|e| match e {
                    bqfield::Error::InvalidParameter { name, reason } => invalid(format!("cauchy.{name}"), reason),
                    other => invalid("cauchy", other.to_string()),
                })?;
            if c.samples == 0 {
                return Err(invalid("cauchy.samples", "must be at least 1"));
            }
        }
        if self.kind == Kind::Identities {
            let c = self.identities.as_ref().ok_or_else(|| invalid("identities", "required for `identities`"))?;
            if c.count == 0 {
                return Err(invalid("identities.count", "must be at least 1"));
            }
        }
        if self.output.dump_every == Some(0) {
            return Err(invalid("output.dump_every", "must be at least 1"));
        }
        Ok(())
    }
}

impl Profile {
    fn validate(&self, at: &str, grid: Grid) -> Result<(), CliError> {
        let key = |k: &str| format!("{at}.{k}");
        if !self.amplitude.is_finite() {
            return Err(invalid(key("amplitude"), "must be finite"));
        }
        if !self.phase.is_finite() {
            return Err(invalid(key("phase"), "must be finite"));
        }
        if let Some(v) = self.value {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(invalid(key("value"), "must be finite"));
            }
        }
        let half = 0.5 * grid.extent();
        match self.profile {
            ProfileKind::Uniform | ProfileKind::GaussianBump if self.value.is_none() => {
                return Err(invalid(key("value"), "required for this profile"))
            }
            ProfileKind::GaussianBump => {
                let w = self.width.ok_or_else(|| invalid(key("width"), "required for `gaussian_bump`"))?;
                if !(w.is_finite() && w > 0.0) {
                    return Err(invalid(key("width"), format!("{w} must be positive")));
                }
                // Three widths either side must stay inside the periodic box.
                for (i, c) in self.center.iter().enumerate() {
                    if !(c.is_finite() && c.abs() + 3.0 * w <= half) {
                        return Err(invalid(
                            key("width"),
                            format!("bump at center[{i}] = {c} with width {w} wraps around the box of half-size {half}"),
                        ));
                    }
                }
            }
            ProfileKind::PlaneWave | ProfileKind::CircularWave => {
                let k = self.k.ok_or_else(|| invalid(key("k"), "required for waves"))?;
                let kn = k.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !(kn.is_finite() && kn > 0.0) {
                    return Err(invalid(key("k"), "must be a nonzero wavevector"));
                }
                // Periodicity: k·L/2π must be integral.
                for (i, ki) in k.iter().enumerate() {
                    let m = ki * grid.extent() / std::f64::consts::TAU;
                    if (m - m.round()).abs() > 1e-9 {
                        return Err(invalid(key("k"), format!("k[{i}] = {ki} is not periodic on a box of extent {}", grid.extent())));
                    }
                }
                if let Some(u) = self.polarization {
                    let un = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let dot = (u[0] * k[0] + u[1] * k[1] + u[2] * k[2]) / (kn * un.max(f64::MIN_POSITIVE));
                    if !(un.is_finite() && un > 0.0 && dot.abs() < 1e-9) {
                        return Err(invalid(key("polarization"), "must be a nonzero vector orthogonal to k"));
                    }
                }
            }
            ProfileKind::Uniform => {}
        }
        Ok(())
    }
}
