use super::system::InteractionSystem;
use super::{
    action_reaction_residual, charge_current_energy, integrate, interaction_energy, max_norm,
    power_force, stress_balance_residual, thermo_residual,
};
use crate::algebra::I;
use crate::egm::{conservation_residuals, energy_pulse, maxwell_residual};
use crate::fields::{BiqField, SampleStack};
use crate::{Error, Result};

/// Residual maxima and integrals at one step, each maximised over fields.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub tau: f64,
    /// `∇⁺A − Θ`.
    pub maxwell: f64,
    /// `∂τρ + div J`, which vanishes only for free fields.
    pub charge: f64,
    /// `κ(∂τρ + div J) + iM`.
    pub charge_open: f64,
    /// Energy balance, see [`crate::egm::ConservationResiduals`].
    pub energy: f64,
    pub thermo: f64,
    pub stress_h: f64,
    pub stress_e: f64,
    /// `Θ¹∘A² + Θ²∘A¹` over field pairs; `None` for a single field.
    pub action_reaction: Option<f64>,
    /// `Σ ∫W dV` over fields.
    pub w: f64,
    /// `Σ ∫Q dV` over fields.
    pub q: f64,
    /// `∫ Re δΞ dV`.
    pub delta_w: f64,
    /// Separation, absorption and conservation point counts.
    pub classes: [usize; 3],
}

/// Diagnostics at the central state of `window`, consecutive states spaced
/// by `dt`. The window must hold `2r + 1` states for the system stencil of
/// radius `r`.
pub fn step_diagnostics(window: &[InteractionSystem], dt: f64) -> Result<StepRecord> {
    let needed = 2 * window.first().ok_or(Error::Empty("state window"))?.stencil.radius() + 1;
    if window.len() != needed {
        return Err(Error::InsufficientSlices {
            needed,
            got: window.len(),
        });
    }
    let c = &window[needed / 2];
    let (stencil, kappa) = (c.stencil, c.kappa);
    let tau0 = window[0].tau;
    let mut rec = StepRecord {
        step: c.steps,
        tau: c.tau,
        ..StepRecord::default()
    };
    let coupled = c.fields.len() > 1 || c.background.is_some();
    for (k, field) in c.fields.iter().enumerate() {
        let a_stack = SampleStack::new(window.iter().map(|s| s.fields[k].a.clone()).collect(), tau0, dt)?;
        let t_stack = SampleStack::new(window.iter().map(|s| s.fields[k].theta.clone()).collect(), tau0, dt)?;
        let theta = &field.theta;

        rec.maxwell = rec.maxwell.max(maxwell_residual(&a_stack, theta, stencil)?.max_abs());
        let cons = conservation_residuals(&a_stack, &t_stack, stencil)?;
        rec.charge = rec.charge.max(max_norm(&cons.charge));
        rec.energy = rec.energy.max(cons.energy.max_by(f64::abs));

        let partner = if coupled {
            c.partner_tension(k)?
        } else {
            BiqField::filled(c.grid(), crate::Biquaternion::ZERO)
        };
        let pf = power_force(theta, &partner)?;
        let open = cons.charge.zip_map(&pf.m, |q, m| q * kappa + I * m)?;
        rec.charge_open = rec.charge_open.max(max_norm(&open));

        let force = pf.raw.map(|r| r.v * I);
        let th = thermo_residual(&t_stack, &force, kappa, stencil)?;
        rec.thermo = rec.thermo.max(th.max_by(f64::abs));

        let (rh, re) = stress_balance_residual(&t_stack, &partner, field.medium, kappa, stencil)?;
        let vmax = |v: [f64; 3]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        rec.stress_h = rec.stress_h.max(rh.max_by(vmax));
        rec.stress_e = rec.stress_e.max(re.max_by(vmax));

        rec.w += integrate(&energy_pulse(&field.a)?.w);
        rec.q += integrate(&charge_current_energy(theta).q);
    }
    if c.fields.len() > 1 {
        let mut worst = 0.0f64;
        for k in 0..c.fields.len() {
            for l in k + 1..c.fields.len() {
                let (f, g) = (&c.fields[k], &c.fields[l]);
                worst = worst.max(action_reaction_residual(&f.theta, &g.a, &g.theta, &f.a)?.max_abs());
            }
        }
        rec.action_reaction = Some(worst);
    }
    let thetas: Vec<BiqField> = c.fields.iter().map(|f| f.theta.clone()).collect();
    let ie = interaction_energy(&thetas)?;
    rec.delta_w = integrate(&ie.delta.map(|d| d.s.re));
    rec.classes = ie.counts();
    Ok(rec)
}
