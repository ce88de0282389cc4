//! Single-mode filter amplitudes `η₁`, `η₂` and what follows from them.
//!
//! `η₁ = -∫ Ψ(x + cl) φ_out(x) dx` and
//! `η₂ = -∬ Ψ(x₁ + cl) Ψ(x₂ + cl) Ψ_out(x₁, x₂) dx₁ dx₂`. The conditional
//! single-mode operation is a π phase shift on the one- and two-photon
//! components followed by the loss `diag(1, η₁, η₂)`, which is only a loss
//! (and not itself a phase flip) while `η₂ > 0`.

use crate::error::{Error, Result};
use crate::grid::integrate;
use crate::pulse::{InputState, PulseMode};
use crate::scattering::{two_photon_output, AtomParams, TwoPhotonField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmittanceReport {
    pub eta1: f64,
    pub eta1_sq: f64,
    pub eta2: f64,
    /// `η₁² - η₂`.
    pub residual: f64,
    pub ns_valid: bool,
    pub duration: f64,
    pub delay: f64,
    pub gamma: f64,
    /// The filter was placed before the input pulse (`l < 0`).
    pub negative_delay: bool,
}

impl TransmittanceReport {
    pub fn new(eta1: f64, eta2: f64, duration: f64, delay: f64, gamma: f64) -> Self {
        let eta1_sq = eta1 * eta1;
        Self {
            eta1,
            eta1_sq,
            eta2,
            residual: eta1_sq - eta2,
            ns_valid: eta2 > 0.0,
            duration,
            delay,
            gamma,
            negative_delay: delay < 0.0,
        }
    }
}

/// Scattered fields for one input pulse, reusable across filter delays.
#[derive(Debug, Clone)]
pub struct FilterAnalysis {
    pulse: PulseMode,
    atom: AtomParams,
    field: TwoPhotonField,
}

impl FilterAnalysis {
    pub fn new(pulse: PulseMode, atom: AtomParams) -> Result<Self> {
        let field = two_photon_output(&pulse, &atom)?;
        Ok(Self { pulse, atom, field })
    }

    pub fn pulse(&self) -> &PulseMode {
        &self.pulse
    }

    pub fn atom(&self) -> &AtomParams {
        &self.atom
    }

    pub fn field(&self) -> &TwoPhotonField {
        &self.field
    }

    /// `∫ Ψ(x + cl) φ_out(x) dx`, the unsigned one-photon overlap.
    fn linear_overlap(&self, filter: &PulseMode) -> Result<f64> {
        Ok(integrate(
            &filter.amplitude().product(self.field.product_part())?,
        ))
    }

    pub fn eta1(&self, delay: f64) -> Result<f64> {
        let filter = self.pulse.shift(delay)?;
        Ok(-self.linear_overlap(&filter)?)
    }

    pub fn eta2(&self, delay: f64) -> Result<f64> {
        let filter = self.pulse.shift(delay)?;
        Ok(-self.field.filter_overlap(filter.amplitude())?)
    }

    /// Nonlinear contribution `D` with `η₂ = -(η₁² + D)`.
    pub fn nonlinear_overlap(&self, delay: f64) -> Result<f64> {
        let filter = self.pulse.shift(delay)?;
        self.field.correction_overlap(filter.amplitude())
    }

    pub fn report(&self, delay: f64) -> Result<TransmittanceReport> {
        let filter = self.pulse.shift(delay)?;
        let linear = self.linear_overlap(&filter)?;
        let nonlinear = self.field.correction_overlap(filter.amplitude())?;
        // η₂ is assembled from the same linear overlap so η₁² and η₂ share rounding
        Ok(TransmittanceReport::new(
            -linear,
            -(linear * linear + nonlinear),
            self.pulse.duration(),
            delay,
            self.atom.gamma(),
        ))
    }
}

pub fn eta1(p: &PulseMode, atom: &AtomParams, delay: f64) -> Result<f64> {
    FilterAnalysis::new(p.clone(), *atom)?.eta1(delay)
}

pub fn eta2(p: &PulseMode, atom: &AtomParams, delay: f64) -> Result<f64> {
    FilterAnalysis::new(p.clone(), *atom)?.eta2(delay)
}

pub fn transmittance(p: &PulseMode, atom: &AtomParams, delay: f64) -> Result<TransmittanceReport> {
    FilterAnalysis::new(p.clone(), *atom)?.report(delay)
}

/// `|C₀|² + η₁²|C₁|² + η₂²|C₂|²`.
pub fn success_probability(state: &InputState, report: &TransmittanceReport) -> f64 {
    state.c0().powi(2)
        + report.eta1_sq * state.c1().powi(2)
        + report.eta2.powi(2) * state.c2().powi(2)
}

/// Whether the device acts as a π phase shift followed by a pure loss.
pub fn ns_gate_valid(report: &TransmittanceReport) -> bool {
    report.eta2 > 0.0
}

/// Folds in a per-photon linear transmittivity `t_lin`.
pub fn apply_linear_loss(report: &TransmittanceReport, t_lin: f64) -> Result<TransmittanceReport> {
    if !(0.0..=1.0).contains(&t_lin) {
        return Err(Error::param(
            "t_lin",
            t_lin,
            "transmittivity must lie in [0, 1]",
        ));
    }
    Ok(TransmittanceReport::new(
        report.eta1 * t_lin.sqrt(),
        report.eta2 * t_lin,
        report.duration,
        report.delay,
        report.gamma,
    ))
}
