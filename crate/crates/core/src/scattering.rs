//! Far-field scattering of one- and two-photon pulses by a two-level atom in
//! one-dimensional free space, on resonance.
//!
//! With `κ = Γ/c` the one-photon kernel is
//!
//! ```text
//! u₁(x; x') = δ(x - x') - 2κ·e^{-κ(x' - x)}   for x ≤ x', else 0
//! ```
//!
//! and the two-photon kernel is `u₁ ⊗ u₁ + Δu` with
//!
//! ```text
//! Δu(x₁, x₂; x₁', x₂') = -4κ²·e^{-κ(x₁' + x₂' - x₁ - x₂)}   for x₁, x₂ < min(x₁', x₂').
//! ```
//!
//! Both reduce to the single tail function
//! `R(x) = ∫_x^∞ e^{-κ(x' - x)} Ψ(x') dx'`:
//! the one-photon output is `Ψ - 2κ·R`, and the nonlinear two-photon correction
//! is `ΔΨ(x₁, x₂) = -4κ²·e^{-κ|x₁ - x₂|}·R(max(x₁, x₂))²`. Nothing of size
//! `n²` is ever formed unless [`TwoPhotonField::to_dense`] is asked for.

use crate::error::{Error, Result};
use crate::grid::{exp_weighted_prefix, exp_weighted_suffix, integrate, GridSpec, SampledFunction};
use crate::pulse::PulseMode;

/// Largest one-photon norm defect accepted from [`one_photon_output`].
pub const TAIL_DEFECT_LIMIT: f64 = 1e-3;

/// Dipole relaxation rate `Γ` and propagation speed `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomParams {
    gamma: f64,
    speed: f64,
}

impl Default for AtomParams {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            speed: 1.0,
        }
    }
}

impl AtomParams {
    pub fn new(gamma: f64, speed: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::param(
                "gamma",
                gamma,
                "relaxation rate must be non-negative",
            ));
        }
        if !(speed > 0.0 && speed.is_finite()) {
            return Err(Error::param(
                "c",
                speed,
                "propagation speed must be positive",
            ));
        }
        Ok(Self { gamma, speed })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    /// Spatial decay rate `Γ/c`.
    pub fn rate(&self) -> f64 {
        self.gamma / self.speed
    }

    /// The natural time unit `1/Γ`, or 1 for a decoupled atom.
    pub fn time_unit(&self) -> f64 {
        if self.gamma > 0.0 {
            self.gamma.recip()
        } else {
            1.0
        }
    }
}

fn scatter(p: &PulseMode, atom: &AtomParams) -> Result<(SampledFunction, SampledFunction)> {
    let rate = atom.rate();
    let tail = exp_weighted_suffix(p.amplitude(), rate);
    let output = SampledFunction::new(
        *p.grid(),
        p.values()
            .iter()
            .zip(tail.values())
            .map(|(psi, r)| psi - 2.0 * rate * r)
            .collect(),
    )?;
    let defect = (integrate(&output.product(&output)?) - 1.0).abs();
    if defect > TAIL_DEFECT_LIMIT {
        return Err(Error::InsufficientTail { defect });
    }
    Ok((output, tail))
}

/// One-photon far-field output `φ_out = ∫ u₁(x; x') Ψ(x') dx'`.
pub fn one_photon_output(p: &PulseMode, atom: &AtomParams) -> Result<SampledFunction> {
    scatter(p, atom).map(|(out, _)| out)
}

/// Two-photon far-field output for the input `Ψ(x₁)Ψ(x₂)`.
pub fn two_photon_output(p: &PulseMode, atom: &AtomParams) -> Result<TwoPhotonField> {
    let (product_part, tail) = scatter(p, atom)?;
    Ok(TwoPhotonField {
        product_part,
        tail,
        rate: atom.rate(),
    })
}

/// Factored symmetric two-photon amplitude
/// `Ψ_out(x₁, x₂) = φ(x₁)φ(x₂) - 4κ²·e^{-κ|x₁ - x₂|}·R(max(x₁, x₂))²`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonField {
    product_part: SampledFunction,
    tail: SampledFunction,
    rate: f64,
}

impl TwoPhotonField {
    pub fn grid(&self) -> &GridSpec {
        self.product_part.grid()
    }

    /// The one-photon output `φ`.
    pub fn product_part(&self) -> &SampledFunction {
        &self.product_part
    }

    /// The tail function `R`.
    pub fn tail(&self) -> &SampledFunction {
        &self.tail
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Nonlinear correction `ΔΨ` at grid nodes `(i, j)`.
    pub fn correction_at(&self, i: usize, j: usize) -> f64 {
        let grid = self.grid();
        let r = self.tail.values()[i.max(j)];
        let gap = (grid.x(i) - grid.x(j)).abs();
        -4.0 * self.rate * self.rate * (-self.rate * gap).exp() * r * r
    }

    /// Reconstructed `Ψ_out` at grid nodes `(i, j)`.
    pub fn value_at(&self, i: usize, j: usize) -> f64 {
        let phi = self.product_part.values();
        phi[i] * phi[j] + self.correction_at(i, j)
    }

    /// Row-major `n × n` matrix of the reconstructed field.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.grid().len();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.value_at(i, j));
            }
        }
        out
    }

    /// `∬ a(x₁) a(x₂) ΔΨ(x₁, x₂) dx₁ dx₂` for a real filter amplitude `a`.
    ///
    /// Uses the symmetry in `max(x₁, x₂)`:
    /// `-8κ² ∫ a(x) R(x)² ∫_{x'<x} e^{-κ(x - x')} a(x') dx' dx`.
    pub fn correction_overlap(&self, filter: &SampledFunction) -> Result<f64> {
        if filter.grid() != self.grid() {
            return Err(Error::GridMismatch);
        }
        let inner = exp_weighted_prefix(filter, self.rate);
        let integrand = SampledFunction::new(
            *self.grid(),
            filter
                .values()
                .iter()
                .zip(self.tail.values())
                .zip(inner.values())
                .map(|((a, r), q)| a * r * r * q)
                .collect(),
        )?;
        Ok(-8.0 * self.rate * self.rate * integrate(&integrand))
    }

    /// `∬ a(x₁) a(x₂) Ψ_out(x₁, x₂) dx₁ dx₂`.
    pub fn filter_overlap(&self, filter: &SampledFunction) -> Result<f64> {
        let linear = integrate(&filter.product(&self.product_part)?);
        Ok(linear * linear + self.correction_overlap(filter)?)
    }

    /// `∬ |Ψ_out|² dx₁ dx₂`, evaluated in O(n).
    pub fn norm_sq(&self) -> Result<f64> {
        let grid = *self.grid();
        let rate = self.rate;
        let phi = &self.product_part;
        let r = self.tail.values();

        let phi_norm = integrate(&phi.product(phi)?);
        if rate == 0.0 {
            return Ok(phi_norm * phi_norm);
        }

        // 2∬ φφΔΨ = 2·(-8κ²) ∫ φ R² ∫_{x'<x} e^{-κ(x-x')} φ
        let cross = self.correction_overlap(phi)?;

        // ∬ ΔΨ² = 32κ⁴ ∫ R⁴ ∫_{x'<x} e^{-2κ(x-x')} dx' dx
        let ones = SampledFunction::new(grid, vec![1.0; grid.len()])?;
        let inner = exp_weighted_prefix(&ones, 2.0 * rate);
        let quartic = SampledFunction::new(
            grid,
            r.iter()
                .zip(inner.values())
                .map(|(r, q)| r.powi(4) * q)
                .collect(),
        )?;
        let square = 32.0 * rate.powi(4) * integrate(&quartic);

        Ok(phi_norm * phi_norm + 2.0 * cross + square)
    }
}
