//! Single-mode pulse shapes on the comoving coordinate.
//!
//! A delay `l` moves a mode toward negative `x`: the delayed mode is sampled as
//! `Ψ(x + c·l)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{integrate, GridSpec, SampledFunction};

/// Largest norm defect tolerated before renormalizing or shifting a mode.
pub const NORM_DEFECT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    /// `scale · e^{-(x - center)²/width²} / √N`, `N = √(π/2)·width`.
    Gaussian {
        width: f64,
        scale: f64,
    },
    Sampled,
}

/// A normalized pulse mode `Ψ_A` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseMode {
    amplitude: SampledFunction,
    duration: f64,
    center: f64,
    speed: f64,
    shape: Shape,
}

fn gaussian_value(x: f64, center: f64, width: f64, scale: f64) -> f64 {
    let norm = ((PI / 2.0).sqrt() * width).sqrt();
    let u = (x - center) / width;
    scale * (-u * u).exp() / norm
}

impl PulseMode {
    /// Gaussian pulse of duration `duration` centred at `x = 0`.
    pub fn gaussian(duration: f64, speed: f64, grid: &GridSpec) -> Result<Self> {
        Self::gaussian_at(duration, speed, 0.0, grid)
    }

    /// Gaussian pulse of duration `duration` peaking at `center`.
    ///
    /// The grid must cover `center ± 4·c·T`. The closed-form samples are
    /// rescaled so that `integrate(Ψ²) = 1` holds on the grid.
    pub fn gaussian_at(duration: f64, speed: f64, center: f64, grid: &GridSpec) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::param(
                "T",
                duration,
                "pulse duration must be positive",
            ));
        }
        if !(speed > 0.0 && speed.is_finite()) {
            return Err(Error::param(
                "c",
                speed,
                "propagation speed must be positive",
            ));
        }
        let width = speed * duration;
        let reach = 4.0 * width * (1.0 - 1e-12);
        if grid.x_min() > center - reach || grid.x_max() < center + reach {
            return Err(Error::InvalidGrid(format!(
                "grid [{}, {}] does not cover pulse span [{}, {}]",
                grid.x_min(),
                grid.x_max(),
                center - 4.0 * width,
                center + 4.0 * width
            )));
        }
        let raw = grid.sample(|x| gaussian_value(x, center, width, 1.0))?;
        let norm_sq = integrate(&raw.product(&raw)?);
        let defect = (norm_sq - 1.0).abs();
        if defect > NORM_DEFECT_LIMIT {
            return Err(Error::GridTooNarrow {
                defect,
                limit: NORM_DEFECT_LIMIT,
            });
        }
        let scale = norm_sq.sqrt().recip();
        Ok(Self {
            amplitude: grid.sample(|x| gaussian_value(x, center, width, scale))?,
            duration,
            center,
            speed,
            shape: Shape::Gaussian { width, scale },
        })
    }

    /// Wraps arbitrary samples as a mode, normalizing them on their grid.
    ///
    /// Shifts of such modes use linear interpolation.
    pub fn from_samples(samples: SampledFunction, duration: f64, speed: f64) -> Result<Self> {
        if !(speed > 0.0 && speed.is_finite()) {
            return Err(Error::param(
                "c",
                speed,
                "propagation speed must be positive",
            ));
        }
        let norm_sq = integrate(&samples.product(&samples)?);
        if !(norm_sq > 0.0) {
            return Err(Error::param("norm", norm_sq, "mode has zero norm"));
        }
        let inv = norm_sq.sqrt().recip();
        let amplitude = samples.map(|_, v| v * inv)?;
        let center = amplitude
            .grid()
            .nodes()
            .zip(amplitude.values())
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(x, _)| x)
            .unwrap_or(0.0);
        Ok(Self {
            amplitude,
            duration,
            center,
            speed,
            shape: Shape::Sampled,
        })
    }

    pub fn amplitude(&self) -> &SampledFunction {
        &self.amplitude
    }

    pub fn values(&self) -> &[f64] {
        self.amplitude.values()
    }

    pub fn grid(&self) -> &GridSpec {
        self.amplitude.grid()
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.shape, Shape::Gaussian { .. })
    }

    /// The same mode delayed by `delay`, i.e. sampled as `Ψ(x + c·delay)`.
    pub fn shift(&self, delay: f64) -> Result<Self> {
        if !delay.is_finite() {
            return Err(Error::param("l", delay, "delay must be finite"));
        }
        if delay == 0.0 {
            return Ok(self.clone());
        }
        let offset = self.speed * delay;
        let grid = *self.grid();
        let amplitude = match self.shape {
            Shape::Gaussian { width, scale } => {
                let center = self.center - offset;
                grid.sample(|x| gaussian_value(x, center, width, scale))?
            }
            Shape::Sampled => {
                let values = self.values();
                let h = grid.spacing();
                let last = values.len() - 1;
                grid.sample(|x| {
                    let pos = (x + offset - grid.x_min()) / h;
                    if pos < 0.0 || pos > last as f64 {
                        return 0.0;
                    }
                    let i = (pos.floor() as usize).min(last - 1);
                    let t = pos - i as f64;
                    values[i] * (1.0 - t) + values[i + 1] * t
                })?
            }
        };
        let norm_sq = integrate(&amplitude.product(&amplitude)?);
        let defect = (norm_sq - 1.0).abs();
        if defect > NORM_DEFECT_LIMIT {
            return Err(Error::SupportEscape { delay, defect });
        }
        Ok(Self {
            amplitude,
            center: self.center - offset,
            ..self.clone()
        })
    }
}

/// `∫ p(x) q(x) dx`.
pub fn overlap(p: &PulseMode, q: &PulseMode) -> Result<f64> {
    Ok(integrate(&p.amplitude.product(&q.amplitude)?))
}

/// Photon-number amplitudes `(C₀, C₁, C₂)` of a single-mode input state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputState {
    c0: f64,
    c1: f64,
    c2: f64,
}

impl InputState {
    pub const NORM_TOLERANCE: f64 = 1e-10;

    pub fn new(c0: f64, c1: f64, c2: f64) -> Result<Self> {
        let norm_sq = c0 * c0 + c1 * c1 + c2 * c2;
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(Error::param(
                "|C|^2",
                norm_sq,
                "photon-number amplitudes must be normalized",
            ));
        }
        Ok(Self { c0, c1, c2 })
    }

    /// Rescales the amplitudes to unit norm when `|Σ C² - 1| ≤ tolerance`.
    ///
    /// Returns the state and whether any rescaling was applied.
    pub fn normalized_within(c0: f64, c1: f64, c2: f64, tolerance: f64) -> Result<(Self, bool)> {
        let norm_sq = c0 * c0 + c1 * c1 + c2 * c2;
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > tolerance {
            return Err(Error::param(
                "|C|^2",
                norm_sq,
                format!("amplitudes are not normalized within {tolerance:e}"),
            ));
        }
        if (norm_sq - 1.0).abs() <= Self::NORM_TOLERANCE {
            return Ok((Self { c0, c1, c2 }, false));
        }
        let inv = norm_sq.sqrt().recip();
        Ok((
            Self {
                c0: c0 * inv,
                c1: c1 * inv,
                c2: c2 * inv,
            },
            true,
        ))
    }

    pub fn vacuum() -> Self {
        Self {
            c0: 1.0,
            c1: 0.0,
            c2: 0.0,
        }
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }
}
