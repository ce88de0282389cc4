//! Single-mode efficiency of a nonlinear π phase-shift gate built from one
//! two-level atom in one-dimensional free space.
//!
//! Lengths are measured on the coordinate comoving with the light, `x`, in the
//! same units as `c` times the time unit; with the defaults `Γ = c = 1` that is
//! `c/Γ`. The pieces, bottom up:
//!
//! - [`grid`]: uniform grids and cumulative quadrature,
//! - [`pulse`]: normalized Gaussian pulse modes, delays and overlaps,
//! - [`scattering`]: one- and two-photon far-field outputs,
//! - [`transmittance`]: the filter amplitudes `η₁`, `η₂` and success probability,
//! - [`optimizer`]: sweeps and the `η₁² = η₂` optimum.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod optimizer;
pub mod pulse;
pub mod scattering;
pub mod transmittance;

pub use error::{Error, Result};
pub use grid::{GridPolicy, GridSpec, SampledFunction};
pub use optimizer::{
    find_crossing, optimize, sweep_over_delay, sweep_over_duration, Crossing, CrossingSearch,
    DelayScan, OptimizeOptions, OptimumResult, SweepCurve, SweepParameter, SweepPoint,
};
pub use pulse::{overlap, InputState, PulseMode};
pub use scattering::{one_photon_output, two_photon_output, AtomParams, TwoPhotonField};
pub use transmittance::{
    apply_linear_loss, eta1, eta2, ns_gate_valid, success_probability, transmittance,
    FilterAnalysis, TransmittanceReport,
};
