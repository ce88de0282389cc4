//! Reference computations that share no code path with the library's
//! factored evaluation.

#![allow(dead_code)]

use std::f64::consts::PI;

use libm::erfc;
use nsgate_core::{GridPolicy, GridSpec, PulseMode, SampledFunction, TwoPhotonField};

/// Closed-form Gaussian `e^{-x²/w²} / √(√(π/2)·w)`.
pub fn gaussian(x: f64, width: f64) -> f64 {
    (-(x * x) / (width * width)).exp() / ((PI / 2.0).sqrt() * width).sqrt()
}

/// One-photon output of the Gaussian of width `w` in closed form:
/// `Ψ(x) - 2κ·e^{κx + κ²w²/4}·(w√π/2)·erfc(x/w + κw/2)/√N`.
pub fn one_photon_closed_form(x: f64, width: f64, rate: f64) -> f64 {
    let norm = ((PI / 2.0).sqrt() * width).sqrt();
    let arg = x / width + rate * width / 2.0;
    let tail = (rate * x + rate * rate * width * width / 4.0).exp() * width * PI.sqrt() / 2.0
        * erfc(arg)
        / norm;
    gaussian(x, width) - 2.0 * rate * tail
}

/// Composite Simpson nodes and weights on `[a, b]` with `2m` intervals.
fn simpson(a: f64, b: f64, m: usize) -> Vec<(f64, f64)> {
    let n = 2 * m;
    let h = (b - a) / n as f64;
    (0..=n)
        .map(|k| {
            let w = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            (a + k as f64 * h, w * h / 3.0)
        })
        .collect()
}

/// Support of the Gaussian beyond which it is below double precision.
fn upper(width: f64) -> f64 {
    9.0 * width
}

/// `∫_x^∞ e^{-κ(x' - x)} Ψ(x') dx'` by direct Simpson quadrature.
fn kernel_tail(x: f64, width: f64, rate: f64, m: usize) -> f64 {
    let hi = upper(width);
    if x >= hi {
        return 0.0;
    }
    simpson(x, hi, m)
        .into_iter()
        .map(|(xp, w)| w * (-rate * (xp - x)).exp() * gaussian(xp, width))
        .sum()
}

/// One-photon output by direct integration of the kernel.
pub fn one_photon_brute(x: f64, width: f64, rate: f64) -> f64 {
    gaussian(x, width) - 2.0 * rate * kernel_tail(x, width, rate, 4000)
}

/// `w·e^{-κ(x' - x)}·Ψ(x')` at each quadrature node.
fn weighted(nodes: &[(f64, f64)], x: f64, width: f64, rate: f64) -> Vec<f64> {
    nodes
        .iter()
        .map(|&(xp, w)| w * (-rate * (xp - x)).exp() * gaussian(xp, width))
        .collect()
}

/// Full double sum over the tensor-product node set.
fn double_sum(f1: &[f64], f2: &[f64]) -> f64 {
    let mut acc = 0.0;
    for a in f1 {
        for b in f2 {
            acc += a * b;
        }
    }
    acc
}

/// Two-photon output at `(x1, x2)` by direct 2D integration of the full
/// kernel `u₁⊗u₁ + Δu` against `Ψ(x1')Ψ(x2')`.
pub fn two_photon_brute(x1: f64, x2: f64, width: f64, rate: f64) -> f64 {
    let m = 600;
    let hi = upper(width);
    let k2 = 4.0 * rate * rate;

    // δ⊗δ
    let mut total = gaussian(x1, width) * gaussian(x2, width);
    // δ⊗exp and exp⊗δ
    total -= 2.0 * rate * gaussian(x2, width) * kernel_tail(x1, width, rate, 4000);
    total -= 2.0 * rate * gaussian(x1, width) * kernel_tail(x2, width, rate, 4000);

    // exp⊗exp over x1' ≥ x1, x2' ≥ x2
    if x1 < hi && x2 < hi {
        let f1 = weighted(&simpson(x1, hi, m), x1, width, rate);
        let f2 = weighted(&simpson(x2, hi, m), x2, width, rate);
        total += k2 * double_sum(&f1, &f2);
    }

    // Δu over x1', x2' > max(x1, x2)
    let lo = x1.max(x2);
    if lo < hi {
        let nodes = simpson(lo, hi, m);
        let f1 = weighted(&nodes, x1, width, rate);
        let f2 = weighted(&nodes, x2, width, rate);
        total -= k2 * double_sum(&f1, &f2);
    }
    total
}

fn trapezoid_weights(grid: &GridSpec) -> Vec<f64> {
    let h = grid.spacing();
    let mut w = vec![h; grid.len()];
    w[0] = 0.5 * h;
    w[grid.len() - 1] = 0.5 * h;
    w
}

/// Plain 2D trapezoid of `a(x1) a(x2) Ψ_out(x1, x2)` over the reconstructed field.
pub fn dense_filter_overlap(field: &TwoPhotonField, filter: &SampledFunction) -> f64 {
    let w = trapezoid_weights(field.grid());
    let a = filter.values();
    let n = w.len();
    let mut acc = 0.0;
    for i in 0..n {
        let wi = w[i] * a[i];
        if wi == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for j in 0..n {
            row += w[j] * a[j] * field.value_at(i, j);
        }
        acc += wi * row;
    }
    acc
}

/// Plain 2D trapezoid of `|Ψ_out|²`.
pub fn dense_norm_sq(field: &TwoPhotonField) -> f64 {
    let w = trapezoid_weights(field.grid());
    let n = w.len();
    let mut acc = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for (j, wj) in w.iter().enumerate() {
            let v = field.value_at(i, j);
            row += wj * v * v;
        }
        acc += w[i] * row;
    }
    acc
}

/// Richardson extrapolation of an O(h²) quantity from spacings h and h/2.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Gaussian pulse and grid from the default policy at `points_per_scale`.
pub fn pulse_on_policy(
    duration: f64,
    delays: (f64, f64),
    gamma: f64,
    points_per_scale: f64,
) -> PulseMode {
    let grid = GridPolicy::with_points_per_scale(points_per_scale)
        .grid(duration, delays, gamma, 1.0)
        .unwrap();
    PulseMode::gaussian(duration, 1.0, &grid).unwrap()
}

/// `η₂` from a Richardson-extrapolated dense 2D quadrature of the
/// reconstructed field on grids with `points_per_scale` and twice that.
pub fn dense_eta2(duration: f64, delay: f64, gamma: f64, points_per_scale: f64) -> f64 {
    let atom = nsgate_core::AtomParams::new(gamma, 1.0).unwrap();
    let eval = |pps: f64| {
        let p = pulse_on_policy(duration, (0.0, delay), gamma, pps);
        let field = nsgate_core::two_photon_output(&p, &atom).unwrap();
        let filter = p.shift(delay).unwrap();
        -dense_filter_overlap(&field, filter.amplitude())
    };
    richardson(eval(points_per_scale), eval(2.0 * points_per_scale))
}

/// Deterministic xorshift stream of uniforms in `[0, 1)`.
pub struct Uniforms(u64);

impl Uniforms {
    pub fn new(seed: u64) -> Self {
        Self(seed.max(1))
    }

    pub fn next(&mut self) -> f64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        (x >> 11) as f64 / (1u64 << 53) as f64
    }
}
