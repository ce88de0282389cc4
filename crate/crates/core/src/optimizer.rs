//! Parameter sweeps and the constrained maximization of the linear
//! transmittance `η₁² = η₂` over pulse duration and filter delay.
//!
//! At fixed duration `T` the delay is rooted by bisection of
//! `h(l) = η₁²(l) - η₂(l)`; the resulting crossing transmittance is then
//! maximized over `T` by golden-section search around the best scan point.
//! Scans over `T` run in parallel; results are collected in scan order, so the
//! outcome does not depend on the thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GridPolicy;
use crate::pulse::PulseMode;
use crate::scattering::AtomParams;
use crate::transmittance::FilterAnalysis;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Duration,
    Delay,
}

impl SweepParameter {
    pub fn symbol(&self) -> &'static str {
        match self {
            SweepParameter::Duration => "T",
            SweepParameter::Delay => "l",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub eta1_sq: f64,
    pub eta2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    pub parameter: SweepParameter,
    pub fixed_value: f64,
    pub points: Vec<SweepPoint>,
}

fn check_sorted(name: &'static str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::param(
            name,
            f64::NAN,
            "sweep needs at least one value",
        ));
    }
    if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::param(name, bad, "sweep values must be finite"));
    }
    if let Some(w) = values.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::param(
            name,
            w[1],
            format!(
                "sweep values must be strictly increasing (follows {})",
                w[0]
            ),
        ));
    }
    Ok(())
}

fn analysis_for(
    duration: f64,
    delays: (f64, f64),
    atom: &AtomParams,
    policy: &GridPolicy,
) -> Result<FilterAnalysis> {
    let grid = policy.grid(duration, delays, atom.gamma(), atom.speed())?;
    let pulse = PulseMode::gaussian(duration, atom.speed(), &grid)?;
    FilterAnalysis::new(pulse, *atom)
}

/// `η₁²` and `η₂` against pulse duration at a fixed delay.
pub fn sweep_over_duration(
    delay: f64,
    durations: &[f64],
    atom: &AtomParams,
    policy: &GridPolicy,
) -> Result<SweepCurve> {
    check_sorted("T", durations)?;
    if let Some(&bad) = durations.iter().find(|&&t| t <= 0.0) {
        return Err(Error::param("T", bad, "pulse duration must be positive"));
    }
    let points = durations
        .par_iter()
        .map(|&t| {
            analysis_for(t, (delay, delay), atom, policy)
                .and_then(|a| a.report(delay))
                .map(|r| SweepPoint {
                    value: t,
                    eta1_sq: r.eta1_sq,
                    eta2: r.eta2,
                })
                .map_err(|e| e.at("T", t))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepCurve {
        parameter: SweepParameter::Duration,
        fixed_value: delay,
        points,
    })
}

/// `η₁²` and `η₂` against filter delay at a fixed pulse duration.
///
/// One grid covering every requested delay is used for the whole curve.
pub fn sweep_over_delay(
    duration: f64,
    delays: &[f64],
    atom: &AtomParams,
    policy: &GridPolicy,
) -> Result<SweepCurve> {
    check_sorted("l", delays)?;
    let span = (delays[0], delays[delays.len() - 1]);
    let analysis = analysis_for(duration, span, atom, policy).map_err(|e| e.at("T", duration))?;
    let points = delays
        .par_iter()
        .map(|&l| {
            analysis
                .report(l)
                .map(|r| SweepPoint {
                    value: l,
                    eta1_sq: r.eta1_sq,
                    eta2: r.eta2,
                })
                .map_err(|e| e.at("l", l))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepCurve {
        parameter: SweepParameter::Delay,
        fixed_value: duration,
        points,
    })
}

/// Delay range scanned for sign changes of `η₁² - η₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayScan {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    /// Bisection stops once the bracket is narrower than this.
    pub tolerance: f64,
}

impl DelayScan {
    /// `l ∈ [0, 4]/Γ` at `0.05/Γ` resolution.
    pub fn for_atom(atom: &AtomParams) -> Self {
        let unit = atom.time_unit();
        Self {
            min: 0.0,
            max: 4.0 * unit,
            steps: 81,
            tolerance: 1e-10 * unit,
        }
    }

    fn nodes(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.steps)
    }
}

/// `steps` evenly spaced values from `min` to `max` inclusive.
pub fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![min],
        _ => (0..steps)
            .map(|k| {
                if k + 1 == steps {
                    max
                } else {
                    min + (max - min) * k as f64 / (steps - 1) as f64
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub delay: f64,
    pub eta1_sq: f64,
    pub eta2: f64,
    /// `|η₁² - η₂|` at `delay`.
    pub residual: f64,
}

impl Crossing {
    pub fn ns_valid(&self) -> bool {
        self.eta2 > 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingSearch {
    pub duration: f64,
    /// Best gate-valid root: largest `η₁²`, ties toward smaller delay.
    pub crossing: Option<Crossing>,
    /// Every root found, gate-valid or not, in increasing delay.
    pub roots: Vec<Crossing>,
    /// `(l, η₁² - η₂)` at the scan nodes.
    pub scanned: Vec<(f64, f64)>,
}

fn crossing_at(analysis: &FilterAnalysis, delay: f64) -> Result<Crossing> {
    let r = analysis.report(delay)?;
    Ok(Crossing {
        delay,
        eta1_sq: r.eta1_sq,
        eta2: r.eta2,
        residual: r.residual.abs(),
    })
}

fn bisect(
    f: impl Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
    tolerance: f64,
) -> Result<f64> {
    for _ in 0..200 {
        if hi - lo <= tolerance {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Roots the linear-transmittance condition in the delay at fixed duration.
pub fn find_crossing(
    duration: f64,
    atom: &AtomParams,
    policy: &GridPolicy,
    scan: &DelayScan,
) -> Result<CrossingSearch> {
    if !(scan.max > scan.min) || scan.steps < 2 {
        return Err(Error::param(
            "l",
            scan.max,
            format!(
                "delay scan [{}, {}] with {} steps is empty",
                scan.min, scan.max, scan.steps
            ),
        ));
    }
    let analysis = analysis_for(duration, (scan.min, scan.max), atom, policy)?;
    let residual = |l: f64| analysis.report(l).map(|r| r.residual);

    let scanned = scan
        .nodes()
        .into_iter()
        .map(|l| residual(l).map(|h| (l, h)))
        .collect::<Result<Vec<_>>>()?;

    let mut roots = Vec::new();
    for (k, w) in scanned.windows(2).enumerate() {
        let ((l0, h0), (l1, h1)) = (w[0], w[1]);
        if h0 == 0.0 {
            roots.push(crossing_at(&analysis, l0)?);
        } else if h1 != 0.0 && (h0 > 0.0) != (h1 > 0.0) {
            let root = bisect(residual, l0, l1, h0, scan.tolerance)?;
            roots.push(crossing_at(&analysis, root)?);
        }
        if k + 2 == scanned.len() && h1 == 0.0 {
            roots.push(crossing_at(&analysis, l1)?);
        }
    }

    let mut crossing: Option<Crossing> = None;
    for root in roots.iter().filter(|r| r.ns_valid()) {
        if crossing.is_none_or(|best| root.eta1_sq > best.eta1_sq) {
            crossing = Some(*root);
        }
    }

    Ok(CrossingSearch {
        duration,
        crossing,
        roots,
        scanned,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub duration_min: f64,
    pub duration_max: f64,
    pub resolution: f64,
    /// Golden-section search stops once the duration bracket is this narrow.
    pub duration_tolerance: f64,
    pub delay_scan: DelayScan,
    /// Scan points within this much of the best transmittance form the plateau.
    pub plateau_band: f64,
}

impl OptimizeOptions {
    /// `T ∈ [0.5, 3]/Γ` at `0.05/Γ`, refined to `1e-4/Γ`.
    pub fn for_atom(atom: &AtomParams) -> Self {
        let unit = atom.time_unit();
        Self {
            duration_min: 0.5 * unit,
            duration_max: 3.0 * unit,
            resolution: 0.05 * unit,
            duration_tolerance: 1e-4 * unit,
            delay_scan: DelayScan::for_atom(atom),
            plateau_band: 0.01,
        }
    }

    fn durations(&self) -> Vec<f64> {
        if !(self.duration_max >= self.duration_min) {
            return Vec::new();
        }
        let steps =
            ((self.duration_max - self.duration_min) / self.resolution + 1e-9).floor() as usize + 1;
        linspace(
            self.duration_min,
            self.duration_min + (steps - 1) as f64 * self.resolution,
            steps,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocusPoint {
    pub duration: f64,
    pub crossing: Option<Crossing>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimumResult {
    pub duration: f64,
    pub delay: f64,
    pub transmittance: f64,
    pub eta2: f64,
    pub residual: f64,
    /// Roots of `η₁² = η₂` in the delay scan at the optimal duration.
    pub branch_count: usize,
    /// Contiguous duration range around the optimum whose scan crossings stay
    /// within `plateau_band` of the best transmittance.
    pub plateau: (f64, f64),
    /// Best crossing at every scanned duration.
    pub locus: Vec<LocusPoint>,
}

impl OptimumResult {
    pub fn plateau_width(&self) -> f64 {
        self.plateau.1 - self.plateau.0
    }
}

fn golden_section_max(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    tolerance: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tolerance {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn scan_diagnostics(options: &OptimizeOptions, searches: &[CrossingSearch]) -> String {
    let mut out = format!(
        "scanned T in [{}, {}] at step {} ({} durations), l in [{}, {}]",
        options.duration_min,
        options.duration_max,
        options.resolution,
        searches.len(),
        options.delay_scan.min,
        options.delay_scan.max
    );
    for s in searches {
        let (lo, hi) = s
            .scanned
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, h)| {
                (lo.min(h), hi.max(h))
            });
        out.push_str(&format!(
            "\n  T = {:.4}: {} root(s), {} gate-valid, eta1^2 - eta2 in [{:.4e}, {:.4e}]",
            s.duration,
            s.roots.len(),
            s.roots.iter().filter(|r| r.ns_valid()).count(),
            lo,
            hi
        ));
    }
    out
}

/// Maximizes the linear transmittance over pulse duration.
pub fn optimize(
    atom: &AtomParams,
    policy: &GridPolicy,
    options: &OptimizeOptions,
) -> Result<OptimumResult> {
    if !(options.resolution > 0.0) {
        return Err(Error::param(
            "resolution",
            options.resolution,
            "must be positive",
        ));
    }
    if !(options.duration_min > 0.0) {
        return Err(Error::param(
            "T",
            options.duration_min,
            "pulse duration must be positive",
        ));
    }
    let durations = options.durations();
    let searches = durations
        .par_iter()
        .map(|&t| find_crossing(t, atom, policy, &options.delay_scan).map_err(|e| e.at("T", t)))
        .collect::<Result<Vec<_>>>()?;

    let mut best: Option<(usize, f64)> = None;
    for (k, s) in searches.iter().enumerate() {
        if let Some(c) = s.crossing {
            if best.is_none_or(|(_, v)| c.eta1_sq > v) {
                best = Some((k, c.eta1_sq));
            }
        }
    }
    let Some((k_best, scan_best)) = best else {
        return Err(Error::NoCrossing {
            diagnostics: scan_diagnostics(options, &searches),
        });
    };

    let objective = |t: f64| {
        find_crossing(t, atom, policy, &options.delay_scan)
            .ok()
            .and_then(|s| s.crossing)
            .map_or(f64::NEG_INFINITY, |c| c.eta1_sq)
    };
    let lo = durations[k_best.saturating_sub(1)];
    let hi = durations[(k_best + 1).min(durations.len() - 1)];
    let duration = if hi > lo {
        let (t, value) = golden_section_max(objective, lo, hi, options.duration_tolerance);
        if value >= scan_best {
            t
        } else {
            durations[k_best]
        }
    } else {
        durations[k_best]
    };

    let search = find_crossing(duration, atom, policy, &options.delay_scan)?;
    let crossing = search.crossing.ok_or_else(|| Error::NoCrossing {
        diagnostics: format!("refined duration {duration} lost its crossing"),
    })?;

    let within = |k: usize| {
        searches[k]
            .crossing
            .is_some_and(|c| scan_best - c.eta1_sq < options.plateau_band)
    };
    let mut k_lo = k_best;
    while k_lo > 0 && within(k_lo - 1) {
        k_lo -= 1;
    }
    let mut k_hi = k_best;
    while k_hi + 1 < durations.len() && within(k_hi + 1) {
        k_hi += 1;
    }

    Ok(OptimumResult {
        duration,
        delay: crossing.delay,
        transmittance: crossing.eta1_sq,
        eta2: crossing.eta2,
        residual: crossing.residual,
        branch_count: search.roots.len(),
        plateau: (durations[k_lo], durations[k_hi]),
        locus: searches
            .iter()
            .map(|s| LocusPoint {
                duration: s.duration,
                crossing: s.crossing,
            })
            .collect(),
    })
}
