use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use nsgate_core::optimizer::linspace;
use nsgate_core::{
    one_photon_output, optimize, success_probability, sweep_over_delay, sweep_over_duration,
    two_photon_output, FilterAnalysis, InputState, OptimizeOptions, PulseMode,
};

use crate::config::{non_negative, positive, ConfigFile, RunConfig};
use crate::output::{emit, sig, Table};
use crate::Failure;

/// Amplitudes this close to unit norm are rescaled with a warning.
const STATE_NORM_SLACK: f64 = 1e-6;

fn steps_at_least_one(steps: usize) -> Result<(), Failure> {
    if steps == 0 {
        Err(Failure::usage(anyhow!("--steps must be at least 1")))
    } else {
        Ok(())
    }
}

fn ordered(lo_name: &str, lo: f64, hi_name: &str, hi: f64) -> Result<(), Failure> {
    if hi > lo {
        Ok(())
    } else {
        Err(Failure::usage(anyhow!(
            "{hi_name} ({hi}) must exceed {lo_name} ({lo})"
        )))
    }
}

pub struct Range {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub steps: Option<usize>,
}

pub fn sweep_t(mut cfg: RunConfig, file: &ConfigFile, range: Range) -> Result<(), Failure> {
    let unit = cfg.unit();
    let tmin = file.pick(range.min, "tmin")?.unwrap_or(0.1 * unit);
    let tmax = file.pick(range.max, "tmax")?.unwrap_or(5.0 * unit);
    let steps = file.pick(range.steps, "steps")?.unwrap_or(99);
    positive("--tmin", tmin)?;
    ordered("--tmin", tmin, "--tmax", tmax)?;
    steps_at_least_one(steps)?;

    cfg.note("l", sig(cfg.delay));
    cfg.note("tmin", sig(tmin));
    cfg.note("tmax", sig(tmax));
    cfg.note("steps", steps.to_string());

    let curve = sweep_over_duration(
        cfg.delay,
        &linspace(tmin, tmax, steps),
        &cfg.atom()?,
        &cfg.policy(),
    )?;
    let mut table = Table::new(&cfg.header("sweep-t", file), "T,eta1_sq,eta2");
    for p in &curve.points {
        table.row(&[p.value, p.eta1_sq, p.eta2]);
    }
    emit(cfg.out.as_deref(), &table.into_string())
}

pub fn sweep_l(mut cfg: RunConfig, file: &ConfigFile, range: Range) -> Result<(), Failure> {
    let unit = cfg.unit();
    let lmin = file.pick(range.min, "lmin")?.unwrap_or(0.0);
    let lmax = file.pick(range.max, "lmax")?.unwrap_or(4.0 * unit);
    let steps = file.pick(range.steps, "steps")?.unwrap_or(200);
    non_negative("--lmin", lmin)?;
    ordered("--lmin", lmin, "--lmax", lmax)?;
    steps_at_least_one(steps)?;

    cfg.note("t", sig(cfg.duration));
    cfg.note("lmin", sig(lmin));
    cfg.note("lmax", sig(lmax));
    cfg.note("steps", steps.to_string());

    let curve = sweep_over_delay(
        cfg.duration,
        &linspace(lmin, lmax, steps),
        &cfg.atom()?,
        &cfg.policy(),
    )?;
    let mut table = Table::new(&cfg.header("sweep-l", file), "l,eta1_sq,eta2");
    for p in &curve.points {
        table.row(&[p.value, p.eta1_sq, p.eta2]);
    }
    emit(cfg.out.as_deref(), &table.into_string())
}

pub struct OptimizeArgs {
    pub tmin: Option<f64>,
    pub tmax: Option<f64>,
    pub resolution: Option<f64>,
    pub locus: Option<PathBuf>,
}

pub fn optimize_cmd(
    mut cfg: RunConfig,
    file: &ConfigFile,
    args: OptimizeArgs,
) -> Result<(), Failure> {
    let atom = cfg.atom()?;
    let defaults = OptimizeOptions::for_atom(&atom);
    let options = OptimizeOptions {
        duration_min: file
            .pick(args.tmin, "tmin")?
            .unwrap_or(defaults.duration_min),
        duration_max: file
            .pick(args.tmax, "tmax")?
            .unwrap_or(defaults.duration_max),
        resolution: file
            .pick(args.resolution, "resolution")?
            .unwrap_or(defaults.resolution),
        ..defaults
    };
    positive("--tmin", options.duration_min)?;
    positive("--tmax", options.duration_max)?;
    positive("--resolution", options.resolution)?;
    let locus_path = file.pick(args.locus, "locus")?;

    cfg.note("tmin", sig(options.duration_min));
    cfg.note("tmax", sig(options.duration_max));
    cfg.note("resolution", sig(options.resolution));
    cfg.note("lmin", sig(options.delay_scan.min));
    cfg.note("lmax", sig(options.delay_scan.max));

    let opt = optimize(&atom, &cfg.policy(), &options)?;

    let header = cfg.header("optimize", file);
    let mut report = header.clone();
    let _ = writeln!(
        report,
        "optimal pulse duration   T* = {}",
        sig(opt.duration)
    );
    let _ = writeln!(report, "filter delay             l* = {}", sig(opt.delay));
    let _ = writeln!(
        report,
        "transmittance  eta1^2 = eta2 = {}",
        sig(opt.transmittance)
    );
    let _ = writeln!(
        report,
        "residual |eta1^2 - eta2|    = {}",
        sig(opt.residual)
    );
    let _ = writeln!(report, "crossing branches at T*     = {}", opt.branch_count);
    let _ = writeln!(
        report,
        "plateau (within {} of best) = [{}, {}], width {}",
        sig(options.plateau_band),
        sig(opt.plateau.0),
        sig(opt.plateau.1),
        sig(opt.plateau_width())
    );
    let _ = writeln!(
        report,
        "OPTIMUM T={} l={} transmittance={}",
        sig(opt.duration),
        sig(opt.delay),
        sig(opt.transmittance)
    );

    if let Some(path) = &locus_path {
        let mut table = Table::new(&header, "T,l,eta1_sq,eta2");
        for p in &opt.locus {
            if let Some(c) = p.crossing {
                table.row(&[p.duration, c.delay, c.eta1_sq, c.eta2]);
            }
        }
        emit(Some(path), &table.into_string())?;
    }
    emit(cfg.out.as_deref(), &report).inspect_err(|_| {
        if let Some(path) = &locus_path {
            let _ = std::fs::remove_file(path);
        }
    })
}

pub struct StateArgs {
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub at_optimum: bool,
}

pub fn state(mut cfg: RunConfig, file: &ConfigFile, args: StateArgs) -> Result<(), Failure> {
    let amplitude = |flag: Option<f64>, key: &str| -> Result<f64, Failure> {
        file.pick(flag, key)?
            .ok_or_else(|| Failure::usage(anyhow!("--{key} is required")))
    };
    let (c0, c1, c2) = (
        amplitude(args.c0, "c0")?,
        amplitude(args.c1, "c1")?,
        amplitude(args.c2, "c2")?,
    );
    let (input, rescaled) = InputState::normalized_within(c0, c1, c2, STATE_NORM_SLACK)
        .map_err(|e| Failure::usage(anyhow!(e)))?;
    if rescaled {
        eprintln!(
            "warning: amplitudes ({c0}, {c1}, {c2}) have |C|^2 = {}; rescaled to unit norm",
            c0 * c0 + c1 * c1 + c2 * c2
        );
    }
    let at_optimum = args.at_optimum || file.pick(None::<bool>, "at-optimum")?.unwrap_or(false);

    let atom = cfg.atom()?;
    let policy = cfg.policy();
    let (duration, delay) = if at_optimum {
        let opt = optimize(&atom, &policy, &OptimizeOptions::for_atom(&atom))?;
        (opt.duration, opt.delay)
    } else {
        (cfg.duration, cfg.delay)
    };
    cfg.note("t", sig(duration));
    cfg.note("l", sig(delay));
    cfg.note("at-optimum", at_optimum.to_string());
    cfg.note("c0", sig(input.c0()));
    cfg.note("c1", sig(input.c1()));
    cfg.note("c2", sig(input.c2()));

    let grid = policy.grid(duration, (0.0, delay), atom.gamma(), atom.speed())?;
    let pulse = PulseMode::gaussian(duration, atom.speed(), &grid)?;
    let r = FilterAnalysis::new(pulse, atom)?.report(delay)?;

    let mut text = cfg.header("state", file);
    let _ = writeln!(text, "eta1 = {}", sig(r.eta1));
    let _ = writeln!(text, "eta1_sq = {}", sig(r.eta1_sq));
    let _ = writeln!(text, "eta2 = {}", sig(r.eta2));
    let _ = writeln!(text, "ns_valid = {}", r.ns_valid);
    let _ = writeln!(text, "P_success = {}", sig(success_probability(&input, &r)));
    emit(cfg.out.as_deref(), &text)
}

pub struct DumpArgs {
    pub out2: Option<PathBuf>,
    pub stride: Option<usize>,
}

/// `dir/name.ext` becomes `dir/name_2photon.ext`.
fn companion_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_2photon.{}", ext.to_string_lossy()),
        None => format!("{stem}_2photon"),
    };
    path.with_file_name(name)
}

pub fn dump(mut cfg: RunConfig, file: &ConfigFile, args: DumpArgs) -> Result<(), Failure> {
    let out = cfg
        .out
        .clone()
        .ok_or_else(|| Failure::usage(anyhow!("dump writes two files and needs --out")))?;
    let out2 = file
        .pick(args.out2, "out2")?
        .unwrap_or_else(|| companion_path(&out));
    if out2 == out {
        return Err(Failure::usage(anyhow!("--out2 must differ from --out")));
    }

    let atom = cfg.atom()?;
    let grid = cfg
        .policy()
        .grid(cfg.duration, (0.0, cfg.delay), atom.gamma(), atom.speed())?;
    let pulse = PulseMode::gaussian(cfg.duration, atom.speed(), &grid)?;
    let phi = one_photon_output(&pulse, &atom)?;
    let field = two_photon_output(&pulse, &atom)?;

    let stride = file
        .pick(args.stride, "stride")?
        .unwrap_or_else(|| grid.len().div_ceil(100));
    if stride == 0 {
        return Err(Failure::usage(anyhow!("--stride must be at least 1")));
    }
    cfg.note("t", sig(cfg.duration));
    cfg.note("l", sig(cfg.delay));
    cfg.note("stride", stride.to_string());
    let header = cfg.header("dump", file);

    let mut one = Table::new(&header, "x,psi_in,psi_out_1photon");
    for (i, x) in grid.nodes().enumerate() {
        one.row(&[x, pulse.values()[i], phi.values()[i]]);
    }
    let mut two = Table::new(&header, "x1,x2,psi_out_2photon");
    for i in (0..grid.len()).step_by(stride) {
        for j in (0..grid.len()).step_by(stride) {
            two.row(&[grid.x(i), grid.x(j), field.value_at(i, j)]);
        }
    }
    emit(Some(&out), &one.into_string())?;
    emit(Some(&out2), &two.into_string()).inspect_err(|_| {
        let _ = std::fs::remove_file(&out);
    })
}
