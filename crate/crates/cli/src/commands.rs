//! The five subcommands. Each one builds its inputs from the merged
//! [`RunConfig`], runs, and emits a report: JSON for everything except
//! `bench`, which emits CSV. Reports go to --out when given, stdout
//! otherwise; `propagate` reserves --out for the wavefunction and always
//! prints its metrics to stdout.

use std::path::Path;
use std::time::Instant;

use lct_core::chirp_fft::apply_kernel_fast_with_route;
use lct_core::kernel::{apply_kernel_direct, build_kernel_from_family};
use lct_core::schrodinger::{evolve_cn, EvolutionSpec};
use lct_core::symplectic::hj_compatibility;
use lct_core::{Grid, PropagatorKernel, SpaceLabel, WaveFunction};
use serde::Serialize;

use crate::config::{InitialState, RunConfig, SystemKind};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Direct,
    Fast,
}

impl Method {
    fn label(&self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Fast => "fast",
        }
    }
}

fn emit_text(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Config(format!("writing {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(report: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Config(format!("serializing report: {e}")))?;
    text.push('\n');
    emit_text(&text, out)
}

fn apply_kernel(
    kernel: &PropagatorKernel,
    psi: &WaveFunction,
    out_grid: &Grid,
    method: Method,
) -> Result<(WaveFunction, Option<&'static str>), CliError> {
    match method {
        Method::Direct => Ok((apply_kernel_direct(kernel, psi, out_grid)?, None)),
        Method::Fast => {
            let (wf, route) = apply_kernel_fast_with_route(kernel, psi, out_grid)?;
            Ok((wf, Some(route.label())))
        }
    }
}

fn positive_time(config: &RunConfig) -> Result<f64, CliError> {
    let t = config.time;
    if !(t.is_finite() && t > 0.0) {
        return Err(CliError::Config(format!("time must be positive, got {t}")));
    }
    Ok(t)
}

#[derive(Serialize)]
struct GridJson {
    n: usize,
    origin: f64,
    spacing: f64,
}

impl From<&Grid> for GridJson {
    fn from(g: &Grid) -> Self {
        Self { n: g.len, origin: g.origin, spacing: g.spacing }
    }
}

#[derive(Serialize)]
struct ValidateRow {
    t: f64,
    det_error: f64,
    /// The position-position representation does not exist at this time.
    singular: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    hj_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hj_tol: Option<f64>,
    ok: bool,
}

#[derive(Serialize)]
struct ValidateReport<'a> {
    command: &'static str,
    system: &'static str,
    family: &'a str,
    analytic_rates: bool,
    horizon: f64,
    worst_det_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    worst_hj_residual: Option<f64>,
    rows: Vec<ValidateRow>,
    pass: bool,
}

/// Sweeps 32 times in (0, T] and checks ad - bc = 1 and the compatibility
/// condition a = -m·db/dt at each. Singular times keep their determinant row
/// but skip the compatibility check, which is undefined there.
pub fn cmd_validate(config: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let constants = config.constants()?;
    let family = config.family(&constants)?;
    let horizon = positive_time(config)?;
    let det_tol = config.tolerances.determinant;

    let mut rows = Vec::with_capacity(32);
    let mut worst_det = 0.0f64;
    let mut worst_hj: Option<f64> = None;
    for k in 1..=32u32 {
        let t = horizon * f64::from(k) / 32.0;
        let det_error = (family.matrix_at(t).determinant() - 1.0).abs();
        let det_ok = det_error <= det_tol;
        worst_det = worst_det.max(det_error);
        if family.is_singular(t) {
            rows.push(ValidateRow {
                t,
                det_error,
                singular: true,
                hj_residual: None,
                hj_tol: None,
                ok: det_ok,
            });
            continue;
        }
        let report = hj_compatibility(&family, t, &constants)?;
        let tol = config.tolerances.hj_residual.unwrap_or(report.tol);
        let hj_ok = report.residual <= tol;
        worst_hj = Some(worst_hj.unwrap_or(0.0).max(report.residual));
        rows.push(ValidateRow {
            t,
            det_error,
            singular: false,
            hj_residual: Some(report.residual),
            hj_tol: Some(tol),
            ok: det_ok && hj_ok,
        });
    }

    let failed = rows.iter().filter(|r| !r.ok).count();
    let report = ValidateReport {
        command: "validate",
        system: config.system.name(),
        family: family.label(),
        analytic_rates: family.has_analytic_rates(),
        horizon,
        worst_det_error: worst_det,
        worst_hj_residual: worst_hj,
        rows,
        pass: failed == 0,
    };
    emit_json(&report, out)?;
    if failed > 0 {
        return Err(CliError::CheckFailed(format!(
            "validation failed at {failed} of 32 sampled times (worst compatibility residual {:.3e})",
            worst_hj.unwrap_or(f64::NAN)
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct MatrixJson {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

#[derive(Serialize)]
struct PrefactorJson {
    re: f64,
    im: f64,
    modulus: f64,
    argument: f64,
}

#[derive(Serialize)]
struct PhaseJson {
    /// (old-side, new-side) variable names.
    variables: (&'static str, &'static str),
    cross: f64,
    xx: f64,
    yy: f64,
}

#[derive(Serialize)]
struct SamplesJson {
    /// The new-side argument is pinned to the grid midpoint; rows sweep the
    /// old-side argument over the grid.
    fixed_new_coordinate: f64,
    columns: &'static str,
    rows: Vec<(usize, f64, f64, f64)>,
}

#[derive(Serialize)]
struct KernelReport {
    command: &'static str,
    system: &'static str,
    time: f64,
    hbar: f64,
    mass: f64,
    representation: &'static str,
    matrix: MatrixJson,
    caustic_crossings: usize,
    prefactor: PrefactorJson,
    phase: PhaseJson,
    grid: GridJson,
    samples: SamplesJson,
}

/// Builds the position-position kernel at the configured time and dumps its
/// closed-form pieces plus one sampled column of |K| and arg K.
pub fn cmd_kernel(config: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let constants = config.constants()?;
    let family = config.family(&constants)?;
    let t = positive_time(config)?;
    let kernel = build_kernel_from_family(&family, t, &constants)?;
    let grid = config.effective_grid()?;

    let y_mid = grid.coordinate(grid.len / 2);
    let rows = (0..grid.len)
        .map(|i| {
            let x = grid.coordinate(i);
            let v = kernel.value(x, y_mid);
            (i, x, v.norm(), v.arg())
        })
        .collect();

    let m = kernel.matrix();
    let prefactor = kernel.prefactor();
    let phase = kernel.phase();
    let report = KernelReport {
        command: "kernel",
        system: config.system.name(),
        time: t,
        hbar: constants.hbar,
        mass: constants.mass,
        representation: kernel.representation().label(),
        matrix: MatrixJson { a: m.a, b: m.b, c: m.c, d: m.d },
        caustic_crossings: kernel.caustic_crossings(),
        prefactor: PrefactorJson {
            re: prefactor.re,
            im: prefactor.im,
            modulus: prefactor.norm(),
            argument: prefactor.arg(),
        },
        phase: PhaseJson {
            variables: phase.kind.variables(),
            cross: phase.cross,
            xx: phase.xx,
            yy: phase.yy,
        },
        grid: GridJson::from(&grid),
        samples: SamplesJson {
            fixed_new_coordinate: y_mid,
            columns: "index,coordinate,abs,arg",
            rows,
        },
    };
    emit_json(&report, out)
}

#[derive(Serialize)]
struct PropagateReport {
    command: &'static str,
    system: &'static str,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    route: Option<&'static str>,
    time: f64,
    input_grid: GridJson,
    output_grid: GridJson,
    norm: f64,
    mean: f64,
    variance: f64,
    runtime_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    output_path: Option<String>,
}

/// Applies the kernel to the configured initial state. The evolved
/// wavefunction goes to --out (CSV plus sidecar); metrics go to stdout.
/// With a file input and no explicit grid the output reuses the input grid,
/// so runs chain; an explicit grid resamples through the kernel quadrature.
pub fn cmd_propagate(
    config: &RunConfig,
    method: Method,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let constants = config.constants()?;
    let family = config.family(&constants)?;
    let t = positive_time(config)?;
    let kernel = build_kernel_from_family(&family, t, &constants)?;
    let psi0 = config.initial_state(&constants)?;
    let out_grid =
        if config.grid.is_some() { config.effective_grid()? } else { *psi0.grid() };

    let start = Instant::now();
    let (psi_out, route) = apply_kernel(&kernel, &psi0, &out_grid, method)?;
    let runtime_seconds = start.elapsed().as_secs_f64();

    if let Some(p) = out {
        psi_out.write_files(p, &constants)?;
    }
    let moments = psi_out.moments(constants.hbar);
    let report = PropagateReport {
        command: "propagate",
        system: config.system.name(),
        method: method.label(),
        route,
        time: t,
        input_grid: GridJson::from(psi0.grid()),
        output_grid: GridJson::from(&out_grid),
        norm: moments.norm,
        mean: moments.mean,
        variance: moments.variance,
        runtime_seconds,
        output_path: out.map(|p| p.display().to_string()),
    };
    emit_json(&report, None)
}

#[derive(Serialize)]
struct CompareReport {
    command: &'static str,
    system: &'static str,
    oracle_system: &'static str,
    /// Set when the oracle potential was deliberately not the one generating
    /// the kernel; a large deviation is then the expected outcome.
    potential_mismatch: bool,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    route: Option<&'static str>,
    time: f64,
    grid: GridJson,
    cn_steps: usize,
    cn_dt: f64,
    l2_deviation: f64,
    max_pointwise_deviation: f64,
    overlap_modulus: f64,
    tolerance: f64,
    pass: bool,
}

/// Propagates the same initial state through the kernel and through the
/// Crank-Nicolson integrator, then reports the deviation between the two.
pub fn cmd_compare(
    config: &RunConfig,
    method: Method,
    oracle: Option<SystemKind>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let constants = config.constants()?;
    let family = config.family(&constants)?;
    let t = positive_time(config)?;
    let kernel = build_kernel_from_family(&family, t, &constants)?;

    let oracle_kind = oracle.unwrap_or(config.system);
    let potential = config.oracle_potential(oracle_kind, &constants)?;

    let psi0 = config.initial_state(&constants)?;
    let grid = *psi0.grid();
    let (kernel_out, route) = apply_kernel(&kernel, &psi0, &grid, method)?;

    let spec = EvolutionSpec::for_duration(grid, potential, t, constants)?;
    let cn_out = evolve_cn(&spec, &psi0.relabeled(SpaceLabel::OldPosition))?;

    let l2_deviation = kernel_out.l2_distance(&cn_out)?;
    let max_pointwise_deviation = kernel_out
        .samples()
        .iter()
        .zip(cn_out.samples())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let overlap_modulus = kernel_out.overlap(&cn_out)?.norm();

    let tolerance = config.tolerances.compare_l2;
    let potential_mismatch = oracle_kind != config.system;
    let pass = l2_deviation <= tolerance;
    let report = CompareReport {
        command: "compare",
        system: config.system.name(),
        oracle_system: oracle_kind.name(),
        potential_mismatch,
        method: method.label(),
        route,
        time: t,
        grid: GridJson::from(&grid),
        cn_steps: spec.steps,
        cn_dt: spec.dt,
        l2_deviation,
        max_pointwise_deviation,
        overlap_modulus,
        tolerance,
        pass,
    };
    emit_json(&report, out)?;
    if !pass {
        let hint = if potential_mismatch {
            " (oracle potential differs from the system on purpose)"
        } else {
            ""
        };
        return Err(CliError::CheckFailed(format!(
            "kernel and Crank-Nicolson disagree: L2 deviation {l2_deviation:.3e} exceeds {tolerance:.1e}{hint}"
        )));
    }
    Ok(())
}

fn max_rel_deviation(a: &WaveFunction, b: &WaveFunction) -> f64 {
    let peak = b.samples().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let worst =
        a.samples().iter().zip(b.samples()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    worst / peak
}

/// Times direct quadrature against the fast path over a grid-size sweep and
/// emits CSV. Every grid is sized from the kernel's own resolution rule, so a
/// size whose admissible window cannot hold the packet is skipped (noted on
/// stderr) rather than benchmarked on a grid the library would refuse.
pub fn cmd_bench(config: &RunConfig, max_n: usize, out: Option<&Path>) -> Result<(), CliError> {
    let constants = config.constants()?;
    let family = config.family(&constants)?;
    let t = positive_time(config)?;
    let kernel = build_kernel_from_family(&family, t, &constants)?;

    let sigma0 = match &config.initial {
        InitialState::Gaussian { sigma0, .. } => *sigma0,
        InitialState::File { .. } => 1.0,
    };
    let phase = kernel.phase();
    // Largest centered window w (input grid = output grid) that still gives 9
    // samples per local phase period, one above the library's floor of 8. The
    // library measures the input-side frequency |cross*x + 2*yy*y| with x at
    // the grid corners and y across the packet's support, which ends where the
    // amplitude drops below SUPPORT_FLOOR of the peak.
    let cross = phase.cross.abs();
    let two_yy = 2.0 * phase.yy.abs();
    let support = 2.0 * sigma0 * (-lct_core::tolerances::SUPPORT_FLOOR.ln()).sqrt();
    let mut csv = String::from("N,t_direct,t_fast,ratio,deviation\n");
    let mut worst_deviation = 0.0f64;
    let mut benched = 0usize;

    for &n in &[256usize, 512, 1024, 2048, 4096, 8192, 16384] {
        if n > max_n {
            break;
        }
        // samples(w) = 2*pi*hbar*(n-1) / (w * max_freq(w)) = 9, where
        // max_freq = (cross + 2|yy|)*w/2 while the packet fills the grid and
        // cross*w/2 + 2|yy|*support once the grid is wider than the support.
        let budget = 2.0 * std::f64::consts::PI * constants.hbar * (n - 1) as f64 / 9.0;
        let mut span = (2.0 * budget / (cross + two_yy)).sqrt();
        if span > 2.0 * support {
            let b = two_yy * support;
            span = ((b * b + 2.0 * cross * budget).sqrt() - b) / cross;
        }
        if !span.is_finite() || span < 13.0 * sigma0 {
            eprintln!(
                "bench: N = {n} skipped, admissible window {span:.2} is below {:.2}",
                13.0 * sigma0
            );
            continue;
        }
        let spacing = span / (n - 1) as f64;
        let grid = Grid::new(-0.5 * span, spacing, n)?;
        let psi = WaveFunction::gaussian(
            grid,
            SpaceLabel::NewPosition,
            sigma0,
            0.0,
            0.0,
            &constants,
        )?;

        let start = Instant::now();
        let direct = apply_kernel_direct(&kernel, &psi, &grid)?;
        let t_direct = start.elapsed().as_secs_f64();

        let mut t_fast = f64::INFINITY;
        let mut fast = None;
        for _ in 0..3 {
            let start = Instant::now();
            let (wf, _) = apply_kernel_fast_with_route(&kernel, &psi, &grid)?;
            t_fast = t_fast.min(start.elapsed().as_secs_f64());
            fast = Some(wf);
        }
        let deviation = max_rel_deviation(&fast.expect("three runs"), &direct);
        worst_deviation = worst_deviation.max(deviation);
        benched += 1;
        csv.push_str(&format!(
            "{n},{t_direct:.6e},{t_fast:.6e},{:.2},{deviation:.3e}\n",
            t_direct / t_fast
        ));
    }

    emit_text(&csv, out)?;
    if benched == 0 {
        return Err(CliError::CheckFailed(
            "no grid size in the sweep could hold the packet at the required resolution".into(),
        ));
    }
    let tol = config.tolerances.bench_deviation;
    if worst_deviation > tol {
        return Err(CliError::CheckFailed(format!(
            "fast path deviates from direct quadrature by {worst_deviation:.3e}, above {tol:.1e}"
        )));
    }
    Ok(())
}
