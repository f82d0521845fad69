//! The five subcommands: spectrum scans, passage runs, gap sweeps, the
//! clock-circuit demo, and the sweep-discretization convergence study.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use aaqc::clocksim::{build_clock_hamiltonians, compose_circuit_aaqc, extract_output, ClockCircuit, Gate};
use aaqc::floquet::{discretize_saqc, uniform_time_grid, SaqcProblem};
use aaqc::models::{analyze_fair_grover, FairGroverParams};
use aaqc::numerics::{c64, eig_hermitian, eig_unitary, CMatrix};
use aaqc::passage::{linear_schedule, run_passage, running_time, GapAdaptedFamily, Schedule};
use aaqc::spectral::{circular_distance, detect_anholonomy, min_gap, track_curves, write_curves_csv};

use crate::config::*;
use crate::error::CliError;
use crate::model::{build_circuit, build_model};
use crate::output::{fmt_float, write_csv_header, write_json_file, SCHEMA_VERSION};
use crate::pool::run_indexed;

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn summary_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    out.with_file_name(format!("{stem}.summary.json"))
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

pub fn cmd_spectrum(
    cfg: &SpectrumConfig,
    out: &Path,
    _threads: usize,
    base_dir: &Path,
) -> Result<(), CliError> {
    if cfg.n_samples < 2 {
        return Err(CliError::config(
            "BadGrid",
            format!("n_samples must be at least 2, got {}", cfg.n_samples),
        ));
    }
    if !(cfg.s_to > cfg.s_from) {
        return Err(CliError::config(
            "BadGrid",
            format!("need s_to > s_from, got [{}, {}]", cfg.s_from, cfg.s_to),
        ));
    }
    let model = build_model(&cfg.model, base_dir)?;
    let curves = track_curves(&model.system, cfg.s_from, cfg.s_to, cfg.n_samples)?;

    let mut buf = Vec::new();
    write_csv_header(&mut buf, cfg, "s,curve_id,theta_lifted,theta_mod2pi,overlap_with_v")
        .map_err(CliError::from)?;
    // write_curves_csv emits its own header line; reuse only its body
    let mut body = Vec::new();
    write_curves_csv(&mut body, &curves)?;
    let body_text = String::from_utf8(body).expect("csv is ascii");
    for line in body_text.lines().skip(1) {
        writeln!(&mut buf, "{line}")?;
    }
    std::fs::write(out, &buf)?;

    let shift = if cfg.s_from.abs() < 1e-9 && (cfg.s_to - 2.0 * PI).abs() < 1e-9 {
        detect_anholonomy(&curves[0]).ok()
    } else {
        None
    };
    let report = min_gap(&model.system, &curves, 0);
    let summary = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "config": cfg,
        "anholonomy_shift": shift,
        "min_gap": report.min_gap,
        "s_at_min": report.s_at_min,
        "curve_index_pair": [report.curve_index_pair.0, report.curve_index_pair.1],
        "n_curves": curves.len(),
    });
    write_json_file(&summary_path(out), &summary)?;
    println!("{summary}");
    Ok(())
}

// ---------------------------------------------------------------------------
// passage
// ---------------------------------------------------------------------------

pub fn cmd_passage(
    cfg: &PassageConfig,
    out: &Path,
    threads: usize,
    base_dir: &Path,
) -> Result<(), CliError> {
    if !(cfg.epsilon > 0.0) {
        return Err(CliError::config(
            "BadConfig",
            format!("epsilon must be positive, got {}", cfg.epsilon),
        ));
    }
    if cfg.l_values.iter().any(|&l| l == 0) {
        return Err(CliError::config("BadConfig", "l_values must be positive".into()));
    }
    let model = build_model(&cfg.model, base_dir)?;
    let system = &model.system;

    let family = match cfg.schedule {
        ScheduleKind::Linear => None,
        ScheduleKind::RolandCerf => {
            let gap_fn = |s: f64| {
                let ed = eig_unitary(&system.floquet_operator(s)).expect("U_s stays unitary");
                let k = ed.values.len();
                let mut best = f64::INFINITY;
                for i in 0..k {
                    for j in (i + 1)..k {
                        best = best.min(circular_distance(ed.values[i], ed.values[j]));
                    }
                }
                best
            };
            Some(GapAdaptedFamily::new(
                gap_fn,
                2.0 * PI,
                cfg.rc_exponent,
                cfg.rc_fine_grid,
            )?)
        }
    };
    let make_schedule = |l: usize| -> Schedule {
        match &family {
            Some(f) => f.schedule(l),
            None => linear_schedule(2.0 * PI, l),
        }
    };

    let mut l_values = cfg.l_values.clone();
    l_values.sort_unstable();
    l_values.dedup();
    let errors: Vec<Result<f64, aaqc::Error>> = run_indexed(&l_values, threads, cfg.seed, |&l| {
        run_passage(system, &make_schedule(l), &model.psi0, &model.target, false)
            .map(|r| r.error)
    });
    let mut rows = Vec::new();
    for (&l, res) in l_values.iter().zip(errors) {
        rows.push(serde_json::json!({ "L": l, "error": res? }));
    }

    let found = if cfg.find_running_time {
        let l = running_time(
            system,
            make_schedule,
            &model.psi0,
            &model.target,
            cfg.epsilon,
            cfg.cap,
        )?;
        Some(l)
    } else {
        None
    };

    let doc = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "config": cfg,
        "rows": rows,
        "running_time": found.map(|l| serde_json::json!({ "epsilon": cfg.epsilon, "L": l })),
    });
    write_json_file(out, &doc)?;
    println!(
        "{}",
        serde_json::json!({ "out": out.display().to_string(), "running_time": found })
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// gap-scan
// ---------------------------------------------------------------------------

pub fn cmd_gap_scan(cfg: &GapScanConfig, out: &Path, threads: usize) -> Result<(), CliError> {
    if cfg.n_values.len() < 2 {
        return Err(CliError::config(
            "BadConfig",
            "need at least two database sizes to fit a slope".into(),
        ));
    }
    if !(cfg.a2 > 0.0 && cfg.a2 < 1.0) {
        return Err(CliError::config(
            "DegenerateChoice",
            format!("a2 must lie strictly inside (0, 1), got {}", cfg.a2),
        ));
    }
    let analyses = run_indexed(&cfg.n_values, threads, cfg.seed, |&n| {
        let mut params = FairGroverParams::with_database_size(n);
        params.a = cfg.a2.sqrt();
        params.b = (1.0 - cfg.a2).sqrt();
        params.alpha = cfg.alpha;
        params.e_p = cfg.e_p;
        params.t = cfg.t;
        params.theta = cfg.theta;
        params.n_samples = cfg.n_samples;
        analyze_fair_grover(&params)
    });

    let mut buf = Vec::new();
    write_csv_header(&mut buf, cfg, "N,min_gap,gap_perturbative,s_c")?;
    let mut points = Vec::new();
    for (&n, analysis) in cfg.n_values.iter().zip(analyses) {
        let a = analysis?;
        writeln!(
            &mut buf,
            "{n},{},{},{}",
            fmt_float(a.gap_numeric),
            fmt_float(a.gap_perturbative),
            fmt_float(a.s_c)
        )?;
        points.push(((n as f64).ln(), a.gap_numeric.ln()));
    }
    let slope = fit_slope(&points);
    writeln!(&mut buf, "# fit_slope={}", fmt_float(slope))?;
    std::fs::write(out, &buf)?;
    println!("{}", serde_json::json!({ "out": out.display().to_string(), "fit_slope": slope }));
    Ok(())
}

// ---------------------------------------------------------------------------
// clock-demo
// ---------------------------------------------------------------------------

pub fn cmd_clock_demo(cfg: &ClockDemoConfig, out: &Path, threads: usize) -> Result<(), CliError> {
    let circuit = build_circuit(cfg.n, &cfg.gates)?;
    let sys = compose_circuit_aaqc(&circuit, cfg.e_p, cfg.t).map_err(CliError::config_from_core)?;
    let res = run_passage(
        &sys,
        &linear_schedule(2.0 * PI, cfg.l_steps),
        &sys.minus,
        &sys.plus,
        false,
    )?;
    let (work, prob) = extract_output(&res.final_state, &circuit)?;
    let fidelity = work.inner(&circuit.output_state()).norm_sqr();

    // gap of the hopping chain vs clock length, measured on identity chains
    // (the restriction does not depend on the gate content)
    let lengths: Vec<usize> = (2..=cfg.delta_l_max.max(2)).collect();
    let deltas: Vec<Result<(f64, f64), aaqc::Error>> =
        run_indexed(&lengths, threads, cfg.seed, |&l| {
            let id = Gate::new(CMatrix::identity(2), vec![0])?;
            let chain = ClockCircuit::new(1, vec![id; l])?;
            let hams = build_clock_hamiltonians(&chain)?;
            let restricted = eig_hermitian(&hams.restricted_h_h)?;
            let full = eig_hermitian(&hams.h_p)?;
            Ok((restricted.values[1], full.values[1]))
        });
    let mut delta_rows = Vec::new();
    for (&l, d) in lengths.iter().zip(deltas) {
        let (delta, delta_full) = d?;
        delta_rows.push(serde_json::json!({
            "L": l,
            "delta": delta,
            "delta_full": delta_full,
            "delta_scaled": delta * ((l + 1) as f64).powi(2),
        }));
    }

    let doc = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "config": cfg,
        "T": sys.t,
        "W": sys.w_max,
        "delta": sys.delta,
        "delta_full": sys.delta_full,
        "passage_error": res.error,
        "post_selection_probability": prob,
        "fidelity": fidelity,
        "delta_vs_L": delta_rows,
    });
    write_json_file(out, &doc)?;
    println!(
        "{}",
        serde_json::json!({
            "out": out.display().to_string(),
            "fidelity": fidelity,
            "post_selection_probability": prob,
        })
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// discretize
// ---------------------------------------------------------------------------

pub fn cmd_discretize(cfg: &DiscretizeConfig, out: &Path, threads: usize) -> Result<(), CliError> {
    if cfg.l_values.iter().any(|&l| l == 0) || cfg.reference_l == 0 {
        return Err(CliError::config("BadConfig", "step counts must be positive".into()));
    }
    let z = cfg.z;
    let g = cfg.g;
    let t_max = cfg.t_max;
    let problem = SaqcProblem::new(
        move |s| {
            CMatrix::from_fn(2, 2, |i, j| match (i, j) {
                (0, 0) => c64(z * (1.0 - 2.0 * s), 0.0),
                (1, 1) => c64(z * (2.0 * s - 1.0), 0.0),
                _ => c64(g, 0.0),
            })
        },
        move |t| t / t_max,
        1.0,
        t_max,
    );
    let ground = eig_hermitian(&(problem.h_of_s)(0.0))?.vector(0);
    let run = |l: usize| -> Result<aaqc::CVector, aaqc::Error> {
        let ops = discretize_saqc(&problem, &uniform_time_grid(t_max, l))?;
        let mut psi = ground.clone();
        for u in &ops {
            psi = u.mul_vec(&psi);
        }
        Ok(psi)
    };
    let reference = run(cfg.reference_l)?;
    let deviations = run_indexed(&cfg.l_values, threads, cfg.seed, |&l| {
        run(l).map(|psi| psi.sub(&reference).norm())
    });

    let mut buf = Vec::new();
    write_csv_header(&mut buf, cfg, "L,deviation_from_reference")?;
    for (&l, d) in cfg.l_values.iter().zip(deviations) {
        writeln!(&mut buf, "{l},{}", fmt_float(d?))?;
    }
    std::fs::write(out, &buf)?;
    println!("{}", serde_json::json!({ "out": out.display().to_string() }));
    Ok(())
}
