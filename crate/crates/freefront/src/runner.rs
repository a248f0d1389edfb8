//! Run orchestration and artifact emission. Every subcommand bottoms out
//! here so that the CLI and the integration tests share one code path.
//! CSV output uses '.' decimals and 17 significant digits; identical configs
//! produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use serde::Serialize;

use crate::bounds::{self, AuditInput, BoundReport};
use crate::config::{RunConfig, Scheme};
use crate::direct;
use crate::error::Result;
use crate::fixedpoint::{self, LipschitzLedger, WindowRecord};
use crate::grid::{map_to_physical, sample_field, FrontState, ReferenceGrid};
use crate::model::{ProblemSpec, SampleBox};
use crate::parabolic::FrontPath;
use crate::trajectory::SCHEMA_VERSION;

/// Uniform solution record for either scheme.
pub struct RunData {
    pub scheme: &'static str,
    pub times: Vec<f64>,
    pub fronts: FrontPath,
    pub u_fields: Vec<Vec<f64>>,
    pub v_fields: Vec<Vec<f64>>,
    pub windows: Vec<WindowRecord>,
    pub ledger: Option<LipschitzLedger>,
    pub clip_mass_u: f64,
    pub clip_mass_v: f64,
    pub hopf_warnings: usize,
}

fn run_fixedpoint(cfg: &RunConfig, spec: &ProblemSpec, grid: &ReferenceGrid) -> Result<RunData> {
    let run = fixedpoint::continue_solution(
        spec,
        grid,
        &cfg.step_params(),
        cfg.tol_fp,
        cfg.window,
        cfg.max_iter,
    )?;
    Ok(RunData {
        scheme: "fixedpoint",
        times: run.times,
        fronts: run.fronts,
        u_fields: run.u_fields,
        v_fields: run.v_fields,
        windows: run.windows,
        ledger: Some(run.ledger),
        clip_mass_u: run.clip_mass_u,
        clip_mass_v: run.clip_mass_v,
        hopf_warnings: run.hopf_warnings,
    })
}

fn run_direct(cfg: &RunConfig, spec: &ProblemSpec, grid: &ReferenceGrid) -> Result<RunData> {
    let run = direct::direct_run(spec, &cfg.step_params(), grid)?;
    Ok(RunData {
        scheme: "direct",
        times: run.times,
        fronts: run.fronts,
        u_fields: run.u_fields,
        v_fields: run.v_fields,
        windows: Vec::new(),
        ledger: None,
        clip_mass_u: run.clip_mass_u,
        clip_mass_v: run.clip_mass_v,
        hopf_warnings: run.hopf_warnings,
    })
}

/// Runs the scheme(s) requested by the config.
pub fn execute_schemes(cfg: &RunConfig) -> Result<Vec<RunData>> {
    let spec = cfg.problem()?;
    let grid = cfg.grid();
    let mut out = Vec::new();
    if matches!(cfg.scheme, Scheme::Fixedpoint | Scheme::Both) {
        out.push(run_fixedpoint(cfg, &spec, &grid)?);
    }
    if matches!(cfg.scheme, Scheme::Direct | Scheme::Both) {
        out.push(run_direct(cfg, &spec, &grid)?);
    }
    Ok(out)
}

/// Full-precision decimal: 17 significant digits, locale independent.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text.as_bytes())?;
    Ok(())
}

fn fronts_csv(runs: &[RunData]) -> String {
    let mut s = String::new();
    if runs.len() == 1 {
        s.push_str("t,g,h,gdot,hdot\n");
        for fs in &runs[0].fronts.states {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                fmt_f(fs.t),
                fmt_f(fs.g),
                fmt_f(fs.h),
                fmt_f(fs.gdot),
                fmt_f(fs.hdot)
            );
        }
    } else {
        s.push_str(
            "t,g_fixedpoint,h_fixedpoint,gdot_fixedpoint,hdot_fixedpoint,\
             g_direct,h_direct,gdot_direct,hdot_direct,front_diff\n",
        );
        let (fp, dr) = (&runs[0], &runs[1]);
        for fs in &fp.fronts.states {
            let d = dr.fronts.at(fs.t);
            let diff = (fs.g - d.g).abs().max((fs.h - d.h).abs());
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                fmt_f(fs.t),
                fmt_f(fs.g),
                fmt_f(fs.h),
                fmt_f(fs.gdot),
                fmt_f(fs.hdot),
                fmt_f(d.g),
                fmt_f(d.h),
                fmt_f(d.gdot),
                fmt_f(d.hdot),
                fmt_f(diff)
            );
        }
    }
    s
}

fn snapshots_csv(runs: &[RunData], grid: &ReferenceGrid, stride: usize) -> String {
    let mut s = String::from("scheme,t,y,x,u,v\n");
    let stride = stride.max(1);
    for run in runs {
        let last = run.times.len() - 1;
        for k in (0..run.times.len()).filter(|&k| k % stride == 0 || k == last) {
            let fs = &run.fronts.states[k];
            for (j, &y) in grid.y.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    run.scheme,
                    fmt_f(run.times[k]),
                    fmt_f(y),
                    fmt_f(map_to_physical(fs, y)),
                    fmt_f(run.u_fields[k][j]),
                    fmt_f(run.v_fields[k][j])
                );
            }
        }
    }
    s
}

/// Summary of one scheme's run for report.json.
#[derive(Serialize)]
pub struct SchemeReport {
    pub scheme: String,
    pub steps: usize,
    pub t_end: f64,
    pub final_g: f64,
    pub final_h: f64,
    pub windows: Vec<WindowRecord>,
    pub ledger: Option<LipschitzLedger>,
    pub bound_report: BoundReport,
    pub clip_mass_u: f64,
    pub clip_mass_v: f64,
    pub hopf_warnings: usize,
}

#[derive(Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub runs: Vec<SchemeReport>,
    pub front_sup_diff: Option<f64>,
    pub ok: bool,
}

fn audit(run: &RunData, spec: &ProblemSpec, slack: f64) -> BoundReport {
    bounds::check_solution(
        &AuditInput {
            times: &run.times,
            fronts: &run.fronts,
            u_fields: &run.u_fields,
            v_fields: &run.v_fields,
        },
        spec,
        slack,
    )
}

/// Outcome handed to the CLI: artifact paths plus the overall status.
pub struct RunOutcome {
    pub ok: bool,
    pub report_path: PathBuf,
    pub report: RunReport,
}

/// `run` subcommand: executes the configured scheme(s), audits, and writes
/// fronts.csv, snapshots.csv, and report.json into the output directory.
pub fn execute_run(cfg: &RunConfig) -> Result<RunOutcome> {
    let spec = cfg.problem()?;
    let grid = cfg.grid();
    let runs = execute_schemes(cfg)?;
    fs::create_dir_all(&cfg.output_dir)?;

    write_text(&cfg.output_dir.join("fronts.csv"), &fronts_csv(&runs))?;
    write_text(
        &cfg.output_dir.join("snapshots.csv"),
        &snapshots_csv(&runs, &grid, cfg.snapshot_stride),
    )?;

    let mut scheme_reports = Vec::new();
    let mut ok = true;
    for run in &runs {
        let br = audit(run, &spec, cfg.slack);
        if cfg.strict_bounds && !br.ok() {
            ok = false;
        }
        let last = run.fronts.last();
        scheme_reports.push(SchemeReport {
            scheme: run.scheme.to_string(),
            steps: run.times.len() - 1,
            t_end: last.t,
            final_g: last.g,
            final_h: last.h,
            windows: run.windows.clone(),
            ledger: run.ledger.clone(),
            bound_report: br,
            clip_mass_u: run.clip_mass_u,
            clip_mass_v: run.clip_mass_v,
            hopf_warnings: run.hopf_warnings,
        });
    }

    let front_sup_diff = if runs.len() == 2 {
        let (fp, dr) = (&runs[0], &runs[1]);
        let mut worst = 0.0f64;
        for fs in &fp.fronts.states {
            let d = dr.fronts.at(fs.t);
            worst = worst.max((fs.g - d.g).abs()).max((fs.h - d.h).abs());
        }
        Some(worst)
    } else {
        None
    };

    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        runs: scheme_reports,
        front_sup_diff,
        ok,
    };
    let report_path = cfg.output_dir.join("report.json");
    fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;
    Ok(RunOutcome { ok, report_path, report })
}

/// One refinement level of a convergence study.
#[derive(Debug, Serialize)]
pub struct OrderRow {
    pub level: usize,
    pub n: usize,
    pub dt: f64,
    pub err_v: f64,
    pub err_u: f64,
    pub err_h: f64,
    pub order_v: Option<f64>,
    pub order_u: Option<f64>,
    pub order_h: Option<f64>,
}

pub struct ConvergeOutcome {
    pub rows: Vec<OrderRow>,
    pub monotone: bool,
    pub csv_path: PathBuf,
}

fn final_errors(
    coarse: &RunData,
    fine: &RunData,
    grid_c: &ReferenceGrid,
    grid_f: &ReferenceGrid,
) -> (f64, f64, f64) {
    let fs_c = coarse.fronts.last();
    let fs_f = fine.fronts.last();
    let u_c = coarse.u_fields.last().unwrap();
    let v_c = coarse.v_fields.last().unwrap();
    let u_f = fine.u_fields.last().unwrap();
    let v_f = fine.v_fields.last().unwrap();
    let mut err_u = 0.0f64;
    let mut err_v = 0.0f64;
    let probes = 101;
    let span = fs_f.h.min(fs_c.h) - fs_f.g.max(fs_c.g);
    let x0 = fs_f.g.max(fs_c.g);
    for i in 0..probes {
        let x = x0 + span * i as f64 / (probes - 1) as f64;
        err_u = err_u
            .max((sample_field(u_c, grid_c, fs_c, x) - sample_field(u_f, grid_f, fs_f, x)).abs());
        err_v = err_v
            .max((sample_field(v_c, grid_c, fs_c, x) - sample_field(v_f, grid_f, fs_f, x)).abs());
    }
    let err_h = (fs_c.h - fs_f.h).abs().max((fs_c.g - fs_f.g).abs());
    (err_v, err_u, err_h)
}

fn order_cell(o: &Option<f64>, errs_zero: bool) -> String {
    if errs_zero {
        "exact".to_string()
    } else {
        match o {
            Some(v) => fmt_f(*v),
            None => String::new(),
        }
    }
}

/// `converge` subcommand: halves dt and doubles the grid across `levels`
/// runs, measures final-time errors against the finest run, and emits
/// orders.csv. Non-monotone error decay is reported via `monotone = false`.
pub fn execute_converge(cfg: &RunConfig, levels: usize) -> Result<ConvergeOutcome> {
    assert!(levels >= 3, "converge needs at least 3 levels");
    let scheme_one = match cfg.scheme {
        Scheme::Direct => Scheme::Direct,
        _ => Scheme::Fixedpoint,
    };

    let mut runs: Vec<(RunConfig, ReferenceGrid, RunData)> = Vec::new();
    for level in 0..=levels {
        let mut c = cfg.clone();
        c.scheme = scheme_one;
        c.n = (cfg.n - 1) * (1usize << level) + 1;
        c.dt = cfg.dt / (1u32 << level) as f64;
        let spec = c.problem()?;
        let grid = c.grid();
        let data = match scheme_one {
            Scheme::Direct => run_direct(&c, &spec, &grid)?,
            _ => run_fixedpoint(&c, &spec, &grid)?,
        };
        runs.push((c, grid, data));
    }

    let (_, grid_ref, data_ref) = runs.last().unwrap();
    let mut rows: Vec<OrderRow> = Vec::new();
    for (level, (c, grid, data)) in runs.iter().take(levels).enumerate() {
        let (err_v, err_u, err_h) = final_errors(data, data_ref, grid, grid_ref);
        let (order_v, order_u, order_h) = if let Some(prev) = rows.last() {
            let r = |e_prev: f64, e: f64| {
                if e > 0.0 && e_prev > 0.0 {
                    Some((e_prev / e).log2())
                } else {
                    None
                }
            };
            (r(prev.err_v, err_v), r(prev.err_u, err_u), r(prev.err_h, err_h))
        } else {
            (None, None, None)
        };
        rows.push(OrderRow {
            level,
            n: c.n,
            dt: c.dt,
            err_v,
            err_u,
            err_h,
            order_v,
            order_u,
            order_h,
        });
    }

    let monotone = rows
        .windows(2)
        .all(|w| w[1].err_v <= w[0].err_v && w[1].err_h <= w[0].err_h);

    let all_zero =
        rows.iter().all(|r| r.err_v == 0.0 && r.err_u == 0.0 && r.err_h == 0.0);
    let mut csv = String::from("level,n,dt,err_v,err_u,err_h,order_v,order_u,order_h\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            r.level,
            r.n,
            fmt_f(r.dt),
            fmt_f(r.err_v),
            fmt_f(r.err_u),
            fmt_f(r.err_h),
            order_cell(&r.order_v, all_zero),
            order_cell(&r.order_u, all_zero),
            order_cell(&r.order_h, all_zero)
        );
    }
    fs::create_dir_all(&cfg.output_dir)?;
    let csv_path = cfg.output_dir.join("orders.csv");
    write_text(&csv_path, &csv)?;
    Ok(ConvergeOutcome { rows, monotone, csv_path })
}

/// One row of the verify table.
#[derive(Debug, Serialize)]
pub struct AuditRow {
    pub name: String,
    pub applicable: bool,
    pub pass: bool,
    pub detail: String,
}

pub struct VerifyOutcome {
    pub rows: Vec<AuditRow>,
    pub ok: bool,
}

fn trapezoid_mass(v: &[f64], grid: &ReferenceGrid, fs: &FrontState) -> f64 {
    let dx = grid.dy * fs.width() / 2.0;
    let mut s = 0.0;
    for j in 0..v.len() - 1 {
        s += 0.5 * (v[j] + v[j + 1]) * dx;
    }
    s
}

fn init_is_symmetric(spec: &ProblemSpec) -> bool {
    let sym = |a: &[f64]| {
        a.iter()
            .zip(a.iter().rev())
            .all(|(p, q)| (p - q).abs() <= 1e-12 * (1.0 + p.abs()))
    };
    sym(&spec.init.u0) && sym(&spec.init.v0)
}

fn f2_is_zero(spec: &ProblemSpec) -> bool {
    let bx = SampleBox {
        tau: 1.0,
        l: 2.0 * spec.init.h0,
        k1: spec.init.max_u0() + 1.0,
        k2: spec.init.max_v0() + 1.0,
    };
    let (_, sup2) = crate::model::sup_abs(&spec.reactions, bx, 16);
    sup2 <= 1e-12
}

/// `verify` subcommand: runs both schemes and evaluates the invariant suite.
/// With `inject` set, a deliberately corrupted copy of the trajectory must be
/// caught by the audit (harness self-check).
pub fn execute_verify(cfg: &RunConfig, inject: bool) -> Result<VerifyOutcome> {
    let spec = cfg.problem()?;
    let grid = cfg.grid();
    let mut cfg_both = cfg.clone();
    cfg_both.scheme = Scheme::Both;
    let runs = execute_schemes(&cfg_both)?;

    let mut rows: Vec<AuditRow> = Vec::new();
    let mut push = |name: &str, applicable: bool, pass: bool, detail: String| {
        rows.push(AuditRow { name: name.to_string(), applicable, pass, detail });
    };

    let symmetric = init_is_symmetric(&spec) && (spec.mu - spec.beta).abs() <= 1e-14;
    let conservative = f2_is_zero(&spec) && (spec.mu - spec.beta).abs() <= 1e-14;

    for run in &runs {
        let tag = run.scheme;

        let mut neg = 0.0f64;
        for (u, v) in run.u_fields.iter().zip(&run.v_fields) {
            for &z in u.iter().chain(v.iter()) {
                neg = neg.min(z);
            }
        }
        push(&format!("{tag}/positivity"), true, neg >= 0.0, format!("min value {neg}"));

        let mut endpoint = 0.0f64;
        for v in &run.v_fields {
            endpoint = endpoint.max(v[0].abs()).max(v[v.len() - 1].abs());
        }
        push(
            &format!("{tag}/endpoint-zeros"),
            true,
            endpoint <= 1e-12,
            format!("max endpoint |v| {endpoint}"),
        );

        let mono = run.fronts.is_monotone();
        push(&format!("{tag}/monotone-fronts"), true, mono, format!("monotone {mono}"));

        let hopf = run.hopf_warnings == 0;
        push(
            &format!("{tag}/hopf-signs"),
            true,
            hopf,
            format!("{} warnings", run.hopf_warnings),
        );

        let mut asym = 0.0f64;
        for fs in &run.fronts.states {
            asym = asym.max((fs.g + fs.h).abs());
        }
        push(
            &format!("{tag}/symmetry"),
            symmetric,
            !symmetric || asym <= 1e-8,
            format!("max |g+h| {asym}"),
        );

        let mut drift = 0.0f64;
        if conservative {
            let q = |k: usize| {
                trapezoid_mass(&run.v_fields[k], &grid, &run.fronts.states[k])
                    + spec.d / spec.mu * run.fronts.states[k].width()
            };
            let q0 = q(0);
            for k in 1..run.times.len() {
                drift = drift.max((q(k) - q0).abs() / q0.abs().max(1e-300));
            }
        }
        push(
            &format!("{tag}/conservation"),
            conservative,
            !conservative || drift <= 1e-3,
            format!("relative drift {drift}"),
        );

        let br = audit(run, &spec, cfg.slack);
        push(
            &format!("{tag}/bound-audit"),
            true,
            br.ok(),
            format!("{} violations", br.violations.len()),
        );

        if inject {
            let corrupted: Vec<Vec<f64>> = run
                .v_fields
                .iter()
                .map(|v| v.iter().map(|z| z * 10.0).collect())
                .collect();
            let br_bad = bounds::check_solution(
                &AuditInput {
                    times: &run.times,
                    fronts: &run.fronts,
                    u_fields: &run.u_fields,
                    v_fields: &corrupted,
                },
                &spec,
                cfg.slack,
            );
            push(
                &format!("{tag}/injection-detected"),
                true,
                !br_bad.ok(),
                format!("{} violations on corrupted copy", br_bad.violations.len()),
            );
        }
    }

    let ok = rows.iter().all(|r| r.pass);
    Ok(VerifyOutcome { rows, ok })
}

#[derive(Serialize)]
pub struct CompareReport {
    pub schema_version: u32,
    pub t_end_common: f64,
    pub front_sup_diff: f64,
    pub v_sup_diff_final: f64,
    pub u_sup_diff_final: f64,
    pub final_h_a: f64,
    pub final_h_b: f64,
}

/// `compare` subcommand: runs two configs and reports sup differences over
/// the common time range. The diff report lands in config A's output dir.
pub fn execute_compare(cfg_a: &RunConfig, cfg_b: &RunConfig) -> Result<CompareReport> {
    let pick = |cfg: &RunConfig| -> Result<(ReferenceGrid, RunData)> {
        let spec = cfg.problem()?;
        let grid = cfg.grid();
        let data = match cfg.scheme {
            Scheme::Direct => run_direct(cfg, &spec, &grid)?,
            _ => run_fixedpoint(cfg, &spec, &grid)?,
        };
        Ok((grid, data))
    };
    let (grid_a, a) = pick(cfg_a)?;
    let (grid_b, b) = pick(cfg_b)?;

    let t_end = a.fronts.last().t.min(b.fronts.last().t);
    let mut front_diff = 0.0f64;
    let probes = 201;
    for i in 0..=probes {
        let t = t_end * i as f64 / probes as f64;
        let fa = a.fronts.at(t);
        let fb = b.fronts.at(t);
        front_diff = front_diff.max((fa.g - fb.g).abs()).max((fa.h - fb.h).abs());
    }

    let fa = a.fronts.last();
    let fb = b.fronts.last();
    let ua = a.u_fields.last().unwrap();
    let va = a.v_fields.last().unwrap();
    let ub = b.u_fields.last().unwrap();
    let vb = b.v_fields.last().unwrap();
    let lo = fa.g.min(fb.g);
    let hi = fa.h.max(fb.h);
    let mut du = 0.0f64;
    let mut dv = 0.0f64;
    for i in 0..=200 {
        let x = lo + (hi - lo) * i as f64 / 200.0;
        du = du.max((sample_field(ua, &grid_a, fa, x) - sample_field(ub, &grid_b, fb, x)).abs());
        dv = dv.max((sample_field(va, &grid_a, fa, x) - sample_field(vb, &grid_b, fb, x)).abs());
    }

    let report = CompareReport {
        schema_version: SCHEMA_VERSION,
        t_end_common: t_end,
        front_sup_diff: front_diff,
        v_sup_diff_final: dv,
        u_sup_diff_final: du,
        final_h_a: fa.h,
        final_h_b: fb.h,
    };
    fs::create_dir_all(&cfg_a.output_dir)?;
    fs::write(
        cfg_a.output_dir.join("report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    Ok(report)
}

#[derive(Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub overrides: Vec<(String, String)>,
    pub ok: bool,
    pub final_h: f64,
    pub final_g: f64,
}

pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub ok: bool,
}

fn cartesian(axes: &[(String, Vec<String>)]) -> Vec<Vec<(String, String)>> {
    let mut combos: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for (key, values) in axes {
        let mut next = Vec::with_capacity(combos.len() * values.len());
        for combo in &combos {
            for v in values {
                let mut c = combo.clone();
                c.push((key.clone(), v.clone()));
                next.push(c);
            }
        }
        combos = next;
    }
    combos
}

/// `sweep` subcommand: a config template plus a parameter grid, one isolated
/// run per grid point (parallel worker pool when built with rayon). A
/// summary report.json lands in the template's output dir.
pub fn execute_sweep(
    template: &RunConfig,
    axes: &[(String, Vec<String>)],
) -> Result<SweepOutcome> {
    let combos = cartesian(axes);
    fs::create_dir_all(&template.output_dir)?;

    let one = |(index, overrides): (usize, &Vec<(String, String)>)| -> Result<SweepRow> {
        let mut cfg = template.clone();
        for (k, v) in overrides {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        cfg.output_dir = template.output_dir.join(format!("sweep_{index:04}"));
        let outcome = execute_run(&cfg)?;
        let last = &outcome.report.runs[0];
        Ok(SweepRow {
            index,
            overrides: overrides.clone(),
            ok: outcome.ok,
            final_h: last.final_h,
            final_g: last.final_g,
        })
    };

    #[cfg(feature = "parallel")]
    let rows: Vec<SweepRow> = combos
        .par_iter()
        .enumerate()
        .map(one)
        .collect::<Result<Vec<_>>>()?;
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<SweepRow> = combos
        .iter()
        .enumerate()
        .map(one)
        .collect::<Result<Vec<_>>>()?;

    let ok = rows.iter().all(|r| r.ok);
    fs::write(
        template.output_dir.join("report.json"),
        serde_json::to_string_pretty(&serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "runs": rows,
            "ok": ok,
        }))?,
    )?;
    Ok(SweepOutcome { rows, ok })
}
