use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use freefront::config::RunConfig;
use freefront::runner;

#[derive(Parser)]
#[command(name = "freefront", about = "Free boundary solver for two-species reaction systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Path to a key = value config file
    config: PathBuf,
    /// Overrides applied after the file, as key=value
    #[arg(short = 's', long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory override
    #[arg(short = 'o', long = "output-dir")]
    output_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and write fronts.csv, snapshots.csv, report.json
    Run(ConfigArgs),
    /// Refinement study; writes orders.csv
    Converge {
        #[command(flatten)]
        config: ConfigArgs,
        /// Number of refinement levels (the finest run is the reference)
        #[arg(short = 'l', long = "levels", default_value_t = 3)]
        levels: usize,
    },
    /// Run both schemes and evaluate the invariant suite
    Verify {
        #[command(flatten)]
        config: ConfigArgs,
        /// Also corrupt a copy of the trajectory and require detection
        #[arg(long = "inject")]
        inject: bool,
    },
    /// Run two configs and report their differences
    Compare {
        config_a: PathBuf,
        config_b: PathBuf,
        #[arg(short = 'o', long = "output-dir")]
        output_dir: Option<PathBuf>,
    },
    /// Run a grid of configs derived from one template
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// Sweep axis as key=v1,v2,v3 (repeatable; cartesian product)
        #[arg(short = 'a', long = "axis", value_name = "KEY=V1,V2,...")]
        axis: Vec<String>,
    },
}

fn load_config(args: &ConfigArgs) -> Result<RunConfig, String> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| format!("cannot read {}: {e}", args.config.display()))?;
    let mut cfg = RunConfig::parse(&text).map_err(|e| e.to_string())?;
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| format!("override '{kv}' must be key=value"))?;
        cfg.set(k.trim(), v.trim()).map_err(|e| e.to_string())?;
    }
    if let Some(dir) = &args.output_dir {
        cfg.output_dir = dir.clone();
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn parse_axes(axes: &[String]) -> Result<Vec<(String, Vec<String>)>, String> {
    axes.iter()
        .map(|a| {
            let (k, vs) = a
                .split_once('=')
                .ok_or_else(|| format!("axis '{a}' must be key=v1,v2,..."))?;
            let values: Vec<String> =
                vs.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
            if values.is_empty() {
                return Err(format!("axis '{a}' has no values"));
            }
            Ok((k.trim().to_string(), values))
        })
        .collect()
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Run(args) => {
            let cfg = load_config(&args)?;
            let out = runner::execute_run(&cfg).map_err(|e| e.to_string())?;
            println!("wrote {}", out.report_path.display());
            for r in &out.report.runs {
                println!(
                    "{}: {} steps, t = {:.6}, g = {:.6}, h = {:.6}, audit {}",
                    r.scheme,
                    r.steps,
                    r.t_end,
                    r.final_g,
                    r.final_h,
                    if r.bound_report.ok() { "clean" } else { "violations" }
                );
            }
            if let Some(d) = out.report.front_sup_diff {
                println!("front sup difference between schemes: {d:.3e}");
            }
            Ok(out.ok)
        }
        Command::Converge { config, levels } => {
            if levels < 3 {
                return Err("converge needs at least 3 levels".into());
            }
            let cfg = load_config(&config)?;
            let out = runner::execute_converge(&cfg, levels).map_err(|e| e.to_string())?;
            println!("wrote {}", out.csv_path.display());
            for r in &out.rows {
                println!(
                    "level {}: n = {}, dt = {:.3e}, err_v = {:.3e}, err_u = {:.3e}, err_h = {:.3e}",
                    r.level, r.n, r.dt, r.err_v, r.err_u, r.err_h
                );
            }
            if !out.monotone {
                println!("warning: non-monotone error decay");
            }
            Ok(true)
        }
        Command::Verify { config, inject } => {
            let cfg = load_config(&config)?;
            let out = runner::execute_verify(&cfg, inject).map_err(|e| e.to_string())?;
            for r in &out.rows {
                let status = if !r.applicable {
                    "n/a "
                } else if r.pass {
                    "pass"
                } else {
                    "FAIL"
                };
                println!("{status}  {:<30}  {}", r.name, r.detail);
            }
            Ok(out.ok)
        }
        Command::Compare { config_a, config_b, output_dir } => {
            let load = |p: &PathBuf| -> Result<RunConfig, String> {
                load_config(&ConfigArgs { config: p.clone(), set: vec![], output_dir: None })
            };
            let mut a = load(&config_a)?;
            let b = load(&config_b)?;
            if let Some(dir) = output_dir {
                a.output_dir = dir;
            }
            let rep = runner::execute_compare(&a, &b).map_err(|e| e.to_string())?;
            println!(
                "common horizon {:.6}: front sup diff {:.3e}, final v diff {:.3e}, final u diff {:.3e}",
                rep.t_end_common, rep.front_sup_diff, rep.v_sup_diff_final, rep.u_sup_diff_final
            );
            Ok(true)
        }
        Command::Sweep { config, axis } => {
            let cfg = load_config(&config)?;
            let axes = parse_axes(&axis)?;
            let out = runner::execute_sweep(&cfg, &axes).map_err(|e| e.to_string())?;
            for r in &out.rows {
                let tag: Vec<String> =
                    r.overrides.iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!(
                    "sweep {:04} [{}]: h = {:.6}, g = {:.6}, {}",
                    r.index,
                    tag.join(", "),
                    r.final_h,
                    r.final_g,
                    if r.ok { "ok" } else { "FAILED" }
                );
            }
            Ok(out.ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
