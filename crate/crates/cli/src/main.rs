//! `scl-lab`: runs the benchmark problems, regenerates the comparison table
//! and checks the decomposition and observer identities.

mod config;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use scl_core::bench::{self, build_case, Example, DEFAULT_DT, DECOMPOSITION_TOLERANCE, OBSERVER_TOLERANCE};
use scl_core::numerics::Vector;
use scl_core::scl::ObserverMode;

use config::{check_dt, RunConfig, RunConfigFile};
use output::{write_json, write_trace_csv, RunReport};

const EXIT_OK: u8 = 0;
const EXIT_CHECK: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DIVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "scl-lab", version, about = "State compensation linearization benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one example/method pair and write trace.csv, report.json and plot.svg.
    Run(RunArgs),
    /// Regenerate the IAE/ITAE table of the mismatched plant.
    Table1 {
        #[arg(long, default_value_t = DEFAULT_DT)]
        dt: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check x = x_p + x_s on randomized inputs for every example.
    #[command(name = "lemma1-check")]
    DecompositionCheck {
        #[arg(long, default_value_t = DEFAULT_DT)]
        dt: f64,
        /// Random cases per example.
        #[arg(long, default_value_t = 20)]
        cases: usize,
        /// Run the primary system on a perturbed A1; every case should then fail.
        #[arg(long)]
        inject_fault: bool,
    },
    /// Compare the observer against a co-simulated secondary system on every SCLC run.
    #[command(name = "observer-check")]
    ObserverCheck {
        #[arg(long, default_value_t = DEFAULT_DT)]
        dt: f64,
        /// Advance the observer once per sample instead of inside the RK4 stages.
        #[arg(long)]
        sampled_hold: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// ex1, ex2 or ex3.
    #[arg(long)]
    example: Option<String>,
    /// sclc, jlc, flc, rflc or adrc.
    #[arg(long)]
    method: Option<String>,
    /// i, ii, iii or iv (ex3 only; default i).
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Output directory (default: $SCL_LAB_OUT, else ./scl-lab-out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Initial state override, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x0: Option<Vec<f64>>,
    /// JSON run configuration; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Table1 { dt, out } => table1(dt, out),
        Command::DecompositionCheck { dt, cases, inject_fault } => decomposition_check(dt, cases, inject_fault),
        Command::ObserverCheck { dt, sampled_hold } => observer_check(dt, sampled_hold),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn run(args: RunArgs) -> Result<u8> {
    let file = match &args.config {
        Some(path) => RunConfigFile::load(path)?,
        None => RunConfigFile::default(),
    };
    let flags = RunConfigFile {
        example: args.example,
        method: args.method,
        scenario: args.scenario,
        dt: args.dt,
        t_end: args.t_end,
        output_dir: args.out,
        x0: args.x0,
    };
    let cfg = RunConfig::try_from(file.overlay(flags))?;

    let mut case = build_case(cfg.example, cfg.method, cfg.scenario, ObserverMode::default())?;
    if let Some(t) = cfg.t_end {
        case.scenario.t_end = t;
    }
    if let Some(x0) = &cfg.x0 {
        case.scenario.x0 = Vector::from_slice(x0);
    }
    let out = case.run(cfg.dt)?;

    std::fs::create_dir_all(&cfg.output_dir)
        .with_context(|| format!("creating {}", cfg.output_dir.display()))?;
    let scenario = case.scenario_id.map(|s| s.label());
    write_trace_csv(&cfg.output_dir.join("trace.csv"), &out.trace)?;
    let singular_transits: Vec<f64> = out.trace.singular_transits.clone();
    write_json(
        &cfg.output_dir.join("report.json"),
        &RunReport {
            example: cfg.example.key(),
            method: cfg.method.key(),
            scenario,
            dt: cfg.dt,
            t_end: case.scenario.t_end,
            report: &out.report,
            singular_transits: &singular_transits,
        },
    )?;
    let title = match scenario {
        Some(s) => format!("{} {} ({s})", cfg.example, cfg.method.label()),
        None => format!("{} {}", cfg.example, cfg.method.label()),
    };
    std::fs::write(cfg.output_dir.join("plot.svg"), svg::trace_svg(&out.trace, &title))?;

    let r = &out.report;
    let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
    println!(
        "{title}: {} | IAE {} | ITAE {} | final |x| {:.4e} -> {}",
        r.termination,
        fmt(r.iae),
        fmt(r.itae),
        r.final_state_norm,
        cfg.output_dir.display()
    );
    if let Some((a, b)) = r.saturation_interval {
        println!("saturation active from {a:.3} s to {b:.3} s");
    }
    Ok(if out.trace.completed() { EXIT_OK } else { EXIT_DIVERGED })
}

fn table1(dt: f64, out: Option<PathBuf>) -> Result<u8> {
    let dt = check_dt(dt)?;
    let dir = config::output_dir(out);
    let table = bench::table1(dt)?;
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    std::fs::write(dir.join("table1.csv"), table.to_csv())?;
    let text = table.to_text();
    std::fs::write(dir.join("table1.txt"), &text)?;
    write_json(&dir.join("table1.json"), &table)?;
    print!("{text}");
    Ok(EXIT_OK)
}

fn decomposition_check(dt: f64, cases: usize, fault: bool) -> Result<u8> {
    let dt = check_dt(dt)?;
    let results = bench::decomposition_suite(dt, cases, fault)?;
    for c in &results {
        let (value, verdict) = match &c.deviation {
            Ok(d) => (format!("{d:.3e}"), if c.passed() { "ok" } else { "VIOLATION" }),
            Err(e) => (e.clone(), "VIOLATION"),
        };
        println!("{} case {:02}: max deviation {value} {verdict}", c.example, c.index);
    }
    for e in Example::ALL {
        let worst = results
            .iter()
            .filter(|c| c.example == e)
            .filter_map(|c| c.deviation.as_ref().ok())
            .fold(0.0f64, |a, &b| a.max(b));
        println!("{e}: worst deviation {worst:.3e} (tolerance {DECOMPOSITION_TOLERANCE:e})");
    }
    Ok(if results.iter().all(|c| c.passed()) { EXIT_OK } else { EXIT_CHECK })
}

fn observer_check(dt: f64, sampled_hold: bool) -> Result<u8> {
    let dt = check_dt(dt)?;
    let mode = if sampled_hold { ObserverMode::SampledHold } else { ObserverMode::StageSynchronous };
    let results = bench::observer_suite(dt, mode)?;
    for c in &results {
        let gap = c.gap.map_or_else(|| "-".to_string(), |g| format!("{g:.3e}"));
        println!(
            "{:<8} max |x_s - xhat_s| {gap} {}",
            c.label,
            if c.passed() { "ok" } else { "VIOLATION" }
        );
    }
    println!("tolerance {OBSERVER_TOLERANCE:e}");
    Ok(if results.iter().all(|c| c.passed()) { EXIT_OK } else { EXIT_CHECK })
}
