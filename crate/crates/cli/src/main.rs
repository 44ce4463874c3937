//! `graphtrack`: track objects in frame sequences or run the synthetic
//! benchmark.
//!
//! Every config key can be set on the command line with `--<key>` (the
//! key verbatim, or with `-` in place of `_`). Flags override the config
//! file, which overrides the built-in defaults.
//!
//! Exit codes: 0 success, 1 error, 2 no trajectories found, 3 benchmark
//! check failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches, Command};
use graphtrack::config::{Mode, RunConfig, KEYS};
use graphtrack::run::{run_bench, run_track};

const EXIT_ERROR: u8 = 1;
const EXIT_NO_TRAJECTORIES: u8 = 2;
const EXIT_CHECK_FAILED: u8 = 3;

const BOOL_KEYS: &[&str] = &["dump_edges", "dump_truth", "invert"];

fn key_flag(section: &'static str, key: &'static str) -> Arg {
    let kebab = key.replace('_', "-");
    let mut arg = Arg::new(key)
        .long(kebab.clone())
        .value_name("VALUE")
        .allow_negative_numbers(true)
        .help(format!("Override [{section}] {key}"))
        .help_heading(format!("[{section}] keys"));
    if kebab != key {
        arg = arg.alias(key);
    }
    if BOOL_KEYS.contains(&key) {
        arg = arg.num_args(0..=1).default_missing_value("true");
    }
    arg
}

fn command() -> Command {
    let mut cmd = Command::new("graphtrack")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Detect, link and characterise round objects in frame sequences")
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .value_parser(clap::value_parser!(PathBuf))
                .help("TOML config file with [run], [imaging], [detection], [linking], [trajectory] and [bench] sections"),
        )
        .arg(
            Arg::new("check")
                .long("check")
                .action(ArgAction::SetTrue)
                .help("Bench mode: compare the report against the recognition thresholds and exit 3 on failure"),
        );
    for &(section, key) in KEYS {
        cmd = cmd.arg(key_flag(section, key));
    }
    cmd
}

fn overrides(m: &ArgMatches) -> Vec<(String, String)> {
    KEYS.iter()
        .filter_map(|&(_, key)| {
            m.get_one::<String>(key)
                .map(|v| (key.to_string(), v.clone()))
        })
        .collect()
}

fn run(m: &ArgMatches) -> graphtrack::Result<u8> {
    let path = m.get_one::<PathBuf>("config").map(PathBuf::as_path);
    let cfg = RunConfig::load(path, &overrides(m))?;
    let check = m.get_flag("check");
    match cfg.run.mode {
        Mode::Track => {
            if check {
                return Err(graphtrack::Error::Config(
                    "--check requires mode = bench".into(),
                ));
            }
            let out = run_track(&cfg)?;
            if out.n_trajectories == 0 {
                eprintln!(
                    "no trajectories found; wrote {}",
                    cfg.run.output_dir.display()
                );
                return Ok(EXIT_NO_TRAJECTORIES);
            }
            eprintln!(
                "{} trajectories written to {}",
                out.n_trajectories,
                cfg.run.output_dir.display()
            );
            Ok(0)
        }
        Mode::Bench => {
            let out = run_bench(&cfg, check)?;
            eprintln!(
                "{} cells written to {}",
                out.report.cells.len(),
                cfg.run.output_dir.display()
            );
            match out.check {
                Some(report) if !report.passed => {
                    for f in report.failures() {
                        eprintln!(
                            "check failed: {} {} = {:.4} < {}",
                            f.cell, f.metric, f.value, f.threshold
                        );
                    }
                    Ok(EXIT_CHECK_FAILED)
                }
                _ => Ok(0),
            }
        }
    }
}

fn main() -> ExitCode {
    let matches = match command().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            // Usage errors share the generic error code; 2 means "no trajectories".
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    match run(&matches) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
