//! Command-line front end: classify root zone pairs, print
//! compatibility matrices for universe directories, and run adoption
//! scenarios to CSV.
//!
//! Exit codes: 0 on success, 2 on input errors (unreadable or
//! malformed files, inconsistent universes, bad scenario keys), 1 on
//! internal invariant violations.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rootsim::competition::{classify, compatibility_matrix};
use rootsim::namespace::{RootZone, Universe};
use rootsim::scenario::{load_scenario, run_scenario, RunReport, Scenario};
use rootsim::zonefile::{parse_registry_zone, parse_root_zone, sniff_zone_kind, ZoneKind};
use rootsim::CompetitionType;

#[derive(Parser)]
#[command(
    name = "rootsim",
    version,
    about = "Deterministic simulator of competing DNS roots"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the competition structure of two root zone files
    Classify {
        /// First root zone file
        zone_a: PathBuf,
        /// Second root zone file
        zone_b: PathBuf,
    },
    /// Print the compatibility matrix of a two-root universe directory
    Matrix {
        /// Directory of .zone files; roots load in sorted file order,
        /// which fixes assignment-origin precedence
        universe_dir: PathBuf,
    },
    /// Run a scenario and write its share time series as CSV
    Simulate {
        /// Scenario file
        scenario: PathBuf,
        /// Output CSV path; with --seeds N > 1 each run writes
        /// `<stem>.seed<S>.csv`
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        /// Number of consecutive seeds to run, starting at the
        /// scenario's seed
        #[arg(long, default_value_t = 1)]
        seeds: u64,
    },
}

enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self::Input(message.into())
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn load_root_zone(path: &Path) -> Result<RootZone, CliError> {
    let text = read_file(path)?;
    parse_root_zone(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn cmd_classify(zone_a: &Path, zone_b: &Path) -> Result<(), CliError> {
    let a = load_root_zone(zone_a)?;
    let b = load_root_zone(zone_b)?;
    let kind = classify(&a, &b);
    println!("{} vs {}: {kind}", a.root_id(), b.root_id());
    match &kind {
        CompetitionType::Type3Conflicting { collisions } => {
            let list = collisions
                .iter()
                .map(|l| l.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            println!("collisions: {list}");
        }
        _ => println!("collisions: (none)"),
    }
    Ok(())
}

fn cmd_matrix(universe_dir: &Path) -> Result<(), CliError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(universe_dir)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", universe_dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "zone"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::input(format!(
            "no .zone files in {}",
            universe_dir.display()
        )));
    }

    let mut universe = Universe::new();
    let mut roots = Vec::new();
    for path in &paths {
        let text = read_file(path)?;
        match sniff_zone_kind(&text) {
            ZoneKind::Registry => {
                let zone = parse_registry_zone(&text)
                    .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
                universe
                    .add_registry_zone(zone)
                    .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            }
            ZoneKind::Root => {
                let zone = parse_root_zone(&text)
                    .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
                roots.push((path.clone(), zone));
            }
        }
    }
    for (path, zone) in roots {
        universe
            .add_root(zone)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    }
    universe
        .validate()
        .map_err(|e| CliError::input(format!("inconsistent universe: {e}")))?;

    let ids: Vec<_> = universe.root_ids().cloned().collect();
    if ids.len() != 2 {
        return Err(CliError::input(format!(
            "matrix needs exactly two roots, found {}",
            ids.len()
        )));
    }
    let matrix = compatibility_matrix(&ids[0], &ids[1], &universe)
        .map_err(|e| CliError::input(e.to_string()))?;

    println!("universe: {}", universe_dir.display());
    println!("roots: {} {}", ids[0], ids[1]);
    println!();
    print!("{matrix}");
    println!();
    println!("evidence:");
    for ((origin, query), cell) in matrix.cells() {
        let vacuous = if cell.is_vacuous() { " (vacuous)" } else { "" };
        println!(
            "  origin {origin} query {query}: {} intended, {} name-error, {} divergent{vacuous}",
            cell.evidence.resolved_intended, cell.evidence.name_error, cell.evidence.divergent
        );
    }
    Ok(())
}

fn seed_out_path(base: &Path, seed: u64) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".to_string());
    let name = match base.extension() {
        Some(ext) => format!("{stem}.seed{seed}.{}", ext.to_string_lossy()),
        None => format!("{stem}.seed{seed}"),
    };
    base.with_file_name(name)
}

fn check_report(report: &RunReport, scenario: &Scenario) -> Result<(), CliError> {
    let expected_rows = scenario.horizon as usize + 1;
    if report.series.len() != expected_rows {
        return Err(CliError::Internal(format!(
            "series has {} rows, expected {expected_rows}",
            report.series.len()
        )));
    }
    for row in report.series.rows() {
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(CliError::Internal(format!("share row sums to {sum}")));
        }
    }
    Ok(())
}

fn cmd_simulate(scenario_path: &Path, out: &Path, seeds: u64) -> Result<(), CliError> {
    if seeds == 0 {
        return Err(CliError::input("--seeds must be at least 1"));
    }
    let scenario = load_scenario(scenario_path).map_err(|e| CliError::input(e.to_string()))?;
    let base_seed = scenario.seed;

    let mut reports: Vec<(u64, RunReport)> = Vec::new();
    if seeds == 1 {
        let report = run_scenario(&scenario, None).map_err(|e| CliError::input(e.to_string()))?;
        reports.push((base_seed, report));
    } else {
        // independent seeds fan out across workers; outputs merge in
        // seed order
        let results: Vec<Result<(u64, RunReport), String>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..seeds)
                .map(|offset| {
                    let scenario = &scenario;
                    scope.spawn(move || {
                        let seed = base_seed.wrapping_add(offset);
                        run_scenario(scenario, Some(seed))
                            .map(|report| (seed, report))
                            .map_err(|e| e.to_string())
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|handle| handle.join().expect("worker panicked"))
                .collect()
        });
        for result in results {
            reports.push(result.map_err(CliError::Input)?);
        }
    }

    for (index, (seed, report)) in reports.iter().enumerate() {
        check_report(report, &scenario)?;
        let csv_path = if seeds == 1 {
            out.to_path_buf()
        } else {
            seed_out_path(out, *seed)
        };
        fs::write(&csv_path, report.series.to_csv())
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", csv_path.display())))?;
        if index > 0 {
            println!();
        }
        print!("{}", report.render_summary());
        println!("csv: {}", csv_path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Classify { zone_a, zone_b } => cmd_classify(zone_a, zone_b),
        Command::Matrix { universe_dir } => cmd_matrix(universe_dir),
        Command::Simulate {
            scenario,
            out,
            seeds,
        } => cmd_simulate(scenario, out, *seeds),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(message)) => {
            eprintln!("internal error: {message}");
            ExitCode::from(1)
        }
    }
}
