use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::ArgMatches;

use oncodp_core::analysis::{export_policy_grid, period_counts, policy_diff, proportion_report};
use oncodp_core::oracle::{derive_seed, monte_carlo_value, simulate_trajectory, Expectimax};
use oncodp_core::scenario_io::{
    catalog, parse_scenario, preset_document, serialize_scenario_document, serialize_solution, ScenarioIoError,
};
use oncodp_core::{preset, Scenario, Solution, State};

use crate::{CliError, Input};

pub const PRESET_DIR_ENV: &str = "ONCODP_PRESET_DIR";

const VERIFY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub enum Source {
    File(PathBuf),
    Preset(String),
}

impl Source {
    fn label(&self) -> String {
        match self {
            Source::File(p) => p.display().to_string(),
            Source::Preset(name) => name.clone(),
        }
    }
}

pub fn parse_start(text: &str) -> Result<(u8, usize, usize), String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected h,phi,tau but got {text:?}"));
    }
    let h = parts[0].parse().map_err(|e| format!("h: {e}"))?;
    let phi = parts[1].parse().map_err(|e| format!("phi: {e}"))?;
    let tau = parts[2].parse().map_err(|e| format!("tau: {e}"))?;
    Ok((h, phi, tau))
}

fn single_source(input: &Input) -> Result<Source, CliError> {
    match (&input.input, &input.preset) {
        (Some(path), None) => Ok(Source::File(path.clone())),
        (None, Some(name)) => Ok(Source::Preset(name.clone())),
        (Some(_), Some(_)) => Err(CliError::Usage("give a scenario file or --preset, not both".into())),
        (None, None) => Err(CliError::Usage("missing scenario: give a file or --preset NAME".into())),
    }
}

/// Scenario sources in command-line order, whether given as paths or presets.
pub fn ordered_inputs(matches: &ArgMatches, inputs: Vec<PathBuf>, presets: Vec<String>) -> Result<Vec<Source>, CliError> {
    let file_idx = matches.indices_of("inputs").map(|i| i.collect::<Vec<_>>()).unwrap_or_default();
    let preset_idx = matches.indices_of("presets").map(|i| i.collect::<Vec<_>>()).unwrap_or_default();
    let mut tagged: Vec<(usize, Source)> = file_idx
        .into_iter()
        .zip(inputs.into_iter().map(Source::File))
        .chain(preset_idx.into_iter().zip(presets.into_iter().map(Source::Preset)))
        .collect();
    tagged.sort_by_key(|(i, _)| *i);
    if tagged.len() != 2 {
        return Err(CliError::Usage(format!("compare needs exactly two scenarios, got {}", tagged.len())));
    }
    Ok(tagged.into_iter().map(|(_, s)| s).collect())
}

fn load(source: &Source) -> Result<Scenario, CliError> {
    match source {
        Source::File(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_scenario(&text)
                .with_context(|| format!("invalid scenario {}", path.display()))
                .map_err(CliError::Failure)
        }
        Source::Preset(name) => match std::env::var_os(PRESET_DIR_ENV) {
            Some(dir) => {
                let path = Path::new(&dir).join(format!("{name}.json"));
                if !path.is_file() {
                    return Err(CliError::Usage(format!("unknown preset {name:?} in {}", path.display())));
                }
                load(&Source::File(path))
            }
            None => preset(name).map_err(|e| match e {
                ScenarioIoError::UnknownPreset(_) => CliError::Usage(format!("{e}")),
                other => CliError::Failure(other.into()),
            }),
        },
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::Failure)
}

fn counts_line(names: &[String], counts: &[usize]) -> String {
    names
        .iter()
        .zip(counts)
        .map(|(n, c)| format!("{n}={c:<4}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn summary(label: &str, scenario: &Scenario, solution: &Solution) -> String {
    let names = solution.action_names();
    let mut out = format!(
        "scenario {label}: T={} m={} n={} actions={}\n",
        scenario.horizon,
        scenario.m,
        scenario.n,
        names.join(",")
    );
    out.push_str("canonical action counts (non-absorbing states / all states)\n");
    for row in proportion_report(solution) {
        let _ = writeln!(
            out,
            "t={} h={}  {}  /  {}",
            row.t,
            row.h,
            counts_line(names, &row.non_absorbing),
            counts_line(names, &row.all_states)
        );
    }
    out
}

pub fn solve_source(source: &Source) -> Result<(Scenario, Solution), CliError> {
    let scenario = load(source)?;
    let solution = oncodp_core::solve(&scenario).map_err(|e| CliError::Failure(e.into()))?;
    Ok((scenario, solution))
}

pub fn solve(input: &Input, out: Option<&Path>, verify: bool) -> Result<(), CliError> {
    let source = single_source(input)?;
    let (scenario, solution) = solve_source(&source)?;
    print!("{}", summary(&source.label(), &scenario, &solution));

    if verify {
        let oracle = Expectimax::new(&scenario);
        let mut worst = 0.0f64;
        let mut checked = 0usize;
        for t in 1..=scenario.horizon + 1 {
            for s in scenario.space().iter() {
                let v = oracle.value(&s, t).map_err(|e| CliError::Failure(e.into()))?;
                let diff = (v - solution.value(t, &s)).abs();
                if diff > VERIFY_TOLERANCE {
                    return Err(CliError::Failure(anyhow!(
                        "value mismatch at t={t} {s}: solver {} vs expectimax {v}",
                        solution.value(t, &s)
                    )));
                }
                worst = worst.max(diff);
                checked += 1;
            }
        }
        println!("verified {checked} values against expectimax (max |diff| = {worst:e})");
    }

    if let Some(path) = out {
        write_file(path, &serialize_solution(&solution))?;
    }
    Ok(())
}

pub fn simulate(input: &Input, start: (u8, usize, usize), n: usize, seed: u64, dump: Option<&Path>) -> Result<(), CliError> {
    let source = single_source(input)?;
    let (scenario, solution) = solve_source(&source)?;
    let start = State::new(start.0, start.1, start.2);
    scenario
        .space()
        .check(&start)
        .map_err(|e| CliError::Failure(anyhow!("invalid start: {e}")))?;
    if n == 0 {
        return Err(CliError::Failure(anyhow!("--n must be at least 1")));
    }

    let est = monte_carlo_value(&scenario, &solution, start, n, seed).map_err(|e| CliError::Failure(e.into()))?;
    let v1 = solution.value(1, &start);
    let gap = (est.mean - v1).abs();
    let within = if est.std_error > 0.0 {
        gap <= 3.0 * est.std_error
    } else {
        gap <= VERIFY_TOLERANCE
    };

    println!("start {start}  n={n}  seed={seed}");
    println!("mean       {}", est.mean);
    println!(
        "std_error  {}{}",
        est.std_error,
        if est.single_sample { "  (single sample)" } else { "" }
    );
    println!("V_1        {v1}");
    println!("|mean - V_1| = {gap:e}  within 3 SE: {}", if within { "yes" } else { "no" });

    if let Some(path) = dump {
        let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        for i in 0..n {
            let rec = simulate_trajectory(&scenario, &solution, start, derive_seed(seed, i as u64))
                .map_err(|e| CliError::Failure(e.into()))?;
            serde_json::to_writer(&mut w, &rec).map_err(|e| CliError::Failure(e.into()))?;
            w.write_all(b"\n").map_err(|e| CliError::Failure(e.into()))?;
        }
        w.flush().map_err(|e| CliError::Failure(e.into()))?;
    }
    Ok(())
}

pub fn compare(sources: &[Source]) -> Result<(), CliError> {
    let (_, a) = solve_source(&sources[0])?;
    let (_, b) = solve_source(&sources[1])?;
    let diff = policy_diff(&a, &b).map_err(|e| CliError::Failure(e.into()))?;
    let (na, nb) = (a.action_names(), b.action_names());

    println!("a = {}  b = {}", sources[0].label(), sources[1].label());
    println!("{} differences", diff.len());
    for c in &diff {
        println!("  t={} {}  {} -> {}", c.t, c.state, na[c.from], nb[c.to]);
    }
    println!("count deltas b - a (non-absorbing states, both h)");
    for t in 1..=a.horizon() {
        let (ca, cb) = (period_counts(&a, t, true), period_counts(&b, t, true));
        let deltas: Vec<String> = na
            .iter()
            .zip(ca.iter().zip(&cb))
            .map(|(name, (x, y))| format!("{name} {:+}", *y as i64 - *x as i64))
            .collect();
        println!("  t={t}  {}", deltas.join("  "));
    }
    Ok(())
}

pub fn grid(input: &Input, t: usize, h: u8, out: Option<&Path>) -> Result<(), CliError> {
    let source = single_source(input)?;
    let (_, solution) = solve_source(&source)?;
    let grid = export_policy_grid(&solution, t, h).map_err(|e| CliError::Failure(e.into()))?;
    print!("{}", grid.render());
    if let Some(path) = out {
        let mut text = serde_json::to_string_pretty(&grid).map_err(|e| CliError::Failure(e.into()))?;
        text.push('\n');
        write_file(path, &text)?;
    }
    Ok(())
}

pub fn list_presets() {
    for info in catalog() {
        println!("{:<20} {}", info.name, info.description);
    }
}

pub fn print_preset(name: &str, out: Option<&Path>) -> Result<(), CliError> {
    let doc = preset_document(name).map_err(|e| CliError::Usage(e.to_string()))?;
    let text = serialize_scenario_document(&doc);
    match out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
