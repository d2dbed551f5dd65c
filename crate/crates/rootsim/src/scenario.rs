//! Scenario files and the runner that executes them.
//!
//! A scenario is a line-oriented `key = value` file with `[section]`
//! headers; lists are comma-separated and full-line comments start with
//! `;`. The sections:
//!
//! ```text
//! name = biz-collision            ; optional, before any section
//!
//! [universe]
//! root = zones/root-i.zone        ; repeatable, load order fixes
//! root = zones/root-c.zone        ; assignment-origin precedence
//! registry = zones/com.zone       ; repeatable; zones not delegated by
//!                                 ; any listed root are held aside for
//!                                 ; interventions
//! empty_zone = newnet.test : arts ; synthesize a registration-free zone
//! registrants = gallegos.test : biz : 20
//!                                 ; spread names over 20 registrant ids
//!
//! [population]
//! agents = 1000
//! share = root-i : 0.997          ; repeatable; must sum to 1
//! share = root-c : 0.003
//! weight = root-i : 1.0           ; constant intrinsic weight, or
//! weight = root-c : uniform 1.5 2.0
//!
//! [params]
//! alpha = 1.0
//! beta = 1.0
//! switch_cost = 0.5
//! reconsider_prob = 0.05
//!
//! [run]
//! horizon = 500
//! seed = 42
//!
//! [interventions]
//! intervene = 100 : conflicting_add : root-i, biz, neustar.test
//! ```
//!
//! Intervention forms, all `intervene = <at_step> : <action> : <args>`:
//!
//! * `mutual_recognition : <root_a>, <root_b>`
//! * `conflict_avoiding_add : <root>, <tld>, <registry>, <other_root>`
//! * `conflicting_add : <root>, <tld>, <registry>`
//! * `threshold_admission : <root>, <tld>, <min_names>, <min_disparate>`
//! * `bulk_reassign : <fraction>, <to_root>`
//!
//! Zone paths are resolved relative to the scenario file. Glue
//! addresses for delegations added by interventions are synthesized
//! deterministically from the registry id and TLD. Agent placement,
//! uniform weight draws, and every revision coin are keyed draws, so a
//! scenario plus a seed fixes the run byte for byte. Interventions at
//! step `k` fire after row `k` of the series is recorded and before the
//! transition to `k + 1`; interventions at or beyond the horizon never
//! fire.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::competition::classify;
use crate::dynamics::{
    step_with_table, AgentId, DynamicsError, OperatorAgent, Population, ReachTable, TimeSeries,
    UtilityParams,
};
use crate::namespace::{
    Label, NamespaceError, RegistrantId, RegistryId, RegistryZone, RootId, TldDelegation, Universe,
};
use crate::policy::{
    apply_intervention, Intervention, InterventionAction, InterventionOutcome, PolicyError,
};
use crate::rng;
use crate::zonefile::{parse_registry_zone, parse_root_zone, ZoneError};

/// A root is considered to have tipped the market at this share.
pub const TIPPING_SHARE: f64 = 0.99;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Zone { path: PathBuf, source: ZoneError },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("key `{key}` (line {line}): {message}")]
    Key {
        key: String,
        line: usize,
        message: String,
    },
    #[error("missing key `{key}` in section [{section}]")]
    MissingKey { section: String, key: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Namespace(#[from] NamespaceError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

fn key_err(key: &str, line: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Key {
        key: key.to_string(),
        line,
        message: message.into(),
    }
}

/// How one root's intrinsic weight is assigned across agents.
#[derive(Debug, Clone, PartialEq)]
enum WeightSpec {
    Const(f64),
    Uniform { low: f64, high: f64 },
}

/// A fully loaded scenario, ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub universe: Universe,
    /// Registry zones listed in the file but not delegated by any
    /// loaded root; interventions pull from here.
    pub spare_zones: BTreeMap<(RegistryId, Label), RegistryZone>,
    pub population: Population,
    pub params: UtilityParams,
    pub horizon: u64,
    pub seed: u64,
    pub interventions: Vec<Intervention>,
}

struct RawScenario {
    name: Option<String>,
    root_paths: Vec<(String, usize)>,
    registry_paths: Vec<(String, usize)>,
    empty_zones: Vec<(RegistryId, Label)>,
    registrant_specs: Vec<(RegistryId, Label, usize, usize)>,
    agents: Option<(usize, usize)>,
    shares: Vec<(RootId, f64, usize)>,
    weights: Vec<(RootId, WeightSpec)>,
    alpha: Option<f64>,
    beta: Option<f64>,
    switch_cost: Option<f64>,
    reconsider_prob: Option<f64>,
    horizon: Option<u64>,
    seed: Option<u64>,
    interventions: Vec<Intervention>,
}

fn parse_f64(key: &str, line: usize, text: &str) -> Result<f64, ScenarioError> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| key_err(key, line, format!("expected a number, got {text:?}")))
}

fn parse_u64(key: &str, line: usize, text: &str) -> Result<u64, ScenarioError> {
    text.trim().parse::<u64>().map_err(|_| {
        key_err(
            key,
            line,
            format!("expected a non-negative integer, got {text:?}"),
        )
    })
}

fn parse_usize(key: &str, line: usize, text: &str) -> Result<usize, ScenarioError> {
    text.trim().parse::<usize>().map_err(|_| {
        key_err(
            key,
            line,
            format!("expected a non-negative integer, got {text:?}"),
        )
    })
}

fn parse_root_id(key: &str, line: usize, text: &str) -> Result<RootId, ScenarioError> {
    RootId::new(text.trim()).map_err(|e| key_err(key, line, e.to_string()))
}

fn parse_label(key: &str, line: usize, text: &str) -> Result<Label, ScenarioError> {
    Label::new(text.trim()).map_err(|e| key_err(key, line, e.to_string()))
}

fn parse_registry_id(key: &str, line: usize, text: &str) -> Result<RegistryId, ScenarioError> {
    RegistryId::new(text.trim()).map_err(|e| key_err(key, line, e.to_string()))
}

/// Deterministic glue address for a delegation synthesized by an
/// intervention (FNV-1a over registry and tld, truncated).
fn synthesized_glue(registry: &RegistryId, tld: &Label) -> crate::namespace::Address {
    let mut acc: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in registry
        .as_str()
        .bytes()
        .chain(*b"/")
        .chain(tld.as_str().bytes())
    {
        acc ^= u64::from(byte);
        acc = acc.wrapping_mul(0x0000_0100_0000_01b3);
    }
    crate::namespace::Address::new(acc as u32)
}

fn parse_intervention(key: &str, line: usize, value: &str) -> Result<Intervention, ScenarioError> {
    let segments: Vec<&str> = value.split(':').map(str::trim).collect();
    if segments.len() != 3 {
        return Err(key_err(
            key,
            line,
            "expected `<at_step> : <action> : <comma-separated args>`",
        ));
    }
    let at_step = parse_u64(key, line, segments[0])?;
    let args: Vec<&str> = segments[2].split(',').map(str::trim).collect();
    let want = |n: usize| -> Result<(), ScenarioError> {
        if args.len() != n {
            Err(key_err(
                key,
                line,
                format!("{} takes {n} arguments, got {}", segments[1], args.len()),
            ))
        } else {
            Ok(())
        }
    };
    let action = match segments[1] {
        "mutual_recognition" => {
            want(2)?;
            InterventionAction::MutualRecognition {
                root_a: parse_root_id(key, line, args[0])?,
                root_b: parse_root_id(key, line, args[1])?,
            }
        }
        "conflict_avoiding_add" => {
            want(4)?;
            let tld = parse_label(key, line, args[1])?;
            let registry = parse_registry_id(key, line, args[2])?;
            let glue = synthesized_glue(&registry, &tld);
            InterventionAction::ConflictAvoidingAdd {
                root: parse_root_id(key, line, args[0])?,
                delegation: TldDelegation::new(tld, registry, vec![glue])
                    .map_err(|e| key_err(key, line, e.to_string()))?,
                other_root: parse_root_id(key, line, args[3])?,
            }
        }
        "conflicting_add" => {
            want(3)?;
            let tld = parse_label(key, line, args[1])?;
            let registry = parse_registry_id(key, line, args[2])?;
            let glue = synthesized_glue(&registry, &tld);
            InterventionAction::ConflictingAdd {
                root: parse_root_id(key, line, args[0])?,
                delegation: TldDelegation::new(tld, registry, vec![glue])
                    .map_err(|e| key_err(key, line, e.to_string()))?,
            }
        }
        "threshold_admission" => {
            want(4)?;
            InterventionAction::ThresholdAdmission {
                root: parse_root_id(key, line, args[0])?,
                tld: parse_label(key, line, args[1])?,
                min_names: parse_usize(key, line, args[2])?,
                min_disparate: parse_usize(key, line, args[3])?,
            }
        }
        "bulk_reassign" => {
            want(2)?;
            let fraction = parse_f64(key, line, args[0])?;
            if !(0.0..=1.0).contains(&fraction) {
                return Err(key_err(key, line, "fraction must be within [0, 1]"));
            }
            InterventionAction::BulkReassign {
                fraction,
                to_root: parse_root_id(key, line, args[1])?,
            }
        }
        other => {
            return Err(key_err(
                key,
                line,
                format!("unknown intervention action {other:?}"),
            ))
        }
    };
    Ok(Intervention { at_step, action })
}

fn parse_raw(text: &str) -> Result<RawScenario, ScenarioError> {
    let mut raw = RawScenario {
        name: None,
        root_paths: Vec::new(),
        registry_paths: Vec::new(),
        empty_zones: Vec::new(),
        registrant_specs: Vec::new(),
        agents: None,
        shares: Vec::new(),
        weights: Vec::new(),
        alpha: None,
        beta: None,
        switch_cost: None,
        reconsider_prob: None,
        horizon: None,
        seed: None,
        interventions: Vec::new(),
    };
    let mut section: Option<String> = None;

    for (index, raw_line) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() || trimmed.starts_with(';') {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return Err(ScenarioError::Line {
                    line,
                    message: "unterminated section header".to_string(),
                });
            };
            match name {
                "universe" | "population" | "params" | "run" | "interventions" => {
                    section = Some(name.to_string());
                }
                other => {
                    return Err(ScenarioError::Line {
                        line,
                        message: format!("unknown section [{other}]"),
                    })
                }
            }
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ScenarioError::Line {
                line,
                message: "expected `key = value`".to_string(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        let set_scalar = |slot: &mut Option<f64>, key: &str| -> Result<(), ScenarioError> {
            if slot.is_some() {
                return Err(key_err(key, line, "duplicate key"));
            }
            *slot = Some(parse_f64(key, line, value)?);
            Ok(())
        };

        match (section.as_deref(), key) {
            (None, "name") => {
                if raw.name.is_some() {
                    return Err(key_err(key, line, "duplicate key"));
                }
                raw.name = Some(value.to_string());
            }
            (Some("universe"), "root") => raw.root_paths.push((value.to_string(), line)),
            (Some("universe"), "registry") => raw.registry_paths.push((value.to_string(), line)),
            (Some("universe"), "empty_zone") => {
                let parts: Vec<&str> = value.split(':').map(str::trim).collect();
                if parts.len() != 2 {
                    return Err(key_err(key, line, "expected `<registry> : <tld>`"));
                }
                raw.empty_zones.push((
                    parse_registry_id(key, line, parts[0])?,
                    parse_label(key, line, parts[1])?,
                ));
            }
            (Some("universe"), "registrants") => {
                let parts: Vec<&str> = value.split(':').map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(key_err(
                        key,
                        line,
                        "expected `<registry> : <tld> : <count>`",
                    ));
                }
                let count = parse_usize(key, line, parts[2])?;
                if count == 0 {
                    return Err(key_err(key, line, "registrant count must be positive"));
                }
                raw.registrant_specs.push((
                    parse_registry_id(key, line, parts[0])?,
                    parse_label(key, line, parts[1])?,
                    count,
                    line,
                ));
            }
            (Some("population"), "agents") => {
                if raw.agents.is_some() {
                    return Err(key_err(key, line, "duplicate key"));
                }
                raw.agents = Some((parse_usize(key, line, value)?, line));
            }
            (Some("population"), "share") => {
                let parts: Vec<&str> = value.split(':').map(str::trim).collect();
                if parts.len() != 2 {
                    return Err(key_err(key, line, "expected `<root> : <share>`"));
                }
                let root = parse_root_id(key, line, parts[0])?;
                let share = parse_f64(key, line, parts[1])?;
                if !(0.0..=1.0).contains(&share) {
                    return Err(key_err(key, line, "share must be within [0, 1]"));
                }
                if raw.shares.iter().any(|(r, _, _)| *r == root) {
                    return Err(key_err(key, line, format!("duplicate share for {root}")));
                }
                raw.shares.push((root, share, line));
            }
            (Some("population"), "weight") => {
                let parts: Vec<&str> = value.split(':').map(str::trim).collect();
                if parts.len() != 2 {
                    return Err(key_err(key, line, "expected `<root> : <weight spec>`"));
                }
                let root = parse_root_id(key, line, parts[0])?;
                if raw.weights.iter().any(|(r, _)| *r == root) {
                    return Err(key_err(key, line, format!("duplicate weight for {root}")));
                }
                let words: Vec<&str> = parts[1].split_whitespace().collect();
                let spec = match words.as_slice() {
                    [value] => WeightSpec::Const(parse_f64(key, line, value)?),
                    ["uniform", low, high] => {
                        let low = parse_f64(key, line, low)?;
                        let high = parse_f64(key, line, high)?;
                        if low > high {
                            return Err(key_err(key, line, "uniform bounds out of order"));
                        }
                        WeightSpec::Uniform { low, high }
                    }
                    _ => {
                        return Err(key_err(
                            key,
                            line,
                            "expected `<value>` or `uniform <low> <high>`",
                        ))
                    }
                };
                raw.weights.push((root, spec));
            }
            (Some("params"), "alpha") => set_scalar(&mut raw.alpha, "alpha")?,
            (Some("params"), "beta") => set_scalar(&mut raw.beta, "beta")?,
            (Some("params"), "switch_cost") => set_scalar(&mut raw.switch_cost, "switch_cost")?,
            (Some("params"), "reconsider_prob") => {
                set_scalar(&mut raw.reconsider_prob, "reconsider_prob")?
            }
            (Some("run"), "horizon") => {
                if raw.horizon.is_some() {
                    return Err(key_err(key, line, "duplicate key"));
                }
                raw.horizon = Some(parse_u64(key, line, value)?);
            }
            (Some("run"), "seed") => {
                if raw.seed.is_some() {
                    return Err(key_err(key, line, "duplicate key"));
                }
                raw.seed = Some(parse_u64(key, line, value)?);
            }
            (Some("interventions"), "intervene") => {
                raw.interventions
                    .push(parse_intervention(key, line, value)?);
            }
            (section, key) => {
                return Err(key_err(
                    key,
                    line,
                    match section {
                        Some(section) => format!("unknown key in section [{section}]"),
                        None => "keys other than `name` must appear inside a section".to_string(),
                    },
                ));
            }
        }
    }
    Ok(raw)
}

fn read_to_string(path: &Path) -> Result<String, ScenarioError> {
    fs::read_to_string(path).map_err(|e| ScenarioError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Integer head counts per root from fractional shares, by largest
/// remainder; deterministic, and exact for shares that are multiples of
/// `1/agents`.
fn apportion(shares: &[(RootId, f64)], agents: usize) -> Vec<(RootId, usize)> {
    let mut counts: Vec<(RootId, usize, f64)> = shares
        .iter()
        .map(|(root, share)| {
            let exact = share * agents as f64;
            (root.clone(), exact.floor() as usize, exact - exact.floor())
        })
        .collect();
    let assigned: usize = counts.iter().map(|(_, c, _)| *c).sum();
    let mut leftover = agents.saturating_sub(assigned);
    // hand out remainders to the largest fractional parts, ties by id
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| {
        counts[b]
            .2
            .partial_cmp(&counts[a].2)
            .unwrap()
            .then(counts[a].0.cmp(&counts[b].0))
    });
    for index in order {
        if leftover == 0 {
            break;
        }
        counts[index].1 += 1;
        leftover -= 1;
    }
    counts
        .into_iter()
        .map(|(root, count, _)| (root, count))
        .collect()
}

/// Parse scenario text, resolving zone paths against `base_dir`.
pub fn parse_scenario_text(
    text: &str,
    base_dir: &Path,
    default_name: &str,
) -> Result<Scenario, ScenarioError> {
    let raw = parse_raw(text)?;

    let missing = |section: &str, key: &str| ScenarioError::MissingKey {
        section: section.to_string(),
        key: key.to_string(),
    };

    if raw.root_paths.is_empty() {
        return Err(missing("universe", "root"));
    }
    let (agents, agents_line) = raw.agents.ok_or_else(|| missing("population", "agents"))?;
    if agents == 0 {
        return Err(key_err(
            "agents",
            agents_line,
            "population must not be empty",
        ));
    }
    if raw.shares.is_empty() {
        return Err(missing("population", "share"));
    }
    let params = UtilityParams {
        alpha: raw.alpha.ok_or_else(|| missing("params", "alpha"))?,
        beta: raw.beta.ok_or_else(|| missing("params", "beta"))?,
        switch_cost: raw
            .switch_cost
            .ok_or_else(|| missing("params", "switch_cost"))?,
        reconsider_prob: raw
            .reconsider_prob
            .ok_or_else(|| missing("params", "reconsider_prob"))?,
    };
    params
        .validate()
        .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
    let horizon = raw.horizon.ok_or_else(|| missing("run", "horizon"))?;
    let seed = raw.seed.ok_or_else(|| missing("run", "seed"))?;

    // load zones
    let mut root_zones = Vec::new();
    for (rel, _) in &raw.root_paths {
        let path = base_dir.join(rel);
        let text = read_to_string(&path)?;
        let zone = parse_root_zone(&text).map_err(|source| ScenarioError::Zone {
            path: path.clone(),
            source,
        })?;
        root_zones.push(zone);
    }
    let mut registry_zones = Vec::new();
    for (rel, _) in &raw.registry_paths {
        let path = base_dir.join(rel);
        let text = read_to_string(&path)?;
        let zone = parse_registry_zone(&text).map_err(|source| ScenarioError::Zone {
            path: path.clone(),
            source,
        })?;
        registry_zones.push(zone);
    }
    for (registry, tld) in &raw.empty_zones {
        registry_zones.push(RegistryZone::new(registry.clone(), tld.clone()));
    }

    // zones delegated by a loaded root enter the universe now; the rest
    // wait for interventions
    let delegated: std::collections::BTreeSet<(RegistryId, Label)> = root_zones
        .iter()
        .flat_map(|zone| {
            zone.delegations()
                .map(|d| (d.registry_id().clone(), d.tld().clone()))
        })
        .collect();
    let mut universe = Universe::new();
    let mut spare_zones: BTreeMap<(RegistryId, Label), RegistryZone> = BTreeMap::new();
    for zone in registry_zones {
        let zone_key = (zone.registry_id().clone(), zone.tld().clone());
        if delegated.contains(&zone_key) {
            universe.add_registry_zone(zone)?;
        } else if spare_zones.insert(zone_key.clone(), zone).is_some() {
            return Err(ScenarioError::Invalid(format!(
                "registry zone {}/{} listed twice",
                zone_key.0, zone_key.1
            )));
        }
    }
    for zone in root_zones {
        universe.add_root(zone)?;
    }

    for (registry, tld, count, line) in &raw.registrant_specs {
        let names: Vec<Label> = match universe.registry_zone(registry, tld) {
            Some(zone) => zone.registrations().keys().cloned().collect(),
            None => {
                let message = if spare_zones.contains_key(&(registry.clone(), tld.clone())) {
                    format!(
                        "{registry}/{tld} is not delegated by any loaded root; \
                         registrant annotations apply only to delegated zones"
                    )
                } else {
                    format!("no registry zone {registry}/{tld} in this scenario")
                };
                return Err(key_err("registrants", *line, message));
            }
        };
        for (index, name) in names.iter().enumerate() {
            let registrant = RegistrantId::new(&format!("user-{}", index % count))
                .expect("synthesized id is valid");
            universe.set_registrant(registry, tld, name, registrant)?;
        }
    }

    universe
        .validate()
        .map_err(|e| ScenarioError::Invalid(format!("inconsistent universe: {e}")))?;

    // population
    let share_sum: f64 = raw.shares.iter().map(|(_, s, _)| s).sum();
    if (share_sum - 1.0).abs() > 1e-9 {
        return Err(ScenarioError::Invalid(format!(
            "shares must sum to 1, got {share_sum}"
        )));
    }
    for (root, _, line) in &raw.shares {
        if !universe.contains_root(root) {
            return Err(key_err("share", *line, format!("unknown root {root}")));
        }
    }
    for (root, _) in &raw.weights {
        if !universe.contains_root(root) {
            return Err(ScenarioError::Invalid(format!(
                "weight names unknown root {root}"
            )));
        }
    }

    let mut sorted_shares: Vec<(RootId, f64)> = raw
        .shares
        .iter()
        .map(|(root, share, _)| (root.clone(), *share))
        .collect();
    sorted_shares.sort_by(|a, b| a.0.cmp(&b.0));
    let counts = apportion(&sorted_shares, agents);

    let universe_roots: Vec<RootId> = universe.root_ids().cloned().collect();
    let mut agents_vec = Vec::with_capacity(agents);
    let mut next_index = 0u32;
    for (root, count) in &counts {
        for _ in 0..*count {
            let index = next_index;
            next_index += 1;
            let mut weights = BTreeMap::new();
            for (weighted_root, spec) in &raw.weights {
                let value = match spec {
                    WeightSpec::Const(v) => *v,
                    WeightSpec::Uniform { low, high } => {
                        let ordinal = universe_roots
                            .iter()
                            .position(|r| r == weighted_root)
                            .expect("checked above") as u64;
                        low + (high - low)
                            * rng::unit_f64(seed, rng::TAG_WEIGHT, ordinal, u64::from(index))
                    }
                };
                weights.insert(weighted_root.clone(), value);
            }
            agents_vec.push(OperatorAgent {
                agent_id: AgentId(index),
                current_root: root.clone(),
                intrinsic_weights: weights,
            });
        }
    }
    let population = Population::new(agents_vec)?;

    Ok(Scenario {
        name: raw.name.unwrap_or_else(|| default_name.to_string()),
        universe,
        spare_zones,
        population,
        params,
        horizon,
        seed,
        interventions: raw.interventions,
    })
}

/// Load a scenario from a file; zone paths resolve relative to the
/// file's directory.
pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = read_to_string(path)?;
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
    let default_name = path
        .file_stem()
        .map(|stem| stem.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".to_string());
    parse_scenario_text(&text, base_dir, &default_name)
}

/// Everything a finished run produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario_name: String,
    pub seed: u64,
    pub series: TimeSeries,
    pub final_population: Population,
    pub events: Vec<(u64, InterventionOutcome)>,
    pub final_universe: Universe,
}

impl RunReport {
    pub fn orphan_total(&self) -> usize {
        self.events
            .iter()
            .filter_map(|(_, outcome)| outcome.orphan_report())
            .map(|report| report.orphan_count())
            .sum()
    }

    /// The leading root at the final step, if it crossed the tipping
    /// share.
    pub fn tipped_root(&self) -> Option<(&RootId, f64)> {
        let last = self.series.len().checked_sub(1)?;
        self.series
            .leader_at(last)
            .filter(|(_, share)| *share >= TIPPING_SHARE)
    }

    /// Human-readable run summary: interventions, final shares,
    /// tipping, orphan totals, and pairwise classification of the final
    /// universe.
    pub fn render_summary(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("scenario: {}\n", self.scenario_name));
        out.push_str(&format!("seed: {}\n", self.seed));
        out.push_str(&format!(
            "horizon: {}\n",
            self.series.len().saturating_sub(1)
        ));
        out.push_str("interventions:\n");
        if self.events.is_empty() {
            out.push_str("  none\n");
        } else {
            for (step, outcome) in &self.events {
                out.push_str(&format!("  step {step}: {outcome}\n"));
            }
        }
        let last = self.series.len().saturating_sub(1);
        out.push_str("final shares:");
        for root in self.series.roots() {
            let share = self.series.share_at(last, root).unwrap_or(0.0);
            out.push_str(&format!(" {root}={share:.6}"));
        }
        out.push('\n');
        match self.tipped_root() {
            Some((root, share)) => {
                out.push_str(&format!("tipping: yes ({root} at {share:.6})\n"));
            }
            None => match self.series.leader_at(last) {
                Some((root, share)) => {
                    out.push_str(&format!("tipping: no (leader {root} at {share:.6})\n"));
                }
                None => out.push_str("tipping: no\n"),
            },
        }
        out.push_str(&format!("orphans total: {}\n", self.orphan_total()));
        out.push_str("classification:\n");
        let roots: Vec<&RootId> = self.final_universe.root_ids().collect();
        if roots.len() < 2 {
            out.push_str("  (single root)\n");
        } else {
            for i in 0..roots.len() {
                for j in (i + 1)..roots.len() {
                    let zone_a = self.final_universe.root(roots[i]).expect("listed root");
                    let zone_b = self.final_universe.root(roots[j]).expect("listed root");
                    out.push_str(&format!(
                        "  {} vs {}: {}\n",
                        roots[i],
                        roots[j],
                        classify(zone_a, zone_b)
                    ));
                }
            }
        }
        out
    }
}

/// Execute a scenario: run the adoption dynamics for the configured
/// horizon, applying interventions at their step boundaries. Identical
/// scenarios and seeds produce identical reports.
pub fn run_scenario(
    scenario: &Scenario,
    seed_override: Option<u64>,
) -> Result<RunReport, ScenarioError> {
    let seed = seed_override.unwrap_or(scenario.seed);
    let mut universe = scenario.universe.clone();
    let mut spare_zones = scenario.spare_zones.clone();
    let mut population = scenario.population.clone();
    let roots: Vec<RootId> = universe.root_ids().cloned().collect();

    let mut series = TimeSeries::new(roots);
    series.push_row(&population);
    let mut events = Vec::new();
    let mut table = ReachTable::build(&universe)?;

    for boundary in 0..scenario.horizon {
        let mut universe_changed = false;
        for intervention in scenario
            .interventions
            .iter()
            .filter(|iv| iv.at_step == boundary)
        {
            let outcome = apply_intervention(
                &mut universe,
                &mut population,
                &intervention.action,
                &mut spare_zones,
            )?;
            events.push((boundary, outcome));
            universe_changed = true;
        }
        if universe_changed {
            table = ReachTable::build(&universe)?;
        }
        population = step_with_table(&population, &universe, &scenario.params, seed, &table)?;
        series.push_row(&population);
    }

    Ok(RunReport {
        scenario_name: scenario.name.clone(),
        seed,
        series,
        final_population: population,
        events,
        final_universe: universe,
    })
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "scenario {} ({} agents, horizon {}, seed {})",
            self.name,
            self.population.len(),
            self.horizon,
            self.seed
        )
    }
}
