//! Agent-based adoption dynamics: resolver operators repeatedly choose
//! which root to trust under network externalities.
//!
//! Utility is linear: an intrinsic term for how much the operator
//! values a root's TLD set, an externality term for how much of the
//! rest of the population that root can reach, and a switching cost.
//! The externality term is empirical: each agent is attributed one
//! representative registered name under the TLDs originating from its
//! current root, and a candidate root's reach is the fraction of other
//! agents whose representative name it resolves to the intended
//! address.
//!
//! Revision is asynchronous and stochastic: each step every agent
//! independently reconsiders with a fixed probability, and a
//! reconsidering agent adopts the argmax-utility root (ties keep the
//! current root, then prefer the lexicographically smallest id). All
//! draws are keyed by `(seed, step, agent index)`, so a run is a pure
//! function of its inputs and per-step evaluations are independent of
//! order; the new population is committed as a single swap at step
//! end.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::namespace::{Address, DomainName, RootId, Universe};
use crate::resolve::{resolve, ResolutionOutcome, ResolverConfig};
use crate::rng;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynamicsError {
    #[error("unknown root {0}")]
    UnknownRoot(RootId),
    #[error("duplicate agent id {0}")]
    DuplicateAgentId(u32),
    #[error("invalid utility parameters: {0}")]
    InvalidParams(String),
    #[error("inconsistent universe: {0}")]
    InconsistentUniverse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub u32);

impl std::fmt::Display for AgentId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A resolver operator: trusts one root and carries its private
/// valuation of each root's TLD set.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorAgent {
    pub agent_id: AgentId,
    pub current_root: RootId,
    pub intrinsic_weights: BTreeMap<RootId, f64>,
}

/// Weights of the utility terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityParams {
    pub alpha: f64,
    pub beta: f64,
    pub switch_cost: f64,
    pub reconsider_prob: f64,
}

impl UtilityParams {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        let bad = |what: &str| Err(DynamicsError::InvalidParams(what.to_string()));
        for (name, value) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("switch_cost", self.switch_cost),
            ("reconsider_prob", self.reconsider_prob),
        ] {
            if !value.is_finite() || value < 0.0 {
                return bad(&format!("{name} must be finite and non-negative"));
            }
        }
        if self.reconsider_prob > 1.0 {
            return bad("reconsider_prob must not exceed 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub agents: Vec<OperatorAgent>,
    pub step_index: u64,
}

impl Population {
    pub fn new(agents: Vec<OperatorAgent>) -> Result<Self, DynamicsError> {
        let mut seen = std::collections::BTreeSet::new();
        for agent in &agents {
            if !seen.insert(agent.agent_id) {
                return Err(DynamicsError::DuplicateAgentId(agent.agent_id.0));
            }
        }
        Ok(Self {
            agents,
            step_index: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    /// Exact integer counts per root; shares derive from these, so the
    /// counts always sum to the agent total.
    pub fn root_counts(&self) -> BTreeMap<RootId, usize> {
        let mut counts = BTreeMap::new();
        for agent in &self.agents {
            *counts.entry(agent.current_root.clone()).or_insert(0) += 1;
        }
        counts
    }

    pub fn share_of(&self, root: &RootId) -> f64 {
        if self.agents.is_empty() {
            return 0.0;
        }
        let count = self
            .agents
            .iter()
            .filter(|a| a.current_root == *root)
            .count();
        count as f64 / self.agents.len() as f64
    }
}

/// Precomputed reachability: for every assignment-origin class, the
/// sorted list of its registered names, and per query root whether each
/// name resolves to its intended address. Valid until the universe
/// changes.
#[derive(Debug, Clone)]
pub(crate) struct ReachTable {
    classes: BTreeMap<RootId, Vec<(DomainName, Address)>>,
    reachable: BTreeMap<RootId, BTreeMap<RootId, Vec<bool>>>,
}

impl ReachTable {
    pub(crate) fn build(universe: &Universe) -> Result<Self, DynamicsError> {
        let mut class_map: BTreeMap<(RootId, DomainName), Address> = BTreeMap::new();
        for zone in universe.roots() {
            for d in zone.delegations() {
                let origin = universe
                    .assignment_origin(d.tld(), zone.root_id())
                    .ok_or_else(|| {
                        DynamicsError::InconsistentUniverse(format!(
                            "no assignment origin for {} in {}",
                            d.tld(),
                            zone.root_id()
                        ))
                    })?;
                let Some(registry) = universe.registry_zone(d.registry_id(), d.tld()) else {
                    continue; // zoneless delegation carries no names
                };
                for (second, address) in registry.registrations() {
                    let name = DomainName::from_labels(vec![second.clone(), d.tld().clone()])
                        .expect("two labels fit the length bound");
                    class_map.insert((origin.clone(), name), *address);
                }
            }
        }

        let mut classes: BTreeMap<RootId, Vec<(DomainName, Address)>> = BTreeMap::new();
        for ((origin, name), address) in class_map {
            classes.entry(origin).or_default().push((name, address));
        }

        let mut reachable = BTreeMap::new();
        for query in universe.root_ids() {
            let config = ResolverConfig::new("reach", query.clone());
            let mut per_origin = BTreeMap::new();
            for (origin, names) in &classes {
                let flags = names
                    .iter()
                    .map(|(name, intended)| {
                        matches!(
                            resolve(name, &config, universe),
                            Ok(ResolutionOutcome::Resolved(found)) if found == *intended
                        )
                    })
                    .collect();
                per_origin.insert(origin.clone(), flags);
            }
            reachable.insert(query.clone(), per_origin);
        }

        Ok(Self { classes, reachable })
    }

    /// Whether `query` resolves the representative name of the agent at
    /// `agent_index` whose current root is `agent_root`. Agents whose
    /// root originated no registered names have nothing to reach.
    fn rep_reachable(&self, query: &RootId, agent_root: &RootId, agent_index: usize) -> bool {
        let Some(names) = self.classes.get(agent_root) else {
            return false;
        };
        if names.is_empty() {
            return false;
        }
        self.reachable
            .get(query)
            .and_then(|per_origin| per_origin.get(agent_root))
            .map(|flags| flags[agent_index % names.len()])
            .unwrap_or(false)
    }
}

fn reach_fraction(reachable_count: usize, other_count: usize) -> f64 {
    if other_count == 0 {
        1.0 // vacuous: nobody else to reach
    } else {
        reachable_count as f64 / other_count as f64
    }
}

fn utility_terms(
    agent: &OperatorAgent,
    candidate: &RootId,
    reach: f64,
    params: &UtilityParams,
) -> f64 {
    let intrinsic = agent
        .intrinsic_weights
        .get(candidate)
        .copied()
        .unwrap_or(0.0);
    let switch = if *candidate != agent.current_root {
        params.switch_cost
    } else {
        0.0
    };
    params.alpha * intrinsic + params.beta * reach - switch
}

/// The utility `agent` assigns to trusting `candidate`, against the
/// current population snapshot.
pub fn utility(
    agent: &OperatorAgent,
    candidate: &RootId,
    population: &Population,
    universe: &Universe,
    params: &UtilityParams,
) -> Result<f64, DynamicsError> {
    if !universe.contains_root(candidate) {
        return Err(DynamicsError::UnknownRoot(candidate.clone()));
    }
    let table = ReachTable::build(universe)?;
    let mut reachable = 0usize;
    let mut others = 0usize;
    for (index, other) in population.agents.iter().enumerate() {
        if other.agent_id == agent.agent_id {
            continue;
        }
        others += 1;
        if table.rep_reachable(candidate, &other.current_root, index) {
            reachable += 1;
        }
    }
    Ok(utility_terms(
        agent,
        candidate,
        reach_fraction(reachable, others),
        params,
    ))
}

pub(crate) fn step_with_table(
    population: &Population,
    universe: &Universe,
    params: &UtilityParams,
    seed: u64,
    table: &ReachTable,
) -> Result<Population, DynamicsError> {
    for agent in &population.agents {
        if !universe.contains_root(&agent.current_root) {
            return Err(DynamicsError::UnknownRoot(agent.current_root.clone()));
        }
    }
    let candidates: Vec<&RootId> = universe.root_ids().collect();
    let n = population.agents.len();

    // reachability bits per candidate for every agent's representative
    // name; per-agent reach is then a counted subtraction
    let bits: Vec<Vec<bool>> = candidates
        .iter()
        .map(|candidate| {
            population
                .agents
                .iter()
                .enumerate()
                .map(|(index, agent)| table.rep_reachable(candidate, &agent.current_root, index))
                .collect()
        })
        .collect();
    let sums: Vec<usize> = bits
        .iter()
        .map(|flags| flags.iter().filter(|b| **b).count())
        .collect();

    let mut next_agents = Vec::with_capacity(n);
    for (index, agent) in population.agents.iter().enumerate() {
        let coin = rng::unit_f64(
            seed,
            rng::TAG_RECONSIDER,
            population.step_index,
            index as u64,
        );
        if coin >= params.reconsider_prob {
            next_agents.push(agent.clone());
            continue;
        }
        let mut best: Option<(&RootId, f64)> = None;
        for (c_index, candidate) in candidates.iter().enumerate() {
            let reachable = sums[c_index] - usize::from(bits[c_index][index]);
            let reach = reach_fraction(reachable, n.saturating_sub(1));
            let score = utility_terms(agent, candidate, reach, params);
            best = match best {
                None => Some((candidate, score)),
                Some((leader, leader_score)) => {
                    if score > leader_score
                        || (score == leader_score
                            && tie_prefers(candidate, leader, &agent.current_root))
                    {
                        Some((candidate, score))
                    } else {
                        Some((leader, leader_score))
                    }
                }
            };
        }
        let chosen = best
            .map(|(root, _)| root.clone())
            .unwrap_or_else(|| agent.current_root.clone());
        let mut updated = agent.clone();
        updated.current_root = chosen;
        next_agents.push(updated);
    }

    Ok(Population {
        agents: next_agents,
        step_index: population.step_index + 1,
    })
}

/// Tie-break among equal-utility candidates: keep the current root,
/// otherwise take the lexicographically smallest id.
fn tie_prefers(challenger: &RootId, leader: &RootId, current: &RootId) -> bool {
    if leader == current {
        return false;
    }
    if challenger == current {
        return true;
    }
    challenger < leader
}

/// Advance the population by one revision step. Deterministic given
/// the seed; the draw for each agent is keyed by the step index and the
/// agent's position.
pub fn step(
    population: &Population,
    universe: &Universe,
    params: &UtilityParams,
    seed: u64,
) -> Result<Population, DynamicsError> {
    params.validate()?;
    let table = ReachTable::build(universe)?;
    step_with_table(population, universe, params, seed, &table)
}

/// Per-root share series; one row per step including the initial row.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    roots: Vec<RootId>,
    rows: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub(crate) fn new(roots: Vec<RootId>) -> Self {
        Self {
            roots,
            rows: Vec::new(),
        }
    }

    pub(crate) fn push_row(&mut self, population: &Population) {
        let n = population.agents.len();
        let counts = population.root_counts();
        let row = self
            .roots
            .iter()
            .map(|root| {
                if n == 0 {
                    0.0
                } else {
                    *counts.get(root).unwrap_or(&0) as f64 / n as f64
                }
            })
            .collect();
        self.rows.push(row);
    }

    pub fn roots(&self) -> &[RootId] {
        &self.roots
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn share_at(&self, step: usize, root: &RootId) -> Option<f64> {
        let column = self.roots.iter().position(|r| r == root)?;
        self.rows.get(step).map(|row| row[column])
    }

    /// The root with the largest share in the given row; ties take the
    /// lexicographically smallest id.
    pub fn leader_at(&self, step: usize) -> Option<(&RootId, f64)> {
        let row = self.rows.get(step)?;
        self.roots
            .iter()
            .zip(row)
            .max_by(|(ra, sa), (rb, sb)| sa.partial_cmp(sb).unwrap().then(rb.cmp(ra)))
            .map(|(root, share)| (root, *share))
    }

    /// CSV with header `step,<root>,...` and shares printed to six
    /// decimals. Byte-identical for identical series.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step");
        for root in &self.roots {
            out.push(',');
            out.push_str(root.as_str());
        }
        out.push('\n');
        for (index, row) in self.rows.iter().enumerate() {
            write!(out, "{index}").unwrap();
            for share in row {
                write!(out, ",{share:.6}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Run `horizon` steps and collect the share series; row 0 holds the
/// initial shares. Identical seeds produce identical series.
pub fn run(
    universe: &Universe,
    initial: Population,
    params: &UtilityParams,
    horizon: u64,
    seed: u64,
) -> Result<(TimeSeries, Population), DynamicsError> {
    params.validate()?;
    let table = ReachTable::build(universe)?;
    let roots: Vec<RootId> = universe.root_ids().cloned().collect();
    let mut series = TimeSeries::new(roots);
    let mut population = initial;
    series.push_row(&population);
    for _ in 0..horizon {
        population = step_with_table(&population, universe, params, seed, &table)?;
        series.push_row(&population);
    }
    Ok((series, population))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::namespace::{Address, Label, RegistryId, RegistryZone, RootZone, TldDelegation};

    fn label(s: &str) -> Label {
        Label::new(s).unwrap()
    }

    fn rid(s: &str) -> RootId {
        RootId::new(s).unwrap()
    }

    fn delegation(tld: &str, registry: &str, addr: u32) -> TldDelegation {
        TldDelegation::new(
            label(tld),
            RegistryId::new(registry).unwrap(),
            vec![Address::new(addr)],
        )
        .unwrap()
    }

    fn registry_zone(registry: &str, tld: &str, names: &[(&str, u32)]) -> RegistryZone {
        let mut z = RegistryZone::new(RegistryId::new(registry).unwrap(), label(tld));
        for (name, addr) in names {
            z.add_registration(label(name), Address::new(*addr))
                .unwrap();
        }
        z
    }

    fn agent(id: u32, root: &str, weights: &[(&str, f64)]) -> OperatorAgent {
        OperatorAgent {
            agent_id: AgentId(id),
            current_root: rid(root),
            intrinsic_weights: weights.iter().map(|(r, w)| (rid(r), *w)).collect(),
        }
    }

    fn params(alpha: f64, beta: f64, switch_cost: f64, reconsider_prob: f64) -> UtilityParams {
        UtilityParams {
            alpha,
            beta,
            switch_cost,
            reconsider_prob,
        }
    }

    /// root-c = root-i plus `new`; three com names, two new names.
    fn superset_universe() -> Universe {
        let mut u = Universe::new();
        u.add_registry_zone(registry_zone(
            "nsi.test",
            "com",
            &[("alpha", 10), ("bravo", 11), ("carol", 12)],
        ))
        .unwrap();
        u.add_registry_zone(registry_zone(
            "newnet.test",
            "new",
            &[("xray", 20), ("yank", 21)],
        ))
        .unwrap();
        let mut root_i = RootZone::new(rid("root-i"));
        root_i = root_i
            .add_delegation(delegation("com", "nsi.test", 1))
            .unwrap();
        let root_c = root_i
            .clone()
            .add_delegation(delegation("new", "newnet.test", 2))
            .unwrap();
        let root_c = {
            // rebuild under the right id
            let mut z = RootZone::new(rid("root-c"));
            for d in root_c.delegations() {
                z = z.add_delegation(d.clone()).unwrap();
            }
            z
        };
        u.add_root(root_i).unwrap();
        u.add_root(root_c).unwrap();
        u
    }

    /// Shared com plus a biz assigned to different operators on each
    /// side, with names on both.
    fn conflict_universe() -> Universe {
        let mut u = Universe::new();
        u.add_registry_zone(registry_zone(
            "nsi.test",
            "com",
            &[("alpha", 10), ("bravo", 11), ("carol", 12), ("delta", 13)],
        ))
        .unwrap();
        u.add_registry_zone(registry_zone(
            "neustar.test",
            "biz",
            &[("corp", 30), ("host", 31)],
        ))
        .unwrap();
        u.add_registry_zone(registry_zone(
            "gallegos.test",
            "biz",
            &[("shop", 40), ("mail", 41)],
        ))
        .unwrap();
        let mut root_i = RootZone::new(rid("root-i"));
        root_i = root_i
            .add_delegation(delegation("com", "nsi.test", 1))
            .unwrap();
        root_i = root_i
            .add_delegation(delegation("biz", "neustar.test", 3))
            .unwrap();
        let mut root_c = RootZone::new(rid("root-c"));
        root_c = root_c
            .add_delegation(delegation("com", "nsi.test", 1))
            .unwrap();
        root_c = root_c
            .add_delegation(delegation("biz", "gallegos.test", 4))
            .unwrap();
        u.add_root(root_i).unwrap();
        u.add_root(root_c).unwrap();
        u
    }

    #[test]
    fn params_validation() {
        assert!(params(1.0, 1.0, 0.5, 0.05).validate().is_ok());
        assert!(params(-1.0, 1.0, 0.0, 0.0).validate().is_err());
        assert!(params(0.0, 0.0, 0.0, 1.5).validate().is_err());
        assert!(params(f64::NAN, 0.0, 0.0, 0.5).validate().is_err());
    }

    #[test]
    fn population_rejects_duplicate_ids() {
        let agents = vec![agent(1, "root-i", &[]), agent(1, "root-i", &[])];
        assert!(matches!(
            Population::new(agents),
            Err(DynamicsError::DuplicateAgentId(1))
        ));
    }

    #[test]
    fn single_agent_reach_is_vacuously_one() {
        let u = superset_universe();
        let pop = Population::new(vec![agent(0, "root-i", &[])]).unwrap();
        let p = params(0.0, 2.0, 0.0, 1.0);
        let value = utility(&pop.agents[0], &rid("root-i"), &pop, &u, &p).unwrap();
        assert_eq!(value, 2.0, "beta times vacuous reach of 1");
    }

    #[test]
    fn identical_roots_give_equal_utility() {
        let mut u = Universe::new();
        u.add_registry_zone(registry_zone("nsi.test", "com", &[("alpha", 10)]))
            .unwrap();
        for root in ["root-i", "root-c"] {
            let z = RootZone::new(rid(root))
                .add_delegation(delegation("com", "nsi.test", 1))
                .unwrap();
            u.add_root(z).unwrap();
        }
        let pop = Population::new(vec![
            agent(0, "root-i", &[]),
            agent(1, "root-i", &[]),
            agent(2, "root-c", &[]),
        ])
        .unwrap();
        let p = params(0.0, 1.0, 0.0, 1.0);
        let u_i = utility(&pop.agents[0], &rid("root-i"), &pop, &u, &p).unwrap();
        let u_c = utility(&pop.agents[0], &rid("root-c"), &pop, &u, &p).unwrap();
        assert_eq!(u_i, u_c);
    }

    /// Five agents, hand-computed utilities on the superset fixture.
    /// Agent 0 on root-i: the four others are indices 1-3 on root-i
    /// (reps bravo.com, carol.com, alpha.com) and 4 on root-c (rep
    /// xray.new). root-c reaches all 4; root-i reaches 3 of 4.
    #[test]
    fn five_agent_fixture_matches_hand_computation() {
        let u = superset_universe();
        let pop = Population::new(vec![
            agent(0, "root-i", &[("root-i", 1.0), ("root-c", 2.0)]),
            agent(1, "root-i", &[]),
            agent(2, "root-i", &[]),
            agent(3, "root-i", &[]),
            agent(4, "root-c", &[]),
        ])
        .unwrap();
        let p = params(0.5, 2.0, 0.3, 1.0);
        let u_c = utility(&pop.agents[0], &rid("root-c"), &pop, &u, &p).unwrap();
        let u_i = utility(&pop.agents[0], &rid("root-i"), &pop, &u, &p).unwrap();
        assert!((u_c - 2.7).abs() < 1e-12, "got {u_c}");
        assert!((u_i - 2.0).abs() < 1e-12, "got {u_i}");
        let delta = u_c - u_i;
        let expected = 0.5 * (2.0 - 1.0) + 2.0 * (1.0 - 0.75) - 0.3;
        assert!((delta - expected).abs() < 1e-12);
    }

    #[test]
    fn utility_rejects_unknown_candidate() {
        let u = superset_universe();
        let pop = Population::new(vec![agent(0, "root-i", &[])]).unwrap();
        let p = params(0.0, 1.0, 0.0, 1.0);
        assert!(matches!(
            utility(&pop.agents[0], &rid("root-x"), &pop, &u, &p),
            Err(DynamicsError::UnknownRoot(_))
        ));
    }

    #[test]
    fn zero_reconsideration_only_advances_the_clock() {
        let u = superset_universe();
        let pop = Population::new(vec![agent(0, "root-i", &[]), agent(1, "root-c", &[])]).unwrap();
        let next = step(&pop, &u, &params(1.0, 1.0, 0.0, 0.0), 42).unwrap();
        assert_eq!(next.agents, pop.agents);
        assert_eq!(next.step_index, 1);
    }

    #[test]
    fn dominant_intrinsic_switches_in_one_step() {
        let u = superset_universe();
        let pop = Population::new(vec![agent(
            0,
            "root-i",
            &[("root-i", 0.0), ("root-c", 5.0)],
        )])
        .unwrap();
        let next = step(&pop, &u, &params(1.0, 0.0, 0.0, 1.0), 1).unwrap();
        assert_eq!(next.agents[0].current_root, rid("root-c"));
    }

    #[test]
    fn equal_utilities_keep_the_current_root() {
        let u = superset_universe();
        // alpha=0, beta=0: every candidate scores 0 for a non-switch,
        // -switch_cost for a switch; with zero switch cost it's a tie
        let pop = Population::new(vec![agent(0, "root-c", &[])]).unwrap();
        let next = step(&pop, &u, &params(0.0, 0.0, 0.0, 1.0), 9).unwrap();
        assert_eq!(next.agents[0].current_root, rid("root-c"));
    }

    #[test]
    fn ties_between_foreign_roots_prefer_the_smallest_id() {
        let mut u = Universe::new();
        u.add_registry_zone(registry_zone("nsi.test", "com", &[("alpha", 10)]))
            .unwrap();
        for root in ["root-a", "root-b", "root-z"] {
            u.add_root(
                RootZone::new(rid(root))
                    .add_delegation(delegation("com", "nsi.test", 1))
                    .unwrap(),
            )
            .unwrap();
        }
        let pop = Population::new(vec![agent(
            0,
            "root-z",
            &[("root-a", 5.0), ("root-b", 5.0), ("root-z", 0.0)],
        )])
        .unwrap();
        let next = step(&pop, &u, &params(1.0, 0.0, 0.0, 1.0), 3).unwrap();
        assert_eq!(next.agents[0].current_root, rid("root-a"));
    }

    #[test]
    fn steps_are_deterministic_per_seed() {
        let u = conflict_universe();
        let agents: Vec<_> = (0..40)
            .map(|i| agent(i, if i % 10 == 0 { "root-c" } else { "root-i" }, &[]))
            .collect();
        let pop = Population::new(agents).unwrap();
        let p = params(0.0, 1.0, 0.0, 0.3);
        let a = step(&pop, &u, &p, 77).unwrap();
        let b = step(&pop, &u, &p, 77).unwrap();
        assert_eq!(a, b);
        let c = step(&pop, &u, &p, 78).unwrap();
        assert!(a != c || a.agents == pop.agents);
    }

    #[test]
    fn agent_ids_do_not_influence_dynamics() {
        let u = conflict_universe();
        let make = |offset: u32| {
            let agents: Vec<_> = (0..30)
                .map(|i| {
                    agent(
                        i * 7 + offset,
                        if i % 5 == 0 { "root-c" } else { "root-i" },
                        &[],
                    )
                })
                .collect();
            Population::new(agents).unwrap()
        };
        let p = params(0.0, 1.0, 0.1, 0.5);
        let (series_a, _) = run(&u, make(0), &p, 20, 5).unwrap();
        let (series_b, _) = run(&u, make(1000), &p, 20, 5).unwrap();
        assert_eq!(series_a, series_b);
    }

    #[test]
    fn monoculture_with_switch_cost_is_absorbing() {
        let u = superset_universe();
        let agents: Vec<_> = (0..20).map(|i| agent(i, "root-i", &[])).collect();
        let pop = Population::new(agents).unwrap();
        let p = params(0.0, 1.0, 0.2, 1.0);
        let (series, final_pop) = run(&u, pop, &p, 30, 11).unwrap();
        assert_eq!(series.share_at(30, &rid("root-i")), Some(1.0));
        assert!(final_pop
            .agents
            .iter()
            .all(|a| a.current_root == rid("root-i")));
    }

    #[test]
    fn majority_share_never_decreases_under_pure_externalities() {
        let u = conflict_universe();
        let agents: Vec<_> = (0..1000)
            .map(|i| agent(i, if i < 997 { "root-i" } else { "root-c" }, &[]))
            .collect();
        let pop = Population::new(agents).unwrap();
        let p = params(0.0, 1.0, 0.0, 0.05);
        for seed in 0..20 {
            let (series, _) = run(&u, pop.clone(), &p, 100, seed).unwrap();
            let shares: Vec<f64> = (0..=100)
                .map(|t| series.share_at(t, &rid("root-i")).unwrap())
                .collect();
            for pair in shares.windows(2) {
                assert!(pair[1] >= pair[0], "seed {seed}: share dropped: {pair:?}");
            }
        }
    }

    #[test]
    fn horizon_zero_yields_single_row() {
        let u = superset_universe();
        let pop = Population::new(vec![agent(0, "root-i", &[])]).unwrap();
        let (series, final_pop) = run(&u, pop, &params(0.0, 1.0, 0.0, 0.5), 0, 1).unwrap();
        assert_eq!(series.len(), 1);
        assert_eq!(final_pop.step_index, 0);
    }

    #[test]
    fn run_is_reproducible_and_rows_sum_to_one() {
        let u = conflict_universe();
        let agents: Vec<_> = (0..50)
            .map(|i| agent(i, if i % 4 == 0 { "root-c" } else { "root-i" }, &[]))
            .collect();
        let pop = Population::new(agents).unwrap();
        let p = params(0.0, 2.0, 0.1, 0.2);
        let (series_a, _) = run(&u, pop.clone(), &p, 60, 31).unwrap();
        let (series_b, _) = run(&u, pop, &p, 60, 31).unwrap();
        assert_eq!(series_a.to_csv(), series_b.to_csv());
        for row in series_a.rows() {
            let sum: f64 = row.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn csv_shape_and_formatting() {
        let u = superset_universe();
        let pop = Population::new(vec![agent(0, "root-i", &[]), agent(1, "root-c", &[])]).unwrap();
        let (series, _) = run(&u, pop, &params(0.0, 0.0, 1.0, 0.0), 2, 0).unwrap();
        let csv = series.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "step,root-c,root-i");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], "0,0.500000,0.500000");
    }

    #[test]
    fn leader_breaks_ties_toward_smaller_id() {
        let u = superset_universe();
        let pop = Population::new(vec![agent(0, "root-i", &[]), agent(1, "root-c", &[])]).unwrap();
        let (series, _) = run(&u, pop, &params(0.0, 0.0, 1.0, 0.0), 0, 0).unwrap();
        let (leader, share) = series.leader_at(0).unwrap();
        assert_eq!(leader, &rid("root-c"));
        assert_eq!(share, 0.5);
    }

    /// The batched per-step evaluation must pick exactly the root the
    /// public utility function ranks highest, tie-break included.
    #[test]
    fn step_agrees_with_pointwise_utilities() {
        let u = conflict_universe();
        let agents: Vec<_> = (0..12)
            .map(|i| {
                agent(
                    i,
                    if i % 3 == 0 { "root-c" } else { "root-i" },
                    &[("root-i", f64::from(i % 4)), ("root-c", f64::from(i % 5))],
                )
            })
            .collect();
        let pop = Population::new(agents).unwrap();
        let p = params(0.7, 1.3, 0.2, 1.0);
        let next = step(&pop, &u, &p, 123).unwrap();
        for (agent, updated) in pop.agents.iter().zip(&next.agents) {
            let mut expected = agent.current_root.clone();
            let mut best = utility(agent, &agent.current_root, &pop, &u, &p).unwrap();
            for candidate in [rid("root-c"), rid("root-i")] {
                if candidate == agent.current_root {
                    continue;
                }
                let score = utility(agent, &candidate, &pop, &u, &p).unwrap();
                let beats_on_tie =
                    score == best && expected != agent.current_root && candidate < expected;
                if score > best || beats_on_tie {
                    best = score;
                    expected = candidate;
                }
            }
            assert_eq!(updated.current_root, expected, "agent {}", agent.agent_id);
        }
    }
}
