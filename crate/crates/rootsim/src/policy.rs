//! Policy interventions over the universe: mutual recognition between
//! roots, conflict-avoiding and conflicting assignment of new TLDs,
//! threshold admission of TLDs operated elsewhere, and bulk
//! reassignment of resolver operators.
//!
//! The zone-level operations are pure; `apply_intervention` commits
//! them to a universe at a step boundary, keeping assignment origins
//! consistent: copied delegations keep the origin of the root that
//! first assigned the string, while a conflicting assignment
//! originates at the root that made it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::competition::collisions;
use crate::dynamics::Population;
use crate::namespace::{
    Address, DomainName, Label, NamespaceError, RegistryId, RegistryZone, RootId, RootZone,
    TldDelegation, Universe,
};
use crate::resolve::{resolve, ResolutionOutcome, ResolverConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolicyError {
    #[error("coordination blocked by conflicting assignments: {}", render_labels(.collisions))]
    CollisionBlocked { collisions: BTreeSet<Label> },
    #[error(transparent)]
    Namespace(#[from] NamespaceError),
    #[error("{0} is not operated in any other root")]
    NotOperatedAnywhere(Label),
    #[error("unknown root {0}")]
    UnknownRoot(RootId),
    #[error("no registry zone available for {registry}/{tld}")]
    MissingRegistryZone { registry: RegistryId, tld: Label },
    #[error("fraction {0} outside [0, 1]")]
    InvalidFraction(f64),
}

fn render_labels(labels: &BTreeSet<Label>) -> String {
    labels
        .iter()
        .map(Label::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

/// A scheduled policy action. Interventions apply between dynamics
/// steps: an intervention at step `k` fires after step `k`'s
/// population row is recorded and before the transition to `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Intervention {
    pub at_step: u64,
    pub action: InterventionAction,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InterventionAction {
    /// Both roots recognize and serve each other's TLDs.
    MutualRecognition { root_a: RootId, root_b: RootId },
    /// Add a TLD only if the other root has not claimed the string.
    ConflictAvoidingAdd {
        root: RootId,
        delegation: TldDelegation,
        other_root: RootId,
    },
    /// Add a TLD even though another root holds the string.
    ConflictingAdd {
        root: RootId,
        delegation: TldDelegation,
    },
    /// Copy a TLD operated in some other root once it clears the
    /// name-count and disparate-user thresholds.
    ThresholdAdmission {
        root: RootId,
        tld: Label,
        min_names: usize,
        min_disparate: usize,
    },
    /// Exogenous shock: repoint a fraction of the population.
    BulkReassign { fraction: f64, to_root: RootId },
}

/// Merge two non-conflicting zones into identical contents. Fails if
/// any colliding assignment exists; coordination requires conflict
/// resolution first.
pub fn mutual_recognition(a: &RootZone, b: &RootZone) -> Result<(RootZone, RootZone), PolicyError> {
    let conflicts = collisions(a, b);
    if !conflicts.is_empty() {
        return Err(PolicyError::CollisionBlocked {
            collisions: conflicts,
        });
    }
    let mut merged_a = a.clone();
    for d in b.delegations() {
        if !merged_a.contains(d.tld()) {
            merged_a = merged_a.add_delegation(d.clone())?;
        }
    }
    let mut merged_b = b.clone();
    for d in a.delegations() {
        if !merged_b.contains(d.tld()) {
            merged_b = merged_b.add_delegation(d.clone())?;
        }
    }
    Ok((merged_a, merged_b))
}

#[derive(Debug, Clone, PartialEq)]
pub enum AvoidanceOutcome {
    Added(RootZone),
    /// The string is reserved by the other root; no change.
    Skipped,
}

/// Add a delegation unless the other root already claims the string.
pub fn conflict_avoiding_add(
    root: &RootZone,
    delegation: TldDelegation,
    other: &RootZone,
) -> Result<AvoidanceOutcome, PolicyError> {
    if root.contains(delegation.tld()) {
        return Err(NamespaceError::DuplicateTld(delegation.tld().clone()).into());
    }
    if other.contains(delegation.tld()) {
        return Ok(AvoidanceOutcome::Skipped);
    }
    Ok(AvoidanceOutcome::Added(root.add_delegation(delegation)?))
}

/// One registration rendered unresolvable-as-intended by a conflicting
/// assignment.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OrphanEntry {
    pub name: DomainName,
    pub intended: Address,
    pub observed: ResolutionOutcome,
}

/// Every registration under the other roots' version of the TLD whose
/// resolution by the adding root's resolvers diverges from intended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrphanReport {
    pub tld: Label,
    pub adding_root: RootId,
    entries: BTreeSet<OrphanEntry>,
}

impl OrphanReport {
    pub fn orphan_count(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = &OrphanEntry> {
        self.entries.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One line per orphaned name, intended versus observed.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            out.push_str(&format!(
                "{} intended {} observed {}\n",
                entry.name, entry.intended, entry.observed
            ));
        }
        out
    }
}

/// Add a delegation over another root's claim to the string and report
/// the orphans it creates. The universe is consulted read-only; the
/// report reflects resolution as it will stand once the returned zone
/// is committed.
pub fn conflicting_add(
    root: &RootZone,
    delegation: TldDelegation,
    universe: &Universe,
) -> Result<(RootZone, OrphanReport), PolicyError> {
    let new_zone = root.add_delegation(delegation.clone())?;
    let mut hypothetical = universe.clone();
    hypothetical.replace_root(new_zone.clone());
    let config = ResolverConfig::new("conflicting-add", root.root_id().clone());

    let mut entries = BTreeSet::new();
    for other in universe.roots() {
        if other.root_id() == root.root_id() {
            continue;
        }
        let Some(their_delegation) = other.delegation(delegation.tld()) else {
            continue;
        };
        let Some(registry) =
            universe.registry_zone(their_delegation.registry_id(), delegation.tld())
        else {
            continue; // no zone, no registrations to orphan
        };
        for (second, intended) in registry.registrations() {
            let name = DomainName::from_labels(vec![second.clone(), delegation.tld().clone()])
                .expect("two labels fit the length bound");
            let observed = resolve(&name, &config, &hypothetical).expect("root present");
            if observed != ResolutionOutcome::Resolved(*intended) {
                entries.insert(OrphanEntry {
                    name,
                    intended: *intended,
                    observed,
                });
            }
        }
    }

    Ok((
        new_zone,
        OrphanReport {
            tld: delegation.tld().clone(),
            adding_root: root.root_id().clone(),
            entries,
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectionReason {
    TooFewNames { found: usize, required: usize },
    TooFewDisparateUsers { found: usize, required: usize },
}

impl fmt::Display for RejectionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooFewNames { found, required } => {
                write!(f, "too few names: {found} < {required}")
            }
            Self::TooFewDisparateUsers { found, required } => {
                write!(f, "too few disparate users: {found} < {required}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AdmissionOutcome {
    Admitted(RootZone),
    Rejected(RejectionReason),
}

/// The incumbent operation of a TLD in some root other than `root_id`:
/// the first such root in id order.
fn admission_source(
    universe: &Universe,
    root_id: &RootId,
    tld: &Label,
) -> Option<(RootId, TldDelegation)> {
    universe
        .roots()
        .filter(|zone| zone.root_id() != root_id)
        .find_map(|zone| {
            zone.delegation(tld)
                .map(|d| (zone.root_id().clone(), d.clone()))
        })
}

/// Admit a TLD operated in an alternate root once its registration
/// count and distinct-registrant count clear the thresholds. Admission
/// copies the incumbent operator's delegation; a delegated TLD whose
/// registry operates no zone is not considered operated.
pub fn threshold_admission(
    root: &RootZone,
    tld: &Label,
    universe: &Universe,
    min_names: usize,
    min_disparate: usize,
) -> Result<AdmissionOutcome, PolicyError> {
    let Some((_, delegation)) = admission_source(universe, root.root_id(), tld) else {
        return Err(PolicyError::NotOperatedAnywhere(tld.clone()));
    };
    let Some(zone) = universe.registry_zone(delegation.registry_id(), tld) else {
        return Err(PolicyError::NotOperatedAnywhere(tld.clone()));
    };
    let names = zone.registration_count();
    if names < min_names {
        return Ok(AdmissionOutcome::Rejected(RejectionReason::TooFewNames {
            found: names,
            required: min_names,
        }));
    }
    let disparate = universe.distinct_registrant_count(delegation.registry_id(), tld);
    if disparate < min_disparate {
        return Ok(AdmissionOutcome::Rejected(
            RejectionReason::TooFewDisparateUsers {
                found: disparate,
                required: min_disparate,
            },
        ));
    }
    Ok(AdmissionOutcome::Admitted(root.add_delegation(delegation)?))
}

/// Point the first `round(fraction * n)` agents at `to_root`; returns
/// how many actually moved.
pub fn bulk_reassign(
    population: &mut Population,
    fraction: f64,
    to_root: &RootId,
) -> Result<usize, PolicyError> {
    if !fraction.is_finite() || !(0.0..=1.0).contains(&fraction) {
        return Err(PolicyError::InvalidFraction(fraction));
    }
    let k = (fraction * population.agents.len() as f64).round() as usize;
    let mut moved = 0;
    for agent in population.agents.iter_mut().take(k) {
        if agent.current_root != *to_root {
            agent.current_root = to_root.clone();
            moved += 1;
        }
    }
    Ok(moved)
}

/// What an applied intervention did, for scenario summaries.
#[derive(Debug, Clone, PartialEq)]
pub enum InterventionOutcome {
    Coordinated {
        root_a: RootId,
        root_b: RootId,
        copied: usize,
    },
    Added {
        root: RootId,
        tld: Label,
    },
    SkippedReserved {
        root: RootId,
        tld: Label,
        other_root: RootId,
    },
    AddedConflicting {
        root: RootId,
        tld: Label,
        orphans: OrphanReport,
    },
    Admitted {
        root: RootId,
        tld: Label,
    },
    RejectedAdmission {
        root: RootId,
        tld: Label,
        reason: RejectionReason,
    },
    Reassigned {
        to_root: RootId,
        moved: usize,
    },
}

impl InterventionOutcome {
    pub fn orphan_report(&self) -> Option<&OrphanReport> {
        match self {
            Self::AddedConflicting { orphans, .. } => Some(orphans),
            _ => None,
        }
    }
}

impl fmt::Display for InterventionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Coordinated {
                root_a,
                root_b,
                copied,
            } => write!(
                f,
                "mutual_recognition {root_a} <-> {root_b} ({copied} delegations copied)"
            ),
            Self::Added { root, tld } => write!(f, "conflict_avoiding_add {tld} -> {root} added"),
            Self::SkippedReserved {
                root,
                tld,
                other_root,
            } => write!(
                f,
                "conflict_avoiding_add {tld} -> {root} skipped (reserved by {other_root})"
            ),
            Self::AddedConflicting { root, tld, orphans } => write!(
                f,
                "conflicting_add {tld} -> {root} ({} orphans)",
                orphans.orphan_count()
            ),
            Self::Admitted { root, tld } => {
                write!(f, "threshold_admission {tld} -> {root} admitted")
            }
            Self::RejectedAdmission { root, tld, reason } => {
                write!(f, "threshold_admission {tld} -> {root} rejected ({reason})")
            }
            Self::Reassigned { to_root, moved } => {
                write!(f, "bulk_reassign -> {to_root} ({moved} agents moved)")
            }
        }
    }
}

fn ensure_registry_zone(
    universe: &mut Universe,
    spare_zones: &mut BTreeMap<(RegistryId, Label), RegistryZone>,
    registry: &RegistryId,
    tld: &Label,
) -> Result<(), PolicyError> {
    if universe.registry_zone(registry, tld).is_some() {
        return Ok(());
    }
    match spare_zones.remove(&(registry.clone(), tld.clone())) {
        Some(zone) => {
            universe.add_registry_zone(zone)?;
            Ok(())
        }
        None => Err(PolicyError::MissingRegistryZone {
            registry: registry.clone(),
            tld: tld.clone(),
        }),
    }
}

/// Commit one intervention to the universe (and population, for a bulk
/// reassignment). `spare_zones` holds registry zones that are not yet
/// delegated anywhere; an add pulls the new delegee's zone from it.
pub fn apply_intervention(
    universe: &mut Universe,
    population: &mut Population,
    action: &InterventionAction,
    spare_zones: &mut BTreeMap<(RegistryId, Label), RegistryZone>,
) -> Result<InterventionOutcome, PolicyError> {
    match action {
        InterventionAction::MutualRecognition { root_a, root_b } => {
            let zone_a = universe
                .root(root_a)
                .ok_or_else(|| PolicyError::UnknownRoot(root_a.clone()))?
                .clone();
            let zone_b = universe
                .root(root_b)
                .ok_or_else(|| PolicyError::UnknownRoot(root_b.clone()))?
                .clone();
            let (merged_a, merged_b) = mutual_recognition(&zone_a, &zone_b)?;
            let mut copied = 0;
            for (target, merged, original, source) in [
                (root_a, &merged_a, &zone_a, root_b),
                (root_b, &merged_b, &zone_b, root_a),
            ] {
                for d in merged.delegations() {
                    if original.contains(d.tld()) {
                        continue;
                    }
                    let origin = universe
                        .assignment_origin(d.tld(), source)
                        .cloned()
                        .ok_or_else(|| NamespaceError::MissingOrigin {
                            tld: d.tld().clone(),
                            root: source.clone(),
                        })?;
                    universe.delegate_with_origin(target, d.clone(), origin)?;
                    copied += 1;
                }
            }
            Ok(InterventionOutcome::Coordinated {
                root_a: root_a.clone(),
                root_b: root_b.clone(),
                copied,
            })
        }
        InterventionAction::ConflictAvoidingAdd {
            root,
            delegation,
            other_root,
        } => {
            let zone = universe
                .root(root)
                .ok_or_else(|| PolicyError::UnknownRoot(root.clone()))?
                .clone();
            let other = universe
                .root(other_root)
                .ok_or_else(|| PolicyError::UnknownRoot(other_root.clone()))?
                .clone();
            match conflict_avoiding_add(&zone, delegation.clone(), &other)? {
                AvoidanceOutcome::Skipped => Ok(InterventionOutcome::SkippedReserved {
                    root: root.clone(),
                    tld: delegation.tld().clone(),
                    other_root: other_root.clone(),
                }),
                AvoidanceOutcome::Added(_) => {
                    ensure_registry_zone(
                        universe,
                        spare_zones,
                        delegation.registry_id(),
                        delegation.tld(),
                    )?;
                    universe.delegate(root, delegation.clone())?;
                    Ok(InterventionOutcome::Added {
                        root: root.clone(),
                        tld: delegation.tld().clone(),
                    })
                }
            }
        }
        InterventionAction::ConflictingAdd { root, delegation } => {
            let zone = universe
                .root(root)
                .ok_or_else(|| PolicyError::UnknownRoot(root.clone()))?
                .clone();
            // the new delegee's zone must be live before the orphan
            // sweep so the report reflects post-commit resolution
            ensure_registry_zone(
                universe,
                spare_zones,
                delegation.registry_id(),
                delegation.tld(),
            )?;
            let (_, orphans) = conflicting_add(&zone, delegation.clone(), universe)?;
            universe.delegate(root, delegation.clone())?;
            Ok(InterventionOutcome::AddedConflicting {
                root: root.clone(),
                tld: delegation.tld().clone(),
                orphans,
            })
        }
        InterventionAction::ThresholdAdmission {
            root,
            tld,
            min_names,
            min_disparate,
        } => {
            let zone = universe
                .root(root)
                .ok_or_else(|| PolicyError::UnknownRoot(root.clone()))?
                .clone();
            match threshold_admission(&zone, tld, universe, *min_names, *min_disparate)? {
                AdmissionOutcome::Rejected(reason) => Ok(InterventionOutcome::RejectedAdmission {
                    root: root.clone(),
                    tld: tld.clone(),
                    reason,
                }),
                AdmissionOutcome::Admitted(_) => {
                    let (source_root, delegation) = admission_source(universe, root, tld)
                        .expect("admission established a source");
                    let origin = universe
                        .assignment_origin(tld, &source_root)
                        .cloned()
                        .ok_or_else(|| NamespaceError::MissingOrigin {
                            tld: tld.clone(),
                            root: source_root.clone(),
                        })?;
                    universe.delegate_with_origin(root, delegation, origin)?;
                    Ok(InterventionOutcome::Admitted {
                        root: root.clone(),
                        tld: tld.clone(),
                    })
                }
            }
        }
        InterventionAction::BulkReassign { fraction, to_root } => {
            if !universe.contains_root(to_root) {
                return Err(PolicyError::UnknownRoot(to_root.clone()));
            }
            let moved = bulk_reassign(population, *fraction, to_root)?;
            Ok(InterventionOutcome::Reassigned {
                to_root: to_root.clone(),
                moved,
            })
        }
    }
}
