//! Pairwise classification of competing roots and the empirical
//! compatibility matrix over (assignment origin x query root).
//!
//! Classification follows the three-way taxonomy: coordinated identical
//! zones, a superset root adding non-conflicting TLDs, or conflicting
//! assignments of the same string. The matrix is computed empirically,
//! by resolving every registered name of each origin class through a
//! resolver on each query root and comparing against the intended
//! address. Cells are binary but carry evidence counts, so partial
//! incompatibility stays visible.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::namespace::{Address, DomainName, Label, RootId, RootZone, Universe};
use crate::resolve::{resolve, ResolutionOutcome, ResolverConfig};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompetitionError {
    #[error("unknown root {0}")]
    UnknownRoot(RootId),
    #[error("no assignment origin recorded for {tld} in {root}")]
    MissingOrigin { tld: Label, root: RootId },
    #[error("delegation of {tld} in {root} has no registry zone; universe is inconsistent")]
    BrokenDelegation { tld: Label, root: RootId },
}

/// The three structures a pair of competing roots can take.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompetitionType {
    /// Identical zone contents due to mutual recognition.
    Type1Coordinated,
    /// One root carries every TLD of the other plus extras, with the
    /// shared delegations identical. `superset_root` is `None` when
    /// both roots hold non-conflicting extras and neither contains the
    /// other.
    Type2Superset { superset_root: Option<RootId> },
    /// At least one TLD string assigned by both roots to different
    /// operators.
    Type3Conflicting { collisions: BTreeSet<Label> },
}

impl fmt::Display for CompetitionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Type1Coordinated => f.write_str("Type1Coordinated"),
            Self::Type2Superset { superset_root } => match superset_root {
                Some(root) => write!(f, "Type2Superset({root})"),
                None => f.write_str("Type2Superset(none)"),
            },
            Self::Type3Conflicting { collisions } => {
                let joined = collisions
                    .iter()
                    .map(Label::as_str)
                    .collect::<Vec<_>>()
                    .join(", ");
                write!(f, "Type3Conflicting {{{joined}}}")
            }
        }
    }
}

/// The TLD strings both zones delegate but to different assignments
/// (different registry or different server set).
pub fn collisions(a: &RootZone, b: &RootZone) -> BTreeSet<Label> {
    a.delegations()
        .filter_map(|da| {
            b.delegation(da.tld()).and_then(|db| {
                if da.same_assignment(db) {
                    None
                } else {
                    Some(da.tld().clone())
                }
            })
        })
        .collect()
}

/// Classify a pair of roots. Symmetric up to role swap: the type never
/// depends on argument order, and the superset designation names
/// whichever root strictly contains the other.
pub fn classify(a: &RootZone, b: &RootZone) -> CompetitionType {
    let conflicts = collisions(a, b);
    if !conflicts.is_empty() {
        return CompetitionType::Type3Conflicting {
            collisions: conflicts,
        };
    }
    if a.delegation_map() == b.delegation_map() {
        return CompetitionType::Type1Coordinated;
    }
    // no conflicts means shared TLDs carry identical assignments, so
    // plain set containment decides the superset
    let a_tlds = a.tld_set();
    let b_tlds = b.tld_set();
    let superset_root = if b_tlds.is_superset(&a_tlds) {
        Some(b.root_id().clone())
    } else if a_tlds.is_superset(&b_tlds) {
        Some(a.root_id().clone())
    } else {
        None
    };
    CompetitionType::Type2Superset { superset_root }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compatibility {
    Compatible,
    Incompatible,
}

impl fmt::Display for Compatibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Compatible => f.write_str("Compatible"),
            Self::Incompatible => f.write_str("Incompatible"),
        }
    }
}

/// Per-cell tallies over every name in the cell's origin class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CellEvidence {
    pub resolved_intended: usize,
    pub name_error: usize,
    pub divergent: usize,
}

impl CellEvidence {
    pub fn total(&self) -> usize {
        self.resolved_intended + self.name_error + self.divergent
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixCell {
    pub verdict: Compatibility,
    pub evidence: CellEvidence,
}

impl MatrixCell {
    /// An origin class with no registrations is reported compatible
    /// vacuously; this flag keeps that case distinguishable.
    pub fn is_vacuous(&self) -> bool {
        self.evidence.total() == 0
    }
}

/// The 2x2 relation over (origin of assignment x origin of query).
/// Rows and columns follow the order the two roots were passed in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityMatrix {
    roots: [RootId; 2],
    cells: BTreeMap<(RootId, RootId), MatrixCell>,
}

impl CompatibilityMatrix {
    pub fn roots(&self) -> &[RootId; 2] {
        &self.roots
    }

    pub fn cell(&self, origin: &RootId, query: &RootId) -> Option<&MatrixCell> {
        self.cells.get(&(origin.clone(), query.clone()))
    }

    /// The four verdicts in row-major order: (r0,r0), (r0,r1), (r1,r0),
    /// (r1,r1) where r0, r1 are the roots as passed to the computation.
    pub fn verdicts_row_major(&self) -> [Compatibility; 4] {
        let [r0, r1] = &self.roots;
        [
            self.cells[&(r0.clone(), r0.clone())].verdict,
            self.cells[&(r0.clone(), r1.clone())].verdict,
            self.cells[&(r1.clone(), r0.clone())].verdict,
            self.cells[&(r1.clone(), r1.clone())].verdict,
        ]
    }

    pub fn cells(&self) -> impl Iterator<Item = (&(RootId, RootId), &MatrixCell)> {
        let [r0, r1] = &self.roots;
        [
            (r0.clone(), r0.clone()),
            (r0.clone(), r1.clone()),
            (r1.clone(), r0.clone()),
            (r1.clone(), r1.clone()),
        ]
        .into_iter()
        .map(|key| {
            self.cells
                .get_key_value(&key)
                .expect("all four cells present")
        })
        .collect::<Vec<_>>()
        .into_iter()
    }
}

impl fmt::Display for CompatibilityMatrix {
    /// Fixed-layout table: rows are the origin of the assignment,
    /// columns the origin of the query.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const CORNER: &str = "origin \\ query";
        let [r0, r1] = &self.roots;
        let width = [
            CORNER.len(),
            "Incompatible".len(),
            r0.as_str().len(),
            r1.as_str().len(),
        ]
        .into_iter()
        .max()
        .unwrap();
        let mut write_row = |first: &str, second: &str, third: &str| {
            writeln!(
                f,
                "{}",
                format!("{first:<width$} | {second:<width$} | {third:<width$}").trim_end()
            )
        };
        write_row(CORNER, r0.as_str(), r1.as_str())?;
        for origin in [r0, r1] {
            let verdicts: Vec<String> = [r0, r1]
                .into_iter()
                .map(|query| {
                    self.cells[&(origin.clone(), query.clone())]
                        .verdict
                        .to_string()
                })
                .collect();
            write_row(origin.as_str(), &verdicts[0], &verdicts[1])?;
        }
        Ok(())
    }
}

/// Compute the compatibility matrix for a root pair by resolving every
/// registered name of each origin class through each query root.
pub fn compatibility_matrix(
    a: &RootId,
    b: &RootId,
    universe: &Universe,
) -> Result<CompatibilityMatrix, CompetitionError> {
    for id in [a, b] {
        if !universe.contains_root(id) {
            return Err(CompetitionError::UnknownRoot(id.clone()));
        }
    }

    // (origin, name) -> intended address; enumerating from both roots
    // double-counts shared delegations, but those agree by construction
    let mut classes: BTreeMap<(RootId, DomainName), Address> = BTreeMap::new();
    for id in [a, b] {
        let zone = universe.root(id).expect("checked above");
        for d in zone.delegations() {
            let origin = universe.assignment_origin(d.tld(), id).ok_or_else(|| {
                CompetitionError::MissingOrigin {
                    tld: d.tld().clone(),
                    root: id.clone(),
                }
            })?;
            if origin != a && origin != b {
                continue; // assigned by a third root; outside this pair
            }
            let registry = universe
                .registry_zone(d.registry_id(), d.tld())
                .ok_or_else(|| CompetitionError::BrokenDelegation {
                    tld: d.tld().clone(),
                    root: id.clone(),
                })?;
            for (second, address) in registry.registrations() {
                let name = DomainName::from_labels(vec![second.clone(), d.tld().clone()])
                    .expect("two labels fit the length bound");
                classes.insert((origin.clone(), name), *address);
            }
        }
    }

    let mut cells = BTreeMap::new();
    for origin in [a, b] {
        for query in [a, b] {
            let config = ResolverConfig::new("matrix", query.clone());
            let mut evidence = CellEvidence::default();
            for ((class_origin, name), intended) in &classes {
                if class_origin != origin {
                    continue;
                }
                match resolve(name, &config, universe).expect("query root present") {
                    ResolutionOutcome::Resolved(found) if found == *intended => {
                        evidence.resolved_intended += 1;
                    }
                    ResolutionOutcome::Resolved(_) => evidence.divergent += 1,
                    ResolutionOutcome::NameError => evidence.name_error += 1,
                    ResolutionOutcome::BrokenDelegation => {
                        return Err(CompetitionError::BrokenDelegation {
                            tld: name.tld().expect("registered name").clone(),
                            root: query.clone(),
                        });
                    }
                }
            }
            let verdict = if evidence.name_error + evidence.divergent > 0 {
                Compatibility::Incompatible
            } else {
                Compatibility::Compatible
            };
            cells.insert(
                (origin.clone(), query.clone()),
                MatrixCell { verdict, evidence },
            );
        }
    }

    Ok(CompatibilityMatrix {
        roots: [a.clone(), b.clone()],
        cells,
    })
}
