//! Deterministic simulator of competing DNS roots.
//!
//! The domain name system has exactly one technical root per resolver:
//! whatever zone the resolver is configured to trust. When more than
//! one organization claims the right to define that zone, the result is
//! a standards competition shaped by network externalities. This crate
//! models that competition end to end:
//!
//! * [`namespace`] - labels, names, addresses, root zones, registry
//!   zones, and the [`namespace::Universe`] holding all simulated state.
//! * [`zonefile`] - a deterministic master-file-style text format for
//!   root and registry zones.
//! * [`resolve`] - iterative resolution from a trusted root down to a
//!   registered address.
//! * [`competition`] - the Type 1/2/3 classification of a root pair and
//!   the empirical compatibility matrix over assignment origin and
//!   query root.
//! * [`dynamics`] - agent-based adoption: operators re-evaluate which
//!   root to trust under intrinsic value, externalities, and switching
//!   costs.
//! * [`policy`] - executable interventions: mutual recognition,
//!   conflict-avoiding and conflicting assignment, threshold admission,
//!   bulk reassignment.
//! * [`scenario`] - scenario files tying the above together into
//!   reproducible runs with CSV share series.

pub mod competition;
pub mod dynamics;
pub mod namespace;
pub mod policy;
pub mod resolve;
pub mod rng;
pub mod scenario;
pub mod zonefile;

pub use competition::{
    classify, collisions, compatibility_matrix, Compatibility, CompatibilityMatrix, CompetitionType,
};
pub use dynamics::{run, step, utility, OperatorAgent, Population, TimeSeries, UtilityParams};
pub use namespace::{
    Address, DomainName, Label, RegistryId, RegistryZone, RootId, RootZone, TldDelegation, Universe,
};
pub use policy::{
    apply_intervention, conflict_avoiding_add, conflicting_add, mutual_recognition,
    threshold_admission, Intervention, InterventionAction, OrphanReport,
};
pub use resolve::{intended_address, resolve, ResolutionOutcome, ResolverConfig};
pub use scenario::{load_scenario, run_scenario, RunReport, Scenario};
pub use zonefile::{
    parse_registry_zone, parse_root_zone, serialize_registry_zone, serialize_root_zone, ZoneError,
};
