//! Core domain types for the name hierarchy: labels, domain names,
//! addresses, root zones, registry zones, and the universe that ties
//! them all together.
//!
//! Everything here is an immutable value after construction. Zone
//! "mutation" is expressed as persistent updates (`add_delegation`
//! returns a new zone), so snapshots can be shared freely across
//! concurrent scenario sweeps.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

const MAX_LABEL_LEN: usize = 63;
const MAX_NAME_LEN: usize = 253;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NamespaceError {
    #[error("invalid label {text:?}: {reason}")]
    InvalidLabel { text: String, reason: String },
    #[error("empty domain name")]
    EmptyName,
    #[error("domain name too long: {length} characters")]
    NameTooLong { length: usize },
    #[error("invalid identifier {text:?}: {reason}")]
    InvalidIdentifier { text: String, reason: String },
    #[error("invalid address {text:?}")]
    InvalidAddress { text: String },
    #[error("delegation for {0} has no name servers")]
    EmptyServerList(Label),
    #[error("tld {0} is already delegated in this zone")]
    DuplicateTld(Label),
    #[error("registration {0} already present in this zone")]
    DuplicateRegistration(Label),
    #[error("no registration named {0} in this zone")]
    UnknownRegistration(Label),
    #[error("root {0} already present in the universe")]
    DuplicateRoot(RootId),
    #[error("registry {registry} already operates a zone for {tld}")]
    DuplicateRegistryZone { registry: RegistryId, tld: Label },
    #[error("unknown registry {0}")]
    UnknownRegistry(RegistryId),
    #[error("unknown root {0}")]
    UnknownRoot(RootId),
    #[error("delegation of {tld} in {root} points to {registry} which operates no zone for it")]
    MissingRegistryZone {
        root: RootId,
        tld: Label,
        registry: RegistryId,
    },
    #[error("registry zone {registry}/{tld} is not delegated by any root")]
    UndelegatedZone { registry: RegistryId, tld: Label },
    #[error("no assignment origin recorded for {tld} in {root}")]
    MissingOrigin { tld: Label, root: RootId },
}

/// A single DNS label: 1-63 letters, digits or hyphens, no leading or
/// trailing hyphen. Stored lowercase, so comparison is case-insensitive
/// by construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(text: &str) -> Result<Self, NamespaceError> {
        let lowered = text.to_ascii_lowercase();
        let err = |reason: &str| NamespaceError::InvalidLabel {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        if lowered.is_empty() {
            return Err(err("empty"));
        }
        if lowered.len() > MAX_LABEL_LEN {
            return Err(err("longer than 63 characters"));
        }
        if !lowered
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-')
        {
            return Err(err("characters outside letters/digits/hyphen"));
        }
        if lowered.starts_with('-') || lowered.ends_with('-') {
            return Err(err("leading or trailing hyphen"));
        }
        Ok(Self(lowered))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Label {
    type Err = NamespaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

/// A domain name as an ordered sequence of labels, least significant
/// first: `shop.new.` is `["shop", "new"]`. The root name is the empty
/// sequence and renders as `"."`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DomainName {
    labels: Vec<Label>,
}

impl DomainName {
    pub fn root() -> Self {
        Self { labels: Vec::new() }
    }

    /// Parse a dotted name, with or without the trailing dot. Parsing
    /// then rendering reproduces the canonical (lowercase, trailing
    /// dot) form.
    pub fn parse(text: &str) -> Result<Self, NamespaceError> {
        if text.is_empty() {
            return Err(NamespaceError::EmptyName);
        }
        if text == "." {
            return Ok(Self::root());
        }
        let body = text.strip_suffix('.').unwrap_or(text);
        let labels = body
            .split('.')
            .map(Label::new)
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_labels(labels)
    }

    pub fn from_labels(labels: Vec<Label>) -> Result<Self, NamespaceError> {
        // limit applies to the dotted form without the trailing dot
        let length =
            labels.iter().map(|l| l.as_str().len()).sum::<usize>() + labels.len().saturating_sub(1);
        if length > MAX_NAME_LEN {
            return Err(NamespaceError::NameTooLong { length });
        }
        Ok(Self { labels })
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn is_root(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    /// The most significant label: `new` in `shop.new.`.
    pub fn tld(&self) -> Option<&Label> {
        self.labels.last()
    }

    /// The label directly under the TLD: `shop` in `shop.new.`.
    pub fn second_level(&self) -> Option<&Label> {
        self.labels.len().checked_sub(2).map(|i| &self.labels[i])
    }
}

impl fmt::Display for DomainName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.labels.is_empty() {
            return f.write_str(".");
        }
        for label in &self.labels {
            write!(f, "{label}.")?;
        }
        Ok(())
    }
}

impl FromStr for DomainName {
    type Err = NamespaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

/// A synthetic 32-bit host address, rendered dotted-quad.
#[derive(Debug, Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address(u32);

impl Address {
    pub const fn new(value: u32) -> Self {
        Self(value)
    }

    pub const fn from_octets(a: u8, b: u8, c: u8, d: u8) -> Self {
        Self(u32::from_be_bytes([a, b, c, d]))
    }

    pub const fn value(self) -> u32 {
        self.0
    }

    pub const fn octets(self) -> [u8; 4] {
        self.0.to_be_bytes()
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.octets();
        write!(f, "{a}.{b}.{c}.{d}")
    }
}

impl FromStr for Address {
    type Err = NamespaceError;

    /// Strict dotted-quad: four decimal octets, no leading zeros, so
    /// the canonical text form round-trips.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || NamespaceError::InvalidAddress {
            text: s.to_string(),
        };
        let mut octets = [0u8; 4];
        let mut parts = s.split('.');
        for slot in &mut octets {
            let part = parts.next().ok_or_else(err)?;
            if part.is_empty()
                || part.len() > 3
                || !part.bytes().all(|b| b.is_ascii_digit())
                || (part.len() > 1 && part.starts_with('0'))
            {
                return Err(err());
            }
            *slot = part
                .parse::<u16>()
                .ok()
                .filter(|v| *v <= 255)
                .ok_or_else(err)? as u8;
        }
        if parts.next().is_some() {
            return Err(err());
        }
        Ok(Self::from_octets(
            octets[0], octets[1], octets[2], octets[3],
        ))
    }
}

/// Identifier of a root administration, e.g. `root-i` or `root-c`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootId(String);

impl RootId {
    pub fn new(text: &str) -> Result<Self, NamespaceError> {
        if text.is_empty()
            || !text
                .bytes()
                .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'.' | b'_' | b'-'))
        {
            return Err(NamespaceError::InvalidIdentifier {
                text: text.to_string(),
                reason: "root ids are non-empty [A-Za-z0-9._-] strings".to_string(),
            });
        }
        Ok(Self(text.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RootId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for RootId {
    type Err = NamespaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

/// Identifier of a registry operator. Constrained to dotted label form
/// (`nsi.test`) so it can double as the parent domain of the name
/// servers written into zone files.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegistryId(String);

impl RegistryId {
    /// Length is capped well under the domain-name bound so that
    /// synthesized server names (`ns<k>.<registry>.`) always fit.
    pub const MAX_LEN: usize = 200;

    pub fn new(text: &str) -> Result<Self, NamespaceError> {
        let pieces = text
            .split('.')
            .map(Label::new)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| NamespaceError::InvalidIdentifier {
                text: text.to_string(),
                reason: "registry ids are dot-joined labels".to_string(),
            })?;
        let joined = pieces
            .iter()
            .map(Label::as_str)
            .collect::<Vec<_>>()
            .join(".");
        if joined.len() > Self::MAX_LEN {
            return Err(NamespaceError::InvalidIdentifier {
                text: text.to_string(),
                reason: format!("registry ids are at most {} characters", Self::MAX_LEN),
            });
        }
        Ok(Self(joined))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RegistryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for RegistryId {
    type Err = NamespaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

/// Identifier of the holder of a registration; who counts as a
/// "disparate user" for admission thresholds.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegistrantId(String);

impl RegistrantId {
    pub fn new(text: &str) -> Result<Self, NamespaceError> {
        if text.is_empty()
            || text
                .bytes()
                .any(|b| b.is_ascii_whitespace() || b.is_ascii_control())
        {
            return Err(NamespaceError::InvalidIdentifier {
                text: text.to_string(),
                reason: "registrant ids are non-empty and free of whitespace".to_string(),
            });
        }
        Ok(Self(text.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RegistrantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One root-zone entry: a TLD string assigned to a registry, with the
/// addresses of the registry's top-level name servers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TldDelegation {
    tld: Label,
    registry_id: RegistryId,
    servers: Vec<Address>,
}

impl TldDelegation {
    pub fn new(
        tld: Label,
        registry_id: RegistryId,
        servers: Vec<Address>,
    ) -> Result<Self, NamespaceError> {
        let mut servers = servers;
        servers.sort_unstable();
        servers.dedup();
        if servers.is_empty() {
            return Err(NamespaceError::EmptyServerList(tld));
        }
        Ok(Self {
            tld,
            registry_id,
            servers,
        })
    }

    pub fn tld(&self) -> &Label {
        &self.tld
    }

    pub fn registry_id(&self) -> &RegistryId {
        &self.registry_id
    }

    pub fn servers(&self) -> &[Address] {
        &self.servers
    }

    /// Same assignment: operated by the same registry with the same
    /// server set. Two roots carrying the same TLD with differing
    /// assignments are in collision.
    pub fn same_assignment(&self, other: &TldDelegation) -> bool {
        self.registry_id == other.registry_id && self.servers == other.servers
    }
}

/// A root administration's delegation table: the list of recognized
/// TLD strings with pointers to their name servers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootZone {
    root_id: RootId,
    delegations: BTreeMap<Label, TldDelegation>,
}

impl RootZone {
    pub fn new(root_id: RootId) -> Self {
        Self {
            root_id,
            delegations: BTreeMap::new(),
        }
    }

    pub fn root_id(&self) -> &RootId {
        &self.root_id
    }

    /// Returns a copy of the zone with `delegation` added; the receiver
    /// is untouched. Assignment within one root is absolute: a second
    /// delegation of the same TLD is refused.
    pub fn add_delegation(&self, delegation: TldDelegation) -> Result<RootZone, NamespaceError> {
        if self.delegations.contains_key(delegation.tld()) {
            return Err(NamespaceError::DuplicateTld(delegation.tld().clone()));
        }
        let mut next = self.clone();
        next.delegations
            .insert(delegation.tld().clone(), delegation);
        Ok(next)
    }

    pub fn delegation(&self, tld: &Label) -> Option<&TldDelegation> {
        self.delegations.get(tld)
    }

    pub fn delegations(&self) -> impl Iterator<Item = &TldDelegation> {
        self.delegations.values()
    }

    pub fn delegation_map(&self) -> &BTreeMap<Label, TldDelegation> {
        &self.delegations
    }

    pub fn contains(&self, tld: &Label) -> bool {
        self.delegations.contains_key(tld)
    }

    /// Exactly the delegated labels.
    pub fn tld_set(&self) -> BTreeSet<Label> {
        self.delegations.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.delegations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delegations.is_empty()
    }
}

/// A TLD operator's zone: second-level names mapped to addresses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistryZone {
    registry_id: RegistryId,
    tld: Label,
    registrations: BTreeMap<Label, Address>,
}

impl RegistryZone {
    pub fn new(registry_id: RegistryId, tld: Label) -> Self {
        Self {
            registry_id,
            tld,
            registrations: BTreeMap::new(),
        }
    }

    pub fn registry_id(&self) -> &RegistryId {
        &self.registry_id
    }

    pub fn tld(&self) -> &Label {
        &self.tld
    }

    pub fn add_registration(
        &mut self,
        second_level: Label,
        address: Address,
    ) -> Result<(), NamespaceError> {
        if self.registrations.contains_key(&second_level) {
            return Err(NamespaceError::DuplicateRegistration(second_level));
        }
        self.registrations.insert(second_level, address);
        Ok(())
    }

    pub fn address_of(&self, second_level: &Label) -> Option<Address> {
        self.registrations.get(second_level).copied()
    }

    pub fn registrations(&self) -> &BTreeMap<Label, Address> {
        &self.registrations
    }

    pub fn registration_count(&self) -> usize {
        self.registrations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registrations.is_empty()
    }
}

/// Closed-world container for all simulated state: every root zone,
/// every registry zone, and the record of which root first assigned
/// each TLD string.
///
/// The origin record is what the compatibility matrix indexes by. A
/// delegation copied between roots (mutual recognition, admission)
/// keeps the origin of the root that first assigned the string; a
/// fresh conflicting assignment originates at the root that made it.
#[derive(Debug, Clone, Default)]
pub struct Universe {
    roots: BTreeMap<RootId, RootZone>,
    registries: BTreeMap<RegistryId, Vec<RegistryZone>>,
    assignment_origin: BTreeMap<(Label, RootId), RootId>,
    registrants: BTreeMap<(RegistryId, Label, Label), RegistrantId>,
}

impl Universe {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_registry_zone(&mut self, zone: RegistryZone) -> Result<(), NamespaceError> {
        let zones = self
            .registries
            .entry(zone.registry_id().clone())
            .or_default();
        if zones.iter().any(|z| z.tld() == zone.tld()) {
            return Err(NamespaceError::DuplicateRegistryZone {
                registry: zone.registry_id().clone(),
                tld: zone.tld().clone(),
            });
        }
        zones.push(zone);
        Ok(())
    }

    /// Add a whole root zone, recording an assignment origin for each
    /// delegation: inherited from a root already carrying the same
    /// assignment, otherwise this root itself.
    pub fn add_root(&mut self, zone: RootZone) -> Result<(), NamespaceError> {
        if self.roots.contains_key(zone.root_id()) {
            return Err(NamespaceError::DuplicateRoot(zone.root_id().clone()));
        }
        for d in zone.delegations() {
            if !self.registries.contains_key(d.registry_id()) {
                return Err(NamespaceError::UnknownRegistry(d.registry_id().clone()));
            }
        }
        for d in zone.delegations() {
            let origin = self
                .inherited_origin(d)
                .unwrap_or_else(|| zone.root_id().clone());
            self.assignment_origin
                .insert((d.tld().clone(), zone.root_id().clone()), origin);
        }
        self.roots.insert(zone.root_id().clone(), zone);
        Ok(())
    }

    /// Add one delegation to an existing root, with the same origin
    /// rule as `add_root`.
    pub fn delegate(
        &mut self,
        root_id: &RootId,
        delegation: TldDelegation,
    ) -> Result<(), NamespaceError> {
        let origin = self
            .inherited_origin(&delegation)
            .unwrap_or_else(|| root_id.clone());
        self.delegate_with_origin(root_id, delegation, origin)
    }

    /// Add one delegation with an explicit assignment origin; the path
    /// taken when a delegation is copied from another root.
    pub fn delegate_with_origin(
        &mut self,
        root_id: &RootId,
        delegation: TldDelegation,
        origin: RootId,
    ) -> Result<(), NamespaceError> {
        if !self.registries.contains_key(delegation.registry_id()) {
            return Err(NamespaceError::UnknownRegistry(
                delegation.registry_id().clone(),
            ));
        }
        let zone = self
            .roots
            .get(root_id)
            .ok_or_else(|| NamespaceError::UnknownRoot(root_id.clone()))?;
        let tld = delegation.tld().clone();
        let next = zone.add_delegation(delegation)?;
        self.roots.insert(root_id.clone(), next);
        self.assignment_origin
            .insert((tld, root_id.clone()), origin);
        Ok(())
    }

    fn inherited_origin(&self, delegation: &TldDelegation) -> Option<RootId> {
        for zone in self.roots.values() {
            if let Some(existing) = zone.delegation(delegation.tld()) {
                if existing.same_assignment(delegation) {
                    return self
                        .assignment_origin
                        .get(&(delegation.tld().clone(), zone.root_id().clone()))
                        .cloned();
                }
            }
        }
        None
    }

    /// Swap in a root zone without touching origin records. Used by
    /// policy code to build hypothetical universes for orphan sweeps.
    pub fn replace_root(&mut self, zone: RootZone) {
        self.roots.insert(zone.root_id().clone(), zone);
    }

    pub fn root(&self, id: &RootId) -> Option<&RootZone> {
        self.roots.get(id)
    }

    pub fn roots(&self) -> impl Iterator<Item = &RootZone> {
        self.roots.values()
    }

    pub fn root_ids(&self) -> impl Iterator<Item = &RootId> {
        self.roots.keys()
    }

    pub fn contains_root(&self, id: &RootId) -> bool {
        self.roots.contains_key(id)
    }

    pub fn root_count(&self) -> usize {
        self.roots.len()
    }

    pub fn has_registry(&self, id: &RegistryId) -> bool {
        self.registries.contains_key(id)
    }

    pub fn registry_zone(&self, registry: &RegistryId, tld: &Label) -> Option<&RegistryZone> {
        self.registries
            .get(registry)
            .and_then(|zones| zones.iter().find(|z| z.tld() == tld))
    }

    pub fn registry_zones(&self) -> impl Iterator<Item = &RegistryZone> {
        self.registries.values().flatten()
    }

    pub fn assignment_origin(&self, tld: &Label, root_id: &RootId) -> Option<&RootId> {
        self.assignment_origin.get(&(tld.clone(), root_id.clone()))
    }

    /// Attach a registrant identity to a registration. Names without
    /// an explicit registrant each count as their own registrant.
    pub fn set_registrant(
        &mut self,
        registry: &RegistryId,
        tld: &Label,
        second_level: &Label,
        registrant: RegistrantId,
    ) -> Result<(), NamespaceError> {
        let known = self
            .registry_zone(registry, tld)
            .map(|z| z.address_of(second_level).is_some())
            .unwrap_or(false);
        if !known {
            return Err(NamespaceError::UnknownRegistration(second_level.clone()));
        }
        self.registrants.insert(
            (registry.clone(), tld.clone(), second_level.clone()),
            registrant,
        );
        Ok(())
    }

    /// How many disparate users hold registrations in the given zone.
    pub fn distinct_registrant_count(&self, registry: &RegistryId, tld: &Label) -> usize {
        let Some(zone) = self.registry_zone(registry, tld) else {
            return 0;
        };
        let mut seen: BTreeSet<(bool, &str)> = BTreeSet::new();
        for name in zone.registrations().keys() {
            match self
                .registrants
                .get(&(registry.clone(), tld.clone(), name.clone()))
            {
                Some(id) => seen.insert((true, id.as_str())),
                None => seen.insert((false, name.as_str())),
            };
        }
        seen.len()
    }

    /// Referential integrity over the whole container: every delegation
    /// names a known registry that operates a zone for that TLD and has
    /// an assignment origin; every registry zone is delegated to its
    /// registry by at least one root.
    pub fn validate(&self) -> Result<(), NamespaceError> {
        for (root_id, zone) in &self.roots {
            for d in zone.delegations() {
                if !self.registries.contains_key(d.registry_id()) {
                    return Err(NamespaceError::UnknownRegistry(d.registry_id().clone()));
                }
                if self.registry_zone(d.registry_id(), d.tld()).is_none() {
                    return Err(NamespaceError::MissingRegistryZone {
                        root: root_id.clone(),
                        tld: d.tld().clone(),
                        registry: d.registry_id().clone(),
                    });
                }
                if !self
                    .assignment_origin
                    .contains_key(&(d.tld().clone(), root_id.clone()))
                {
                    return Err(NamespaceError::MissingOrigin {
                        tld: d.tld().clone(),
                        root: root_id.clone(),
                    });
                }
            }
        }
        for zones in self.registries.values() {
            for zone in zones {
                let delegated = self.roots.values().any(|r| {
                    r.delegation(zone.tld())
                        .map(|d| d.registry_id() == zone.registry_id())
                        .unwrap_or(false)
                });
                if !delegated {
                    return Err(NamespaceError::UndelegatedZone {
                        registry: zone.registry_id().clone(),
                        tld: zone.tld().clone(),
                    });
                }
            }
        }
        Ok(())
    }
}
