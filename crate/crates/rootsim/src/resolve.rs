//! Deterministic iterative name resolution: a resolver bound to one
//! trusted root walks root -> TLD delegation -> registry zone and
//! returns an outcome. There is no cache and no retry logic; the walk
//! is a pure function of its arguments.

use thiserror::Error;

use crate::namespace::{Address, DomainName, RootId, Universe};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolveError {
    /// The resolver is configured against a root the universe does not
    /// contain; a configuration error, distinct from a name failing to
    /// resolve.
    #[error("resolver trusts unknown root {0}")]
    UnknownRoot(RootId),
    #[error("{0} is not assigned under the given origin root")]
    NotAssigned(DomainName),
}

/// Which root a resolver trusts as its starting point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolverConfig {
    pub resolver_id: String,
    pub trusted_root: RootId,
}

impl ResolverConfig {
    pub fn new(resolver_id: impl Into<String>, trusted_root: RootId) -> Self {
        Self {
            resolver_id: resolver_id.into(),
            trusted_root,
        }
    }
}

/// What a query returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ResolutionOutcome {
    Resolved(Address),
    /// No such TLD in the trusted root, or no such registration under
    /// the TLD's zone.
    NameError,
    /// The delegation exists but its registry zone is missing from the
    /// universe. Kept separate from `NameError` so fixture defects are
    /// not mistaken for namespace incompatibility.
    BrokenDelegation,
}

impl std::fmt::Display for ResolutionOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Resolved(address) => write!(f, "{address}"),
            Self::NameError => f.write_str("NameError"),
            Self::BrokenDelegation => f.write_str("BrokenDelegation"),
        }
    }
}

/// Resolve `name` through the resolver's trusted root. Names deeper
/// than two labels resolve by their top two; querying the bare root
/// name or a bare TLD yields `NameError`.
pub fn resolve(
    name: &DomainName,
    config: &ResolverConfig,
    universe: &Universe,
) -> Result<ResolutionOutcome, ResolveError> {
    let zone = universe
        .root(&config.trusted_root)
        .ok_or_else(|| ResolveError::UnknownRoot(config.trusted_root.clone()))?;
    let Some(tld) = name.tld() else {
        return Ok(ResolutionOutcome::NameError);
    };
    let Some(delegation) = zone.delegation(tld) else {
        return Ok(ResolutionOutcome::NameError);
    };
    let Some(registry) = universe.registry_zone(delegation.registry_id(), tld) else {
        return Ok(ResolutionOutcome::BrokenDelegation);
    };
    let Some(second) = name.second_level() else {
        return Ok(ResolutionOutcome::NameError);
    };
    Ok(match registry.address_of(second) {
        Some(address) => ResolutionOutcome::Resolved(address),
        None => ResolutionOutcome::NameError,
    })
}

/// The address the assigning root's own delegation chain yields: the
/// ground truth a compatibility check compares observed resolution
/// against.
pub fn intended_address(
    name: &DomainName,
    origin_root: &RootId,
    universe: &Universe,
) -> Result<Address, ResolveError> {
    let not_assigned = || ResolveError::NotAssigned(name.clone());
    let zone = universe.root(origin_root).ok_or_else(not_assigned)?;
    let tld = name.tld().ok_or_else(not_assigned)?;
    let delegation = zone.delegation(tld).ok_or_else(not_assigned)?;
    let registry = universe
        .registry_zone(delegation.registry_id(), tld)
        .ok_or_else(not_assigned)?;
    let second = name.second_level().ok_or_else(not_assigned)?;
    registry.address_of(second).ok_or_else(not_assigned)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::namespace::{Address, Label, RegistryId, RegistryZone, RootZone, TldDelegation};
    use crate::rng::SplitMix64;

    fn label(s: &str) -> Label {
        Label::new(s).unwrap()
    }

    fn rid(s: &str) -> RootId {
        RootId::new(s).unwrap()
    }

    fn reg(s: &str) -> RegistryId {
        RegistryId::new(s).unwrap()
    }

    fn delegation(tld: &str, registry: &str, addr: u32) -> TldDelegation {
        TldDelegation::new(label(tld), reg(registry), vec![Address::new(addr)]).unwrap()
    }

    /// root-i carries com only; root-c carries com plus new.
    fn superset_universe() -> Universe {
        let mut u = Universe::new();
        let mut com = RegistryZone::new(reg("nsi.test"), label("com"));
        com.add_registration(label("example"), Address::new(10))
            .unwrap();
        u.add_registry_zone(com).unwrap();
        let mut new = RegistryZone::new(reg("newnet.test"), label("new"));
        new.add_registration(label("shop"), Address::new(20))
            .unwrap();
        u.add_registry_zone(new).unwrap();

        u.add_root(
            RootZone::new(rid("root-i"))
                .add_delegation(delegation("com", "nsi.test", 1))
                .unwrap(),
        )
        .unwrap();
        u.add_root(
            RootZone::new(rid("root-c"))
                .add_delegation(delegation("com", "nsi.test", 1))
                .unwrap()
                .add_delegation(delegation("new", "newnet.test", 2))
                .unwrap(),
        )
        .unwrap();
        u
    }

    #[test]
    fn alternate_tld_fails_on_the_incumbent_root() {
        let u = superset_universe();
        let name = DomainName::parse("shop.new.").unwrap();
        let on_i = ResolverConfig::new("r1", rid("root-i"));
        assert_eq!(
            resolve(&name, &on_i, &u).unwrap(),
            ResolutionOutcome::NameError
        );
    }

    #[test]
    fn alternate_tld_resolves_on_its_own_root() {
        let u = superset_universe();
        let name = DomainName::parse("shop.new.").unwrap();
        let on_c = ResolverConfig::new("r2", rid("root-c"));
        let intended = intended_address(&name, &rid("root-c"), &u).unwrap();
        assert_eq!(
            resolve(&name, &on_c, &u).unwrap(),
            ResolutionOutcome::Resolved(intended)
        );
        assert_eq!(intended, Address::new(20));
    }

    #[test]
    fn unknown_root_is_a_config_error() {
        let u = superset_universe();
        let name = DomainName::parse("example.com.").unwrap();
        let bad = ResolverConfig::new("r3", rid("root-x"));
        assert!(matches!(
            resolve(&name, &bad, &u),
            Err(ResolveError::UnknownRoot(_))
        ));
    }

    #[test]
    fn bare_tld_and_root_name_yield_name_error() {
        let u = superset_universe();
        let on_i = ResolverConfig::new("r", rid("root-i"));
        let bare = DomainName::parse("com.").unwrap();
        assert_eq!(
            resolve(&bare, &on_i, &u).unwrap(),
            ResolutionOutcome::NameError
        );
        let root = DomainName::root();
        assert_eq!(
            resolve(&root, &on_i, &u).unwrap(),
            ResolutionOutcome::NameError
        );
    }

    #[test]
    fn deep_names_resolve_by_their_top_two_labels() {
        let u = superset_universe();
        let on_c = ResolverConfig::new("r", rid("root-c"));
        let deep = DomainName::parse("a.b.shop.new.").unwrap();
        assert_eq!(
            resolve(&deep, &on_c, &u).unwrap(),
            ResolutionOutcome::Resolved(Address::new(20))
        );
    }

    #[test]
    fn missing_registry_zone_is_broken_delegation() {
        let mut u = superset_universe();
        // nsi.test is known, but operates no zone for net
        u.delegate(&rid("root-i"), delegation("net", "nsi.test", 3))
            .unwrap();
        let on_i = ResolverConfig::new("r", rid("root-i"));
        let name = DomainName::parse("x.net.").unwrap();
        assert_eq!(
            resolve(&name, &on_i, &u).unwrap(),
            ResolutionOutcome::BrokenDelegation
        );
    }

    #[test]
    fn colliding_tld_resolves_to_different_addresses_per_origin() {
        let mut u = Universe::new();
        let mut za = RegistryZone::new(reg("neustar.test"), label("hola"));
        za.add_registration(label("mail"), Address::new(111))
            .unwrap();
        u.add_registry_zone(za).unwrap();
        let mut zb = RegistryZone::new(reg("newnet.test"), label("hola"));
        zb.add_registration(label("mail"), Address::new(222))
            .unwrap();
        u.add_registry_zone(zb).unwrap();
        u.add_root(
            RootZone::new(rid("root-i"))
                .add_delegation(delegation("hola", "neustar.test", 1))
                .unwrap(),
        )
        .unwrap();
        u.add_root(
            RootZone::new(rid("root-c"))
                .add_delegation(delegation("hola", "newnet.test", 2))
                .unwrap(),
        )
        .unwrap();

        let name = DomainName::parse("mail.hola.").unwrap();
        let via_i = intended_address(&name, &rid("root-i"), &u).unwrap();
        let via_c = intended_address(&name, &rid("root-c"), &u).unwrap();
        assert_ne!(via_i, via_c);
    }

    #[test]
    fn intended_address_not_assigned() {
        let u = superset_universe();
        let name = DomainName::parse("shop.new.").unwrap();
        assert!(matches!(
            intended_address(&name, &rid("root-i"), &u),
            Err(ResolveError::NotAssigned(_))
        ));
    }

    /// Exhaustive sweep: every registration resolves, on the root that
    /// assigned it, to its intended address.
    #[test]
    fn self_consistency_over_random_universes() {
        let mut rng = SplitMix64::new(2024);
        for trial in 0..25 {
            let u = random_universe(&mut rng, trial);
            u.validate().unwrap();
            for zone in u.roots() {
                let config = ResolverConfig::new("sweep", zone.root_id().clone());
                for d in zone.delegations() {
                    let registry = u.registry_zone(d.registry_id(), d.tld()).unwrap();
                    for (second, address) in registry.registrations() {
                        let name =
                            DomainName::from_labels(vec![second.clone(), d.tld().clone()]).unwrap();
                        let origin = u.assignment_origin(d.tld(), zone.root_id()).unwrap();
                        assert_eq!(
                            resolve(&name, &config, &u).unwrap(),
                            ResolutionOutcome::Resolved(*address)
                        );
                        assert_eq!(intended_address(&name, origin, &u).unwrap(), *address);
                    }
                }
            }
        }
    }

    fn random_universe(rng: &mut SplitMix64, salt: u64) -> Universe {
        let mut u = Universe::new();
        let tld_count = 1 + rng.next_range(6) as usize;
        let mut first = RootZone::new(rid("root-a"));
        let mut second = RootZone::new(rid("root-b"));
        for t in 0..tld_count {
            let tld = format!("tld{salt}x{t}");
            let registry = format!("op{t}.test");
            let mut zone = RegistryZone::new(reg(&registry), label(&tld));
            for n in 0..rng.next_range(5) {
                zone.add_registration(label(&format!("n{n}")), Address::new(rng.next_u64() as u32))
                    .unwrap();
            }
            u.add_registry_zone(zone).unwrap();
            let d = delegation(&tld, &registry, t as u32 + 1);
            first = first.add_delegation(d.clone()).unwrap();
            if rng.next_range(2) == 0 {
                second = second.add_delegation(d).unwrap();
            }
        }
        u.add_root(first).unwrap();
        if !second.is_empty() {
            u.add_root(second).unwrap();
        }
        u
    }
}
