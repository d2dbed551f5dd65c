//! Parse and serialize root zones and registry zones in a small
//! deterministic master-file-style text format.
//!
//! The format is line-oriented ASCII with LF terminators. A `;` starts
//! a comment running to end of line; blank lines are ignored. Each
//! record is `<owner> <TYPE> <rdata>` where the owner is a fully
//! qualified name with a trailing dot and TYPE is `NS` or `A`. `NS`
//! rdata names a server; `A` rdata is a dotted-quad address. There are
//! no TTL or class fields (class is implicitly IN) and no multi-line
//! records.
//!
//! Zone identity rides on comment lines that the serializer always
//! emits and the parser recognizes when they stand alone:
//!
//! * `; zone <origin>` names the zone: the root id for a root zone,
//!   the TLD for a registry zone.
//! * `; registry <id>` names the operator of a registry zone.
//!
//! A root zone's registry operators are instead derived from server
//! names: the first NS server of a delegation, minus its leading
//! label, identifies the registry, so `ns1.nsi.test.` implies the
//! registry `nsi.test`. The serializer synthesizes one server name per
//! address, `ns-<a>-<b>-<c>-<d>.<registry>.`, which keeps glue names
//! collision-free and makes `parse(serialize(zone)) == zone` hold.
//!
//! Serialization is deterministic: delegations are emitted as blocks
//! in TLD order (NS records first, then their glue), registrations in
//! owner order, and identical inputs always yield identical bytes.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::namespace::{Address, DomainName, Label, RegistryId, RegistryZone, RootId, RootZone};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZoneError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: tld {tld} already delegated")]
    DuplicateTld { line: usize, tld: Label },
    #[error("line {line}: no glue address for name server {server}")]
    MissingGlue { line: usize, server: DomainName },
    #[error("line {line}: duplicate registration for {owner}")]
    DuplicateRegistration { line: usize, owner: DomainName },
}

fn syntax(line: usize, message: impl Into<String>) -> ZoneError {
    ZoneError::Syntax {
        line,
        message: message.into(),
    }
}

/// Line-level view of a zone file: origin header plus records in
/// serialization order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZoneDocument {
    pub origin_id: String,
    pub registry_id: Option<String>,
    pub records: Vec<ZoneRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZoneRecord {
    Ns {
        owner: DomainName,
        server: DomainName,
    },
    A {
        owner: DomainName,
        address: Address,
    },
}

impl ZoneDocument {
    pub fn for_root_zone(zone: &RootZone) -> Self {
        let mut records = Vec::new();
        for d in zone.delegations() {
            let owner = DomainName::from_labels(vec![d.tld().clone()])
                .expect("single label fits the length bound");
            // server names encode their own address, so a registry
            // operating several TLDs with differing server sets never
            // produces one glue name with two address sets
            let server_names: Vec<DomainName> = d
                .servers()
                .iter()
                .map(|address| {
                    let [a, b, c, e] = address.octets();
                    DomainName::parse(&format!("ns-{a}-{b}-{c}-{e}.{}.", d.registry_id()))
                        .expect("synthesized server name is valid")
                })
                .collect();
            for server in &server_names {
                records.push(ZoneRecord::Ns {
                    owner: owner.clone(),
                    server: server.clone(),
                });
            }
            for (server, address) in server_names.iter().zip(d.servers()) {
                records.push(ZoneRecord::A {
                    owner: server.clone(),
                    address: *address,
                });
            }
        }
        Self {
            origin_id: zone.root_id().to_string(),
            registry_id: None,
            records,
        }
    }

    pub fn for_registry_zone(zone: &RegistryZone) -> Self {
        let records = zone
            .registrations()
            .iter()
            .map(|(second, address)| ZoneRecord::A {
                owner: DomainName::from_labels(vec![second.clone(), zone.tld().clone()])
                    .expect("two labels fit the length bound"),
                address: *address,
            })
            .collect();
        Self {
            origin_id: zone.tld().to_string(),
            registry_id: Some(zone.registry_id().to_string()),
            records,
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!("; zone {}\n", self.origin_id);
        if let Some(registry) = &self.registry_id {
            out.push_str(&format!("; registry {registry}\n"));
        }
        for record in &self.records {
            match record {
                ZoneRecord::Ns { owner, server } => {
                    out.push_str(&format!("{owner} NS {server}\n"));
                }
                ZoneRecord::A { owner, address } => {
                    out.push_str(&format!("{owner} A {address}\n"));
                }
            }
        }
        out
    }
}

struct RawRecord {
    line: usize,
    owner: DomainName,
    data: RawData,
}

enum RawData {
    Ns(DomainName),
    A(Address),
}

struct Headers {
    zone: Option<(String, usize)>,
    registry: Option<(String, usize)>,
}

fn scan(text: &str) -> Result<(Headers, Vec<RawRecord>), ZoneError> {
    let mut headers = Headers {
        zone: None,
        registry: None,
    };
    let mut records = Vec::new();
    for (idx, raw_line) in text.split('\n').enumerate() {
        let line = idx + 1;
        if !raw_line.is_ascii() {
            return Err(syntax(line, "zone files are ASCII"));
        }
        if raw_line.contains('\r') {
            return Err(syntax(
                line,
                "carriage return found; LF line endings required",
            ));
        }
        let (body, comment) = match raw_line.find(';') {
            Some(pos) => (&raw_line[..pos], Some(&raw_line[pos + 1..])),
            None => (raw_line, None),
        };
        if body.trim().is_empty() {
            // full-line comments may carry the identity headers
            if let Some(comment) = comment {
                let mut words = comment.split_whitespace();
                match words.next() {
                    Some("zone") => {
                        if let Some(id) = words.next() {
                            headers.zone.get_or_insert((id.to_string(), line));
                        }
                    }
                    Some("registry") => {
                        if let Some(id) = words.next() {
                            headers.registry.get_or_insert((id.to_string(), line));
                        }
                    }
                    _ => {}
                }
            }
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(syntax(line, "expected <owner> <TYPE> <rdata>"));
        }
        if !fields[0].ends_with('.') {
            return Err(syntax(line, "owner must be fully qualified (trailing dot)"));
        }
        let owner = DomainName::parse(fields[0]).map_err(|e| syntax(line, e.to_string()))?;
        if owner.is_root() {
            return Err(syntax(line, "owner must not be the root name"));
        }
        let data = match fields[1] {
            "NS" => {
                if !fields[2].ends_with('.') {
                    return Err(syntax(
                        line,
                        "NS rdata must be a fully qualified server name",
                    ));
                }
                let server =
                    DomainName::parse(fields[2]).map_err(|e| syntax(line, e.to_string()))?;
                if server.is_root() {
                    return Err(syntax(line, "NS rdata must not be the root name"));
                }
                RawData::Ns(server)
            }
            "A" => RawData::A(
                fields[2]
                    .parse::<Address>()
                    .map_err(|e| syntax(line, e.to_string()))?,
            ),
            other => return Err(syntax(line, format!("unknown record type {other:?}"))),
        };
        records.push(RawRecord { line, owner, data });
    }
    Ok((headers, records))
}

/// Parse a root zone: one delegation per NS group, with glue addresses
/// attached to the matching delegation.
pub fn parse_root_zone(text: &str) -> Result<RootZone, ZoneError> {
    let (headers, records) = scan(text)?;
    if let Some((_, line)) = headers.registry {
        return Err(syntax(line, "registry header in a root zone file"));
    }
    let root_id = match headers.zone {
        Some((id, line)) => RootId::new(&id).map_err(|e| syntax(line, e.to_string()))?,
        None => RootId::new("root").expect("literal id"),
    };

    struct Group {
        tld: Label,
        servers: Vec<(DomainName, usize)>,
    }
    let mut groups: Vec<Group> = Vec::new();
    let mut group_of: BTreeMap<Label, usize> = BTreeMap::new();
    let mut open: Option<Label> = None;
    let mut glue: BTreeMap<DomainName, (Vec<Address>, bool)> = BTreeMap::new();

    for record in &records {
        match &record.data {
            RawData::Ns(server) => {
                if record.owner.label_count() != 1 {
                    return Err(syntax(
                        record.line,
                        "root zone NS owner must be a top-level name",
                    ));
                }
                let tld = record.owner.tld().expect("one label").clone();
                match group_of.get(&tld) {
                    Some(&idx) if open.as_ref() == Some(&tld) => {
                        let group = &mut groups[idx];
                        if group.servers.iter().any(|(s, _)| s == server) {
                            return Err(ZoneError::DuplicateTld {
                                line: record.line,
                                tld,
                            });
                        }
                        group.servers.push((server.clone(), record.line));
                    }
                    Some(_) => {
                        // NS groups must be contiguous; reopening one is a
                        // second delegation of the same string
                        return Err(ZoneError::DuplicateTld {
                            line: record.line,
                            tld,
                        });
                    }
                    None => {
                        group_of.insert(tld.clone(), groups.len());
                        open = Some(tld.clone());
                        groups.push(Group {
                            tld,
                            servers: vec![(server.clone(), record.line)],
                        });
                    }
                }
            }
            RawData::A(address) => {
                glue.entry(record.owner.clone())
                    .or_insert_with(|| (Vec::new(), false))
                    .0
                    .push(*address);
            }
        }
    }

    let mut zone = RootZone::new(root_id);
    for group in &groups {
        let mut addresses = Vec::new();
        for (server, ns_line) in &group.servers {
            match glue.get_mut(server) {
                Some((addrs, used)) => {
                    *used = true;
                    addresses.extend_from_slice(addrs);
                }
                None => {
                    return Err(ZoneError::MissingGlue {
                        line: *ns_line,
                        server: server.clone(),
                    })
                }
            }
        }
        let (first_server, first_line) = &group.servers[0];
        if first_server.label_count() < 2 {
            return Err(syntax(
                *first_line,
                format!("cannot derive a registry from single-label server name {first_server}"),
            ));
        }
        let registry_text = first_server.labels()[1..]
            .iter()
            .map(Label::as_str)
            .collect::<Vec<_>>()
            .join(".");
        let registry =
            RegistryId::new(&registry_text).map_err(|e| syntax(*first_line, e.to_string()))?;
        let delegation =
            crate::namespace::TldDelegation::new(group.tld.clone(), registry, addresses)
                .map_err(|e| syntax(*first_line, e.to_string()))?;
        zone = zone
            .add_delegation(delegation)
            .map_err(|e| syntax(*first_line, e.to_string()))?;
    }

    // an A record matching no NS server is a stray, not glue
    if let Some((owner, _)) = glue.iter().find(|(_, (_, used))| !used) {
        let line = records
            .iter()
            .find(|r| matches!(r.data, RawData::A(_)) && r.owner == *owner)
            .map(|r| r.line)
            .unwrap_or(1);
        return Err(syntax(
            line,
            format!("glue record {owner} does not match any NS server"),
        ));
    }

    Ok(zone)
}

/// Serialize a root zone; the output always re-parses to an equal zone
/// and is byte-identical across runs.
pub fn serialize_root_zone(zone: &RootZone) -> String {
    ZoneDocument::for_root_zone(zone).render()
}

/// Parse a registry zone: A records only, owners one level below a
/// single TLD.
pub fn parse_registry_zone(text: &str) -> Result<RegistryZone, ZoneError> {
    let (headers, records) = scan(text)?;
    let registry = match &headers.registry {
        Some((id, line)) => RegistryId::new(id).map_err(|e| syntax(*line, e.to_string()))?,
        None => RegistryId::new("registry").expect("literal id"),
    };
    let mut zone_tld = match &headers.zone {
        Some((text, line)) => Some(Label::new(text).map_err(|e| syntax(*line, e.to_string()))?),
        None => None,
    };

    let mut entries: Vec<(usize, Label, Address, DomainName)> = Vec::new();
    for record in &records {
        let address = match &record.data {
            RawData::A(address) => *address,
            RawData::Ns(_) => {
                return Err(syntax(
                    record.line,
                    "NS records are not allowed in a registry zone",
                ))
            }
        };
        if record.owner.label_count() != 2 {
            return Err(syntax(
                record.line,
                "registry zone owner must be <name>.<tld>.",
            ));
        }
        let tld = record.owner.tld().expect("two labels").clone();
        match &zone_tld {
            Some(expected) if *expected != tld => {
                return Err(syntax(
                    record.line,
                    format!("owner {} is outside zone {expected}", record.owner),
                ));
            }
            Some(_) => {}
            None => zone_tld = Some(tld.clone()),
        }
        let second = record.owner.second_level().expect("two labels").clone();
        entries.push((record.line, second, address, record.owner.clone()));
    }

    let tld = zone_tld.ok_or_else(|| {
        syntax(
            1,
            "cannot determine the zone tld: no records and no `; zone` header",
        )
    })?;
    let mut zone = RegistryZone::new(registry, tld);
    for (line, second, address, owner) in entries {
        zone.add_registration(second, address)
            .map_err(|_| ZoneError::DuplicateRegistration { line, owner })?;
    }
    Ok(zone)
}

/// Serialize a registry zone; deterministic, owner-sorted.
pub fn serialize_registry_zone(zone: &RegistryZone) -> String {
    ZoneDocument::for_registry_zone(zone).render()
}

/// What kind of zone a file holds. A `; registry` header or an A-only
/// body marks a registry zone; anything with NS records (or nothing at
/// all) is read as a root zone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZoneKind {
    Root,
    Registry,
}

pub fn sniff_zone_kind(text: &str) -> ZoneKind {
    let mut saw_a = false;
    for raw_line in text.split('\n') {
        let (body, comment) = match raw_line.find(';') {
            Some(pos) => (&raw_line[..pos], Some(&raw_line[pos + 1..])),
            None => (raw_line, None),
        };
        if body.trim().is_empty() {
            if let Some(comment) = comment {
                if comment.split_whitespace().next() == Some("registry") {
                    return ZoneKind::Registry;
                }
            }
            continue;
        }
        let mut fields = body.split_whitespace();
        let _owner = fields.next();
        match fields.next() {
            Some("NS") => return ZoneKind::Root,
            Some("A") => saw_a = true,
            _ => {}
        }
    }
    if saw_a {
        ZoneKind::Registry
    } else {
        ZoneKind::Root
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::namespace::TldDelegation;

    fn label(s: &str) -> Label {
        Label::new(s).unwrap()
    }

    #[test]
    fn parses_ns_with_glue() {
        let text = "biz. NS ns1.neulevel.test.\nns1.neulevel.test. A 192.0.2.1\n";
        let zone = parse_root_zone(text).unwrap();
        assert_eq!(zone.len(), 1);
        let d = zone.delegation(&label("biz")).unwrap();
        assert_eq!(d.registry_id().as_str(), "neulevel.test");
        assert_eq!(d.servers(), &[Address::from_octets(192, 0, 2, 1)]);
    }

    #[test]
    fn parses_empty_text_to_empty_zone() {
        let zone = parse_root_zone("").unwrap();
        assert!(zone.is_empty());
        assert_eq!(zone.root_id().as_str(), "root");
    }

    #[test]
    fn reads_zone_header() {
        let zone = parse_root_zone("; zone root-i\n").unwrap();
        assert_eq!(zone.root_id().as_str(), "root-i");
    }

    #[test]
    fn shared_servers_are_allowed_across_delegations() {
        let text = "\
com. NS ns1.nsi.test.\n\
net. NS ns1.nsi.test.\n\
ns1.nsi.test. A 192.0.2.4\n";
        let zone = parse_root_zone(text).unwrap();
        assert_eq!(zone.len(), 2);
        assert_eq!(
            zone.delegation(&label("com")).unwrap().servers(),
            zone.delegation(&label("net")).unwrap().servers()
        );
    }

    #[test]
    fn inline_comments_are_stripped() {
        let text = "biz. NS ns1.neulevel.test. ; awarded 2000\nns1.neulevel.test. A 192.0.2.1\n";
        assert_eq!(parse_root_zone(text).unwrap().len(), 1);
    }

    #[test]
    fn reports_first_offending_line() {
        let text = "com. NS ns1.nsi.test.\nns1.nsi.test. A 192.0.2.4\nbroken line here extra\n";
        match parse_root_zone(text).unwrap_err() {
            ZoneError::Syntax { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_syntax_problems() {
        for (text, what) in [
            ("com. NS\n", "two fields"),
            ("com. MX ns1.nsi.test.\n", "unknown type"),
            ("com. ns ns1.nsi.test.\n", "lowercase type"),
            ("com NS ns1.nsi.test.\n", "owner without dot"),
            ("com. NS ns1.nsi.test\n", "rdata without dot"),
            ("ns1.nsi.test. A 192.0.2.256\n", "bad address"),
            (". NS ns1.nsi.test.\n", "root owner"),
            ("shop.com. NS ns1.nsi.test.\n", "deep NS owner"),
            ("com. NS x.\nx. A 1.2.3.4\n", "single-label server"),
        ] {
            assert!(
                matches!(parse_root_zone(text), Err(ZoneError::Syntax { .. })),
                "{what} should be a syntax error"
            );
        }
    }

    #[test]
    fn rejects_carriage_returns() {
        assert!(matches!(
            parse_root_zone("com. NS ns1.nsi.test.\r\nns1.nsi.test. A 192.0.2.4\n"),
            Err(ZoneError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn rejects_reopened_ns_group() {
        let text = "\
biz. NS ns1.a.test.\n\
com. NS ns1.b.test.\n\
biz. NS ns2.a.test.\n\
ns1.a.test. A 1.2.3.4\nns1.b.test. A 1.2.3.5\nns2.a.test. A 1.2.3.6\n";
        match parse_root_zone(text).unwrap_err() {
            ZoneError::DuplicateTld { line, tld } => {
                assert_eq!(line, 3);
                assert_eq!(tld.as_str(), "biz");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_repeated_ns_record() {
        let text = "biz. NS ns1.a.test.\nbiz. NS ns1.a.test.\nns1.a.test. A 1.2.3.4\n";
        assert!(matches!(
            parse_root_zone(text),
            Err(ZoneError::DuplicateTld { line: 2, .. })
        ));
    }

    #[test]
    fn rejects_missing_glue() {
        match parse_root_zone("biz. NS ns1.neulevel.test.\n").unwrap_err() {
            ZoneError::MissingGlue { line, server } => {
                assert_eq!(line, 1);
                assert_eq!(server.to_string(), "ns1.neulevel.test.");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_stray_glue() {
        let err = parse_root_zone("ns1.nowhere.test. A 192.0.2.9\n").unwrap_err();
        assert!(matches!(err, ZoneError::Syntax { line: 1, .. }));
    }

    #[test]
    fn rejects_registry_header_in_root_zone() {
        assert!(matches!(
            parse_root_zone("; registry nsi.test\n"),
            Err(ZoneError::Syntax { .. })
        ));
    }

    #[test]
    fn serializes_empty_zone_as_header_only() {
        let zone = RootZone::new(RootId::new("root-i").unwrap());
        assert_eq!(serialize_root_zone(&zone), "; zone root-i\n");
    }

    #[test]
    fn serializes_blocks_in_tld_order() {
        let zone = RootZone::new(RootId::new("root-i").unwrap())
            .add_delegation(
                TldDelegation::new(
                    label("com"),
                    RegistryId::new("nsi.test").unwrap(),
                    vec![Address::from_octets(192, 0, 2, 4)],
                )
                .unwrap(),
            )
            .unwrap()
            .add_delegation(
                TldDelegation::new(
                    label("biz"),
                    RegistryId::new("neulevel.test").unwrap(),
                    vec![Address::from_octets(192, 0, 2, 1)],
                )
                .unwrap(),
            )
            .unwrap();
        let text = serialize_root_zone(&zone);
        assert_eq!(
            text,
            "; zone root-i\n\
             biz. NS ns-192-0-2-1.neulevel.test.\n\
             ns-192-0-2-1.neulevel.test. A 192.0.2.1\n\
             com. NS ns-192-0-2-4.nsi.test.\n\
             ns-192-0-2-4.nsi.test. A 192.0.2.4\n"
        );
        let biz = text.find("biz.").unwrap();
        let com = text.find("com.").unwrap();
        assert!(biz < com);
    }

    #[test]
    fn root_zone_round_trips() {
        let mut zone = RootZone::new(RootId::new("root-c").unwrap());
        for (tld, reg, addrs) in [
            ("com", "nsi.test", vec![1u32, 2]),
            ("hola", "newnet.test", vec![77]),
            ("kids", "newnet.test", vec![77, 78, 79]),
        ] {
            zone = zone
                .add_delegation(
                    TldDelegation::new(
                        label(tld),
                        RegistryId::new(reg).unwrap(),
                        addrs.into_iter().map(Address::new).collect(),
                    )
                    .unwrap(),
                )
                .unwrap();
        }
        let text = serialize_root_zone(&zone);
        let reparsed = parse_root_zone(&text).unwrap();
        assert_eq!(reparsed, zone);
        assert_eq!(serialize_root_zone(&reparsed), text);
    }

    /// Two TLDs run by one registry with different server sets must not
    /// share glue names on the way out.
    #[test]
    fn same_registry_different_servers_round_trips() {
        let zone = RootZone::new(RootId::new("root-x").unwrap())
            .add_delegation(
                TldDelegation::new(
                    label("a"),
                    RegistryId::new("b.n").unwrap(),
                    vec![Address::new(0)],
                )
                .unwrap(),
            )
            .unwrap()
            .add_delegation(
                TldDelegation::new(
                    label("aa"),
                    RegistryId::new("b.n").unwrap(),
                    vec![Address::new(1)],
                )
                .unwrap(),
            )
            .unwrap();
        let text = serialize_root_zone(&zone);
        assert_eq!(parse_root_zone(&text).unwrap(), zone);
    }

    #[test]
    fn maximal_registry_ids_still_round_trip() {
        // 199 characters: twenty 9-char labels joined by dots
        let long_id = ["abcdefghi"; 20].join(".");
        assert_eq!(long_id.len(), RegistryId::MAX_LEN - 1);
        let zone = RootZone::new(RootId::new("root-x").unwrap())
            .add_delegation(
                TldDelegation::new(
                    label("biz"),
                    RegistryId::new(&long_id).unwrap(),
                    vec![Address::new(1), Address::new(2)],
                )
                .unwrap(),
            )
            .unwrap();
        let text = serialize_root_zone(&zone);
        assert_eq!(parse_root_zone(&text).unwrap(), zone);
    }

    #[test]
    fn parses_registration_line() {
        let zone = parse_registry_zone("shop.new. A 192.0.2.7\n").unwrap();
        assert_eq!(zone.tld().as_str(), "new");
        assert_eq!(zone.registry_id().as_str(), "registry");
        assert_eq!(
            zone.address_of(&label("shop")),
            Some(Address::from_octets(192, 0, 2, 7))
        );
    }

    #[test]
    fn registry_headers_override_defaults() {
        let text = "; zone new\n; registry newnet.test\nshop.new. A 192.0.2.7\n";
        let zone = parse_registry_zone(text).unwrap();
        assert_eq!(zone.registry_id().as_str(), "newnet.test");
        assert_eq!(zone.tld().as_str(), "new");
    }

    #[test]
    fn rejects_duplicate_owner() {
        let text = "shop.new. A 192.0.2.7\nshop.new. A 192.0.2.8\n";
        match parse_registry_zone(text).unwrap_err() {
            ZoneError::DuplicateRegistration { line, owner } => {
                assert_eq!(line, 2);
                assert_eq!(owner.to_string(), "shop.new.");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_foreign_and_deep_owners() {
        assert!(matches!(
            parse_registry_zone("shop.new. A 192.0.2.7\nshop.hola. A 192.0.2.8\n"),
            Err(ZoneError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_registry_zone("a.shop.new. A 192.0.2.7\n"),
            Err(ZoneError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_registry_zone("; zone hola\nshop.new. A 192.0.2.7\n"),
            Err(ZoneError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn rejects_ns_in_registry_zone() {
        assert!(matches!(
            parse_registry_zone("new. NS ns1.newnet.test.\n"),
            Err(ZoneError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn empty_registry_zone_needs_a_header() {
        assert!(parse_registry_zone("").is_err());
        let zone = parse_registry_zone("; zone hola\n; registry newnet.test\n").unwrap();
        assert!(zone.is_empty());
        assert_eq!(zone.tld().as_str(), "hola");
    }

    #[test]
    fn hundred_generated_registrations_parse_back() {
        let mut text = String::from("; zone web\n; registry iod.test\n");
        for i in 0..100 {
            text.push_str(&format!("name{i}.web. A 10.0.{}.{}\n", i / 250, i % 250));
        }
        let zone = parse_registry_zone(&text).unwrap();
        assert_eq!(zone.registration_count(), 100);
    }

    #[test]
    fn registry_zone_round_trips() {
        let mut zone = RegistryZone::new(RegistryId::new("gallegos.test").unwrap(), label("biz"));
        zone.add_registration(label("shop"), Address::new(500))
            .unwrap();
        zone.add_registration(label("acme"), Address::new(501))
            .unwrap();
        let text = serialize_registry_zone(&zone);
        let reparsed = parse_registry_zone(&text).unwrap();
        assert_eq!(reparsed, zone);
        assert_eq!(serialize_registry_zone(&reparsed), text);
    }

    #[test]
    fn sniffs_zone_kinds() {
        assert_eq!(
            sniff_zone_kind("; zone root-i\ncom. NS ns1.nsi.test.\n"),
            ZoneKind::Root
        );
        assert_eq!(sniff_zone_kind("; registry nsi.test\n"), ZoneKind::Registry);
        assert_eq!(
            sniff_zone_kind("shop.new. A 192.0.2.7\n"),
            ZoneKind::Registry
        );
        assert_eq!(sniff_zone_kind("; zone root-i\n"), ZoneKind::Root);
        assert_eq!(sniff_zone_kind(""), ZoneKind::Root);
    }
}
