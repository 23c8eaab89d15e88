//! The simulated network: a completed zone corpus served by honest and
//! rogue authoritative servers at fixed addresses.

use std::collections::{BTreeMap, BTreeSet};
use std::net::{IpAddr, Ipv4Addr};

use serde::{Deserialize, Serialize};

use crate::authority::answer;
use crate::message::{DnsMessage, Flags, Question, ResponseCode};
use crate::name::DomainName;
use crate::rr::{RData, RecordType, ResourceRecord, Soa};
use crate::zone::{Corpus, RecordClass, Zone};

pub const ROOT_SERVER_NAME: &str = "a.root-servers.net";
pub const ROOT_SERVER_ADDR: Ipv4Addr = Ipv4Addr::new(198, 41, 0, 4);
const SYNTH_TTL: u32 = 3600;

/// Addresses of server names: authoritative data first, then glue, then
/// synthetic addresses from 198.18.0.0/15 handed out in canonical order.
#[derive(Debug, Clone, Default)]
pub struct AddressBook {
    addrs: BTreeMap<DomainName, Vec<IpAddr>>,
    next_synthetic: u32,
}

impl AddressBook {
    pub fn from_corpus(corpus: &Corpus) -> Self {
        let mut book = AddressBook::default();
        for class in [RecordClass::Authoritative, RecordClass::Glue] {
            let mut found: BTreeMap<DomainName, Vec<IpAddr>> = BTreeMap::new();
            for z in corpus.zones() {
                for rr in z.records().iter().filter(|rr| z.classify(rr) == class) {
                    if let Some(a) = rr.address() {
                        let list = found.entry(rr.owner.clone()).or_default();
                        if !list.contains(&a) {
                            list.push(a);
                        }
                    }
                }
            }
            for (n, a) in found {
                book.addrs.entry(n).or_insert(a);
            }
        }
        let mut targets = BTreeSet::new();
        for z in corpus.zones() {
            targets.extend(z.records().iter().filter_map(|rr| rr.ns_target().cloned()));
        }
        for t in targets {
            book.ensure(&t);
        }
        book
    }

    pub fn get(&self, name: &DomainName) -> &[IpAddr] {
        self.addrs.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Addresses of `name`, allocating a synthetic one if none is known.
    pub fn ensure(&mut self, name: &DomainName) -> Vec<IpAddr> {
        if let Some(a) = self.addrs.get(name) {
            return a.clone();
        }
        let i = self.next_synthetic;
        self.next_synthetic += 1;
        let addr = IpAddr::V4(Ipv4Addr::new(
            198,
            18 + (i / 65_024) as u8,
            ((i / 254) % 256) as u8,
            (i % 254 + 1) as u8,
        ));
        self.addrs.insert(name.clone(), vec![addr]);
        vec![addr]
    }

    pub fn set(&mut self, name: DomainName, addrs: Vec<IpAddr>) {
        self.addrs.insert(name, addrs);
    }
}

fn address_record(owner: &DomainName, addr: IpAddr) -> ResourceRecord {
    let rdata = match addr {
        IpAddr::V4(a) => RData::A(a),
        IpAddr::V6(a) => RData::AAAA(a),
    };
    ResourceRecord::new(owner.clone(), SYNTH_TTL, rdata)
}

fn ns_record(owner: &DomainName, target: &DomainName) -> ResourceRecord {
    ResourceRecord::new(owner.clone(), SYNTH_TTL, RData::NS(target.clone()))
}

fn deepest_zone<'a>(zones: &'a BTreeMap<DomainName, Zone>, name: &DomainName) -> Option<&'a Zone> {
    name.ancestors().find_map(|a| zones.get(&a))
}

fn add_records(zones: &mut BTreeMap<DomainName, Zone>, apex: &DomainName, extra: Vec<ResourceRecord>) {
    let zone = zones.get(apex).expect("zone exists");
    let mut records = zone.records().to_vec();
    for rr in extra {
        if !records.iter().any(|r| r.same_data(&rr)) {
            records.push(rr);
        }
    }
    let rebuilt = zone.with_records(records).expect("added records lie in zone");
    zones.insert(apex.clone(), rebuilt);
}

fn all_targets(zones: &BTreeMap<DomainName, Zone>) -> BTreeSet<DomainName> {
    zones
        .values()
        .flat_map(|z| z.records().iter().filter_map(|rr| rr.ns_target().cloned()))
        .collect()
}

/// Fills in what a corpus leaves implicit so that every name can be
/// resolved from a root: zones for delegated children and for NS targets
/// outside the corpus, apex NS and SOA records, server addresses, and a
/// root zone delegating to the top zones.
pub fn complete_corpus(served: &Corpus, book: &mut AddressBook) -> Corpus {
    let mut zones: BTreeMap<DomainName, Zone> = served.zones().map(|z| (z.apex().clone(), z.clone())).collect();
    let mut synthesized: BTreeSet<DomainName> = BTreeSet::new();

    let mut children = Vec::new();
    for z in zones.values() {
        for d in z.delegations() {
            if !zones.contains_key(&d.child) {
                let ns: Vec<ResourceRecord> = z.rrset(&d.child, RecordType::NS).into_iter().cloned().collect();
                children.push((d.child, ns));
            }
        }
    }
    for (child, ns) in children {
        if !zones.contains_key(&child) {
            zones.insert(child.clone(), Zone::new(child.clone(), ns).expect("NS owned by apex"));
            synthesized.insert(child);
        }
    }

    for t in all_targets(&zones) {
        let enclosed = t.ancestors().any(|a| zones.contains_key(&a));
        if let (false, Some(parent)) = (enclosed, t.parent()) {
            if !parent.is_root() && !zones.contains_key(&parent) {
                zones.insert(parent.clone(), Zone::empty(parent.clone()));
                synthesized.insert(parent);
            }
        }
    }

    let root = DomainName::root();
    if !zones.contains_key(&root) {
        let ns = ns_record(&root, &crate::name::name(ROOT_SERVER_NAME));
        zones.insert(root.clone(), Zone::new(root.clone(), vec![ns]).expect("root NS"));
        synthesized.insert(root.clone());
        let host = crate::name::name(ROOT_SERVER_NAME);
        if book.get(&host).is_empty() {
            book.set(host, vec![IpAddr::V4(ROOT_SERVER_ADDR)]);
        }
    }

    let apexes: Vec<DomainName> = zones.keys().cloned().collect();
    for apex in &apexes {
        if !zones[apex].rrset(apex, RecordType::NS).is_empty() {
            continue;
        }
        let from_parent: Vec<DomainName> = zones
            .values()
            .find(|z| z.cuts().contains(apex))
            .map(|z| z.ns_targets(apex))
            .unwrap_or_default();
        let targets = if from_parent.is_empty() {
            synthesized.insert(apex.clone());
            vec![apex.prepend(b"ns1").expect("short apex")]
        } else {
            from_parent
        };
        let ns = targets.iter().map(|t| ns_record(apex, t)).collect();
        add_records(&mut zones, apex, ns);
    }

    // Synthesized parents delegate to every zone directly below them.
    for apex in &apexes {
        let Some(parent) = apex.parent() else {
            continue;
        };
        let Some(pz) = deepest_zone(&zones, &parent) else {
            continue;
        };
        let papex = pz.apex().clone();
        if !synthesized.contains(&papex) || pz.cuts().contains(apex) || pz.cut_covering(apex).is_some() {
            continue;
        }
        let targets = zones[apex].ns_targets(apex);
        let mut extra: Vec<ResourceRecord> = targets.iter().map(|t| ns_record(apex, t)).collect();
        for t in targets.iter().filter(|t| t.is_subdomain_of(&papex)) {
            extra.extend(book.ensure(t).into_iter().map(|a| address_record(t, a)));
        }
        add_records(&mut zones, &papex, extra);
    }

    // Synthesized zones answer authoritatively for server names inside them.
    for t in all_targets(&zones) {
        let Some(z) = deepest_zone(&zones, &t) else {
            continue;
        };
        let apex = z.apex().clone();
        if synthesized.contains(&apex) && z.cut_covering(&t).is_none() && z.addresses(&t).is_empty() {
            let extra = book.ensure(&t).into_iter().map(|a| address_record(&t, a)).collect();
            add_records(&mut zones, &apex, extra);
        }
    }

    for apex in &apexes {
        if zones[apex].soa().is_some() {
            continue;
        }
        let mname = zones[apex]
            .ns_targets(apex)
            .into_iter()
            .next()
            .unwrap_or_else(|| apex.clone());
        let rname = apex.prepend(b"hostmaster").unwrap_or_else(|_| apex.clone());
        let soa = Soa {
            mname,
            rname,
            serial: 1,
            refresh: 3600,
            retry: 300,
            expire: 3_600_000,
            minimum: 3600,
        };
        let mut records = vec![ResourceRecord::new(apex.clone(), SYNTH_TTL, RData::SOA(soa))];
        records.extend(zones[apex].records().iter().cloned());
        let rebuilt = zones[apex].with_records(records).expect("SOA at apex");
        zones.insert(apex.clone(), rebuilt);
    }

    Corpus::new(zones.into_values()).expect("distinct apexes")
}

/// Behaviour of a server an attacker controls.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RogueMode {
    /// Answers from its own (possibly fabricated) zones.
    #[default]
    Serve,
    /// Relays what the genuine servers would answer.
    Mirror,
    Unresponsive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RogueServer {
    pub address: IpAddr,
    /// Fabricated zones.
    pub zones: Vec<Zone>,
    /// Genuine zones from the corpus this server also serves.
    pub legit: Vec<DomainName>,
    pub inject_authority: Vec<ResourceRecord>,
    pub inject_additional: Vec<ResourceRecord>,
    pub mode: RogueMode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ServerRole {
    Honest,
    Rogue {
        mode: RogueMode,
        inject_authority: Vec<ResourceRecord>,
        inject_additional: Vec<ResourceRecord>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Server {
    pub address: IpAddr,
    pub zones: BTreeMap<DomainName, Zone>,
    pub role: ServerRole,
}

fn answer_from(zones: &BTreeMap<DomainName, Zone>, qname: &DomainName, qtype: RecordType) -> DnsMessage {
    match deepest_zone(zones, qname) {
        Some(z) => answer(z, qname, qtype),
        None => DnsMessage {
            flags: Flags {
                response: true,
                ..Flags::default()
            },
            rcode: ResponseCode::Refused,
            question: Some(Question::new(qname.clone(), qtype)),
            ..Default::default()
        },
    }
}

/// Servers keyed by address, plus the genuine data used to judge taint.
#[derive(Debug, Clone)]
pub struct Network {
    servers: BTreeMap<IpAddr, Server>,
    root_hints: Vec<IpAddr>,
    honest: Corpus,
    honest_zones: BTreeMap<DomainName, Zone>,
    truth: BTreeSet<ResourceRecord>,
    zone_addresses: BTreeMap<DomainName, BTreeSet<IpAddr>>,
    book: AddressBook,
}

fn normalized(rr: &ResourceRecord) -> ResourceRecord {
    ResourceRecord { ttl: 0, ..rr.clone() }
}

impl Network {
    /// `corpus` must be complete (see [`complete_corpus`]); `book` the
    /// address book used to complete it.
    pub fn new(corpus: Corpus, book: AddressBook, rogues: Vec<RogueServer>) -> Network {
        let mut servers: BTreeMap<IpAddr, Server> = BTreeMap::new();
        let mut zone_addresses: BTreeMap<DomainName, BTreeSet<IpAddr>> = BTreeMap::new();
        for z in corpus.zones() {
            let mut names: BTreeSet<DomainName> = z.ns_targets(z.apex()).into_iter().collect();
            if let Some(parent) = corpus.delegating_zone(z.apex()) {
                names.extend(parent.ns_targets(z.apex()));
            }
            for n in names {
                for &addr in book.get(&n) {
                    zone_addresses.entry(z.apex().clone()).or_default().insert(addr);
                    servers
                        .entry(addr)
                        .or_insert_with(|| Server {
                            address: addr,
                            zones: BTreeMap::new(),
                            role: ServerRole::Honest,
                        })
                        .zones
                        .insert(z.apex().clone(), z.clone());
                }
            }
        }
        for r in rogues {
            let mut zones: BTreeMap<DomainName, Zone> = BTreeMap::new();
            for apex in &r.legit {
                if let Some(z) = corpus.get(apex) {
                    zones.insert(apex.clone(), z.clone());
                    zone_addresses.entry(apex.clone()).or_default().insert(r.address);
                }
            }
            for z in r.zones {
                zones.insert(z.apex().clone(), z);
            }
            let role = ServerRole::Rogue {
                mode: r.mode,
                inject_authority: r.inject_authority,
                inject_additional: r.inject_additional,
            };
            servers.insert(
                r.address,
                Server {
                    address: r.address,
                    zones,
                    role,
                },
            );
        }
        let rogue_addrs: BTreeSet<IpAddr> = servers
            .values()
            .filter(|s| s.role != ServerRole::Honest)
            .map(|s| s.address)
            .collect();
        for (apex, set) in zone_addresses.iter_mut() {
            let legit_here = |a: &IpAddr| {
                servers
                    .get(a)
                    .is_some_and(|s| s.role == ServerRole::Honest || s.zones.get(apex) == corpus.get(apex))
            };
            set.retain(|a| !rogue_addrs.contains(a) || legit_here(a));
        }
        let root = DomainName::root();
        let root_hints = corpus
            .get(&root)
            .map(|z| z.ns_targets(&root).iter().flat_map(|t| book.get(t).to_vec()).collect())
            .unwrap_or_default();
        let truth = corpus
            .zones()
            .flat_map(|z| z.records().iter().map(normalized))
            .collect();
        let honest_zones = corpus.zones().map(|z| (z.apex().clone(), z.clone())).collect();
        Network {
            servers,
            root_hints,
            honest: corpus,
            honest_zones,
            truth,
            zone_addresses,
            book,
        }
    }

    pub fn root_hints(&self) -> &[IpAddr] {
        &self.root_hints
    }

    pub fn honest_corpus(&self) -> &Corpus {
        &self.honest
    }

    pub fn server(&self, addr: &IpAddr) -> Option<&Server> {
        self.servers.get(addr)
    }

    pub fn servers(&self) -> impl Iterator<Item = &Server> {
        self.servers.values()
    }

    /// What the server at `addr` replies; `None` when nothing answers.
    pub fn query(&self, addr: IpAddr, qname: &DomainName, qtype: RecordType) -> Option<DnsMessage> {
        let server = self.servers.get(&addr)?;
        match &server.role {
            ServerRole::Honest => Some(answer_from(&server.zones, qname, qtype)),
            ServerRole::Rogue {
                mode: RogueMode::Unresponsive,
                ..
            } => None,
            ServerRole::Rogue {
                mode: RogueMode::Mirror,
                ..
            } => Some(answer_from(&self.honest_zones, qname, qtype)),
            ServerRole::Rogue {
                mode: RogueMode::Serve,
                inject_authority,
                inject_additional,
            } => {
                let mut m = answer_from(&server.zones, qname, qtype);
                for rr in inject_authority {
                    if !m.authority.contains(rr) {
                        m.authority.push(rr.clone());
                    }
                }
                for rr in inject_additional {
                    if !m.additional.contains(rr) {
                        m.additional.push(rr.clone());
                    }
                }
                Some(m)
            }
        }
    }

    /// What a genuine server for `zone` would reply.
    pub fn honest_answer(&self, zone: &DomainName, qname: &DomainName, qtype: RecordType) -> Option<DnsMessage> {
        self.honest_zones.get(zone).map(|z| answer(z, qname, qtype))
    }

    /// The record (TTL aside) is part of the genuine data.
    pub fn is_genuine(&self, rr: &ResourceRecord) -> bool {
        self.truth.contains(&normalized(rr))
    }

    /// Addresses that genuinely serve `zone`.
    pub fn zone_addresses(&self, zone: &DomainName) -> Vec<IpAddr> {
        self.zone_addresses
            .get(zone)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default()
    }

    /// `addr` is a genuine address of host `name` or of a server for the
    /// zone holding `name`.
    pub fn is_genuine_mapping(&self, name: &DomainName, addr: IpAddr) -> bool {
        if self.book.get(name).contains(&addr) {
            return true;
        }
        match name.ancestors().find(|a| self.honest_zones.contains_key(a)) {
            Some(apex) => self.zone_addresses.get(&apex).is_some_and(|s| s.contains(&addr)),
            None => false,
        }
    }
}
