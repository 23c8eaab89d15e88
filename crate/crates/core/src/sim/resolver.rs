//! Iterative resolver over the simulated network.

use std::collections::BTreeMap;
use std::fmt;
use std::net::IpAddr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::adversary::{adversary_forge, random_tag, Adversary};
use super::cache::{Cache, TrustRank};
use super::policy::{apply_bailiwick_policy, BailiwickPolicy, SanitizedResponse};
use super::trace::{GlueAction, ResolutionTrace, TraceEvent};
use super::world::Network;
use crate::dnssec::{
    check_referral_security, ns_sets_consistent, verify_dnskey_response, verify_nsec3_denial, verify_rrset,
    BogusReason, KeyAuthority, ReferralSecurity, TrustAnchor, ValidationResult,
};
use crate::message::{DnsMessage, ResponseCode};
use crate::name::DomainName;
use crate::rr::{Dnskey, RData, RecordType, ResourceRecord};

pub const DEFAULT_STEP_BUDGET: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Outcome {
    /// The answer RRset; empty for a no-data response.
    Answer(Vec<ResourceRecord>),
    NxDomain,
    CyclicDependencyFailure,
    ServFail,
    Bogus(BogusReason),
}

impl Outcome {
    fn failure_rank(&self) -> u8 {
        match self {
            Outcome::CyclicDependencyFailure => 3,
            Outcome::Bogus(_) => 2,
            _ => 1,
        }
    }

    pub fn is_answer(&self) -> bool {
        matches!(self, Outcome::Answer(rrs) if !rrs.is_empty())
    }

    pub fn addresses(&self) -> Vec<IpAddr> {
        match self {
            Outcome::Answer(rrs) => rrs.iter().filter_map(|rr| rr.address()).collect(),
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Answer(rrs) if rrs.is_empty() => f.write_str("nodata"),
            Outcome::Answer(rrs) => {
                let parts: Vec<String> = rrs.iter().map(|rr| rr.to_string()).collect();
                write!(f, "answer [{}]", parts.join("; "))
            }
            Outcome::NxDomain => f.write_str("nxdomain"),
            Outcome::CyclicDependencyFailure => f.write_str("cyclic-dependency-failure"),
            Outcome::ServFail => f.write_str("servfail"),
            Outcome::Bogus(r) => write!(f, "bogus ({r})"),
        }
    }
}

/// Most severe failure: cycle, then bogus, then servfail.
fn aggregate(failures: Vec<Outcome>) -> Outcome {
    failures.into_iter().fold(Outcome::ServFail, |acc, o| {
        if o.failure_rank() > acc.failure_rank() {
            o
        } else {
            acc
        }
    })
}

/// What a DNSSEC-aware resolver knows about a zone's keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZoneSecurity {
    Insecure,
    Anchor(Dnskey),
    PendingDs(Vec<ResourceRecord>),
    Secure(Vec<ResourceRecord>),
}

#[derive(Debug, Clone)]
struct PendingDelegation {
    child: DomainName,
    targets: Vec<DomainName>,
    glue: Vec<ResourceRecord>,
    security: ZoneSecurity,
}

enum Step {
    Done(Outcome),
    Advance,
    Fail(Outcome),
}

#[derive(Debug, Clone)]
pub struct ResolverConfig {
    pub policy: BailiwickPolicy,
    pub clock: u32,
    pub seed: u64,
    pub step_budget: usize,
    pub anchor: Option<TrustAnchor>,
}

impl ResolverConfig {
    pub fn new(policy: BailiwickPolicy, clock: u32, seed: u64) -> Self {
        ResolverConfig {
            policy,
            clock,
            seed,
            step_budget: DEFAULT_STEP_BUDGET,
            anchor: None,
        }
    }
}

pub struct Resolver<'n> {
    net: &'n Network,
    config: ResolverConfig,
    cache: Cache,
    mappings: BTreeMap<DomainName, Vec<IpAddr>>,
    security: BTreeMap<DomainName, ZoneSecurity>,
    adversary: Adversary,
    adversary_rng: ChaCha8Rng,
    fired: bool,
    rng: ChaCha8Rng,
    trace: ResolutionTrace,
    steps: usize,
    active: Vec<(DomainName, DomainName)>,
    pending: Vec<PendingDelegation>,
    rank_violations: usize,
}

impl<'n> Resolver<'n> {
    pub fn new(net: &'n Network, config: ResolverConfig) -> Self {
        let mut security = BTreeMap::new();
        if let Some(a) = &config.anchor {
            security.insert(a.zone.clone(), ZoneSecurity::Anchor(a.key.clone()));
        }
        Resolver {
            net,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            adversary_rng: ChaCha8Rng::seed_from_u64(0),
            config,
            cache: Cache::new(),
            mappings: BTreeMap::new(),
            security,
            adversary: Adversary::default(),
            fired: false,
            trace: ResolutionTrace::default(),
            steps: 0,
            active: Vec::new(),
            pending: Vec::new(),
            rank_violations: 0,
        }
    }

    pub fn with_adversary(mut self, adversary: Adversary) -> Self {
        self.adversary_rng = ChaCha8Rng::seed_from_u64(adversary.seed);
        self.adversary = adversary;
        self
    }

    pub fn trace(&self) -> &ResolutionTrace {
        &self.trace
    }

    pub fn trace_mut(&mut self) -> &mut ResolutionTrace {
        &mut self.trace
    }

    pub fn into_trace(self) -> ResolutionTrace {
        self.trace
    }

    pub fn cache(&self) -> &Cache {
        &self.cache
    }

    pub fn mappings(&self) -> &BTreeMap<DomainName, Vec<IpAddr>> {
        &self.mappings
    }

    pub fn policy(&self) -> BailiwickPolicy {
        self.config.policy
    }

    /// Insertions that replaced an unexpired entry of higher rank; always zero.
    pub fn rank_violations(&self) -> usize {
        self.rank_violations
    }

    fn now(&self) -> u64 {
        self.config.clock as u64
    }

    fn note(&mut self, text: String) {
        let step = self.steps;
        self.trace.push(TraceEvent::Note { step, text });
    }

    /// Resolves `qname`/`qtype` from the current cache state.
    pub fn resolve(&mut self, qname: &DomainName, qtype: RecordType) -> Outcome {
        self.steps = 0;
        self.active.clear();
        self.pending.clear();
        self.note(format!("resolve {qname} {qtype}"));
        self.lookup(qname, qtype)
    }

    /// Cached data or mappings that did not come from the genuine zones.
    pub fn tainted_state(&self) -> Vec<String> {
        let mut out = Vec::new();
        for ((owner, rtype), e) in self.cache.entries() {
            if e.rrset.iter().any(|rr| !self.net.is_genuine(rr)) {
                out.push(format!("cache {owner} {rtype}"));
            }
        }
        for (n, addrs) in &self.mappings {
            for a in addrs {
                if !self.net.is_genuine_mapping(n, *a) {
                    out.push(format!("mapping {n} -> {a}"));
                }
            }
        }
        out
    }

    fn lookup(&mut self, qname: &DomainName, qtype: RecordType) -> Outcome {
        let (na, np) = (self.active.len(), self.pending.len());
        let out = self.lookup_frame(qname, qtype);
        self.active.truncate(na);
        self.pending.truncate(np);
        out
    }

    fn lookup_frame(&mut self, qname: &DomainName, qtype: RecordType) -> Outcome {
        if let Some(e) = self.cache.answer(qname, qtype, self.now()) {
            let rrset = e.rrset.clone();
            self.note(format!("cache hit {qname} {qtype}"));
            return Outcome::Answer(rrset);
        }
        loop {
            if self.steps >= self.config.step_budget {
                self.note("step budget exhausted".into());
                return Outcome::ServFail;
            }
            let zone = self.closest_zone(qname);
            let state = (zone.clone(), qname.clone());
            if self.active.contains(&state) {
                let step = self.steps;
                self.trace.push(TraceEvent::Cycle {
                    step,
                    zone,
                    qname: qname.clone(),
                });
                return Outcome::CyclicDependencyFailure;
            }
            self.active.push(state);
            let addrs = match self.server_addresses(&zone) {
                Ok(a) => a,
                Err(o) => return o,
            };
            let mut failures = Vec::new();
            let mut advanced = false;
            'servers: for addr in addrs {
                for _ in 0..2 {
                    if self.steps >= self.config.step_budget {
                        self.note("step budget exhausted".into());
                        return Outcome::ServFail;
                    }
                    match self.exchange(addr, &zone, qname, qtype) {
                        Step::Done(o) => return o,
                        Step::Advance => {
                            advanced = true;
                            break 'servers;
                        }
                        Step::Fail(o) => failures.push(o),
                    }
                }
            }
            if !advanced {
                return aggregate(failures);
            }
        }
    }

    fn closest_zone(&self, qname: &DomainName) -> DomainName {
        let now = self.now();
        let mut best = DomainName::root();
        let mut consider = |n: &DomainName| {
            if qname.is_subdomain_of(n) && n.label_count() > best.label_count() {
                best = n.clone();
            }
        };
        for p in &self.pending {
            consider(&p.child);
        }
        for a in qname.ancestors() {
            if self.cache.get(&a, RecordType::NS, now).is_some() {
                consider(&a);
            }
            if self.config.policy == BailiwickPolicy::MaraDnsLike && self.mappings.contains_key(&a) {
                consider(&a);
            }
        }
        best
    }

    fn known_addresses(&self, target: &DomainName, glue: &[ResourceRecord]) -> Vec<IpAddr> {
        let mut out: Vec<IpAddr> = glue
            .iter()
            .filter(|g| &g.owner == target)
            .filter_map(|g| g.address())
            .collect();
        if let Some(m) = self.mappings.get(target) {
            out.extend(m.iter().copied());
        }
        if let Some(e) = self.cache.get(target, RecordType::A, self.now()) {
            out.extend(e.rrset.iter().filter_map(|rr| rr.address()));
        }
        out
    }

    fn server_addresses(&mut self, zone: &DomainName) -> Result<Vec<IpAddr>, Outcome> {
        if zone.is_root() {
            return Ok(self.net.root_hints().to_vec());
        }
        let mut addrs: Vec<IpAddr> = Vec::new();
        if self.config.policy == BailiwickPolicy::MaraDnsLike {
            if let Some(m) = self.mappings.get(zone) {
                addrs.extend(m.iter().copied());
            }
        }
        let (targets, glue) = if let Some(p) = self.pending.iter().rev().find(|p| &p.child == zone) {
            (p.targets.clone(), p.glue.clone())
        } else if let Some(e) = self.cache.get(zone, RecordType::NS, self.now()) {
            (
                e.rrset.iter().filter_map(|rr| rr.ns_target().cloned()).collect(),
                Vec::new(),
            )
        } else {
            (Vec::new(), Vec::new())
        };
        for t in &targets {
            addrs.extend(self.known_addresses(t, &glue));
        }
        let mut uniq = Vec::new();
        for a in addrs {
            if !uniq.contains(&a) {
                uniq.push(a);
            }
        }
        if !uniq.is_empty() {
            return Ok(uniq);
        }
        let mut failures = Vec::new();
        for t in &targets {
            match self.lookup(t, RecordType::A) {
                o if o.is_answer() => return Ok(o.addresses()),
                o => failures.push(o),
            }
        }
        Err(aggregate(failures))
    }

    /// Sends one query, racing any armed adversary. Returns the accepted
    /// message and whether it was forged.
    fn transmit(
        &mut self,
        addr: IpAddr,
        zone: &DomainName,
        qname: &DomainName,
        qtype: RecordType,
    ) -> (usize, Option<DnsMessage>) {
        self.steps += 1;
        let step = self.steps;
        let tag = random_tag(&mut self.rng, self.adversary.entropy_bits);
        self.trace.push(TraceEvent::Sent {
            step,
            to: addr,
            zone: zone.clone(),
            qname: qname.clone(),
            qtype,
            tag,
        });
        let mut response = self.net.query(addr, qname, qtype);
        let mut forged = false;
        let armed = self.adversary.is_active()
            && !self.fired
            && self
                .adversary
                .trigger
                .as_ref()
                .is_some_and(|t| &t.qname == qname && t.qtype == qtype && &t.spoof_zone == zone);
        if armed {
            self.fired = true;
            let template = self.net.honest_answer(zone, qname, qtype).or_else(|| response.clone());
            if let Some(template) = template {
                let msgs = adversary_forge(&self.adversary, &template, tag, &mut self.adversary_rng);
                let hit = msgs.iter().find(|f| f.tag == tag).cloned();
                self.trace.push(TraceEvent::Injected {
                    step,
                    count: msgs.len(),
                    matched: hit.is_some(),
                });
                if let Some(hit) = hit {
                    response = Some(hit.message);
                    forged = true;
                }
            }
        }
        match &response {
            Some(m) => self.trace.push(TraceEvent::Received {
                step,
                from: addr,
                residing: zone.clone(),
                qname: qname.clone(),
                qtype,
                forged,
                message: hex::encode(m.encode()),
            }),
            None => self.trace.push(TraceEvent::Timeout { step, to: addr }),
        }
        (step, response)
    }

    fn exchange(&mut self, addr: IpAddr, zone: &DomainName, qname: &DomainName, qtype: RecordType) -> Step {
        let (step, response) = self.transmit(addr, zone, qname, qtype);
        let Some(resp) = response else {
            return Step::Fail(Outcome::ServFail);
        };
        if !matches!(resp.rcode, ResponseCode::NoError | ResponseCode::NxDomain) {
            self.note(format!("{addr} answered {} for {zone}", resp.rcode));
            return Step::Fail(Outcome::ServFail);
        }
        let s = match apply_bailiwick_policy(self.config.policy, zone, (qname, qtype), &resp) {
            Ok(s) => s,
            Err(e) => {
                self.trace.push(TraceEvent::Rejected {
                    step,
                    record: "(response)".into(),
                    reason: e.to_string(),
                });
                return Step::Fail(Outcome::ServFail);
            }
        };
        for (rr, reason) in &s.rejected {
            self.trace.push(TraceEvent::Rejected {
                step,
                record: rr.to_string(),
                reason: reason.clone(),
            });
        }
        for (n, t, reason) in &s.follow_up_queries {
            self.trace.push(TraceEvent::FollowUp {
                step,
                qname: n.clone(),
                qtype: *t,
                reason: reason.clone(),
            });
        }
        for (n, a) in &s.synthesized_mappings {
            let tainted = !self.net.is_genuine_mapping(n, *a);
            self.trace.push(TraceEvent::Mapping {
                step,
                name: n.clone(),
                address: *a,
                tainted,
            });
            let list = self.mappings.entry(n.clone()).or_default();
            if !list.contains(a) {
                list.push(*a);
            }
        }

        if let Some(del) = s.delegation.clone() {
            return self.follow_referral(step, addr, zone, &resp, &s, del.child, del.targets);
        }

        let keys = if self.config.policy == BailiwickPolicy::DnssecAware {
            match self.ensure_keys(zone, addr) {
                Ok(k) => k,
                Err(r) => return Step::Fail(Outcome::Bogus(r)),
            }
        } else {
            None
        };
        let rrset: Vec<ResourceRecord> = s.answer.iter().filter(|rr| rr.rtype() == qtype).cloned().collect();
        if let Some(keys) = &keys {
            let signing = zone_signing_keys(keys);
            let result = if !rrset.is_empty() {
                let sigs: Vec<ResourceRecord> = s
                    .answer
                    .iter()
                    .filter(|rr| rr.rtype() == RecordType::RRSIG)
                    .cloned()
                    .collect();
                let k = if qtype == RecordType::DNSKEY && qname == zone {
                    keys.clone()
                } else {
                    signing
                };
                verify_rrset(&rrset, &sigs, &k, self.config.clock)
            } else {
                verify_nsec3_denial(&resp, qname, zone, None, &signing, self.config.clock).result
            };
            self.trace.push(TraceEvent::Validation {
                step,
                zone: zone.clone(),
                subject: format!("{qname} {qtype}"),
                result: result.to_string(),
            });
            if let ValidationResult::Bogus(r) = result {
                return Step::Fail(Outcome::Bogus(r));
            }
        }
        self.insert_cacheable(step, &s.cacheable);
        if !rrset.is_empty() {
            return Step::Done(Outcome::Answer(rrset));
        }
        if resp.rcode == ResponseCode::NxDomain {
            Step::Done(Outcome::NxDomain)
        } else {
            Step::Done(Outcome::Answer(Vec::new()))
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn follow_referral(
        &mut self,
        step: usize,
        addr: IpAddr,
        zone: &DomainName,
        resp: &DnsMessage,
        s: &SanitizedResponse,
        child: DomainName,
        targets: Vec<DomainName>,
    ) -> Step {
        let policy = self.config.policy;
        let mut security = ZoneSecurity::Insecure;
        if policy == BailiwickPolicy::DnssecAware {
            match self.ensure_keys(zone, addr) {
                Err(r) => return Step::Fail(Outcome::Bogus(r)),
                Ok(None) => {}
                Ok(Some(keys)) => {
                    let signing = zone_signing_keys(&keys);
                    let checked = check_referral_security(resp, zone, &child, &signing, self.config.clock);
                    let result = match &checked {
                        Ok(ReferralSecurity::Signed(_)) => "secure delegation".to_string(),
                        Ok(ReferralSecurity::Insecure(p)) => format!("insecure delegation ({p:?})"),
                        Err(r) => format!("bogus ({r})"),
                    };
                    self.trace.push(TraceEvent::Validation {
                        step,
                        zone: zone.clone(),
                        subject: format!("delegation {child}"),
                        result,
                    });
                    security = match checked {
                        Ok(ReferralSecurity::Signed(ds)) => ZoneSecurity::PendingDs(ds),
                        Ok(ReferralSecurity::Insecure(_)) => ZoneSecurity::Insecure,
                        Err(r) => return Step::Fail(Outcome::Bogus(r)),
                    };
                }
            }
        }

        let np = self.pending.len();
        if !policy.verifies_glue() {
            let glue: Vec<ResourceRecord> = s
                .cacheable
                .iter()
                .map(|(rr, _)| rr)
                .filter(|rr| rr.rtype().is_address() && targets.contains(&rr.owner))
                .cloned()
                .collect();
            self.pending.push(PendingDelegation {
                child,
                targets,
                glue,
                security,
            });
            self.insert_cacheable(step, &s.cacheable);
            return Step::Advance;
        }

        self.pending.push(PendingDelegation {
            child: child.clone(),
            targets: targets.clone(),
            glue: s.provisional_glue.clone(),
            security,
        });
        let mut owners: Vec<DomainName> = Vec::new();
        for g in &s.provisional_glue {
            if !owners.contains(&g.owner) {
                owners.push(g.owner.clone());
            }
        }
        let mut failures = Vec::new();
        let mut usable = false;
        for owner in &owners {
            let glue_addrs: Vec<IpAddr> = s
                .provisional_glue
                .iter()
                .filter(|g| &g.owner == owner)
                .filter_map(|g| g.address())
                .collect();
            let detail = glue_addrs.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
            self.trace.push(TraceEvent::Glue {
                step,
                owner: owner.clone(),
                action: GlueAction::Provisional,
                detail,
            });
            let out = self.lookup(owner, RecordType::A);
            let p = &mut self.pending[np];
            let (action, detail) = match &out {
                o if o.is_answer() => {
                    let auth = o.addresses();
                    let action = if glue_addrs.iter().all(|a| auth.contains(a)) {
                        GlueAction::Confirmed
                    } else {
                        GlueAction::Replaced
                    };
                    p.glue.retain(|g| &g.owner != owner);
                    if let Outcome::Answer(rrs) = o {
                        p.glue.extend(rrs.iter().cloned());
                    }
                    usable = true;
                    (action, auth.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(","))
                }
                Outcome::CyclicDependencyFailure => {
                    usable = true;
                    (
                        GlueAction::KeptTemporarily,
                        "authoritative counterpart unreachable without this glue".to_string(),
                    )
                }
                o => {
                    p.glue.retain(|g| &g.owner != owner);
                    failures.push(o.clone());
                    (GlueAction::Rejected, o.to_string())
                }
            };
            let now_step = self.steps;
            self.trace.push(TraceEvent::Glue {
                step: now_step,
                owner: owner.clone(),
                action,
                detail,
            });
        }
        if !owners.is_empty() && !usable {
            self.pending.truncate(np);
            return Step::Fail(aggregate(failures));
        }

        if policy == BailiwickPolicy::DnssecAware && self.pending[np].security != ZoneSecurity::Insecure {
            let out = self.lookup(&child, RecordType::NS);
            let consistent = match &out {
                Outcome::Answer(rrs) => ns_sets_consistent(&targets, rrs),
                _ => false,
            };
            let now_step = self.steps;
            self.trace.push(TraceEvent::Validation {
                step: now_step,
                zone: child.clone(),
                subject: "delegation NS consistency".into(),
                result: if consistent {
                    "consistent".into()
                } else {
                    format!("rejected ({out})")
                },
            });
            if !consistent {
                self.pending.truncate(np);
                return Step::Fail(match out {
                    Outcome::Bogus(r) => Outcome::Bogus(r),
                    Outcome::CyclicDependencyFailure => Outcome::CyclicDependencyFailure,
                    _ => Outcome::Bogus(BogusReason::ChainBreak),
                });
            }
        }

        let ns: Vec<(ResourceRecord, TrustRank)> = s
            .cacheable
            .iter()
            .filter(|(rr, _)| rr.rtype() == RecordType::NS)
            .cloned()
            .collect();
        self.insert_cacheable(step, &ns);
        let sec = self.pending[np].security.clone();
        self.security.insert(child, sec);
        Step::Advance
    }

    fn security_of(&self, zone: &DomainName) -> ZoneSecurity {
        if let Some(p) = self.pending.iter().rev().find(|p| &p.child == zone) {
            return p.security.clone();
        }
        self.security.get(zone).cloned().unwrap_or(ZoneSecurity::Insecure)
    }

    fn set_security(&mut self, zone: &DomainName, sec: ZoneSecurity) {
        if let Some(p) = self.pending.iter_mut().rev().find(|p| &p.child == zone) {
            p.security = sec;
        } else {
            self.security.insert(zone.clone(), sec);
        }
    }

    /// The zone's verified DNSKEY RRset, fetching it from `addr` when only
    /// its DS set or anchor is known. `None` for insecure zones.
    fn ensure_keys(&mut self, zone: &DomainName, addr: IpAddr) -> Result<Option<Vec<ResourceRecord>>, BogusReason> {
        let authority = match self.security_of(zone) {
            ZoneSecurity::Insecure => return Ok(None),
            ZoneSecurity::Secure(keys) => return Ok(Some(keys)),
            ZoneSecurity::Anchor(k) => KeyAuthority::Anchor(k),
            ZoneSecurity::PendingDs(ds) => KeyAuthority::Ds(ds),
        };
        let (step, resp) = self.transmit(addr, zone, zone, RecordType::DNSKEY);
        let verified = match resp {
            None => Err(BogusReason::ChainFetch),
            Some(m) => verify_dnskey_response(zone, &authority, &m, self.config.clock),
        };
        let result = match &verified {
            Ok(_) => "secure".to_string(),
            Err(r) => format!("bogus ({r})"),
        };
        self.trace.push(TraceEvent::Validation {
            step,
            zone: zone.clone(),
            subject: format!("{zone} DNSKEY"),
            result,
        });
        let link = verified?;
        self.set_security(zone, ZoneSecurity::Secure(link.dnskeys.clone()));
        Ok(Some(link.dnskeys))
    }

    fn insert_cacheable(&mut self, step: usize, items: &[(ResourceRecord, TrustRank)]) {
        let mut groups: Vec<((DomainName, RecordType, TrustRank), Vec<ResourceRecord>)> = Vec::new();
        for (rr, rank) in items {
            let key = (rr.owner.clone(), rr.rtype(), *rank);
            match groups.iter_mut().find(|(k, _)| k == &key) {
                Some((_, v)) => {
                    if !v.contains(rr) {
                        v.push(rr.clone())
                    }
                }
                None => groups.push((key, vec![rr.clone()])),
            }
        }
        let now = self.now();
        for ((owner, rtype, rank), rrset) in groups {
            let before = self.cache.get(&owner, rtype, now).map(|e| e.rank);
            let tainted = rrset.iter().any(|rr| !self.net.is_genuine(rr));
            let stored = self.cache.insert(rrset, rank, now);
            if stored && before.is_some_and(|b| b > rank) {
                self.rank_violations += 1;
            }
            self.trace.push(TraceEvent::CacheInsert {
                step,
                owner,
                rtype,
                rank,
                stored,
                tainted,
            });
        }
    }
}

fn zone_signing_keys(keys: &[ResourceRecord]) -> Vec<ResourceRecord> {
    let zsks: Vec<ResourceRecord> = keys
        .iter()
        .filter(|k| matches!(&k.rdata, RData::DNSKEY(d) if !d.is_ksk()))
        .cloned()
        .collect();
    if zsks.is_empty() {
        keys.to_vec()
    } else {
        zsks
    }
}
