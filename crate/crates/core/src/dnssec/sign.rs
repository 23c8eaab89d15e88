//! Zone signing: DNSKEY, DS for signed children, RRSIGs and the NSEC3 chain.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::keys::KeyPair;
use super::nsec3::{nsec3_hash, Nsec3Error, Nsec3Params, Nsec3Record};
use super::scheme::{scheme_for, UnknownScheme};
use super::verify::{make_ds, rrset_signed_data, rrsig_label_count};
use crate::name::DomainName;
use crate::rr::{Dnskey, RData, RecordType, ResourceRecord, Rrsig};
use crate::zone::{Corpus, RecordClass, Zone, ZoneError};

pub const DEFAULT_SIG_LIFETIME: u32 = 30 * 86_400;
/// 2005-10-21T00:00:00Z.
pub const DEFAULT_CLOCK: u32 = 1_129_852_800;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignError {
    #[error("zone {0} has no SOA record")]
    MissingSoa(DomainName),
    #[error("KSK and ZSK share key tag {0}")]
    DuplicateKeyTag(u16),
    #[error("{0} is not a delegation of the zone")]
    UnknownChild(DomainName),
    #[error(transparent)]
    Scheme(#[from] UnknownScheme),
    #[error(transparent)]
    Nsec3(#[from] Nsec3Error),
    #[error(transparent)]
    Zone(#[from] ZoneError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigningOptions {
    pub nsec3: Nsec3Params,
    pub opt_out: bool,
    pub inception: u32,
    pub lifetime: u32,
}

impl Default for SigningOptions {
    fn default() -> Self {
        SigningOptions {
            nsec3: Nsec3Params::default(),
            opt_out: true,
            inception: DEFAULT_CLOCK,
            lifetime: DEFAULT_SIG_LIFETIME,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedZone {
    /// Input zone with any earlier DNSSEC material removed.
    pub base: Zone,
    /// Everything served: base records, DNSKEY, DS, NSEC3PARAM, NSEC3 and RRSIGs.
    pub zone: Zone,
    pub dnskeys: Vec<ResourceRecord>,
    pub ds_in_parent: Vec<ResourceRecord>,
    pub nsec3_params: Nsec3Params,
    pub opt_out: bool,
    /// Sorted by owner hash.
    pub nsec3_chain: Vec<Nsec3Record>,
}

impl SignedZone {
    pub fn apex(&self) -> &DomainName {
        self.base.apex()
    }

    pub fn ksk(&self) -> Option<&ResourceRecord> {
        self.dnskeys
            .iter()
            .find(|k| matches!(&k.rdata, RData::DNSKEY(d) if d.is_ksk()))
    }

    /// Recovers the signing view of a zone that already carries DNSKEY,
    /// NSEC3PARAM and NSEC3 records. `None` when the zone is unsigned.
    pub fn from_zone(zone: &Zone) -> Option<SignedZone> {
        let apex = zone.apex().clone();
        let dnskeys: Vec<ResourceRecord> = zone.rrset(&apex, RecordType::DNSKEY).into_iter().cloned().collect();
        if dnskeys.is_empty() {
            return None;
        }
        let nsec3_params = zone
            .rrset(&apex, RecordType::NSEC3PARAM)
            .into_iter()
            .find_map(|rr| match &rr.rdata {
                RData::NSEC3PARAM(p) => Some(Nsec3Params {
                    algorithm: p.hash_algorithm,
                    iterations: p.iterations,
                    salt: p.salt.clone(),
                }),
                _ => None,
            })?;
        let mut nsec3_chain: Vec<Nsec3Record> = zone
            .records()
            .iter()
            .filter_map(|rr| Nsec3Record::from_rr(rr, &apex))
            .collect();
        nsec3_chain.sort_by(|a, b| a.owner_hash.cmp(&b.owner_hash));
        let base = zone
            .with_records(
                zone.records()
                    .iter()
                    .filter(|rr| !is_dnssec_type(rr.rtype()))
                    .cloned()
                    .collect(),
            )
            .ok()?;
        let ds_in_parent = zone
            .records()
            .iter()
            .filter(|rr| rr.rtype() == RecordType::DS)
            .cloned()
            .collect();
        Some(SignedZone {
            base,
            zone: zone.clone(),
            dnskeys,
            ds_in_parent,
            nsec3_params,
            opt_out: nsec3_chain.iter().any(|r| r.opt_out),
            nsec3_chain,
        })
    }

    /// DNSKEY records without the secure entry point flag.
    pub fn zone_signing_keys(&self) -> Vec<ResourceRecord> {
        self.dnskeys
            .iter()
            .filter(|k| matches!(&k.rdata, RData::DNSKEY(d) if !d.is_ksk()))
            .cloned()
            .collect()
    }

    /// DS record for this zone's KSK, to be placed in the parent.
    pub fn ds_for_parent(&self) -> Option<ResourceRecord> {
        let ksk = self.ksk()?;
        let RData::DNSKEY(key) = &ksk.rdata else {
            return None;
        };
        Some(ResourceRecord::new(
            self.apex().clone(),
            ksk.ttl,
            RData::DS(make_ds(self.apex(), key)),
        ))
    }
}

fn is_dnssec_type(t: RecordType) -> bool {
    matches!(
        t,
        RecordType::DNSKEY | RecordType::RRSIG | RecordType::NSEC3 | RecordType::NSEC3PARAM | RecordType::DS
    )
}

/// Signs the zones of `corpus` named in `signed`, deepest first, with keys
/// derived from `key_seed`, linking each to its signed children by DS.
/// Returns the corpus with signed zones substituted.
pub fn sign_corpus(
    corpus: &Corpus,
    signed: &BTreeSet<DomainName>,
    key_seed: u64,
    opts: &SigningOptions,
) -> Result<(Corpus, BTreeMap<DomainName, SignedZone>), SignError> {
    let per_zone = signed.iter().map(|z| (z.clone(), opts.clone())).collect();
    sign_corpus_with(corpus, &per_zone, key_seed)
}

/// Like [`sign_corpus`] with options chosen per zone.
pub fn sign_corpus_with(
    corpus: &Corpus,
    signed: &BTreeMap<DomainName, SigningOptions>,
    key_seed: u64,
) -> Result<(Corpus, BTreeMap<DomainName, SignedZone>), SignError> {
    let mut order: Vec<&DomainName> = signed.keys().collect();
    order.sort_by(|a, b| b.label_count().cmp(&a.label_count()).then(a.cmp(b)));
    let mut out = corpus.clone();
    let mut done: BTreeMap<DomainName, SignedZone> = BTreeMap::new();
    for apex in order {
        let zone = corpus.get(apex).ok_or_else(|| SignError::UnknownChild(apex.clone()))?;
        let ksk = KeyPair::derive(apex, super::keys::KeyRole::Ksk, key_seed);
        let zsk = KeyPair::derive(apex, super::keys::KeyRole::Zsk, key_seed);
        let children: BTreeMap<DomainName, Dnskey> = done
            .iter()
            .filter(|(child, _)| zone.cuts().contains(*child))
            .map(|(child, sz)| {
                let RData::DNSKEY(k) = &sz.ksk().expect("signed zones carry a KSK").rdata else {
                    unreachable!()
                };
                (child.clone(), k.clone())
            })
            .collect();
        let sz = sign_zone(zone, &ksk, &zsk, &children, &signed[apex])?;
        out.insert(sz.zone.clone());
        done.insert(apex.clone(), sz);
    }
    Ok((out, done))
}

/// Signs `zone`. `signed_children` maps each signed child apex to its KSK.
pub fn sign_zone(
    zone: &Zone,
    ksk: &KeyPair,
    zsk: &KeyPair,
    signed_children: &BTreeMap<DomainName, Dnskey>,
    opts: &SigningOptions,
) -> Result<SignedZone, SignError> {
    let apex = zone.apex().clone();
    let soa = zone.soa().ok_or_else(|| SignError::MissingSoa(apex.clone()))?;
    let RData::SOA(soa_data) = &soa.rdata else {
        unreachable!("soa() returns SOA records")
    };
    let negative_ttl = soa_data.minimum.min(soa.ttl);
    let key_ttl = soa.ttl;
    if ksk.key_tag == zsk.key_tag {
        return Err(SignError::DuplicateKeyTag(ksk.key_tag));
    }
    scheme_for(ksk.algorithm)?;
    scheme_for(zsk.algorithm)?;

    let base = zone.with_records(
        zone.records()
            .iter()
            .filter(|rr| !is_dnssec_type(rr.rtype()))
            .cloned()
            .collect(),
    )?;

    let mut records: Vec<ResourceRecord> = base.records().to_vec();
    let dnskeys = vec![ksk.dnskey_record(&apex, key_ttl), zsk.dnskey_record(&apex, key_ttl)];
    records.extend(dnskeys.iter().cloned());
    records.push(ResourceRecord::new(
        apex.clone(),
        0,
        RData::NSEC3PARAM(opts.nsec3.to_rdata()),
    ));
    let mut ds_in_parent = Vec::new();
    for (child, key) in signed_children {
        if !base.cuts().contains(child) {
            return Err(SignError::UnknownChild(child.clone()));
        }
        let ds = ResourceRecord::new(child.clone(), key_ttl, RData::DS(make_ds(child, key)));
        ds_in_parent.push(ds.clone());
        records.push(ds);
    }
    let unsigned_chain = Zone::new(apex.clone(), records.clone())?;

    // Types present at each name that gets an NSEC3 record.
    let mut types_at: BTreeMap<DomainName, BTreeSet<RecordType>> = BTreeMap::new();
    for rr in unsigned_chain.records() {
        let class = unsigned_chain.classify(rr);
        if class == RecordClass::Glue || !rr.owner.is_subdomain_of(&apex) {
            continue;
        }
        let entry = types_at.entry(rr.owner.clone()).or_default();
        entry.insert(rr.rtype());
        if class == RecordClass::Authoritative {
            entry.insert(RecordType::RRSIG);
        }
    }
    let mut chain: Vec<Nsec3Record> = Vec::new();
    for (owner, types) in &types_at {
        let unsigned_delegation = base.cuts().contains(owner) && !types.contains(&RecordType::DS);
        if unsigned_delegation && opts.opt_out {
            continue;
        }
        chain.push(Nsec3Record {
            owner_hash: nsec3_hash(owner, &opts.nsec3)?.to_vec(),
            next_hash: Vec::new(),
            opt_out: opts.opt_out,
            types: types.iter().copied().collect(),
            params: opts.nsec3.clone(),
        });
    }
    chain.sort_by(|a, b| a.owner_hash.cmp(&b.owner_hash));
    chain.dedup_by(|a, b| a.owner_hash == b.owner_hash);
    let n = chain.len();
    for i in 0..n {
        chain[i].next_hash = chain[(i + 1) % n].owner_hash.clone();
    }
    records.extend(chain.iter().map(|r| r.to_rr(&apex, negative_ttl)));

    let with_chain = Zone::new(apex.clone(), records.clone())?;
    let mut rrsets: BTreeMap<(DomainName, RecordType), Vec<ResourceRecord>> = BTreeMap::new();
    for rr in with_chain.records() {
        if with_chain.classify(rr) == RecordClass::Authoritative && rr.owner.is_subdomain_of(&apex) {
            rrsets
                .entry((rr.owner.clone(), rr.rtype()))
                .or_default()
                .push(rr.clone());
        }
    }
    for ((owner, rtype), rrset) in &rrsets {
        let key = if *rtype == RecordType::DNSKEY { ksk } else { zsk };
        records.push(sign_rrset(owner, rrset, key, &apex, opts.inception, opts.lifetime)?);
    }
    records.sort();

    Ok(SignedZone {
        base,
        zone: Zone::new(apex, records)?,
        dnskeys,
        ds_in_parent,
        nsec3_params: opts.nsec3.clone(),
        opt_out: opts.opt_out,
        nsec3_chain: chain,
    })
}

/// Produces an RRSIG for one RRset with the validity window `[inception, inception + lifetime]`.
pub fn sign_rrset(
    owner: &DomainName,
    rrset: &[ResourceRecord],
    key: &KeyPair,
    signer: &DomainName,
    inception: u32,
    lifetime: u32,
) -> Result<ResourceRecord, UnknownScheme> {
    let first = &rrset[0];
    let mut sig = Rrsig {
        type_covered: first.rtype(),
        algorithm: key.algorithm,
        labels: rrsig_label_count(owner),
        original_ttl: first.ttl,
        expiration: inception.saturating_add(lifetime),
        inception,
        key_tag: key.key_tag,
        signer: signer.clone(),
        signature: Vec::new(),
    };
    let data = rrset_signed_data(&sig, rrset);
    sig.signature = scheme_for(key.algorithm)?.sign(&data, &key.secret);
    Ok(ResourceRecord::new(owner.clone(), first.ttl, RData::RRSIG(sig)))
}
