//! Off-path (Kaminsky) and on-path (MitM) response forgers.

use std::net::IpAddr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::message::DnsMessage;
use crate::name::DomainName;
use crate::rr::{RData, RecordType, ResourceRecord};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdversaryKind {
    #[default]
    None,
    OffPathKaminsky,
    OnPathMitm,
}

/// The query the adversary races: a question sent to a server of `spoof_zone`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trigger {
    pub qname: DomainName,
    pub qtype: RecordType,
    pub spoof_zone: DomainName,
}

/// Forged referral content.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Payload {
    #[serde(default)]
    pub ns_target: Option<DomainName>,
    pub glue_owner: DomainName,
    pub glue_address: IpAddr,
}

fn default_entropy() -> u8 {
    32
}

fn default_attempts() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adversary {
    #[serde(default)]
    pub kind: AdversaryKind,
    #[serde(default = "default_attempts")]
    pub attempts: u32,
    /// Bits of id plus source-port entropy the forger must guess.
    #[serde(default = "default_entropy")]
    pub entropy_bits: u8,
    #[serde(default)]
    pub forced_win: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub trigger: Option<Trigger>,
    #[serde(default)]
    pub payload: Option<Payload>,
}

impl Default for Adversary {
    fn default() -> Self {
        Adversary {
            kind: AdversaryKind::None,
            attempts: 1,
            entropy_bits: 32,
            forced_win: false,
            seed: 0,
            trigger: None,
            payload: None,
        }
    }
}

/// A forged response with the (port << 16 | id) tag it carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForgedResponse {
    pub tag: u32,
    pub message: DnsMessage,
}

pub fn tag_mask(entropy_bits: u8) -> u32 {
    if entropy_bits >= 32 {
        u32::MAX
    } else {
        (1u32 << entropy_bits) - 1
    }
}

/// A uniformly random tag with `entropy_bits` of entropy.
pub fn random_tag(rng: &mut impl Rng, entropy_bits: u8) -> u32 {
    rng.gen::<u32>() & tag_mask(entropy_bits)
}

impl Adversary {
    pub fn is_active(&self) -> bool {
        self.kind != AdversaryKind::None
    }

    /// Tags of the forged packets. The on-path attacker copies the observed
    /// tag; the off-path attacker guesses, unless `forced_win` is set.
    pub fn guess_tags(&self, rng: &mut impl Rng, actual: u32) -> Vec<u32> {
        match self.kind {
            AdversaryKind::None => Vec::new(),
            AdversaryKind::OnPathMitm => vec![actual],
            AdversaryKind::OffPathKaminsky => {
                let mut tags: Vec<u32> = (0..self.attempts).map(|_| random_tag(rng, self.entropy_bits)).collect();
                if self.forced_win {
                    if let Some(first) = tags.first_mut() {
                        *first = actual;
                    }
                }
                tags
            }
        }
    }
}

/// Rewrites a harvested genuine response with the payload: the delegation
/// NS set points at the payload target and its glue at the payload address.
pub fn apply_payload(template: &DnsMessage, payload: &Payload) -> DnsMessage {
    let mut m = template.clone();
    if let Some(target) = &payload.ns_target {
        let owners: Vec<(DomainName, u32)> = m
            .authority
            .iter()
            .filter(|rr| rr.rtype() == RecordType::NS)
            .map(|rr| (rr.owner.clone(), rr.ttl))
            .collect();
        m.authority.retain(|rr| rr.rtype() != RecordType::NS);
        let mut seen = Vec::new();
        for (owner, ttl) in owners {
            if !seen.contains(&owner) {
                m.authority
                    .insert(0, ResourceRecord::new(owner.clone(), ttl, RData::NS(target.clone())));
                seen.push(owner);
            }
        }
        m.additional.retain(|rr| !rr.rtype().is_address());
    }
    let ttl = m
        .additional
        .iter()
        .find(|rr| rr.owner == payload.glue_owner)
        .map(|rr| rr.ttl)
        .unwrap_or(3600);
    m.additional.retain(|rr| rr.owner != payload.glue_owner);
    let rdata = match payload.glue_address {
        IpAddr::V4(a) => RData::A(a),
        IpAddr::V6(a) => RData::AAAA(a),
    };
    m.additional
        .push(ResourceRecord::new(payload.glue_owner.clone(), ttl, rdata));
    m
}

/// Forged responses for a query whose genuine answer is `template` and
/// whose actual tag is `actual`.
pub fn adversary_forge(adv: &Adversary, template: &DnsMessage, actual: u32, rng: &mut impl Rng) -> Vec<ForgedResponse> {
    let Some(payload) = &adv.payload else {
        return Vec::new();
    };
    let body = apply_payload(template, payload);
    adv.guess_tags(rng, actual)
        .into_iter()
        .map(|tag| {
            let mut message = body.clone();
            message.id = (tag & 0xffff) as u16;
            ForgedResponse { tag, message }
        })
        .collect()
}

/// Probability that at least one of `attempts` uniform guesses hits a
/// uniform tag of `entropy_bits` bits.
pub fn kaminsky_closed_form(attempts: u32, entropy_bits: u8) -> f64 {
    let space = 2f64.powi(entropy_bits as i32);
    1.0 - (1.0 - 1.0 / space).powf(attempts as f64)
}

/// Monte Carlo estimate of the off-path success rate over `trials` races.
pub fn kaminsky_success_rate(attempts: u32, entropy_bits: u8, trials: u32, seed: u64) -> f64 {
    let adv = Adversary {
        kind: AdversaryKind::OffPathKaminsky,
        attempts,
        entropy_bits,
        ..Adversary::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let wins = (0..trials)
        .filter(|_| {
            let actual = random_tag(&mut rng, entropy_bits);
            adv.guess_tags(&mut rng, actual).contains(&actual)
        })
        .count();
    wins as f64 / trials as f64
}
