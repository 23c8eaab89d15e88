//! NSEC3 hashing and hashed-chain records.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha1::{Digest, Sha1};
use thiserror::Error;

use crate::name::DomainName;
use crate::rr::{base32hex_decode, base32hex_encode, Nsec3, Nsec3Param, RData, RecordType, ResourceRecord};

pub const NSEC3_SHA1: u8 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Nsec3Error {
    #[error("unsupported NSEC3 hash algorithm {0}")]
    UnsupportedAlgorithm(u8),
    #[error("salt longer than 255 octets")]
    SaltTooLong,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Nsec3Params {
    pub algorithm: u8,
    pub iterations: u16,
    #[serde(with = "hex_bytes")]
    pub salt: Vec<u8>,
}

impl Nsec3Params {
    pub fn new(iterations: u16, salt: Vec<u8>) -> Self {
        Nsec3Params {
            algorithm: NSEC3_SHA1,
            iterations,
            salt,
        }
    }

    pub fn to_rdata(&self) -> Nsec3Param {
        Nsec3Param {
            hash_algorithm: self.algorithm,
            flags: 0,
            iterations: self.iterations,
            salt: self.salt.clone(),
        }
    }
}

impl Default for Nsec3Params {
    fn default() -> Self {
        Nsec3Params::new(12, vec![0xAA, 0xBB, 0xCC, 0xDD])
    }
}

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        if s == "-" {
            return Ok(Vec::new());
        }
        hex::decode(&s).map_err(serde::de::Error::custom)
    }
}

/// 20-octet iterated SHA-1 of the canonical wire form of `name`.
pub fn nsec3_hash(name: &DomainName, params: &Nsec3Params) -> Result<[u8; 20], Nsec3Error> {
    if params.algorithm != NSEC3_SHA1 {
        return Err(Nsec3Error::UnsupportedAlgorithm(params.algorithm));
    }
    if params.salt.len() > 255 {
        return Err(Nsec3Error::SaltTooLong);
    }
    let mut digest: [u8; 20] = Sha1::new()
        .chain_update(name.canonical_wire())
        .chain_update(&params.salt)
        .finalize()
        .into();
    for _ in 0..params.iterations {
        digest = Sha1::new()
            .chain_update(digest)
            .chain_update(&params.salt)
            .finalize()
            .into();
    }
    Ok(digest)
}

pub fn nsec3_hash_text(name: &DomainName, params: &Nsec3Params) -> Result<String, Nsec3Error> {
    nsec3_hash(name, params).map(|h| base32hex_encode(&h))
}

/// One link of a hashed chain, detached from its owner name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Nsec3Record {
    pub owner_hash: Vec<u8>,
    pub next_hash: Vec<u8>,
    pub opt_out: bool,
    pub types: Vec<RecordType>,
    pub params: Nsec3Params,
}

impl Nsec3Record {
    /// `owner < h < next`, wrapping when `owner >= next`.
    pub fn covers(&self, h: &[u8]) -> bool {
        let (o, n) = (self.owner_hash.as_slice(), self.next_hash.as_slice());
        if o < n {
            o < h && h < n
        } else {
            h > o || h < n
        }
    }

    pub fn matches(&self, h: &[u8]) -> bool {
        self.owner_hash == h
    }

    pub fn has_type(&self, t: RecordType) -> bool {
        self.types.contains(&t)
    }

    pub fn owner_text(&self) -> String {
        base32hex_encode(&self.owner_hash)
    }

    pub fn next_text(&self) -> String {
        base32hex_encode(&self.next_hash)
    }

    /// Reads an NSEC3 record whose owner is `<hash>.<apex>`.
    pub fn from_rr(rr: &ResourceRecord, apex: &DomainName) -> Option<Nsec3Record> {
        let RData::NSEC3(n) = &rr.rdata else {
            return None;
        };
        if rr.owner.parent().as_ref() != Some(apex) {
            return None;
        }
        let label = std::str::from_utf8(&rr.owner.labels()[0]).ok()?;
        let owner_hash = base32hex_decode(label)?;
        Some(Nsec3Record {
            owner_hash,
            next_hash: n.next_hashed.clone(),
            opt_out: n.opt_out(),
            types: n.types.clone(),
            params: Nsec3Params {
                algorithm: n.hash_algorithm,
                iterations: n.iterations,
                salt: n.salt.clone(),
            },
        })
    }

    /// Like `from_rr` but takes the apex to be the owner's parent.
    pub fn from_rr_any(rr: &ResourceRecord) -> Option<Nsec3Record> {
        Nsec3Record::from_rr(rr, &rr.owner.parent()?)
    }

    pub fn owner_name(&self, apex: &DomainName) -> DomainName {
        apex.prepend(self.owner_text().as_bytes())
            .expect("hash label fits under apex")
    }

    pub fn to_rr(&self, apex: &DomainName, ttl: u32) -> ResourceRecord {
        let mut types = self.types.clone();
        types.sort();
        types.dedup();
        ResourceRecord::new(
            self.owner_name(apex),
            ttl,
            RData::NSEC3(Nsec3 {
                hash_algorithm: self.params.algorithm,
                flags: if self.opt_out { Nsec3::OPT_OUT } else { 0 },
                iterations: self.params.iterations,
                salt: self.params.salt.clone(),
                next_hashed: self.next_hash.clone(),
                types,
            }),
        )
    }
}

impl fmt::Display for Nsec3Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -> {}{}",
            self.owner_text(),
            self.next_text(),
            if self.opt_out { " (opt-out)" } else { "" }
        )
    }
}
