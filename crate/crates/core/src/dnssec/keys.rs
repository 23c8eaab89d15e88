//! Key pairs, key tags and JSON key files.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::scheme::{scheme_for, UnknownScheme, TOY_ALGORITHM};
use crate::name::DomainName;
use crate::rr::{Dnskey, RData, ResourceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum KeyRole {
    Ksk,
    Zsk,
}

impl KeyRole {
    pub fn flags(self) -> u16 {
        match self {
            KeyRole::Ksk => Dnskey::ZONE_KEY | Dnskey::SECURE_ENTRY_POINT,
            KeyRole::Zsk => Dnskey::ZONE_KEY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPair {
    pub role: KeyRole,
    pub algorithm: u8,
    pub key_tag: u16,
    pub public: Vec<u8>,
    pub secret: Vec<u8>,
}

impl KeyPair {
    pub fn from_secret(role: KeyRole, algorithm: u8, secret: Vec<u8>) -> Result<KeyPair, UnknownScheme> {
        let public = scheme_for(algorithm)?.public_from_secret(&secret);
        let dnskey = Dnskey {
            flags: role.flags(),
            protocol: 3,
            algorithm,
            public_key: public.clone(),
        };
        Ok(KeyPair {
            role,
            algorithm,
            key_tag: key_tag(&dnskey),
            public,
            secret,
        })
    }

    /// Deterministic key for a zone, derived from the apex, role and a seed.
    pub fn derive(apex: &DomainName, role: KeyRole, seed: u64) -> KeyPair {
        let secret = Sha256::new()
            .chain_update(b"dnsglue-key")
            .chain_update(apex.canonical_wire())
            .chain_update([role as u8])
            .chain_update(seed.to_be_bytes())
            .finalize()
            .to_vec();
        KeyPair::from_secret(role, TOY_ALGORITHM, secret).expect("toy scheme is registered")
    }

    pub fn dnskey(&self) -> Dnskey {
        Dnskey {
            flags: self.role.flags(),
            protocol: 3,
            algorithm: self.algorithm,
            public_key: self.public.clone(),
        }
    }

    pub fn dnskey_record(&self, apex: &DomainName, ttl: u32) -> ResourceRecord {
        ResourceRecord::new(apex.clone(), ttl, RData::DNSKEY(self.dnskey()))
    }

    pub fn to_file(&self) -> KeyFile {
        KeyFile {
            role: self.role,
            tag: self.key_tag,
            algorithm: self.algorithm,
            public: hex::encode(&self.public),
            secret: hex::encode(&self.secret),
        }
    }
}

/// On-disk key representation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyFile {
    pub role: KeyRole,
    pub tag: u16,
    pub algorithm: u8,
    pub public: String,
    pub secret: String,
}

impl KeyFile {
    pub fn into_pair(self) -> Result<KeyPair, String> {
        let secret = hex::decode(&self.secret).map_err(|e| format!("bad secret hex: {e}"))?;
        let pair = KeyPair::from_secret(self.role, self.algorithm, secret).map_err(|e| e.to_string())?;
        if hex::encode(&pair.public) != self.public.to_ascii_lowercase() {
            return Err("public material does not match secret".into());
        }
        if pair.key_tag != self.tag {
            return Err(format!("key tag {} does not match computed {}", self.tag, pair.key_tag));
        }
        Ok(pair)
    }
}

/// RFC 4034 Appendix B key tag.
pub fn key_tag(dnskey: &Dnskey) -> u16 {
    let rdata = RData::DNSKEY(dnskey.clone()).canonical_wire();
    let mut acc: u32 = 0;
    for (i, b) in rdata.iter().enumerate() {
        acc += if i & 1 == 1 { *b as u32 } else { (*b as u32) << 8 };
    }
    acc += (acc >> 16) & 0xFFFF;
    (acc & 0xFFFF) as u16
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::name;
    use base64::Engine;

    #[test]
    fn key_tag_rfc4034_example() {
        // DNSKEY from RFC 4034 section 5.4, key tag 60485.
        let key = base64::engine::general_purpose::STANDARD
            .decode(concat!(
                "AQOeiiR0GOMYkDshWoSKz9XzfwJr1AYtsmx3TGkJaNXVbfi/2pHm822aJ5iI9BMzNXxeYCmZ",
                "DRD99WYwYqUSdjMmmAphXdvxegXd/M5+X7OrzKBaMbCVdFLUUh6DhweJBjEVv5f2wwjM9Xzc",
                "nOf+EPbtG9DMBmADjFDc2w/rljwvFw=="
            ))
            .unwrap();
        let dnskey = Dnskey {
            flags: 256,
            protocol: 3,
            algorithm: 5,
            public_key: key,
        };
        assert_eq!(key_tag(&dnskey), 60485);
    }

    #[test]
    fn derived_keys_are_stable_and_distinct() {
        let a = KeyPair::derive(&name("example"), KeyRole::Ksk, 1);
        let b = KeyPair::derive(&name("example"), KeyRole::Ksk, 1);
        let z = KeyPair::derive(&name("example"), KeyRole::Zsk, 1);
        assert_eq!(a, b);
        assert_ne!(a.key_tag, z.key_tag);
        assert!(a.dnskey().is_ksk());
        assert!(!z.dnskey().is_ksk());
    }

    #[test]
    fn key_file_roundtrip() {
        let k = KeyPair::derive(&name("com"), KeyRole::Zsk, 9);
        let json = serde_json::to_string(&k.to_file()).unwrap();
        let back: KeyFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_pair().unwrap(), k);
    }
}
