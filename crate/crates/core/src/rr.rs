//! Resource records: types, typed payloads, presentation and wire forms.

use std::cmp::Ordering;
use std::fmt;
use std::net::{Ipv4Addr, Ipv6Addr};
use std::str::FromStr;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use chrono::{DateTime, NaiveDateTime};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::name::{compare_canonical, DomainName};
use crate::wire::{WireError, WireReader, WireWriter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecordType {
    A,
    NS,
    SOA,
    MX,
    TXT,
    AAAA,
    DS,
    RRSIG,
    DNSKEY,
    NSEC3,
    NSEC3PARAM,
    Unknown(u16),
}

impl RecordType {
    pub fn code(self) -> u16 {
        match self {
            RecordType::A => 1,
            RecordType::NS => 2,
            RecordType::SOA => 6,
            RecordType::MX => 15,
            RecordType::TXT => 16,
            RecordType::AAAA => 28,
            RecordType::DS => 43,
            RecordType::RRSIG => 46,
            RecordType::DNSKEY => 48,
            RecordType::NSEC3 => 50,
            RecordType::NSEC3PARAM => 51,
            RecordType::Unknown(c) => c,
        }
    }

    pub fn from_code(code: u16) -> RecordType {
        match code {
            1 => RecordType::A,
            2 => RecordType::NS,
            6 => RecordType::SOA,
            15 => RecordType::MX,
            16 => RecordType::TXT,
            28 => RecordType::AAAA,
            43 => RecordType::DS,
            46 => RecordType::RRSIG,
            48 => RecordType::DNSKEY,
            50 => RecordType::NSEC3,
            51 => RecordType::NSEC3PARAM,
            c => RecordType::Unknown(c),
        }
    }

    pub fn is_address(self) -> bool {
        matches!(self, RecordType::A | RecordType::AAAA)
    }
}

impl Ord for RecordType {
    fn cmp(&self, other: &Self) -> Ordering {
        self.code().cmp(&other.code())
    }
}

impl PartialOrd for RecordType {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RecordType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RecordType::A => "A",
            RecordType::NS => "NS",
            RecordType::SOA => "SOA",
            RecordType::MX => "MX",
            RecordType::TXT => "TXT",
            RecordType::AAAA => "AAAA",
            RecordType::DS => "DS",
            RecordType::RRSIG => "RRSIG",
            RecordType::DNSKEY => "DNSKEY",
            RecordType::NSEC3 => "NSEC3",
            RecordType::NSEC3PARAM => "NSEC3PARAM",
            RecordType::Unknown(c) => return write!(f, "TYPE{c}"),
        };
        f.write_str(s)
    }
}

impl FromStr for RecordType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let up = s.to_ascii_uppercase();
        Ok(match up.as_str() {
            "A" => RecordType::A,
            "NS" => RecordType::NS,
            "SOA" => RecordType::SOA,
            "MX" => RecordType::MX,
            "TXT" => RecordType::TXT,
            "AAAA" => RecordType::AAAA,
            "DS" => RecordType::DS,
            "RRSIG" => RecordType::RRSIG,
            "DNSKEY" => RecordType::DNSKEY,
            "NSEC3" => RecordType::NSEC3,
            "NSEC3PARAM" => RecordType::NSEC3PARAM,
            _ => match up.strip_prefix("TYPE").and_then(|d| d.parse::<u16>().ok()) {
                Some(code) => RecordType::from_code(code),
                None => return Err(format!("unknown record type `{s}`")),
            },
        })
    }
}

impl Serialize for RecordType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RecordType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Soa {
    pub mname: DomainName,
    pub rname: DomainName,
    pub serial: u32,
    pub refresh: u32,
    pub retry: u32,
    pub expire: u32,
    pub minimum: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ds {
    pub key_tag: u16,
    pub algorithm: u8,
    pub digest_type: u8,
    pub digest: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dnskey {
    pub flags: u16,
    pub protocol: u8,
    pub algorithm: u8,
    pub public_key: Vec<u8>,
}

impl Dnskey {
    pub const ZONE_KEY: u16 = 0x0100;
    pub const SECURE_ENTRY_POINT: u16 = 0x0001;

    pub fn is_ksk(&self) -> bool {
        self.flags & Self::SECURE_ENTRY_POINT != 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rrsig {
    pub type_covered: RecordType,
    pub algorithm: u8,
    pub labels: u8,
    pub original_ttl: u32,
    pub expiration: u32,
    pub inception: u32,
    pub key_tag: u16,
    pub signer: DomainName,
    pub signature: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Nsec3 {
    pub hash_algorithm: u8,
    pub flags: u8,
    pub iterations: u16,
    pub salt: Vec<u8>,
    pub next_hashed: Vec<u8>,
    /// Sorted and deduplicated.
    pub types: Vec<RecordType>,
}

impl Nsec3 {
    pub const OPT_OUT: u8 = 0x01;

    pub fn opt_out(&self) -> bool {
        self.flags & Self::OPT_OUT != 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Nsec3Param {
    pub hash_algorithm: u8,
    pub flags: u8,
    pub iterations: u16,
    pub salt: Vec<u8>,
}

/// Typed record payload. The record type is derived from the variant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RData {
    A(Ipv4Addr),
    AAAA(Ipv6Addr),
    NS(DomainName),
    SOA(Soa),
    MX { preference: u16, exchange: DomainName },
    TXT(Vec<Vec<u8>>),
    DS(Ds),
    RRSIG(Rrsig),
    DNSKEY(Dnskey),
    NSEC3(Nsec3),
    NSEC3PARAM(Nsec3Param),
    Unknown { rtype: u16, data: Vec<u8> },
}

impl RData {
    pub fn rtype(&self) -> RecordType {
        match self {
            RData::A(_) => RecordType::A,
            RData::AAAA(_) => RecordType::AAAA,
            RData::NS(_) => RecordType::NS,
            RData::SOA(_) => RecordType::SOA,
            RData::MX { .. } => RecordType::MX,
            RData::TXT(_) => RecordType::TXT,
            RData::DS(_) => RecordType::DS,
            RData::RRSIG(_) => RecordType::RRSIG,
            RData::DNSKEY(_) => RecordType::DNSKEY,
            RData::NSEC3(_) => RecordType::NSEC3,
            RData::NSEC3PARAM(_) => RecordType::NSEC3PARAM,
            RData::Unknown { rtype, .. } => RecordType::Unknown(*rtype),
        }
    }

    /// Canonical rdata octets: uncompressed, embedded names lowercased.
    pub fn canonical_wire(&self) -> Vec<u8> {
        let mut w = WireWriter::new(false);
        self.encode(&mut w, true);
        w.finish()
    }

    /// Appends the rdata (without the length prefix).
    pub fn encode(&self, w: &mut WireWriter, canonical: bool) {
        let name = |w: &mut WireWriter, n: &DomainName, compressible: bool| {
            if canonical {
                w.name(&n.to_lowercase(), false);
            } else {
                w.name(n, compressible);
            }
        };
        match self {
            RData::A(a) => w.bytes(&a.octets()),
            RData::AAAA(a) => w.bytes(&a.octets()),
            RData::NS(n) => name(w, n, true),
            RData::SOA(s) => {
                name(w, &s.mname, true);
                name(w, &s.rname, true);
                for v in [s.serial, s.refresh, s.retry, s.expire, s.minimum] {
                    w.u32(v);
                }
            }
            RData::MX { preference, exchange } => {
                w.u16(*preference);
                name(w, exchange, true);
            }
            RData::TXT(strings) => {
                for s in strings {
                    w.u8(s.len() as u8);
                    w.bytes(s);
                }
            }
            RData::DS(d) => {
                w.u16(d.key_tag);
                w.u8(d.algorithm);
                w.u8(d.digest_type);
                w.bytes(&d.digest);
            }
            RData::RRSIG(s) => {
                encode_rrsig_header(w, s, canonical);
                w.bytes(&s.signature);
            }
            RData::DNSKEY(k) => {
                w.u16(k.flags);
                w.u8(k.protocol);
                w.u8(k.algorithm);
                w.bytes(&k.public_key);
            }
            RData::NSEC3(n) => {
                w.u8(n.hash_algorithm);
                w.u8(n.flags);
                w.u16(n.iterations);
                w.u8(n.salt.len() as u8);
                w.bytes(&n.salt);
                w.u8(n.next_hashed.len() as u8);
                w.bytes(&n.next_hashed);
                w.bytes(&encode_type_bitmap(&n.types));
            }
            RData::NSEC3PARAM(p) => {
                w.u8(p.hash_algorithm);
                w.u8(p.flags);
                w.u16(p.iterations);
                w.u8(p.salt.len() as u8);
                w.bytes(&p.salt);
            }
            RData::Unknown { data, .. } => w.bytes(data),
        }
    }

    /// Decodes `len` octets of rdata starting at the reader's position.
    pub fn decode(rtype: RecordType, r: &mut WireReader<'_>, len: usize) -> Result<RData, WireError> {
        let start = r.pos();
        let end = start + len;
        if r.remaining() < len {
            return Err(WireError::Truncated(start));
        }
        let bad = |detail: &str| WireError::BadRdata {
            rtype: rtype.code(),
            detail: detail.to_string(),
        };
        let rest = |r: &mut WireReader<'_>| -> Result<Vec<u8>, WireError> {
            let n = end.checked_sub(r.pos()).ok_or_else(|| bad("overrun"))?;
            Ok(r.bytes(n)?.to_vec())
        };
        let rdata = match rtype {
            RecordType::A => {
                if len != 4 {
                    return Err(bad("A rdata must be 4 octets"));
                }
                let b = r.bytes(4)?;
                RData::A(Ipv4Addr::new(b[0], b[1], b[2], b[3]))
            }
            RecordType::AAAA => {
                if len != 16 {
                    return Err(bad("AAAA rdata must be 16 octets"));
                }
                let mut o = [0u8; 16];
                o.copy_from_slice(r.bytes(16)?);
                RData::AAAA(Ipv6Addr::from(o))
            }
            RecordType::NS => RData::NS(r.name()?),
            RecordType::SOA => RData::SOA(Soa {
                mname: r.name()?,
                rname: r.name()?,
                serial: r.u32()?,
                refresh: r.u32()?,
                retry: r.u32()?,
                expire: r.u32()?,
                minimum: r.u32()?,
            }),
            RecordType::MX => RData::MX {
                preference: r.u16()?,
                exchange: r.name()?,
            },
            RecordType::TXT => {
                let mut strings = Vec::new();
                while r.pos() < end {
                    let n = r.u8()? as usize;
                    strings.push(r.bytes(n)?.to_vec());
                }
                RData::TXT(strings)
            }
            RecordType::DS => RData::DS(Ds {
                key_tag: r.u16()?,
                algorithm: r.u8()?,
                digest_type: r.u8()?,
                digest: rest(r)?,
            }),
            RecordType::RRSIG => RData::RRSIG(Rrsig {
                type_covered: RecordType::from_code(r.u16()?),
                algorithm: r.u8()?,
                labels: r.u8()?,
                original_ttl: r.u32()?,
                expiration: r.u32()?,
                inception: r.u32()?,
                key_tag: r.u16()?,
                signer: r.name()?,
                signature: rest(r)?,
            }),
            RecordType::DNSKEY => RData::DNSKEY(Dnskey {
                flags: r.u16()?,
                protocol: r.u8()?,
                algorithm: r.u8()?,
                public_key: rest(r)?,
            }),
            RecordType::NSEC3 => {
                let hash_algorithm = r.u8()?;
                let flags = r.u8()?;
                let iterations = r.u16()?;
                let salt_len = r.u8()? as usize;
                let salt = r.bytes(salt_len)?.to_vec();
                let hash_len = r.u8()? as usize;
                let next_hashed = r.bytes(hash_len)?.to_vec();
                let bitmap = rest(r)?;
                let types = decode_type_bitmap(&bitmap).ok_or_else(|| bad("bad type bitmap"))?;
                RData::NSEC3(Nsec3 {
                    hash_algorithm,
                    flags,
                    iterations,
                    salt,
                    next_hashed,
                    types,
                })
            }
            RecordType::NSEC3PARAM => {
                let hash_algorithm = r.u8()?;
                let flags = r.u8()?;
                let iterations = r.u16()?;
                let salt_len = r.u8()? as usize;
                let salt = r.bytes(salt_len)?.to_vec();
                RData::NSEC3PARAM(Nsec3Param {
                    hash_algorithm,
                    flags,
                    iterations,
                    salt,
                })
            }
            RecordType::Unknown(code) => RData::Unknown {
                rtype: code,
                data: rest(r)?,
            },
        };
        if r.pos() != end {
            return Err(bad("rdata length mismatch"));
        }
        Ok(rdata)
    }

    /// Parses presentation-format rdata tokens. Relative names are resolved
    /// against `origin`.
    pub fn parse(rtype: RecordType, tokens: &[String], origin: &DomainName) -> Result<RData, String> {
        let need = |n: usize| -> Result<(), String> {
            if tokens.len() < n {
                Err(format!("{rtype} needs at least {n} rdata fields, got {}", tokens.len()))
            } else {
                Ok(())
            }
        };
        let exact = |n: usize| -> Result<(), String> {
            if tokens.len() != n {
                Err(format!("{rtype} needs {n} rdata fields, got {}", tokens.len()))
            } else {
                Ok(())
            }
        };
        let dname = |t: &str| DomainName::parse_relative(t, origin).map_err(|e| e.to_string());
        let int = |t: &str| -> Result<u64, String> { t.parse::<u64>().map_err(|_| format!("bad integer `{t}`")) };
        let u8_ = |t: &str| -> Result<u8, String> { u8::try_from(int(t)?).map_err(|_| format!("`{t}` out of range")) };
        let u16_ =
            |t: &str| -> Result<u16, String> { u16::try_from(int(t)?).map_err(|_| format!("`{t}` out of range")) };
        let u32_ =
            |t: &str| -> Result<u32, String> { u32::try_from(int(t)?).map_err(|_| format!("`{t}` out of range")) };

        if tokens.first().map(String::as_str) == Some("\\#") {
            need(2)?;
            let len = int(&tokens[1])? as usize;
            let data = hex::decode(tokens[2..].concat()).map_err(|e| format!("bad hex: {e}"))?;
            if data.len() != len {
                return Err(format!(
                    "generic rdata length {len} does not match {} octets",
                    data.len()
                ));
            }
            return match rtype {
                RecordType::Unknown(code) => Ok(RData::Unknown { rtype: code, data }),
                known => {
                    let mut r = WireReader::new(&data);
                    RData::decode(known, &mut r, data.len()).map_err(|e| e.to_string())
                }
            };
        }

        Ok(match rtype {
            RecordType::A => {
                exact(1)?;
                RData::A(
                    tokens[0]
                        .parse()
                        .map_err(|_| format!("bad IPv4 address `{}`", tokens[0]))?,
                )
            }
            RecordType::AAAA => {
                exact(1)?;
                RData::AAAA(
                    tokens[0]
                        .parse()
                        .map_err(|_| format!("bad IPv6 address `{}`", tokens[0]))?,
                )
            }
            RecordType::NS => {
                exact(1)?;
                RData::NS(dname(&tokens[0])?)
            }
            RecordType::SOA => {
                exact(7)?;
                RData::SOA(Soa {
                    mname: dname(&tokens[0])?,
                    rname: dname(&tokens[1])?,
                    serial: u32_(&tokens[2])?,
                    refresh: u32_(&tokens[3])?,
                    retry: u32_(&tokens[4])?,
                    expire: u32_(&tokens[5])?,
                    minimum: u32_(&tokens[6])?,
                })
            }
            RecordType::MX => {
                exact(2)?;
                RData::MX {
                    preference: u16_(&tokens[0])?,
                    exchange: dname(&tokens[1])?,
                }
            }
            RecordType::TXT => {
                need(1)?;
                let mut strings = Vec::new();
                for t in tokens {
                    let s = t.strip_prefix('"').and_then(|t| t.strip_suffix('"')).unwrap_or(t);
                    if s.len() > 255 {
                        return Err("TXT string longer than 255 octets".into());
                    }
                    strings.push(s.as_bytes().to_vec());
                }
                RData::TXT(strings)
            }
            RecordType::DS => {
                need(4)?;
                RData::DS(Ds {
                    key_tag: u16_(&tokens[0])?,
                    algorithm: u8_(&tokens[1])?,
                    digest_type: u8_(&tokens[2])?,
                    digest: hex::decode(tokens[3..].concat()).map_err(|e| format!("bad DS digest: {e}"))?,
                })
            }
            RecordType::RRSIG => {
                need(9)?;
                RData::RRSIG(Rrsig {
                    type_covered: tokens[0].parse()?,
                    algorithm: u8_(&tokens[1])?,
                    labels: u8_(&tokens[2])?,
                    original_ttl: u32_(&tokens[3])?,
                    expiration: parse_sig_time(&tokens[4])?,
                    inception: parse_sig_time(&tokens[5])?,
                    key_tag: u16_(&tokens[6])?,
                    signer: dname(&tokens[7])?,
                    signature: BASE64
                        .decode(tokens[8..].concat())
                        .map_err(|e| format!("bad RRSIG signature: {e}"))?,
                })
            }
            RecordType::DNSKEY => {
                need(4)?;
                RData::DNSKEY(Dnskey {
                    flags: u16_(&tokens[0])?,
                    protocol: u8_(&tokens[1])?,
                    algorithm: u8_(&tokens[2])?,
                    public_key: BASE64
                        .decode(tokens[3..].concat())
                        .map_err(|e| format!("bad DNSKEY key: {e}"))?,
                })
            }
            RecordType::NSEC3 => {
                need(5)?;
                let mut types = tokens[5..]
                    .iter()
                    .map(|t| t.parse::<RecordType>())
                    .collect::<Result<Vec<_>, _>>()?;
                types.sort();
                types.dedup();
                RData::NSEC3(Nsec3 {
                    hash_algorithm: u8_(&tokens[0])?,
                    flags: u8_(&tokens[1])?,
                    iterations: u16_(&tokens[2])?,
                    salt: parse_salt(&tokens[3])?,
                    next_hashed: base32hex_decode(&tokens[4])
                        .ok_or_else(|| format!("bad base32hex `{}`", tokens[4]))?,
                    types,
                })
            }
            RecordType::NSEC3PARAM => {
                exact(4)?;
                RData::NSEC3PARAM(Nsec3Param {
                    hash_algorithm: u8_(&tokens[0])?,
                    flags: u8_(&tokens[1])?,
                    iterations: u16_(&tokens[2])?,
                    salt: parse_salt(&tokens[3])?,
                })
            }
            RecordType::Unknown(code) => {
                return Err(format!("TYPE{code} requires generic \\# rdata"));
            }
        })
    }
}

fn encode_rrsig_header(w: &mut WireWriter, s: &Rrsig, canonical: bool) {
    w.u16(s.type_covered.code());
    w.u8(s.algorithm);
    w.u8(s.labels);
    w.u32(s.original_ttl);
    w.u32(s.expiration);
    w.u32(s.inception);
    w.u16(s.key_tag);
    if canonical {
        w.name(&s.signer.to_lowercase(), false);
    } else {
        w.name(&s.signer, false);
    }
}

/// RRSIG rdata without the signature field, as prefixed to signed data.
pub fn rrsig_signed_prefix(s: &Rrsig) -> Vec<u8> {
    let mut w = WireWriter::new(false);
    encode_rrsig_header(&mut w, s, true);
    w.finish()
}

fn parse_salt(t: &str) -> Result<Vec<u8>, String> {
    if t == "-" {
        Ok(Vec::new())
    } else {
        hex::decode(t).map_err(|e| format!("bad salt `{t}`: {e}"))
    }
}

/// Lowercase base32hex without padding.
pub fn base32hex_encode(data: &[u8]) -> String {
    data_encoding::BASE32HEX_NOPAD.encode(data).to_ascii_lowercase()
}

pub fn base32hex_decode(text: &str) -> Option<Vec<u8>> {
    data_encoding::BASE32HEX_NOPAD
        .decode(text.to_ascii_uppercase().as_bytes())
        .ok()
}

/// Formats a signature timestamp as YYYYMMDDHHmmSS (UTC).
pub fn format_sig_time(t: u32) -> String {
    DateTime::from_timestamp(t as i64, 0)
        .expect("u32 timestamps are in range")
        .format("%Y%m%d%H%M%S")
        .to_string()
}

/// Accepts both YYYYMMDDHHmmSS and a plain integer number of seconds.
pub fn parse_sig_time(t: &str) -> Result<u32, String> {
    if t.len() == 14 && t.bytes().all(|b| b.is_ascii_digit()) {
        let dt = NaiveDateTime::parse_from_str(t, "%Y%m%d%H%M%S").map_err(|e| format!("bad timestamp `{t}`: {e}"))?;
        let secs = dt.and_utc().timestamp();
        u32::try_from(secs).map_err(|_| format!("timestamp `{t}` out of range"))
    } else {
        t.parse::<u32>().map_err(|_| format!("bad timestamp `{t}`"))
    }
}

/// RFC 4034 windowed type bitmap.
pub fn encode_type_bitmap(types: &[RecordType]) -> Vec<u8> {
    let mut codes: Vec<u16> = types.iter().map(|t| t.code()).collect();
    codes.sort_unstable();
    codes.dedup();
    let mut out = Vec::new();
    let mut i = 0;
    while i < codes.len() {
        let window = (codes[i] >> 8) as u8;
        let mut bits = [0u8; 32];
        let mut max_octet = 0usize;
        while i < codes.len() && (codes[i] >> 8) as u8 == window {
            let low = (codes[i] & 0xFF) as usize;
            bits[low / 8] |= 0x80 >> (low % 8);
            max_octet = low / 8;
            i += 1;
        }
        out.push(window);
        out.push(max_octet as u8 + 1);
        out.extend_from_slice(&bits[..=max_octet]);
    }
    out
}

pub fn decode_type_bitmap(data: &[u8]) -> Option<Vec<RecordType>> {
    let mut types = Vec::new();
    let mut i = 0;
    let mut last_window: Option<u8> = None;
    while i < data.len() {
        let window = *data.get(i)?;
        let len = *data.get(i + 1)? as usize;
        if len == 0 || len > 32 || last_window.is_some_and(|w| w >= window) {
            return None;
        }
        let bits = data.get(i + 2..i + 2 + len)?;
        for (octet, b) in bits.iter().enumerate() {
            for bit in 0..8 {
                if b & (0x80 >> bit) != 0 {
                    types.push(RecordType::from_code(((window as u16) << 8) | (octet * 8 + bit) as u16));
                }
            }
        }
        last_window = Some(window);
        i += 2 + len;
    }
    types.sort();
    Some(types)
}

impl fmt::Display for RData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RData::A(a) => write!(f, "{a}"),
            RData::AAAA(a) => write!(f, "{a}"),
            RData::NS(n) => write!(f, "{n}"),
            RData::SOA(s) => write!(
                f,
                "{} {} {} {} {} {} {}",
                s.mname, s.rname, s.serial, s.refresh, s.retry, s.expire, s.minimum
            ),
            RData::MX { preference, exchange } => write!(f, "{preference} {exchange}"),
            RData::TXT(strings) => {
                let parts: Vec<String> = strings
                    .iter()
                    .map(|s| format!("\"{}\"", String::from_utf8_lossy(s)))
                    .collect();
                f.write_str(&parts.join(" "))
            }
            RData::DS(d) => write!(
                f,
                "{} {} {} {}",
                d.key_tag,
                d.algorithm,
                d.digest_type,
                hex::encode_upper(&d.digest)
            ),
            RData::RRSIG(s) => write!(
                f,
                "{} {} {} {} {} {} {} {} {}",
                s.type_covered,
                s.algorithm,
                s.labels,
                s.original_ttl,
                format_sig_time(s.expiration),
                format_sig_time(s.inception),
                s.key_tag,
                s.signer,
                BASE64.encode(&s.signature)
            ),
            RData::DNSKEY(k) => {
                write!(
                    f,
                    "{} {} {} {}",
                    k.flags,
                    k.protocol,
                    k.algorithm,
                    BASE64.encode(&k.public_key)
                )
            }
            RData::NSEC3(n) => {
                let salt = if n.salt.is_empty() {
                    "-".to_string()
                } else {
                    hex::encode(&n.salt)
                };
                write!(
                    f,
                    "{} {} {} {} {}",
                    n.hash_algorithm,
                    n.flags,
                    n.iterations,
                    salt,
                    base32hex_encode(&n.next_hashed)
                )?;
                for t in &n.types {
                    write!(f, " {t}")?;
                }
                Ok(())
            }
            RData::NSEC3PARAM(p) => {
                let salt = if p.salt.is_empty() {
                    "-".to_string()
                } else {
                    hex::encode(&p.salt)
                };
                write!(f, "{} {} {} {}", p.hash_algorithm, p.flags, p.iterations, salt)
            }
            RData::Unknown { data, .. } => {
                write!(f, "\\# {}", data.len())?;
                if !data.is_empty() {
                    write!(f, " {}", hex::encode(data))?;
                }
                Ok(())
            }
        }
    }
}

/// A single resource record. Class is always IN.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResourceRecord {
    pub owner: DomainName,
    pub ttl: u32,
    pub rdata: RData,
}

impl ResourceRecord {
    pub fn new(owner: DomainName, ttl: u32, rdata: RData) -> Self {
        ResourceRecord { owner, ttl, rdata }
    }

    pub fn rtype(&self) -> RecordType {
        self.rdata.rtype()
    }

    /// For RRSIG records, the type they cover.
    pub fn covered_type(&self) -> Option<RecordType> {
        match &self.rdata {
            RData::RRSIG(s) => Some(s.type_covered),
            _ => None,
        }
    }

    pub fn ns_target(&self) -> Option<&DomainName> {
        match &self.rdata {
            RData::NS(n) => Some(n),
            _ => None,
        }
    }

    pub fn address(&self) -> Option<std::net::IpAddr> {
        match &self.rdata {
            RData::A(a) => Some((*a).into()),
            RData::AAAA(a) => Some((*a).into()),
            _ => None,
        }
    }

    /// Same owner, type and rdata; TTL ignored.
    pub fn same_data(&self, other: &ResourceRecord) -> bool {
        self.owner == other.owner && self.rdata == other.rdata
    }
}

impl fmt::Display for ResourceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} IN {} {}", self.owner, self.ttl, self.rtype(), self.rdata)
    }
}

impl Ord for ResourceRecord {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_canonical(&self.owner, &other.owner)
            .then_with(|| self.rtype().code().cmp(&other.rtype().code()))
            .then_with(|| self.rdata.canonical_wire().cmp(&other.rdata.canonical_wire()))
            .then_with(|| self.ttl.cmp(&other.ttl))
    }
}

impl PartialOrd for ResourceRecord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for ResourceRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ResourceRecord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        crate::master::parse_record_line(&s, &DomainName::root()).map_err(serde::de::Error::custom)
    }
}

/// Shorthand for building records in tests and examples.
pub fn record(owner: &str, ttl: u32, rdata: RData) -> ResourceRecord {
    ResourceRecord::new(crate::name::name(owner), ttl, rdata)
}
