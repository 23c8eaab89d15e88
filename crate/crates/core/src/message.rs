//! DNS messages, their wire codec and a dig-like text rendering.

use std::fmt;

use serde::Serialize;

use crate::name::DomainName;
use crate::rr::{RData, RecordType, ResourceRecord};
use crate::wire::{WireError, WireReader, WireWriter};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub enum ResponseCode {
    #[default]
    NoError,
    FormErr,
    ServFail,
    NxDomain,
    NotImp,
    Refused,
    Other(u8),
}

impl ResponseCode {
    pub fn code(self) -> u8 {
        match self {
            ResponseCode::NoError => 0,
            ResponseCode::FormErr => 1,
            ResponseCode::ServFail => 2,
            ResponseCode::NxDomain => 3,
            ResponseCode::NotImp => 4,
            ResponseCode::Refused => 5,
            ResponseCode::Other(c) => c,
        }
    }

    pub fn from_code(c: u8) -> ResponseCode {
        match c {
            0 => ResponseCode::NoError,
            1 => ResponseCode::FormErr,
            2 => ResponseCode::ServFail,
            3 => ResponseCode::NxDomain,
            4 => ResponseCode::NotImp,
            5 => ResponseCode::Refused,
            c => ResponseCode::Other(c),
        }
    }
}

impl fmt::Display for ResponseCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResponseCode::NoError => f.write_str("NOERROR"),
            ResponseCode::FormErr => f.write_str("FORMERR"),
            ResponseCode::ServFail => f.write_str("SERVFAIL"),
            ResponseCode::NxDomain => f.write_str("NXDOMAIN"),
            ResponseCode::NotImp => f.write_str("NOTIMP"),
            ResponseCode::Refused => f.write_str("REFUSED"),
            ResponseCode::Other(c) => write!(f, "RCODE{c}"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Flags {
    pub response: bool,
    pub authoritative: bool,
    pub recursion_desired: bool,
    pub recursion_available: bool,
    pub authenticated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Question {
    pub name: DomainName,
    pub rtype: RecordType,
}

impl Question {
    pub fn new(name: DomainName, rtype: RecordType) -> Self {
        Question { name, rtype }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct DnsMessage {
    pub id: u16,
    pub flags: Flags,
    pub rcode: ResponseCode,
    pub question: Option<Question>,
    pub answer: Vec<ResourceRecord>,
    pub authority: Vec<ResourceRecord>,
    pub additional: Vec<ResourceRecord>,
}

impl DnsMessage {
    pub fn query(id: u16, name: DomainName, rtype: RecordType) -> DnsMessage {
        DnsMessage {
            id,
            flags: Flags::default(),
            question: Some(Question::new(name, rtype)),
            ..Default::default()
        }
    }

    /// An empty response to `query`, copying id and question.
    pub fn response_to(query: &DnsMessage) -> DnsMessage {
        DnsMessage {
            id: query.id,
            flags: Flags {
                response: true,
                recursion_desired: query.flags.recursion_desired,
                ..Flags::default()
            },
            question: query.question.clone(),
            ..Default::default()
        }
    }

    /// Empty answer, NS records in authority, not authoritative.
    pub fn is_referral(&self) -> bool {
        self.rcode == ResponseCode::NoError
            && self.answer.is_empty()
            && !self.flags.authoritative
            && self.authority.iter().any(|rr| rr.rtype() == RecordType::NS)
    }

    /// Owner of the NS RRset in the authority section of a referral.
    pub fn referral_zone(&self) -> Option<&DomainName> {
        self.authority
            .iter()
            .find(|rr| rr.rtype() == RecordType::NS)
            .map(|rr| &rr.owner)
    }

    pub fn sections(&self) -> impl Iterator<Item = &ResourceRecord> {
        self.answer.iter().chain(&self.authority).chain(&self.additional)
    }

    pub fn encode(&self) -> Vec<u8> {
        encode_message(self)
    }

    pub fn decode(data: &[u8]) -> Result<DnsMessage, WireError> {
        decode_message(data)
    }
}

fn encode_record(w: &mut WireWriter, rr: &ResourceRecord) {
    w.name(&rr.owner, true);
    w.u16(rr.rtype().code());
    w.u16(1);
    w.u32(rr.ttl);
    let len_at = w.len();
    w.u16(0);
    let start = w.len();
    rr.rdata.encode(w, false);
    let len = (w.len() - start) as u16;
    w.patch_u16(len_at, len);
}

/// Encodes with name compression.
pub fn encode_message(m: &DnsMessage) -> Vec<u8> {
    let mut w = WireWriter::new(true);
    w.u16(m.id);
    let mut hi = 0u8;
    if m.flags.response {
        hi |= 0x80;
    }
    if m.flags.authoritative {
        hi |= 0x04;
    }
    if m.flags.recursion_desired {
        hi |= 0x01;
    }
    let mut lo = m.rcode.code() & 0x0F;
    if m.flags.recursion_available {
        lo |= 0x80;
    }
    if m.flags.authenticated {
        lo |= 0x20;
    }
    w.u8(hi);
    w.u8(lo);
    w.u16(m.question.is_some() as u16);
    w.u16(m.answer.len() as u16);
    w.u16(m.authority.len() as u16);
    w.u16(m.additional.len() as u16);
    if let Some(q) = &m.question {
        w.name(&q.name, true);
        w.u16(q.rtype.code());
        w.u16(1);
    }
    for rr in m.sections() {
        encode_record(&mut w, rr);
    }
    w.finish()
}

fn decode_record(r: &mut WireReader<'_>) -> Result<ResourceRecord, WireError> {
    let owner = r.name()?;
    let rtype = RecordType::from_code(r.u16()?);
    let class = r.u16()?;
    if class != 1 {
        return Err(WireError::Unsupported(format!("class {class}")));
    }
    let ttl = r.u32()?;
    let len = r.u16()? as usize;
    let rdata = RData::decode(rtype, r, len)?;
    Ok(ResourceRecord::new(owner, ttl, rdata))
}

pub fn decode_message(data: &[u8]) -> Result<DnsMessage, WireError> {
    if data.len() < 12 {
        return Err(WireError::Truncated(data.len()));
    }
    let mut r = WireReader::new(data);
    let id = r.u16()?;
    let hi = r.u8()?;
    let lo = r.u8()?;
    if (hi >> 3) & 0x0F != 0 {
        return Err(WireError::Unsupported(format!("opcode {}", (hi >> 3) & 0x0F)));
    }
    let flags = Flags {
        response: hi & 0x80 != 0,
        authoritative: hi & 0x04 != 0,
        recursion_desired: hi & 0x01 != 0,
        recursion_available: lo & 0x80 != 0,
        authenticated: lo & 0x20 != 0,
    };
    let rcode = ResponseCode::from_code(lo & 0x0F);
    let qd = r.u16()?;
    let an = r.u16()? as usize;
    let ns = r.u16()? as usize;
    let ar = r.u16()? as usize;
    if qd > 1 {
        return Err(WireError::Unsupported(format!("{qd} questions")));
    }
    let question = if qd == 1 {
        let name = r.name()?;
        let rtype = RecordType::from_code(r.u16()?);
        let class = r.u16()?;
        if class != 1 {
            return Err(WireError::Unsupported(format!("class {class}")));
        }
        Some(Question::new(name, rtype))
    } else {
        None
    };
    let mut read_section =
        |n: usize| -> Result<Vec<ResourceRecord>, WireError> { (0..n).map(|_| decode_record(&mut r)).collect() };
    let answer = read_section(an)?;
    let authority = read_section(ns)?;
    let additional = read_section(ar)?;
    if r.remaining() != 0 {
        return Err(WireError::TrailingData(r.remaining()));
    }
    Ok(DnsMessage {
        id,
        flags,
        rcode,
        question,
        answer,
        authority,
        additional,
    })
}

impl fmt::Display for DnsMessage {
    /// dig-style rendering.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut flags = Vec::new();
        if self.flags.response {
            flags.push("qr");
        }
        if self.flags.authoritative {
            flags.push("aa");
        }
        if self.flags.recursion_desired {
            flags.push("rd");
        }
        if self.flags.recursion_available {
            flags.push("ra");
        }
        if self.flags.authenticated {
            flags.push("ad");
        }
        writeln!(
            f,
            ";; id: {}, status: {}, flags: {}",
            self.id,
            self.rcode,
            flags.join(" ")
        )?;
        writeln!(f, ";; Question")?;
        if let Some(q) = &self.question {
            writeln!(f, "{} IN {}", q.name, q.rtype)?;
        }
        for (title, section) in [
            ("Answer", &self.answer),
            ("Authority", &self.authority),
            ("Additional", &self.additional),
        ] {
            writeln!(f)?;
            writeln!(f, ";; {title}")?;
            if section.is_empty() {
                writeln!(f, ";; (empty)")?;
            }
            for rr in section {
                writeln!(f, "{rr}")?;
            }
        }
        Ok(())
    }
}
