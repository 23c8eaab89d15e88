//! Query oracles over honest signed zones.

use std::collections::BTreeSet;

use crate::authority::answer;
use crate::message::DnsMessage;
use crate::name::DomainName;
use crate::rr::{RecordType, ResourceRecord};
use crate::zone::Zone;

/// Something that answers questions the way the zone's real servers do.
pub trait QueryOracle {
    fn query(&mut self, qname: &DomainName, qtype: RecordType) -> Result<DnsMessage, String>;
}

impl<F> QueryOracle for F
where
    F: FnMut(&DomainName, RecordType) -> Result<DnsMessage, String>,
{
    fn query(&mut self, qname: &DomainName, qtype: RecordType) -> Result<DnsMessage, String> {
        self(qname, qtype)
    }
}

/// Answers from one zone and remembers every signature it hands out.
#[derive(Debug, Clone)]
pub struct ZoneOracle<'a> {
    zone: &'a Zone,
    served: BTreeSet<ResourceRecord>,
    pub queries: usize,
}

impl<'a> ZoneOracle<'a> {
    pub fn new(zone: &'a Zone) -> Self {
        ZoneOracle {
            zone,
            served: BTreeSet::new(),
            queries: 0,
        }
    }

    /// RRSIG records returned so far.
    pub fn served_signatures(&self) -> &BTreeSet<ResourceRecord> {
        &self.served
    }

    /// True when every RRSIG in `msg` is octet-identical to one served.
    pub fn harvested(&self, msg: &DnsMessage) -> bool {
        msg.sections().filter(|rr| rr.rtype() == RecordType::RRSIG).all(|rr| {
            self.served.iter().any(|s| {
                s.owner == rr.owner && s.ttl == rr.ttl && s.rdata.canonical_wire() == rr.rdata.canonical_wire()
            })
        })
    }
}

impl QueryOracle for ZoneOracle<'_> {
    fn query(&mut self, qname: &DomainName, qtype: RecordType) -> Result<DnsMessage, String> {
        self.queries += 1;
        let resp = answer(self.zone, qname, qtype);
        self.served
            .extend(resp.sections().filter(|rr| rr.rtype() == RecordType::RRSIG).cloned());
        Ok(resp)
    }
}
