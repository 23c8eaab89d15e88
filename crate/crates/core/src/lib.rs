//! DNS glue analysis, bailiwick-checking resolver simulation and NSEC3
//! Opt-Out response forgery.

pub mod authority;
pub mod cli;
pub mod dnssec;
pub mod glue;
pub mod master;
pub mod message;
pub mod name;
pub mod rr;
pub mod scan;
pub mod sim;
pub mod wire;
pub mod zone;

pub use master::{parse_master_file, parse_zone_text, serialize_zone, MasterError};
pub use message::{decode_message, encode_message, DnsMessage, Flags, Question, ResponseCode};
pub use name::{compare_canonical, name, DomainName};
pub use rr::{RData, RecordType, ResourceRecord};
pub use zone::{enclosing_zone, Corpus, RecordClass, Zone};
