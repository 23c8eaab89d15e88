//! Master-file (RFC 1035 presentation format) parsing and serialization.

use std::fmt;

use crate::name::DomainName;
use crate::rr::{RData, RecordType, ResourceRecord};
use crate::zone::Zone;

pub const DEFAULT_TTL: u32 = 3600;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MasterErrorKind {
    Syntax(String),
    UnknownType(String),
    BadName(String),
    OutOfZone(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MasterError {
    pub line: usize,
    pub kind: MasterErrorKind,
}

impl fmt::Display for MasterErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MasterErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            MasterErrorKind::UnknownType(t) => write!(f, "unknown record type `{t}`"),
            MasterErrorKind::BadName(m) | MasterErrorKind::OutOfZone(m) => write!(f, "{m}"),
        }
    }
}

impl fmt::Display for MasterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.kind)
    }
}

impl std::error::Error for MasterError {}

/// One logical entry: tokens plus the line it started on and whether the
/// first physical line began with whitespace (owner omitted).
struct Entry {
    line: usize,
    inherits_owner: bool,
    tokens: Vec<String>,
}

fn tokenize(text: &str) -> Result<Vec<Entry>, MasterError> {
    let mut entries = Vec::new();
    let mut current: Option<Entry> = None;
    let mut depth = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let mut tokens = Vec::new();
        let mut tok = String::new();
        let mut in_quote = false;
        for c in raw.chars() {
            if in_quote {
                tok.push(c);
                if c == '"' {
                    in_quote = false;
                    tokens.push(std::mem::take(&mut tok));
                }
                continue;
            }
            match c {
                ';' => break,
                '"' => {
                    if !tok.is_empty() {
                        tokens.push(std::mem::take(&mut tok));
                    }
                    tok.push(c);
                    in_quote = true;
                }
                '(' => {
                    if !tok.is_empty() {
                        tokens.push(std::mem::take(&mut tok));
                    }
                    depth += 1;
                }
                ')' => {
                    if !tok.is_empty() {
                        tokens.push(std::mem::take(&mut tok));
                    }
                    if depth == 0 {
                        return Err(syntax(line_no, "unbalanced `)`"));
                    }
                    depth -= 1;
                }
                c if c.is_whitespace() => {
                    if !tok.is_empty() {
                        tokens.push(std::mem::take(&mut tok));
                    }
                }
                c => tok.push(c),
            }
        }
        if in_quote {
            return Err(syntax(line_no, "unterminated quoted string"));
        }
        if !tok.is_empty() {
            tokens.push(tok);
        }
        match current.as_mut() {
            Some(entry) => entry.tokens.extend(tokens),
            None => {
                if !tokens.is_empty() {
                    current = Some(Entry {
                        line: line_no,
                        inherits_owner: raw.starts_with(|c: char| c.is_whitespace()),
                        tokens,
                    });
                }
            }
        }
        if depth == 0 {
            if let Some(entry) = current.take() {
                entries.push(entry);
            }
        }
    }
    if depth != 0 {
        let line = current.as_ref().map_or(0, |e| e.line);
        return Err(syntax(line, "unbalanced `(`"));
    }
    Ok(entries)
}

fn syntax(line: usize, msg: &str) -> MasterError {
    MasterError {
        line,
        kind: MasterErrorKind::Syntax(msg.to_string()),
    }
}

fn looks_like_ttl(t: &str) -> bool {
    !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
}

struct ParseState {
    origin: DomainName,
    default_ttl: u32,
    last_owner: Option<DomainName>,
}

/// Parses the records of a master file, returning each with its line number.
fn parse_entries(
    text: &str,
    origin: &DomainName,
    default_ttl: u32,
) -> Result<Vec<(usize, ResourceRecord)>, MasterError> {
    let mut st = ParseState {
        origin: origin.clone(),
        default_ttl,
        last_owner: None,
    };
    let mut out = Vec::new();
    for entry in tokenize(text)? {
        let line = entry.line;
        let first = entry.tokens[0].as_str();
        if first.starts_with('$') && !entry.inherits_owner {
            match first.to_ascii_uppercase().as_str() {
                "$ORIGIN" => {
                    let arg = entry
                        .tokens
                        .get(1)
                        .ok_or_else(|| syntax(line, "$ORIGIN needs a name"))?;
                    st.origin = DomainName::parse_relative(arg, &st.origin).map_err(|e| MasterError {
                        line,
                        kind: MasterErrorKind::BadName(e.to_string()),
                    })?;
                }
                "$TTL" => {
                    let arg = entry.tokens.get(1).ok_or_else(|| syntax(line, "$TTL needs a value"))?;
                    st.default_ttl = arg.parse().map_err(|_| syntax(line, "bad $TTL value"))?;
                }
                other => return Err(syntax(line, &format!("unsupported directive {other}"))),
            }
            continue;
        }
        out.push((line, parse_entry(&entry, &mut st)?));
    }
    Ok(out)
}

fn parse_entry(entry: &Entry, st: &mut ParseState) -> Result<ResourceRecord, MasterError> {
    let line = entry.line;
    let mut toks = entry.tokens.iter().map(String::as_str).peekable();
    let owner = if entry.inherits_owner {
        st.last_owner
            .clone()
            .ok_or_else(|| syntax(line, "no previous owner to inherit"))?
    } else {
        let t = toks.next().expect("entries are non-empty");
        DomainName::parse_relative(t, &st.origin).map_err(|e| MasterError {
            line,
            kind: MasterErrorKind::BadName(e.to_string()),
        })?
    };
    let mut ttl = None;
    loop {
        match toks.peek() {
            Some(t) if looks_like_ttl(t) && ttl.is_none() => {
                ttl = Some(t.parse::<u32>().map_err(|_| syntax(line, "TTL out of range"))?);
                toks.next();
            }
            Some(t) if t.eq_ignore_ascii_case("IN") => {
                toks.next();
            }
            Some(t) if ["CH", "HS", "CS"].iter().any(|c| t.eq_ignore_ascii_case(c)) => {
                return Err(syntax(line, "only class IN is supported"));
            }
            _ => break,
        }
    }
    let type_tok = toks.next().ok_or_else(|| syntax(line, "missing record type"))?;
    let rtype: RecordType = type_tok.parse().map_err(|_| MasterError {
        line,
        kind: MasterErrorKind::UnknownType(type_tok.to_string()),
    })?;
    let rest: Vec<String> = toks.map(String::from).collect();
    let rdata = RData::parse(rtype, &rest, &st.origin).map_err(|m| {
        if m.contains("label") || m.contains("name longer") {
            MasterError {
                line,
                kind: MasterErrorKind::BadName(m),
            }
        } else {
            syntax(line, &m)
        }
    })?;
    st.last_owner = Some(owner.clone());
    Ok(ResourceRecord::new(owner, ttl.unwrap_or(st.default_ttl), rdata))
}

/// Parses a master file into a zone rooted at `origin`.
pub fn parse_master_file(text: &str, origin: &DomainName, default_ttl: u32) -> Result<Zone, MasterError> {
    let entries = parse_entries(text, origin, default_ttl)?;
    let mut records = Vec::with_capacity(entries.len());
    for (line, rr) in entries {
        if !rr.owner.is_subdomain_of(origin) && !rr.rtype().is_address() {
            return Err(MasterError {
                line,
                kind: MasterErrorKind::OutOfZone(format!("owner {} is outside zone {origin}", rr.owner)),
            });
        }
        records.push(rr);
    }
    Ok(Zone::new(origin.clone(), records).expect("records checked against apex"))
}

/// Parses a zone file whose apex is given by its first `$ORIGIN` directive.
pub fn parse_zone_text(text: &str) -> Result<Zone, MasterError> {
    let entries = tokenize(text)?;
    let first = entries
        .first()
        .ok_or_else(|| syntax(1, "empty zone file has no $ORIGIN"))?;
    if !first.tokens[0].eq_ignore_ascii_case("$ORIGIN") {
        return Err(syntax(first.line, "zone file must start with $ORIGIN"));
    }
    let arg = first
        .tokens
        .get(1)
        .ok_or_else(|| syntax(first.line, "$ORIGIN needs a name"))?;
    let origin: DomainName = DomainName::parse_relative(arg, &DomainName::root()).map_err(|e| MasterError {
        line: first.line,
        kind: MasterErrorKind::BadName(e.to_string()),
    })?;
    parse_master_file(text, &origin, DEFAULT_TTL)
}

/// Parses loose records (no zone constraint), e.g. a message section.
pub fn parse_records(text: &str, origin: &DomainName) -> Result<Vec<ResourceRecord>, MasterError> {
    Ok(parse_entries(text, origin, DEFAULT_TTL)?
        .into_iter()
        .map(|(_, rr)| rr)
        .collect())
}

/// Parses a single record in presentation form.
pub fn parse_record_line(text: &str, origin: &DomainName) -> Result<ResourceRecord, MasterError> {
    let mut recs = parse_records(text, origin)?;
    match recs.len() {
        1 => Ok(recs.remove(0)),
        n => Err(syntax(1, &format!("expected one record, found {n}"))),
    }
}

/// A master-file error tied to the file it came from.
#[derive(Debug)]
pub enum FileError {
    Io(std::path::PathBuf, std::io::Error),
    Parse(std::path::PathBuf, MasterError),
    Corpus(crate::zone::ZoneError),
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FileError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            FileError::Parse(p, e) => write!(f, "{}:{}: {}", p.display(), e.line, e.kind),
            FileError::Corpus(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for FileError {}

pub fn read_zone_file(path: &std::path::Path) -> Result<Zone, FileError> {
    let text = std::fs::read_to_string(path).map_err(|e| FileError::Io(path.to_path_buf(), e))?;
    parse_zone_text(&text).map_err(|e| FileError::Parse(path.to_path_buf(), e))
}

pub fn read_corpus<P: AsRef<std::path::Path>>(paths: &[P]) -> Result<crate::zone::Corpus, FileError> {
    let zones = paths
        .iter()
        .map(|p| read_zone_file(p.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    crate::zone::Corpus::new(zones).map_err(FileError::Corpus)
}

/// Renders a zone with absolute names, one record per line.
pub fn serialize_zone(zone: &Zone) -> String {
    let mut out = format!("$ORIGIN {}\n", zone.apex());
    for rr in zone.records() {
        out.push_str(&rr.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::name;
    use crate::rr::RData;
    use std::net::Ipv4Addr;

    const SAMPLE_COM: &str = "$ORIGIN com.
foo NS ns.foo
foo NS ns.foo.foo
foo NS ns.foo.net.
foo NS ns.bar
ns.foo A 192.0.1.1
ns.foo.foo A 192.0.2.2
ns.foo.net. A 192.0.2.2
ns.bar A 192.0.3.3
bar NS ns.foo.net.
";

    #[test]
    fn sample_com_parses() {
        let z = parse_master_file(SAMPLE_COM, &name("com"), DEFAULT_TTL).unwrap();
        assert_eq!(z.len(), 9);
        let r5 = &z.records()[4];
        assert_eq!(r5.owner, name("ns.foo.com"));
        assert_eq!(r5.rdata, RData::A(Ipv4Addr::new(192, 0, 1, 1)));
        assert_eq!(r5.ttl, 3600);
    }

    #[test]
    fn empty_input() {
        let z = parse_master_file("", &name("com"), DEFAULT_TTL).unwrap();
        assert_eq!(z.len(), 0);
        assert_eq!(z.apex(), &name("com"));
    }

    #[test]
    fn at_sign_and_owner_inheritance() {
        let text = "$ORIGIN foo.com.\n@ NS ns\n    NS ns.foo\nns 60 IN A 192.0.1.1\n";
        let z = parse_master_file(text, &name("foo.com"), DEFAULT_TTL).unwrap();
        assert_eq!(z.records()[0].owner, name("foo.com"));
        assert_eq!(z.records()[1].owner, name("foo.com"));
        assert_eq!(z.records()[2].ttl, 60);
    }

    #[test]
    fn parenthesized_entries() {
        let text = "$ORIGIN example.\n@ SOA ns1 bugs.x.w ( 1 3600 300\n 3600000 3600 ) ; trailing\n";
        let z = parse_master_file(text, &name("example"), DEFAULT_TTL).unwrap();
        assert_eq!(z.len(), 1);
        assert!(z.soa().is_some());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_master_file("$ORIGIN com.\nfoo NS ns\nfoo BOGUS x\n", &name("com"), DEFAULT_TTL).unwrap_err();
        assert_eq!(err.line, 3);
        assert!(matches!(err.kind, MasterErrorKind::UnknownType(_)));

        let long = "a".repeat(64);
        let err = parse_master_file(&format!("{long} A 192.0.2.1\n"), &name("com"), DEFAULT_TTL).unwrap_err();
        assert_eq!(err.line, 1);
        assert!(matches!(err.kind, MasterErrorKind::BadName(_)));

        let err = parse_master_file("foo A 999.0.0.1\n", &name("com"), DEFAULT_TTL).unwrap_err();
        assert!(matches!(err.kind, MasterErrorKind::Syntax(_)));
    }

    #[test]
    fn ttl_directive() {
        let z = parse_master_file("$TTL 300\nfoo A 192.0.2.1\n", &name("com"), DEFAULT_TTL).unwrap();
        assert_eq!(z.records()[0].ttl, 300);
    }

    #[test]
    fn serialize_roundtrip() {
        let z = parse_master_file(SAMPLE_COM, &name("com"), DEFAULT_TTL).unwrap();
        let text = serialize_zone(&z);
        let again = parse_zone_text(&text).unwrap();
        assert_eq!(again, z);
    }
}
