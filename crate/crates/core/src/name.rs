//! Domain names with case-insensitive comparison and DNSSEC canonical ordering.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Longest permitted label, in octets.
pub const MAX_LABEL_LEN: usize = 63;
/// Longest permitted presentation form, without the trailing dot.
pub const MAX_NAME_LEN: usize = 253;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("empty label in `{0}`")]
    EmptyLabel(String),
    #[error("label longer than 63 octets in `{0}`")]
    LabelTooLong(String),
    #[error("name longer than 253 octets: `{0}`")]
    NameTooLong(String),
    #[error("unsupported character {1:?} in `{0}`")]
    BadCharacter(String, char),
}

/// An absolute domain name stored as a list of labels, leftmost first.
///
/// The root name has no labels. Labels keep the case they were written with;
/// equality, hashing and ordering fold ASCII letters.
#[derive(Clone, Default)]
pub struct DomainName {
    labels: Vec<Vec<u8>>,
}

impl DomainName {
    pub fn root() -> Self {
        DomainName { labels: Vec::new() }
    }

    /// Builds a name from raw labels, leftmost first.
    pub fn from_labels<I, L>(labels: I) -> Result<Self, NameError>
    where
        I: IntoIterator<Item = L>,
        L: AsRef<[u8]>,
    {
        let labels: Vec<Vec<u8>> = labels.into_iter().map(|l| l.as_ref().to_vec()).collect();
        let name = DomainName { labels };
        name.validate()?;
        Ok(name)
    }

    fn validate(&self) -> Result<(), NameError> {
        for label in &self.labels {
            if label.is_empty() {
                return Err(NameError::EmptyLabel(self.to_string()));
            }
            if label.len() > MAX_LABEL_LEN {
                return Err(NameError::LabelTooLong(self.to_string()));
            }
        }
        if self.presentation_len() > MAX_NAME_LEN {
            return Err(NameError::NameTooLong(self.to_string()));
        }
        Ok(())
    }

    fn presentation_len(&self) -> usize {
        if self.labels.is_empty() {
            return 0;
        }
        self.labels.iter().map(|l| l.len()).sum::<usize>() + self.labels.len() - 1
    }

    pub fn labels(&self) -> &[Vec<u8>] {
        &self.labels
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    pub fn is_root(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_wildcard(&self) -> bool {
        self.labels.first().is_some_and(|l| l.as_slice() == b"*")
    }

    /// True iff `ancestor`'s labels are a suffix of this name's labels.
    pub fn is_subdomain_of(&self, ancestor: &DomainName) -> bool {
        let n = ancestor.labels.len();
        if n > self.labels.len() {
            return false;
        }
        let offset = self.labels.len() - n;
        self.labels[offset..]
            .iter()
            .zip(&ancestor.labels)
            .all(|(a, b)| a.eq_ignore_ascii_case(b))
    }

    /// Strict version of [`is_subdomain_of`](Self::is_subdomain_of).
    pub fn is_strict_subdomain_of(&self, ancestor: &DomainName) -> bool {
        self.labels.len() > ancestor.labels.len() && self.is_subdomain_of(ancestor)
    }

    /// The name with its leftmost label removed; `None` for the root.
    pub fn parent(&self) -> Option<DomainName> {
        if self.labels.is_empty() {
            None
        } else {
            Some(DomainName {
                labels: self.labels[1..].to_vec(),
            })
        }
    }

    /// The ancestor of this name that has exactly `count` labels.
    pub fn ancestor_with_labels(&self, count: usize) -> Option<DomainName> {
        if count > self.labels.len() {
            return None;
        }
        Some(DomainName {
            labels: self.labels[self.labels.len() - count..].to_vec(),
        })
    }

    /// Iterates over this name and all its ancestors, deepest first, ending at the root.
    pub fn ancestors(&self) -> impl Iterator<Item = DomainName> + '_ {
        (0..=self.labels.len()).map(move |skip| DomainName {
            labels: self.labels[skip..].to_vec(),
        })
    }

    /// Prepends a single label.
    pub fn prepend(&self, label: &[u8]) -> Result<DomainName, NameError> {
        let mut labels = Vec::with_capacity(self.labels.len() + 1);
        labels.push(label.to_vec());
        labels.extend(self.labels.iter().cloned());
        DomainName::from_labels(labels)
    }

    /// Appends `origin` to this (relative) name.
    pub fn concat(&self, origin: &DomainName) -> Result<DomainName, NameError> {
        let labels = self.labels.iter().chain(origin.labels.iter()).cloned();
        DomainName::from_labels(labels)
    }

    pub fn wildcard_child(&self) -> DomainName {
        self.prepend(b"*")
            .expect("wildcard of a valid name fits unless at the length limit")
    }

    /// The same name with every label folded to lowercase.
    pub fn to_lowercase(&self) -> DomainName {
        DomainName {
            labels: self.labels.iter().map(|l| l.to_ascii_lowercase()).collect(),
        }
    }

    /// Uncompressed wire form with labels lowercased, as used for hashing and signing.
    pub fn canonical_wire(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.presentation_len() + 2);
        for label in &self.labels {
            out.push(label.len() as u8);
            out.extend(label.iter().map(|b| b.to_ascii_lowercase()));
        }
        out.push(0);
        out
    }

    /// Uncompressed wire form preserving case.
    pub fn wire(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.presentation_len() + 2);
        for label in &self.labels {
            out.push(label.len() as u8);
            out.extend_from_slice(label);
        }
        out.push(0);
        out
    }

    /// Parses a name relative to `origin`. Names ending with `.` are absolute,
    /// `@` stands for the origin itself.
    pub fn parse_relative(text: &str, origin: &DomainName) -> Result<DomainName, NameError> {
        if text == "@" {
            return Ok(origin.clone());
        }
        if text == "." {
            return Ok(DomainName::root());
        }
        if let Some(abs) = text.strip_suffix('.') {
            return parse_labels(abs, text);
        }
        parse_labels(text, text)?.concat(origin)
    }
}

fn parse_labels(body: &str, whole: &str) -> Result<DomainName, NameError> {
    if body.is_empty() {
        return Ok(DomainName::root());
    }
    let mut labels = Vec::new();
    for label in body.split('.') {
        if label.is_empty() {
            return Err(NameError::EmptyLabel(whole.to_string()));
        }
        if let Some(c) = label.chars().find(|c| !(c.is_ascii_graphic()) || *c == '\\') {
            return Err(NameError::BadCharacter(whole.to_string(), c));
        }
        labels.push(label.as_bytes().to_vec());
    }
    DomainName::from_labels(labels)
}

/// Compares two names in DNSSEC canonical order: label sequences are compared
/// right to left, each label as a lowercased octet string.
pub fn compare_canonical(a: &DomainName, b: &DomainName) -> Ordering {
    let mut ai = a.labels.iter().rev();
    let mut bi = b.labels.iter().rev();
    loop {
        match (ai.next(), bi.next()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) => {
                let ord = x
                    .iter()
                    .map(u8::to_ascii_lowercase)
                    .cmp(y.iter().map(u8::to_ascii_lowercase));
                if ord != Ordering::Equal {
                    return ord;
                }
            }
        }
    }
}

impl PartialEq for DomainName {
    fn eq(&self, other: &Self) -> bool {
        self.labels.len() == other.labels.len()
            && self
                .labels
                .iter()
                .zip(&other.labels)
                .all(|(a, b)| a.eq_ignore_ascii_case(b))
    }
}

impl Eq for DomainName {}

impl Hash for DomainName {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_usize(self.labels.len());
        for label in &self.labels {
            state.write_usize(label.len());
            for b in label {
                state.write_u8(b.to_ascii_lowercase());
            }
        }
    }
}

impl Ord for DomainName {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_canonical(self, other)
    }
}

impl PartialOrd for DomainName {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DomainName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.labels.is_empty() {
            return f.write_str(".");
        }
        for label in &self.labels {
            for &b in label {
                if b.is_ascii_graphic() && b != b'.' && b != b'\\' {
                    write!(f, "{}", b as char)?;
                } else {
                    write!(f, "\\{:03}", b)?;
                }
            }
            f.write_str(".")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DomainName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DomainName({self})")
    }
}

impl FromStr for DomainName {
    type Err = NameError;

    /// Parses an absolute name; the trailing dot is optional.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "." {
            return Ok(DomainName::root());
        }
        parse_labels(s.strip_suffix('.').unwrap_or(s), s)
    }
}

impl Serialize for DomainName {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DomainName {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand used throughout tests and fixtures. Panics on malformed input.
pub fn name(s: &str) -> DomainName {
    s.parse().unwrap_or_else(|e| panic!("invalid domain name {s:?}: {e}"))
}
