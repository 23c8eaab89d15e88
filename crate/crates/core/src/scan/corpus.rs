//! Corpora with per-zone signing status, and the signing manifest.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::dnssec::{sign_corpus_with, SignError, SignedZone, SigningOptions};
use crate::name::DomainName;
use crate::zone::Corpus;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read manifest {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid manifest: {0}")]
    Json(#[from] serde_json::Error),
    #[error("manifest names {0}, which is not in the corpus")]
    UnknownZone(String),
    #[error("manifest names an invalid domain {0:?}")]
    BadName(String),
    #[error(transparent)]
    Sign(#[from] SignError),
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoneSigning {
    #[serde(default)]
    pub signed: bool,
    #[serde(default = "default_true")]
    pub opt_out: bool,
}

/// Which zones are signed (and how), plus the domains under investigation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigningManifest {
    #[serde(default)]
    pub key_seed: u64,
    #[serde(default)]
    pub zones: BTreeMap<String, ZoneSigning>,
    /// Defaults to every zone at least two labels deep.
    #[serde(default)]
    pub domains: Option<Vec<String>>,
}

impl SigningManifest {
    pub fn load(path: &Path) -> Result<SigningManifest, ManifestError> {
        let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn parse_name(text: &str) -> Result<DomainName, ManifestError> {
    DomainName::parse_relative(text, &DomainName::root()).map_err(|_| ManifestError::BadName(text.to_string()))
}

/// A served corpus together with the signing view of its signed zones.
#[derive(Debug, Clone, Default)]
pub struct SignedCorpus {
    pub corpus: Corpus,
    pub signed: BTreeMap<DomainName, SignedZone>,
    pub domains: Vec<DomainName>,
}

impl SignedCorpus {
    /// Takes zones that already carry DNSSEC material as signed.
    pub fn from_served(corpus: Corpus) -> SignedCorpus {
        let signed = corpus
            .zones()
            .filter_map(|z| SignedZone::from_zone(z).map(|s| (z.apex().clone(), s)))
            .collect();
        let domains = default_domains(&corpus);
        SignedCorpus {
            corpus,
            signed,
            domains,
        }
    }

    /// Signs the zones the manifest marks as signed.
    pub fn from_manifest(corpus: &Corpus, manifest: &SigningManifest) -> Result<SignedCorpus, ManifestError> {
        let mut opts = BTreeMap::new();
        for (zone, signing) in &manifest.zones {
            let apex = parse_name(zone)?;
            if corpus.get(&apex).is_none() {
                return Err(ManifestError::UnknownZone(zone.clone()));
            }
            if signing.signed {
                opts.insert(
                    apex,
                    SigningOptions {
                        opt_out: signing.opt_out,
                        ..SigningOptions::default()
                    },
                );
            }
        }
        let (served, signed) = sign_corpus_with(corpus, &opts, manifest.key_seed)?;
        let domains = match &manifest.domains {
            Some(list) => {
                let mut out = Vec::new();
                for d in list {
                    let apex = parse_name(d)?;
                    if corpus.get(&apex).is_none() && corpus.delegating_zone(&apex).is_none() {
                        return Err(ManifestError::UnknownZone(d.clone()));
                    }
                    out.push(apex);
                }
                out.sort();
                out.dedup();
                out
            }
            None => default_domains(corpus),
        };
        Ok(SignedCorpus {
            corpus: served,
            signed,
            domains,
        })
    }

    pub fn is_signed(&self, apex: &DomainName) -> bool {
        self.signed.contains_key(apex)
    }
}

fn default_domains(corpus: &Corpus) -> Vec<DomainName> {
    corpus
        .zones()
        .map(|z| z.apex().clone())
        .filter(|a| a.label_count() >= 2)
        .collect()
}
