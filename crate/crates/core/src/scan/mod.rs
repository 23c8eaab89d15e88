//! Opt-Out transformations, glue tamper analysis and the glue audit.

pub mod audit;
pub mod convert;
pub mod corpus;
pub mod forge;
pub mod oracle;
pub mod tamper;

pub use audit::{aggregate, audit_corpus, AuditReport, DomainRow, GlueStatus, GlueType, TypeStatusTable};
pub use convert::{check_convertibility, ConvertError, ConvertVerdict, Convertibility};
pub use corpus::{ManifestError, SignedCorpus, SigningManifest, ZoneSigning};
pub use forge::{
    forge_delegation_to_nxdomain, forge_nxdomain_to_delegation, forge_positive_to_delegation, ForgeContext, ForgeError,
    RogueDelegation,
};
pub use oracle::{QueryOracle, ZoneOracle};
pub use tamper::{
    analyze_glue_tamper_resistance, analyze_glue_tamper_resistance_for, assess_forgeability, classify_glue_security,
    Forgeability, GlueSecurityClass, TamperResistance, TamperVerdict, VulnerabilityReason,
};
