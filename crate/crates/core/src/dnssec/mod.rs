//! DNSSEC signing and validation: keys, RRSIGs, DS links, NSEC3 denial.

pub mod chain;
pub mod denial;
pub mod keys;
pub mod nsec3;
pub mod referral;
pub mod scheme;
pub mod sign;
pub mod verify;

pub use chain::{build_trust_chain, ChainLink, StaticFetcher, TrustAnchor, TrustChain, ZoneFetcher};
pub use denial::{verify_nsec3_denial, DenialVerdict, ProofKind};
pub use keys::{key_tag, KeyFile, KeyPair, KeyRole};
pub use nsec3::{nsec3_hash, nsec3_hash_text, Nsec3Error, Nsec3Params, Nsec3Record};
pub use referral::{
    check_referral_security, ns_sets_consistent, verify_dnskey_response, KeyAuthority, ReferralSecurity,
};
pub use scheme::{scheme_for, scheme_sign, scheme_verify, SignatureScheme, ToyScheme, UnknownScheme, TOY_ALGORITHM};
pub use sign::{
    sign_corpus, sign_corpus_with, sign_rrset, sign_zone, SignError, SignedZone, SigningOptions, DEFAULT_CLOCK,
    DEFAULT_SIG_LIFETIME,
};
pub use verify::{ds_matches, make_ds, verify_rrset, verify_rrsig, BogusReason, ValidationResult};
