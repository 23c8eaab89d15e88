//! Deterministic resolver simulation: servers, bailiwick policies, a
//! trust-ranked cache, adversaries and scenario verdicts.

pub mod adversary;
pub mod cache;
pub mod policy;
pub mod resolver;
pub mod scenario;
pub mod trace;
pub mod world;

pub use adversary::{
    adversary_forge, kaminsky_closed_form, kaminsky_success_rate, Adversary, AdversaryKind, Payload, Trigger,
};
pub use cache::{Cache, CacheEntry, TrustRank};
pub use policy::{apply_bailiwick_policy, BailiwickPolicy, PolicyError, SanitizedResponse};
pub use resolver::{Outcome, Resolver, ResolverConfig, ZoneSecurity, DEFAULT_STEP_BUDGET};
pub use scenario::{run_scenario, Scenario, ScenarioError, ScenarioFile, Verdict};
pub use trace::{GlueAction, ResolutionTrace, TraceEvent};
pub use world::{complete_corpus, AddressBook, Network, RogueMode, RogueServer};
