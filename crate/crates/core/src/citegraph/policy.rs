use std::collections::HashSet;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::{Bibcode, Corpus, RecordKind};
use crate::resolver::ResolvedReference;

pub const DEFAULT_STALENESS_DAYS: i64 = 365;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyConfig {
    /// Unlinked e-prints strictly older than this many days lose their references.
    pub staleness_days: i64,
    pub as_of: NaiveDate,
}

impl PolicyConfig {
    /// Panics if `staleness_days` is not positive.
    pub fn new(as_of: NaiveDate, staleness_days: i64) -> Self {
        assert!(staleness_days > 0, "staleness_days must be positive");
        PolicyConfig { staleness_days, as_of }
    }

    pub fn with_default_staleness(as_of: NaiveDate) -> Self {
        Self::new(as_of, DEFAULT_STALENESS_DAYS)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyRule {
    /// The published version has its own references; the e-print's are dropped.
    SupersededByPublished,
    /// The published version has no references; the e-print's move to it.
    ReattributedToPublished,
    /// Re-attribution would make the published paper cite itself.
    ReattributionSelfLoop,
    /// Re-attribution duplicates a pair the published paper already has.
    ReattributionDuplicate,
    /// Unpublished e-print older than the staleness window.
    StaleEprint,
}

impl PolicyRule {
    pub fn as_str(self) -> &'static str {
        match self {
            PolicyRule::SupersededByPublished => "superseded-by-published",
            PolicyRule::ReattributedToPublished => "reattributed-to-published",
            PolicyRule::ReattributionSelfLoop => "reattribution-self-loop",
            PolicyRule::ReattributionDuplicate => "reattribution-duplicate",
            PolicyRule::StaleEprint => "stale-eprint",
        }
    }
}

/// One drop or re-attribution, for the audit log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyAction {
    pub rule: PolicyRule,
    pub citing: Bibcode,
    pub cited: Bibcode,
    /// New citing record for re-attributions.
    pub attributed_to: Option<Bibcode>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolicyOutcome {
    pub kept: Vec<ResolvedReference>,
    pub actions: Vec<PolicyAction>,
}

/// Applies the e-print rules to a resolved table.
///
/// For an e-print linked to a published record P: if P cites anything in
/// `resolved`, the e-print's pairs are dropped; otherwise they are moved to
/// P, skipping self-loops and pairs P already has. An unlinked e-print's
/// pairs are dropped once `as_of - ingest_date` exceeds the staleness window.
/// Every other pair passes through unchanged, in input order.
pub fn apply_eprint_policy(resolved: &[ResolvedReference], store: &Corpus, policy: &PolicyConfig) -> PolicyOutcome {
    let has_references: HashSet<&Bibcode> = resolved.iter().map(|r| &r.citing).collect();
    let mut present: HashSet<(Bibcode, Bibcode)> = resolved.iter().map(|r| (r.citing.clone(), r.cited.clone())).collect();
    let mut out = PolicyOutcome::default();

    for pair in resolved {
        let Some(rec) = store.find_by_bibcode(&pair.citing).filter(|r| r.kind == RecordKind::Eprint) else {
            out.kept.push(pair.clone());
            continue;
        };
        let action = |rule, attributed_to| PolicyAction { rule, citing: pair.citing.clone(), cited: pair.cited.clone(), attributed_to };
        match store.link_for(&rec.bibcode) {
            Some(link) if has_references.contains(&link.published) => {
                out.actions.push(action(PolicyRule::SupersededByPublished, None));
            }
            Some(link) => {
                let published = &link.published;
                if pair.cited == *published {
                    out.actions.push(action(PolicyRule::ReattributionSelfLoop, Some(published.clone())));
                } else if !present.insert((published.clone(), pair.cited.clone())) {
                    out.actions.push(action(PolicyRule::ReattributionDuplicate, Some(published.clone())));
                } else {
                    out.actions.push(action(PolicyRule::ReattributedToPublished, Some(published.clone())));
                    let mut moved = pair.clone();
                    moved.citing = published.clone();
                    moved.provenance = Some(format!("{} from {}", PolicyRule::ReattributedToPublished.as_str(), pair.citing));
                    out.kept.push(moved);
                }
            }
            None => {
                let age = (policy.as_of - rec.ingest_date).num_days();
                if age > policy.staleness_days {
                    out.actions.push(action(PolicyRule::StaleEprint, None));
                } else {
                    out.kept.push(pair.clone());
                }
            }
        }
    }
    for a in &out.actions {
        log::debug!("{}: {} -> {}", a.rule.as_str(), a.citing, a.cited);
    }
    out
}
