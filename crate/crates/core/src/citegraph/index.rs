use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;

use super::policy::{apply_eprint_policy, PolicyAction, PolicyConfig};
use crate::corpus::{Bibcode, Corpus};
use crate::resolver::ResolvedReference;

static EMPTY: BTreeSet<Bibcode> = BTreeSet::new();

/// "B is cited by A" and its dual "A cites B". Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitationIndex {
    cited_to_citing: BTreeMap<Bibcode, BTreeSet<Bibcode>>,
    citing_to_cited: BTreeMap<Bibcode, BTreeSet<Bibcode>>,
    build_date: NaiveDate,
    policy: PolicyConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexBuild {
    pub index: CitationIndex,
    pub actions: Vec<PolicyAction>,
    /// Pairs that survived the policy, before deduplication.
    pub surviving: Vec<ResolvedReference>,
}

impl CitationIndex {
    /// Builds an index from (citing, cited) pairs; self-loops and repeats are ignored.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a Bibcode, &'a Bibcode)>, policy: PolicyConfig) -> Self {
        let mut idx =
            CitationIndex { cited_to_citing: BTreeMap::new(), citing_to_cited: BTreeMap::new(), build_date: policy.as_of, policy };
        for (citing, cited) in pairs {
            if citing == cited {
                continue;
            }
            idx.cited_to_citing.entry(cited.clone()).or_default().insert(citing.clone());
            idx.citing_to_cited.entry(citing.clone()).or_default().insert(cited.clone());
        }
        idx
    }

    pub fn empty(policy: PolicyConfig) -> Self {
        Self::from_pairs(std::iter::empty(), policy)
    }

    /// Papers citing `cited`, ascending.
    pub fn citations_of(&self, cited: &Bibcode) -> &BTreeSet<Bibcode> {
        self.cited_to_citing.get(cited).unwrap_or(&EMPTY)
    }

    /// Resolved, policy-surviving references of `citing`, ascending.
    pub fn references_of(&self, citing: &Bibcode) -> &BTreeSet<Bibcode> {
        self.citing_to_cited.get(citing).unwrap_or(&EMPTY)
    }

    pub fn citation_count(&self, cited: &Bibcode) -> usize {
        self.citations_of(cited).len()
    }

    /// All (citing, cited) pairs in ascending citing, then cited, order.
    pub fn pairs(&self) -> impl Iterator<Item = (&Bibcode, &Bibcode)> {
        self.citing_to_cited.iter().flat_map(|(a, bs)| bs.iter().map(move |b| (a, b)))
    }

    pub fn pair_count(&self) -> usize {
        self.citing_to_cited.values().map(BTreeSet::len).sum()
    }

    pub fn cited_papers(&self) -> impl Iterator<Item = &Bibcode> {
        self.cited_to_citing.keys()
    }

    pub fn citing_papers(&self) -> impl Iterator<Item = &Bibcode> {
        self.citing_to_cited.keys()
    }

    pub fn build_date(&self) -> NaiveDate {
        self.build_date
    }

    pub fn policy(&self) -> &PolicyConfig {
        &self.policy
    }

    pub fn is_empty(&self) -> bool {
        self.citing_to_cited.is_empty()
    }

    /// Checks that both directions hold exactly the same pairs.
    pub fn is_dual(&self) -> bool {
        let forward = self.pairs().all(|(a, b)| self.citations_of(b).contains(a));
        let backward = self.cited_to_citing.iter().all(|(b, citers)| citers.iter().all(|a| self.references_of(a).contains(b)));
        let counts = self.pair_count() == self.cited_to_citing.values().map(BTreeSet::len).sum::<usize>();
        forward && backward && counts
    }
}

/// Applies the e-print policy, deduplicates pairs and inverts the table.
pub fn rebuild_citation_index(resolved: &[ResolvedReference], store: &Corpus, policy: &PolicyConfig) -> IndexBuild {
    let outcome = apply_eprint_policy(resolved, store, policy);
    let index = CitationIndex::from_pairs(outcome.kept.iter().map(|r| (&r.citing, &r.cited)), *policy);
    IndexBuild { index, actions: outcome.actions, surviving: outcome.kept }
}

/// Why a paper has no (or some) references in the index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceListStatus {
    /// No reference list was ever ingested for the paper.
    NotAvailable,
    /// A list was ingested; this many references resolved and survived policy.
    Resolved(usize),
}

pub fn reference_list_status(index: &CitationIndex, store: &Corpus, citing: &Bibcode) -> ReferenceListStatus {
    let n = index.references_of(citing).len();
    if store.has_reference_list(citing) || n > 0 {
        ReferenceListStatus::Resolved(n)
    } else {
        ReferenceListStatus::NotAvailable
    }
}
