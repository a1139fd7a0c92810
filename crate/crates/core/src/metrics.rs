//! Citation counts, filters, h-index and the second-order operators.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::citegraph::CitationIndex;
use crate::corpus::{AuthorName, BibRecord, Bibcode, Corpus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error("year_min {0} is greater than year_max {1}")]
    YearRange(i32, i32),
    #[error("excluding self-citations needs at least one base author")]
    NoBaseAuthors,
}

/// Restrictions on which citing papers count. Year bounds apply to the
/// citing paper's publication year.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CitationFilter {
    pub refereed_only: bool,
    pub year_min: Option<i32>,
    pub year_max: Option<i32>,
    pub exclude_self: bool,
    pub base_authors: Vec<AuthorName>,
}

impl CitationFilter {
    pub fn validate(&self) -> Result<(), FilterError> {
        if let (Some(lo), Some(hi)) = (self.year_min, self.year_max) {
            if lo > hi {
                return Err(FilterError::YearRange(lo, hi));
            }
        }
        if self.exclude_self && self.base_authors.is_empty() {
            return Err(FilterError::NoBaseAuthors);
        }
        Ok(())
    }

    pub fn is_unfiltered(&self) -> bool {
        !self.refereed_only && self.year_min.is_none() && self.year_max.is_none() && !self.exclude_self
    }

    /// Citers missing from the store only pass an unfiltered query.
    pub fn accepts(&self, citer: Option<&BibRecord>) -> bool {
        let Some(rec) = citer else {
            return self.is_unfiltered();
        };
        if self.refereed_only && !rec.refereed {
            return false;
        }
        if self.year_min.is_some_and(|y| rec.pub_year < y) || self.year_max.is_some_and(|y| rec.pub_year > y) {
            return false;
        }
        if self.exclude_self {
            let base: BTreeSet<(String, Option<char>)> = self.base_authors.iter().map(AuthorName::key).collect();
            if rec.authors.iter().any(|a| base.contains(&a.key())) {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FilteredCitations {
    pub per_paper: BTreeMap<Bibcode, BTreeSet<Bibcode>>,
    /// Sum of per-paper set sizes; a citer of two targets counts twice.
    pub total: usize,
    /// Targets not present in the store (still reported in `per_paper`).
    pub unknown_targets: Vec<Bibcode>,
}

pub fn filtered_citations<'a>(
    index: &CitationIndex,
    store: &Corpus,
    targets: impl IntoIterator<Item = &'a Bibcode>,
    filter: &CitationFilter,
) -> FilteredCitations {
    let mut out = FilteredCitations::default();
    for t in targets {
        if out.per_paper.contains_key(t) {
            continue;
        }
        if !store.contains(t) {
            out.unknown_targets.push(t.clone());
        }
        let citers: BTreeSet<Bibcode> =
            index.citations_of(t).iter().filter(|c| filter.accepts(store.find_by_bibcode(c))).cloned().collect();
        out.total += citers.len();
        out.per_paper.insert(t.clone(), citers);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankedPaper {
    pub bibcode: Bibcode,
    pub metric_value: usize,
    pub rank: usize,
}

/// Sorts by value descending, bibcode ascending, and assigns ranks 1..n.
fn rank(mut rows: Vec<(Bibcode, usize)>) -> Vec<RankedPaper> {
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    rows.into_iter().enumerate().map(|(i, (bibcode, metric_value))| RankedPaper { bibcode, metric_value, rank: i + 1 }).collect()
}

/// Ranks `set` by filtered citation count. Duplicate entries in `set` are
/// ranked once.
pub fn rank_by_citations(index: &CitationIndex, store: &Corpus, set: &[Bibcode], filter: &CitationFilter) -> (Vec<RankedPaper>, usize) {
    let fc = filtered_citations(index, store, set, filter);
    let rows = fc.per_paper.iter().map(|(b, c)| (b.clone(), c.len())).collect();
    (rank(rows), fc.total)
}

/// Largest n such that at least n counts are >= n.
pub fn h_index_of_counts(counts: &[usize]) -> usize {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted.iter().enumerate().take_while(|(i, c)| **c > *i).count()
}

pub fn h_index(index: &CitationIndex, store: &Corpus, set: &[Bibcode], filter: &CitationFilter) -> usize {
    let fc = filtered_citations(index, store, set, filter);
    let counts: Vec<usize> = fc.per_paper.values().map(BTreeSet::len).collect();
    h_index_of_counts(&counts)
}

fn top_k(counts: BTreeMap<Bibcode, usize>, k: usize) -> Vec<(Bibcode, usize)> {
    let mut rows: Vec<(Bibcode, usize)> = counts.into_iter().collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    rows.truncate(k);
    rows
}

/// Papers most referenced by the members of `set`: each X is counted once
/// per distinct member whose references include it.
pub fn most_useful(index: &CitationIndex, set: &[Bibcode], k: usize) -> Vec<(Bibcode, usize)> {
    let members: BTreeSet<&Bibcode> = set.iter().collect();
    let mut counts: BTreeMap<Bibcode, usize> = BTreeMap::new();
    for m in members {
        for x in index.references_of(m) {
            *counts.entry(x.clone()).or_default() += 1;
        }
    }
    top_k(counts, k)
}

/// Papers citing the most members of `set`: each citer C is counted once
/// per distinct member it cites.
pub fn most_instructive(index: &CitationIndex, set: &[Bibcode], k: usize) -> Vec<(Bibcode, usize)> {
    let members: BTreeSet<&Bibcode> = set.iter().collect();
    let mut counts: BTreeMap<Bibcode, usize> = BTreeMap::new();
    for m in members {
        for c in index.citations_of(m) {
            *counts.entry(c.clone()).or_default() += 1;
        }
    }
    top_k(counts, k)
}

/// `rank<TAB>bibcode<TAB>value` lines.
pub fn write_ranked(rows: &[RankedPaper]) -> String {
    rows.iter().map(|r| format!("{}\t{}\t{}\n", r.rank, r.bibcode, r.metric_value)).collect()
}

/// Same layout for (bibcode, count) lists, ranks assigned in order.
pub fn write_counted(rows: &[(Bibcode, usize)]) -> String {
    rows.iter().enumerate().map(|(i, (b, n))| format!("{}\t{b}\t{n}\n", i + 1)).collect()
}
