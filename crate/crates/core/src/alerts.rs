//! Stored-query notifications diffed between two index builds.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use chrono::NaiveDate;
use rayon::prelude::*;
use thiserror::Error;

use crate::citegraph::CitationIndex;
use crate::corpus::ingest::{parse_blocks, parse_date, TaggedError};
use crate::corpus::{AuthorName, Bibcode, Corpus, SearchFilter};
use crate::metrics::{rank_by_citations, CitationFilter, RankedPaper};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlertError {
    #[error("stored query for {0:?} has no tracked bibcodes, authors or topic terms")]
    NoInterests(String),
    #[error("stored query has an empty subscriber id")]
    NoSubscriber,
    #[error(transparent)]
    File(#[from] TaggedError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredQuery {
    pub subscriber_id: String,
    pub tracked_bibcodes: BTreeSet<Bibcode>,
    pub followed_authors: Vec<AuthorName>,
    pub topic_terms: Vec<String>,
    pub last_run: NaiveDate,
}

impl StoredQuery {
    pub fn validate(&self) -> Result<(), AlertError> {
        if self.subscriber_id.trim().is_empty() {
            return Err(AlertError::NoSubscriber);
        }
        let has_terms = self.topic_terms.iter().any(|t| !t.trim().is_empty());
        if self.tracked_bibcodes.is_empty() && self.followed_authors.is_empty() && !has_terms {
            return Err(AlertError::NoInterests(self.subscriber_id.clone()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlertBatch {
    pub subscriber_id: String,
    pub run_date: NaiveDate,
    pub new_citations: Vec<(Bibcode, Bibcode)>,
    pub new_author_papers: Vec<Bibcode>,
    pub topic_papers_ranked: Vec<RankedPaper>,
}

impl AlertBatch {
    pub fn is_empty(&self) -> bool {
        self.new_citations.is_empty() && self.new_author_papers.is_empty() && self.topic_papers_ranked.is_empty()
    }
}

/// Stored queries keyed by subscriber; re-registering replaces.
#[derive(Debug, Clone, Default)]
pub struct AlertRegistry {
    queries: BTreeMap<String, StoredQuery>,
}

impl AlertRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns true when an earlier query for the subscriber was replaced.
    pub fn register_stored_query(&mut self, q: StoredQuery) -> Result<bool, AlertError> {
        q.validate()?;
        Ok(self.queries.insert(q.subscriber_id.clone(), q).is_some())
    }

    pub fn get(&self, subscriber: &str) -> Option<&StoredQuery> {
        self.queries.get(subscriber)
    }

    pub fn queries(&self) -> impl Iterator<Item = &StoredQuery> {
        self.queries.values()
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    /// Evaluates every query and advances each `last_run` to `run_date`.
    pub fn run_alerts(&mut self, before: &CitationIndex, after: &CitationIndex, store: &Corpus, run_date: NaiveDate) -> Vec<AlertBatch> {
        let batches = run_alerts(self.queries.values(), before, after, store, run_date);
        for q in self.queries.values_mut() {
            q.last_run = q.last_run.max(run_date);
        }
        batches
    }
}

fn evaluate(q: &StoredQuery, before: &CitationIndex, after: &CitationIndex, store: &Corpus, run_date: NaiveDate) -> AlertBatch {
    let mut new_citations = Vec::new();
    for t in &q.tracked_bibcodes {
        let old = before.citations_of(t);
        for c in after.citations_of(t) {
            if !old.contains(c) && store.contains(c) {
                new_citations.push((c.clone(), t.clone()));
            }
        }
    }
    let in_window = |b: &Bibcode| store.find_by_bibcode(b).is_some_and(|r| r.ingest_date > q.last_run && r.ingest_date <= run_date);
    let new_author_papers: Vec<Bibcode> = store
        .records()
        .filter(|r| r.ingest_date > q.last_run && r.ingest_date <= run_date)
        .filter(|r| r.authors.iter().any(|a| q.followed_authors.iter().any(|f| f.matches(a))))
        .map(|r| r.bibcode.clone())
        .collect();
    let terms: Vec<&str> = q.topic_terms.iter().map(String::as_str).filter(|t| !t.trim().is_empty()).collect();
    let topic_papers_ranked = if terms.is_empty() {
        Vec::new()
    } else {
        let hits: Vec<Bibcode> =
            store.search_records(&terms, &SearchFilter::default()).unwrap_or_default().into_iter().filter(|b| in_window(b)).collect();
        rank_by_citations(after, store, &hits, &CitationFilter::default()).0
    };
    AlertBatch { subscriber_id: q.subscriber_id.clone(), run_date, new_citations, new_author_papers, topic_papers_ranked }
}

/// Alert batches for `queries`; subscribers with nothing new are omitted.
///
/// New citations are pairs to a tracked bibcode present in `after` but not
/// in `before`. Author and topic papers are records ingested in
/// `(last_run, run_date]`; topic papers are ranked by citations in `after`.
pub fn run_alerts<'a>(
    queries: impl IntoIterator<Item = &'a StoredQuery>,
    before: &CitationIndex,
    after: &CitationIndex,
    store: &Corpus,
    run_date: NaiveDate,
) -> Vec<AlertBatch> {
    let queries: Vec<&StoredQuery> = queries.into_iter().collect();
    queries
        .par_iter()
        .map(|q| evaluate(q, before, after, store, run_date))
        .collect::<Vec<_>>()
        .into_iter()
        .filter(|b| !b.is_empty())
        .collect()
}

pub fn render_alert_batch(b: &AlertBatch) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "== {} ({})", b.subscriber_id, b.run_date.format("%Y-%m-%d"));
    for (c, t) in &b.new_citations {
        let _ = writeln!(out, "citation\t{c}\t{t}");
    }
    for a in &b.new_author_papers {
        let _ = writeln!(out, "author\t{a}");
    }
    for r in &b.topic_papers_ranked {
        let _ = writeln!(out, "topic\t{}\t{}\t{}", r.rank, r.bibcode, r.metric_value);
    }
    out
}

/// Stored queries in the tagged `%K value` convention:
/// `%U` subscriber, `%C` tracked bibcode, `%A` followed author,
/// `%W` topic term and `%L` last run date.
pub fn parse_stored_queries(text: &str) -> Result<Vec<StoredQuery>, AlertError> {
    let mut out = Vec::new();
    for b in parse_blocks(text)? {
        let subscriber_id = b.first('U').map(|(v, _)| v.to_owned()).unwrap_or_default();
        let mut tracked = BTreeSet::new();
        for (v, l) in b.all('C') {
            tracked.insert(v.parse::<Bibcode>().map_err(|e| TaggedError::new(l, format!("{v:?}: {e}")))?);
        }
        let mut authors = Vec::new();
        for (v, l) in b.all('A') {
            authors.push(v.parse::<AuthorName>().map_err(|e| TaggedError::new(l, e))?);
        }
        let (last, line) = b.first('L').ok_or_else(|| TaggedError::new(b.start_line, "stored query has no %L last-run date"))?;
        let q = StoredQuery {
            subscriber_id,
            tracked_bibcodes: tracked,
            followed_authors: authors,
            topic_terms: b.all('W').map(|(v, _)| v.to_owned()).collect(),
            last_run: parse_date(last, line)?,
        };
        q.validate()?;
        out.push(q);
    }
    Ok(out)
}

pub fn write_stored_queries<'a>(queries: impl IntoIterator<Item = &'a StoredQuery>) -> String {
    let mut out = String::new();
    for (i, q) in queries.into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "%U {}", q.subscriber_id);
        for c in &q.tracked_bibcodes {
            let _ = writeln!(out, "%C {c}");
        }
        for a in &q.followed_authors {
            let _ = writeln!(out, "%A {a}");
        }
        for w in &q.topic_terms {
            let _ = writeln!(out, "%W {w}");
        }
        let _ = writeln!(out, "%L {}", q.last_run.format("%Y-%m-%d"));
    }
    out
}
