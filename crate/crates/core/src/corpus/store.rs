use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use super::bibcode::{Bibcode, BibcodeError};
use super::record::{AuthorName, BibRecord, EprintLink, LinkOrigin, RecordKind};
use crate::text::tokens;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorpusError {
    #[error("malformed bibcode {text:?}: {source}")]
    Bibcode {
        text: String,
        #[source]
        source: BibcodeError,
    },
    #[error("{bibcode}: pub_year {pub_year} does not match bibcode year {bibcode_year}")]
    YearMismatch { bibcode: Bibcode, pub_year: i32, bibcode_year: i32 },
    #[error("{0}: e-print records cannot be refereed")]
    RefereedEprint(Bibcode),
    #[error("unknown bibcode {0}")]
    UnknownBibcode(Bibcode),
    #[error("{bibcode} has kind {actual}, expected {expected}")]
    KindMismatch { bibcode: Bibcode, expected: &'static str, actual: &'static str },
    #[error("search needs at least one non-empty term")]
    EmptyQuery,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AddOutcome {
    Inserted,
    Updated,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchFilter {
    pub year_range: Option<(i32, i32)>,
    pub refereed_only: bool,
    pub kind: Option<RecordKind>,
}

impl SearchFilter {
    pub fn accepts(&self, rec: &BibRecord) -> bool {
        if let Some((lo, hi)) = self.year_range {
            if rec.pub_year < lo || rec.pub_year > hi {
                return false;
            }
        }
        if self.refereed_only && !rec.refereed {
            return false;
        }
        self.kind.is_none_or(|k| k == rec.kind)
    }
}

/// An e-print whose best published candidates tied.
#[derive(Debug, Clone, PartialEq)]
pub struct Ambiguity {
    pub eprint: Bibcode,
    pub candidates: Vec<Bibcode>,
    pub score: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EprintMatches {
    pub linked: Vec<EprintLink>,
    pub ambiguous: Vec<Ambiguity>,
}

pub const DEFAULT_EPRINT_MATCH_THRESHOLD: f64 = 0.7;

/// Record store keyed by bibcode.
///
/// Mutation takes `&mut self` and reads take `&self`, so callers that share
/// a corpus across threads get single-writer/many-reader semantics from an
/// `RwLock` or by cloning a snapshot.
#[derive(Debug, Clone)]
pub struct Corpus {
    records: BTreeMap<Bibcode, BibRecord>,
    terms: HashMap<String, BTreeSet<Bibcode>>,
    links: BTreeMap<Bibcode, EprintLink>,
    with_references: BTreeSet<Bibcode>,
    eprint_match_threshold: f64,
}

impl Default for Corpus {
    fn default() -> Self {
        Corpus {
            records: BTreeMap::new(),
            terms: HashMap::new(),
            links: BTreeMap::new(),
            with_references: BTreeSet::new(),
            eprint_match_threshold: DEFAULT_EPRINT_MATCH_THRESHOLD,
        }
    }
}

fn record_terms(rec: &BibRecord) -> BTreeSet<String> {
    let mut out: BTreeSet<String> = tokens(&rec.title).into_iter().collect();
    if let Some(a) = &rec.abstract_text {
        out.extend(tokens(a));
    }
    for k in &rec.keywords {
        out.extend(tokens(k));
    }
    out
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_eprint_match_threshold(mut self, threshold: f64) -> Self {
        self.eprint_match_threshold = threshold;
        self
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn add_record(&mut self, mut record: BibRecord) -> Result<AddOutcome, CorpusError> {
        let code = record.bibcode.clone();
        if record.pub_year != code.year() {
            return Err(CorpusError::YearMismatch { pub_year: record.pub_year, bibcode_year: code.year(), bibcode: code });
        }
        if record.kind == RecordKind::Eprint && record.refereed {
            return Err(CorpusError::RefereedEprint(code));
        }
        record.has_reference_list = self.with_references.contains(&code);

        let outcome = match self.records.remove(&code) {
            Some(old) => {
                self.unindex(&old);
                AddOutcome::Updated
            }
            None => AddOutcome::Inserted,
        };
        for t in record_terms(&record) {
            self.terms.entry(t).or_default().insert(code.clone());
        }
        // A kind change can invalidate an existing link.
        self.links.retain(|_, l| {
            !(l.eprint == code && record.kind != RecordKind::Eprint || l.published == code && record.kind == RecordKind::Eprint)
        });
        self.records.insert(code, record);
        Ok(outcome)
    }

    fn unindex(&mut self, rec: &BibRecord) {
        for t in record_terms(rec) {
            if let Some(set) = self.terms.get_mut(&t) {
                set.remove(&rec.bibcode);
                if set.is_empty() {
                    self.terms.remove(&t);
                }
            }
        }
    }

    pub fn find_by_bibcode(&self, code: &Bibcode) -> Option<&BibRecord> {
        self.records.get(code)
    }

    pub fn contains(&self, code: &Bibcode) -> bool {
        self.records.contains_key(code)
    }

    pub fn records(&self) -> impl Iterator<Item = &BibRecord> {
        self.records.values()
    }

    /// Records whose bibcode shares the first 18 characters with `stem`.
    pub fn find_by_stem(&self, stem: &str) -> Vec<&BibRecord> {
        let Ok(lo) = format!("{stem}.").parse::<Bibcode>() else {
            return Vec::new();
        };
        self.records.range(lo..).take_while(|(k, _)| k.stem() == stem).map(|(_, v)| v).collect()
    }

    /// Marks that a reference list has been ingested for `code`.
    pub fn mark_has_references(&mut self, code: &Bibcode) {
        self.with_references.insert(code.clone());
        if let Some(rec) = self.records.get_mut(code) {
            rec.has_reference_list = true;
        }
    }

    pub fn has_reference_list(&self, code: &Bibcode) -> bool {
        self.with_references.contains(code)
    }

    /// AND search over folded whole tokens of title, abstract and keywords.
    /// Results are in ascending bibcode order.
    pub fn search_records(&self, terms: &[&str], filter: &SearchFilter) -> Result<Vec<Bibcode>, CorpusError> {
        let mut wanted: Vec<String> = terms.iter().flat_map(|t| tokens(t)).collect();
        if wanted.is_empty() {
            return Err(CorpusError::EmptyQuery);
        }
        wanted.sort();
        wanted.dedup();
        let mut sets: Vec<&BTreeSet<Bibcode>> = Vec::with_capacity(wanted.len());
        for w in &wanted {
            match self.terms.get(w) {
                Some(s) => sets.push(s),
                None => return Ok(Vec::new()),
            }
        }
        sets.sort_by_key(|s| s.len());
        let (first, rest) = sets.split_first().expect("non-empty");
        Ok(first
            .iter()
            .filter(|b| rest.iter().all(|s| s.contains(*b)))
            .filter(|b| self.records.get(*b).is_some_and(|r| filter.accepts(r)))
            .cloned()
            .collect())
    }

    /// Records with an author matching `author` (surname, and first initial when given).
    pub fn papers_by_author(&self, author: &AuthorName, filter: &SearchFilter) -> Vec<Bibcode> {
        self.records
            .values()
            .filter(|r| r.authors.iter().any(|a| a.matches(author)))
            .filter(|r| filter.accepts(r))
            .map(|r| r.bibcode.clone())
            .collect()
    }

    fn require_kind(&self, code: &Bibcode, eprint: bool) -> Result<&BibRecord, CorpusError> {
        let rec = self.records.get(code).ok_or_else(|| CorpusError::UnknownBibcode(code.clone()))?;
        let is_eprint = rec.kind == RecordKind::Eprint;
        if is_eprint != eprint {
            return Err(CorpusError::KindMismatch {
                bibcode: code.clone(),
                expected: if eprint { "eprint" } else { "journal or other" },
                actual: rec.kind.as_str(),
            });
        }
        Ok(rec)
    }

    /// Stores an explicit link, replacing any earlier link for the e-print.
    pub fn link_eprint(&mut self, eprint: &Bibcode, published: &Bibcode) -> Result<EprintLink, CorpusError> {
        self.require_kind(eprint, true)?;
        self.require_kind(published, false)?;
        let link = EprintLink { eprint: eprint.clone(), published: published.clone(), origin: LinkOrigin::Explicit, match_score: None };
        self.links.insert(eprint.clone(), link.clone());
        Ok(link)
    }

    /// Restores a previously exported link (explicit or matched).
    pub fn insert_link(&mut self, link: EprintLink) -> Result<(), CorpusError> {
        self.require_kind(&link.eprint, true)?;
        self.require_kind(&link.published, false)?;
        self.links.insert(link.eprint.clone(), link);
        Ok(())
    }

    pub fn link_for(&self, eprint: &Bibcode) -> Option<&EprintLink> {
        self.links.get(eprint)
    }

    pub fn links(&self) -> impl Iterator<Item = &EprintLink> {
        self.links.values()
    }

    /// Links every unlinked e-print to its single best published candidate.
    ///
    /// A candidate needs the same normalized first-author surname and a
    /// publication year within one of the e-print's; its score is the title
    /// token Jaccard index. Ties at the top score produce no link.
    pub fn match_eprints(&mut self) -> EprintMatches {
        let mut out = EprintMatches::default();
        let unlinked: Vec<&BibRecord> =
            self.records.values().filter(|r| r.kind == RecordKind::Eprint && !self.links.contains_key(&r.bibcode)).collect();
        for ep in unlinked {
            let Some(surname) = ep.first_author().map(AuthorName::normalized_surname) else {
                continue;
            };
            let ep_tokens: BTreeSet<String> = tokens(&ep.title).into_iter().collect();
            let mut scored: Vec<(f64, &Bibcode)> = self
                .records
                .values()
                .filter(|r| r.kind != RecordKind::Eprint)
                .filter(|r| (r.pub_year - ep.pub_year).abs() <= 1)
                .filter(|r| r.first_author().is_some_and(|a| a.normalized_surname() == surname))
                .map(|r| {
                    let t: BTreeSet<String> = tokens(&r.title).into_iter().collect();
                    (jaccard(&ep_tokens, &t), &r.bibcode)
                })
                .filter(|(s, _)| *s >= self.eprint_match_threshold)
                .collect();
            if scored.is_empty() {
                continue;
            }
            scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
            let top = scored[0].0;
            let tied: Vec<Bibcode> = scored.iter().take_while(|(s, _)| *s == top).map(|(_, b)| (*b).clone()).collect();
            if tied.len() > 1 {
                log::warn!("ambiguous e-print match for {}: {} candidates at {top:.3}", ep.bibcode, tied.len());
                out.ambiguous.push(Ambiguity { eprint: ep.bibcode.clone(), candidates: tied, score: top });
                continue;
            }
            out.linked.push(EprintLink {
                eprint: ep.bibcode.clone(),
                published: tied[0].clone(),
                origin: LinkOrigin::Matched,
                match_score: Some(top),
            });
        }
        for link in &out.linked {
            self.links.insert(link.eprint.clone(), link.clone());
        }
        out
    }
}

/// |A ∩ B| / |A ∪ B|; two empty sets score 0.
pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    a.intersection(b).count() as f64 / union as f64
}
