//! Tentative-identifier construction, candidate verification and scoring.

mod config;
pub mod io;
mod score;
mod venues;

use std::collections::BTreeMap;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{BibRecord, Bibcode, BibcodeFields, Corpus};
use crate::refparse::{parse_reference, ParseFailureReason, ParsedReference, RawReference};

pub use config::{ConfigError, ResolutionConfig, ScoreWeights};
pub use score::{score_components, similarity_score, ScoreComponents};
pub use venues::{VenueAbbrevTable, VenueTableError};

const SCORE_EPS: f64 = 1e-9;

/// "A cites B", with the score that justified it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedReference {
    pub citing: Bibcode,
    pub cited: Bibcode,
    pub score: f64,
    pub source_tag: String,
    pub resolved_date: NaiveDate,
    /// Set when a policy moved the pair to another citing record.
    pub provenance: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnresolvedReason {
    ParseFailed,
    NoCandidate,
    BelowThreshold,
    /// Two or more candidates tied at a score above threshold.
    Ambiguous,
}

impl UnresolvedReason {
    pub fn as_str(self) -> &'static str {
        match self {
            UnresolvedReason::ParseFailed => "parse_failed",
            UnresolvedReason::NoCandidate => "no_candidate",
            UnresolvedReason::BelowThreshold => "below_threshold",
            UnresolvedReason::Ambiguous => "ambiguous",
        }
    }
}

impl std::str::FromStr for UnresolvedReason {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "parse_failed" => UnresolvedReason::ParseFailed,
            "no_candidate" => UnresolvedReason::NoCandidate,
            "below_threshold" => UnresolvedReason::BelowThreshold,
            "ambiguous" => UnresolvedReason::Ambiguous,
            other => return Err(format!("unknown unresolved reason {other:?}")),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnresolvedReference {
    pub raw: RawReference,
    pub best_guess: Option<ParsedReference>,
    pub best_score: f64,
    pub reason: UnresolvedReason,
    /// Candidates sharing the top score when `reason` is `Ambiguous`.
    pub tied: Vec<Bibcode>,
}

// Both variants are short-lived per-reference values; boxing buys nothing.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq)]
pub enum Resolution {
    Resolved(ResolvedReference),
    Unresolved(UnresolvedReference),
}

impl Resolution {
    pub fn resolved(&self) -> Option<&ResolvedReference> {
        match self {
            Resolution::Resolved(r) => Some(r),
            Resolution::Unresolved(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("citing record {0} is not in the corpus")]
    UnknownCitingBibcode(Bibcode),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("reference has no year; cannot form a bibcode")]
pub struct MissingYear;

/// Candidate bibcodes for a parsed reference, one per venue code the token
/// maps to. Volume and page are dot-padded; the qualifier is '.'.
/// Fields too long for the layout yield no candidate.
pub fn tentative_bibcodes(parsed: &ParsedReference, table: &VenueAbbrevTable) -> Result<Vec<Bibcode>, MissingYear> {
    let year = parsed.year.ok_or(MissingYear)?;
    let Some(token) = parsed.venue_token.as_deref() else {
        return Ok(Vec::new());
    };
    let author_initial = parsed.first_author().map_or('.', |a| a.bibcode_initial());
    Ok(table
        .lookup(token)
        .iter()
        .filter_map(|code| {
            Bibcode::from_fields(&BibcodeFields {
                year,
                venue: code.clone(),
                volume: parsed.volume.clone().unwrap_or_default(),
                qualifier: '.',
                page: parsed.page.clone().unwrap_or_default(),
                author_initial,
            })
            .ok()
        })
        .collect())
}

/// Existing records for a tentative bibcode: the exact code, else the
/// letter-section ('L') qualifier. An unknown author initial ('.') matches
/// any initial.
fn lookup_candidates<'a>(code: &Bibcode, store: &'a Corpus) -> Vec<&'a BibRecord> {
    let mut variants = vec![code.clone()];
    if code.qualifier() == '.' {
        if let Ok(l) = code.with_qualifier('L') {
            variants.push(l);
        }
    }
    for v in variants {
        let found: Vec<&BibRecord> =
            if v.author_initial() == '.' { store.find_by_stem(v.stem()) } else { store.find_by_bibcode(&v).into_iter().collect() };
        if !found.is_empty() {
            return found;
        }
    }
    Vec::new()
}

struct Candidate {
    score: f64,
    variant: usize,
    initial_agrees: bool,
}

fn initials_agree(parsed: &ParsedReference, record: &BibRecord) -> bool {
    match (parsed.first_author().and_then(|a| a.first_initial()), record.first_author().and_then(|a| a.first_initial())) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

/// Resolves one reference string against the store.
///
/// Up to `max_variants` parse interpretations are tried. The candidate with
/// the highest score over all tried variants is selected (earlier variants
/// win exact ties on the same record); a perfect score stops the search.
/// The selection does not depend on the threshold, so raising the threshold
/// can only turn resolutions into non-resolutions.
pub fn resolve_reference(
    raw: &RawReference,
    store: &Corpus,
    table: &VenueAbbrevTable,
    config: &ResolutionConfig,
) -> Result<Resolution, ResolveError> {
    if !store.contains(&raw.citing_bibcode) {
        return Err(ResolveError::UnknownCitingBibcode(raw.citing_bibcode.clone()));
    }
    let mut parses: Vec<ParsedReference> = Vec::new();
    let mut candidates: BTreeMap<Bibcode, Candidate> = BTreeMap::new();
    for variant in 0..config.max_variants {
        let parsed = match parse_reference(raw, variant) {
            Ok(p) => p,
            Err(f) => {
                debug_assert!(variant > 0 || f.reason == ParseFailureReason::NoTemplate);
                break;
            }
        };
        let codes = tentative_bibcodes(&parsed, table).unwrap_or_default();
        let mut perfect = false;
        for code in &codes {
            for rec in lookup_candidates(code, store) {
                if rec.bibcode == raw.citing_bibcode {
                    continue;
                }
                let score = similarity_score(&parsed, rec, config, table);
                perfect |= score >= 1.0 - SCORE_EPS;
                let better = candidates.get(&rec.bibcode).is_none_or(|c| score > c.score + SCORE_EPS);
                if better {
                    candidates.insert(rec.bibcode.clone(), Candidate { score, variant, initial_agrees: initials_agree(&parsed, rec) });
                }
            }
        }
        parses.push(parsed);
        if perfect {
            break;
        }
    }

    if parses.is_empty() {
        return Ok(Resolution::Unresolved(UnresolvedReference {
            raw: raw.clone(),
            best_guess: None,
            best_score: 0.0,
            reason: UnresolvedReason::ParseFailed,
            tied: Vec::new(),
        }));
    }
    let top = candidates.values().map(|c| c.score).fold(f64::NEG_INFINITY, f64::max);
    if candidates.is_empty() {
        return Ok(Resolution::Unresolved(UnresolvedReference {
            raw: raw.clone(),
            best_guess: parses.into_iter().next(),
            best_score: 0.0,
            reason: UnresolvedReason::NoCandidate,
            tied: Vec::new(),
        }));
    }
    let tied: Vec<(&Bibcode, &Candidate)> = candidates.iter().filter(|(_, c)| (c.score - top).abs() <= SCORE_EPS).collect();
    let chosen = if tied.len() == 1 {
        Some(tied[0])
    } else {
        let agreeing: Vec<_> = tied.iter().filter(|(_, c)| c.initial_agrees).collect();
        (agreeing.len() == 1).then(|| *agreeing[0])
    };
    let best_variant = chosen.map_or_else(|| tied[0].1.variant, |(_, c)| c.variant);
    let best_guess = parses.get(best_variant).cloned();

    if top + SCORE_EPS < config.threshold {
        return Ok(Resolution::Unresolved(UnresolvedReference {
            raw: raw.clone(),
            best_guess,
            best_score: top,
            reason: UnresolvedReason::BelowThreshold,
            tied: Vec::new(),
        }));
    }
    match chosen {
        Some((cited, c)) => Ok(Resolution::Resolved(ResolvedReference {
            citing: raw.citing_bibcode.clone(),
            cited: cited.clone(),
            score: c.score,
            source_tag: raw.source_tag.clone(),
            resolved_date: raw.received_date,
            provenance: None,
        })),
        None => {
            log::warn!("ambiguous reference {} #{}: {} candidates at {top:.3}", raw.citing_bibcode, raw.sequence, tied.len());
            Ok(Resolution::Unresolved(UnresolvedReference {
                raw: raw.clone(),
                best_guess,
                best_score: top,
                reason: UnresolvedReason::Ambiguous,
                tied: tied.into_iter().map(|(b, _)| b.clone()).collect(),
            }))
        }
    }
}

/// Attempt/success tallies for one source tag.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceCounts {
    pub attempted: u64,
    pub resolved: u64,
    /// Publication-year span of the citing papers seen for this source.
    pub year_range: Option<(i32, i32)>,
}

impl SourceCounts {
    fn note_year(&mut self, year: i32) {
        self.year_range = Some(match self.year_range {
            Some((lo, hi)) => (lo.min(year), hi.max(year)),
            None => (year, year),
        });
    }

    pub fn merge(&mut self, other: &SourceCounts) {
        self.attempted += other.attempted;
        self.resolved += other.resolved;
        if let Some((lo, hi)) = other.year_range {
            self.note_year(lo);
            self.note_year(hi);
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BatchOutcome {
    pub resolved: Vec<ResolvedReference>,
    pub unresolved: Vec<UnresolvedReference>,
    pub errors: Vec<(RawReference, ResolveError)>,
    pub per_source: BTreeMap<String, SourceCounts>,
}

/// Resolves every reference; items are evaluated in parallel and the
/// outputs keep input order. Per-item errors never abort the batch.
pub fn resolve_batch(raws: &[RawReference], store: &Corpus, table: &VenueAbbrevTable, config: &ResolutionConfig) -> BatchOutcome {
    let results: Vec<Result<Resolution, ResolveError>> = raws.par_iter().map(|r| resolve_reference(r, store, table, config)).collect();
    let mut out = BatchOutcome::default();
    for (raw, result) in raws.iter().zip(results) {
        let counts = out.per_source.entry(raw.source_tag.clone()).or_default();
        counts.attempted += 1;
        if let Some(rec) = store.find_by_bibcode(&raw.citing_bibcode) {
            counts.note_year(rec.pub_year);
        }
        match result {
            Ok(Resolution::Resolved(r)) => {
                counts.resolved += 1;
                out.resolved.push(r);
            }
            Ok(Resolution::Unresolved(u)) => out.unresolved.push(u),
            Err(e) => out.errors.push((raw.clone(), e)),
        }
    }
    out
}
