use super::{ResolutionConfig, VenueAbbrevTable};
use crate::corpus::BibRecord;
use crate::refparse::ParsedReference;
use crate::text::venue_key;

/// Per-component agreement between a parsed reference and a record, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreComponents {
    pub year: f64,
    pub authors: f64,
    pub venue: f64,
    pub volume_page: f64,
}

impl ScoreComponents {
    pub fn weighted(&self, config: &ResolutionConfig) -> f64 {
        let w = config.weights;
        let total = w.year * self.year + w.authors * self.authors + w.venue * self.venue + w.volume_page * self.volume_page;
        total.clamp(0.0, 1.0)
    }
}

fn same_token(a: &str, b: &str) -> bool {
    let a = a.trim();
    let b = b.trim();
    !a.is_empty() && a.eq_ignore_ascii_case(b)
}

pub fn score_components(parsed: &ParsedReference, record: &BibRecord, table: &VenueAbbrevTable) -> ScoreComponents {
    let year = match parsed.year {
        Some(y) if y == record.pub_year => 1.0,
        Some(y) if (y - record.pub_year).abs() == 1 => 0.5,
        _ => 0.0,
    };
    let authors = match (parsed.first_author(), record.first_author()) {
        (Some(p), Some(r)) => {
            let (p, r) = (p.normalized_surname(), r.normalized_surname());
            if p == r {
                1.0
            } else {
                strsim::normalized_levenshtein(&p, &r)
            }
        }
        _ => 0.0,
    };
    let venue = match parsed.venue_token.as_deref() {
        Some(tok) => {
            let mapped = table.lookup(tok).iter().any(|c| c == record.bibcode.venue());
            if mapped || venue_key(tok) == venue_key(&record.venue) {
                1.0
            } else {
                0.0
            }
        }
        None => 0.0,
    };
    let vol_hit = parsed.volume.as_deref().is_some_and(|v| same_token(v, record.effective_volume()));
    let page_hit = parsed.page.as_deref().is_some_and(|p| same_token(p, record.effective_page()));
    let volume_page = (f64::from(u8::from(vol_hit)) + f64::from(u8::from(page_hit))) / 2.0;
    ScoreComponents { year, authors, venue, volume_page }
}

/// Weighted agreement in [0, 1] between a parsed reference and a record.
pub fn similarity_score(parsed: &ParsedReference, record: &BibRecord, config: &ResolutionConfig, table: &VenueAbbrevTable) -> f64 {
    score_components(parsed, record, table).weighted(config)
}
