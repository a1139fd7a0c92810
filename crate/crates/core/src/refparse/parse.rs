use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::authors::{has_et_al, parse_authors};
use super::{ParseFailure, ParseFailureReason, ParsedReference, RawReference};
use crate::corpus::{AuthorName, MAX_YEAR, MIN_YEAR};

/// Reference layouts recognised by the parser, in the order they are tried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StyleTemplate {
    /// `Surname, I. 2001, Venue, 550, 100`
    AuthorYear,
    /// Any other template behind a `[n]`, `n.` or `n)` marker.
    NumberedBracket,
    /// `I. Surname, Venue 550, 100 (2001)`
    VenueFirst,
    /// `Surname et al. 2001, Venue 550, 100`
    EtAl,
}

/// The number of fields scored by the confidence measure.
pub const SCORED_FIELDS: usize = 5;

const YEAR: &str = r"(?:1[5-9]\d\d|20\d\d|2100)";

static MARKER: Lazy<Regex> = Lazy::new(|| Regex::new(r"^\s*(?:\[\d+\]|\d+[.)]|[•·*\-–])\s+").unwrap());

static AUTHOR_YEAR: Lazy<Regex> =
    Lazy::new(|| Regex::new(&format!(r"^(?P<authors>.+?)[\s,]*\(?(?P<year>{YEAR})[a-z]?\)?(?:[.,:;\s]+(?P<rest>.*))?$")).unwrap());

static VENUE_FIRST: Lazy<Regex> = Lazy::new(|| {
    Regex::new(&format!(
        r"^(?P<head>.*?)[\s,]*(?:[Vv]ol\.?\s*)?(?P<vol>[A-Za-z]?\d+[A-Za-z]?)[\s,:]+(?:pp?\.\s*)?(?P<page>[A-Za-z]?\d+)(?:\s*[-–]+\s*[A-Za-z]?\d+)?[\s,]*\((?P<year>{YEAR})[a-z]?\)\s*[.;]?$"
    ))
    .unwrap()
});

// Venue text, then optionally a volume, then a page (ranges allowed).
static VENUE_TAIL: Lazy<Regex> = Lazy::new(|| {
    Regex::new(r"^(?P<venue>.*?)[\s,]*(?:(?:[Vv]ol\.?\s*)?(?P<vol>[A-Za-z]?\d+[A-Za-z]?)[\s,:]+)?(?:pp?\.\s*)?(?P<page>[A-Za-z]?\d+)(?:\s*[-–]+\s*[A-Za-z]?\d+)?\s*[.;]?$").unwrap()
});

static DOTTED_TOKEN: Lazy<Regex> = Lazy::new(|| Regex::new(r"^(?P<venue>[A-Za-z&]{1,5})\.(?P<vol>[A-Za-z0-9]{1,4})$").unwrap());

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Interpretation {
    pub authors: Vec<AuthorName>,
    pub year: Option<i32>,
    pub venue: Option<String>,
    pub volume: Option<String>,
    pub page: Option<String>,
    pub template: StyleTemplate,
}

impl Interpretation {
    fn same_fields(&self, other: &Interpretation) -> bool {
        self.authors == other.authors
            && self.year == other.year
            && self.venue == other.venue
            && self.volume == other.volume
            && self.page == other.page
    }

    fn confidence(&self) -> f64 {
        let present = [!self.authors.is_empty(), self.year.is_some(), self.venue.is_some(), self.volume.is_some(), self.page.is_some()]
            .iter()
            .filter(|p| **p)
            .count();
        present as f64 / SCORED_FIELDS as f64
    }
}

fn clean_venue(s: &str) -> Option<String> {
    let v = s.trim().trim_matches(|c: char| c == ',' || c == ';' || c == ':' || c.is_whitespace());
    let v = v.strip_prefix("in ").or_else(|| v.strip_prefix("In ")).unwrap_or(v).trim();
    if v.chars().any(char::is_alphabetic) {
        Some(v.to_owned())
    } else {
        None
    }
}

fn strip_page_prefix(p: &str) -> String {
    p.trim_start_matches(|c: char| c.is_ascii_alphabetic()).to_owned()
}

/// Alternate readings of where the venue starts inside `text`.
fn venue_alternatives(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut push = |v: Option<String>| {
        if let Some(v) = v {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    };
    push(clean_venue(text));
    push(text.rsplit(',').map(str::trim).find(|s| !s.is_empty()).and_then(clean_venue));
    // Trailing run of capitalised words, e.g. "Astrophys. J." after a title.
    let words: Vec<&str> = text.split_whitespace().collect();
    let keep = words.iter().rev().take_while(|w| w.starts_with(|c: char| c.is_uppercase() || c == '&')).count();
    if keep > 0 {
        push(clean_venue(&words[words.len() - keep..].join(" ")));
    }
    if let Some(last) = words.last() {
        push(clean_venue(last));
    }
    out
}

/// Expands a (venue, volume, page) tail into interpretations, adding the
/// "venue.volume" split for dotted tokens such as "ccdm.conf".
fn tail_readings(rest: &str) -> Vec<(Option<String>, Option<String>, Option<String>)> {
    let rest = rest.trim().trim_end_matches('.').trim();
    let (venue_text, volume, page) = match VENUE_TAIL.captures(rest) {
        Some(c) => (
            c.name("venue").map_or("", |m| m.as_str()).to_owned(),
            c.name("vol").map(|m| m.as_str().to_owned()),
            c.name("page").map(|m| strip_page_prefix(m.as_str())),
        ),
        None => (rest.to_owned(), None, None),
    };
    let mut out = Vec::new();
    let alts = venue_alternatives(&venue_text);
    if alts.is_empty() {
        out.push((None, volume.clone(), page.clone()));
    }
    for venue in alts {
        if volume.is_none() {
            if let Some(c) = DOTTED_TOKEN.captures(&venue) {
                out.push((Some(venue.clone()), None, page.clone()));
                out.push((Some(c["venue"].to_owned()), Some(c["vol"].to_owned()), page.clone()));
                continue;
            }
        }
        out.push((Some(venue), volume.clone(), page.clone()));
    }
    out
}

fn year_of(s: &str) -> Option<i32> {
    s.parse::<i32>().ok().filter(|y| (MIN_YEAR..=MAX_YEAR).contains(y))
}

fn author_year(text: &str) -> Vec<Interpretation> {
    let Some(c) = AUTHOR_YEAR.captures(text) else {
        return Vec::new();
    };
    let seg = &c["authors"];
    let Some(authors) = parse_authors(seg) else {
        return Vec::new();
    };
    let template = if has_et_al(seg) { StyleTemplate::EtAl } else { StyleTemplate::AuthorYear };
    let year = year_of(&c["year"]);
    let rest = c.name("rest").map_or("", |m| m.as_str());
    tail_readings(rest)
        .into_iter()
        .filter(|(v, _, _)| v.is_some())
        .map(|(venue, volume, page)| Interpretation { authors: authors.clone(), year, venue, volume, page, template })
        .collect()
}

fn venue_first(text: &str) -> Vec<Interpretation> {
    let Some(c) = VENUE_FIRST.captures(text) else {
        return Vec::new();
    };
    let year = year_of(&c["year"]);
    let volume = Some(c["vol"].to_owned());
    let page = Some(strip_page_prefix(&c["page"]));
    let chunks: Vec<&str> = c["head"].split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let mut out = Vec::new();
    // Largest author prefix first; the venue keeps at least one chunk.
    for k in (0..chunks.len()).rev() {
        let authors = if k == 0 {
            Vec::new()
        } else {
            match parse_authors(&chunks[..k].join(", ")) {
                Some(a) => a,
                None => continue,
            }
        };
        let Some(venue) = clean_venue(&chunks[k..].join(", ")) else {
            continue;
        };
        out.push(Interpretation {
            authors,
            year,
            venue: Some(venue),
            volume: volume.clone(),
            page: page.clone(),
            template: StyleTemplate::VenueFirst,
        });
    }
    out
}

/// All distinct readings of a reference string, best first.
pub(crate) fn interpretations(text: &str) -> Vec<Interpretation> {
    let flat = text.split_whitespace().collect::<Vec<_>>().join(" ");
    let (body, numbered) = match MARKER.find(&flat) {
        Some(m) => (&flat[m.end()..], true),
        None => (flat.as_str(), false),
    };
    let mut all = author_year(body);
    all.extend(venue_first(body));
    let mut out: Vec<Interpretation> = Vec::new();
    for mut i in all {
        if i.year.is_none() || i.confidence() <= 0.0 {
            continue;
        }
        if numbered {
            i.template = StyleTemplate::NumberedBracket;
        }
        if !out.iter().any(|o| o.same_fields(&i)) {
            out.push(i);
        }
    }
    out
}

/// Parses `raw` and returns its `variant`-th distinct interpretation.
pub fn parse_reference(raw: &RawReference, variant: usize) -> Result<ParsedReference, ParseFailure> {
    let mut all = interpretations(&raw.text);
    if all.is_empty() {
        return Err(ParseFailure { raw: raw.clone(), reason: ParseFailureReason::NoTemplate });
    }
    if variant >= all.len() {
        return Err(ParseFailure {
            raw: raw.clone(),
            reason: ParseFailureReason::NoSuchVariant { requested: variant, available: all.len() },
        });
    }
    let chosen = all.swap_remove(variant);
    let confidence = chosen.confidence();
    Ok(ParsedReference {
        raw: raw.clone(),
        authors: chosen.authors,
        year: chosen.year,
        venue_token: chosen.venue,
        volume: chosen.volume,
        page: chosen.page,
        confidence,
        variant_index: variant,
        template: chosen.template,
    })
}

/// Number of distinct interpretations available for `text`.
pub fn variant_count(text: &str) -> usize {
    interpretations(text).len()
}
