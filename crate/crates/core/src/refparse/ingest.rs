//! Reference list files.
//!
//! Each block starts with a header line
//! `%R <citing bibcode> %S <source tag> %D <received date>` (the doubled
//! `%%R` spelling is accepted too) followed by one reference string per
//! line. Blank lines and `#` comments are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use chrono::NaiveDate;
use once_cell::sync::Lazy;
use regex::Regex;

use super::RawReference;
use crate::corpus::ingest::{parse_date, TaggedError};
use crate::corpus::Bibcode;

static HEADER: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"^%{1,2}R\s+(?P<code>\S+)\s+%{1,2}S\s+(?P<source>\S+)\s+%{1,2}D\s+(?P<date>\S+)\s*$").unwrap());

/// One citing paper's reference list from one source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceList {
    pub citing: Bibcode,
    pub source_tag: String,
    pub received_date: NaiveDate,
    pub references: Vec<RawReference>,
}

pub fn parse_reference_file(text: &str) -> Result<Vec<ReferenceList>, TaggedError> {
    let mut out: Vec<ReferenceList> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if trimmed.starts_with('%') {
            let c = HEADER
                .captures(trimmed)
                .ok_or_else(|| TaggedError::new(lineno, "expected header \"%R <bibcode> %S <source> %D <date>\""))?;
            let citing: Bibcode =
                c["code"].parse().map_err(|e| TaggedError::new(lineno, format!("malformed bibcode {:?}: {e}", &c["code"])))?;
            out.push(ReferenceList {
                citing,
                source_tag: c["source"].to_owned(),
                received_date: parse_date(&c["date"], lineno)?,
                references: Vec::new(),
            });
            continue;
        }
        let list = out.last_mut().ok_or_else(|| TaggedError::new(lineno, "reference line before any header"))?;
        let sequence = list.references.len() as u32 + 1;
        list.references.push(RawReference {
            citing_bibcode: list.citing.clone(),
            source_tag: list.source_tag.clone(),
            sequence,
            text: trimmed.to_owned(),
            received_date: list.received_date,
        });
    }
    Ok(out)
}

pub fn write_reference_lists<'a>(lists: impl IntoIterator<Item = &'a ReferenceList>) -> String {
    let mut out = String::new();
    for l in lists {
        let _ = writeln!(out, "%R {} %S {} %D {}", l.citing, l.source_tag, l.received_date.format("%Y-%m-%d"));
        for r in &l.references {
            let _ = writeln!(out, "{}", r.text);
        }
    }
    out
}

/// Reference lists keyed by (citing, source). A redelivered list replaces
/// the earlier one from the same source.
#[derive(Debug, Clone, Default)]
pub struct ReferenceStore {
    lists: BTreeMap<(Bibcode, String), ReferenceList>,
}

impl ReferenceStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns true when an existing list was replaced.
    pub fn insert(&mut self, mut list: ReferenceList) -> bool {
        for (i, r) in list.references.iter_mut().enumerate() {
            r.sequence = i as u32 + 1;
        }
        self.lists.insert((list.citing.clone(), list.source_tag.clone()), list).is_some()
    }

    pub fn lists(&self) -> impl Iterator<Item = &ReferenceList> {
        self.lists.values()
    }

    pub fn references(&self) -> impl Iterator<Item = &RawReference> {
        self.lists.values().flat_map(|l| l.references.iter())
    }

    pub fn citing_papers(&self) -> impl Iterator<Item = &Bibcode> {
        self.lists.keys().map(|(c, _)| c)
    }

    pub fn len(&self) -> usize {
        self.lists.values().map(|l| l.references.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
