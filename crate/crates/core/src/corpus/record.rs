use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::bibcode::Bibcode;
use crate::text::fold;

/// An author as "Surname, I." with the initials kept verbatim.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AuthorName {
    pub surname: String,
    pub initials: String,
}

impl AuthorName {
    /// Returns `None` when the surname is blank.
    pub fn new(surname: impl Into<String>, initials: impl Into<String>) -> Option<Self> {
        let surname = surname.into().trim().to_owned();
        if surname.is_empty() {
            return None;
        }
        Some(AuthorName { surname, initials: initials.into().trim().to_owned() })
    }

    pub fn normalized_surname(&self) -> String {
        fold(&self.surname).split_whitespace().collect::<Vec<_>>().join(" ")
    }

    /// Folded first initial, if any.
    pub fn first_initial(&self) -> Option<char> {
        fold(&self.initials).chars().find(|c| c.is_alphabetic())
    }

    /// (surname, first initial) pair used for self-citation and author alerts.
    pub fn key(&self) -> (String, Option<char>) {
        (self.normalized_surname(), self.first_initial())
    }

    /// Same surname, and same first initial whenever both sides carry one.
    pub fn matches(&self, other: &AuthorName) -> bool {
        if self.normalized_surname() != other.normalized_surname() {
            return false;
        }
        match (self.first_initial(), other.first_initial()) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        }
    }

    /// Uppercase ASCII letter of the surname, or '.', as used in bibcodes.
    pub fn bibcode_initial(&self) -> char {
        fold(&self.surname)
            .chars()
            .find(|c| c.is_alphabetic())
            .map(|c| c.to_ascii_uppercase())
            .filter(char::is_ascii_uppercase)
            .unwrap_or('.')
    }
}

impl fmt::Display for AuthorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.initials.is_empty() {
            f.write_str(&self.surname)
        } else {
            write!(f, "{}, {}", self.surname, self.initials)
        }
    }
}

impl FromStr for AuthorName {
    type Err = String;

    /// Parses "Surname, I. J." or a bare surname.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (surname, initials) = match s.split_once(',') {
            Some((a, b)) => (a, b),
            None => (s, ""),
        };
        AuthorName::new(surname, initials).ok_or_else(|| format!("empty author surname in {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Journal,
    Eprint,
    Other,
}

impl RecordKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RecordKind::Journal => "journal",
            RecordKind::Eprint => "eprint",
            RecordKind::Other => "other",
        }
    }
}

impl FromStr for RecordKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "journal" => Ok(RecordKind::Journal),
            "eprint" | "e-print" => Ok(RecordKind::Eprint),
            "other" => Ok(RecordKind::Other),
            other => Err(format!("unknown record kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BibRecord {
    pub bibcode: Bibcode,
    pub title: String,
    pub authors: Vec<AuthorName>,
    pub abstract_text: Option<String>,
    pub keywords: Vec<String>,
    pub pub_year: i32,
    pub venue: String,
    pub volume: Option<String>,
    pub first_page: Option<String>,
    pub refereed: bool,
    pub kind: RecordKind,
    pub source_tags: BTreeSet<String>,
    /// Maintained by the store; any value supplied on insert is overwritten.
    pub has_reference_list: bool,
    pub ingest_date: NaiveDate,
}

impl BibRecord {
    /// A minimal record whose venue, volume and page come from the bibcode.
    pub fn new(bibcode: Bibcode, title: impl Into<String>, authors: Vec<AuthorName>, ingest_date: NaiveDate) -> Self {
        let volume = Some(bibcode.volume().to_owned()).filter(|v| !v.is_empty());
        let first_page = Some(bibcode.page().to_owned()).filter(|p| !p.is_empty());
        BibRecord {
            pub_year: bibcode.year(),
            venue: bibcode.venue().to_owned(),
            volume,
            first_page,
            bibcode,
            title: title.into(),
            authors,
            abstract_text: None,
            keywords: Vec::new(),
            refereed: true,
            kind: RecordKind::Journal,
            source_tags: BTreeSet::new(),
            has_reference_list: false,
            ingest_date,
        }
    }

    pub fn first_author(&self) -> Option<&AuthorName> {
        self.authors.first()
    }

    /// Volume used for matching: the record field, else the bibcode's.
    pub fn effective_volume(&self) -> &str {
        self.volume.as_deref().unwrap_or_else(|| self.bibcode.volume())
    }

    pub fn effective_page(&self) -> &str {
        self.first_page.as_deref().unwrap_or_else(|| self.bibcode.page())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkOrigin {
    Explicit,
    Matched,
}

impl LinkOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkOrigin::Explicit => "explicit",
            LinkOrigin::Matched => "matched",
        }
    }
}

/// Preprint-to-published correspondence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EprintLink {
    pub eprint: Bibcode,
    pub published: Bibcode,
    pub origin: LinkOrigin,
    pub match_score: Option<f64>,
}
