//! Reference-section extraction, splitting and fielded parsing of raw
//! reference strings.

mod authors;
pub mod ingest;
mod parse;
mod section;
mod split;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{AuthorName, Bibcode};

pub use parse::{parse_reference, variant_count, StyleTemplate, SCORED_FIELDS};
pub use section::SectionNotFound;
pub use split::split_reference_texts;

/// Full text of a citing paper as delivered by a source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub citing_bibcode: Bibcode,
    pub source_tag: String,
    pub body_text: String,
    pub received_date: NaiveDate,
}

/// One reference string from a citing paper's bibliography.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawReference {
    pub citing_bibcode: Bibcode,
    pub source_tag: String,
    /// 1-based position within the (citing, source) list.
    pub sequence: u32,
    pub text: String,
    pub received_date: NaiveDate,
}

/// A fielded reading of a reference string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedReference {
    pub raw: RawReference,
    pub authors: Vec<AuthorName>,
    pub year: Option<i32>,
    pub venue_token: Option<String>,
    pub volume: Option<String>,
    pub page: Option<String>,
    /// Fraction of the five scored fields that were extracted.
    pub confidence: f64,
    pub variant_index: usize,
    pub template: StyleTemplate,
}

impl ParsedReference {
    pub fn first_author(&self) -> Option<&AuthorName> {
        self.authors.first()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseFailureReason {
    NoTemplate,
    NoSuchVariant { requested: usize, available: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse reference {:?}: {reason:?}", raw.text)]
pub struct ParseFailure {
    pub raw: RawReference,
    pub reason: ParseFailureReason,
}

pub fn extract_reference_section(doc: &RawDocument) -> Result<&str, SectionNotFound> {
    section::extract_reference_section(&doc.body_text)
}

/// Splits a section into numbered references for one citing paper.
pub fn split_reference_strings(section: &str, citing: &Bibcode, source_tag: &str, received_date: NaiveDate) -> Vec<RawReference> {
    split_reference_texts(section)
        .into_iter()
        .enumerate()
        .map(|(i, text)| RawReference {
            citing_bibcode: citing.clone(),
            source_tag: source_tag.to_owned(),
            sequence: i as u32 + 1,
            text,
            received_date,
        })
        .collect()
}

/// Extract-then-split for a whole document.
pub fn document_references(doc: &RawDocument) -> Result<Vec<RawReference>, SectionNotFound> {
    let section = extract_reference_section(doc)?;
    Ok(split_reference_strings(section, &doc.citing_bibcode, &doc.source_tag, doc.received_date))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(text: &str) -> RawReference {
        RawReference {
            citing_bibcode: "2006cs........8027H".parse().unwrap(),
            source_tag: "arXiv".into(),
            sequence: 1,
            text: text.into(),
            received_date: NaiveDate::from_ymd_opt(2006, 9, 1).unwrap(),
        }
    }

    fn fields(p: &ParsedReference) -> (Option<i32>, Option<&str>, Option<&str>, Option<&str>) {
        (p.year, p.venue_token.as_deref(), p.volume.as_deref(), p.page.as_deref())
    }

    #[test]
    fn aas_style_proceedings() {
        let p = parse_reference(&raw("Accomazzi, A., et al. 1999, ASPC, 172, 291"), 0).unwrap();
        assert_eq!(p.authors, vec![AuthorName::new("Accomazzi", "A.").unwrap()]);
        assert_eq!(fields(&p), (Some(1999), Some("ASPC"), Some("172"), Some("291")));
        assert_eq!(p.confidence, 1.0);
        assert_eq!(p.template, StyleTemplate::EtAl);
    }

    #[test]
    fn spie_reference() {
        let p = parse_reference(&raw("Kurtz, M. J., et al. 2002, SPIE, 4847, 238"), 0).unwrap();
        assert_eq!(fields(&p), (Some(2002), Some("SPIE"), Some("4847"), Some("238")));
        assert_eq!(p.authors[0].initials, "M. J.");
    }

    #[test]
    fn scribble_fails() {
        let err = parse_reference(&raw("mysterious scribble 12345"), 0).unwrap_err();
        assert_eq!(err.reason, ParseFailureReason::NoTemplate);
        assert_eq!(err.raw.text, "mysterious scribble 12345");
    }

    #[test]
    fn dotted_venue_has_split_variant() {
        let r = raw("Demleitner, M. 2004, ccdm.conf, 521");
        let v0 = parse_reference(&r, 0).unwrap();
        assert_eq!(fields(&v0), (Some(2004), Some("ccdm.conf"), None, Some("521")));
        assert_eq!(v0.confidence, 0.8);
        let v1 = parse_reference(&r, 1).unwrap();
        assert_eq!(fields(&v1), (Some(2004), Some("ccdm"), Some("conf"), Some("521")));
        assert_eq!(v1.variant_index, 1);
        assert!(matches!(parse_reference(&r, 2).unwrap_err().reason, ParseFailureReason::NoSuchVariant { requested: 2, available: 2 }));
    }

    #[test]
    fn numbered_bracket() {
        let p = parse_reference(&raw("[12] Smith, J. 2001, ApJ, 550, 100"), 0).unwrap();
        assert_eq!(p.template, StyleTemplate::NumberedBracket);
        assert_eq!(fields(&p), (Some(2001), Some("ApJ"), Some("550"), Some("100")));
    }

    #[test]
    fn venue_first_physics_style() {
        let p = parse_reference(&raw("J. Smith and K. Lee, Phys. Rev. Lett. 85, 1234 (2000)."), 0).unwrap();
        assert_eq!(p.template, StyleTemplate::VenueFirst);
        assert_eq!(p.authors.len(), 2);
        assert_eq!(p.authors[0].surname, "Smith");
        assert_eq!(fields(&p), (Some(2000), Some("Phys. Rev. Lett."), Some("85"), Some("1234")));
    }

    #[test]
    fn title_before_venue_needs_a_later_variant() {
        let r = raw("Smith, J. (2001). A new look at old data. ApJ, 550, 100.");
        let venues: Vec<String> = (0..variant_count(&r.text)).map(|v| parse_reference(&r, v).unwrap().venue_token.unwrap()).collect();
        assert_eq!(venues[0], "A new look at old data. ApJ");
        assert!(venues.iter().take(3).any(|v| v == "ApJ"), "{venues:?}");
    }

    #[test]
    fn letter_page_prefix_is_stripped() {
        let p = parse_reference(&raw("Smith, J. 2001, ApJ, 550, L100"), 0).unwrap();
        assert_eq!(p.page.as_deref(), Some("100"));
    }

    #[test]
    fn page_ranges_keep_first_page() {
        let p = parse_reference(&raw("Smith, J. 2001, AJ, 121, 1600-1620"), 0).unwrap();
        assert_eq!(fields(&p), (Some(2001), Some("AJ"), Some("121"), Some("1600")));
    }

    #[test]
    fn deterministic() {
        let r = raw("Kurtz, M. J., et al. 2005, IPM, 41, 1395");
        assert_eq!(parse_reference(&r, 0).unwrap(), parse_reference(&r, 0).unwrap());
    }

    #[test]
    fn document_pipeline() {
        let doc = RawDocument {
            citing_bibcode: "2006cs........8027H".parse().unwrap(),
            source_tag: "arXiv".into(),
            body_text: "Intro.\nReferences\n[1] Smith, J. 2001, ApJ, 550, 100\n[2] Jones, K. 1999,\n   AJ, 118, 5\n".into(),
            received_date: NaiveDate::from_ymd_opt(2006, 9, 1).unwrap(),
        };
        let refs = document_references(&doc).unwrap();
        assert_eq!(refs.len(), 2);
        assert_eq!(refs[1].sequence, 2);
        assert_eq!(refs[1].text, "[2] Jones, K. 1999, AJ, 118, 5");
    }
}
