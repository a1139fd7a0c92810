use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Length of the canonical text form.
pub const BIBCODE_LEN: usize = 19;

pub const MIN_YEAR: i32 = 1500;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BibcodeError {
    #[error("bibcode must be exactly 19 characters, got {0}")]
    Length(usize),
    #[error("bibcode must be ASCII")]
    NonAscii,
    #[error("year field {0:?} is not a year in 1500..=2100")]
    Year(String),
    #[error("venue field {0:?} must be 1-5 alphanumeric or '&' characters")]
    Venue(String),
    #[error("volume field {0:?} must be at most 4 alphanumeric characters")]
    Volume(String),
    #[error("qualifier {0:?} must be '.' or an ASCII letter")]
    Qualifier(char),
    #[error("page field {0:?} must be at most 4 alphanumeric characters")]
    Page(String),
    #[error("author initial {0:?} must be an uppercase letter or '.'")]
    AuthorInitial(char),
}

/// Structured view of a bibcode. Padding dots are not part of any field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BibcodeFields {
    pub year: i32,
    pub venue: String,
    pub volume: String,
    pub qualifier: char,
    pub page: String,
    pub author_initial: char,
}

/// Canonical 19-character record identifier.
///
/// Layout: `YYYY` + venue (dot-padded right to 5) + volume (dot-padded left
/// to 4) + qualifier + page (dot-padded left to 4) + first-author initial.
/// Equality, ordering and hashing all use the text form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bibcode(String);

fn field_chars_ok(s: &str) -> bool {
    s.chars().all(|c| c.is_ascii_alphanumeric() || c == '&')
}

impl Bibcode {
    pub fn from_fields(f: &BibcodeFields) -> Result<Self, BibcodeError> {
        if !(MIN_YEAR..=MAX_YEAR).contains(&f.year) {
            return Err(BibcodeError::Year(f.year.to_string()));
        }
        if f.venue.is_empty() || f.venue.len() > 5 || !field_chars_ok(&f.venue) {
            return Err(BibcodeError::Venue(f.venue.clone()));
        }
        if f.volume.len() > 4 || !field_chars_ok(&f.volume) {
            return Err(BibcodeError::Volume(f.volume.clone()));
        }
        if !(f.qualifier == '.' || f.qualifier.is_ascii_alphabetic()) {
            return Err(BibcodeError::Qualifier(f.qualifier));
        }
        if f.page.len() > 4 || !field_chars_ok(&f.page) {
            return Err(BibcodeError::Page(f.page.clone()));
        }
        if !(f.author_initial == '.' || f.author_initial.is_ascii_uppercase()) {
            return Err(BibcodeError::AuthorInitial(f.author_initial));
        }
        let text = format!("{:04}{:.<5}{:.>4}{}{:.>4}{}", f.year, f.venue, f.volume, f.qualifier, f.page, f.author_initial);
        debug_assert_eq!(text.len(), BIBCODE_LEN);
        Ok(Bibcode(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn year(&self) -> i32 {
        self.0[0..4].parse().expect("validated year")
    }

    pub fn venue(&self) -> &str {
        self.0[4..9].trim_end_matches('.')
    }

    pub fn volume(&self) -> &str {
        self.0[9..13].trim_start_matches('.')
    }

    pub fn qualifier(&self) -> char {
        self.0.as_bytes()[13] as char
    }

    pub fn page(&self) -> &str {
        self.0[14..18].trim_start_matches('.')
    }

    pub fn author_initial(&self) -> char {
        self.0.as_bytes()[18] as char
    }

    /// First 18 characters: everything except the author initial.
    pub fn stem(&self) -> &str {
        &self.0[..18]
    }

    pub fn fields(&self) -> BibcodeFields {
        BibcodeFields {
            year: self.year(),
            venue: self.venue().to_owned(),
            volume: self.volume().to_owned(),
            qualifier: self.qualifier(),
            page: self.page().to_owned(),
            author_initial: self.author_initial(),
        }
    }

    pub fn with_qualifier(&self, qualifier: char) -> Result<Self, BibcodeError> {
        let mut f = self.fields();
        f.qualifier = qualifier;
        Bibcode::from_fields(&f)
    }
}

impl FromStr for Bibcode {
    type Err = BibcodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = s.chars().count();
        if n != BIBCODE_LEN {
            return Err(BibcodeError::Length(n));
        }
        if !s.is_ascii() {
            return Err(BibcodeError::NonAscii);
        }
        let year_text = &s[0..4];
        let year = year_text
            .parse::<i32>()
            .ok()
            .filter(|_| year_text.bytes().all(|b| b.is_ascii_digit()))
            .ok_or_else(|| BibcodeError::Year(year_text.to_owned()))?;
        let fields = BibcodeFields {
            year,
            venue: s[4..9].trim_end_matches('.').to_owned(),
            volume: s[9..13].trim_start_matches('.').to_owned(),
            qualifier: s.as_bytes()[13] as char,
            page: s[14..18].trim_start_matches('.').to_owned(),
            author_initial: s.as_bytes()[18] as char,
        };
        let code = Bibcode::from_fields(&fields)?;
        // Interior dots (e.g. "AB.CD" as a venue) do not survive re-formatting.
        if code.0 != s {
            return Err(BibcodeError::Venue(s[4..9].to_owned()));
        }
        Ok(code)
    }
}

impl fmt::Display for Bibcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Bibcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bibcode({})", self.0)
    }
}

impl Serialize for Bibcode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Bibcode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PAPER_CODES: [&str; 7] = [
        "1999ASPC..172..291A",
        "2004ccdm.conf..521D",
        "2005IPM....41.1395K",
        "2002SPIE.4847..238K",
        "2003AAS...203.2005K",
        "2006cs........8027H",
        "2003lisa.conf..185S",
    ];

    #[test]
    fn known_codes_round_trip() {
        for text in PAPER_CODES {
            let code: Bibcode = text.parse().unwrap();
            let again = Bibcode::from_fields(&code.fields()).unwrap();
            assert_eq!(again.as_str(), text);
        }
    }

    #[test]
    fn fields_of_proceedings_code() {
        let code: Bibcode = "2004ccdm.conf..521D".parse().unwrap();
        assert_eq!(code.year(), 2004);
        assert_eq!(code.venue(), "ccdm");
        assert_eq!(code.volume(), "conf");
        assert_eq!(code.qualifier(), '.');
        assert_eq!(code.page(), "521");
        assert_eq!(code.author_initial(), 'D');

        let eprint: Bibcode = "2006cs........8027H".parse().unwrap();
        assert_eq!(eprint.venue(), "cs");
        assert_eq!(eprint.volume(), "");
        assert_eq!(eprint.page(), "8027");
    }

    #[test]
    fn rejects_wrong_length_with_diagnostic() {
        let err = "1999ASPC..172..291".parse::<Bibcode>().unwrap_err();
        assert_eq!(err, BibcodeError::Length(18));
        assert!(err.to_string().contains("19 characters"));
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(matches!("1499ASPC..172..291A".parse::<Bibcode>(), Err(BibcodeError::Year(_))));
        assert!(matches!("1999ASPC..172..291a".parse::<Bibcode>(), Err(BibcodeError::AuthorInitial('a'))));
        assert!(matches!("1999.ASPC.172..291A".parse::<Bibcode>(), Err(BibcodeError::Venue(_))));
        assert!(matches!("1999ASPC..172-.291A".parse::<Bibcode>(), Err(BibcodeError::Qualifier('-'))));
    }

    #[test]
    fn ordering_is_textual() {
        let a: Bibcode = "1999ASPC..172..291A".parse().unwrap();
        let b: Bibcode = "2002SPIE.4847..238K".parse().unwrap();
        assert!(a < b);
    }

    fn field(max: usize, min: usize) -> impl Strategy<Value = String> {
        proptest::string::string_regex(&format!("[A-Za-z0-9&]{{{min},{max}}}")).unwrap()
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(
            year in MIN_YEAR..=MAX_YEAR,
            venue in field(5, 1),
            volume in field(4, 0),
            qualifier in prop_oneof![Just('.'), proptest::char::range('A', 'Z'), proptest::char::range('a', 'z')],
            page in field(4, 0),
            author_initial in prop_oneof![Just('.'), proptest::char::range('A', 'Z')],
        ) {
            let fields = BibcodeFields { year, venue, volume, qualifier, page, author_initial };
            let code = Bibcode::from_fields(&fields).unwrap();
            prop_assert_eq!(code.as_str().len(), BIBCODE_LEN);
            let parsed: Bibcode = code.as_str().parse().unwrap();
            prop_assert_eq!(parsed.fields(), fields);
        }
    }
}
