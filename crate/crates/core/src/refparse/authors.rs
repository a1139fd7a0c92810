use once_cell::sync::Lazy;
use regex::Regex;

use crate::corpus::AuthorName;

static INITIALS: Lazy<Regex> = Lazy::new(|| Regex::new(r"^(?:\p{Lu}\.?-?){1,4}$").unwrap());
static NAME_WORD: Lazy<Regex> = Lazy::new(|| Regex::new(r"^\p{Lu}[\p{L}'’]*(?:-\p{L}[\p{L}'’]*)*$").unwrap());
static ET_AL: Lazy<Regex> = Lazy::new(|| Regex::new(r"(?i)[,\s]*\bet\s*\.?\s*al\b\.?[,\s]*$").unwrap());
static CONJUNCTION: Lazy<Regex> = Lazy::new(|| Regex::new(r"(?i)\s+(?:and|&)\s+|^(?:and|&)\s+").unwrap());

const PARTICLES: &[&str] = &["van", "von", "der", "den", "de", "da", "di", "du", "del", "della", "le", "la", "dos", "ter"];

fn is_initials(word: &str) -> bool {
    INITIALS.is_match(word) && word.chars().filter(|c| c.is_alphabetic()).count() <= 4
}

fn is_name_word(word: &str) -> bool {
    NAME_WORD.is_match(word) || PARTICLES.contains(&word)
}

/// Whether the segment ends with "et al.".
pub(crate) fn has_et_al(segment: &str) -> bool {
    ET_AL.is_match(segment.trim())
}

/// Parses an author segment such as "Kurtz, M. J., Eichhorn, G., et al." or
/// "J. Smith and K. Lee". Returns `None` unless every chunk reads as a name.
pub(crate) fn parse_authors(segment: &str) -> Option<Vec<AuthorName>> {
    let seg = segment.trim().trim_end_matches([',', ';', ':']).trim();
    let seg = ET_AL.replace(seg, "");
    let seg = CONJUNCTION.replace_all(seg.trim(), ", ");
    let mut authors: Vec<AuthorName> = Vec::new();
    let mut pending_initials: Option<String> = None;
    for chunk in seg.split([',', ';']).map(str::trim).filter(|c| !c.is_empty()) {
        let words: Vec<&str> = chunk.split_whitespace().collect();
        if words.iter().all(|w| is_initials(w)) {
            let inits = words.join(" ");
            match authors.last_mut() {
                Some(last) if last.initials.is_empty() => last.initials = inits,
                // "I. J." ahead of a bare surname chunk: "J., Smith" never occurs
                // in practice, so treat it as a failure.
                _ => {
                    if pending_initials.is_some() {
                        return None;
                    }
                    pending_initials = Some(inits);
                }
            }
            continue;
        }
        let mut surname = Vec::new();
        let mut initials = Vec::new();
        for w in &words {
            if is_initials(w) && !(surname.is_empty() && initials.is_empty() && words.len() == 1) {
                initials.push(*w);
            } else if is_name_word(w) {
                surname.push(*w);
            } else {
                return None;
            }
        }
        if surname.is_empty() || surname.len() > 4 || !surname.iter().any(|w| NAME_WORD.is_match(w)) {
            return None;
        }
        if pending_initials.is_some() {
            return None;
        }
        authors.push(AuthorName::new(surname.join(" "), initials.join(" "))?);
    }
    if pending_initials.is_some() || authors.is_empty() {
        return None;
    }
    Some(authors)
}
