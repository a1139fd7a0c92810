//! Case folding, diacritic stripping and tokenization shared by the store,
//! the resolver and the metrics filters.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Lowercases and strips combining marks. Idempotent.
pub fn fold(s: &str) -> String {
    s.nfd().filter(|c| !is_combining_mark(*c)).flat_map(char::to_lowercase).collect()
}

/// Splits folded text into alphanumeric word tokens.
pub fn tokens(s: &str) -> Vec<String> {
    fold(s).split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()).map(str::to_owned).collect()
}

/// Folding used for venue abbreviations: dots and whitespace are dropped so
/// that "Astrophys. J." and "astrophys.j" compare equal.
pub fn venue_key(s: &str) -> String {
    fold(s).chars().filter(|c| !c.is_whitespace() && *c != '.' && *c != ',').collect()
}
