use once_cell::sync::Lazy;
use regex::Regex;

// "[12]", "12.", "12)" or a bullet, followed by whitespace or end of line.
static MARKER: Lazy<Regex> = Lazy::new(|| Regex::new(r"^(?:\[\d+\]|\d+[.)]|[•·*\-–])(?:\s|$)").unwrap());

pub(crate) fn starts_with_marker(line: &str) -> bool {
    MARKER.is_match(line)
}

/// Splits a reference section into individual reference strings.
///
/// Blank lines and line-initial markers start a new reference. Indented
/// lines, lines starting with a lowercase letter, a digit or punctuation,
/// and lines following a bare marker continue the current one. Markers are
/// kept in the text; the parser strips them.
pub fn split_reference_texts(section: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut open = false;
    for line in section.lines() {
        if line.trim().is_empty() {
            open = false;
            continue;
        }
        let trimmed = line.trim();
        let indented = line.starts_with(char::is_whitespace);
        let marker = starts_with_marker(trimmed);
        let first = trimmed.chars().next().unwrap_or(' ');
        let continues = !marker && (indented || !(first.is_uppercase() || first == '['));
        let prev_bare_marker = out.last().is_some_and(|p| MARKER.find(p).is_some_and(|m| m.as_str().trim() == p.trim()));
        if open && (continues || prev_bare_marker) {
            let last = out.last_mut().expect("open implies a reference");
            last.push(' ');
            last.push_str(trimmed);
        } else {
            out.push(trimmed.to_owned());
            open = true;
        }
    }
    out
}
