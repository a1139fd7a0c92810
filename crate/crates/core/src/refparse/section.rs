use once_cell::sync::Lazy;
use regex::Regex;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no reference section heading found")]
pub struct SectionNotFound;

// Own-line heading with optional numbering ("7.", "7", "VII.") and colon.
static HEADING: Lazy<Regex> = Lazy::new(|| {
    Regex::new(r"(?i)^\s*(?:(?:\d+(?:\.\d+)*|[ivxlc]+)\.?\s+)?(references|bibliography|literature\s+cited)\s*:?\s*$").unwrap()
});

/// Text after the last reference heading, trimmed. Anything following it,
/// appendices included, is kept.
pub fn extract_reference_section(body: &str) -> Result<&str, SectionNotFound> {
    let mut start = None;
    let mut offset = 0;
    for line in body.split_inclusive('\n') {
        if HEADING.is_match(line.trim_end_matches(['\n', '\r'])) {
            start = Some(offset + line.len());
        }
        offset += line.len();
    }
    start.map(|s| body[s..].trim()).ok_or(SectionNotFound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_heading() {
        let body = "Intro text.\nReferences\nSmith, J. 2001, ApJ, 550, 100\n";
        assert_eq!(extract_reference_section(body).unwrap(), "Smith, J. 2001, ApJ, 550, 100");
    }

    #[test]
    fn heading_in_prose_is_ignored() {
        let body = "See the References for details.\nSmith, J. 2001, ApJ, 550, 100\n";
        assert_eq!(extract_reference_section(body), Err(SectionNotFound));
    }

    #[test]
    fn last_heading_wins() {
        let body = "References\nnot this\nBody.\nREFERENCES\nthis one\n";
        assert_eq!(extract_reference_section(body).unwrap(), "this one");
    }

    #[test]
    fn numbered_and_alternate_headings() {
        assert_eq!(extract_reference_section("x\n7. Bibliography\nA\n").unwrap(), "A");
        assert_eq!(extract_reference_section("x\nVII. Literature Cited:\r\nB\r\n").unwrap(), "B");
        assert_eq!(extract_reference_section("x\n  references  \nC").unwrap(), "C");
    }

    #[test]
    fn appendix_after_references_is_kept() {
        let body = "References\nA\nAppendix A\nmore\n";
        assert_eq!(extract_reference_section(body).unwrap(), "A\nAppendix A\nmore");
    }
}
