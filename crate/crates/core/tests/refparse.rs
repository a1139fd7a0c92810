mod common;

use bibcite_core::refparse::{
    document_references, extract_reference_section, parse_reference, split_reference_strings, ParseFailureReason, RawDocument,
    SectionNotFound,
};
use common::*;
use proptest::prelude::*;

fn doc(body: &str) -> RawDocument {
    RawDocument {
        citing_bibcode: bc("2006AJ....132....1Z"),
        source_tag: "arXiv".into(),
        body_text: body.into(),
        received_date: d(2006, 9, 1),
    }
}

#[test]
fn section_after_single_heading() {
    let body = "Some text about resolvers.\nReferences\nSmith, J. 2001, ApJ, 550, 100\n";
    assert_eq!(extract_reference_section(&doc(body)).unwrap(), "Smith, J. 2001, ApJ, 550, 100");
}

#[test]
fn heading_in_prose_is_not_a_section() {
    let body = "See the References at the end for details.\nSmith, J. 2001, ApJ, 550, 100\n";
    assert_eq!(extract_reference_section(&doc(body)), Err(SectionNotFound));
}

#[test]
fn last_heading_wins() {
    let body = "Intro\nReferences\nold list\n\nAppendix text\n5. REFERENCES\nKurtz, M. J. 2003, AAS, 203, 2005\n";
    assert_eq!(extract_reference_section(&doc(body)).unwrap(), "Kurtz, M. J. 2003, AAS, 203, 2005");
}

#[test]
fn other_heading_names() {
    for h in ["Bibliography", "LITERATURE CITED", "7 References"] {
        let body = format!("text\n{h}\nA, B. 2000, AJ, 1, 2\n");
        assert_eq!(extract_reference_section(&doc(&body)).unwrap(), "A, B. 2000, AJ, 1, 2", "{h}");
    }
}

#[test]
fn bracket_markers_split_in_order() {
    let refs = split_reference_strings("[1] Alpha, A. 2000\n[2] Beta, B. 2001", &bc("2006AJ....132....1Z"), "x", d(2006, 1, 1));
    assert_eq!(refs.len(), 2);
    assert!(refs[0].text.contains("Alpha"));
    assert!(refs[1].text.contains("Beta"));
    assert_eq!((refs[0].sequence, refs[1].sequence), (1, 2));
}

#[test]
fn indented_continuation_merges() {
    let refs = split_reference_strings("Smith, J. 2001,\n  ApJ, 550, 100", &bc("2006AJ....132....1Z"), "x", d(2006, 1, 1));
    assert_eq!(refs.len(), 1);
    assert_eq!(refs[0].text, "Smith, J. 2001, ApJ, 550, 100");
}

#[test]
fn ten_unmarked_lines_give_ten_references() {
    let lines: Vec<String> = (0..10).map(|i| format!("Author{i}, A. {}, ApJ, {}, {}", 1990 + i, 100 + i, 10 * i + 1)).collect();
    let section = lines.join("\n");
    let refs = split_reference_strings(&section, &bc("2006AJ....132....1Z"), "x", d(2006, 1, 1));
    assert_eq!(refs.len(), lines.len());
    let seqs: Vec<u32> = refs.iter().map(|r| r.sequence).collect();
    assert_eq!(seqs, (1..=10).collect::<Vec<u32>>());
}

#[test]
fn whole_document_pipeline() {
    let body = "Body\nReferences\n1. Accomazzi, A., et al. 1999, ASPC, 172, 291\n2. Kurtz, M. J., et al. 2005,\n   IPM, 41, 1395\n";
    let refs = document_references(&doc(body)).unwrap();
    assert_eq!(refs.len(), 2);
    let p = parse_reference(&refs[1], 0).unwrap();
    assert_eq!((p.year, p.volume.as_deref(), p.page.as_deref()), (Some(2005), Some("41"), Some("1395")));
}

#[test]
fn accomazzi_reference_fields() {
    let p = parse_reference(&raw("2006AJ....132....1Z", "x", 1, "Accomazzi, A., et al. 1999, ASPC, 172, 291"), 0).unwrap();
    assert_eq!(p.authors, vec![author("Accomazzi, A.")]);
    assert_eq!(p.year, Some(1999));
    assert_eq!(p.venue_token.as_deref(), Some("ASPC"));
    assert_eq!(p.volume.as_deref(), Some("172"));
    assert_eq!(p.page.as_deref(), Some("291"));
    assert_eq!(p.confidence, 1.0);
    assert_eq!(p.variant_index, 0);
}

#[test]
fn kurtz_spie_reference_fields() {
    let p = parse_reference(&raw("2006AJ....132....1Z", "x", 1, "Kurtz, M. J., et al. 2002, SPIE, 4847, 238"), 0).unwrap();
    assert_eq!(p.year, Some(2002));
    assert_eq!(p.venue_token.as_deref(), Some("SPIE"));
    assert_eq!(p.volume.as_deref(), Some("4847"));
    assert_eq!(p.page.as_deref(), Some("238"));
    assert_eq!(p.first_author().unwrap().surname, "Kurtz");
}

#[test]
fn scribble_is_a_parse_failure() {
    let r = raw("2006AJ....132....1Z", "x", 1, "mysterious scribble 12345");
    let f = parse_reference(&r, 0).unwrap_err();
    assert_eq!(f.reason, ParseFailureReason::NoTemplate);
    assert_eq!(f.raw.text, "mysterious scribble 12345");
}

#[test]
fn variant_beyond_alternates_fails() {
    let r = raw("2006AJ....132....1Z", "x", 1, "Accomazzi, A., et al. 1999, ASPC, 172, 291");
    let f = parse_reference(&r, 50).unwrap_err();
    assert!(matches!(f.reason, ParseFailureReason::NoSuchVariant { requested: 50, .. }));
}

#[test]
fn several_styles_parse() {
    for text in [
        "[3] Kurtz, M. J. 2003, AAS, 203, 2005",
        "M. J. Kurtz, ApJ 550, 100 (2001)",
        "Smith J, Jones K 2001 ApJ 550 100",
        "Kurtz et al. 2005, IPM, 41, 1395",
        "ApJ, 550, 100 (2001)",
    ] {
        let p = parse_reference(&raw("2006AJ....132....1Z", "x", 1, text), 0).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert!(p.year.is_some(), "{text}");
        assert!(p.confidence > 0.0 && p.confidence <= 1.0);
    }
}

fn non_ws(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

proptest! {
    #[test]
    fn splitting_loses_no_characters(lines in proptest::collection::vec("( {0,2})([A-Za-z0-9\\[\\]., ]{0,20})", 0..15)) {
        let section = lines.join("\n");
        let refs = split_reference_strings(&section, &bc("2006AJ....132....1Z"), "x", d(2006, 1, 1));
        let joined: String = refs.iter().map(|r| r.text.as_str()).collect();
        prop_assert_eq!(non_ws(&joined), non_ws(&section));
        for (i, r) in refs.iter().enumerate() {
            prop_assert_eq!(r.sequence as usize, i + 1);
            prop_assert!(!r.text.trim().is_empty());
        }
    }

    #[test]
    fn parsing_is_deterministic(text in "[A-Za-z., ]{0,12}(19|20)[0-9]{2}[A-Za-z,. ]{0,8}[0-9]{0,4}[, ]{0,2}[0-9]{0,4}", v in 0usize..4) {
        let r = raw("2006AJ....132....1Z", "x", 1, &text);
        let a = parse_reference(&r, v);
        let b = parse_reference(&r, v);
        prop_assert_eq!(&a, &b);
        if let Ok(p) = a {
            prop_assert!(p.confidence > 0.0 && p.confidence <= 1.0);
            if p.confidence == 1.0 {
                prop_assert!(!p.authors.is_empty() && p.year.is_some() && p.venue_token.is_some() && p.volume.is_some() && p.page.is_some());
            }
            if let Some(y) = p.year {
                prop_assert!((1500..=2100).contains(&y));
            }
        }
    }
}
