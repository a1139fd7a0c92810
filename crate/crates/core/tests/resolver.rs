mod common;

use std::collections::BTreeSet;

use bibcite_core::corpus::{Bibcode, Corpus};
use bibcite_core::refparse::{parse_reference, RawReference};
use bibcite_core::resolver::io::{parse_resolved, parse_unresolved, write_resolved, write_unresolved};
use bibcite_core::resolver::{
    resolve_batch, resolve_reference, similarity_score, tentative_bibcodes, Resolution, ResolutionConfig, ResolveError, UnresolvedReason,
};
use common::*;
use proptest::prelude::*;

const CITING: &str = "2006AJ....132....1Z";

fn parsed(text: &str) -> bibcite_core::refparse::ParsedReference {
    parse_reference(&raw(CITING, "x", 1, text), 0).unwrap()
}

fn resolve(text: &str, store: &Corpus) -> Resolution {
    resolve_reference(&raw(CITING, "x", 1, text), store, &venues(), &ResolutionConfig::default()).unwrap()
}

#[test]
fn tentative_bibcode_examples() {
    let t = venues();
    assert_eq!(tentative_bibcodes(&parsed("Accomazzi, A., et al. 1999, ASPC, 172, 291"), &t).unwrap(), vec![bc("1999ASPC..172..291A")]);
    assert_eq!(tentative_bibcodes(&parsed("Kurtz, M. J., et al. 2005, IPM, 41, 1395"), &t).unwrap(), vec![bc("2005IPM....41.1395K")]);
    assert!(tentative_bibcodes(&parsed("Smith, J. 2001, J. Unknownia, 5, 10"), &t).unwrap().is_empty());
}

#[test]
fn missing_year_cannot_form_bibcode() {
    let mut p = parsed("Smith, J. 2001, ApJ, 550, 100");
    p.year = None;
    assert!(tentative_bibcodes(&p, &venues()).is_err());
}

#[test]
fn alias_expands_to_code() {
    let p = parsed("Kurtz, M. J., et al. 2005, Inf. Process. Manag., 41, 1395");
    assert_eq!(tentative_bibcodes(&p, &venues()).unwrap(), vec![bc("2005IPM....41.1395K")]);
}

#[test]
fn similarity_examples() {
    let c = paper_corpus();
    let cfg = ResolutionConfig::default();
    let t = venues();
    let rec = c.find_by_bibcode(&bc("2005IPM....41.1395K")).unwrap();
    assert_eq!(similarity_score(&parsed("Kurtz, M. J. 2005, IPM, 41, 1395"), rec, &cfg, &t), 1.0);

    let w = cfg.weights;
    let year_off = w.year * 0.5 + w.authors + w.venue + w.volume_page;
    assert_eq!(year_off, 0.875);
    let s = similarity_score(&parsed("Kurtz, M. J. 2004, IPM, 41, 1395"), rec, &cfg, &t);
    assert!((s - year_off).abs() < 1e-12, "{s}");

    // "abcde" and "kurtz" share no aligned character.
    assert_eq!(levenshtein_oracle("abcde", "kurtz"), 5);
    assert_eq!(similarity_score(&parsed("Abcde, Q. 1950, MNRAS, 9, 9"), rec, &cfg, &t), 0.0);
}

#[test]
fn similarity_is_bounded() {
    let c = paper_corpus();
    let cfg = ResolutionConfig::default();
    for rec in c.records() {
        for text in ["Kurtz, M. J. 2004, IPM, 41, 1395", "Accomazzi, A. 1999, ASPC, 172, 291", "Abcde, Q. 1950, MNRAS, 9, 9"] {
            let s = similarity_score(&parsed(text), rec, &cfg, &venues());
            assert!((0.0..=1.0).contains(&s));
        }
    }
}

#[test]
fn demleitner_resolves() {
    let c = paper_corpus();
    let r = resolve("Demleitner, M. 2004, ccdm.conf, 521", &c);
    let pair = r.resolved().expect("resolved");
    assert_eq!(pair.citing, bc(CITING));
    assert_eq!(pair.cited, bc("2004ccdm.conf..521D"));
    assert!(pair.score >= 0.8);
}

#[test]
fn absent_target_is_no_candidate() {
    let mut c = Corpus::new();
    c.add_record(record(CITING, "A citing paper", &["Zed, A."])).unwrap();
    match resolve("Demleitner, M. 2004, ccdm.conf, 521", &c) {
        Resolution::Unresolved(u) => {
            assert_eq!(u.reason, UnresolvedReason::NoCandidate);
            assert!(u.best_guess.is_some());
        }
        other => panic!("{other:?}"),
    }
}

/// One candidate whose venue and year agree, whose stored volume and page
/// disagree with its bibcode, and whose surname is three edits from the
/// cited one.
fn below_threshold_corpus() -> Corpus {
    let mut c = paper_corpus();
    let mut r = record("2001ApJ...550..100S", "A near miss", &["Smoke, J."]);
    r.volume = Some("551".into());
    r.first_page = Some("99".into());
    c.add_record(r).unwrap();
    c
}

#[test]
fn near_miss_is_below_threshold() {
    let c = below_threshold_corpus();
    let cfg = ResolutionConfig::default();
    let w = cfg.weights;
    let author_sim = 1.0 - levenshtein_oracle("smith", "smoke") as f64 / 5.0;
    let expected = w.year + w.venue + w.authors * author_sim;
    assert!((expected - 0.6).abs() < 1e-12);
    match resolve("Smith, J. 2001, ApJ, 550, 100", &c) {
        Resolution::Unresolved(u) => {
            assert_eq!(u.reason, UnresolvedReason::BelowThreshold);
            assert!((u.best_score - expected).abs() < 1e-9, "{}", u.best_score);
            assert!(u.best_guess.is_some());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn equal_candidates_are_ambiguous() {
    let mut c = paper_corpus();
    c.add_record(record("2001ApJ...550..100S", "One", &["Smith, J."])).unwrap();
    c.add_record(record("2001ApJ...550..100J", "Two", &["Jones, K."])).unwrap();
    let cfg = ResolutionConfig::with_threshold(0.7).unwrap();
    let r = resolve_reference(&raw(CITING, "x", 1, "ApJ, 550, 100 (2001)"), &c, &venues(), &cfg).unwrap();
    match r {
        Resolution::Unresolved(u) => {
            assert_eq!(u.reason, UnresolvedReason::Ambiguous);
            assert_eq!(u.tied, vec![bc("2001ApJ...550..100J"), bc("2001ApJ...550..100S")]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn initial_breaks_tie() {
    let mut c = paper_corpus();
    c.add_record(record("2001ApJ...550..100S", "One", &["Smith, J."])).unwrap();
    c.add_record(record("2001ApJ...550..100L", "One", &["Smith, K."])).unwrap();
    let r = resolve("Smith, J. 2001, ApJ, 550, 100", &c);
    assert_eq!(r.resolved().unwrap().cited, bc("2001ApJ...550..100S"));
}

#[test]
fn letter_qualifier_fallback() {
    let mut c = paper_corpus();
    c.add_record(record("2001ApJ...550L.100S", "A letter", &["Smith, J."])).unwrap();
    assert_eq!(resolve("Smith, J. 2001, ApJ, 550, 100", &c).resolved().unwrap().cited, bc("2001ApJ...550L.100S"));
}

#[test]
fn self_pair_is_rejected() {
    let c = paper_corpus();
    let r = resolve_reference(
        &raw("2005IPM....41.1395K", "x", 1, "Kurtz, M. J. 2005, IPM, 41, 1395"),
        &c,
        &venues(),
        &ResolutionConfig::default(),
    )
    .unwrap();
    match r {
        Resolution::Unresolved(u) => assert_eq!(u.reason, UnresolvedReason::NoCandidate),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_citing_is_an_error() {
    let c = paper_corpus();
    let e = resolve_reference(
        &raw("1990AJ.....99....1Q", "x", 1, "Kurtz, M. J. 2005, IPM, 41, 1395"),
        &c,
        &venues(),
        &ResolutionConfig::default(),
    )
    .unwrap_err();
    assert_eq!(e, ResolveError::UnknownCitingBibcode(bc("1990AJ.....99....1Q")));
}

fn batch_corpus() -> Corpus {
    let mut c = paper_corpus();
    c.add_record(record("2001ApJ...550..100S", "Stars", &["Smith, J."])).unwrap();
    c.add_record(record("2003A&A...400..200J", "Galaxies", &["Jones, K."])).unwrap();
    c
}

const BATCH: [(&str, bool); 10] = [
    ("Accomazzi, A., et al. 1999, ASPC, 172, 291", true),
    ("Demleitner, M. 2004, ccdm.conf, 521", true),
    ("Kurtz, M. J., et al. 2005, IPM, 41, 1395", true),
    ("Kurtz, M. J., et al. 2002, SPIE, 4847, 238", true),
    ("Kurtz, M. J. 2003, AAS, 203, 2005", true),
    ("mysterious scribble 12345", false),
    ("Smith, A. 2003, lisa.conf, 185", true),
    ("Smith, J. 2001, ApJ, 550, 100", true),
    ("Nobody, X. 1990, MNRAS, 1, 1", false),
    ("Jones, K. 2003, A&A, 400, 200", true),
];

fn batch_raws() -> Vec<RawReference> {
    BATCH.iter().enumerate().map(|(i, (t, _))| raw(CITING, if i < 4 { "AAS" } else { "arXiv" }, i as u32 + 1, t)).collect()
}

#[test]
fn batch_of_ten_with_eight_resolvable() {
    let c = batch_corpus();
    let out = resolve_batch(&batch_raws(), &c, &venues(), &ResolutionConfig::default());
    let resolvable = BATCH.iter().filter(|(_, ok)| *ok).count();
    assert_eq!(out.resolved.len(), resolvable);
    assert_eq!(out.unresolved.len(), BATCH.len() - resolvable);
    assert!(out.errors.is_empty());
    let total_resolved: u64 = out.per_source.values().map(|s| s.resolved).sum();
    assert_eq!(100 * total_resolved / 10, 80);
    // Order follows input.
    let seqs: Vec<u32> = out.unresolved.iter().map(|u| u.raw.sequence).collect();
    assert_eq!(seqs, vec![6, 9]);
    assert_eq!(out.unresolved[0].reason, UnresolvedReason::ParseFailed);
    assert_eq!(out.unresolved[1].reason, UnresolvedReason::NoCandidate);
}

#[test]
fn batch_counts_are_keyed_per_source() {
    let c = batch_corpus();
    let raws = batch_raws();
    let out = resolve_batch(&raws, &c, &venues(), &ResolutionConfig::default());
    // Hand tally: AAS holds items 1-4, all resolvable; arXiv holds 5-10 with two failures.
    let aas = &out.per_source["AAS"];
    let arxiv = &out.per_source["arXiv"];
    assert_eq!((aas.attempted, aas.resolved), (4, 4));
    assert_eq!((arxiv.attempted, arxiv.resolved), (6, 4));
    assert_eq!(aas.year_range, Some((2006, 2006)));
}

#[test]
fn empty_batch() {
    let out = resolve_batch(&[], &paper_corpus(), &venues(), &ResolutionConfig::default());
    assert!(out.resolved.is_empty() && out.unresolved.is_empty() && out.per_source.is_empty());
}

#[test]
fn batch_records_item_errors_without_aborting() {
    let c = batch_corpus();
    let mut raws = batch_raws();
    raws.insert(0, raw("1990AJ.....99....1Q", "AAS", 1, "Kurtz, M. J. 2003, AAS, 203, 2005"));
    let out = resolve_batch(&raws, &c, &venues(), &ResolutionConfig::default());
    assert_eq!(out.errors.len(), 1);
    assert_eq!(out.resolved.len(), 8);
}

#[test]
fn tables_round_trip() {
    let c = batch_corpus();
    let out = resolve_batch(&batch_raws(), &c, &venues(), &ResolutionConfig::default());
    assert_eq!(parse_resolved(&write_resolved(&out.resolved)).unwrap(), out.resolved);
    let back = parse_unresolved(&write_unresolved(&out.unresolved)).unwrap();
    assert_eq!(back.len(), out.unresolved.len());
    for (a, b) in back.iter().zip(&out.unresolved) {
        assert_eq!((a.reason, &a.raw), (b.reason, &b.raw));
    }
}

#[test]
fn invariants_of_resolved_pairs() {
    let c = batch_corpus();
    let cfg = ResolutionConfig::default();
    let out = resolve_batch(&batch_raws(), &c, &venues(), &cfg);
    for r in &out.resolved {
        assert!(r.score >= cfg.threshold);
        assert_ne!(r.citing, r.cited);
        assert!(c.contains(&r.citing) && c.contains(&r.cited));
    }
    for u in &out.unresolved {
        if u.reason == UnresolvedReason::BelowThreshold {
            assert!(u.best_score < cfg.threshold && u.best_guess.is_some());
        }
    }
}

fn perturbed(text: &str, kind: u8) -> String {
    match kind % 5 {
        0 => text.to_owned(),
        1 => text.replacen("Kurtz", "Kurts", 1).replacen("Smith", "Smyth", 1),
        2 => text.replacen("200", "199", 1),
        3 => text.replacen(", 1", ", 7", 1),
        _ => text.replacen(", ", " ", 1),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn raising_threshold_never_adds_pairs(kinds in proptest::collection::vec(any::<u8>(), 10), lo in 0.05f64..1.0, gap in 0.0f64..1.0) {
        let c = batch_corpus();
        let raws: Vec<RawReference> = batch_raws()
            .into_iter()
            .zip(&kinds)
            .map(|(mut r, k)| { r.text = perturbed(&r.text, *k); r })
            .collect();
        let hi = (lo + gap).min(1.0);
        let (lo_cfg, hi_cfg) = (ResolutionConfig::with_threshold(lo).unwrap(), ResolutionConfig::with_threshold(hi).unwrap());
        let cited = |r: &RawReference, cfg: &ResolutionConfig| -> Option<Bibcode> {
            resolve_reference(r, &c, &venues(), cfg).unwrap().resolved().map(|p| p.cited.clone())
        };
        for r in &raws {
            if let Some(b) = cited(r, &hi_cfg) {
                prop_assert_eq!(cited(r, &lo_cfg), Some(b));
            }
        }
        let b = resolve_batch(&raws, &c, &venues(), &hi_cfg);
        let a = resolve_batch(&raws, &c, &venues(), &lo_cfg);
        let pairs = |rs: &[bibcite_core::resolver::ResolvedReference]| rs.iter().map(|r| (r.citing.clone(), r.cited.clone())).collect::<BTreeSet<_>>();
        prop_assert!(pairs(&b.resolved).is_subset(&pairs(&a.resolved)));
        let again = resolve_batch(&raws, &c, &venues(), &ResolutionConfig::with_threshold(hi).unwrap());
        prop_assert_eq!(b, again);
    }
}
