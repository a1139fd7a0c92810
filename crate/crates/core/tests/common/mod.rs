#![allow(dead_code)]

use bibcite_core::corpus::{AuthorName, BibRecord, Bibcode, Corpus, RecordKind};
use bibcite_core::refparse::RawReference;
use bibcite_core::resolver::{ResolvedReference, VenueAbbrevTable};
use chrono::NaiveDate;

pub fn d(y: i32, m: u32, day: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, day).unwrap()
}

pub fn bc(s: &str) -> Bibcode {
    s.parse().unwrap()
}

pub fn author(s: &str) -> AuthorName {
    s.parse().unwrap()
}

pub fn record(code: &str, title: &str, authors: &[&str]) -> BibRecord {
    BibRecord::new(bc(code), title, authors.iter().map(|a| author(a)).collect(), d(2006, 1, 1))
}

pub fn eprint(code: &str, title: &str, authors: &[&str], ingest: NaiveDate) -> BibRecord {
    let mut r = record(code, title, authors);
    r.kind = RecordKind::Eprint;
    r.refereed = false;
    r.ingest_date = ingest;
    r
}

pub fn raw(citing: &str, source: &str, seq: u32, text: &str) -> RawReference {
    RawReference {
        citing_bibcode: bc(citing),
        source_tag: source.to_owned(),
        sequence: seq,
        text: text.to_owned(),
        received_date: d(2006, 9, 1),
    }
}

pub fn pair(citing: &str, cited: &str) -> ResolvedReference {
    pair_from(citing, cited, "test")
}

pub fn pair_from(citing: &str, cited: &str, source: &str) -> ResolvedReference {
    ResolvedReference {
        citing: bc(citing),
        cited: bc(cited),
        score: 1.0,
        source_tag: source.to_owned(),
        resolved_date: d(2006, 9, 1),
        provenance: None,
    }
}

pub fn venues() -> VenueAbbrevTable {
    VenueAbbrevTable::parse(
        "ASPC\tASPC\nAstron. Soc. Pac. Conf. Ser.\tASPC\nIPM\tIPM\nInf. Process. Manag.\tIPM\nSPIE\tSPIE\nProc. SPIE\tSPIE\n\
ApJ\tApJ\nAstrophys. J.\tApJ\nAJ\tAJ\nccdm\tccdm\nAAS\tAAS\nlisa\tlisa\nA&A\tA&A\nMNRAS\tMNRAS\n",
    )
    .unwrap()
}

/// Corpus holding the seven bibliography records plus a citing paper.
pub fn paper_corpus() -> Corpus {
    let mut c = Corpus::new();
    for (code, title, first) in [
        ("1999ASPC..172..291A", "The ADS abstract service reference resolver", "Accomazzi, A."),
        ("2004ccdm.conf..521D", "Reference resolution in practice", "Demleitner, M."),
        ("2005IPM....41.1395K", "The effect of use and access on citations", "Kurtz, M. J."),
        ("2002SPIE.4847..238K", "Second order bibliometric operators", "Kurtz, M. J."),
        ("2003AAS...203.2005K", "myADS personal notification", "Kurtz, M. J."),
        ("2003lisa.conf..185S", "Comparing citation services", "Smith, A."),
        ("2006AJ....132....1Z", "A citing paper", "Zed, A."),
    ] {
        c.add_record(record(code, title, &[first])).unwrap();
    }
    c.add_record(eprint("2006cs........8027H", "myADS-arXiv tailored alerts", &["Henneken, E."], d(2006, 8, 10))).unwrap();
    c
}

/// Reference Levenshtein distance by full dynamic-programming table.
pub fn levenshtein_oracle(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in t.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in t[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = t[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            t[i][j] = sub.min(t[i - 1][j] + 1).min(t[i][j - 1] + 1);
        }
    }
    t[a.len()][b.len()]
}
