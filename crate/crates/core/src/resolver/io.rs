//! Tab-separated resolved and unresolved tables.

use std::fmt::Write as _;

use super::{ResolvedReference, UnresolvedReason, UnresolvedReference};
use crate::corpus::ingest::{parse_date, TaggedError};
use crate::corpus::Bibcode;
use crate::refparse::{parse_reference, RawReference};

fn clean(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

/// `citing<TAB>cited<TAB>score<TAB>source<TAB>date`, one pair per line.
pub fn write_resolved<'a>(rows: impl IntoIterator<Item = &'a ResolvedReference>) -> String {
    let mut out = String::new();
    for r in rows {
        let _ =
            writeln!(out, "{}\t{}\t{:.4}\t{}\t{}", r.citing, r.cited, r.score, clean(&r.source_tag), r.resolved_date.format("%Y-%m-%d"));
    }
    out
}

fn bibcode(s: &str, line: usize) -> Result<Bibcode, TaggedError> {
    s.parse().map_err(|e| TaggedError::new(line, format!("malformed bibcode {s:?}: {e}")))
}

pub fn parse_resolved(text: &str) -> Result<Vec<ResolvedReference>, TaggedError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 5 {
            return Err(TaggedError::new(lineno, "expected citing, cited, score, source, date"));
        }
        let score: f64 = cols[2].parse().map_err(|_| TaggedError::new(lineno, format!("bad score {:?}", cols[2])))?;
        out.push(ResolvedReference {
            citing: bibcode(cols[0], lineno)?,
            cited: bibcode(cols[1], lineno)?,
            score,
            source_tag: cols[3].to_owned(),
            resolved_date: parse_date(cols[4], lineno)?,
            provenance: None,
        });
    }
    Ok(out)
}

/// `citing<TAB>source<TAB>sequence<TAB>date<TAB>reason<TAB>best_score<TAB>variant<TAB>text`.
/// The best guess is stored as its variant index and re-parsed on load.
pub fn write_unresolved<'a>(rows: impl IntoIterator<Item = &'a UnresolvedReference>) -> String {
    let mut out = String::new();
    for u in rows {
        let variant = u.best_guess.as_ref().map_or_else(|| "-".to_owned(), |p| p.variant_index.to_string());
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{:.4}\t{}\t{}",
            u.raw.citing_bibcode,
            clean(&u.raw.source_tag),
            u.raw.sequence,
            u.raw.received_date.format("%Y-%m-%d"),
            u.reason.as_str(),
            u.best_score,
            variant,
            clean(&u.raw.text)
        );
    }
    out
}

pub fn parse_unresolved(text: &str) -> Result<Vec<UnresolvedReference>, TaggedError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.splitn(8, '\t').collect();
        if cols.len() < 8 {
            return Err(TaggedError::new(lineno, "expected 8 tab-separated columns"));
        }
        let raw = RawReference {
            citing_bibcode: bibcode(cols[0], lineno)?,
            source_tag: cols[1].to_owned(),
            sequence: cols[2].parse().map_err(|_| TaggedError::new(lineno, "bad sequence"))?,
            received_date: parse_date(cols[3], lineno)?,
            text: cols[7].to_owned(),
        };
        let reason: UnresolvedReason = cols[4].parse().map_err(|e: String| TaggedError::new(lineno, e))?;
        let best_score: f64 = cols[5].parse().map_err(|_| TaggedError::new(lineno, "bad score"))?;
        let best_guess = match cols[6] {
            "-" => None,
            v => {
                let variant: usize = v.parse().map_err(|_| TaggedError::new(lineno, "bad variant"))?;
                Some(parse_reference(&raw, variant).map_err(|e| TaggedError::new(lineno, e.to_string()))?)
            }
        };
        out.push(UnresolvedReference { raw, best_guess, best_score, reason, tied: Vec::new() });
    }
    Ok(out)
}
