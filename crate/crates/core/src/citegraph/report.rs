use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::resolver::{SourceCounts, UnresolvedReference};
use crate::text::{fold, venue_key};

/// Group key for unresolved references without any parsed fields.
pub const UNPARSED_KEY: &str = "unparsed";

/// `surname|year|venue` from the best parse, with `?` for missing parts.
pub fn unresolved_key(u: &UnresolvedReference) -> String {
    let Some(p) = &u.best_guess else {
        return UNPARSED_KEY.to_owned();
    };
    let surname = p.first_author().map_or_else(|| "?".to_owned(), |a| fold(&a.surname));
    let year = p.year.map_or_else(|| "?".to_owned(), |y| y.to_string());
    let venue = p.venue_token.as_deref().map(venue_key).filter(|v| !v.is_empty()).unwrap_or_else(|| "?".to_owned());
    format!("{surname}|{year}|{venue}")
}

/// The `k` most frequent unresolved keys, count descending then key ascending.
pub fn unresolved_report(unresolved: &[UnresolvedReference], k: usize) -> Vec<(String, usize)> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for u in unresolved {
        *counts.entry(unresolved_key(u)).or_default() += 1;
    }
    let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);
    ranked
}

pub fn write_unresolved_report(rows: &[(String, usize)]) -> String {
    rows.iter().map(|(k, n)| format!("{k}\t{n}\n")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageRow {
    pub source_tag: String,
    pub attempted: u64,
    pub resolved: u64,
    /// Whole percent, rounded half up; `None` when nothing was attempted.
    pub rate_percent: Option<u64>,
    pub year_range: Option<(i32, i32)>,
}

impl CoverageRow {
    pub fn rate_text(&self) -> String {
        self.rate_percent.map_or_else(|| "n/a".to_owned(), |r| format!("{r}%"))
    }

    pub fn range_text(&self) -> String {
        self.year_range.map_or_else(|| "n/a".to_owned(), |(lo, hi)| format!("{lo}-{hi}"))
    }
}

pub fn source_coverage_report(counts: &BTreeMap<String, SourceCounts>) -> Vec<CoverageRow> {
    counts
        .iter()
        .map(|(tag, c)| CoverageRow {
            source_tag: tag.clone(),
            attempted: c.attempted,
            resolved: c.resolved,
            rate_percent: (c.attempted > 0).then(|| (c.resolved * 100 + c.attempted / 2) / c.attempted),
            year_range: c.year_range,
        })
        .collect()
}

/// Fixed-width table: Source, Records (resolved), Attempted, Resolved (rate), Date Range.
pub fn render_coverage(rows: &[CoverageRow]) -> String {
    let width = rows.iter().map(|r| r.source_tag.len()).chain([6]).max().unwrap_or(6);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:>8}  {:>9}  {:>8}  Date Range", "Source", "Records", "Attempted", "Resolved");
    for r in rows {
        let _ = writeln!(out, "{:<width$}  {:>8}  {:>9}  {:>8}  {}", r.source_tag, r.resolved, r.attempted, r.rate_text(), r.range_text());
    }
    out
}

/// Tab-separated form of the per-source tallies, for persisting between runs.
pub fn write_source_counts(counts: &BTreeMap<String, SourceCounts>) -> String {
    let mut out = String::new();
    for (tag, c) in counts {
        let (lo, hi) = c.year_range.map_or(("-".to_owned(), "-".to_owned()), |(a, b)| (a.to_string(), b.to_string()));
        let _ = writeln!(out, "{tag}\t{}\t{}\t{lo}\t{hi}", c.attempted, c.resolved);
    }
    out
}

pub fn parse_source_counts(text: &str) -> Result<BTreeMap<String, SourceCounts>, String> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let bad = || format!("line {}: expected source, attempted, resolved, first year, last year", i + 1);
        if cols.len() != 5 {
            return Err(bad());
        }
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
        let year_range = match (cols[3], cols[4]) {
            ("-", "-") => None,
            (a, b) => Some((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?)),
        };
        out.insert(cols[0].to_owned(), SourceCounts { attempted: num(cols[1])?, resolved: num(cols[2])?, year_range });
    }
    Ok(out)
}
