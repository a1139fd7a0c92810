//! Line-oriented tagged record files.
//!
//! ```text
//! %R 1999ASPC..172..291A
//! %T Reference Resolution in the ADS
//! %A Accomazzi, A.
//! %A Eichhorn, G.
//! %D 1999
//! %J ASPC
//! %V 172
//! %P 291
//! %F 1
//! %E journal
//! %S UCP
//! %I 2006-09-01
//! ```
//!
//! Besides the tags above, `%X` carries an abstract, `%K` a keyword
//! (repeatable) and `%I` the ingest date. Blocks are separated by blank
//! lines; a line not starting with `%` continues the previous value.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use chrono::NaiveDate;
use thiserror::Error;

use super::bibcode::Bibcode;
use super::record::{AuthorName, BibRecord, EprintLink, LinkOrigin, RecordKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct TaggedError {
    pub line: usize,
    pub message: String,
}

impl TaggedError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        TaggedError { line, message: message.into() }
    }
}

/// One `%K value` block with the line number of each entry.
#[derive(Debug, Clone, Default)]
pub struct TaggedBlock {
    pub start_line: usize,
    pub entries: Vec<(char, String, usize)>,
}

impl TaggedBlock {
    pub fn first(&self, tag: char) -> Option<(&str, usize)> {
        self.entries.iter().find(|(t, _, _)| *t == tag).map(|(_, v, l)| (v.as_str(), *l))
    }

    pub fn all(&self, tag: char) -> impl Iterator<Item = (&str, usize)> {
        self.entries.iter().filter(move |(t, _, _)| *t == tag).map(|(_, v, l)| (v.as_str(), *l))
    }
}

/// Splits text into tagged blocks. Lines starting with `#` are comments.
pub fn parse_blocks(text: &str) -> Result<Vec<TaggedBlock>, TaggedError> {
    let mut blocks = Vec::new();
    let mut cur = TaggedBlock::default();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim_end();
        if line.trim().is_empty() {
            if !cur.entries.is_empty() {
                blocks.push(std::mem::take(&mut cur));
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('%') {
            let mut chars = rest.chars();
            let tag =
                chars.next().filter(|c| c.is_ascii_alphabetic()).ok_or_else(|| TaggedError::new(lineno, "expected a letter after '%'"))?;
            let value = chars.as_str().trim().to_owned();
            if cur.entries.is_empty() {
                cur.start_line = lineno;
            }
            cur.entries.push((tag.to_ascii_uppercase(), value, lineno));
        } else {
            match cur.entries.last_mut() {
                Some((_, v, _)) => {
                    if !v.is_empty() {
                        v.push(' ');
                    }
                    v.push_str(line.trim());
                }
                None => return Err(TaggedError::new(lineno, "continuation line outside a record")),
            }
        }
    }
    if !cur.entries.is_empty() {
        blocks.push(cur);
    }
    Ok(blocks)
}

fn parse_bool(v: &str, line: usize) -> Result<bool, TaggedError> {
    match v {
        "1" => Ok(true),
        "0" => Ok(false),
        _ => Err(TaggedError::new(line, format!("refereed flag must be 0 or 1, got {v:?}"))),
    }
}

pub fn parse_date(v: &str, line: usize) -> Result<NaiveDate, TaggedError> {
    NaiveDate::parse_from_str(v.trim(), "%Y-%m-%d").map_err(|e| TaggedError::new(line, format!("bad ISO date {v:?}: {e}")))
}

fn record_from_block(b: &TaggedBlock, default_date: Option<NaiveDate>) -> Result<BibRecord, TaggedError> {
    let (code_text, code_line) = b.first('R').ok_or_else(|| TaggedError::new(b.start_line, "record has no %R bibcode"))?;
    let bibcode: Bibcode = code_text.parse().map_err(|e| TaggedError::new(code_line, format!("malformed bibcode {code_text:?}: {e}")))?;
    let ingest_date = match b.first('I') {
        Some((v, l)) => parse_date(v, l)?,
        None => default_date.ok_or_else(|| TaggedError::new(b.start_line, format!("{bibcode}: no %I ingest date")))?,
    };
    let mut authors = Vec::new();
    for (v, l) in b.all('A') {
        authors.push(v.parse::<AuthorName>().map_err(|e| TaggedError::new(l, e))?);
    }
    let title = b.first('T').map(|(v, _)| v.to_owned()).unwrap_or_default();
    let mut rec = BibRecord::new(bibcode, title, authors, ingest_date);
    if let Some((v, l)) = b.first('D') {
        rec.pub_year = v.trim().parse().map_err(|_| TaggedError::new(l, format!("bad year {v:?}")))?;
    }
    if let Some((v, _)) = b.first('J') {
        rec.venue = v.to_owned();
    }
    if let Some((v, _)) = b.first('V') {
        rec.volume = Some(v.to_owned()).filter(|s| !s.is_empty());
    }
    if let Some((v, _)) = b.first('P') {
        rec.first_page = Some(v.to_owned()).filter(|s| !s.is_empty());
    }
    rec.kind = match b.first('E') {
        Some((v, l)) => v.parse::<RecordKind>().map_err(|e| TaggedError::new(l, e))?,
        None => RecordKind::Journal,
    };
    rec.refereed = match b.first('F') {
        Some((v, l)) => parse_bool(v, l)?,
        None => false,
    };
    rec.abstract_text = b.first('X').map(|(v, _)| v.to_owned());
    rec.keywords = b.all('K').map(|(v, _)| v.to_owned()).collect();
    rec.source_tags = b.all('S').map(|(v, _)| v.to_owned()).collect::<BTreeSet<_>>();
    Ok(rec)
}

/// Parses a record file. `default_date` fills in a missing `%I`.
pub fn parse_records(text: &str, default_date: Option<NaiveDate>) -> Result<Vec<BibRecord>, TaggedError> {
    parse_blocks(text)?.iter().map(|b| record_from_block(b, default_date)).collect()
}

/// Canonical tagged rendering; `parse_records(write_records(x))` returns `x`
/// up to the store-maintained reference-list flag.
pub fn write_records<'a>(records: impl IntoIterator<Item = &'a BibRecord>) -> String {
    let mut out = String::new();
    for (i, r) in records.into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "%R {}", r.bibcode);
        let _ = writeln!(out, "%T {}", r.title);
        for a in &r.authors {
            let _ = writeln!(out, "%A {a}");
        }
        let _ = writeln!(out, "%D {}", r.pub_year);
        let _ = writeln!(out, "%J {}", r.venue);
        if let Some(v) = &r.volume {
            let _ = writeln!(out, "%V {v}");
        }
        if let Some(p) = &r.first_page {
            let _ = writeln!(out, "%P {p}");
        }
        let _ = writeln!(out, "%F {}", u8::from(r.refereed));
        let _ = writeln!(out, "%E {}", r.kind.as_str());
        for s in &r.source_tags {
            let _ = writeln!(out, "%S {s}");
        }
        if let Some(x) = &r.abstract_text {
            let _ = writeln!(out, "%X {x}");
        }
        for k in &r.keywords {
            let _ = writeln!(out, "%K {k}");
        }
        let _ = writeln!(out, "%I {}", r.ingest_date.format("%Y-%m-%d"));
    }
    out
}

/// Tab-separated links: `eprint<TAB>published<TAB>origin[<TAB>score]`.
pub fn parse_links(text: &str) -> Result<Vec<EprintLink>, TaggedError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 2 {
            return Err(TaggedError::new(lineno, "expected eprint<TAB>published"));
        }
        let code = |s: &str| s.trim().parse::<Bibcode>().map_err(|e| TaggedError::new(lineno, format!("{s:?}: {e}")));
        let origin = match cols.get(2).map(|s| s.trim()) {
            None | Some("explicit") => LinkOrigin::Explicit,
            Some("matched") => LinkOrigin::Matched,
            Some(o) => return Err(TaggedError::new(lineno, format!("unknown link origin {o:?}"))),
        };
        let match_score = match cols.get(3) {
            Some(s) => Some(s.trim().parse::<f64>().map_err(|_| TaggedError::new(lineno, format!("bad score {s:?}")))?),
            None => None,
        };
        out.push(EprintLink { eprint: code(cols[0])?, published: code(cols[1])?, origin, match_score });
    }
    Ok(out)
}

pub fn write_links<'a>(links: impl IntoIterator<Item = &'a EprintLink>) -> String {
    let mut out = String::new();
    for l in links {
        let _ = write!(out, "{}\t{}\t{}", l.eprint, l.published, l.origin.as_str());
        if let Some(s) = l.match_score {
            let _ = write!(out, "\t{s:.4}");
        }
        out.push('\n');
    }
    out
}
