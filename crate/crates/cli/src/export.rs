//! XML Abstracts and RSS 2.0 encoders.
//!
//! XML Abstracts carries a citation count per record and a total on the
//! root. RSS is deliberately thin: title, link, identifier and date, and
//! never a count.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Cursor;

use bibcite_core::corpus::{BibRecord, Bibcode};
use chrono::{NaiveDate, NaiveTime};
use quick_xml::events::{BytesDecl, BytesText, Event};
use quick_xml::Writer;
use thiserror::Error;

/// Schema shipped with the crate; XML Abstracts output validates against it.
pub const XML_ABSTRACTS_SCHEMA: &str = include_str!("../schema/xml_abstracts.xsd");

pub const DEFAULT_LINK_BASE: &str = "https://example.org/abs/";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExportError {
    #[error("no citation count for {0}")]
    MissingCount(Bibcode),
    #[error("declared total {declared} differs from the sum of record counts {sum}")]
    TotalMismatch { declared: usize, sum: usize },
}

// XML 1.0 forbids most control characters even when escaped.
fn clean(s: &str) -> String {
    s.chars().map(|c| if c.is_control() && !matches!(c, '\t' | '\n' | '\r') { ' ' } else { c }).collect()
}

fn finish(w: Writer<Cursor<Vec<u8>>>) -> String {
    let mut s = String::from_utf8(w.into_inner().into_inner()).expect("writer only receives UTF-8");
    s.push('\n');
    s
}

type XmlResult = Result<(), std::io::Error>;

fn text_element(w: &mut Writer<Cursor<Vec<u8>>>, name: &str, text: &str) -> XmlResult {
    w.create_element(name).write_text_content(BytesText::new(&clean(text)))?;
    Ok(())
}

/// Renders records with their citation counts.
///
/// Every record must have an entry in `counts`, and `total` must equal
/// the sum of those entries.
pub fn export_xml_abstracts(
    query: &str,
    records: &[&BibRecord],
    counts: &BTreeMap<Bibcode, usize>,
    total: usize,
) -> Result<String, ExportError> {
    let mut sum = 0;
    for r in records {
        sum += *counts.get(&r.bibcode).ok_or_else(|| ExportError::MissingCount(r.bibcode.clone()))?;
    }
    if sum != total {
        return Err(ExportError::TotalMismatch { declared: total, sum });
    }
    let mut w = Writer::new_with_indent(Cursor::new(Vec::new()), b' ', 2);
    let query = clean(query);
    let record_count = records.len().to_string();
    let total = total.to_string();
    w.write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None))).expect("writing to memory cannot fail");
    w.create_element("records")
        .with_attributes([("query", query.as_str()), ("record_count", record_count.as_str()), ("total_citations", total.as_str())])
        .write_inner_content(|w| {
            for r in records {
                let n = counts[&r.bibcode].to_string();
                let code = r.bibcode.to_string();
                w.create_element("record").with_attributes([("bibcode", code.as_str()), ("citations", n.as_str())]).write_inner_content(
                    |w| {
                        text_element(w, "title", &r.title)?;
                        if r.authors.is_empty() {
                            w.create_element("authors").write_empty()?;
                        } else {
                            w.create_element("authors").write_inner_content(|w| {
                                for a in &r.authors {
                                    text_element(w, "author", &a.to_string())?;
                                }
                                Ok(())
                            })?;
                        }
                        text_element(w, "year", &format!("{:04}", r.pub_year))?;
                        text_element(w, "refereed", if r.refereed { "true" } else { "false" })?;
                        Ok(())
                    },
                )?;
            }
            Ok(())
        })
        .expect("writing to memory cannot fail");
    Ok(finish(w))
}

/// RFC 822 date for 1 January of `year`, the only date a record carries.
fn pub_date(year: i32) -> String {
    let day = NaiveDate::from_ymd_opt(year, 1, 1).unwrap_or_default();
    day.and_time(NaiveTime::MIN).and_utc().to_rfc2822()
}

/// RSS 2.0 channel with one item per record and no citation data.
pub fn export_rss(records: &[&BibRecord], channel_title: &str, link_base: &str) -> String {
    let mut w = Writer::new_with_indent(Cursor::new(Vec::new()), b' ', 2);
    let written: Result<(), std::io::Error> = (|| {
        w.write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))?;
        w.create_element("rss").with_attribute(("version", "2.0")).write_inner_content(|w| {
            w.create_element("channel").write_inner_content(|w| {
                text_element(w, "title", channel_title)?;
                text_element(w, "link", link_base)?;
                text_element(w, "description", &format!("Records matching: {channel_title}"))?;
                for r in records {
                    let code = r.bibcode.to_string();
                    w.create_element("item").write_inner_content(|w| {
                        text_element(w, "title", &r.title)?;
                        text_element(w, "link", &format!("{link_base}{code}"))?;
                        if !r.authors.is_empty() {
                            let names: Vec<String> = r.authors.iter().map(ToString::to_string).collect();
                            text_element(w, "description", &names.join("; "))?;
                        }
                        w.create_element("guid").with_attribute(("isPermaLink", "false")).write_text_content(BytesText::new(&code))?;
                        text_element(w, "pubDate", &pub_date(r.pub_year))?;
                        Ok(())
                    })?;
                }
                Ok(())
            })?;
            Ok(())
        })?;
        Ok(())
    })();
    written.expect("writing to memory cannot fail");
    finish(w)
}

/// Item identifiers (guid, else link) of an RSS document.
pub fn feed_item_ids(rss: &str) -> Result<BTreeSet<String>, roxmltree::Error> {
    let doc = roxmltree::Document::parse(rss)?;
    Ok(doc
        .descendants()
        .filter(|n| n.has_tag_name("item"))
        .filter_map(|item| {
            let child = |name: &str| item.children().find(|c| c.has_tag_name(name)).and_then(|c| c.text()).map(str::to_owned);
            child("guid").or_else(|| child("link"))
        })
        .collect())
}

/// Items present in `after` but not in `before`, in identifier order.
pub fn new_feed_items(before: &str, after: &str) -> Result<Vec<String>, roxmltree::Error> {
    let old = feed_item_ids(before)?;
    Ok(feed_item_ids(after)?.into_iter().filter(|id| !old.contains(id)).collect())
}
