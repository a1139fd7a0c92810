use std::collections::BTreeMap;

use thiserror::Error;

use crate::text::venue_key;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VenueTableError {
    #[error("line {line}: expected alias<TAB>code")]
    Malformed { line: usize },
    #[error("line {line}: venue code {code:?} must be 1-5 alphanumeric or '&' characters")]
    BadCode { line: usize, code: String },
}

/// Maps venue tokens seen in references to bibcode venue codes.
///
/// Keys are folded with [`venue_key`]. Every code is also reachable through
/// its own spelling. An alias listed against several codes expands to all of
/// them, in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VenueAbbrevTable {
    entries: BTreeMap<String, Vec<String>>,
}

fn valid_code(code: &str) -> bool {
    !code.is_empty() && code.len() <= 5 && code.chars().all(|c| c.is_ascii_alphanumeric() || c == '&')
}

impl VenueAbbrevTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, alias: &str, code: &str) -> bool {
        if !valid_code(code) {
            return false;
        }
        for key in [venue_key(alias), venue_key(code)] {
            let codes = self.entries.entry(key).or_default();
            if !codes.iter().any(|c| c == code) {
                codes.push(code.to_owned());
            }
        }
        true
    }

    /// Parses `alias<TAB>code` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, VenueTableError> {
        let mut table = Self::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (alias, code) = line.split_once('\t').ok_or(VenueTableError::Malformed { line: i + 1 })?;
            let code = code.trim();
            if alias.trim().is_empty() {
                return Err(VenueTableError::Malformed { line: i + 1 });
            }
            if !table.insert(alias.trim(), code) {
                return Err(VenueTableError::BadCode { line: i + 1, code: code.to_owned() });
            }
        }
        Ok(table)
    }

    /// Venue codes for a reference token; empty when unmapped.
    pub fn lookup(&self, token: &str) -> &[String] {
        self.entries.get(&venue_key(token)).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_lookup() {
        let t = VenueAbbrevTable::parse("# venues\nAstrophys. J.\tApJ\nApJ Lett.\tApJ\nInf. Process. Manag.\tIPM\n").unwrap();
        assert_eq!(t.lookup("astrophys.j."), ["ApJ"]);
        assert_eq!(t.lookup("APJ"), ["ApJ"]);
        assert_eq!(t.lookup("Inf Process Manag"), ["IPM"]);
        assert!(t.lookup("J. Unknownia").is_empty());
    }

    #[test]
    fn alias_with_several_codes_expands_in_order() {
        let t = VenueAbbrevTable::parse("Proc. SPIE\tSPIE\nProc. SPIE\tPSPIE\n").unwrap();
        assert_eq!(t.lookup("Proc. SPIE"), ["SPIE", "PSPIE"]);
    }

    #[test]
    fn rejects_bad_lines() {
        assert_eq!(VenueAbbrevTable::parse("ApJ ApJ\n"), Err(VenueTableError::Malformed { line: 1 }));
        assert!(matches!(VenueAbbrevTable::parse("x\tTOOLONG\n"), Err(VenueTableError::BadCode { line: 1, .. })));
    }
}
