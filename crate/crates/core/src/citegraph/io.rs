//! Index export: a tab-separated pair list plus a JSON build manifest.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{CitationIndex, PolicyConfig};
use crate::corpus::ingest::TaggedError;
use crate::corpus::Bibcode;

pub fn write_index_pairs(index: &CitationIndex) -> String {
    index.pairs().map(|(a, b)| format!("{a}\t{b}\n")).collect()
}

pub fn parse_index_pairs(text: &str) -> Result<Vec<(Bibcode, Bibcode)>, TaggedError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (a, b) = line.split_once('\t').ok_or_else(|| TaggedError::new(i + 1, "expected citing<TAB>cited"))?;
        let code = |s: &str| s.trim().parse::<Bibcode>().map_err(|e| TaggedError::new(i + 1, format!("{s:?}: {e}")));
        out.push((code(a)?, code(b)?));
    }
    Ok(out)
}

pub fn sha256_hex(data: &str) -> String {
    Sha256::digest(data.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigests {
    pub records_sha256: String,
    pub resolved_sha256: String,
    pub links_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildManifest {
    pub build_date: String,
    pub policy: PolicyConfig,
    pub pairs: usize,
    pub cited_papers: usize,
    pub citing_papers: usize,
    pub policy_actions: usize,
    pub inputs: InputDigests,
}

impl BuildManifest {
    pub fn new(index: &CitationIndex, policy_actions: usize, inputs: InputDigests) -> Self {
        BuildManifest {
            build_date: index.build_date().format("%Y-%m-%d").to_string(),
            policy: *index.policy(),
            pairs: index.pair_count(),
            cited_papers: index.cited_papers().count(),
            citing_papers: index.citing_papers().count(),
            policy_actions,
            inputs,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Reloads an exported index under the manifest's policy.
pub fn load_index(pairs_text: &str, manifest: &BuildManifest) -> Result<CitationIndex, TaggedError> {
    let pairs = parse_index_pairs(pairs_text)?;
    Ok(CitationIndex::from_pairs(pairs.iter().map(|(a, b)| (a, b)), manifest.policy))
}
