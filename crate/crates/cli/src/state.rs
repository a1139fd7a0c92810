//! On-disk pipeline state: one directory of plain text files.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use bibcite_core::citegraph::io::{load_index, BuildManifest};
use bibcite_core::citegraph::CitationIndex;
use bibcite_core::corpus::ingest::{parse_links, parse_records, write_links, write_records};
use bibcite_core::corpus::Corpus;
use bibcite_core::refparse::ingest::{parse_reference_file, write_reference_lists, ReferenceStore};
use bibcite_core::resolver::io::parse_resolved;
use bibcite_core::resolver::ResolvedReference;

use crate::CliError;

pub const RECORDS: &str = "records.txt";
pub const LINKS: &str = "links.tsv";
pub const REFERENCES: &str = "references.txt";
pub const VENUES: &str = "venues.tsv";
pub const RESOLVED: &str = "resolved.tsv";
pub const UNRESOLVED: &str = "unresolved.tsv";
pub const SOURCE_COUNTS: &str = "source_counts.tsv";
pub const INDEX: &str = "index.tsv";
pub const MANIFEST: &str = "manifest.json";
pub const PREV_INDEX: &str = "index.prev.tsv";
pub const PREV_MANIFEST: &str = "manifest.prev.json";
pub const QUERIES: &str = "queries.txt";
/// Copy of the index the last alert run compared against.
pub const ALERTED_INDEX: &str = "index.alerted.tsv";
pub const ALERTED_MANIFEST: &str = "manifest.alerted.json";

pub struct DataDir {
    root: PathBuf,
}

impl DataDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        DataDir { root: root.into() }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn read(&self, name: &str) -> Result<Option<String>, CliError> {
        read_optional(&self.path(name))
    }

    pub fn exists(&self, name: &str) -> bool {
        self.path(name).exists()
    }

    /// Writes via a temporary file and rename, so readers never see a
    /// half-written file.
    pub fn write(&self, name: &str, content: &str) -> Result<(), CliError> {
        fs::create_dir_all(&self.root).map_err(|e| CliError::internal(format!("create {}: {e}", self.root.display())))?;
        let tmp = self.path(&format!(".{name}.tmp"));
        fs::write(&tmp, content).map_err(|e| CliError::internal(format!("write {}: {e}", tmp.display())))?;
        fs::rename(&tmp, self.path(name)).map_err(|e| CliError::internal(format!("rename into {name}: {e}")))
    }

    pub fn rename(&self, from: &str, to: &str) -> Result<(), CliError> {
        fs::rename(self.path(from), self.path(to)).map_err(|e| CliError::internal(format!("rename {from} to {to}: {e}")))
    }

    pub fn references(&self) -> Result<ReferenceStore, CliError> {
        let mut store = ReferenceStore::new();
        if let Some(text) = self.read(REFERENCES)? {
            for list in parse_reference_file(&text).map_err(|e| CliError::input(format!("{REFERENCES}: {e}")))? {
                store.insert(list);
            }
        }
        Ok(store)
    }

    pub fn save_references(&self, store: &ReferenceStore) -> Result<(), CliError> {
        self.write(REFERENCES, &write_reference_lists(store.lists()))
    }

    /// Records, links and reference-list flags.
    pub fn corpus(&self) -> Result<Corpus, CliError> {
        let mut corpus = Corpus::new();
        if let Some(text) = self.read(RECORDS)? {
            for r in parse_records(&text, None).map_err(|e| CliError::input(format!("{RECORDS}: {e}")))? {
                corpus.add_record(r).map_err(|e| CliError::input(format!("{RECORDS}: {e}")))?;
            }
        }
        if let Some(text) = self.read(LINKS)? {
            for l in parse_links(&text).map_err(|e| CliError::input(format!("{LINKS}: {e}")))? {
                corpus.insert_link(l).map_err(|e| CliError::input(format!("{LINKS}: {e}")))?;
            }
        }
        for citing in self.references()?.citing_papers() {
            corpus.mark_has_references(citing);
        }
        Ok(corpus)
    }

    pub fn save_corpus(&self, corpus: &Corpus) -> Result<(), CliError> {
        self.write(RECORDS, &write_records(corpus.records()))?;
        self.write(LINKS, &write_links(corpus.links()))
    }

    pub fn resolved(&self) -> Result<Vec<ResolvedReference>, CliError> {
        let text = self.read(RESOLVED)?.ok_or_else(|| CliError::input("no resolved table; run `resolve` first"))?;
        parse_resolved(&text).map_err(|e| CliError::input(format!("{RESOLVED}: {e}")))
    }

    fn index_pair(&self, pairs: &str, manifest: &str) -> Result<Option<CitationIndex>, CliError> {
        let (Some(text), Some(m)) = (self.read(pairs)?, self.read(manifest)?) else {
            return Ok(None);
        };
        let manifest = BuildManifest::from_json(&m).map_err(|e| CliError::input(format!("{manifest}: {e}")))?;
        load_index(&text, &manifest).map(Some).map_err(|e| CliError::input(format!("{pairs}: {e}")))
    }

    pub fn index(&self) -> Result<CitationIndex, CliError> {
        self.index_pair(INDEX, MANIFEST)?.ok_or_else(|| CliError::input("no citation index; run `build-index` first"))
    }

    pub fn previous_index(&self) -> Result<Option<CitationIndex>, CliError> {
        self.index_pair(PREV_INDEX, PREV_MANIFEST)
    }

    pub fn alerted_index(&self) -> Result<Option<CitationIndex>, CliError> {
        self.index_pair(ALERTED_INDEX, ALERTED_MANIFEST)
    }

    /// Records the current index as the baseline for the next alert run.
    pub fn mark_alerted(&self) -> Result<(), CliError> {
        for (from, to) in [(INDEX, ALERTED_INDEX), (MANIFEST, ALERTED_MANIFEST)] {
            let text = self.read(from)?.ok_or_else(|| CliError::internal(format!("{from} vanished")))?;
            self.write(to, &text)?;
        }
        Ok(())
    }
}

pub fn read_optional(path: &Path) -> Result<Option<String>, CliError> {
    match fs::read_to_string(path) {
        Ok(s) => Ok(Some(s)),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(CliError::input(format!("read {}: {e}", path.display()))),
    }
}

pub fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("read {}: {e}", path.display())))
}
