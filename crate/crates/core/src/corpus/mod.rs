//! Canonical record store: bibcodes, records, term search and e-print links.

mod bibcode;
pub mod ingest;
mod record;
mod store;

pub use bibcode::{Bibcode, BibcodeError, BibcodeFields, BIBCODE_LEN, MAX_YEAR, MIN_YEAR};
pub use record::{AuthorName, BibRecord, EprintLink, LinkOrigin, RecordKind};
pub use store::{jaccard, AddOutcome, Ambiguity, Corpus, CorpusError, EprintMatches, SearchFilter, DEFAULT_EPRINT_MATCH_THRESHOLD};
