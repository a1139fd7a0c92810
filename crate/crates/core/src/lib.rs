//! Reference resolution and citation-index engine.
//!
//! The pipeline runs in stages: raw reference strings are parsed
//! ([`refparse`]), resolved against a record store ([`corpus`],
//! [`resolver`]), inverted into a citation index under the e-print
//! policies ([`citegraph`]) and queried ([`metrics`], [`alerts`]).

pub mod alerts;
pub mod citegraph;
pub mod corpus;
pub mod metrics;
pub mod refparse;
pub mod resolver;
pub mod text;

pub use citegraph::{CitationIndex, PolicyConfig};
pub use corpus::{AuthorName, BibRecord, Bibcode, Corpus, RecordKind};
pub use refparse::{ParsedReference, RawReference};
pub use resolver::{ResolutionConfig, ResolvedReference, UnresolvedReference, VenueAbbrevTable};
