//! Inversion of the resolved table into a citation index under the
//! e-print policies, plus unresolved and per-source reporting.

mod index;
pub mod io;
mod policy;
mod report;

pub use index::{rebuild_citation_index, reference_list_status, CitationIndex, IndexBuild, ReferenceListStatus};
pub use policy::{apply_eprint_policy, PolicyAction, PolicyConfig, PolicyOutcome, PolicyRule, DEFAULT_STALENESS_DAYS};
pub use report::{
    parse_source_counts, render_coverage, source_coverage_report, unresolved_key, unresolved_report, write_source_counts,
    write_unresolved_report, CoverageRow, UNPARSED_KEY,
};
