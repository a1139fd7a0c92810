//! Subcommand definitions and handlers. Every handler returns the text for
//! standard output; diagnostics go to standard error.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use bibcite_core::alerts::{parse_stored_queries, render_alert_batch, write_stored_queries, AlertRegistry};
use bibcite_core::citegraph::io::{sha256_hex, write_index_pairs, BuildManifest, InputDigests};
use bibcite_core::citegraph::{parse_source_counts, write_source_counts};
use bibcite_core::citegraph::{
    rebuild_citation_index, reference_list_status, render_coverage, source_coverage_report, unresolved_report, write_unresolved_report,
    CitationIndex, PolicyConfig, ReferenceListStatus, DEFAULT_STALENESS_DAYS,
};
use bibcite_core::corpus::ingest::parse_records;
use bibcite_core::corpus::{AddOutcome, AuthorName, BibRecord, Bibcode, Corpus, SearchFilter};
use bibcite_core::metrics::{
    filtered_citations, h_index, most_instructive, most_useful, rank_by_citations, write_counted, write_ranked, CitationFilter,
};
use bibcite_core::refparse::ingest::{parse_reference_file, ReferenceList};
use bibcite_core::refparse::{document_references, RawDocument};
use bibcite_core::resolver::io::{parse_unresolved, write_resolved, write_unresolved};
use bibcite_core::resolver::{resolve_batch, ResolutionConfig, VenueAbbrevTable};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use crate::export::{export_rss, export_xml_abstracts, DEFAULT_LINK_BASE};
use crate::state::{self, read_input, DataDir};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "bibcite", version, about = "Resolve references, build a citation index and query it")]
pub struct Cli {
    /// Directory holding the pipeline state.
    #[arg(long, global = true, default_value = "bibcite-data", value_name = "DIR")]
    pub data_dir: PathBuf,

    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Add or replace bibliographic records from a tagged record file.
    IngestRecords {
        file: PathBuf,
        /// Ingest date for records without a %I line.
        #[arg(long, value_name = "YYYY-MM-DD")]
        ingest_date: Option<NaiveDate>,
    },
    /// Add reference lists; a redelivered (citing, source) list replaces the old one.
    IngestRefs {
        file: PathBuf,
        /// Treat FILE as a plain-text paper and extract its reference section.
        #[arg(long, requires_all = ["citing", "source", "date"])]
        document: bool,
        #[arg(long)]
        citing: Option<Bibcode>,
        #[arg(long)]
        source: Option<String>,
        #[arg(long, value_name = "YYYY-MM-DD")]
        date: Option<NaiveDate>,
    },
    /// Link an e-print to its published version.
    Link { eprint: Bibcode, published: Bibcode },
    /// Link unlinked e-prints to published records by author, year and title.
    MatchEprints {
        /// Minimum title token overlap (Jaccard).
        #[arg(long, default_value_t = 0.7)]
        threshold: f64,
    },
    /// Resolve every ingested reference string against the records.
    Resolve {
        /// Resolution config (TOML: threshold, max_variants, [weights]).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Venue abbreviation table; stored in the data directory for later runs.
        #[arg(long)]
        venues: Option<PathBuf>,
        /// Override the configured threshold.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Apply the e-print policy and invert the resolved table.
    BuildIndex {
        /// Evaluation date for the staleness rule (default: latest ingest date).
        #[arg(long, value_name = "YYYY-MM-DD")]
        as_of: Option<NaiveDate>,
        #[arg(long, default_value_t = DEFAULT_STALENESS_DAYS)]
        staleness: i64,
    },
    /// Citations to or references from one paper.
    #[command(subcommand)]
    Query(QueryCommand),
    /// Rankings, h-index and second-order operators over a set of papers.
    #[command(subcommand)]
    Metrics(MetricsCommand),
    #[command(subcommand)]
    Report(ReportCommand),
    #[command(subcommand)]
    Alerts(AlertsCommand),
    #[command(subcommand)]
    Export(ExportCommand),
}

#[derive(Debug, Subcommand)]
pub enum QueryCommand {
    /// Papers citing BIBCODE.
    Cites(QueryArgs),
    /// Resolved references of BIBCODE.
    Refs(QueryArgs),
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    pub bibcode: Bibcode,
    #[command(flatten)]
    pub filter: FilterArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct YearRange(pub Option<i32>, pub Option<i32>);

impl std::str::FromStr for YearRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s.split_once(':').unwrap_or((s, s));
        let year = |v: &str| -> Result<Option<i32>, String> {
            if v.is_empty() {
                Ok(None)
            } else {
                v.parse().map(Some).map_err(|_| format!("bad year {v:?} (expected A:B)"))
            }
        };
        Ok(YearRange(year(lo)?, year(hi)?))
    }
}

#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    /// Count only refereed citing papers.
    #[arg(long)]
    pub refereed: bool,
    /// Publication-year window of the citing papers, e.g. 2003:2003 or 2000:.
    #[arg(long, value_name = "A:B")]
    pub year: Option<YearRange>,
    /// File of "Surname, I." lines; citing papers sharing one are dropped.
    #[arg(long, value_name = "FILE")]
    pub exclude_self: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SetArgs {
    /// Explicit bibcodes.
    pub bibcodes: Vec<Bibcode>,
    /// Papers with this author ("Surname, I.").
    #[arg(long)]
    pub author: Option<AuthorName>,
    /// Papers whose title, abstract or keywords contain every term.
    #[arg(long = "term", short = 't')]
    pub terms: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum MetricsCommand {
    /// Papers ranked by citation count, with the total.
    Rank {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        filter: FilterArgs,
    },
    /// h-index of the set.
    Hindex {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        filter: FilterArgs,
    },
    /// Papers most cited by the set.
    Useful {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Papers citing the most members of the set.
    Instructive {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum ReportCommand {
    /// Per-source resolution coverage from the last resolve run.
    Sources,
    /// Most frequent unresolved references.
    Unresolved {
        #[arg(long, default_value_t = 20)]
        top: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum AlertsCommand {
    /// Register stored queries from a tagged file (%U, %C, %A, %W, %L).
    Register { file: PathBuf },
    /// Report index changes since the last alert run to every stored query.
    Run {
        /// Defaults to the current index build date.
        #[arg(long, value_name = "YYYY-MM-DD")]
        run_date: Option<NaiveDate>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExportCommand {
    /// XML Abstracts with per-record and total citation counts.
    Xml {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        filter: FilterArgs,
    },
    /// RSS 2.0 channel (no citation counts).
    Rss {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        title: Option<String>,
        #[arg(long, default_value = DEFAULT_LINK_BASE)]
        link_base: String,
    },
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    let dir = DataDir::new(&cli.data_dir);
    match &cli.command {
        Command::IngestRecords { file, ingest_date } => ingest_records(&dir, file, *ingest_date),
        Command::IngestRefs { file, document, citing, source, date } => {
            let lists = if *document {
                let (Some(citing), Some(source), Some(date)) = (citing, source, date) else {
                    return Err(CliError::input("--document needs --citing, --source and --date"));
                };
                vec![document_list(file, citing, source, *date)?]
            } else {
                parse_reference_file(&read_input(file)?).map_err(|e| CliError::input(format!("{}: {e}", file.display())))?
            };
            ingest_refs(&dir, lists)
        }
        Command::Link { eprint, published } => {
            let mut corpus = dir.corpus()?;
            let link = corpus.link_eprint(eprint, published).map_err(|e| CliError::input(e.to_string()))?;
            dir.save_corpus(&corpus)?;
            Ok(format!("{}\t{}\t{}\n", link.eprint, link.published, link.origin.as_str()))
        }
        Command::MatchEprints { threshold } => {
            if !(0.0..=1.0).contains(threshold) {
                return Err(CliError::input("--threshold must be within [0, 1]"));
            }
            let mut corpus = dir.corpus()?.with_eprint_match_threshold(*threshold);
            let m = corpus.match_eprints();
            for a in &m.ambiguous {
                eprintln!("ambiguous: {} has {} equally good candidates; not linked", a.eprint, a.candidates.len());
            }
            dir.save_corpus(&corpus)?;
            Ok(m.linked.iter().map(|l| format!("{}\t{}\t{:.4}\n", l.eprint, l.published, l.match_score.unwrap_or(0.0))).collect())
        }
        Command::Resolve { config, venues, threshold } => resolve(&dir, config.as_deref(), venues.as_deref(), *threshold),
        Command::BuildIndex { as_of, staleness } => build_index(&dir, *as_of, *staleness),
        Command::Query(q) => query(&dir, q),
        Command::Metrics(m) => metrics(&dir, m),
        Command::Report(r) => report(&dir, r),
        Command::Alerts(a) => alerts(&dir, a),
        Command::Export(e) => export(&dir, e),
    }
}

fn ingest_records(dir: &DataDir, file: &Path, ingest_date: Option<NaiveDate>) -> Result<String, CliError> {
    let records = parse_records(&read_input(file)?, ingest_date).map_err(|e| CliError::input(format!("{}: {e}", file.display())))?;
    let mut corpus = dir.corpus()?;
    let (mut inserted, mut updated) = (0, 0);
    for r in records {
        match corpus.add_record(r).map_err(|e| CliError::input(e.to_string()))? {
            AddOutcome::Inserted => inserted += 1,
            AddOutcome::Updated => updated += 1,
        }
    }
    dir.save_corpus(&corpus)?;
    eprintln!("records: {inserted} inserted, {updated} updated, {} total", corpus.len());
    Ok(String::new())
}

fn document_list(file: &Path, citing: &Bibcode, source: &str, date: NaiveDate) -> Result<ReferenceList, CliError> {
    let doc =
        RawDocument { citing_bibcode: citing.clone(), source_tag: source.to_owned(), body_text: read_input(file)?, received_date: date };
    let references = document_references(&doc).map_err(|_| CliError::input(format!("{}: no reference section found", file.display())))?;
    Ok(ReferenceList { citing: citing.clone(), source_tag: source.to_owned(), received_date: date, references })
}

fn ingest_refs(dir: &DataDir, lists: Vec<ReferenceList>) -> Result<String, CliError> {
    let mut store = dir.references()?;
    let (mut added, mut replaced, mut strings) = (0, 0, 0);
    for list in lists {
        strings += list.references.len();
        if store.insert(list) {
            replaced += 1;
        } else {
            added += 1;
        }
    }
    dir.save_references(&store)?;
    eprintln!("reference lists: {added} added, {replaced} replaced, {strings} strings");
    Ok(String::new())
}

fn load_venues(dir: &DataDir, file: Option<&Path>) -> Result<VenueAbbrevTable, CliError> {
    let text = match file {
        Some(f) => {
            let text = read_input(f)?;
            dir.write(state::VENUES, &text)?;
            Some(text)
        }
        None => dir.read(state::VENUES)?,
    };
    match text {
        Some(t) => VenueAbbrevTable::parse(&t).map_err(|e| CliError::input(format!("venue table: {e}"))),
        None => {
            log::warn!("no venue table; only literal venue codes will resolve");
            Ok(VenueAbbrevTable::new())
        }
    }
}

fn resolve(dir: &DataDir, config: Option<&Path>, venues: Option<&Path>, threshold: Option<f64>) -> Result<String, CliError> {
    let mut cfg = match config {
        Some(f) => ResolutionConfig::parse(&read_input(f)?).map_err(|e| CliError::input(format!("{}: {e}", f.display())))?,
        None => ResolutionConfig::default(),
    };
    if let Some(t) = threshold {
        cfg.threshold = t;
        cfg.validate().map_err(|e| CliError::input(e.to_string()))?;
    }
    let table = load_venues(dir, venues)?;
    let corpus = dir.corpus()?;
    let raws: Vec<_> = dir.references()?.references().cloned().collect();
    let out = resolve_batch(&raws, &corpus, &table, &cfg);
    for (raw, e) in &out.errors {
        eprintln!("skipped {} reference {}: {e}", raw.citing_bibcode, raw.sequence);
    }
    dir.write(state::RESOLVED, &write_resolved(&out.resolved))?;
    dir.write(state::UNRESOLVED, &write_unresolved(&out.unresolved))?;
    dir.write(state::SOURCE_COUNTS, &write_source_counts(&out.per_source))?;
    eprintln!(
        "references: {} attempted, {} resolved, {} unresolved, {} skipped",
        raws.len(),
        out.resolved.len(),
        out.unresolved.len(),
        out.errors.len()
    );
    Ok(String::new())
}

fn build_index(dir: &DataDir, as_of: Option<NaiveDate>, staleness: i64) -> Result<String, CliError> {
    if staleness <= 0 {
        return Err(CliError::input("--staleness must be positive"));
    }
    let corpus = dir.corpus()?;
    let resolved = dir.resolved()?;
    let as_of = match as_of {
        Some(d) => d,
        None => corpus.records().map(|r| r.ingest_date).max().ok_or_else(|| CliError::input("empty corpus; give --as-of"))?,
    };
    let policy = PolicyConfig::new(as_of, staleness);
    let build = rebuild_citation_index(&resolved, &corpus, &policy);
    for a in &build.actions {
        log::info!("{}: {} -> {}", a.rule.as_str(), a.citing, a.cited);
    }
    let digest = |name: &str| -> Result<String, CliError> { Ok(sha256_hex(&dir.read(name)?.unwrap_or_default())) };
    let inputs = InputDigests {
        records_sha256: digest(state::RECORDS)?,
        resolved_sha256: digest(state::RESOLVED)?,
        links_sha256: digest(state::LINKS)?,
    };
    let manifest = BuildManifest::new(&build.index, build.actions.len(), inputs);
    if dir.exists(state::INDEX) && dir.exists(state::MANIFEST) {
        dir.rename(state::INDEX, state::PREV_INDEX)?;
        dir.rename(state::MANIFEST, state::PREV_MANIFEST)?;
    }
    dir.write(state::INDEX, &write_index_pairs(&build.index))?;
    dir.write(state::MANIFEST, &manifest.to_json())?;
    eprintln!(
        "index: {} pairs, {} cited papers, {} policy actions (as of {as_of})",
        build.index.pair_count(),
        manifest.cited_papers,
        build.actions.len()
    );
    Ok(String::new())
}

fn read_authors(path: &Path) -> Result<Vec<AuthorName>, CliError> {
    read_input(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.parse::<AuthorName>().map_err(|e| CliError::input(format!("{}: {e}", path.display()))))
        .collect()
}

fn citation_filter(args: &FilterArgs) -> Result<CitationFilter, CliError> {
    let base_authors = match &args.exclude_self {
        Some(p) => read_authors(p)?,
        None => Vec::new(),
    };
    let (year_min, year_max) = args.year.map_or((None, None), |YearRange(lo, hi)| (lo, hi));
    let f = CitationFilter { refereed_only: args.refereed, year_min, year_max, exclude_self: args.exclude_self.is_some(), base_authors };
    f.validate().map_err(|e| CliError::input(e.to_string()))?;
    Ok(f)
}

fn query(dir: &DataDir, q: &QueryCommand) -> Result<String, CliError> {
    let corpus = dir.corpus()?;
    let index = dir.index()?;
    let (args, cites) = match q {
        QueryCommand::Cites(a) => (a, true),
        QueryCommand::Refs(a) => (a, false),
    };
    let filter = citation_filter(&args.filter)?;
    if !corpus.contains(&args.bibcode) {
        eprintln!("note: {} is not in the corpus", args.bibcode);
    }
    let list = if cites {
        filtered_citations(&index, &corpus, [&args.bibcode], &filter).per_paper.remove(&args.bibcode).unwrap_or_default()
    } else {
        if reference_list_status(&index, &corpus, &args.bibcode) == ReferenceListStatus::NotAvailable {
            eprintln!("note: no reference list is available for {}", args.bibcode);
        }
        index.references_of(&args.bibcode).iter().filter(|b| filter.accepts(corpus.find_by_bibcode(b))).cloned().collect()
    };
    Ok(list.iter().map(|b| format!("{b}\n")).collect())
}

/// Explicit bibcodes first, then search hits in bibcode order, without duplicates.
fn select(corpus: &Corpus, set: &SetArgs) -> Result<Vec<Bibcode>, CliError> {
    let mut out: Vec<Bibcode> = Vec::new();
    let mut seen = BTreeSet::new();
    for b in &set.bibcodes {
        if seen.insert(b.clone()) {
            out.push(b.clone());
        }
    }
    let searched = match (&set.author, set.terms.is_empty()) {
        (None, true) => {
            if out.is_empty() {
                return Err(CliError::input("empty selection: give bibcodes, --author or --term"));
            }
            Vec::new()
        }
        (author, _) => {
            let mut hits: Option<BTreeSet<Bibcode>> = None;
            if let Some(a) = author {
                hits = Some(corpus.papers_by_author(a, &SearchFilter::default()).into_iter().collect());
            }
            if !set.terms.is_empty() {
                let terms: Vec<&str> = set.terms.iter().map(String::as_str).collect();
                let found: BTreeSet<Bibcode> = corpus
                    .search_records(&terms, &SearchFilter::default())
                    .map_err(|e| CliError::input(e.to_string()))?
                    .into_iter()
                    .collect();
                hits = Some(match hits {
                    Some(h) => h.intersection(&found).cloned().collect(),
                    None => found,
                });
            }
            hits.unwrap_or_default().into_iter().collect()
        }
    };
    for b in searched {
        if seen.insert(b.clone()) {
            out.push(b);
        }
    }
    Ok(out)
}

fn describe(set: &SetArgs) -> String {
    let mut parts: Vec<String> = set.bibcodes.iter().map(ToString::to_string).collect();
    if let Some(a) = &set.author {
        parts.push(format!("author:\"{a}\""));
    }
    parts.extend(set.terms.iter().cloned());
    parts.join(" ")
}

fn metrics(dir: &DataDir, m: &MetricsCommand) -> Result<String, CliError> {
    let corpus = dir.corpus()?;
    let index = dir.index()?;
    Ok(match m {
        MetricsCommand::Rank { set, filter } => {
            let (rows, total) = rank_by_citations(&index, &corpus, &select(&corpus, set)?, &citation_filter(filter)?);
            format!("# total\t{total}\n{}", write_ranked(&rows))
        }
        MetricsCommand::Hindex { set, filter } => {
            format!("{}\n", h_index(&index, &corpus, &select(&corpus, set)?, &citation_filter(filter)?))
        }
        MetricsCommand::Useful { set, top } => write_counted(&most_useful(&index, &select(&corpus, set)?, positive(*top)?)),
        MetricsCommand::Instructive { set, top } => write_counted(&most_instructive(&index, &select(&corpus, set)?, positive(*top)?)),
    })
}

fn positive(k: usize) -> Result<usize, CliError> {
    if k == 0 {
        Err(CliError::input("--top must be at least 1"))
    } else {
        Ok(k)
    }
}

fn report(dir: &DataDir, r: &ReportCommand) -> Result<String, CliError> {
    match r {
        ReportCommand::Sources => {
            let text = dir.read(state::SOURCE_COUNTS)?.ok_or_else(|| CliError::input("no resolve run recorded; run `resolve` first"))?;
            let counts = parse_source_counts(&text).map_err(|e| CliError::input(format!("{}: {e}", state::SOURCE_COUNTS)))?;
            Ok(render_coverage(&source_coverage_report(&counts)))
        }
        ReportCommand::Unresolved { top } => {
            let text = dir.read(state::UNRESOLVED)?.ok_or_else(|| CliError::input("no resolve run recorded; run `resolve` first"))?;
            let unresolved = parse_unresolved(&text).map_err(|e| CliError::input(format!("{}: {e}", state::UNRESOLVED)))?;
            Ok(write_unresolved_report(&unresolved_report(&unresolved, positive(*top)?)))
        }
    }
}

fn load_registry(dir: &DataDir) -> Result<AlertRegistry, CliError> {
    let mut reg = AlertRegistry::new();
    if let Some(text) = dir.read(state::QUERIES)? {
        for q in parse_stored_queries(&text).map_err(|e| CliError::input(format!("{}: {e}", state::QUERIES)))? {
            reg.register_stored_query(q).map_err(|e| CliError::input(e.to_string()))?;
        }
    }
    Ok(reg)
}

fn alerts(dir: &DataDir, a: &AlertsCommand) -> Result<String, CliError> {
    let mut reg = load_registry(dir)?;
    match a {
        AlertsCommand::Register { file } => {
            let queries = parse_stored_queries(&read_input(file)?).map_err(|e| CliError::input(format!("{}: {e}", file.display())))?;
            for q in queries {
                let id = q.subscriber_id.clone();
                let replaced = reg.register_stored_query(q).map_err(|e| CliError::input(e.to_string()))?;
                eprintln!("{} {id}", if replaced { "replaced" } else { "registered" });
            }
            dir.write(state::QUERIES, &write_stored_queries(reg.queries()))?;
            Ok(String::new())
        }
        AlertsCommand::Run { run_date } => {
            let corpus = dir.corpus()?;
            let after = dir.index()?;
            // Baseline: the index the previous alert run saw, else the build before the current one.
            let before = match dir.alerted_index()? {
                Some(i) => i,
                None => dir.previous_index()?.unwrap_or_else(|| CitationIndex::empty(*after.policy())),
            };
            let run_date = run_date.unwrap_or_else(|| after.build_date());
            let batches = reg.run_alerts(&before, &after, &corpus, run_date);
            dir.write(state::QUERIES, &write_stored_queries(reg.queries()))?;
            dir.mark_alerted()?;
            eprintln!("alerts: {} batches", batches.len());
            Ok(batches.iter().map(render_alert_batch).collect())
        }
    }
}

fn export(dir: &DataDir, e: &ExportCommand) -> Result<String, CliError> {
    let corpus = dir.corpus()?;
    let records = |codes: &[Bibcode]| -> Vec<&BibRecord> {
        codes
            .iter()
            .filter_map(|b| {
                let r = corpus.find_by_bibcode(b);
                if r.is_none() {
                    eprintln!("note: {b} is not in the corpus; skipped");
                }
                r
            })
            .collect()
    };
    match e {
        ExportCommand::Xml { set, filter } => {
            let index = dir.index()?;
            let codes = select(&corpus, set)?;
            let recs = records(&codes);
            let present: Vec<&Bibcode> = recs.iter().map(|r| &r.bibcode).collect();
            let fc = filtered_citations(&index, &corpus, present, &citation_filter(filter)?);
            let counts: BTreeMap<Bibcode, usize> = fc.per_paper.iter().map(|(b, c)| (b.clone(), c.len())).collect();
            export_xml_abstracts(&describe(set), &recs, &counts, fc.total).map_err(|e| CliError::internal(e.to_string()))
        }
        ExportCommand::Rss { set, title, link_base } => {
            let codes = select(&corpus, set)?;
            let title = title.clone().unwrap_or_else(|| describe(set));
            Ok(export_rss(&records(&codes), &title, link_base))
        }
    }
}
