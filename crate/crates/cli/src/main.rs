//! Command-line front end: discover wrappers, extract records, drive
//! scripted interactions, generate testbeds, and score extraction runs.
//!
//! Exit codes: 0 success (possibly with empty results), 1 usage or config
//! error, 2 I/O or parse error, 3 driver error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use ugcmine_core::config::Config;
use ugcmine_core::dom::parse_html_bytes;
use ugcmine_core::error::Error;
use ugcmine_core::eval::{evaluate_corpus, generate_testbed, interaction_gain, load_annotation, match_records, score, GeneratorSpec, PageScore};
use ugcmine_core::interact::{plan_interactions, run_plan, LinkLexicon, PageDriver, SimulatorDriver};
use ugcmine_core::miner::{build_tag_hash_list, merge_buckets};
use ugcmine_core::snapshot::{atomic_write, SnapshotStore};
use ugcmine_core::wrapper::{apply_wrapper, discover, normalize_record_datetimes, Record, Wrapper};

#[derive(Parser)]
#[command(name = "ugcmine", version, about = "Discover and extract user-generated content from HTML pages")]
struct Cli {
    #[command(flatten)]
    config_args: ConfigArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML config file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override one config key, e.g. --set similarity.threshold=0.8.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    sets: Vec<String>,

    /// Write the effective config (file + overrides) to this path.
    #[arg(long, global = true, value_name = "FILE")]
    dump_config: Option<PathBuf>,

    /// Parallel workers for per-file commands.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Induce wrappers on pages and extract their records.
    Discover {
        /// HTML files or directories of .html files.
        inputs: Vec<PathBuf>,
        /// Output directory; defaults to each input's directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Hash every tag instead of the configured anchor-tag filter.
        #[arg(long)]
        all_tags: bool,
        /// Print canonical tag-hash serializations for every bucket.
        #[arg(long)]
        dump_taghashes: bool,
        /// Print surviving clusters as JSON.
        #[arg(long)]
        dump_clusters: bool,
        /// Rewrite absolute datetimes to ISO 8601 in extracted records.
        #[arg(long)]
        normalize_datetimes: bool,
    },
    /// Apply an existing wrapper to pages.
    Extract {
        /// Wrapper JSON file.
        #[arg(long)]
        wrapper: PathBuf,
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        normalize_datetimes: bool,
    },
    /// Run a scripted interaction fixture and cache every page state.
    Interact {
        /// Fixture directory holding initial.html (or page.html) and
        /// optionally transitions.json.
        fixture: PathBuf,
        /// Snapshot output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        max_pages: Option<usize>,
        #[arg(long)]
        max_expand_depth: Option<usize>,
        /// TOML file overriding the link lexicon.
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
    /// Generate a synthetic annotated corpus.
    GenTestbed {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        pages: usize,
        #[arg(long, default_value_t = 10)]
        min_records: usize,
        #[arg(long, default_value_t = 60)]
        max_records: usize,
        #[arg(long, default_value_t = 0.3)]
        nested_fraction: f64,
    },
    /// Score extraction against a corpus's annotations.
    Eval {
        corpus: PathBuf,
        /// Score pre-extracted <page_id>.records.jsonl files instead of
        /// running the built-in pipeline.
        #[arg(long)]
        outputs: Option<PathBuf>,
        /// Also print the AR-P vs AR interaction-gain table.
        #[arg(long)]
        interaction_gain: bool,
        /// Write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::GeneratorSpec(_) => 1,
        Error::Driver(_) | Error::Unsupported(_) | Error::Fixture(_) => 3,
        _ => 2,
    }
}

fn effective_config(args: &ConfigArgs) -> Result<Config, Error> {
    let base = match &args.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let sets = args
        .sets
        .iter()
        .map(|s| {
            s.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::Config(format!("override {s:?} is not KEY=VALUE")))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let cfg = base.with_overrides(&sets)?;
    if let Some(path) = &args.dump_config {
        atomic_write(path, cfg.to_toml_string().as_bytes())?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = effective_config(&cli.config_args)?;
    let jobs = cli.config_args.jobs.max(1);
    match cli.command {
        Command::Discover {
            inputs,
            out_dir,
            all_tags,
            dump_taghashes,
            dump_clusters,
            normalize_datetimes,
        } => {
            let mut cfg = cfg;
            if all_tags {
                cfg.miner.tag_filter.clear();
            }
            let files = collect_inputs(&inputs)?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            let results: Vec<Result<String, Error>> = pool.install(|| {
                files
                    .par_iter()
                    .map(|file| discover_one(file, &cfg, out_dir.as_deref(), dump_taghashes, dump_clusters, normalize_datetimes))
                    .collect()
            });
            let mut lines = Vec::new();
            for r in results {
                lines.push(r?);
            }
            for line in lines {
                eprintln!("{line}");
            }
            Ok(())
        }
        Command::Extract {
            wrapper,
            inputs,
            out_dir,
            normalize_datetimes,
        } => {
            let text = std::fs::read_to_string(&wrapper)?;
            let wrapper = Wrapper::from_json(&text)?;
            let files = collect_inputs(&inputs)?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            let results: Vec<Result<String, Error>> = pool.install(|| {
                files
                    .par_iter()
                    .map(|file| extract_one(file, &wrapper, out_dir.as_deref(), normalize_datetimes))
                    .collect()
            });
            for r in results {
                eprintln!("{}", r?);
            }
            Ok(())
        }
        Command::Interact {
            fixture,
            out,
            max_pages,
            max_expand_depth,
            lexicon,
        } => {
            let mut cfg = cfg;
            if let Some(n) = max_pages {
                cfg.limits.max_pages = n;
            }
            if let Some(n) = max_expand_depth {
                cfg.limits.max_expand_depth = n;
            }
            if let Some(path) = lexicon {
                let text = std::fs::read_to_string(&path)?;
                cfg.lexicon = toml::from_str::<LinkLexicon>(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            }
            let mut driver = SimulatorDriver::from_fixture(&fixture)?;
            let mut store = SnapshotStore::create(&out)?;
            let plan = plan_interactions(&driver.current_dom()?, &cfg.lexicon, &cfg.limits);
            let report = run_plan(&mut driver, &plan, &mut store, &cfg.lexicon, &cfg.limits)?;
            for err in &report.errors {
                eprintln!("action failed: {err}");
            }
            eprintln!(
                "{} snapshot(s) cached under {}",
                report.snapshot_ids.len(),
                out.display()
            );
            Ok(())
        }
        Command::GenTestbed {
            seed,
            out,
            pages,
            min_records,
            max_records,
            nested_fraction,
        } => {
            let spec = GeneratorSpec {
                pages,
                min_records,
                max_records,
                nested_fraction,
            };
            let annotations = generate_testbed(seed, &spec, &out)?;
            let interactive = annotations.iter().filter(|a| a.requires_interaction).count();
            let total: usize = annotations.iter().map(|a| a.expected_records.len()).sum();
            eprintln!(
                "{} pages ({} interactive), {} records under {}",
                annotations.len(),
                interactive,
                total,
                out.display()
            );
            Ok(())
        }
        Command::Eval {
            corpus,
            outputs,
            interaction_gain: want_gain,
            json,
        } => {
            let (report, gain) = match &outputs {
                Some(dir) => (score_prebuilt_outputs(&corpus, dir)?, None),
                None => {
                    let (report, gain) = evaluate_corpus(&corpus, &cfg)?;
                    (report, Some(gain))
                }
            };
            print!("{}", report.format_table());
            if want_gain {
                let gain = match gain {
                    Some(g) if !g.rows.is_empty() => g,
                    Some(_) => {
                        return Err(Error::Fixture(
                            "interaction gain needs at least one page with a transitions.json fixture"
                                .into(),
                        ))
                    }
                    None => interaction_gain(&corpus, &cfg)?,
                };
                print!("{}", gain.format_table());
            }
            if let Some(path) = json {
                atomic_write(&path, serde_json::to_string_pretty(&report)?.as_bytes())?;
            }
            Ok(())
        }
    }
}

fn collect_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Error> {
    if inputs.is_empty() {
        return Err(Error::Config("no input files given".into()));
    }
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut entries: Vec<PathBuf> = std::fs::read_dir(input)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "html" || e == "htm"))
                .collect();
            entries.sort();
            files.extend(entries);
        } else {
            files.push(input.clone());
        }
    }
    if files.is_empty() {
        return Err(Error::Config("no .html inputs found".into()));
    }
    Ok(files)
}

fn output_base(file: &Path, out_dir: Option<&Path>) -> PathBuf {
    let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let dir = out_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| file.parent().unwrap_or(Path::new(".")).to_path_buf());
    dir.join(stem)
}

fn write_records(path: &Path, records: &[Record]) -> Result<(), Error> {
    let mut buf = Vec::new();
    for record in records {
        serde_json::to_writer(&mut buf, record)?;
        buf.push(b'\n');
    }
    atomic_write(path, &buf)
}

fn discover_one(
    file: &Path,
    cfg: &Config,
    out_dir: Option<&Path>,
    dump_taghashes: bool,
    dump_clusters: bool,
    normalize: bool,
) -> Result<String, Error> {
    let bytes = std::fs::read(file)?;
    let doc = parse_html_bytes(&bytes, Some(file.display().to_string()))?;
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
    }

    if dump_taghashes {
        let list = build_tag_hash_list(&doc, &cfg.miner.tag_filter, cfg.miner.canopy_depth);
        let mut out = std::io::stdout().lock();
        for (key, members) in &list.buckets {
            let _ = writeln!(out, "# {} node(s) [{}]", members.len(), file.display());
            let _ = write!(out, "{key}");
        }
    }
    if dump_clusters {
        let list = build_tag_hash_list(&doc, &cfg.miner.tag_filter, cfg.miner.canopy_depth);
        let clusters = merge_buckets(
            &doc,
            &list,
            cfg.miner.canopy_depth,
            &cfg.similarity,
            cfg.miner.min_cluster_size,
        );
        let dump: Vec<serde_json::Value> = clusters
            .iter()
            .map(|c| {
                serde_json::json!({
                    "xpath": c.structural_xpath.to_string(),
                    "member_count": c.members.len(),
                    "member_paths": c.members.iter().map(|m| doc.positional_xpath(*m)).collect::<Vec<_>>(),
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&dump)?);
    }

    let discoveries = discover(&doc, cfg);
    let base = output_base(file, out_dir);
    let mut all_records = Vec::new();
    for (i, d) in discoveries.iter().enumerate() {
        let path = if i == 0 {
            base.with_extension("wrapper.json")
        } else {
            base.with_extension(format!("wrapper-{}.json", i + 1))
        };
        atomic_write(&path, d.wrapper.to_json().as_bytes())?;
        all_records.extend(d.records.iter().cloned());
    }
    if normalize {
        all_records = all_records.iter().map(normalize_record_datetimes).collect();
    }
    write_records(&base.with_extension("records.jsonl"), &all_records)?;
    Ok(format!(
        "{}: {} wrapper(s), {} record(s)",
        file.display(),
        discoveries.len(),
        all_records.len()
    ))
}

fn extract_one(
    file: &Path,
    wrapper: &Wrapper,
    out_dir: Option<&Path>,
    normalize: bool,
) -> Result<String, Error> {
    let bytes = std::fs::read(file)?;
    let doc = parse_html_bytes(&bytes, Some(file.display().to_string()))?;
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
    }
    let extraction = apply_wrapper(wrapper, &doc);
    let records: Vec<Record> = if normalize {
        extraction.records.iter().map(normalize_record_datetimes).collect()
    } else {
        extraction.records
    };
    let base = output_base(file, out_dir);
    write_records(&base.with_extension("records.jsonl"), &records)?;
    Ok(format!(
        "{}: {} record(s), {} dropped",
        file.display(),
        records.len(),
        extraction.dropped
    ))
}

/// Score pre-extracted JSONL outputs against corpus annotations.
fn score_prebuilt_outputs(corpus: &Path, outputs: &Path) -> Result<ugcmine_core::eval::ScoreReport, Error> {
    let mut per_page = Vec::new();
    let mut entries: Vec<PathBuf> = std::fs::read_dir(corpus)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir() && p.join("annotation.json").exists())
        .collect();
    entries.sort();
    if entries.is_empty() {
        return Err(Error::MissingAnnotation(format!(
            "no annotated pages under {}",
            corpus.display()
        )));
    }
    for dir in entries {
        let annotation = load_annotation(&dir)?;
        let records_path = outputs.join(format!("{}.records.jsonl", annotation.page_id));
        let records: Vec<Record> = match std::fs::read_to_string(&records_path) {
            Ok(text) => text
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(serde_json::from_str)
                .collect::<Result<_, _>>()?,
            Err(_) => Vec::new(),
        };
        let (found, relevant) = match_records(&records, &annotation.expected_records);
        per_page.push(PageScore {
            page_id: annotation.page_id,
            found,
            relevant,
            available: annotation.expected_records.len(),
        });
    }
    Ok(score(per_page))
}
