//! Command-line surface: bound queries, the shape catalog, oracle
//! verification, benchmark experiments, and single-tree pruning.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use treebound::bound_engine::{
    growth_bound, pi_upper_bound, stump_vcdim_exact, vcdim_upper_bound, BoundMode, PartitionTable,
};
use treebound::data_io::{load, save, split, DatasetSpec, LabelColumn};
use treebound::experiment::{
    figure2_bounds, render_report, run_experiment, verify, ExperimentConfig, Model, ALL_MODELS,
};
use treebound::learner::{fit, DecisionTree};
use treebound::pruning::{prune_cart, prune_mcart, prune_with_bound};
use treebound::risk_bound::BoundConfig;
use treebound::tree_structure::TreeStructure;
use treebound::{Error, Result};

#[derive(Parser)]
#[command(
    name = "treebound",
    about = "Capacity bounds for decision tree structures and bound-based pruning",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CacheOpt {
    /// Partition-bound cache file, loaded before and saved after the run.
    /// Use one file per bound mode.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Upper bound on the VC dimension of a tree structure.
    Vcdim {
        /// Structure text, e.g. "(LL)" for the stump or "((LL)L)".
        structure: Option<String>,
        /// Number of real-valued features.
        #[arg(long, default_value_t = 10)]
        ell: u64,
        /// Print the exact stump VC dimension for --ell instead.
        #[arg(long)]
        stump_exact: bool,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        cache: CacheOpt,
    },
    /// Upper bound on the c-partitioning function of a structure.
    Pibound {
        structure: String,
        /// Number of parts.
        c: u64,
        /// Number of sample points.
        m: u64,
        #[arg(long, default_value_t = 10)]
        ell: u64,
        /// Use the faster, looser recursion.
        #[arg(long)]
        fast: bool,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        cache: CacheOpt,
    },
    /// Upper bound on the growth function of a structure.
    Growth {
        structure: String,
        /// Number of sample points.
        m: u64,
        /// Number of classes.
        #[arg(long, default_value_t = 2)]
        classes: u64,
        #[arg(long, default_value_t = 10)]
        ell: u64,
        #[arg(long)]
        fast: bool,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        cache: CacheOpt,
    },
    /// VC-dimension bounds for the catalog of the eleven shapes of height
    /// at most three.
    Figure2 {
        #[arg(long, default_value_t = 10)]
        ell: u64,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        cache: CacheOpt,
    },
    /// Check the bounds against brute-force partition enumeration.
    Verify {
        #[arg(long, default_value_t = 7)]
        max_m: u64,
        #[arg(long, default_value_t = 5)]
        max_ell: u64,
        #[arg(long)]
        json: bool,
    },
    /// Benchmark the pruners on a CSV dataset.
    Experiment {
        /// Dataset file; all non-label columns must be numeric.
        data: PathBuf,
        /// Label column index, or name when the file has a header.
        #[arg(long, default_value = "last")]
        label_col: String,
        /// The file starts with a header row.
        #[arg(long)]
        header: bool,
        /// Field delimiter.
        #[arg(long, default_value = ",")]
        delimiter: char,
        /// Dataset name in reports; defaults to the file stem.
        #[arg(long)]
        name: Option<String>,
        /// Models to run (original, cart, mcart, bound).
        #[arg(long, value_delimiter = ',')]
        models: Vec<String>,
        #[arg(long, default_value_t = 25)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        /// Ratio of the geometric error prior; default 2^-13.7.
        #[arg(long)]
        r: Option<f64>,
        /// Back the risk bound by the fast partition recursion.
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        fast_bound: bool,
        #[arg(long, default_value_t = 40)]
        max_leaves: usize,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        /// Directory for per-run JSON records.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        /// Print the report as Markdown.
        #[arg(long)]
        md: bool,
        #[command(flatten)]
        cache: CacheOpt,
    },
    /// Prune a single tree and print it.
    Prune {
        /// Dataset the tree was (or will be) fit on.
        data: PathBuf,
        #[arg(long, default_value = "last")]
        label_col: String,
        #[arg(long)]
        header: bool,
        #[arg(long, default_value = ",")]
        delimiter: char,
        /// Serialized tree; omitted means grow one first.
        #[arg(long)]
        tree: Option<String>,
        /// Pruning method: bound, cart, or mcart.
        #[arg(long, default_value = "bound")]
        method: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        fast_bound: bool,
        #[arg(long, default_value_t = 40)]
        max_leaves: usize,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        cache: CacheOpt,
    },
    /// Split a CSV dataset into seeded train/test files.
    Split {
        data: PathBuf,
        #[arg(long, default_value = "last")]
        label_col: String,
        #[arg(long)]
        header: bool,
        #[arg(long, default_value = ",")]
        delimiter: char,
        #[arg(long, default_value_t = 0.75)]
        fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output prefix; writes <prefix>_train.csv and <prefix>_test.csv.
        #[arg(long, default_value = "split")]
        prefix: String,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn with_cache<F>(mode: BoundMode, cache: &CacheOpt, body: F) -> Result<ExitCode>
where
    F: FnOnce(&PartitionTable) -> Result<ExitCode>,
{
    let table = PartitionTable::new(mode);
    if let Some(path) = &cache.cache {
        if path.exists() {
            let (loaded, skipped) = table.load(path)?;
            if skipped > 0 {
                eprintln!("cache {}: loaded {loaded} entries, skipped {skipped} corrupt lines", path.display());
            }
        }
    }
    let code = body(&table)?;
    if let Some(path) = &cache.cache {
        table.save(path)?;
    }
    Ok(code)
}

fn dataset_spec(
    data: &Path,
    label_col: &str,
    header: bool,
    delimiter: char,
    name: Option<&str>,
) -> Result<DatasetSpec> {
    let label_column = if label_col == "last" {
        // Resolved after reading the first record.
        LabelColumn::Index(usize::MAX)
    } else if let Ok(idx) = label_col.parse::<usize>() {
        LabelColumn::Index(idx)
    } else {
        LabelColumn::Name(label_col.to_owned())
    };
    let mut spec = DatasetSpec::csv(data, label_column, header);
    spec.delimiter = u8::try_from(delimiter)
        .map_err(|_| Error::InvalidArgument("delimiter must be a single byte".into()))?;
    if let Some(name) = name {
        spec.name = name.to_owned();
    }
    if spec.label_column == LabelColumn::Index(usize::MAX) {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(header)
            .delimiter(spec.delimiter)
            .from_path(data)?;
        let mut record = csv::StringRecord::new();
        if !reader.read_record(&mut record)? {
            return Err(Error::InvalidArgument(format!(
                "{}: dataset is empty",
                data.display()
            )));
        }
        spec.label_column = LabelColumn::Index(record.len() - 1);
    }
    Ok(spec)
}

fn bound_config(delta: f64, r: Option<f64>, fast: bool) -> BoundConfig {
    BoundConfig {
        delta,
        r: r.unwrap_or_else(|| 2f64.powf(-13.7)),
        bound_mode: if fast { BoundMode::Fast } else { BoundMode::Exact },
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Vcdim {
            structure,
            ell,
            stump_exact,
            json,
            cache,
        } => {
            if stump_exact {
                let d = stump_vcdim_exact(ell)?;
                if json {
                    println!("{}", json!({"ell": ell, "stump_vcdim": d}));
                } else {
                    println!("{d}");
                }
                return Ok(ExitCode::SUCCESS);
            }
            let text = structure.ok_or_else(|| {
                Error::InvalidArgument("a structure is required without --stump-exact".into())
            })?;
            let t: TreeStructure = text.parse()?;
            with_cache(BoundMode::Exact, &cache, |table| {
                let d = vcdim_upper_bound(&t, ell, table)?;
                if json {
                    println!("{}", json!({"structure": t.to_string(), "ell": ell, "vcdim_upper_bound": d}));
                } else {
                    println!("{d}");
                }
                Ok(ExitCode::SUCCESS)
            })
        }
        Command::Pibound {
            structure,
            c,
            m,
            ell,
            fast,
            json,
            cache,
        } => {
            let t: TreeStructure = structure.parse()?;
            let mode = if fast { BoundMode::Fast } else { BoundMode::Exact };
            with_cache(mode, &cache, |table| {
                let value = pi_upper_bound(&t, c, m, ell, table)?;
                if json {
                    println!(
                        "{}",
                        json!({"structure": t.to_string(), "c": c, "m": m, "ell": ell,
                               "fast": fast, "bound": value.to_string()})
                    );
                } else {
                    println!("{value}");
                }
                Ok(ExitCode::SUCCESS)
            })
        }
        Command::Growth {
            structure,
            m,
            classes,
            ell,
            fast,
            json,
            cache,
        } => {
            let t: TreeStructure = structure.parse()?;
            let mode = if fast { BoundMode::Fast } else { BoundMode::Exact };
            with_cache(mode, &cache, |table| {
                let value = growth_bound(&t, m, classes, ell, table)?;
                if json {
                    println!(
                        "{}",
                        json!({"structure": t.to_string(), "m": m, "classes": classes,
                               "ell": ell, "fast": fast, "bound": value.to_string()})
                    );
                } else {
                    println!("{value}");
                }
                Ok(ExitCode::SUCCESS)
            })
        }
        Command::Figure2 { ell, json, cache } => with_cache(BoundMode::Exact, &cache, |table| {
            let rows = figure2_bounds(ell, table)?;
            if json {
                let items: Vec<_> = rows
                    .iter()
                    .map(|(t, d)| json!({"structure": t.to_string(), "vcdim_upper_bound": d}))
                    .collect();
                println!("{}", json!({"ell": ell, "shapes": items}));
            } else {
                println!("{:<24} {:>6} {:>6} vcdim<=", "structure", "leaves", "height");
                for (t, d) in &rows {
                    println!("{:<24} {:>6} {:>6} {}", t.to_string(), t.leaf_count(), t.height(), d);
                }
            }
            Ok(ExitCode::SUCCESS)
        }),
        Command::Verify { max_m, max_ell, json } => {
            let report = verify(max_m, max_ell)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", report.render());
            }
            Ok(if report.all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Experiment {
            data,
            label_col,
            header,
            delimiter,
            name,
            models,
            reps,
            seed,
            delta,
            r,
            fast_bound,
            max_leaves,
            folds,
            out,
            json,
            md,
            cache,
        } => {
            let spec = dataset_spec(&data, &label_col, header, delimiter, name.as_deref())?;
            let sample = load(&spec)?;
            let models: Vec<Model> = if models.is_empty() {
                ALL_MODELS.to_vec()
            } else {
                models.iter().map(|m| m.parse()).collect::<Result<_>>()?
            };
            let cfg = ExperimentConfig {
                repetitions: reps,
                models,
                bound: bound_config(delta, r, fast_bound),
                base_seed: seed,
                max_leaves,
                folds,
                train_fraction: 0.75,
            };
            with_cache(cfg.bound.bound_mode, &cache, |table| {
                let report = run_experiment(&sample, &spec.name, &cfg, table)?;
                if let Some(dir) = &out {
                    std::fs::create_dir_all(dir)?;
                    for record in &report.records {
                        let file = dir.join(format!(
                            "{}_{}_seed{}.json",
                            record.dataset, record.model, record.seed
                        ));
                        std::fs::write(&file, serde_json::to_string_pretty(record).expect("record serializes"))?;
                    }
                }
                if json {
                    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
                } else {
                    print!("{}", render_report(&report, md));
                }
                Ok(ExitCode::SUCCESS)
            })
        }
        Command::Prune {
            data,
            label_col,
            header,
            delimiter,
            tree,
            method,
            seed,
            delta,
            r,
            fast_bound,
            max_leaves,
            folds,
            json,
            cache,
        } => {
            let spec = dataset_spec(&data, &label_col, header, delimiter, None)?;
            let sample = load(&spec)?;
            let grown: DecisionTree = match tree {
                Some(text) => {
                    let mut t: DecisionTree = text.parse()?;
                    t.rebind(&sample, max_leaves)?;
                    t
                }
                None => fit(&sample, max_leaves)?,
            };
            let cfg = bound_config(delta, r, fast_bound);
            with_cache(cfg.bound_mode, &cache, |table| {
                let result = match method.as_str() {
                    "bound" => prune_with_bound(&grown, &sample, &cfg, table)?,
                    "cart" => prune_cart(&grown, &sample, folds, seed)?,
                    "mcart" => {
                        prune_mcart(&grown, &sample, sample.num_features(), folds, seed)?
                    }
                    other => {
                        return Err(Error::InvalidArgument(format!(
                            "unknown method {other:?}; expected bound, cart, or mcart"
                        )))
                    }
                };
                if json {
                    println!(
                        "{}",
                        json!({
                            "method": method,
                            "tree": result.tree.to_string(),
                            "leaves_before": result.leaves_before,
                            "leaves_after": result.leaves_after,
                            "bound": result.bound_value,
                            "alpha": result.chosen_alpha,
                        })
                    );
                } else {
                    println!("{}", result.tree);
                    eprintln!(
                        "leaves: {} -> {}{}",
                        result.leaves_before,
                        result.leaves_after,
                        match (result.bound_value, result.chosen_alpha) {
                            (Some(b), _) => format!(", bound {b:.4}"),
                            (_, Some(a)) => format!(", alpha {a:.6}"),
                            _ => String::new(),
                        }
                    );
                }
                Ok(ExitCode::SUCCESS)
            })
        }
        Command::Split {
            data,
            label_col,
            header,
            delimiter,
            fraction,
            seed,
            prefix,
        } => {
            let spec = dataset_spec(&data, &label_col, header, delimiter, None)?;
            let sample = load(&spec)?;
            let (train, test) = split(&sample, fraction, seed)?;
            save(&train, Path::new(&format!("{prefix}_train.csv")))?;
            save(&test, Path::new(&format!("{prefix}_test.csv")))?;
            eprintln!("wrote {} train rows, {} test rows", train.len(), test.len());
            Ok(ExitCode::SUCCESS)
        }
    }
}
