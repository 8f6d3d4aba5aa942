use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Subcommand};
use gembed::eval::{
    kmeans, link_prediction, nmi_and_accuracy, node_classification, score_pairs_gaussian, score_pairs_point,
    silhouette, ClassifyConfig, MetricsReport,
};
use gembed::graph::IdMap;
use serde_json::json;

use crate::files::{data_lines, open, write_file, Embedding, LoadedEmbedding};
use crate::{usage, Globals};

const KMEANS_MAX_ITER: usize = 300;

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(subcommand)]
    task: Task,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    embedding: PathBuf,
    /// Read a Gaussian (mu + sigma) embedding.
    #[arg(long)]
    gaussian: bool,
    /// Metrics report (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Task {
    /// AUC and average precision on labeled pairs.
    Linkpred {
        #[command(flatten)]
        common: Common,
        /// `src dst label` lines with label 1 for edges and 0 for non-edges.
        #[arg(long)]
        pairs: PathBuf,
    },
    /// Micro and macro F1 of logistic regression over repeated random splits.
    Nodeclf {
        #[command(flatten)]
        common: Common,
        /// `node label` lines with integer labels.
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[arg(long, default_value_t = 0.5)]
        train_fraction: f64,
        /// Scale embedding rows to unit length first.
        #[arg(long)]
        normalize: bool,
    },
    /// k-means silhouette and inertia, plus NMI and accuracy against labels.
    Cluster {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Cluster count; defaults to the number of distinct labels.
        #[arg(long)]
        k: Option<usize>,
    },
}

fn parse_pairs(path: &Path, ids: &IdMap) -> Result<Vec<(usize, usize, bool)>> {
    let mut pairs = Vec::new();
    for item in data_lines(open(path)?) {
        let (line, f) = item?;
        if line == 1 && f.first().is_some_and(|s| s == "src") {
            continue;
        }
        if f.len() != 3 {
            return Err(gembed::Error::Parse { line, message: format!("expected 3 columns, found {}", f.len()) })
                .with_context(|| format!("reading {}", path.display()));
        }
        let node = |s: &str| ids.get(s).ok_or_else(|| gembed::Error::UnknownNode(s.to_string()));
        let label = match f[2].as_str() {
            "1" | "true" => true,
            "0" | "false" => false,
            other => {
                return Err(gembed::Error::Parse { line, message: format!("invalid label '{other}'") })
                    .with_context(|| format!("reading {}", path.display()))
            }
        };
        pairs.push((node(&f[0])?, node(&f[1])?, label));
    }
    Ok(pairs)
}

/// `(node index, label)` for every labeled node, in file order.
fn parse_labels(path: &Path, ids: &IdMap) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for item in data_lines(open(path)?) {
        let (line, f) = item?;
        if f.len() != 2 {
            return Err(gembed::Error::Parse { line, message: format!("expected 2 columns, found {}", f.len()) })
                .with_context(|| format!("reading {}", path.display()));
        }
        let node = ids.get(&f[0]).ok_or_else(|| gembed::Error::UnknownNode(f[0].clone()))?;
        let label = f[1]
            .parse()
            .map_err(|_| gembed::Error::Parse { line, message: format!("invalid label '{}'", f[1]) })?;
        out.push((node, label));
    }
    Ok(out)
}

pub fn run(args: &EvalArgs, globals: Globals) -> Result<()> {
    let seed = globals.seed;
    let (name, common, config, metrics) = match &args.task {
        Task::Linkpred { common, pairs } => {
            let emb = LoadedEmbedding::load(&common.embedding, common.gaussian)?;
            let pairs_idx = parse_pairs(pairs, &emb.ids)?;
            let scored = match &emb.embedding {
                Embedding::Point(e) => score_pairs_point(e, &pairs_idx)?,
                Embedding::Gaussian(e) => score_pairs_gaussian(e, &pairs_idx)?,
            };
            let s = link_prediction(&scored)?;
            let config = json!({ "pairs": pairs.display().to_string(), "n_pairs": pairs_idx.len() });
            ("linkpred", common, config, vec![("auc", s.auc), ("ap", s.ap)])
        }
        Task::Nodeclf { common, labels, repeats, train_fraction, normalize } => {
            let emb = LoadedEmbedding::load(&common.embedding, common.gaussian)?;
            let labeled = parse_labels(labels, &emb.ids)?;
            let rows = emb.rows();
            let features: Vec<Vec<f64>> = labeled.iter().map(|&(v, _)| rows[v].clone()).collect();
            let y: Vec<usize> = labeled.iter().map(|&(_, l)| l).collect();
            let cfg = ClassifyConfig {
                train_fraction: *train_fraction,
                n_repeat: *repeats,
                seed,
                normalize_rows: *normalize,
                ..ClassifyConfig::default()
            };
            let f = node_classification(&features, &y, &cfg)?;
            let config = json!({ "labels": labels.display().to_string(), "classify": cfg });
            ("nodeclf", common, config, vec![("f1_micro", f.f1_micro), ("f1_macro", f.f1_macro)])
        }
        Task::Cluster { common, labels, k } => {
            if k.is_none() && labels.is_none() {
                return Err(usage("cluster needs --k or --labels"));
            }
            let emb = LoadedEmbedding::load(&common.embedding, common.gaussian)?;
            let labeled = match labels {
                Some(p) => Some(parse_labels(p, &emb.ids)?),
                None => None,
            };
            let k = match (k, &labeled) {
                (Some(k), _) => *k,
                (None, Some(l)) => {
                    let mut classes: Vec<usize> = l.iter().map(|&(_, c)| c).collect();
                    classes.sort_unstable();
                    classes.dedup();
                    classes.len()
                }
                (None, None) => unreachable!("checked above"),
            };
            let rows = emb.rows();
            let km = kmeans(&rows, k, seed, KMEANS_MAX_ITER)?;
            let mut metrics = vec![("silhouette", silhouette(&rows, &km.assignments)?), ("inertia", km.inertia)];
            if let Some(l) = &labeled {
                let pred: Vec<usize> = l.iter().map(|&(v, _)| km.assignments[v]).collect();
                let truth: Vec<usize> = l.iter().map(|&(_, c)| c).collect();
                let a = nmi_and_accuracy(&pred, &truth)?;
                metrics.push(("nmi", a.nmi));
                metrics.push(("accuracy", a.accuracy));
            }
            let config = json!({
                "labels": labels.as_ref().map(|p| p.display().to_string()),
                "k": k,
                "max_iter": KMEANS_MAX_ITER,
            });
            ("cluster", common, config, metrics)
        }
    };

    let mut config = config;
    config["embedding"] = json!(common.embedding.display().to_string());
    config["gaussian"] = json!(common.gaussian);
    let mut report = MetricsReport::new(name, config, vec![seed]);
    for (k, v) in metrics {
        report.insert(k, v)?;
    }
    write_file(&common.out, |w| Ok(report.write(w)?))
}
