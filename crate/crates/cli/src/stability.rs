use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use gembed::eval::{snapshot_stability, MetricsReport};
use gembed::graph::load_snapshot_dir;
use serde_json::json;

use crate::files::{write_file, LoadedEmbedding};
use crate::{usage, Globals};

#[derive(Debug, Args)]
pub struct StabilityArgs {
    /// Directory of snapshot edge lists, taken in file-name order.
    #[arg(long)]
    snapshots: PathBuf,
    /// One embedding file per snapshot, in the same order.
    #[arg(long, num_args = 1.., required = true)]
    embeddings: Vec<PathBuf>,
    #[arg(long)]
    gaussian: bool,
    #[arg(long)]
    directed: bool,
    #[arg(long)]
    weighted: bool,
    /// Metrics report (JSON).
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: &StabilityArgs, globals: Globals) -> Result<()> {
    let seq = load_snapshot_dir(&args.snapshots, args.directed, args.weighted)?;
    if seq.len() != args.embeddings.len() {
        return Err(usage(format!(
            "{} snapshots but {} embedding files",
            seq.len(),
            args.embeddings.len()
        )));
    }
    let ids = seq.ids();
    let mut per_snapshot = Vec::with_capacity(seq.len());
    for path in &args.embeddings {
        let emb = LoadedEmbedding::load(path, args.gaussian)?;
        let rows = emb.rows();
        let vectors: Vec<Option<Vec<f64>>> =
            ids.names().iter().map(|name| emb.ids.get(name).map(|i| rows[i].clone())).collect();
        per_snapshot.push(vectors);
    }
    let report = snapshot_stability(&seq, &per_snapshot)?;

    let config = json!({
        "snapshots": args.snapshots.display().to_string(),
        "snapshot_labels": (0..seq.len()).map(|t| seq.label(t)).collect::<Vec<_>>(),
        "embeddings": args.embeddings.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "gaussian": args.gaussian,
        "directed": args.directed,
        "weighted": args.weighted,
    });
    let mut metrics = MetricsReport::new("stability", config, vec![globals.seed]);
    metrics.insert("stability_constant", report.constant)?;
    for (t, r) in report.ratios.iter().enumerate() {
        metrics.insert(&format!("relative_stability_t{t}"), *r)?;
    }
    write_file(&args.out, |w| Ok(metrics.write(w)?))
}
