use std::io::Write;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use gembed::eval::pca_project;

use crate::files::{write_file, LoadedEmbedding};

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[arg(long)]
    embedding: PathBuf,
    /// Read a Gaussian (mu + sigma) embedding; its means are projected.
    #[arg(long)]
    gaussian: bool,
    /// Coordinates TSV: `id x y`, plus `uncertainty` for Gaussian input.
    #[arg(long)]
    out: PathBuf,
}

/// Centered copy of 2-D rows.
fn centered(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len().max(1) as f64;
    let mean: Vec<f64> = (0..2).map(|k| rows.iter().map(|r| r[k]).sum::<f64>() / n).collect();
    rows.iter().map(|r| vec![r[0] - mean[0], r[1] - mean[1]]).collect()
}

pub fn run(args: &ProjectArgs) -> Result<()> {
    let emb = LoadedEmbedding::load(&args.embedding, args.gaussian)?;
    let rows = emb.rows();
    let coords = match rows.first().map_or(0, Vec::len) {
        2 => centered(&rows),
        1 => pca_project(&rows, 1)?.coords.into_iter().map(|c| vec![c[0], 0.0]).collect(),
        _ => pca_project(&rows, 2)?.coords,
    };
    let uncertainty = emb.uncertainty();
    write_file(&args.out, |out| {
        write!(out, "id\tx\ty")?;
        if uncertainty.is_some() {
            write!(out, "\tuncertainty")?;
        }
        writeln!(out)?;
        for (i, c) in coords.iter().enumerate() {
            write!(out, "{}\t{}\t{}", emb.ids.name(i), c[0], c[1])?;
            if let Some(u) = &uncertainty {
                write!(out, "\t{}", u[i])?;
            }
            writeln!(out)?;
        }
        Ok(())
    })
}
