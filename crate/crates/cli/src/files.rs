use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use gembed::gauss::GaussianEmbedding;
use gembed::graph::IdMap;
use gembed::sgns::PointEmbedding;

pub fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

/// Create `path` and hand a buffered writer to `body`.
pub fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut out = BufWriter::new(f);
    body(&mut out)?;
    out.flush()?;
    Ok(())
}

/// `index<TAB>external_id`, one node per line.
pub fn write_id_map(path: &Path, ids: &IdMap) -> Result<()> {
    write_file(path, |out| {
        for (i, name) in ids.names().iter().enumerate() {
            writeln!(out, "{i}\t{name}")?;
        }
        Ok(())
    })
}

/// An embedding file in either text format.
pub enum Embedding {
    Point(PointEmbedding),
    Gaussian(GaussianEmbedding),
}

pub struct LoadedEmbedding {
    pub ids: IdMap,
    pub embedding: Embedding,
}

impl LoadedEmbedding {
    pub fn load(path: &Path, gaussian: bool) -> Result<Self> {
        let reader = open(path)?;
        let (ids, embedding) = if gaussian {
            let (ids, e) = GaussianEmbedding::read(reader).with_context(|| format!("reading {}", path.display()))?;
            (ids, Embedding::Gaussian(e))
        } else {
            let (ids, e) = PointEmbedding::read_word2vec(reader).with_context(|| format!("reading {}", path.display()))?;
            (ids, Embedding::Point(e))
        };
        Ok(Self { ids, embedding })
    }

    /// Feature rows: the vectors of a point embedding, the means of a
    /// Gaussian one.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        match &self.embedding {
            Embedding::Point(e) => e.rows(),
            Embedding::Gaussian(e) => e.mu_rows(),
        }
    }

    /// Mean variance of every node, for Gaussian embeddings.
    pub fn uncertainty(&self) -> Option<Vec<f64>> {
        match &self.embedding {
            Embedding::Point(_) => None,
            Embedding::Gaussian(e) => Some(
                (0..e.node_count()).map(|i| e.sigma(i).iter().sum::<f64>() / e.half_dim() as f64).collect(),
            ),
        }
    }
}

/// Non-empty, non-comment lines split on whitespace, with 1-based line numbers.
pub fn data_lines(reader: impl BufRead) -> impl Iterator<Item = Result<(usize, Vec<String>)>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(e.into())),
        Ok(line) => {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                None
            } else {
                Some(Ok((i + 1, body.split_whitespace().map(str::to_string).collect())))
            }
        }
    })
}
