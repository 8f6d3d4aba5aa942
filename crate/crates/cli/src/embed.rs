use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use gembed::gauss::{train_g2g, train_kg2e, CorruptionMode, G2gConfig, Kg2eConfig, KgEnergy};
use gembed::graph::{load_attributes, load_edge_list, load_triples, split_edges, Graph, IdMap};
use gembed::sgns::{train_line, train_skipgram, LineOrder, SgnsConfig};
use gembed::walks::{preprocess_transition_probs, simulate_walks, WalkConfig};
use serde_json::json;

use crate::files::{open, write_file, write_id_map};
use crate::{usage, Globals};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Deepwalk,
    Node2vec,
    Line1,
    Line2,
    G2g,
    Kg2e,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Deepwalk => "deepwalk",
            Method::Node2vec => "node2vec",
            Method::Line1 => "line1",
            Method::Line2 => "line2",
            Method::G2g => "g2g",
            Method::Kg2e => "kg2e",
        }
    }

    fn is_gaussian(self) -> bool {
        matches!(self, Method::G2g | Method::Kg2e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnergyArg {
    Kl,
    El,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorruptionArg {
    Unif,
    Bern,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long, value_enum)]
    method: Method,

    /// Edge list, `src dst [weight]` per line.
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long)]
    directed: bool,
    #[arg(long)]
    weighted: bool,
    /// Sparse node attributes, `node feature value` per line (g2g).
    #[arg(long)]
    attributes: Option<PathBuf>,
    /// Use one-hot node identities when no attributes are given (g2g).
    #[arg(long)]
    identity_features: bool,
    /// Knowledge-graph triples, `head relation tail` per line (kg2e).
    #[arg(long)]
    triples: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,

    /// Embedding size L; Gaussian methods split it into L/2 means and L/2 variances.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 10)]
    num_walks: usize,
    #[arg(long, default_value_t = 80)]
    walk_length: usize,
    #[arg(long, default_value_t = 10)]
    window: usize,
    /// Return parameter (node2vec).
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// In-out parameter (node2vec).
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, default_value_t = 5)]
    negatives: usize,
    /// Neighborhood radius K for g2g triplets.
    #[arg(long, default_value_t = 2)]
    hops: usize,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    /// Margin for kg2e.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, value_enum, default_value = "kl")]
    energy: EnergyArg,
    #[arg(long, value_enum, default_value = "unif")]
    corruption: CorruptionArg,
    /// Hidden layer widths of the g2g encoder, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "512")]
    hidden: Vec<usize>,

    /// Hold out validation and test edges before training and write the
    /// labeled pairs next to the embedding.
    #[arg(long)]
    holdout: bool,
    #[arg(long, default_value_t = 0.10)]
    p_val: f64,
    #[arg(long, default_value_t = 0.05)]
    p_test: f64,
    /// Also write the walk corpus (deepwalk, node2vec).
    #[arg(long)]
    dump_walks: bool,
}

fn path_str(p: &Option<PathBuf>) -> serde_json::Value {
    p.as_ref().map_or(serde_json::Value::Null, |p| json!(p.display().to_string()))
}

fn check_inputs(args: &EmbedArgs, dim: usize) -> Result<()> {
    let m = args.method;
    if m == Method::Kg2e {
        if args.triples.is_none() {
            return Err(usage("kg2e needs --triples"));
        }
    } else if args.edges.is_none() {
        return Err(usage(format!("{} needs --edges", m.name())));
    }
    if m == Method::G2g && args.attributes.is_none() && !args.identity_features {
        return Err(usage("g2g needs --attributes or --identity-features"));
    }
    if m.is_gaussian() && (dim == 0 || dim % 2 != 0) {
        return Err(usage(format!("{} needs an even, positive --dim, got {dim}", m.name())));
    }
    if args.holdout && m == Method::Kg2e {
        return Err(usage("--holdout applies to graph methods only"));
    }
    Ok(())
}

fn load_graph(args: &EmbedArgs) -> Result<Graph> {
    let path = args.edges.as_ref().expect("checked by check_inputs");
    let mut g = load_edge_list(open(path)?, args.directed, args.weighted)
        .with_context(|| format!("reading {}", path.display()))?;
    if let Some(a) = &args.attributes {
        g = load_attributes(g, open(a)?).with_context(|| format!("reading {}", a.display()))?;
    }
    Ok(g)
}

fn write_pairs(path: &Path, ids: &IdMap, pairs: &[(usize, usize, bool)]) -> Result<()> {
    write_file(path, |out| {
        writeln!(out, "src\tdst\tlabel")?;
        for &(u, v, l) in pairs {
            writeln!(out, "{}\t{}\t{}", ids.name(u), ids.name(v), u8::from(l))?;
        }
        Ok(())
    })
}

pub fn run(args: &EmbedArgs, globals: Globals) -> Result<()> {
    let m = args.method;
    let dim = args.dim.unwrap_or(if m == Method::Kg2e { 20 } else { 128 });
    check_inputs(args, dim)?;
    let (default_epochs, default_lr) = match m {
        Method::G2g => (200, 1e-3),
        Method::Kg2e => (200, 0.01),
        _ => (5, 0.025),
    };
    let epochs = args.epochs.unwrap_or(default_epochs);
    let lr = args.lr.unwrap_or(default_lr);
    let seed = globals.seed;

    fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    let out = |name: &str| args.out.join(name);

    let mut config = json!({
        "method": m.name(),
        "seed": seed,
        "threads": globals.threads,
        "inputs": {
            "edges": path_str(&args.edges),
            "directed": args.directed,
            "weighted": args.weighted,
            "attributes": path_str(&args.attributes),
            "identity_features": args.identity_features,
            "triples": path_str(&args.triples),
        },
    });

    if m == Method::Kg2e {
        let path = args.triples.as_ref().expect("checked by check_inputs");
        let kg = load_triples(open(path)?).with_context(|| format!("reading {}", path.display()))?;
        let cfg = Kg2eConfig {
            dim,
            gamma: args.gamma,
            energy: match args.energy {
                EnergyArg::Kl => KgEnergy::Kl,
                EnergyArg::El => KgEnergy::El,
            },
            mode: match args.corruption {
                CorruptionArg::Unif => CorruptionMode::Unif,
                CorruptionArg::Bern => CorruptionMode::Bern,
            },
            epochs,
            learning_rate: lr,
            seed,
            ..Kg2eConfig::default()
        };
        let emb = train_kg2e(&kg, &cfg)?;
        write_file(&out("embedding.txt"), |w| Ok(emb.entities.write(kg.entities(), w)?))?;
        write_file(&out("relations.txt"), |w| Ok(emb.relations.write(kg.relations(), w)?))?;
        write_id_map(&out("ids.tsv"), kg.entities())?;
        config["kg2e"] = json!(cfg);
        return write_config(&out("config.json"), &config);
    }

    let full = load_graph(args)?;
    let graph = if args.holdout {
        let split = split_edges(&full, args.p_val, args.p_test, seed)?;
        write_pairs(&out("val_pairs.tsv"), full.ids(), &split.val_pairs())?;
        write_pairs(&out("test_pairs.tsv"), full.ids(), &split.test_pairs())?;
        config["holdout"] = json!({ "p_val": args.p_val, "p_test": args.p_test });
        full.with_edge_subset(&split.train_edges)?
    } else {
        full
    };
    let ids = graph.ids().clone();

    match m {
        Method::G2g => {
            let cfg = G2gConfig {
                dim,
                hidden: args.hidden.clone(),
                max_hops: args.hops,
                epochs,
                learning_rate: lr,
                seed,
                ..G2gConfig::default()
            };
            let res = train_g2g(&graph, &cfg)?;
            write_file(&out("embedding.txt"), |w| Ok(res.embedding.write(&ids, w)?))?;
            write_file(&out("variances.csv"), |w| Ok(res.history.write_csv(w)?))?;
            config["g2g"] = json!(cfg);
        }
        Method::Deepwalk | Method::Node2vec | Method::Line1 | Method::Line2 => {
            let sgns = SgnsConfig {
                dim,
                epochs,
                learning_rate: lr,
                negatives: args.negatives,
                seed,
                threads: globals.threads,
                ..SgnsConfig::default()
            };
            let emb = if matches!(m, Method::Line1 | Method::Line2) {
                let order = if m == Method::Line1 { LineOrder::First } else { LineOrder::Second };
                train_line(&graph, order, &sgns)?
            } else {
                let (p, q) = if m == Method::Deepwalk { (1.0, 1.0) } else { (args.p, args.q) };
                let walk_cfg = WalkConfig {
                    num_walks: args.num_walks,
                    walk_length: args.walk_length,
                    window: args.window,
                    p,
                    q,
                    seed,
                };
                walk_cfg.validate()?;
                let table = preprocess_transition_probs(&graph, p, q)?;
                let corpus = simulate_walks(&table, &walk_cfg)?;
                if args.dump_walks {
                    write_file(&out("walks.txt"), |w| Ok(corpus.write(&ids, w)?))?;
                }
                config["walks"] = json!(walk_cfg);
                train_skipgram(&corpus, graph.node_count(), &sgns)?
            };
            write_file(&out("embedding.txt"), |w| Ok(emb.write_word2vec(&ids, w)?))?;
            config["sgns"] = json!(sgns);
        }
        Method::Kg2e => unreachable!("handled above"),
    }
    write_id_map(&out("ids.tsv"), &ids)?;
    write_config(&out("config.json"), &config)
}

fn write_config(path: &Path, config: &serde_json::Value) -> Result<()> {
    write_file(path, |w| {
        serde_json::to_writer_pretty(&mut *w, config)?;
        writeln!(w)?;
        Ok(())
    })
}
