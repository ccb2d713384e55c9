use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use clique_interdict::{solve_eicp, SolveOptions, SolveStatus};

use crate::input::{k_from_fraction, load_graph};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    /// Seconds per instance.
    pub time_limit: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    pub workers: Option<usize>,
    #[serde(default)]
    pub run: Vec<Run>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Run {
    pub graph: PathBuf,
    pub k: Option<u64>,
    /// Budget as a fraction of the edge count.
    pub c: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub k: Option<u64>,
    pub eta: String,
    pub status: String,
    pub time_ms: Option<u128>,
    pub lb: Option<usize>,
    pub ub: Option<usize>,
    pub vertices_removed_pct: Option<String>,
    pub edges_removed_pct: Option<String>,
    pub nodes: Option<u64>,
    pub cuts: Option<usize>,
}

pub const HEADER: [&str; 13] = [
    "instance",
    "n",
    "m",
    "k",
    "eta",
    "status",
    "time_ms",
    "lb",
    "ub",
    "vertices_removed_pct",
    "edges_removed_pct",
    "nodes",
    "cuts",
];

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let manifest: Manifest =
        toml::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))?;
    for run in &manifest.run {
        if run.k.is_some() == run.c.is_some() {
            bail!("run {}: give exactly one of k and c", run.graph.display());
        }
        if run.c.is_some_and(|c| !(c >= 0.0)) {
            bail!("run {}: c must be nonnegative", run.graph.display());
        }
    }
    if let Some(t) = manifest.time_limit {
        if !(t > 0.0) {
            bail!("time_limit must be positive");
        }
    }
    Ok(manifest)
}

fn pct(part: usize, whole: usize) -> String {
    if whole == 0 {
        "0.00".to_string()
    } else {
        format!("{:.2}", 100.0 * part as f64 / whole as f64)
    }
}

fn run_one(run: &Run, base: &Path, seed: u64, time_limit: Option<Duration>) -> BenchRow {
    let path = if run.graph.is_absolute() {
        run.graph.clone()
    } else {
        base.join(&run.graph)
    };
    let mut row = BenchRow {
        instance: run.graph.display().to_string(),
        n: None,
        m: None,
        k: run.k,
        eta: "-".to_string(),
        status: "error".to_string(),
        time_ms: None,
        lb: None,
        ub: None,
        vertices_removed_pct: None,
        edges_removed_pct: None,
        nodes: None,
        cuts: None,
    };
    let Ok(g) = load_graph(&path, None, false) else {
        return row;
    };
    let k = match (run.k, run.c) {
        (Some(k), _) => k,
        (None, Some(c)) => match k_from_fraction(&c.to_string(), g.m()) {
            Ok(k) => k,
            Err(_) => return row,
        },
        (None, None) => return row,
    };
    let r = solve_eicp(
        &g,
        k,
        &SolveOptions {
            seed,
            time_limit,
            ..Default::default()
        },
    );
    row.n = Some(g.n());
    row.m = Some(g.m());
    row.k = Some(k);
    row.time_ms = Some(r.wall_time.as_millis());
    row.lb = Some(r.lb);
    row.ub = Some(r.ub);
    row.vertices_removed_pct = Some(pct(r.reduction.vertices_removed, g.n()));
    row.edges_removed_pct = Some(pct(r.reduction.edges_removed, g.m()));
    row.nodes = Some(r.nodes);
    row.cuts = Some(r.cuts);
    match r.status {
        SolveStatus::Solved => {
            row.eta = r.eta.to_string();
            row.status = "solved".to_string();
        }
        SolveStatus::Timeout => {
            row.status = "timeout".to_string();
            row.time_ms = time_limit.map(|t| t.as_millis()).or(row.time_ms);
        }
    }
    row
}

/// Runs every manifest entry, writing each row to `out` as it finishes.
/// Returns the number of rows written.
pub fn run_manifest(
    manifest: &Manifest,
    base: &Path,
    workers: usize,
    out: impl std::io::Write,
) -> Result<usize> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    writer.write_record(HEADER)?;
    writer.flush()?;
    let time_limit = manifest.time_limit.map(Duration::from_secs_f64);
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    let mut written = 0;
    std::thread::scope(|scope| -> Result<()> {
        for _ in 0..workers.clamp(1, manifest.run.len().max(1)) {
            let tx = tx.clone();
            let next = &next;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(run) = manifest.run.get(i) else { break };
                let row = run_one(run, base, manifest.seed, time_limit);
                if tx.send(row).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for row in rx {
            writer.serialize(&row)?;
            writer.flush()?;
            written += 1;
        }
        Ok(())
    })?;
    Ok(written)
}
