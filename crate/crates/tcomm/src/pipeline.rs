//! End-to-end workflows behind the CLI subcommands.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rayon::ThreadPool;
use tcomm_core::{
    edge_node_ratio, lcc_proportion, modularity, synth_run, Error as CoreError, Louvain, Measure,
    Partition, SimilarityMatrix, SynthConfig, TemporalGraph, DEFAULT_SWAP_FACTOR,
};

use crate::error::{Error, Result};
use crate::formats::{self, SliceStats, WindowScanRow};
use crate::manifest::{RunManifest, MANIFEST_FILE};
use crate::parallel::{par_detect, par_modularity_zscore, par_pairwise_matrix};

/// `round(fraction * window)`, at least one time unit.
pub fn stride_for(window: i64, fraction: f64) -> Result<i64> {
    if window <= 0 {
        return Err(Error::Invalid(format!(
            "window length must be positive, got {window}"
        )));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Invalid(format!(
            "stride fraction must lie in (0, 1], got {fraction}"
        )));
    }
    Ok(((fraction * window as f64).round() as i64).max(1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineParams {
    pub window: i64,
    pub stride_fraction: f64,
    pub resolution: f64,
    pub measures: Vec<Measure>,
    pub seed: u64,
}

impl PipelineParams {
    pub fn record(&self, m: &mut RunManifest) {
        m.set("window", self.window)
            .set("stride_fraction", self.stride_fraction)
            .set("resolution", self.resolution)
            .set("measures", join_measures(&self.measures))
            .set("seed", self.seed);
    }
}

pub fn join_measures(measures: &[Measure]) -> String {
    measures
        .iter()
        .map(|m| m.name())
        .collect::<Vec<_>>()
        .join(",")
}

/// Node and edge counts of one window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowCounts {
    pub start: i64,
    pub end: i64,
    pub nodes: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub stride: i64,
    /// every window, empty ones included
    pub counts: Vec<WindowCounts>,
    /// `(window index, partition)` for the non-empty windows
    pub partitions: Vec<(usize, Partition)>,
    pub matrices: Vec<SimilarityMatrix>,
}

/// Sliding-window detection followed by the pairwise matrices. Window `i` is
/// detected with seed `seed ^ i`.
pub fn similarity_pipeline(
    pool: &ThreadPool,
    g: &TemporalGraph,
    p: &PipelineParams,
) -> Result<PipelineOutput> {
    let stride = stride_for(p.window, p.stride_fraction)?;
    let snapshots = g.extract_snapshots(p.window, stride)?;
    let counts = snapshots
        .iter()
        .map(|s| WindowCounts {
            start: s.window_start,
            end: s.window_end,
            nodes: s.node_count(),
            edges: s.edge_count(),
        })
        .collect();
    let live: Vec<(usize, &_)> = snapshots
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .collect();
    if live.is_empty() {
        return Err(Error::NoSnapshots);
    }
    let seeds: Vec<u64> = live.iter().map(|&(i, _)| p.seed ^ i as u64).collect();
    let snaps: Vec<_> = live.iter().map(|&(_, s)| s).collect();
    let detected = par_detect(pool, &snaps, &seeds, &Louvain::new(p.resolution))?;
    let partitions: Vec<(usize, Partition)> = live.iter().map(|&(i, _)| i).zip(detected).collect();
    let matrices = matrices_from_partitions(pool, &partitions, &p.measures)?;
    Ok(PipelineOutput {
        stride,
        counts,
        partitions,
        matrices,
    })
}

/// Matrices straight from stored partitions, without detection.
pub fn matrices_from_partitions(
    pool: &ThreadPool,
    partitions: &[(usize, Partition)],
    measures: &[Measure],
) -> Result<Vec<SimilarityMatrix>> {
    let parts: Vec<Partition> = partitions.iter().map(|(_, p)| p.clone()).collect();
    measures
        .iter()
        .map(|&m| par_pairwise_matrix(pool, &parts, m))
        .collect()
}

/// Writes partitions, counts and one CSV per matrix, plus the manifest.
pub fn write_pipeline(
    out: &Path,
    g: Option<&TemporalGraph>,
    o: &PipelineOutput,
    manifest: &mut RunManifest,
) -> Result<()> {
    create_dir(out)?;
    let id = manifest.run_id();
    write_file(&out.join("partitions.csv"), |w| {
        formats::write_partitions(w, &o.partitions, g, &id)
    })?;
    if !o.counts.is_empty() {
        let rows: Vec<_> = o
            .counts
            .iter()
            .map(|c| (c.start, c.end, c.nodes, c.edges))
            .collect();
        write_file(&out.join("counts.csv"), |w| {
            formats::write_counts(w, &rows, &id)
        })?;
    }
    for m in &o.matrices {
        write_file(&out.join(format!("matrix_{}.csv", m.measure)), |w| {
            formats::write_matrix(w, m, &id)
        })?;
    }
    write_manifest(out, manifest)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanParams {
    pub resolution: f64,
    /// null samples per slice; fewer than 2 skips the z-score
    pub null_samples: usize,
    pub seed: u64,
    pub swap_factor: usize,
}

impl Default for ScanParams {
    fn default() -> Self {
        Self {
            resolution: 1.0,
            null_samples: tcomm_core::DEFAULT_SAMPLES,
            seed: 0,
            swap_factor: DEFAULT_SWAP_FACTOR,
        }
    }
}

/// Per-slice statistics for every candidate length, with non-overlapping
/// slices. Slice `i` uses seed `seed ^ i` for detection and its null model.
pub fn window_scan(
    pool: &ThreadPool,
    g: &TemporalGraph,
    lengths: &[i64],
    p: &ScanParams,
) -> Result<Vec<WindowScanRow>> {
    if lengths.is_empty() {
        return Err(Error::Invalid(
            "need at least one candidate window length".into(),
        ));
    }
    if g.is_empty() {
        return Err(Error::NoEvents { malformed: 0 });
    }
    let detector = Louvain::new(p.resolution);
    lengths
        .iter()
        .map(|&len| {
            let snapshots = g.extract_snapshots(len, len)?;
            let slices = pool.install(|| {
                snapshots
                    .par_iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let mut row = SliceStats {
                            slice_start: s.window_start,
                            slice_end: s.window_end,
                            nodes: s.node_count(),
                            edges: s.edge_count(),
                            lcc_proportion: None,
                            modularity: None,
                            edge_node_ratio: None,
                            z: None,
                        };
                        if s.is_empty() {
                            return Ok(row);
                        }
                        let seed = p.seed ^ i as u64;
                        row.lcc_proportion = Some(lcc_proportion(s)?);
                        row.edge_node_ratio = Some(edge_node_ratio(s)?);
                        if s.edge_count() > 0 {
                            let part = tcomm_core::louvain(s, p.resolution, seed)?;
                            row.modularity = Some(modularity(s, &part, p.resolution)?);
                        }
                        if p.null_samples >= 2 && s.edge_count() >= 2 {
                            let r = par_modularity_zscore(
                                pool,
                                s,
                                p.null_samples,
                                seed,
                                p.swap_factor,
                                &detector,
                            )?;
                            row.z = r.z;
                        }
                        Ok(row)
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            let empty_slices = slices.iter().filter(|s| s.nodes == 0).count();
            let degenerate = empty_slices == slices.len();
            let sparse = !degenerate && slices.iter().all(|s| s.nodes == 0 || s.edges <= 1);
            Ok(WindowScanRow {
                window_length: len,
                slices,
                empty_slices,
                degenerate,
                sparse,
            })
        })
        .collect()
}

pub fn write_window_scan(
    out: &Path,
    rows: &[WindowScanRow],
    manifest: &mut RunManifest,
) -> Result<()> {
    create_dir(out)?;
    let id = manifest.run_id();
    write_file(&out.join("window_scan.csv"), |w| {
        formats::write_window_scan(w, rows, &id)
    })?;
    write_file(&out.join("window_scan_slices.csv"), |w| {
        formats::write_slices(w, rows, &id)
    })?;
    write_manifest(out, manifest)
}

/// Grid of synthetic runs over churn and flip probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// pool, network, community and iteration settings; churn, flip and seed
    /// are overridden per run
    pub base: SynthConfig,
    pub churns: Vec<f64>,
    pub flips: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            base: SynthConfig::default(),
            churns: vec![0.0, 0.001, 0.01, 0.1],
            flips: vec![0.001, 0.01, 0.1],
            replicates: 5,
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn record(&self, m: &mut RunManifest) {
        let list = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        m.set("pool_size", self.base.pool_size)
            .set("network_size", self.base.network_size)
            .set("communities", self.base.communities)
            .set("iterations", self.base.iterations)
            .set("churns", list(&self.churns))
            .set("flips", list(&self.flips))
            .set("replicates", self.replicates)
            .set("seed", self.seed);
    }
}

/// One replicate of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRun {
    pub seed: u64,
    pub partitions: Vec<Partition>,
    pub membership: Vec<Vec<Option<u32>>>,
    pub unmi: SimilarityMatrix,
    pub inmi: SimilarityMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub churn: f64,
    pub flip: f64,
    pub runs: Vec<SweepRun>,
}

impl SweepCell {
    fn mean_over_runs(&self, f: impl Fn(&SweepRun) -> Option<f64>) -> f64 {
        let v: Vec<f64> = self.runs.iter().filter_map(f).collect();
        v.iter().sum::<f64>() / v.len() as f64
    }

    /// Mean over replicates of the mean off-diagonal UNMI.
    pub fn mean_unmi(&self) -> f64 {
        self.mean_over_runs(|r| r.unmi.off_diagonal_mean())
    }

    pub fn mean_inmi(&self) -> f64 {
        self.mean_over_runs(|r| r.inmi.off_diagonal_mean())
    }

    /// Every UNMI entry equals the INMI entry bit for bit.
    pub fn unmi_equals_inmi(&self) -> bool {
        self.runs.iter().all(|r| {
            r.unmi
                .values()
                .iter()
                .zip(r.inmi.values())
                .all(|(a, b)| a.to_bits() == b.to_bits())
        })
    }

    pub fn inmi_all_one(&self) -> bool {
        self.runs
            .iter()
            .all(|r| r.inmi.values().iter().all(|&v| v == 1.0))
    }

    pub fn dir_name(&self) -> String {
        format!("phi={}_psi={}", self.churn, self.flip)
    }
}

/// Runs every (churn, flip) cell; replicate `r` uses seed `seed + r`.
pub fn synth_sweep(pool: &ThreadPool, cfg: &SweepConfig) -> Result<Vec<SweepCell>> {
    if cfg.replicates == 0 {
        return Err(Error::Invalid("need at least one replicate".into()));
    }
    let mut jobs = Vec::new();
    for &churn in &cfg.churns {
        for &flip in &cfg.flips {
            for r in 0..cfg.replicates {
                jobs.push(SynthConfig {
                    churn,
                    flip,
                    seed: cfg.seed.wrapping_add(r as u64),
                    ..cfg.base
                });
            }
        }
    }
    let runs = pool.install(|| {
        jobs.par_iter()
            .map(|c| {
                let run = synth_run(c)?;
                let unmi = tcomm_core::pairwise_matrix(&run.partitions, Measure::Unmi)?;
                let inmi = tcomm_core::pairwise_matrix(&run.partitions, Measure::Inmi)?;
                Ok::<_, CoreError>(SweepRun {
                    seed: c.seed,
                    partitions: run.partitions,
                    membership: run.membership,
                    unmi,
                    inmi,
                })
            })
            .collect::<Result<Vec<_>, CoreError>>()
    })?;
    let mut runs = runs.into_iter();
    let mut cells = Vec::new();
    for &churn in &cfg.churns {
        for &flip in &cfg.flips {
            cells.push(SweepCell {
                churn,
                flip,
                runs: runs.by_ref().take(cfg.replicates).collect(),
            });
        }
    }
    Ok(cells)
}

/// One directory per cell plus `summary.csv` and the manifest.
pub fn write_sweep(out: &Path, cells: &[SweepCell], manifest: &mut RunManifest) -> Result<()> {
    create_dir(out)?;
    let id = manifest.run_id();
    for cell in cells {
        let dir = out.join(cell.dir_name());
        create_dir(&dir)?;
        for (r, run) in cell.runs.iter().enumerate() {
            let parts: Vec<(usize, Partition)> =
                run.partitions.iter().cloned().enumerate().collect();
            write_file(&dir.join(format!("partitions_r{r}.csv")), |w| {
                formats::write_partitions(w, &parts, None, &id)
            })?;
            write_file(&dir.join(format!("membership_r{r}.csv")), |w| {
                formats::write_membership(w, &run.membership, &id)
            })?;
            write_file(&dir.join(format!("matrix_unmi_r{r}.csv")), |w| {
                formats::write_matrix(w, &run.unmi, &id)
            })?;
            write_file(&dir.join(format!("matrix_inmi_r{r}.csv")), |w| {
                formats::write_matrix(w, &run.inmi, &id)
            })?;
        }
    }
    write_file(&out.join("summary.csv"), |w| {
        writeln!(w, "# run_id={id}")?;
        writeln!(
            w,
            "phi,psi,replicates,mean_unmi,mean_inmi,unmi_equals_inmi,inmi_all_one"
        )?;
        for c in cells {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                c.churn,
                c.flip,
                c.runs.len(),
                formats::fmt_f64(c.mean_unmi()),
                formats::fmt_f64(c.mean_inmi()),
                c.unmi_equals_inmi(),
                c.inmi_all_one()
            )?;
        }
        Ok(())
    })?;
    write_manifest(out, manifest)
}

pub fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> Result<()>,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_manifest(out: &Path, manifest: &mut RunManifest) -> Result<()> {
    manifest.finish();
    let path: PathBuf = out.join(MANIFEST_FILE);
    write_file(&path, |w| manifest.write(w))
}
