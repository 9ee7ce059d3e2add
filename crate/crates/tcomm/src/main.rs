use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use tcomm::formats;
use tcomm::heatmap::{render_heatmap, HeatmapStyle};
use tcomm::ingest::{ingest_events, parse_duration, Columns, IngestFormat, IngestReport};
use tcomm::manifest::RunManifest;
use tcomm::parallel::pool;
use tcomm::pipeline::{self, join_measures, PipelineParams, ScanParams, SweepConfig};
use tcomm_core::{Measure, SynthConfig, TemporalGraph};

#[derive(Parser)]
#[command(
    name = "tcomm",
    version,
    about = "Community similarity across temporal network snapshots"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an edge list and report what was read.
    IngestCheck(InputArgs),
    /// Per-slice statistics for candidate window lengths.
    WindowScan(ScanArgs),
    /// Sliding-window detection and pairwise similarity matrices.
    Pipeline(PipelineArgs),
    /// Synthetic churn/flip sweep.
    Synth(SynthArgs),
    /// Render a matrix CSV as an SVG heatmap.
    Render(RenderArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Edge list, one `src dst time [weight]` event per line.
    #[arg(long)]
    input: PathBuf,
    /// Field separator; `tab` and `\t` are accepted.
    #[arg(long, default_value = " ", value_parser = parse_delimiter)]
    delimiter: char,
    /// Column indices as src,dst,time[,weight].
    #[arg(long, default_value = "0,1,2")]
    columns: Columns,
    /// Skip the first non-comment line.
    #[arg(long)]
    header: bool,
    /// Drop events before this time.
    #[arg(long, allow_hyphen_values = true)]
    start: Option<i64>,
    /// Drop events at or after this time.
    #[arg(long, allow_hyphen_values = true)]
    end: Option<i64>,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Candidate window lengths, e.g. `1d,5d,10d`.
    #[arg(long, required = true, value_delimiter = ',', value_parser = parse_dur)]
    window: Vec<i64>,
    #[arg(long, default_value_t = 1.0)]
    resolution: f64,
    /// Null-model samples per slice; below 2 skips the z-score.
    #[arg(long, default_value_t = 100)]
    null_samples: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PipelineArgs {
    /// Edge list input (omit with --partitions).
    #[command(flatten)]
    input: Option<InputArgs>,
    /// Stored partitions CSV with numeric node ids; skips detection.
    #[arg(long, conflicts_with = "input")]
    partitions: Option<PathBuf>,
    #[arg(long, value_parser = parse_dur, required_unless_present = "partitions")]
    window: Option<i64>,
    #[arg(long, default_value_t = 0.1)]
    stride_fraction: f64,
    #[arg(long, default_value_t = 1.0)]
    resolution: f64,
    #[arg(long, default_value = "unmi,inmi", value_delimiter = ',')]
    measures: Vec<Measure>,
    /// Do not write SVG heatmaps.
    #[arg(long)]
    no_heatmaps: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 500)]
    pool_size: usize,
    #[arg(long, default_value_t = 400)]
    network_size: usize,
    #[arg(long, default_value_t = 4)]
    communities: u32,
    #[arg(long, default_value_t = 50)]
    iterations: usize,
    /// Node churn probabilities (phi).
    #[arg(long, default_value = "0,0.001,0.01,0.1", value_delimiter = ',')]
    churns: Vec<f64>,
    /// Label flip probabilities (psi).
    #[arg(long, default_value = "0.001,0.01,0.1", value_delimiter = ',')]
    flips: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    replicates: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct RenderArgs {
    /// Matrix CSV.
    #[arg(long)]
    input: PathBuf,
    /// Output SVG file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    title: Option<String>,
    /// Side of the grid in pixels.
    #[arg(long, default_value_t = 600.0)]
    size: f64,
}

fn parse_delimiter(s: &str) -> Result<char, String> {
    match s {
        "tab" | "\\t" => Ok('\t'),
        "space" => Ok(' '),
        _ => {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(format!("delimiter must be a single character, got {s:?}")),
            }
        }
    }
}

fn parse_dur(s: &str) -> Result<i64, String> {
    parse_duration(s).map_err(|e| e.to_string())
}

fn load(args: &InputArgs, manifest: &mut RunManifest) -> Result<(TemporalGraph, IngestReport)> {
    let file =
        File::open(&args.input).with_context(|| format!("opening {}", args.input.display()))?;
    let format = IngestFormat {
        delimiter: args.delimiter,
        columns: args.columns,
        header: args.header,
    };
    let (mut g, report) = ingest_events(BufReader::new(file), &format)
        .with_context(|| format!("reading {}", args.input.display()))?;
    if args.start.is_some() || args.end.is_some() {
        let start = args.start.or(g.t_min()).unwrap_or(0);
        let end = args
            .end
            .or(g.t_max().map(|t| t.saturating_add(1)))
            .unwrap_or(0);
        g = g.restrict_time(start, end)?;
        if g.is_empty() {
            bail!("no events in [{start}, {end})");
        }
    }
    manifest.set_input(&args.input)?;
    manifest
        .set("delimiter", format!("{:?}", args.delimiter))
        .set("columns", format!("{:?}", args.columns))
        .set("header", args.header)
        .set(
            "trim_start",
            args.start.map_or("none".into(), |t| t.to_string()),
        )
        .set(
            "trim_end",
            args.end.map_or("none".into(), |t| t.to_string()),
        );
    Ok((g, report))
}

fn ingest_check(args: InputArgs) -> Result<()> {
    let mut m = RunManifest::new("ingest-check");
    let (g, r) = load(&args, &mut m)?;
    println!("lines={}", r.lines);
    println!("events={}", g.len());
    println!("nodes={}", g.node_universe().len());
    println!("t_min={}", g.t_min().unwrap_or_default());
    println!("t_max={}", g.t_max().unwrap_or_default());
    println!("skipped_comments={}", r.comments);
    println!("malformed={}", r.malformed);
    if !r.malformed_lines.is_empty() {
        let lines: Vec<String> = r.malformed_lines.iter().map(usize::to_string).collect();
        println!("malformed_lines={}", lines.join(","));
    }
    Ok(())
}

fn window_scan(args: ScanArgs) -> Result<()> {
    let mut m = RunManifest::new("window-scan");
    let (g, _) = load(&args.input, &mut m)?;
    let p = ScanParams {
        resolution: args.resolution,
        null_samples: args.null_samples,
        seed: args.common.seed,
        ..ScanParams::default()
    };
    let lengths: Vec<String> = args.window.iter().map(i64::to_string).collect();
    m.set("windows", lengths.join(","))
        .set("resolution", p.resolution)
        .set("null_samples", p.null_samples)
        .set("swap_factor", p.swap_factor)
        .set("seed", p.seed);
    let rows = pipeline::window_scan(&pool(args.common.workers)?, &g, &args.window, &p)?;
    for r in &rows {
        let flag = if r.degenerate {
            " degenerate"
        } else if r.sparse {
            " sparse"
        } else {
            ""
        };
        println!(
            "window={} slices={} empty={} lcc={} modularity={} edge_node={} z={}{flag}",
            r.window_length,
            r.slice_count(),
            r.empty_slices,
            opt(r.mean_lcc()),
            opt(r.mean_modularity()),
            opt(r.mean_edge_node_ratio()),
            opt(r.mean_z())
        );
    }
    pipeline::write_window_scan(&args.common.out, &rows, &mut m)?;
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".into(), |x| format!("{x:.4}"))
}

fn run_pipeline(args: PipelineArgs) -> Result<()> {
    let pool = pool(args.common.workers)?;
    let (out, graph, mut m) = if let Some(path) = &args.partitions {
        let mut m = RunManifest::new("pipeline");
        m.set_input(path)?;
        m.set("measures", join_measures(&args.measures))
            .set("source", "partitions");
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let partitions = formats::read_partitions(BufReader::new(file))?;
        let matrices = pipeline::matrices_from_partitions(&pool, &partitions, &args.measures)?;
        (
            pipeline::PipelineOutput {
                stride: 0,
                counts: Vec::new(),
                partitions,
                matrices,
            },
            None,
            m,
        )
    } else {
        let Some(input) = &args.input else {
            bail!("either --input or --partitions is required")
        };
        let mut m = RunManifest::new("pipeline");
        let (g, _) = load(input, &mut m)?;
        let p = PipelineParams {
            window: args.window.context("--window is required")?,
            stride_fraction: args.stride_fraction,
            resolution: args.resolution,
            measures: args.measures.clone(),
            seed: args.common.seed,
        };
        p.record(&mut m);
        let o = pipeline::similarity_pipeline(&pool, &g, &p)?;
        m.set("stride", o.stride);
        (o, Some(g), m)
    };
    pipeline::write_pipeline(&args.common.out, graph.as_ref(), &out, &mut m)?;
    if !args.no_heatmaps {
        for mat in &out.matrices {
            let svg = render_heatmap(mat, &HeatmapStyle::default())?;
            let path = args.common.out.join(format!("heatmap_{}.svg", mat.measure));
            std::fs::write(&path, svg).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    println!(
        "windows={} partitions={}",
        out.counts.len(),
        out.partitions.len()
    );
    for mat in &out.matrices {
        println!(
            "{} off_diagonal_mean={}",
            mat.measure,
            opt(mat.off_diagonal_mean())
        );
    }
    println!("run_id={} out={}", m.run_id(), args.common.out.display());
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    let cfg = SweepConfig {
        base: SynthConfig {
            pool_size: args.pool_size,
            network_size: args.network_size,
            communities: args.communities,
            iterations: args.iterations,
            ..SynthConfig::default()
        },
        churns: args.churns,
        flips: args.flips,
        replicates: args.replicates,
        seed: args.common.seed,
    };
    let mut m = RunManifest::new("synth");
    cfg.record(&mut m);
    let cells = pipeline::synth_sweep(&pool(args.common.workers)?, &cfg)?;
    for c in &cells {
        println!(
            "phi={} psi={} unmi={:.4} inmi={:.4}",
            c.churn,
            c.flip,
            c.mean_unmi(),
            c.mean_inmi()
        );
    }
    pipeline::write_sweep(&args.common.out, &cells, &mut m)?;
    Ok(())
}

fn render(args: RenderArgs) -> Result<()> {
    let m = read_matrix(&args.input)?;
    let svg = render_heatmap(
        &m,
        &HeatmapStyle {
            size: args.size,
            title: args.title,
        },
    )?;
    std::fs::write(&args.out, svg).with_context(|| format!("writing {}", args.out.display()))?;
    Ok(())
}

fn read_matrix(path: &Path) -> Result<tcomm_core::SimilarityMatrix> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    formats::read_matrix(BufReader::new(file))
        .with_context(|| format!("reading {}", path.display()))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::IngestCheck(a) => ingest_check(a),
        Command::WindowScan(a) => window_scan(a),
        Command::Pipeline(a) => run_pipeline(a),
        Command::Synth(a) => synth(a),
        Command::Render(a) => render(a),
    }
}
