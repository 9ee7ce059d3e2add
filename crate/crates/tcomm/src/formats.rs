//! CSV writers and readers.
//!
//! Numbers are written with Rust's shortest round-trip formatting, undefined
//! values as `nan`. Every file starts with a `# run_id=...` comment line that
//! points at the manifest of the run that produced it; readers skip `#` lines.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use tcomm_core::{Measure, NodeId, Partition, SimilarityMatrix, TemporalGraph, ZScoreReport};

use crate::error::{Error, Result};

pub const NAN_TOKEN: &str = "nan";

/// Shortest round-trip decimal, `nan` for NaN.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        NAN_TOKEN.to_owned()
    } else {
        format!("{v}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| NAN_TOKEN.to_owned(), fmt_f64)
}

pub fn parse_f64(token: &str) -> Option<f64> {
    let t = token.trim();
    if t.eq_ignore_ascii_case(NAN_TOKEN) {
        Some(f64::NAN)
    } else {
        t.parse().ok()
    }
}

fn provenance(out: &mut impl Write, run_id: &str) -> Result<()> {
    writeln!(out, "# run_id={run_id}")?;
    Ok(())
}

/// Data lines of a CSV stream with their 1-based line numbers.
fn data_lines(input: impl BufRead) -> impl Iterator<Item = Result<(usize, String)>> {
    input
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Err(e) => Some(Err(Error::parse(i + 1, e.to_string()))),
            Ok(l) if l.trim().is_empty() || l.starts_with('#') => None,
            Ok(l) => Some(Ok((i + 1, l.trim_end_matches('\r').to_owned()))),
        })
}

/// Square matrix: the header row and first column hold the window starts,
/// the top-left cell the measure name.
pub fn write_matrix(out: &mut impl Write, m: &SimilarityMatrix, run_id: &str) -> Result<()> {
    provenance(out, run_id)?;
    let mut line = String::from(m.measure.name());
    for t in &m.index {
        write!(line, ",{t}").unwrap();
    }
    writeln!(out, "{line}")?;
    for (i, t) in m.index.iter().enumerate() {
        line.clear();
        write!(line, "{t}").unwrap();
        for &v in m.row(i) {
            line.push(',');
            line.push_str(&fmt_f64(v));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_matrix(input: impl BufRead) -> Result<SimilarityMatrix> {
    let mut lines = data_lines(input);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| Error::parse(0, "empty matrix file"))??;
    let mut cells = header.split(',');
    let measure: Measure = cells
        .next()
        .unwrap_or_default()
        .parse()
        .map_err(|e: tcomm_core::UnknownMeasure| Error::parse(hl, e.to_string()))?;
    let index = cells
        .map(|c| {
            c.trim()
                .parse::<i64>()
                .map_err(|_| Error::parse(hl, format!("bad window start {c:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = index.len();
    let mut values = Vec::with_capacity(n * n);
    let mut rows = 0;
    for item in lines {
        let (ln, line) = item?;
        let mut cells = line.split(',');
        let label = cells.next().unwrap_or_default().trim();
        if rows >= n || label.parse::<i64>().ok() != Some(index[rows]) {
            return Err(Error::parse(ln, format!("unexpected row label {label:?}")));
        }
        let before = values.len();
        for c in cells {
            values.push(parse_f64(c).ok_or_else(|| Error::parse(ln, format!("bad value {c:?}")))?);
        }
        if values.len() - before != n {
            return Err(Error::parse(ln, format!("expected {n} values")));
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::parse(0, format!("expected {n} rows, found {rows}")));
    }
    Ok(SimilarityMatrix::from_values(measure, index, values))
}

/// `window_index,node_id,label`, one row per assigned node. Node ids are the
/// original tokens when a graph is given, numeric ids otherwise.
pub fn write_partitions(
    out: &mut impl Write,
    partitions: &[(usize, Partition)],
    graph: Option<&TemporalGraph>,
    run_id: &str,
) -> Result<()> {
    provenance(out, run_id)?;
    writeln!(out, "window_index,node_id,label")?;
    for (w, p) in partitions {
        for (node, label) in p.iter() {
            match graph {
                Some(g) => writeln!(out, "{w},{},{label}", g.name(node))?,
                None => writeln!(out, "{w},{node},{label}")?,
            }
        }
    }
    Ok(())
}

/// Reads a partitions file. Node ids that are all integers are kept as
/// numeric ids; otherwise tokens are interned in order of first appearance,
/// consistently across windows. Window `w` becomes the partition's window
/// `[w, w + 1)`.
pub fn read_partitions(input: impl BufRead) -> Result<Vec<(usize, Partition)>> {
    let mut rows: Vec<(usize, usize, String, u32)> = Vec::new();
    let mut header_seen = false;
    for item in data_lines(input) {
        let (ln, line) = item?;
        if !header_seen {
            header_seen = true;
            if line.starts_with("window_index") {
                continue;
            }
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        let [w, node, label] = f[..] else {
            return Err(Error::parse(ln, "expected window_index,node_id,label"));
        };
        let bad = |what: &str| Error::parse(ln, format!("bad {what}"));
        let w: usize = w.parse().map_err(|_| bad("window index"))?;
        let label: u32 = label.parse().map_err(|_| bad("label"))?;
        if node.is_empty() {
            return Err(bad("node id"));
        }
        rows.push((ln, w, node.to_owned(), label));
    }

    let numeric = rows.iter().all(|r| r.2.parse::<u32>().is_ok());
    let mut interned: HashMap<String, u32> = HashMap::new();
    let mut groups: Vec<(usize, Vec<(NodeId, u32)>)> = Vec::new();
    for (ln, w, node, label) in rows {
        let id = if numeric {
            node.parse().unwrap()
        } else {
            let next = interned.len() as u32;
            *interned.entry(node).or_insert(next)
        };
        match groups.last_mut() {
            Some((last, members)) if *last == w => members.push((NodeId(id), label)),
            Some((last, _)) if *last > w => {
                return Err(Error::parse(ln, "window indices must be ascending"))
            }
            _ => groups.push((w, vec![(NodeId(id), label)])),
        }
    }
    groups
        .into_iter()
        .map(|(w, members)| {
            let p = Partition::from_pairs(members)?.with_window(w as i64, w as i64 + 1);
            Ok((w, p))
        })
        .collect()
}

/// Node and edge counts of every window, empty ones included.
pub fn write_counts(
    out: &mut impl Write,
    rows: &[(i64, i64, usize, usize)],
    run_id: &str,
) -> Result<()> {
    provenance(out, run_id)?;
    writeln!(out, "window_index,window_start,window_end,nodes,edges")?;
    for (i, (s, e, n, m)) in rows.iter().enumerate() {
        writeln!(out, "{i},{s},{e},{n},{m}")?;
    }
    Ok(())
}

pub fn write_zscores(out: &mut impl Write, reports: &[ZScoreReport], run_id: &str) -> Result<()> {
    provenance(out, run_id)?;
    writeln!(out, "window_start,window_end,q_obs,mu,sigma,z,M")?;
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.window_start,
            r.window_end,
            fmt_f64(r.q_observed),
            fmt_f64(r.null_mean),
            fmt_f64(r.null_std),
            fmt_opt(r.z),
            r.sample_count()
        )?;
    }
    Ok(())
}

/// Parsed z-score row: `(start, end, q_obs, mu, sigma, z, M)`.
pub type ZScoreRow = (i64, i64, f64, f64, f64, f64, usize);

pub fn read_zscores(input: impl BufRead) -> Result<Vec<ZScoreRow>> {
    let mut rows = Vec::new();
    for item in data_lines(input) {
        let (ln, line) = item?;
        if line.starts_with("window_start") {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        let bad = || Error::parse(ln, "bad z-score row");
        if f.len() != 7 {
            return Err(bad());
        }
        let num = |i: usize| parse_f64(f[i]).ok_or_else(bad);
        rows.push((
            f[0].parse().map_err(|_| bad())?,
            f[1].parse().map_err(|_| bad())?,
            num(2)?,
            num(3)?,
            num(4)?,
            num(5)?,
            f[6].parse().map_err(|_| bad())?,
        ));
    }
    Ok(rows)
}

/// Statistics of one slice of a window scan.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceStats {
    pub slice_start: i64,
    pub slice_end: i64,
    pub nodes: usize,
    pub edges: usize,
    pub lcc_proportion: Option<f64>,
    pub modularity: Option<f64>,
    pub edge_node_ratio: Option<f64>,
    pub z: Option<f64>,
}

/// One candidate window length of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowScanRow {
    pub window_length: i64,
    pub slices: Vec<SliceStats>,
    pub empty_slices: usize,
    /// every slice is empty
    pub degenerate: bool,
    /// every non-empty slice has at most one edge
    pub sparse: bool,
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, n) = values
        .flatten()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

impl WindowScanRow {
    pub fn slice_count(&self) -> usize {
        self.slices.len()
    }

    pub fn mean_lcc(&self) -> Option<f64> {
        mean(self.slices.iter().map(|s| s.lcc_proportion))
    }

    pub fn mean_modularity(&self) -> Option<f64> {
        mean(self.slices.iter().map(|s| s.modularity))
    }

    pub fn mean_edge_node_ratio(&self) -> Option<f64> {
        mean(self.slices.iter().map(|s| s.edge_node_ratio))
    }

    pub fn mean_z(&self) -> Option<f64> {
        mean(self.slices.iter().map(|s| s.z))
    }
}

fn series(slices: &[SliceStats], f: impl Fn(&SliceStats) -> Option<f64>) -> String {
    slices
        .iter()
        .map(|s| fmt_opt(f(s)))
        .collect::<Vec<_>>()
        .join(";")
}

/// One line per window length; per-slice series are `;`-separated.
pub fn write_window_scan(out: &mut impl Write, rows: &[WindowScanRow], run_id: &str) -> Result<()> {
    provenance(out, run_id)?;
    writeln!(
        out,
        "window_length,slices,empty_slices,degenerate,sparse,mean_lcc_proportion,mean_modularity,\
         mean_edge_node_ratio,mean_z,lcc_series,modularity_series,edge_node_ratio_series,z_series"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.window_length,
            r.slice_count(),
            r.empty_slices,
            r.degenerate,
            r.sparse,
            fmt_opt(r.mean_lcc()),
            fmt_opt(r.mean_modularity()),
            fmt_opt(r.mean_edge_node_ratio()),
            fmt_opt(r.mean_z()),
            series(&r.slices, |s| s.lcc_proportion),
            series(&r.slices, |s| s.modularity),
            series(&r.slices, |s| s.edge_node_ratio),
            series(&r.slices, |s| s.z),
        )?;
    }
    Ok(())
}

/// Per-slice detail of a window scan, one line per slice.
pub fn write_slices(out: &mut impl Write, rows: &[WindowScanRow], run_id: &str) -> Result<()> {
    provenance(out, run_id)?;
    writeln!(out, "window_length,slice_start,slice_end,nodes,edges,lcc_proportion,modularity,edge_node_ratio,z")?;
    for r in rows {
        for s in &r.slices {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.window_length,
                s.slice_start,
                s.slice_end,
                s.nodes,
                s.edges,
                fmt_opt(s.lcc_proportion),
                fmt_opt(s.modularity),
                fmt_opt(s.edge_node_ratio),
                fmt_opt(s.z)
            )?;
        }
    }
    Ok(())
}

/// `node,iteration,label` with `inactive` for nodes outside the network.
pub fn write_membership(
    out: &mut impl Write,
    membership: &[Vec<Option<u32>>],
    run_id: &str,
) -> Result<()> {
    provenance(out, run_id)?;
    writeln!(out, "node,iteration,label")?;
    let nodes = membership.first().map_or(0, Vec::len);
    for node in 0..nodes {
        for (t, state) in membership.iter().enumerate() {
            match state[node] {
                Some(l) => writeln!(out, "{node},{t},{l}")?,
                None => writeln!(out, "{node},{t},inactive")?,
            }
        }
    }
    Ok(())
}
