//! Plain-text file formats.
//!
//! * degree sequences: one positive integer per line, no header;
//! * edge lists: `u v` per line, 0-indexed, `u < v`, preceded by `# n <N>`;
//! * spectra: `degree,mean,stderr,count`;
//! * predictions: `degree,knn_pred,c_pred`.
//!
//! CSV files start with `# key: value` metadata lines. Floats are written in
//! Rust's shortest round-trip form, so reading a file back yields the same
//! bits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::analytic::AnalyticPrediction;
use crate::degseq::DegreeSequence;
use crate::ensemble::{DegreeSpectrum, SpectrumRow};
use crate::error::{Error, Result};
use crate::generator::Graph;

/// Ordered `key: value` pairs carried in `#` header lines.
pub type Metadata = Vec<(String, String)>;

pub const SPECTRUM_HEADER: &str = "degree,mean,stderr,count";
pub const PREDICTION_HEADER: &str = "degree,knn_pred,c_pred";

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Parses a degree file. Every line, including the last, must hold one
/// positive integer; a single trailing newline is allowed.
///
/// ```
/// use addnet::io::parse_degrees;
///
/// assert_eq!(parse_degrees("2\n3\n").unwrap(), vec![2, 3]);
/// let err = parse_degrees("2\nx\n").unwrap_err();
/// assert!(err.to_string().contains("line 2"));
/// ```
pub fn parse_degrees(text: &str) -> Result<Vec<u32>> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    if body.is_empty() {
        return Err(parse_err(1, "empty degree file"));
    }
    body.split('\n')
        .enumerate()
        .map(|(i, raw)| {
            let line = raw.strip_suffix('\r').unwrap_or(raw).trim();
            if line.is_empty() {
                return Err(parse_err(i + 1, "blank line"));
            }
            match line.parse::<u32>() {
                Ok(0) => Err(parse_err(i + 1, "degree must be >= 1")),
                Ok(k) => Ok(k),
                Err(_) => Err(parse_err(i + 1, format!("not a positive integer: '{line}'"))),
            }
        })
        .collect()
}

pub fn read_degree_file(path: &Path) -> Result<DegreeSequence> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    DegreeSequence::from_list(&parse_degrees(&text)?)
}

pub fn format_degrees(seq: &DegreeSequence) -> String {
    let mut out = String::with_capacity(seq.n() * 3);
    for k in seq.degrees() {
        let _ = writeln!(out, "{k}");
    }
    out
}

pub fn write_degree_file(path: &Path, seq: &DegreeSequence) -> Result<()> {
    fs::write(path, format_degrees(seq))?;
    Ok(())
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut out = format!("# n {}\n", g.n());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

/// Parses an edge list written by [`format_edge_list`].
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut n = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("n ") {
                n = Some(v.trim().parse::<usize>().map_err(|_| parse_err(i + 1, "bad vertex count"))?);
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(parse_err(i + 1, format!("expected 'u v', got '{line}'")));
        };
        let parse = |s: &str| s.parse::<u32>().map_err(|_| parse_err(i + 1, format!("bad vertex '{s}'")));
        let (u, v) = (parse(a)?, parse(b)?);
        if u >= v {
            return Err(parse_err(i + 1, format!("edge {u} {v} is not ordered u < v")));
        }
        edges.push((u, v));
    }
    let n = n.ok_or_else(|| parse_err(1, "missing '# n <N>' header"))?;
    Graph::from_edges(n, &edges)
}

fn write_metadata(out: &mut String, meta: &Metadata) {
    for (k, v) in meta {
        let _ = writeln!(out, "# {k}: {v}");
    }
}

/// Splits `#` metadata from the data lines and checks the column header.
fn split_csv<'a>(text: &'a str, header: &str) -> Result<(Metadata, Vec<(usize, &'a str)>)> {
    let mut meta = Vec::new();
    let mut lines = text.lines().enumerate().peekable();
    while let Some((_, line)) = lines.peek() {
        let Some(rest) = line.strip_prefix('#') else { break };
        if let Some((k, v)) = rest.trim_start().split_once(": ") {
            meta.push((k.to_string(), v.to_string()));
        }
        lines.next();
    }
    match lines.next() {
        Some((_, line)) if line.trim() == header => {}
        Some((i, line)) => return Err(parse_err(i + 1, format!("expected header '{header}', got '{line}'"))),
        None => return Err(parse_err(1, format!("missing header '{header}'"))),
    }
    Ok((meta, lines.map(|(i, l)| (i + 1, l)).collect()))
}

fn fields<const K: usize>(line_no: usize, line: &str) -> Result<[&str; K]> {
    let parts: Vec<&str> = line.trim().split(',').collect();
    parts
        .try_into()
        .map_err(|p: Vec<&str>| parse_err(line_no, format!("expected {K} fields, got {}", p.len())))
}

fn num<T: std::str::FromStr>(line_no: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| parse_err(line_no, format!("bad number '{s}'")))
}

pub fn format_spectrum(meta: &Metadata, spectrum: &DegreeSpectrum) -> String {
    let mut out = String::new();
    write_metadata(&mut out, meta);
    out.push_str(SPECTRUM_HEADER);
    out.push('\n');
    for r in &spectrum.rows {
        let _ = writeln!(out, "{},{},{},{}", r.degree, r.mean, r.stderr, r.sample_count);
    }
    out
}

pub fn parse_spectrum(text: &str) -> Result<(Metadata, DegreeSpectrum)> {
    let (meta, lines) = split_csv(text, SPECTRUM_HEADER)?;
    let mut rows = Vec::with_capacity(lines.len());
    for (i, line) in lines {
        let [d, m, s, c] = fields::<4>(i, line)?;
        rows.push(SpectrumRow {
            degree: num(i, d)?,
            mean: num(i, m)?,
            stderr: num(i, s)?,
            sample_count: num(i, c)?,
        });
    }
    Ok((meta, DegreeSpectrum::new(rows)))
}

/// One row of a prediction file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionRow {
    pub degree: u32,
    pub knn: f64,
    pub clustering: f64,
}

/// Scalar block plus rows for every degree in `k_min ..= k_max`.
/// An undefined `r` is written as an empty value.
pub fn format_prediction(meta: &Metadata, pred: &AnalyticPrediction, k_min: u32, k_max: u32) -> String {
    let mut out = String::new();
    write_metadata(&mut out, meta);
    let r = pred.r.map(|r| r.to_string()).unwrap_or_default();
    let scalars = [
        ("n", pred.n.to_string()),
        ("z", pred.z.to_string()),
        ("p", pred.p.to_string()),
        ("q", pred.q.to_string()),
        ("r", r),
        ("mean_clustering", pred.mean_clustering.to_string()),
        ("slope", pred.linear_slope.to_string()),
        ("intercept", pred.linear_intercept.to_string()),
    ];
    for (k, v) in scalars {
        let _ = writeln!(out, "# {k}: {v}");
    }
    out.push_str(PREDICTION_HEADER);
    out.push('\n');
    for k in k_min..=k_max {
        let _ = writeln!(out, "{k},{},{}", pred.knn_of_k(k), pred.clustering_of_k(k));
    }
    out
}

/// Parsed prediction file.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionFile {
    pub meta: Metadata,
    pub rows: Vec<PredictionRow>,
}

impl PredictionFile {
    pub fn scalar(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// A numeric scalar; `Ok(None)` when present but empty.
    pub fn number(&self, key: &str) -> Result<Option<f64>> {
        match self.scalar(key) {
            None => Err(parse_err(1, format!("prediction file lacks '{key}'"))),
            Some("") => Ok(None),
            Some(v) => num(1, v).map(Some),
        }
    }
}

pub fn parse_prediction(text: &str) -> Result<PredictionFile> {
    let (meta, lines) = split_csv(text, PREDICTION_HEADER)?;
    let mut rows = Vec::with_capacity(lines.len());
    for (i, line) in lines {
        let [d, k, c] = fields::<3>(i, line)?;
        rows.push(PredictionRow { degree: num(i, d)?, knn: num(i, k)?, clustering: num(i, c)? });
    }
    Ok(PredictionFile { meta, rows })
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
