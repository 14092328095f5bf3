//! Loaders for the tabular and grid input formats.
//!
//! Tabular inputs are comma-separated with a header row. Grid inputs start
//! with a line such as `dims=2 shape=4,5 spacing=1.0,1.0 data_range=255`
//! followed by whitespace-separated values in row-major order. A grid file
//! holds two blocks separated by a `---` line: the reference first, then the
//! prediction (or test image).

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use convmetrics::cluster::ClusteredData;
use convmetrics::correlate::VariablePair;
use convmetrics::imgqual::{DataRange, RasterPair};
use convmetrics::regress::PairedSeries;
use convmetrics::segment::Mask;
use convmetrics::{ConfusionMatrix, LabelSet};

use crate::error::{HarnessError, Result};
use crate::task::TaskFamily;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationData {
    pub y_true: Vec<u32>,
    pub y_pred: Vec<u32>,
    /// Union of observed true and predicted labels.
    pub labels: LabelSet,
    /// Optional score for the largest label, for AUC and log loss.
    pub scores: Option<Vec<f64>>,
}

impl ClassificationData {
    pub fn new(y_true: Vec<u32>, y_pred: Vec<u32>, scores: Option<Vec<f64>>) -> Result<Self> {
        let labels = LabelSet::new(y_true.iter().chain(&y_pred).copied().collect::<BTreeSet<_>>())?;
        Ok(ClassificationData {
            y_true,
            y_pred,
            labels,
            scores,
        })
    }

    /// Expands a confusion matrix (rows = truth) into label vectors over
    /// labels `0..k`.
    pub fn from_confusion_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let (mut t, mut p) = (Vec::new(), Vec::new());
        for (i, row) in rows.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                for _ in 0..c {
                    t.push(i as u32);
                    p.push(j as u32);
                }
            }
        }
        let labels = LabelSet::range(rows.len() as u32)?;
        Ok(ClassificationData {
            y_true: t,
            y_pred: p,
            labels,
            scores: None,
        })
    }

    pub fn confusion(&self) -> Result<ConfusionMatrix> {
        Ok(ConfusionMatrix::from_labels(&self.y_true, &self.y_pred, &self.labels)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageData {
    pub pair: RasterPair<f64>,
    /// `data_range` from the header, if declared.
    pub declared_range: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Classification(ClassificationData),
    Regression(PairedSeries<f64>),
    Clustering(ClusteredData<f64>),
    Correlation(VariablePair<f64>),
    /// Samples in order of first appearance of their group name.
    StatTest(Vec<Vec<f64>>),
    Segmentation { reference: Mask<f64>, prediction: Mask<f64> },
    Image(ImageData),
}

/// Column names and side inputs for the tabular formats.
#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Truth column (classification, regression), label column
    /// (clustering) or value column (stattest).
    pub truth_col: Option<String>,
    pub pred_col: Option<String>,
    /// CSV of provided cluster centers: a label column plus the features.
    pub centers: Option<PathBuf>,
}

/// Grid values of one text line, tagged with the line number.
type Row = Vec<(usize, f64)>;

pub fn load_dataset(path: &Path, task: TaskFamily) -> Result<Dataset> {
    load_dataset_with(path, task, &LoadOptions::default())
}

pub fn load_dataset_with(path: &Path, task: TaskFamily, opts: &LoadOptions) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let mut opts = opts.clone();
    if let Some(c) = &opts.centers {
        if c.is_relative() && !c.exists() {
            opts.centers = path.parent().map(|p| p.join(c));
        }
    }
    parse_dataset(&text, task, &opts)
}

pub fn parse_dataset(text: &str, task: TaskFamily, opts: &LoadOptions) -> Result<Dataset> {
    match task {
        TaskFamily::Classification => parse_classification(text, opts),
        TaskFamily::Regression => parse_regression(text, opts),
        TaskFamily::Clustering => parse_clustering(text, opts),
        TaskFamily::Correlation => parse_correlation(text),
        TaskFamily::StatTest => parse_groups(text, opts),
        TaskFamily::Segmentation2d | TaskFamily::Segmentation3d => {
            let (h, blocks) = parse_grid(text, task.grid_dims().unwrap())?;
            let mask = |b: &GridBlock| -> Result<Mask<f64>> {
                let data = b
                    .values
                    .iter()
                    .map(|&(line, v)| match v {
                        0.0 => Ok(false),
                        1.0 => Ok(true),
                        _ => Err(HarnessError::parse(line, "mask", format!("expected 0 or 1, got {v}"))),
                    })
                    .collect::<Result<Vec<bool>>>()?;
                Ok(Mask::new(&b.shape, data)?.with_spacing(&h.spacing_for(b.shape.len()))?)
            };
            let (r, p) = two_blocks(&blocks)?;
            Ok(Dataset::Segmentation {
                reference: mask(r)?,
                prediction: mask(p)?,
            })
        }
        TaskFamily::Image2d | TaskFamily::Image3d => {
            let (h, blocks) = parse_grid(text, task.grid_dims().unwrap())?;
            let (r, t) = two_blocks(&blocks)?;
            if r.shape != t.shape {
                return Err(HarnessError::Config(format!("raster shapes differ: {:?} vs {:?}", r.shape, t.shape)));
            }
            let range = match h.data_range {
                Some(l) => DataRange::DeclaredMax(l),
                None => DataRange::ObservedRefRange,
            };
            let vals = |b: &GridBlock| b.values.iter().map(|&(_, v)| v).collect::<Vec<_>>();
            Ok(Dataset::Image(ImageData {
                pair: RasterPair::new(vals(r), vals(t), &r.shape, range)?,
                declared_range: h.data_range,
            }))
        }
    }
}

struct Table {
    header: Vec<String>,
    /// (line number, fields)
    rows: Vec<(usize, Vec<String>)>,
}

impl Table {
    fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| HarnessError::parse(1, name, format!("missing column; header is {:?}", self.header)))
    }

    fn numbers(&self, col: usize) -> Result<Vec<f64>> {
        self.rows
            .iter()
            .map(|(line, r)| parse_f64(&r[col], *line, &self.header[col]))
            .collect()
    }

    fn labels(&self, col: usize) -> Result<Vec<u32>> {
        self.rows
            .iter()
            .map(|(line, r)| {
                r[col]
                    .trim()
                    .parse::<u32>()
                    .map_err(|e| HarnessError::parse(*line, &self.header[col], format!("`{}`: {e}", r[col])))
            })
            .collect()
    }
}

fn parse_f64(s: &str, line: usize, field: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|e| HarnessError::parse(line, field, format!("`{s}`: {e}")))?;
    if !v.is_finite() {
        return Err(HarnessError::parse(line, field, "non-finite value"));
    }
    Ok(v)
}

fn read_table(text: &str) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    if rows.is_empty() {
        return Err(HarnessError::parse(2, "", "no data rows"));
    }
    Ok(Table { header, rows })
}

fn parse_classification(text: &str, opts: &LoadOptions) -> Result<Dataset> {
    let t = read_table(text)?;
    let yt = t.labels(t.column(opts.truth_col.as_deref().unwrap_or("y_true"))?)?;
    let yp = t.labels(t.column(opts.pred_col.as_deref().unwrap_or("y_pred"))?)?;
    let scores = match t.header.iter().position(|h| h == "score") {
        Some(c) => Some(t.numbers(c)?),
        None => None,
    };
    Ok(Dataset::Classification(ClassificationData::new(yt, yp, scores)?))
}

fn parse_regression(text: &str, opts: &LoadOptions) -> Result<Dataset> {
    let t = read_table(text)?;
    let y = t.numbers(t.column(opts.truth_col.as_deref().unwrap_or("y_true"))?)?;
    let p = t.numbers(t.column(opts.pred_col.as_deref().unwrap_or("y_pred"))?)?;
    Ok(Dataset::Regression(PairedSeries::new(y, p)?))
}

/// Label column plus every other column as a feature, row by row.
fn labelled_rows(t: &Table, label: &str) -> Result<(Vec<u32>, Vec<Vec<f64>>)> {
    let lc = t.column(label)?;
    let labels = t.labels(lc)?;
    let feats: Vec<usize> = (0..t.header.len()).filter(|&c| c != lc).collect();
    let cols = feats.iter().map(|&c| t.numbers(c)).collect::<Result<Vec<_>>>()?;
    let x = (0..t.rows.len()).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    Ok((labels, x))
}

fn parse_clustering(text: &str, opts: &LoadOptions) -> Result<Dataset> {
    let label = opts.truth_col.as_deref().unwrap_or("label");
    let (labels, x) = labelled_rows(&read_table(text)?, label)?;
    let centers = match &opts.centers {
        Some(p) => {
            let ct = fs::read_to_string(p).map_err(|e| HarnessError::io(p, e))?;
            let (mut cl, cx) = labelled_rows(&read_table(&ct)?, label)?;
            let mut order: Vec<usize> = (0..cl.len()).collect();
            order.sort_by_key(|&i| cl[i]);
            let sorted: Vec<Vec<f64>> = order.iter().map(|&i| cx[i].clone()).collect();
            cl.sort_unstable();
            let mut seen: Vec<u32> = labels.clone();
            seen.sort_unstable();
            seen.dedup();
            if cl != seen {
                return Err(HarnessError::Config(format!("center labels {cl:?} do not match cluster labels {seen:?}")));
            }
            Some(sorted)
        }
        None => None,
    };
    Ok(Dataset::Clustering(ClusteredData::new(x, &labels, centers)?))
}

fn parse_correlation(text: &str) -> Result<Dataset> {
    let t = read_table(text)?;
    let (xc, yc) = match (t.column("x"), t.column("y")) {
        (Ok(x), Ok(y)) => (x, y),
        _ if t.header.len() >= 2 => (0, 1),
        _ => return Err(HarnessError::parse(1, "x", "need at least two columns")),
    };
    let v = VariablePair::new(t.numbers(xc)?, t.numbers(yc)?)?;
    let zc: Vec<usize> = (0..t.header.len()).filter(|&c| c != xc && c != yc).collect();
    if zc.is_empty() {
        return Ok(Dataset::Correlation(v));
    }
    let cols = zc.iter().map(|&c| t.numbers(c)).collect::<Result<Vec<_>>>()?;
    let z = (0..t.rows.len()).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    Ok(Dataset::Correlation(v.with_covariates(z)?))
}

fn parse_groups(text: &str, opts: &LoadOptions) -> Result<Dataset> {
    let t = read_table(text)?;
    let gc = t.column("group")?;
    let vc = t.column(opts.truth_col.as_deref().unwrap_or("value"))?;
    let values = t.numbers(vc)?;
    let mut names: Vec<&str> = Vec::new();
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for ((_, row), v) in t.rows.iter().zip(values) {
        let g = row[gc].as_str();
        match names.iter().position(|&n| n == g) {
            Some(i) => groups[i].push(v),
            None => {
                names.push(g);
                groups.push(vec![v]);
            }
        }
    }
    Ok(Dataset::StatTest(groups))
}

#[derive(Debug, Default)]
struct GridHeader {
    dims: usize,
    shape: Option<Vec<usize>>,
    spacing: Option<Vec<f64>>,
    data_range: Option<f64>,
}

impl GridHeader {
    fn spacing_for(&self, n: usize) -> Vec<f64> {
        self.spacing.clone().unwrap_or_else(|| vec![1.0; n])
    }
}

struct GridBlock {
    shape: Vec<usize>,
    /// (line number, value)
    values: Vec<(usize, f64)>,
}

fn parse_list<T: std::str::FromStr>(v: &str, key: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    v.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|e| HarnessError::parse(1, key, format!("`{s}`: {e}"))))
        .collect()
}

fn parse_header(line: &str) -> Result<GridHeader> {
    let mut h = GridHeader::default();
    for tok in line.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| HarnessError::parse(1, tok, "expected key=value"))?;
        match k {
            "dims" => h.dims = v.parse().map_err(|e| HarnessError::parse(1, k, format!("{e}")))?,
            "shape" => h.shape = Some(parse_list(v, k)?),
            "spacing" => h.spacing = Some(parse_list(v, k)?),
            "data_range" => {
                let l: f64 = v.parse().map_err(|e| HarnessError::parse(1, k, format!("{e}")))?;
                if !(l > 0.0) || !l.is_finite() {
                    return Err(HarnessError::parse(1, k, "data_range must be positive"));
                }
                h.data_range = Some(l);
            }
            _ => return Err(HarnessError::parse(1, k, "unknown header key")),
        }
    }
    if h.dims != 2 && h.dims != 3 {
        return Err(HarnessError::parse(1, "dims", format!("expected 2 or 3, got {}", h.dims)));
    }
    for (key, len) in [("shape", h.shape.as_ref().map(Vec::len)), ("spacing", h.spacing.as_ref().map(Vec::len))] {
        if let Some(n) = len {
            if n != h.dims {
                return Err(HarnessError::parse(1, key, format!("expected {} entries, got {n}", h.dims)));
            }
        }
    }
    Ok(h)
}

fn parse_grid(text: &str, want_dims: usize) -> Result<(GridHeader, Vec<GridBlock>)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, first) = lines.next().ok_or_else(|| HarnessError::parse(1, "header", "empty file"))?;
    let h = parse_header(first)?;
    if h.dims != want_dims {
        return Err(HarnessError::parse(1, "dims", format!("task expects dims={want_dims}, file has {}", h.dims)));
    }
    // rows and blank-line-separated slices, per block
    let mut raw: Vec<Vec<Vec<Row>>> = vec![vec![vec![]]];
    for (n, l) in lines {
        let l = l.trim();
        if l == "---" {
            raw.push(vec![vec![]]);
            continue;
        }
        let block = raw.last_mut().unwrap();
        if l.is_empty() {
            if !block.last().unwrap().is_empty() {
                block.push(vec![]);
            }
            continue;
        }
        let row = l
            .split_whitespace()
            .map(|tok| parse_f64(tok, n, "value").map(|v| (n, v)))
            .collect::<Result<Vec<_>>>()?;
        block.last_mut().unwrap().push(row);
    }
    let blocks = raw
        .into_iter()
        .map(|mut slices| {
            slices.retain(|s| !s.is_empty());
            let values: Vec<(usize, f64)> = slices.iter().flatten().flatten().copied().collect();
            let shape = match &h.shape {
                Some(s) => s.clone(),
                None => infer_shape(&slices, h.dims)?,
            };
            let expect: usize = shape.iter().product();
            if values.len() != expect {
                let line = values.last().map_or(1, |v| v.0);
                return Err(HarnessError::parse(line, "values", format!("expected {expect} values for shape {shape:?}, got {}", values.len())));
            }
            Ok(GridBlock { shape, values })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((h, blocks))
}

fn infer_shape(slices: &[Vec<Vec<(usize, f64)>>], dims: usize) -> Result<Vec<usize>> {
    let first = slices.first().ok_or_else(|| HarnessError::parse(2, "values", "empty block"))?;
    let rows = first.len();
    let cols = first[0].len();
    for s in slices {
        for r in s {
            if r.len() != cols {
                return Err(HarnessError::parse(r[0].0, "values", format!("ragged row: {} values, expected {cols}", r.len())));
            }
        }
        if s.len() != rows {
            return Err(HarnessError::parse(s[0][0].0, "values", "slices differ in row count"));
        }
    }
    match dims {
        2 if slices.len() == 1 => Ok(vec![rows, cols]),
        2 => Err(HarnessError::parse(slices[1][0][0].0, "values", "blank line inside a 2D block")),
        _ => Ok(vec![slices.len(), rows, cols]),
    }
}

fn two_blocks(blocks: &[GridBlock]) -> Result<(&GridBlock, &GridBlock)> {
    match blocks {
        [a, b] => Ok((a, b)),
        _ => Err(HarnessError::Config(format!(
            "grid input needs a reference block and a prediction block separated by `---`, found {}",
            blocks.len()
        ))),
    }
}

/// Serialises a mask pair in the grid format read by [`parse_dataset`].
pub fn write_mask_pair(reference: &Mask<f64>, prediction: &Mask<f64>) -> String {
    let shape = reference.shape();
    let fmt = |v: &[bool]| v.iter().map(|&b| if b { "1".to_string() } else { "0".to_string() }).collect::<Vec<_>>();
    let body = |m: &Mask<f64>| grid_rows(&fmt(m.data()), &shape);
    format!(
        "{}\n{}---\n{}",
        header_line(&shape, reference.spacing(), None),
        body(reference),
        body(prediction)
    )
}

/// Serialises a raster pair in the grid format.
pub fn write_raster_pair(reference: &[f64], test: &[f64], shape: &[usize], spacing: &[f64], data_range: Option<f64>) -> String {
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>();
    format!(
        "{}\n{}---\n{}",
        header_line(shape, spacing, data_range),
        grid_rows(&fmt(reference), shape),
        grid_rows(&fmt(test), shape)
    )
}

fn header_line(shape: &[usize], spacing: &[f64], data_range: Option<f64>) -> String {
    let join = |v: Vec<String>| v.join(",");
    let mut s = format!(
        "dims={} shape={} spacing={}",
        shape.len(),
        join(shape.iter().map(|x| x.to_string()).collect()),
        join(spacing.iter().map(|x| format!("{x:?}")).collect())
    );
    if let Some(l) = data_range {
        s.push_str(&format!(" data_range={l}"));
    }
    s
}

fn grid_rows(tokens: &[String], shape: &[usize]) -> String {
    let cols = *shape.last().unwrap();
    let rows_per_slice = shape[shape.len() - 2];
    let mut out = String::new();
    for (i, row) in tokens.chunks(cols).enumerate() {
        if i > 0 && i % rows_per_slice == 0 {
            out.push('\n');
        }
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
