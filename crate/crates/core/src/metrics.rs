//! Cell count, area, latency and cost of a design, and ranked comparisons.

use std::collections::HashSet;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::layout::{bounding_box_area, Layout, LayoutError, Role};

/// Extra slack on the diagonal-neighbour distance used for adjacency.
const ADJACENCY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("no path connects an input to an output in `{0}`")]
    Disconnected(String),
    #[error("{0} must be positive, got {1}")]
    Domain(&'static str, f64),
    #[error("duplicate design name `{0}`")]
    DuplicateName(String),
    #[error("manifest row {row}: {message}")]
    Manifest { row: usize, message: String },
    #[error("loading `{path}`: {message}")]
    Load { path: PathBuf, message: String },
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Clock phases along the input-to-output path with the most zone changes.
///
/// Cells are adjacent when their centres are at most one diagonal pitch
/// apart. A step may stay in the same zone or advance to the next one
/// (3 wraps to 0); every advance adds a phase. Paths are simple and do not
/// pass through other inputs.
pub fn phases(layout: &Layout) -> Result<usize, MetricsError> {
    let n = layout.len();
    let reach = layout.geometry.pitch * std::f64::consts::SQRT_2 + ADJACENCY_TOLERANCE;
    let adjacent: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| {
                    j != i && layout.cells[i].center.distance(layout.cells[j].center) <= reach
                })
                .collect()
        })
        .collect();

    struct Search<'a> {
        layout: &'a Layout,
        adjacent: &'a [Vec<usize>],
        visited: Vec<bool>,
        best: Option<usize>,
    }

    impl Search<'_> {
        fn walk(&mut self, at: usize, count: usize) {
            let cell = &self.layout.cells[at];
            if cell.is_output() {
                self.best = Some(self.best.map_or(count, |b| b.max(count)));
            }
            for k in 0..self.adjacent[at].len() {
                let next = self.adjacent[at][k];
                let other = &self.layout.cells[next];
                if self.visited[next] || matches!(other.role, Role::Input(_)) {
                    continue;
                }
                let step = if other.zone == cell.zone {
                    0
                } else if other.zone == cell.zone.next() {
                    1
                } else {
                    continue;
                };
                self.visited[next] = true;
                self.walk(next, count + step);
                self.visited[next] = false;
            }
        }
    }

    let mut search = Search {
        layout,
        adjacent: &adjacent,
        visited: vec![false; n],
        best: None,
    };
    for (i, c) in layout.cells.iter().enumerate() {
        if matches!(c.role, Role::Input(_)) {
            search.visited[i] = true;
            search.walk(i, 1);
            search.visited[i] = false;
        }
    }
    search
        .best
        .ok_or_else(|| MetricsError::Disconnected(layout.name.clone()))
}

/// Latency in clocks: four phases per clock.
pub fn latency_clocks(layout: &Layout) -> Result<f64, MetricsError> {
    Ok(phases(layout)? as f64 / 4.0)
}

/// `cell_count * area * latency`.
pub fn cost(cell_count: usize, area_um2: f64, latency_clocks: f64) -> Result<f64, MetricsError> {
    if cell_count == 0 {
        return Err(MetricsError::Domain("cell count", 0.0));
    }
    if area_um2.is_nan() || area_um2 <= 0.0 {
        return Err(MetricsError::Domain("area", area_um2));
    }
    if latency_clocks.is_nan() || latency_clocks <= 0.0 {
        return Err(MetricsError::Domain("latency", latency_clocks));
    }
    Ok(cell_count as f64 * area_um2 * latency_clocks)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignMetrics {
    pub name: String,
    pub cell_count: usize,
    pub area_um2: f64,
    pub latency_clocks: f64,
    pub cost: f64,
}

impl DesignMetrics {
    pub fn new(
        name: impl Into<String>,
        cell_count: usize,
        area_um2: f64,
        latency_clocks: f64,
    ) -> Result<Self, MetricsError> {
        Ok(Self {
            name: name.into(),
            cell_count,
            area_um2,
            latency_clocks,
            cost: cost(cell_count, area_um2, latency_clocks)?,
        })
    }
}

pub fn metrics_for(layout: &Layout) -> Result<DesignMetrics, MetricsError> {
    DesignMetrics::new(
        layout.name.clone(),
        layout.len(),
        bounding_box_area(layout)?,
        latency_clocks(layout)?,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowSource {
    Literal,
    Layout(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub name: String,
    pub cell_count: Option<usize>,
    pub area_um2: Option<f64>,
    pub latency_clocks: Option<f64>,
    pub source: RowSource,
}

/// Rows to compare, each either published figures or a layout file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonManifest {
    pub rows: Vec<ManifestRow>,
}

impl ComparisonManifest {
    /// Reads `name,cell_count,area_um2,latency_clocks,source`. Numeric
    /// fields may be blank on `layout:<path>` rows.
    pub fn from_csv<R: io::Read>(input: R) -> Result<Self, MetricsError> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(input);
        let expected = ["name", "cell_count", "area_um2", "latency_clocks", "source"];
        if reader.headers()?.iter().ne(expected) {
            return Err(MetricsError::Manifest {
                row: 0,
                message: format!("header must be `{}`", expected.join(",")),
            });
        }
        let mut rows = Vec::new();
        for (k, record) in reader.records().enumerate() {
            let record = record?;
            let row = k + 1;
            let field = |i: usize| record.get(i).filter(|s| !s.is_empty());
            let bad = |what: &str, v: &str| MetricsError::Manifest {
                row,
                message: format!("bad {what} `{v}`"),
            };
            let name = field(0).ok_or_else(|| bad("name", ""))?.to_string();
            let cell_count = field(1)
                .map(|v| v.parse().map_err(|_| bad("cell_count", v)))
                .transpose()?;
            let area_um2 = field(2)
                .map(|v| v.parse().map_err(|_| bad("area_um2", v)))
                .transpose()?;
            let latency_clocks = field(3)
                .map(|v| v.parse().map_err(|_| bad("latency_clocks", v)))
                .transpose()?;
            let source = match field(4) {
                Some("literal") => RowSource::Literal,
                Some(s) if s.starts_with("layout:") => {
                    RowSource::Layout(PathBuf::from(&s["layout:".len()..]))
                }
                other => return Err(bad("source", other.unwrap_or(""))),
            };
            if source == RowSource::Literal
                && (cell_count.is_none() || area_um2.is_none() || latency_clocks.is_none())
            {
                return Err(MetricsError::Manifest {
                    row,
                    message: "literal rows need every numeric field".into(),
                });
            }
            rows.push(ManifestRow {
                name,
                cell_count,
                area_um2,
                latency_clocks,
                source,
            });
        }
        Ok(Self { rows })
    }

    /// Metrics for every row. Layout rows are loaded through `load` with
    /// paths resolved against `base` and keep the manifest's name.
    pub fn resolve<F>(&self, base: &Path, mut load: F) -> Result<Vec<DesignMetrics>, MetricsError>
    where
        F: FnMut(&Path) -> Result<Layout, String>,
    {
        self.rows
            .iter()
            .map(|r| match &r.source {
                RowSource::Literal => DesignMetrics::new(
                    r.name.clone(),
                    r.cell_count.unwrap_or(0),
                    r.area_um2.unwrap_or(0.0),
                    r.latency_clocks.unwrap_or(0.0),
                ),
                RowSource::Layout(p) => {
                    let path = base.join(p);
                    let layout =
                        load(&path).map_err(|message| MetricsError::Load { path, message })?;
                    let mut m = metrics_for(&layout)?;
                    m.name = r.name.clone();
                    Ok(m)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedRow {
    pub rank: usize,
    pub metrics: DesignMetrics,
    pub min_cost: bool,
    pub min_cells: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellImprovement {
    pub design: String,
    pub baseline: String,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<RankedRow>,
    /// Fewest-cell design against the cheapest of the remaining designs.
    pub improvement: Option<CellImprovement>,
}

/// Ranks designs by ascending cost; equal costs keep their input order.
pub fn compare(designs: &[DesignMetrics]) -> Result<ComparisonReport, MetricsError> {
    let mut seen = HashSet::new();
    for d in designs {
        if !seen.insert(d.name.as_str()) {
            return Err(MetricsError::DuplicateName(d.name.clone()));
        }
        cost(d.cell_count, d.area_um2, d.latency_clocks)?;
    }
    let mut sorted: Vec<DesignMetrics> = designs.to_vec();
    sorted.sort_by(|a, b| a.cost.total_cmp(&b.cost));
    let min_cost = sorted.first().map(|d| d.cost);
    let min_cells = sorted.iter().map(|d| d.cell_count).min();
    let rows: Vec<RankedRow> = sorted
        .into_iter()
        .enumerate()
        .map(|(i, m)| RankedRow {
            rank: i + 1,
            min_cost: Some(m.cost) == min_cost,
            min_cells: Some(m.cell_count) == min_cells,
            metrics: m,
        })
        .collect();

    let improvement = rows.iter().find(|r| r.min_cells).and_then(|best| {
        rows.iter()
            .find(|r| r.metrics.name != best.metrics.name)
            .map(|base| CellImprovement {
                design: best.metrics.name.clone(),
                baseline: base.metrics.name.clone(),
                percent: 100.0 * (base.metrics.cell_count as f64 - best.metrics.cell_count as f64)
                    / base.metrics.cell_count as f64,
            })
    });
    Ok(ComparisonReport { rows, improvement })
}

/// Formats to four significant digits without trailing zeros.
pub fn sig4(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return v.to_string();
    }
    let decimals = (3 - v.abs().log10().floor() as i32).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

impl ComparisonReport {
    /// `rank,name,cell_count,area_um2,latency_clocks,cost,min_cost,min_cells`
    /// followed by a `#` footnote with the cell-count improvement.
    pub fn write_csv<W: io::Write>(&self, mut out: W) -> Result<(), MetricsError> {
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record([
                "rank",
                "name",
                "cell_count",
                "area_um2",
                "latency_clocks",
                "cost",
                "min_cost",
                "min_cells",
            ])?;
            for r in &self.rows {
                w.write_record([
                    r.rank.to_string(),
                    r.metrics.name.clone(),
                    r.metrics.cell_count.to_string(),
                    sig4(r.metrics.area_um2),
                    sig4(r.metrics.latency_clocks),
                    sig4(r.metrics.cost),
                    r.min_cost.to_string(),
                    r.min_cells.to_string(),
                ])?;
            }
            w.flush()?;
        }
        if let Some(imp) = &self.improvement {
            writeln!(
                out,
                "# cell-count improvement of {} over {}: {:.1}%",
                imp.design, imp.baseline, imp.percent
            )?;
        }
        Ok(())
    }
}
