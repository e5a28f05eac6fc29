//! TSPLIB95 reader.
//!
//! Supports `EUC_2D`, `GEO`, `ATT` and `EXPLICIT` weights (the latter in
//! `FULL_MATRIX`, `UPPER_ROW`, `LOWER_ROW`, `UPPER_DIAG_ROW` and
//! `LOWER_DIAG_ROW` layouts). Anything else is rejected.
//!
//! Coordinate instances can be turned into weights under two conventions:
//! [`DistanceConvention::Tsplib`] applies the distance function named by
//! `EDGE_WEIGHT_TYPE`, while [`DistanceConvention::Planar`] applies the
//! rounded Euclidean metric to the raw coordinates of every coordinate
//! type. The published max-cut tables for these instances were produced
//! with the planar reading, so it is the default.

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::WeightedGraph;
use crate::linalg::SymMatrix;

const EARTH_RADIUS: f64 = 6378.388;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeWeightType {
    Euc2d,
    Geo,
    Att,
    Explicit,
}

impl FromStr for EdgeWeightType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "EUC_2D" => Ok(Self::Euc2d),
            "GEO" => Ok(Self::Geo),
            "ATT" => Ok(Self::Att),
            "EXPLICIT" => Ok(Self::Explicit),
            other => Err(Error::UnsupportedFormat(format!("EDGE_WEIGHT_TYPE {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeWeightFormat {
    FullMatrix,
    UpperRow,
    LowerRow,
    UpperDiagRow,
    LowerDiagRow,
}

impl EdgeWeightFormat {
    fn entry_count(self, n: usize) -> usize {
        match self {
            Self::FullMatrix => n * n,
            Self::UpperRow | Self::LowerRow => n * (n - 1) / 2,
            Self::UpperDiagRow | Self::LowerDiagRow => n * (n + 1) / 2,
        }
    }

    /// `(i, j)` cells in file order.
    fn cells(self, n: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.entry_count(n));
        for i in 0..n {
            let cols = match self {
                Self::FullMatrix => 0..n,
                Self::UpperRow => i + 1..n,
                Self::LowerRow => 0..i,
                Self::UpperDiagRow => i..n,
                Self::LowerDiagRow => 0..i + 1,
            };
            out.extend(cols.map(|j| (i, j)));
        }
        out
    }
}

impl FromStr for EdgeWeightFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "FULL_MATRIX" => Ok(Self::FullMatrix),
            "UPPER_ROW" => Ok(Self::UpperRow),
            "LOWER_ROW" => Ok(Self::LowerRow),
            "UPPER_DIAG_ROW" => Ok(Self::UpperDiagRow),
            "LOWER_DIAG_ROW" => Ok(Self::LowerDiagRow),
            other => Err(Error::UnsupportedFormat(format!("EDGE_WEIGHT_FORMAT {other}"))),
        }
    }
}

/// How coordinate sections become edge weights.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceConvention {
    /// Rounded Euclidean distance on the raw coordinates, whatever the
    /// declared coordinate type.
    #[default]
    Planar,
    /// The distance function the file declares (`EUC_2D`, `GEO`, `ATT`).
    Tsplib,
}

impl FromStr for DistanceConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "planar" => Ok(Self::Planar),
            "tsplib" => Ok(Self::Tsplib),
            other => Err(Error::input(format!("unknown distance convention '{other}'"))),
        }
    }
}

impl fmt::Display for DistanceConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Planar => "planar",
            Self::Tsplib => "tsplib",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TsplibHeader {
    pub name: String,
    pub dimension: usize,
    pub edge_weight_type: EdgeWeightType,
    /// Present exactly for `EXPLICIT` instances.
    pub edge_weight_format: Option<EdgeWeightFormat>,
}

/// A parsed file before weights are materialized.
#[derive(Debug, Clone)]
pub struct TsplibInstance {
    pub header: TsplibHeader,
    pub coords: Vec<[f64; 2]>,
    explicit: Vec<f64>,
}

/// TSPLIB `nint`: round half away from zero.
#[inline]
pub fn nint(x: f64) -> f64 {
    x.round()
}

pub fn dist_euc2d(a: [f64; 2], b: [f64; 2]) -> i64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    nint((dx * dx + dy * dy).sqrt()) as i64
}

fn geo_radians(x: f64) -> f64 {
    let deg = nint(x);
    let min = x - deg;
    std::f64::consts::PI * (deg + 5.0 * min / 3.0) / 180.0
}

/// Great-circle distance on the TSPLIB idealized sphere; coordinates are
/// `DDD.MM` latitude/longitude pairs.
pub fn dist_geo(a: [f64; 2], b: [f64; 2]) -> i64 {
    let (lat_a, lon_a) = (geo_radians(a[0]), geo_radians(a[1]));
    let (lat_b, lon_b) = (geo_radians(b[0]), geo_radians(b[1]));
    let q1 = (lon_a - lon_b).cos();
    let q2 = (lat_a - lat_b).cos();
    let q3 = (lat_a + lat_b).cos();
    // acos argument can overshoot 1 by an ulp for identical points
    let arg = (0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)).clamp(-1.0, 1.0);
    (EARTH_RADIUS * arg.acos() + 1.0) as i64
}

/// Pseudo-Euclidean distance used by the `att` instances.
pub fn dist_att(a: [f64; 2], b: [f64; 2]) -> i64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let r = ((dx * dx + dy * dy) / 10.0).sqrt();
    let t = nint(r);
    if t < r {
        t as i64 + 1
    } else {
        t as i64
    }
}

#[derive(Clone, Copy)]
enum Section {
    Header,
    Coords { remaining: usize },
    Weights { needed: usize },
    Display,
}

fn parse_num(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse {
            line,
            msg: format!("expected a number, found '{tok}'"),
        })
}

impl TsplibInstance {
    pub fn parse(source: &str) -> Result<Self> {
        let mut name = String::new();
        let mut dimension: Option<usize> = None;
        let mut wtype: Option<EdgeWeightType> = None;
        let mut wformat: Option<EdgeWeightFormat> = None;
        let mut coords: Vec<Option<[f64; 2]>> = Vec::new();
        let mut explicit = Vec::new();
        let mut section = Section::Header;

        let need_dim = |dimension: Option<usize>, line: usize| {
            dimension.ok_or(Error::Parse {
                line,
                msg: "section appears before DIMENSION".into(),
            })
        };

        for (idx, raw) in source.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            match section {
                Section::Coords { remaining } => {
                    let toks: Vec<&str> = line.split_whitespace().collect();
                    if toks.len() != 3 {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("coordinate record needs 3 fields, found {}", toks.len()),
                        });
                    }
                    let id = toks[0].parse::<usize>().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("bad node id '{}'", toks[0]),
                    })?;
                    if id == 0 || id > coords.len() || coords[id - 1].is_some() {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("node id {id} out of range or repeated"),
                        });
                    }
                    coords[id - 1] = Some([parse_num(toks[1], line_no)?, parse_num(toks[2], line_no)?]);
                    section = if remaining == 1 {
                        Section::Header
                    } else {
                        Section::Coords {
                            remaining: remaining - 1,
                        }
                    };
                    continue;
                }
                Section::Weights { needed } => {
                    for tok in line.split_whitespace() {
                        if explicit.len() == needed {
                            return Err(Error::Parse {
                                line: line_no,
                                msg: "more weights than the format allows".into(),
                            });
                        }
                        explicit.push(parse_num(tok, line_no)?);
                    }
                    if explicit.len() == needed {
                        section = Section::Header;
                    }
                    continue;
                }
                Section::Display => {
                    let first = line.split_whitespace().next().unwrap_or("");
                    if first.parse::<f64>().is_ok() {
                        continue;
                    }
                    section = Section::Header;
                }
                Section::Header => {}
            }

            // keyword line
            if line == "EOF" {
                break;
            }
            match line {
                "NODE_COORD_SECTION" => {
                    let n = need_dim(dimension, line_no)?;
                    coords = vec![None; n];
                    section = Section::Coords { remaining: n };
                    continue;
                }
                "EDGE_WEIGHT_SECTION" => {
                    let n = need_dim(dimension, line_no)?;
                    let fmt = wformat.ok_or(Error::Parse {
                        line: line_no,
                        msg: "EDGE_WEIGHT_SECTION without EDGE_WEIGHT_FORMAT".into(),
                    })?;
                    section = Section::Weights {
                        needed: fmt.entry_count(n),
                    };
                    continue;
                }
                "DISPLAY_DATA_SECTION" => {
                    section = Section::Display;
                    continue;
                }
                _ => {}
            }
            let (key, value) = line.split_once(':').ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("expected 'KEY : VALUE', found '{line}'"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "NAME" => name = value.to_string(),
                "DIMENSION" => {
                    let d = value.parse::<usize>().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("bad DIMENSION '{value}'"),
                    })?;
                    if d < 2 {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: "DIMENSION must be at least 2".into(),
                        });
                    }
                    dimension = Some(d);
                }
                "EDGE_WEIGHT_TYPE" => wtype = Some(value.parse()?),
                // FUNCTION just says the weights come from the coordinates
                "EDGE_WEIGHT_FORMAT" if value == "FUNCTION" => {}
                "EDGE_WEIGHT_FORMAT" => wformat = Some(value.parse()?),
                _ => {}
            }
        }

        match section {
            Section::Coords { .. } | Section::Weights { .. } => {
                return Err(Error::Parse {
                    line: source.lines().count(),
                    msg: "file ended inside a data section".into(),
                })
            }
            _ => {}
        }

        let last = source.lines().count();
        let dimension = dimension.ok_or(Error::Parse {
            line: last,
            msg: "missing DIMENSION".into(),
        })?;
        let wtype = wtype.ok_or(Error::Parse {
            line: last,
            msg: "missing EDGE_WEIGHT_TYPE".into(),
        })?;
        match wtype {
            EdgeWeightType::Explicit => {
                if wformat.is_none() || explicit.is_empty() {
                    return Err(Error::Parse {
                        line: last,
                        msg: "EXPLICIT instance without weight section".into(),
                    });
                }
            }
            _ => {
                if wformat.is_some() {
                    return Err(Error::UnsupportedFormat(
                        "EDGE_WEIGHT_FORMAT on a coordinate instance".into(),
                    ));
                }
                if coords.is_empty() {
                    return Err(Error::Parse {
                        line: last,
                        msg: "coordinate instance without NODE_COORD_SECTION".into(),
                    });
                }
            }
        }

        Ok(Self {
            header: TsplibHeader {
                name,
                dimension,
                edge_weight_type: wtype,
                edge_weight_format: wformat,
            },
            coords: coords.into_iter().flatten().collect(),
            explicit,
        })
    }

    pub fn to_graph(&self, convention: DistanceConvention) -> Result<WeightedGraph> {
        let n = self.header.dimension;
        let mut w = SymMatrix::zeros(n);
        match self.header.edge_weight_type {
            EdgeWeightType::Explicit => {
                let fmt = self.header.edge_weight_format.expect("checked at parse time");
                let mut full = vec![f64::NAN; n * n];
                for (&(i, j), &v) in fmt.cells(n).iter().zip(&self.explicit) {
                    if i == j {
                        continue;
                    }
                    let prev = full[j * n + i];
                    if !prev.is_nan() && prev != v {
                        return Err(Error::UnsupportedFormat(format!(
                            "asymmetric weights at ({}, {})",
                            i + 1,
                            j + 1
                        )));
                    }
                    full[i * n + j] = v;
                    full[j * n + i] = v;
                }
                for i in 0..n {
                    for j in i + 1..n {
                        w.set_sym(i, j, full[i * n + j]);
                    }
                }
            }
            kind => {
                let dist: fn([f64; 2], [f64; 2]) -> i64 = match (convention, kind) {
                    (DistanceConvention::Planar, _) | (_, EdgeWeightType::Euc2d) => dist_euc2d,
                    (_, EdgeWeightType::Geo) => dist_geo,
                    (_, EdgeWeightType::Att) => dist_att,
                    (_, EdgeWeightType::Explicit) => unreachable!(),
                };
                for i in 0..n {
                    for j in i + 1..n {
                        w.set_sym(i, j, dist(self.coords[i], self.coords[j]) as f64);
                    }
                }
            }
        }
        WeightedGraph::new(self.header.name.clone(), w)
    }
}

/// Parses TSPLIB text under the default (planar) convention.
pub fn parse_tsplib(source: &str) -> Result<WeightedGraph> {
    parse_tsplib_with(source, DistanceConvention::default())
}

pub fn parse_tsplib_with(source: &str, convention: DistanceConvention) -> Result<WeightedGraph> {
    TsplibInstance::parse(source)?.to_graph(convention)
}

pub fn parse_tsplib_reader<R: Read>(mut reader: R, convention: DistanceConvention) -> Result<WeightedGraph> {
    let mut s = String::new();
    reader.read_to_string(&mut s)?;
    parse_tsplib_with(&s, convention)
}

pub fn read_tsplib_file(path: impl AsRef<Path>, convention: DistanceConvention) -> Result<WeightedGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let mut g = parse_tsplib_with(&text, convention)?;
    if g.name().is_empty() {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
        g = WeightedGraph::new(stem, g.weights().clone())?;
    }
    Ok(g)
}

/// Writes `graph` as an `EXPLICIT`/`FULL_MATRIX` instance.
pub fn write_full_matrix(graph: &WeightedGraph) -> String {
    let n = graph.num_vertices();
    let mut out = format!(
        "NAME : {}\nTYPE : TSP\nDIMENSION : {n}\nEDGE_WEIGHT_TYPE : EXPLICIT\nEDGE_WEIGHT_FORMAT : FULL_MATRIX\nEDGE_WEIGHT_SECTION\n",
        graph.name()
    );
    for i in 0..n {
        let row: Vec<String> = graph.weights().row(i).iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out.push_str("EOF\n");
    out
}

/// Reads a `TOUR_SECTION` file into zero-based node indices.
pub fn parse_tour(source: &str) -> Result<Vec<usize>> {
    let mut in_tour = false;
    let mut tour = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if !in_tour {
            in_tour = line == "TOUR_SECTION";
            continue;
        }
        for tok in line.split_whitespace() {
            let v: i64 = tok.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("bad tour entry '{tok}'"),
            })?;
            if v == -1 {
                return Ok(tour);
            }
            if v < 1 {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("tour entry {v} is not a node id"),
                });
            }
            tour.push(v as usize - 1);
        }
    }
    Ok(tour)
}
