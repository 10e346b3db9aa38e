//! Point sets in the unit cube and anchored boxes `[0, y]`.
//!
//! Membership is decided with exact `<=` (closed box) or `<` (open box)
//! comparisons on the stored doubles. There is no tolerance anywhere: the
//! chain certificates built on top of these counts are combinatorial
//! objects and have to re-check bit for bit.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// An ordered list of `n` points in `[0,1]^d`.
///
/// Point order is part of the value: certificates refer to points by their
/// 0-based position.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend(p);
        }
        Self::from_flat(dim, coords)
    }

    /// Builds a point set from row-major coordinates.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len() % dim,
            });
        }
        for (k, &value) in coords.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::CoordinateOutOfRange {
                    point: k / dim,
                    axis: k % dim,
                    value,
                });
            }
        }
        Ok(Self { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, index: usize) -> &[f64] {
        &self.coords[index * self.dim..(index + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// Returns a copy with one more point appended.
    pub fn with_point(&self, point: &[f64]) -> Result<Self> {
        let mut coords = self.coords.clone();
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: point.len(),
            });
        }
        coords.extend_from_slice(point);
        Self::from_flat(self.dim, coords)
    }

    fn check_dim(&self, corner: &AnchoredBox) -> Result<()> {
        if corner.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: corner.dim(),
            });
        }
        Ok(())
    }

    /// Number of points with `x_j <= y_j` on every axis.
    pub fn count_closed(&self, corner: &AnchoredBox) -> Result<usize> {
        self.check_dim(corner)?;
        Ok(self.count_closed_at(corner.coords()))
    }

    /// Number of points with `x_j < y_j` on every axis.
    pub fn count_open(&self, corner: &AnchoredBox) -> Result<usize> {
        self.check_dim(corner)?;
        Ok(self.count_open_at(corner.coords()))
    }

    /// `count_closed / n - vol`. Its absolute value is the closed-box local
    /// discrepancy.
    pub fn local_discrepancy_signed(&self, corner: &AnchoredBox) -> Result<f64> {
        self.check_dim(corner)?;
        if self.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        Ok(fraction(self.count_closed_at(corner.coords()), self.len()) - corner.volume())
    }

    pub(crate) fn count_closed_at(&self, corner: &[f64]) -> usize {
        debug_assert_eq!(corner.len(), self.dim);
        self.iter().filter(|p| in_closed_box(p, corner)).count()
    }

    pub(crate) fn count_open_at(&self, corner: &[f64]) -> usize {
        debug_assert_eq!(corner.len(), self.dim);
        self.iter().filter(|p| in_open_box(p, corner)).count()
    }

    /// Reads the comma-separated point format: one point per row, optional
    /// `#` comment lines, dimension taken from the first data row.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut dim = None;
        let mut coords = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| Error::Parse {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line());
            if record.len() == 1 && record[0].is_empty() {
                continue;
            }
            let expected = *dim.get_or_insert(record.len());
            if record.len() != expected {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {expected} coordinates, found {}", record.len()),
                });
            }
            for field in record.iter() {
                let value: f64 = field.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("invalid number {field:?}"),
                })?;
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::Parse {
                        line,
                        message: format!("coordinate {value} outside [0, 1]"),
                    });
                }
                coords.push(value);
            }
        }
        let dim = dim.ok_or(Error::Parse {
            line: 0,
            message: "no data rows; dimension cannot be inferred".into(),
        })?;
        Self::from_flat(dim, coords)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(BufReader::new(File::open(path)?))
    }

    /// Writes the CSV format. Coordinates use the shortest representation
    /// that parses back to the same double.
    pub fn write_csv<W: Write>(&self, mut out: W, comment: Option<&str>) -> Result<()> {
        if let Some(comment) = comment {
            for line in comment.lines() {
                writeln!(out, "# {line}")?;
            }
        }
        for p in self.iter() {
            let row: Vec<String> = p.iter().map(f64::to_string).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// The corner `y` of an anchored box `[0, y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchoredBox {
    corner: Vec<f64>,
}

impl AnchoredBox {
    pub fn new(corner: Vec<f64>) -> Result<Self> {
        if corner.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if let Some((axis, &value)) = corner
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::CornerOutOfRange { axis, value });
        }
        Ok(Self { corner })
    }

    pub fn unit(dim: usize) -> Self {
        Self {
            corner: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.corner
    }

    pub fn volume(&self) -> f64 {
        volume(&self.corner)
    }
}

/// `prod_j y_j`, multiplied left to right starting from 1.
pub fn volume(corner: &[f64]) -> f64 {
    corner.iter().fold(1.0, |acc, &y| acc * y)
}

#[inline]
pub fn in_closed_box(point: &[f64], corner: &[f64]) -> bool {
    point.iter().zip(corner).all(|(x, y)| x <= y)
}

#[inline]
pub fn in_open_box(point: &[f64], corner: &[f64]) -> bool {
    point.iter().zip(corner).all(|(x, y)| x < y)
}

#[inline]
pub(crate) fn fraction(count: usize, n: usize) -> f64 {
    count as f64 / n as f64
}
