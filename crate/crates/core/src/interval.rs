//! Closed intervals, axis-aligned boxes, and uniform grid partitions.
//!
//! Every set in this library is a product of closed real intervals.
//! Partitioning is the only operation that creates new geometry; everything
//! downstream consumes cells and their hulls.

use crate::{Error, Result};

/// A closed interval `[lo, hi]` with finite endpoints.
///
/// `lo == hi` is legal and denotes a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid(format!(
                "interval endpoints must be finite, got [{lo}, {hi}]"
            )));
        }
        if lo > hi {
            return Err(Error::invalid(format!(
                "interval lower end {lo} exceeds upper end {hi}"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: f64) -> Result<Self> {
        Self::new(x, x)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Closed membership: endpoints are inside.
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// True when `other` lies within this interval.
    pub fn encloses(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Smallest interval covering both inputs.
    pub fn merge(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Pads both ends outward by `eps` (which must be finite and >= 0).
    pub fn widen(&self, eps: f64) -> Result<Interval> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::invalid(format!(
                "widen epsilon must be finite and nonnegative, got {eps}"
            )));
        }
        Interval::new(self.lo - eps, self.hi + eps)
    }

    /// Splits into `m` contiguous segments of equal width.
    ///
    /// Segment endpoints come from the closed formula `lo + j*w` with
    /// `w = (hi - lo)/m`, never from accumulation, so adjacent segments
    /// share endpoints bit-exactly; the final endpoint is assigned `hi`
    /// itself. Splitting a point interval yields `m` copies of the point.
    pub fn split(&self, m: usize) -> Result<Vec<Interval>> {
        if m == 0 {
            return Err(Error::invalid("cannot split an interval into 0 segments"));
        }
        let w = (self.hi - self.lo) / m as f64;
        let mut points = Vec::with_capacity(m + 1);
        for j in 0..=m {
            points.push(self.lo + j as f64 * w);
        }
        points[m] = self.hi;
        let segments = points
            .windows(2)
            .map(|p| {
                debug_assert!(p[0] <= p[1]);
                Interval { lo: p[0], hi: p[1] }
            })
            .collect();
        Ok(segments)
    }
}

/// An axis-aligned box: the product of one interval per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct CellBox {
    dims: Vec<Interval>,
}

impl CellBox {
    pub fn new(dims: Vec<Interval>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::invalid("a box needs at least one dimension"));
        }
        Ok(Self { dims })
    }

    /// Builds a box from `(lo, hi)` pairs, one per dimension.
    pub fn from_bounds(bounds: &[(f64, f64)]) -> Result<Self> {
        let dims = bounds
            .iter()
            .map(|&(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims)
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.dims
    }

    pub fn interval(&self, i: usize) -> Interval {
        self.dims[i]
    }

    /// Closed membership test for a point.
    pub fn contains(&self, point: &[f64]) -> Result<bool> {
        if point.len() != self.dims.len() {
            return Err(Error::invalid(format!(
                "point has {} coordinates, box has {} dimensions",
                point.len(),
                self.dims.len()
            )));
        }
        Ok(self.dims.iter().zip(point).all(|(iv, &x)| iv.contains(x)))
    }

    /// True when `other` lies inside this box, dimension-wise.
    pub fn encloses(&self, other: &CellBox) -> Result<bool> {
        if other.dim() != self.dim() {
            return Err(Error::invalid(format!(
                "cannot compare a {}-dimensional box with a {}-dimensional one",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .dims
            .iter()
            .zip(&other.dims)
            .all(|(outer, inner)| outer.encloses(inner)))
    }

    /// Pads every dimension outward by `eps`.
    pub fn widen(&self, eps: f64) -> Result<CellBox> {
        let dims = self
            .dims
            .iter()
            .map(|iv| iv.widen(eps))
            .collect::<Result<Vec<_>>>()?;
        Ok(CellBox { dims })
    }

    /// Concatenates boxes into one box whose dimension is the sum of parts.
    pub fn concat(parts: &[&CellBox]) -> Result<CellBox> {
        let mut dims = Vec::new();
        for part in parts {
            dims.extend_from_slice(&part.dims);
        }
        CellBox::new(dims)
    }
}

/// Smallest box containing every input box.
pub fn hull(boxes: &[CellBox]) -> Result<CellBox> {
    let Some(first) = boxes.first() else {
        return Err(Error::invalid("hull of an empty box list"));
    };
    let mut dims = first.dims.clone();
    for b in &boxes[1..] {
        if b.dim() != dims.len() {
            return Err(Error::invalid(format!(
                "hull inputs mix {} and {} dimensions",
                dims.len(),
                b.dim()
            )));
        }
        for (acc, iv) in dims.iter_mut().zip(&b.dims) {
            *acc = acc.merge(iv);
        }
    }
    CellBox::new(dims)
}

/// A uniform grid partition of a box.
///
/// Cells are stored in row-major order over the per-dimension counts (the
/// last dimension's index varies fastest), and `cells.len()` equals the
/// product of the counts. Cell interiors are pairwise disjoint and the
/// cells tile the source box exactly, because adjacent cells share split
/// endpoints bit-for-bit.
#[derive(Debug, Clone)]
pub struct Partition {
    cells: Vec<CellBox>,
    counts: Vec<usize>,
}

impl Partition {
    pub fn cells(&self) -> &[CellBox] {
        &self.cells
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Splits `source` into a uniform grid with `counts[i]` segments along
/// dimension `i`.
pub fn make_partition(source: &CellBox, counts: &[usize]) -> Result<Partition> {
    if counts.len() != source.dim() {
        return Err(Error::invalid(format!(
            "{} partition counts for a {}-dimensional box",
            counts.len(),
            source.dim()
        )));
    }
    if counts.iter().any(|&m| m == 0) {
        return Err(Error::invalid("partition counts must be positive"));
    }
    let total = counts
        .iter()
        .try_fold(1usize, |acc, &m| acc.checked_mul(m))
        .ok_or_else(|| Error::invalid("partition cell count overflows"))?;

    let per_dim = source
        .intervals()
        .iter()
        .zip(counts)
        .map(|(iv, &m)| iv.split(m))
        .collect::<Result<Vec<_>>>()?;

    let mut cells = Vec::with_capacity(total);
    let mut idx = vec![0usize; counts.len()];
    'grid: loop {
        cells.push(CellBox {
            dims: idx.iter().zip(&per_dim).map(|(&j, segs)| segs[j]).collect(),
        });
        // Odometer step: the last dimension rolls over first.
        let mut d = counts.len();
        loop {
            if d == 0 {
                break 'grid;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < counts[d] {
                break;
            }
            idx[d] = 0;
        }
    }
    debug_assert_eq!(cells.len(), total);
    Ok(Partition {
        cells,
        counts: counts.to_vec(),
    })
}
