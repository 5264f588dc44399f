//! Dyadic intervals, rectangles and open sets made of dyadic cells.
//!
//! All containment questions are answered in integer arithmetic.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `[index·2^scale, (index + 1)·2^scale)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DyadicInterval {
    pub scale: i32,
    pub index: i64,
}

impl DyadicInterval {
    pub fn new(scale: i32, index: i64) -> Self {
        Self { scale, index }
    }

    pub fn len(&self) -> f64 {
        2f64.powi(self.scale)
    }

    pub fn start(&self) -> f64 {
        self.index as f64 * self.len()
    }

    pub fn end(&self) -> f64 {
        (self.index + 1) as f64 * self.len()
    }

    /// Index range `[lo, hi)` of the cells of scale `cell_scale` meeting the interval.
    fn cell_span(&self, cell_scale: i32) -> (i64, i64) {
        if self.scale >= cell_scale {
            let k = (self.scale - cell_scale) as u32;
            (self.index << k, (self.index + 1) << k)
        } else {
            let c = self.index >> (cell_scale - self.scale) as u32;
            (c, c + 1)
        }
    }
}

/// `R = I × J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DyadicRectangle {
    pub i: DyadicInterval,
    pub j: DyadicInterval,
}

impl DyadicRectangle {
    pub fn new(i: DyadicInterval, j: DyadicInterval) -> Self {
        Self { i, j }
    }

    pub fn area(&self) -> f64 {
        self.i.len() * self.j.len()
    }

    pub fn scales(&self) -> (i32, i32) {
        (self.i.scale, self.j.scale)
    }

    /// Lower-left corner.
    pub fn lo(&self) -> (f64, f64) {
        (self.i.start(), self.j.start())
    }

    pub fn hi(&self) -> (f64, f64) {
        (self.i.end(), self.j.end())
    }

    /// Frequency spacings `(A, B) = (2π/|I|, 2π/|J|)`.
    pub fn spacings(&self) -> (f64, f64) {
        (2.0 * std::f64::consts::PI / self.i.len(), 2.0 * std::f64::consts::PI / self.j.len())
    }
}

/// A finite union of dyadic cells `[a·2^s, (a+1)·2^s) × [b·2^s, (b+1)·2^s)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MaskFile", into = "MaskFile")]
pub struct OpenSetMask {
    cell_scale: i32,
    cells: BTreeSet<(i64, i64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct MaskFile {
    #[serde(default = "crate::fixtures::schema_version")]
    schema_version: u32,
    cell_scale: i32,
    cells: Vec<(i64, i64)>,
}

impl TryFrom<MaskFile> for OpenSetMask {
    type Error = Error;
    fn try_from(f: MaskFile) -> Result<Self> {
        Self::new(f.cell_scale, f.cells)
    }
}

impl From<OpenSetMask> for MaskFile {
    fn from(m: OpenSetMask) -> Self {
        MaskFile {
            schema_version: crate::SCHEMA_VERSION,
            cell_scale: m.cell_scale,
            cells: m.cells.into_iter().collect(),
        }
    }
}

impl OpenSetMask {
    pub fn new(cell_scale: i32, cells: impl IntoIterator<Item = (i64, i64)>) -> Result<Self> {
        let cells: BTreeSet<_> = cells.into_iter().collect();
        if cells.is_empty() {
            return Err(Error::InvalidArgument("open set mask needs at least one cell".into()));
        }
        if !(-40..=40).contains(&cell_scale) {
            return Err(Error::InvalidArgument(format!("cell scale {cell_scale} out of range")));
        }
        Ok(Self { cell_scale, cells })
    }

    /// `[0, 1)²`.
    pub fn unit_square() -> Self {
        Self::new(0, [(0, 0)]).expect("nonempty")
    }

    /// The union of the grid-aligned box `[a0, a1) × [b0, b1)` in cell units.
    pub fn block(cell_scale: i32, a: std::ops::Range<i64>, b: std::ops::Range<i64>) -> Result<Self> {
        Self::new(cell_scale, a.flat_map(|x| b.clone().map(move |y| (x, y))))
    }

    pub fn cell_scale(&self) -> i32 {
        self.cell_scale
    }

    pub fn cells(&self) -> &BTreeSet<(i64, i64)> {
        &self.cells
    }

    pub fn cell_len(&self) -> f64 {
        2f64.powi(self.cell_scale)
    }

    pub fn area(&self) -> f64 {
        self.cells.len() as f64 * self.cell_len() * self.cell_len()
    }

    /// Cell-index bounding box `([a_min, a_max], [b_min, b_max])`, inclusive.
    pub fn cell_bounds(&self) -> ((i64, i64), (i64, i64)) {
        let a_min = self.cells.iter().map(|c| c.0).min().expect("nonempty");
        let a_max = self.cells.iter().map(|c| c.0).max().expect("nonempty");
        let b_min = self.cells.iter().map(|c| c.1).min().expect("nonempty");
        let b_max = self.cells.iter().map(|c| c.1).max().expect("nonempty");
        ((a_min, a_max), (b_min, b_max))
    }

    /// Bounding box `(lo, hi)` in coordinates.
    pub fn bbox(&self) -> ((f64, f64), (f64, f64)) {
        let ((a0, a1), (b0, b1)) = self.cell_bounds();
        let s = self.cell_len();
        ((a0 as f64 * s, b0 as f64 * s), ((a1 + 1) as f64 * s, (b1 + 1) as f64 * s))
    }

    pub fn contains(&self, r: &DyadicRectangle) -> bool {
        let (a0, a1) = r.i.cell_span(self.cell_scale);
        let (b0, b1) = r.j.cell_span(self.cell_scale);
        (a0..a1).all(|a| (b0..b1).all(|b| self.cells.contains(&(a, b))))
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        let s = self.cell_scale.min(other.cell_scale);
        let mut cells = self.refined(s);
        cells.extend(other.refined(s));
        Self::new(s, cells)
    }

    fn refined(&self, s: i32) -> BTreeSet<(i64, i64)> {
        let k = (self.cell_scale - s) as u32;
        let n = 1i64 << k;
        let mut out = BTreeSet::new();
        for &(a, b) in &self.cells {
            for x in 0..n {
                for y in 0..n {
                    out.insert(((a << k) + x, (b << k) + y));
                }
            }
        }
        out
    }
}

/// Index range of the intervals of `scale` meeting the cells `[c0, c1]` (inclusive) of `cell_scale`.
fn candidate_range(scale: i32, cell_scale: i32, c0: i64, c1: i64) -> std::ops::RangeInclusive<i64> {
    if scale >= cell_scale {
        let k = (scale - cell_scale) as u32;
        (c0 >> k)..=(c1 >> k)
    } else {
        let k = (cell_scale - scale) as u32;
        (c0 << k)..=(((c1 + 1) << k) - 1)
    }
}

/// Every dyadic `R ⊂ Ω` with side scales in `[−depth, depth]`.
///
/// Ordered by `|I|` descending, then `|J|` descending, then position.
pub fn enumerate_dyadic_rectangles(omega: &OpenSetMask, depth: u32) -> Vec<DyadicRectangle> {
    let d = depth as i32;
    let ((a0, a1), (b0, b1)) = omega.cell_bounds();
    let mut out = Vec::new();
    for sa in (-d..=d).rev() {
        for sb in (-d..=d).rev() {
            for i in candidate_range(sa, omega.cell_scale, a0, a1) {
                for j in candidate_range(sb, omega.cell_scale, b0, b1) {
                    let r = DyadicRectangle::new(DyadicInterval::new(sa, i), DyadicInterval::new(sb, j));
                    if omega.contains(&r) {
                        out.push(r);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Containment decided by scanning the finest cells of `R`.
    fn brute_contains(omega: &OpenSetMask, r: &DyadicRectangle, fine: i32) -> bool {
        let to_fine = |iv: &DyadicInterval| {
            let k = (iv.scale - fine) as u32;
            (iv.index << k)..((iv.index + 1) << k)
        };
        let shift = (omega.cell_scale() - fine) as u32;
        to_fine(&r.i).all(|x| to_fine(&r.j).all(|y| omega.cells().contains(&(x >> shift, y >> shift))))
    }

    fn brute_enumerate(omega: &OpenSetMask, depth: u32) -> BTreeSet<DyadicRectangle> {
        let d = depth as i32;
        let fine = (-d).min(omega.cell_scale());
        let ((a0, a1), (b0, b1)) = omega.cell_bounds();
        let s = omega.cell_scale();
        let lo = |c: i64, sc: i32| ((c as f64) * 2f64.powi(s - sc)).floor() as i64 - 1;
        let hi = |c: i64, sc: i32| (((c + 1) as f64) * 2f64.powi(s - sc)).ceil() as i64 + 1;
        let mut out = BTreeSet::new();
        for sa in -d..=d {
            for sb in -d..=d {
                for i in lo(a0, sa)..=hi(a1, sa) {
                    for j in lo(b0, sb)..=hi(b1, sb) {
                        let r = DyadicRectangle::new(DyadicInterval::new(sa, i), DyadicInterval::new(sb, j));
                        if brute_contains(omega, &r, fine) {
                            out.insert(r);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn unit_square_depth_one() {
        let rs = enumerate_dyadic_rectangles(&OpenSetMask::unit_square(), 1);
        // per axis: the unit interval and its two halves
        assert_eq!(rs.len(), 9);
        assert_eq!(rs[0], DyadicRectangle::new(DyadicInterval::new(0, 0), DyadicInterval::new(0, 0)));
        let set: BTreeSet<_> = rs.iter().copied().collect();
        assert_eq!(set, brute_enumerate(&OpenSetMask::unit_square(), 1));
        let rs3 = enumerate_dyadic_rectangles(&OpenSetMask::unit_square(), 3);
        assert_eq!(rs3.len(), 15 * 15);
    }

    #[test]
    fn small_mask_gives_nothing() {
        let tiny = OpenSetMask::new(-4, [(3, 5)]).unwrap();
        assert!(enumerate_dyadic_rectangles(&tiny, 3).is_empty());
        assert_eq!(enumerate_dyadic_rectangles(&tiny, 4).len(), 1);
    }

    #[test]
    fn disjoint_union_concatenates() {
        let a = OpenSetMask::unit_square();
        let b = OpenSetMask::new(0, [(5, -3)]).unwrap();
        let u = a.union(&b).unwrap();
        let mut expect: BTreeSet<_> = enumerate_dyadic_rectangles(&a, 2).into_iter().collect();
        expect.extend(enumerate_dyadic_rectangles(&b, 2));
        let got: BTreeSet<_> = enumerate_dyadic_rectangles(&u, 2).into_iter().collect();
        assert_eq!(got, expect);
        assert_eq!(u.area(), 2.0);
    }

    #[test]
    fn order_is_scale_major() {
        let rs = enumerate_dyadic_rectangles(&OpenSetMask::block(-1, 0..4, 0..2).unwrap(), 2);
        let keys: Vec<_> = rs.iter().map(|r| (-r.i.scale, -r.j.scale, r.i.index, r.j.index)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(rs.iter().any(|r| r.i.scale == 1 && r.j.scale == 0));
    }

    #[test]
    fn mask_json_round_trip() {
        let m = OpenSetMask::new(-2, [(1, 2), (-3, 0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("schema_version"));
        let back: OpenSetMask = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<OpenSetMask>(r#"{"cell_scale":0,"cells":[]}"#).is_err());
    }

    proptest! {
        #[test]
        fn enumeration_matches_brute_force(
            cells in proptest::collection::btree_set((-4i64..4, -4i64..4), 1..14),
            scale in -2i32..1,
            depth in 0u32..3,
        ) {
            let omega = OpenSetMask::new(scale, cells).unwrap();
            let got: BTreeSet<_> = enumerate_dyadic_rectangles(&omega, depth).into_iter().collect();
            prop_assert_eq!(got, brute_enumerate(&omega, depth));
        }
    }
}
