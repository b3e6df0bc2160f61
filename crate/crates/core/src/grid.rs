//! Space-time resource blocks.
//!
//! The gridded area is split into `dx * dy` cells and time into slabs of
//! `dt` seconds. Block `(jx, jy, jt)` (1-based) is the half-open box
//! `[x0 + (jx-1) dx, x0 + jx dx) x [y0 + (jy-1) dy, y0 + jy dy) x [(jt-1) dt, jt dt)`.
//!
//! Occupancy sets keep one bitmap per slab, which makes intersection and
//! union word-parallel.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Pose, Rect, VehicleSpec};

const OVERLAP_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dx: f64,
    pub dy: f64,
    pub dt: f64,
    /// Lower-left corner of cell (1, 1).
    pub origin: [f64; 2],
    pub nx: u32,
    pub ny: u32,
}

impl GridSpec {
    /// Grid whose cells tile `area` exactly (the extents are rounded to the
    /// nearest whole number of cells).
    pub fn covering(area: Rect, dx: f64, dy: f64, dt: f64) -> Result<Self> {
        let nx = (area.width() / dx).round();
        let ny = (area.height() / dy).round();
        let spec = Self {
            dx,
            dy,
            dt,
            origin: area.min,
            nx: nx as u32,
            ny: ny as u32,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("dx", self.dx), ("dy", self.dy), ("dt", self.dt)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("grid {name} must be positive")));
            }
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::Config("grid must have at least one cell per axis".into()));
        }
        Ok(())
    }

    pub fn area(&self) -> Rect {
        Rect {
            min: self.origin,
            max: [
                self.origin[0] + self.nx as f64 * self.dx,
                self.origin[1] + self.ny as f64 * self.dy,
            ],
        }
    }

    /// Centre of cell `(jx, jy)`.
    pub fn cell_center(&self, jx: u32, jy: u32) -> [f64; 2] {
        [
            self.origin[0] + (jx as f64 - 0.5) * self.dx,
            self.origin[1] + (jy as f64 - 0.5) * self.dy,
        ]
    }

    /// Slab index of time `t` (1-based).
    pub fn slab_of(&self, t: f64) -> u32 {
        (t / self.dt).floor() as u32 + 1
    }

    fn key(&self) -> [u64; 7] {
        [
            self.dx.to_bits(),
            self.dy.to_bits(),
            self.dt.to_bits(),
            self.origin[0].to_bits(),
            self.origin[1].to_bits(),
            self.nx as u64,
            self.ny as u64,
        ]
    }

    fn words_per_row(&self) -> usize {
        (self.nx as usize).div_ceil(64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellIndex {
    pub jx: u32,
    pub jy: u32,
    pub jt: u32,
}

impl CellIndex {
    pub fn new(jx: u32, jy: u32, jt: u32) -> Self {
        Self { jx, jy, jt }
    }
}

/// Block containing `(x, y, t)`.
pub fn block_of(x: f64, y: f64, t: f64, spec: &GridSpec) -> Result<CellIndex> {
    let fx = ((x - spec.origin[0]) / spec.dx).floor();
    let fy = ((y - spec.origin[1]) / spec.dy).floor();
    if !(fx >= 0.0 && fx < spec.nx as f64 && fy >= 0.0 && fy < spec.ny as f64) {
        return Err(Error::OutOfArea { x, y });
    }
    if !(t >= 0.0) {
        return Err(Error::Config(format!("negative time {t}")));
    }
    Ok(CellIndex::new(fx as u32 + 1, fy as u32 + 1, spec.slab_of(t)))
}

/// Cells of one time slab, row-major bitmap (bit `ix` of row `iy`, 0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlabBitmap {
    words_per_row: usize,
    words: Vec<u64>,
}

impl SlabBitmap {
    pub fn new(spec: &GridSpec) -> Self {
        let words_per_row = spec.words_per_row();
        Self {
            words_per_row,
            words: vec![0; words_per_row * spec.ny as usize],
        }
    }

    fn slot(&self, ix: u32, iy: u32) -> (usize, u64) {
        (
            iy as usize * self.words_per_row + (ix / 64) as usize,
            1u64 << (ix % 64),
        )
    }

    /// Insert 1-based cell `(jx, jy)`.
    pub fn insert(&mut self, jx: u32, jy: u32) {
        let (w, b) = self.slot(jx - 1, jy - 1);
        self.words[w] |= b;
    }

    pub fn contains(&self, jx: u32, jy: u32) -> bool {
        let (w, b) = self.slot(jx - 1, jy - 1);
        self.words[w] & b != 0
    }

    pub fn remove(&mut self, jx: u32, jy: u32) {
        let (w, b) = self.slot(jx - 1, jy - 1);
        self.words[w] &= !b;
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersects(&self, other: &SlabBitmap) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Number of cells present in both bitmaps.
    pub fn common(&self, other: &SlabBitmap) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn union_with(&mut self, other: &SlabBitmap) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn subtract(&mut self, other: &SlabBitmap) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn is_subset_of(&self, other: &SlabBitmap) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// One ring of 8-neighbour growth, clipped to the grid.
    pub fn dilated(&self, spec: &GridSpec) -> SlabBitmap {
        let mut out = self.clone();
        for (jx, jy) in self.cells() {
            for y in jy.saturating_sub(1).max(1)..=(jy + 1).min(spec.ny) {
                for x in jx.saturating_sub(1).max(1)..=(jx + 1).min(spec.nx) {
                    out.insert(x, y);
                }
            }
        }
        out
    }

    /// 1-based `(jx, jy)` pairs in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let wpr = self.words_per_row;
        self.words.iter().enumerate().flat_map(move |(i, &w)| {
            let iy = (i / wpr) as u32;
            let base = ((i % wpr) * 64) as u32;
            BitIter(w).map(move |b| (base + b + 1, iy + 1))
        })
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// Set of space-time blocks on a fixed grid.
#[derive(Debug, Clone)]
pub struct OccupancySet {
    spec: GridSpec,
    pub owner: Option<u32>,
    first_jt: u32,
    slabs: Vec<SlabBitmap>,
}

impl PartialEq for OccupancySet {
    fn eq(&self, other: &Self) -> bool {
        self.spec.key() == other.spec.key() && self.cells().eq(other.cells())
    }
}

impl OccupancySet {
    pub fn new(spec: &GridSpec) -> Self {
        Self {
            spec: *spec,
            owner: None,
            first_jt: 1,
            slabs: Vec::new(),
        }
    }

    pub fn with_owner(mut self, owner: u32) -> Self {
        self.owner = Some(owner);
        self
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    fn ensure_slab(&mut self, jt: u32) -> &mut SlabBitmap {
        assert!(jt >= 1, "slab indices are 1-based");
        if self.slabs.is_empty() {
            self.first_jt = jt;
        }
        if jt < self.first_jt {
            let pad = (self.first_jt - jt) as usize;
            let blank = SlabBitmap::new(&self.spec);
            self.slabs.splice(0..0, std::iter::repeat_n(blank, pad));
            self.first_jt = jt;
        }
        let i = (jt - self.first_jt) as usize;
        if i >= self.slabs.len() {
            self.slabs.resize(i + 1, SlabBitmap::new(&self.spec));
        }
        &mut self.slabs[i]
    }

    pub fn insert(&mut self, c: CellIndex) {
        assert!(
            c.jx >= 1 && c.jx <= self.spec.nx && c.jy >= 1 && c.jy <= self.spec.ny,
            "cell {c:?} outside grid"
        );
        self.ensure_slab(c.jt).insert(c.jx, c.jy);
    }

    /// Union `cells` into slab `jt`.
    pub fn insert_slab(&mut self, jt: u32, cells: &SlabBitmap) {
        self.ensure_slab(jt).union_with(cells);
    }

    pub fn contains(&self, c: CellIndex) -> bool {
        self.slab(c.jt).is_some_and(|s| s.contains(c.jx, c.jy))
    }

    pub fn slab(&self, jt: u32) -> Option<&SlabBitmap> {
        if jt < self.first_jt {
            return None;
        }
        self.slabs.get((jt - self.first_jt) as usize)
    }

    pub fn slab_mut(&mut self, jt: u32) -> Option<&mut SlabBitmap> {
        if jt < self.first_jt {
            return None;
        }
        self.slabs.get_mut((jt - self.first_jt) as usize)
    }

    pub fn len(&self) -> usize {
        self.slabs.iter().map(SlabBitmap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.slabs.iter().all(SlabBitmap::is_empty)
    }

    pub fn min_jt(&self) -> Option<u32> {
        self.slabs
            .iter()
            .position(|s| !s.is_empty())
            .map(|i| self.first_jt + i as u32)
    }

    pub fn max_jt(&self) -> Option<u32> {
        self.slabs
            .iter()
            .rposition(|s| !s.is_empty())
            .map(|i| self.first_jt + i as u32)
    }

    /// Non-empty slabs with their indices.
    pub fn slabs(&self) -> impl Iterator<Item = (u32, &SlabBitmap)> + '_ {
        self.slabs
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.is_empty())
            .map(move |(i, s)| (self.first_jt + i as u32, s))
    }

    /// All cells ordered by `(jt, jy, jx)`.
    pub fn cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        self.slabs()
            .flat_map(|(jt, s)| s.cells().map(move |(jx, jy)| CellIndex::new(jx, jy, jt)))
    }

    /// Same set shifted by `k` slabs. Panics if a slab would fall below 1.
    pub fn translate(&self, k: i64) -> Self {
        let mut out = self.clone();
        if let Some(lo) = self.min_jt() {
            assert!(lo as i64 + k >= 1, "translation moves slab {lo} below 1");
            let first = self.first_jt as i64 + k;
            // drop leading blanks so first_jt stays valid
            let lead = (lo - self.first_jt) as usize;
            out.slabs.drain(..lead);
            out.first_jt = (first + lead as i64) as u32;
        } else {
            out.slabs.clear();
            out.first_jt = 1;
        }
        out
    }

    fn check_grid(&self, other: &OccupancySet) -> Result<()> {
        if self.spec.key() != other.spec.key() {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Every slab grown by `rings` rings of 8-neighbour dilation.
    pub fn dilated(&self, rings: u32) -> OccupancySet {
        let mut out = OccupancySet::new(&self.spec);
        out.owner = self.owner;
        for (jt, slab) in self.slabs() {
            let mut grown = slab.clone();
            for _ in 0..rings {
                grown = grown.dilated(&self.spec);
            }
            out.insert_slab(jt, &grown);
        }
        out
    }

    pub fn union_with(&mut self, other: &OccupancySet) -> Result<()> {
        self.check_grid(other)?;
        for (jt, s) in other.slabs() {
            self.ensure_slab(jt).union_with(s);
        }
        Ok(())
    }

    /// `true` iff no block is shared.
    pub fn disjoint(&self, other: &OccupancySet) -> Result<bool> {
        self.check_grid(other)?;
        Ok(!self.slabs().any(|(jt, s)| other.slab(jt).is_some_and(|o| o.intersects(s))))
    }

    /// `true` iff this set shifted by `k` slabs shares no block with
    /// `other`. Grids must match.
    pub fn disjoint_shifted(&self, k: u32, other: &OccupancySet) -> bool {
        debug_assert_eq!(self.spec.key(), other.spec.key());
        !self
            .slabs()
            .any(|(jt, s)| other.slab(jt + k).is_some_and(|o| o.intersects(s)))
    }

    pub fn is_subset_of(&self, other: &OccupancySet) -> Result<bool> {
        self.check_grid(other)?;
        Ok(self
            .slabs()
            .all(|(jt, s)| other.slab(jt).is_some_and(|o| s.is_subset_of(o))))
    }

    /// CSV dump with header `j_x,j_y,j_t`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["j_x", "j_y", "j_t"])?;
        for c in self.cells() {
            w.write_record([c.jx.to_string(), c.jy.to_string(), c.jt.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
            .map_err(|e| Error::csv(path, e))
    }
}

/// Free-function form of [`OccupancySet::disjoint`].
pub fn disjoint(a: &OccupancySet, b: &OccupancySet) -> Result<bool> {
    a.disjoint(b)
}

/// Oriented rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootprintBox {
    pub center: [f64; 2],
    pub heading: f64,
    pub half_length: f64,
    pub half_width: f64,
}

impl FootprintBox {
    /// Vehicle rectangle inflated by the safety redundancy.
    pub fn inflated(pose: Pose, v: &VehicleSpec) -> Self {
        Self {
            center: [pose.x, pose.y],
            heading: pose.heading,
            half_length: v.inflated_half_length(),
            half_width: v.inflated_half_width(),
        }
    }

    /// Bare vehicle rectangle.
    pub fn body(pose: Pose, v: &VehicleSpec) -> Self {
        Self {
            center: [pose.x, pose.y],
            heading: pose.heading,
            half_length: v.length / 2.0,
            half_width: v.width / 2.0,
        }
    }

    pub fn grown(mut self, margin: f64) -> Self {
        self.half_length += margin;
        self.half_width += margin;
        self
    }

    /// Corners in counter-clockwise order.
    pub fn corners(&self) -> [[f64; 2]; 4] {
        let (s, c) = self.heading.sin_cos();
        let (l, w) = (self.half_length, self.half_width);
        let at = |a: f64, b: f64| {
            [
                self.center[0] + a * c - b * s,
                self.center[1] + a * s + b * c,
            ]
        };
        [at(l, w), at(-l, w), at(-l, -w), at(l, -w)]
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let (s, c) = self.heading.sin_cos();
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        (dx * c + dy * s).abs() <= self.half_length && (-dx * s + dy * c).abs() <= self.half_width
    }
}

/// Cells of the grid whose box overlaps the rectangle with positive area.
/// A rectangle with a vanishing side degenerates to the cells containing
/// points along it.
pub fn rasterize_footprint(b: &FootprintBox, spec: &GridSpec) -> Vec<(u32, u32)> {
    let mut bm = SlabBitmap::new(spec);
    rasterize_into(b, spec, &mut bm);
    bm.cells().collect()
}

/// Rasterize into an existing slab; returns the number of newly touched
/// candidate cells (zero when the box misses the grid).
pub fn rasterize_into(b: &FootprintBox, spec: &GridSpec, out: &mut SlabBitmap) -> usize {
    if b.half_length <= OVERLAP_EPS || b.half_width <= OVERLAP_EPS {
        return rasterize_degenerate(b, spec, out);
    }
    let poly = b.corners();
    let (mut ylo, mut yhi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &poly {
        ylo = ylo.min(p[1]);
        yhi = yhi.max(p[1]);
    }
    let row_of = |y: f64| ((y - spec.origin[1]) / spec.dy).floor();
    let r0 = row_of(ylo).max(0.0);
    let r1 = row_of(yhi).min(spec.ny as f64 - 1.0);
    if r0 > r1 {
        return 0;
    }
    let mut hits = 0;
    for iy in r0 as u32..=r1 as u32 {
        let band_lo = spec.origin[1] + iy as f64 * spec.dy;
        let band_hi = band_lo + spec.dy;
        let Some((xa, xb)) = band_x_range(&poly, band_lo, band_hi) else {
            continue;
        };
        // cell ix spans [x0 + ix dx, x0 + (ix+1) dx]; require open overlap
        let c0 = ((xa - spec.origin[0]) / spec.dx).floor();
        let c1 = ((xb - spec.origin[0]) / spec.dx).ceil() - 1.0;
        let c0 = c0.max(0.0);
        let c1 = c1.min(spec.nx as f64 - 1.0);
        if c0 > c1 {
            continue;
        }
        for ix in c0 as u32..=c1 as u32 {
            let cx0 = spec.origin[0] + ix as f64 * spec.dx;
            let cx1 = cx0 + spec.dx;
            if xb.min(cx1) - xa.max(cx0) > OVERLAP_EPS {
                out.insert(ix + 1, iy + 1);
                hits += 1;
            }
        }
    }
    hits
}

/// x-extent of the part of a convex polygon strictly inside the band
/// `lo < y < hi`, if that part has positive area.
fn band_x_range(poly: &[[f64; 2]; 4], lo: f64, hi: f64) -> Option<(f64, f64)> {
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in poly {
        ymin = ymin.min(p[1]);
        ymax = ymax.max(p[1]);
    }
    if ymax.min(hi) - ymin.max(lo) <= OVERLAP_EPS {
        return None;
    }
    let (mut xa, mut xb) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut take = |x: f64| {
        xa = xa.min(x);
        xb = xb.max(x);
    };
    for i in 0..4 {
        let p = poly[i];
        let q = poly[(i + 1) % 4];
        if p[1] >= lo && p[1] <= hi {
            take(p[0]);
        }
        for y in [lo, hi] {
            if (p[1] - y) * (q[1] - y) < 0.0 {
                let t = (y - p[1]) / (q[1] - p[1]);
                take(p[0] + t * (q[0] - p[0]));
            }
        }
    }
    (xb - xa > OVERLAP_EPS).then_some((xa, xb))
}

fn rasterize_degenerate(b: &FootprintBox, spec: &GridSpec, out: &mut SlabBitmap) -> usize {
    let (s, c) = b.heading.sin_cos();
    let (ax, ay, len) = if b.half_length >= b.half_width {
        (c, s, b.half_length)
    } else {
        (-s, c, b.half_width)
    };
    let step = spec.dx.min(spec.dy) / 4.0;
    let n = ((2.0 * len) / step).ceil().max(0.0) as usize;
    let mut hits = 0;
    for k in 0..=n {
        let u = if n == 0 { 0.0 } else { -len + 2.0 * len * k as f64 / n as f64 };
        let p = [b.center[0] + ax * u, b.center[1] + ay * u];
        if let Ok(cell) = block_of(p[0], p[1], 0.0, spec) {
            out.insert(cell.jx, cell.jy);
            hits += 1;
        }
    }
    hits
}

/// Anything that yields a pose at every time of a finite window.
pub trait PoseSource {
    fn duration(&self) -> f64;
    fn pose_at(&self, t: f64) -> Pose;
}

/// Sweep parameters for [`sweep_occupancy`].
#[derive(Debug, Clone, Copy)]
pub struct SweepShape {
    pub half_length: f64,
    pub half_width: f64,
    /// Upper bound on ground speed along the source, used for the sample
    /// step.
    pub v_bound: f64,
}

impl SweepShape {
    pub fn inflated(v: &VehicleSpec) -> Self {
        Self {
            half_length: v.inflated_half_length(),
            half_width: v.inflated_half_width(),
            v_bound: v.v_max,
        }
    }
}

/// Sample times of slab `m` (0-based, relative) clipped to `[0, duration]`.
fn slab_samples(m: u32, dt: f64, h: f64, duration: f64) -> Vec<f64> {
    let t0 = m as f64 * dt;
    let t1 = ((m + 1) as f64 * dt).min(duration);
    let n = ((t1 - t0) / h).ceil().max(1.0) as usize;
    (0..=n).map(|k| t0 + (t1 - t0) * k as f64 / n as f64).collect()
}

fn max_corner_shift(a: &FootprintBox, b: &FootprintBox) -> f64 {
    a.corners()
        .iter()
        .zip(b.corners().iter())
        .map(|(p, q)| (p[0] - q[0]).hypot(p[1] - q[1]))
        .fold(0.0, f64::max)
}

/// Space-time blocks swept by a rectangle moving along `src`, with time 0
/// of the source placed at slab offset `shift` (so relative slab `m` maps
/// to `jt = m + 1 + shift`).
///
/// Each slab is sampled at a step no longer than `dt / 4` nor the time
/// needed to travel half a cell; samples on slab boundaries count for both
/// neighbours. Every sampled box is grown by half the largest corner
/// displacement to its neighbouring samples so the continuous motion in
/// between stays covered.
pub fn sweep_occupancy<S: PoseSource + ?Sized>(
    src: &S,
    shape: &SweepShape,
    spec: &GridSpec,
    shift: u32,
) -> Result<OccupancySet> {
    let duration = src.duration();
    let h = (spec.dt / 4.0).min(spec.dx.min(spec.dy) / 2.0 / shape.v_bound.max(1e-9));
    let slabs = ((duration / spec.dt) - 1e-9).ceil().max(1.0) as u32;
    let mut occ = OccupancySet::new(spec);
    let mut touched: Vec<(f64, bool)> = Vec::new();
    let boxed = |t: f64| {
        let p = src.pose_at(t);
        FootprintBox {
            center: [p.x, p.y],
            heading: p.heading,
            half_length: shape.half_length,
            half_width: shape.half_width,
        }
    };
    for m in 0..slabs {
        let times = slab_samples(m, spec.dt, h, duration);
        let boxes: Vec<FootprintBox> = times.iter().map(|&t| boxed(t)).collect();
        let mut bm = SlabBitmap::new(spec);
        for (k, b) in boxes.iter().enumerate() {
            let mut grow: f64 = 0.0;
            if k > 0 {
                grow = grow.max(max_corner_shift(b, &boxes[k - 1]));
            }
            if k + 1 < boxes.len() {
                grow = grow.max(max_corner_shift(b, &boxes[k + 1]));
            }
            let hits = rasterize_into(&b.grown(grow / 2.0), spec, &mut bm);
            touched.push((times[k], hits > 0));
        }
        if !bm.is_empty() {
            occ.insert_slab(m + 1 + shift, &bm);
        }
    }
    let first = touched.iter().position(|&(_, hit)| hit);
    let last = touched.iter().rposition(|&(_, hit)| hit);
    if let (Some(a), Some(b)) = (first, last) {
        if let Some(&(t, _)) = touched[a..=b].iter().find(|(_, hit)| !hit) {
            return Err(Error::LeavesArea { t });
        }
    }
    Ok(occ)
}

/// Occupancy of a trajectory entered at `t_e` with the redundancy-inflated
/// footprint. `t_e` is rounded down to its slab.
pub fn trajectory_occupancy<S: PoseSource + ?Sized>(
    src: &S,
    vspec: &VehicleSpec,
    spec: &GridSpec,
    t_e: f64,
) -> Result<OccupancySet> {
    if !(t_e >= 0.0) {
        return Err(Error::Config(format!("entry time {t_e} must be non-negative")));
    }
    let shift = (t_e / spec.dt + 1e-9).floor() as u32;
    sweep_occupancy(src, &SweepShape::inflated(vspec), spec, shift)
}

/// A fixed pose held for `duration` seconds.
#[derive(Debug, Clone, Copy)]
pub struct Stationary {
    pub pose: Pose,
    pub duration: f64,
}

impl PoseSource for Stationary {
    fn duration(&self) -> f64 {
        self.duration
    }

    fn pose_at(&self, _t: f64) -> Pose {
        self.pose
    }
}

/// Read a `j_x,j_y,j_t` dump back into a set.
pub fn read_occupancy_csv(path: &Path, spec: &GridSpec) -> Result<OccupancySet> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let mut occ = OccupancySet::new(spec);
    for rec in r.deserialize::<(u32, u32, u32)>() {
        let (jx, jy, jt) = rec.map_err(|e| Error::csv(path, e))?;
        if jx == 0 || jx > spec.nx || jy == 0 || jy > spec.ny || jt == 0 {
            return Err(Error::Config(format!(
                "{}: cell ({jx}, {jy}, {jt}) outside grid",
                path.display()
            )));
        }
        occ.insert(CellIndex::new(jx, jy, jt));
    }
    Ok(occ)
}
