// SPDX-License-Identifier: Apache-2.0
//! Glue visibility, spans, right priority, and detectors for the visibility
//! lemmas.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use crate::geometry::{turn_right_of_path, Dir, GridPoint, Heading, Turn, VRay};
use crate::tam::{Tile, TileSystem};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("glue orientation does not match the requested visibility direction")]
    OrientationMismatch,
    #[error("path is not in canonical position for this query")]
    NotCanonical,
    #[error("one candidate is a prefix of another")]
    PrefixAmbiguity,
    #[error("candidates do not share their first two positions")]
    Incomparable,
    #[error("last glue is not visible from the north")]
    LastGlueNotVisible,
    #[error("last tile is not the unique easternmost tile")]
    NotEasternmost,
    #[error("glue index {0} out of range")]
    BadIndex(usize),
}

/// The glue between `P_i` and `P_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GlueRef {
    pub index: usize,
    pub label: String,
    pub pointing: Dir,
    pub midpoint: GridPoint,
}

impl GlueRef {
    pub fn points_east_west(&self) -> bool {
        matches!(self.pointing, Dir::East | Dir::West)
    }
}

pub fn glue_ref(sys: &TileSystem, p: &[Tile], i: usize) -> Result<GlueRef, AnalysisError> {
    if i + 1 >= p.len() {
        return Err(AnalysisError::BadIndex(i));
    }
    let (a, b) = (p[i], p[i + 1]);
    let pointing = a.pos.dir_to(b.pos).ok_or(AnalysisError::BadIndex(i))?;
    let ca = a.pos.center();
    let mid = ca + pointing.unit();
    Ok(GlueRef {
        index: i,
        label: sys.tile(a.ty).glue(pointing).unwrap_or("").to_string(),
        pointing,
        midpoint: mid,
    })
}

pub fn glues(sys: &TileSystem, p: &[Tile]) -> Vec<GlueRef> {
    (0..p.len().saturating_sub(1)).filter_map(|i| glue_ref(sys, p, i).ok()).collect()
}

fn midpoint(a: GridPoint, b: GridPoint) -> GridPoint {
    GridPoint::new((a.x + b.x) / 2, (a.y + b.y) / 2)
}

/// Obstacles met by visibility rays of one path.
///
/// A ray from a glue midpoint runs along an odd column (or row), where the
/// only lattice points of `embed(P)` are other glue midpoints and the only
/// seed obstacles are midpoints between abutting seed tiles. Midpoints
/// between the seed and `P_0` are counted as seed obstacles too.
#[derive(Debug, Clone)]
pub struct Visibility {
    glues: Vec<GlueRef>,
    cols: HashMap<i64, Vec<i64>>,
    rows: HashMap<i64, Vec<i64>>,
    seed_cols: BTreeMap<i64, Vec<i64>>,
    seed_rows: BTreeMap<i64, Vec<i64>>,
}

impl Visibility {
    pub fn new(sys: &TileSystem, p: &[Tile]) -> Visibility {
        let glues = glues(sys, p);
        let mut cols: HashMap<i64, Vec<i64>> = HashMap::new();
        let mut rows: HashMap<i64, Vec<i64>> = HashMap::new();
        for g in &glues {
            if g.points_east_west() {
                cols.entry(g.midpoint.x).or_default().push(g.midpoint.y);
            } else {
                rows.entry(g.midpoint.y).or_default().push(g.midpoint.x);
            }
        }
        let mut seed_cols: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
        let mut seed_rows: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
        let seed = sys.seed();
        let mut seed_mid = |a: GridPoint, b: GridPoint| {
            let m = midpoint(a, b);
            if a.y == b.y {
                seed_cols.entry(m.x).or_default().push(m.y);
            } else {
                seed_rows.entry(m.y).or_default().push(m.x);
            }
        };
        for &s in seed.keys() {
            for d in [Dir::East, Dir::North] {
                if seed.contains_key(&s.step(d)) {
                    seed_mid(s.center(), s.step(d).center());
                }
            }
        }
        if let Some(first) = p.first() {
            for d in Dir::ALL {
                if seed.contains_key(&first.pos.step(d)) {
                    seed_mid(first.pos.center(), first.pos.step(d).center());
                }
            }
        }
        for v in cols.values_mut().chain(rows.values_mut()) {
            v.sort_unstable();
        }
        for v in seed_cols.values_mut().chain(seed_rows.values_mut()) {
            v.sort_unstable();
            v.dedup();
        }
        Visibility { glues, cols, rows, seed_cols, seed_rows }
    }

    pub fn glues(&self) -> &[GlueRef] {
        &self.glues
    }

    pub fn glue(&self, i: usize) -> &GlueRef {
        &self.glues[i]
    }

    /// Whether the doubled odd column `x` carries a seed glue.
    pub fn column_has_seed_glue(&self, x: i64) -> bool {
        self.seed_cols.contains_key(&x)
    }

    pub fn row_has_seed_glue(&self, y: i64) -> bool {
        self.seed_rows.contains_key(&y)
    }

    pub fn visible(&self, i: usize, dir: Dir) -> Result<bool, AnalysisError> {
        let g = self.glues.get(i).ok_or(AnalysisError::BadIndex(i))?;
        let vertical = matches!(dir, Dir::North | Dir::South);
        if vertical != g.points_east_west() {
            return Err(AnalysisError::OrientationMismatch);
        }
        let m = g.midpoint;
        let (line, at, path, seed) = if vertical {
            (m.x, m.y, &self.cols, &self.seed_cols)
        } else {
            (m.y, m.x, &self.rows, &self.seed_rows)
        };
        let ahead = |v: i64| match dir {
            Dir::North | Dir::East => v > at,
            Dir::South | Dir::West => v < at,
        };
        let blocked = path.get(&line).is_some_and(|v| v.iter().any(|&y| ahead(y)))
            || seed.get(&line).is_some_and(|v| v.iter().any(|&y| ahead(y)));
        Ok(!blocked)
    }

    pub fn ray(&self, i: usize, dir: Dir) -> VRay {
        let heading = match dir {
            Dir::North => Heading::North,
            Dir::South => Heading::South,
            Dir::East => Heading::East,
            Dir::West => Heading::West,
        };
        VRay::new(self.glues[i].midpoint, heading)
    }
}

/// Visibility of glue `i` of `p` from direction `dir`.
pub fn visible(sys: &TileSystem, p: &[Tile], i: usize, dir: Dir) -> Result<bool, AnalysisError> {
    Visibility::new(sys, p).visible(i, dir)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Vertical,
    Horizontal,
}

/// `Up`/`Down` for vertical spans; `Up` reads as "right" for horizontal ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Span {
    /// Index of the glue visible from the south (west for horizontal spans).
    pub s: usize,
    /// Index of the glue visible from the north (east for horizontal spans).
    pub n: usize,
    /// Glue column `x` (the line `x + 1/2`), or glue row for horizontal spans.
    pub column: i64,
    pub axis: Axis,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpanProps {
    pub orientation: Orientation,
    pub pointing: Option<Dir>,
    pub label: String,
    /// Height (width for horizontal spans) in tile units.
    pub height: i64,
}

/// Whether the last tile of `p` is strictly beyond every other tile of
/// σ ∪ asm(p) in direction `d`.
pub fn last_tile_unique_extreme(sys: &TileSystem, p: &[Tile], d: Dir) -> bool {
    let Some(last) = p.last() else {
        return false;
    };
    let key = |q: crate::tam::Pos| match d {
        Dir::East => q.x,
        Dir::West => -q.x,
        Dir::North => q.y,
        Dir::South => -q.y,
    };
    let k = key(last.pos);
    p[..p.len() - 1].iter().all(|t| key(t.pos) < k) && sys.seed().keys().all(|&s| key(s) < k)
}

pub fn spans(sys: &TileSystem, p: &[Tile], axis: Axis) -> Result<Vec<(Span, SpanProps)>, AnalysisError> {
    let extreme = match axis {
        Axis::Vertical => Dir::East,
        Axis::Horizontal => Dir::North,
    };
    if p.len() < 2 || !last_tile_unique_extreme(sys, p, extreme) {
        return Err(AnalysisError::NotCanonical);
    }
    let vis = Visibility::new(sys, p);
    Ok(spans_with(p, &vis, axis))
}

pub(crate) fn spans_with(p: &[Tile], vis: &Visibility, axis: Axis) -> Vec<(Span, SpanProps)> {
    let mut lines: BTreeMap<i64, Vec<&GlueRef>> = BTreeMap::new();
    for g in vis.glues() {
        match axis {
            Axis::Vertical if g.points_east_west() => lines.entry(g.midpoint.x).or_default().push(g),
            Axis::Horizontal if !g.points_east_west() => lines.entry(g.midpoint.y).or_default().push(g),
            _ => {}
        }
    }
    let mut out = Vec::new();
    for (line, gs) in lines {
        let seeded = match axis {
            Axis::Vertical => vis.column_has_seed_glue(line),
            Axis::Horizontal => vis.row_has_seed_glue(line),
        };
        if seeded {
            continue;
        }
        let along = |g: &GlueRef| match axis {
            Axis::Vertical => g.midpoint.y,
            Axis::Horizontal => g.midpoint.x,
        };
        let low = gs.iter().min_by_key(|g| along(g)).unwrap();
        let high = gs.iter().max_by_key(|g| along(g)).unwrap();
        let (s, n) = (low.index, high.index);
        let orientation = if s <= n { Orientation::Up } else { Orientation::Down };
        let pointing = (low.pointing == high.pointing).then_some(low.pointing);
        let first = if s <= n { low } else { high };
        let height = match axis {
            Axis::Vertical => p[n].pos.y - p[s].pos.y,
            Axis::Horizontal => p[n].pos.x - p[s].pos.x,
        };
        out.push((
            Span { s, n, column: (line - 1).div_euclid(2), axis },
            SpanProps { orientation, pointing, label: first.label.clone(), height },
        ));
    }
    out
}

fn rp_core<T: PartialEq>(
    a: &[T],
    b: &[T],
    pos: impl Fn(&T) -> GridPoint,
    tie: impl Fn(&T, &T) -> Ordering,
) -> Result<Ordering, AnalysisError> {
    let n = a.len().min(b.len());
    let Some(d) = (0..n).find(|&k| a[k] != b[k]) else {
        return if a.len() == b.len() { Ok(Ordering::Equal) } else { Err(AnalysisError::PrefixAmbiguity) };
    };
    let (pa, pb) = (pos(&a[d]), pos(&b[d]));
    if pa == pb {
        // Same position, different tile: the smaller type has priority.
        return Ok(tie(&a[d], &b[d]).reverse());
    }
    if d < 2 {
        return Err(AnalysisError::Incomparable);
    }
    match turn_right_of_path(pos(&a[d - 2]), pos(&a[d - 1]), pb, pa) {
        Ok(Turn::Right) => Ok(Ordering::Greater),
        Ok(Turn::Left) => Ok(Ordering::Less),
        _ => Err(AnalysisError::Incomparable),
    }
}

/// `Greater` when `a` is right-priority over `b`.
pub fn rp_compare(a: &[Tile], b: &[Tile]) -> Result<Ordering, AnalysisError> {
    rp_core(a, b, |t| t.pos.center(), |x: &Tile, y: &Tile| x.ty.cmp(&y.ty))
}

/// Right-priority comparison of binding paths (positions only).
pub fn rp_compare_points(a: &[GridPoint], b: &[GridPoint]) -> Result<Ordering, AnalysisError> {
    rp_core(a, b, |p| *p, |_, _| Ordering::Equal)
}

fn argmax_by<T>(
    cands: &[T],
    cmp: impl Fn(&T, &T) -> Result<Ordering, AnalysisError>,
) -> Result<usize, AnalysisError> {
    if cands.is_empty() {
        return Err(AnalysisError::BadIndex(0));
    }
    let mut best = 0;
    for k in 1..cands.len() {
        if cmp(&cands[k], &cands[best])? == Ordering::Greater {
            best = k;
        }
    }
    Ok(best)
}

/// Index of the right-priority maximum among tile paths.
pub fn right_priority(cands: &[Vec<Tile>]) -> Result<usize, AnalysisError> {
    argmax_by(cands, |a, b| rp_compare(a, b))
}

/// Index of the right-priority maximum among binding paths.
pub fn right_priority_points(cands: &[Vec<GridPoint>]) -> Result<usize, AnalysisError> {
    argmax_by(cands, |a, b| rp_compare_points(a, b))
}

/// Glue pair violating the east-monotonicity of south-visible glues.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GlueEastCounterexample {
    pub i: usize,
    pub j: usize,
}

pub fn check_glue_east(sys: &TileSystem, p: &[Tile]) -> Result<Option<GlueEastCounterexample>, AnalysisError> {
    if p.len() < 2 {
        return Err(AnalysisError::LastGlueNotVisible);
    }
    let vis = Visibility::new(sys, p);
    let last = p.len() - 2;
    if !vis.glue(last).points_east_west() || !vis.visible(last, Dir::North)? {
        return Err(AnalysisError::LastGlueNotVisible);
    }
    let south: Vec<usize> = (0..=last)
        .filter(|&i| vis.glue(i).points_east_west() && vis.visible(i, Dir::South).unwrap())
        .collect();
    for &i in &south {
        let gi = vis.glue(i);
        for &j in &south {
            let east_case = gi.pointing == Dir::East && p[i].pos.x < p[j].pos.x;
            let west_case = gi.pointing == Dir::West && p[i].pos.x > p[j].pos.x;
            if (east_case || west_case) && (i >= j || vis.glue(j).pointing != gi.pointing) {
                return Ok(Some(GlueEastCounterexample { i, j }));
            }
        }
    }
    Ok(None)
}

/// A south-visible and a north-visible glue that both point west.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GlueSideCounterexample {
    pub south: usize,
    pub north: usize,
}

pub fn check_glue_side(sys: &TileSystem, p: &[Tile]) -> Result<Option<GlueSideCounterexample>, AnalysisError> {
    if p.len() < 2 || !last_tile_unique_extreme(sys, p, Dir::East) {
        return Err(AnalysisError::NotEasternmost);
    }
    let vis = Visibility::new(sys, p);
    let west = |d: Dir| {
        vis.glues()
            .iter()
            .find(|g| g.pointing == Dir::West && vis.visible(g.index, d).unwrap())
            .map(|g| g.index)
    };
    Ok(match (west(Dir::South), west(Dir::North)) {
        (Some(south), Some(north)) => Some(GlueSideCounterexample { south, north }),
        _ => None,
    })
}
