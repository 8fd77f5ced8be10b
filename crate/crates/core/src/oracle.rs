// SPDX-License-Identifier: Apache-2.0
//! Brute-force ground truth for small systems.
//!
//! Nothing here reuses the engine's search code: paths are enumerated level
//! by level, sides are found by flood fill, and the right-priority element of
//! `S` is picked by pairwise comparison over all of `S̄`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::right_priority_points;
use crate::geometry::{Dir, GridPoint, PolyCurve, Side, Window};
use crate::shield::BindingProblem;
use crate::tam::{FragilityCert, Path, Pos, PumpingSpec, Tile, TileSystem, TileType};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("window does not strictly contain the curve's finite part")]
    WindowTooSmall,
    #[error("point is outside the window")]
    OutsideWindow,
    #[error("the filtered set S is empty")]
    EmptyS,
    #[error("graph has {0} vertices, above the configured limit")]
    GraphTooLarge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumBudget {
    pub max_path_len: usize,
    pub max_assembly_size: usize,
    pub max_graph_vertices: usize,
    pub max_pump_depth: usize,
    /// Cap on the number of paths held by one enumeration or search.
    pub max_paths: usize,
}

impl Default for EnumBudget {
    fn default() -> Self {
        EnumBudget {
            max_path_len: 14,
            max_assembly_size: 30,
            max_graph_vertices: 40,
            max_pump_depth: 10,
            max_paths: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PathEnumeration {
    pub paths: Vec<Path>,
    pub truncated: bool,
}

fn extensions(sys: &TileSystem, p: &[Tile]) -> Vec<Tile> {
    let seed = sys.seed();
    let mut out = Vec::new();
    match p.last() {
        None => {
            for (&s, &sty) in seed {
                for d in Dir::ALL {
                    let q = s.step(d);
                    if seed.contains_key(&q) {
                        continue;
                    }
                    for t in sys.growth_tiles() {
                        if sys.interacts(sty, d, t) {
                            out.push(Tile::new(q, t));
                        }
                    }
                }
            }
        }
        Some(last) => {
            for d in Dir::ALL {
                let q = last.pos.step(d);
                if seed.contains_key(&q) || p.iter().any(|t| t.pos == q) {
                    continue;
                }
                for t in sys.growth_tiles() {
                    if sys.interacts(last.ty, d, t) {
                        out.push(Tile::new(q, t));
                    }
                }
            }
        }
    }
    out.sort_by_key(|t| (t.pos, t.ty));
    out.dedup();
    out
}

/// Producible paths in breadth-first length order.
pub fn enumerate_paths(sys: &TileSystem, budget: &EnumBudget) -> PathEnumeration {
    let mut out = PathEnumeration::default();
    let mut level: Vec<Path> = vec![Vec::new()];
    for _ in 0..budget.max_path_len {
        let mut next = Vec::new();
        for p in &level {
            for t in extensions(sys, p) {
                let mut q = p.clone();
                q.push(t);
                next.push(q);
            }
        }
        if out.paths.len() + next.len() > budget.max_paths {
            out.truncated = true;
            let room = budget.max_paths - out.paths.len();
            out.paths.extend(next.into_iter().take(room));
            return out;
        }
        if next.is_empty() {
            break;
        }
        out.paths.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// Searches for a producible path from the seed whose last tile disagrees
/// with `p`, shortest first.
pub fn brute_fragile(sys: &TileSystem, p: &[Tile], budget: &EnumBudget) -> Option<FragilityCert> {
    let on_p: std::collections::HashMap<Pos, usize> = p.iter().map(|t| (t.pos, t.ty)).collect();
    let mut level: Vec<Path> = vec![Vec::new()];
    let mut seen = 0usize;
    for _ in 0..budget.max_assembly_size {
        let mut next = Vec::new();
        for q in &level {
            for t in extensions(sys, q) {
                match on_p.get(&t.pos) {
                    Some(&ty) if ty != t.ty => {
                        let mut attachments = q.clone();
                        attachments.push(t);
                        return Some(FragilityCert { attachments, conflict: t.pos });
                    }
                    _ => {
                        let mut r = q.clone();
                        r.push(t);
                        next.push(r);
                    }
                }
            }
        }
        seen += next.len();
        if next.is_empty() || seen > budget.max_paths {
            return None;
        }
        level = next;
    }
    None
}

/// Simulates `max_pump_depth` periods of the pumping of `p` between `i`
/// and `j`.
pub fn pumping_pair_holds(sys: &TileSystem, p: &[Tile], i: usize, j: usize, budget: &EnumBudget) -> bool {
    if i >= j || j >= p.len() {
        return false;
    }
    let v = p[j].pos - p[i].pos;
    let period: HashSet<Pos> = p[i + 1..=j].iter().map(|t| t.pos).collect();
    if p[i + 1..=j].iter().any(|t| period.contains(&(t.pos + v))) {
        return false;
    }
    let mut occupied: HashSet<Pos> = sys.seed().keys().copied().collect();
    let mut seq: Vec<Tile> = p[..=i].to_vec();
    for n in 0..budget.max_pump_depth as i64 {
        seq.extend(p[i + 1..=j].iter().map(|t| Tile::new(t.pos + v * n, t.ty)));
    }
    for (k, t) in seq.iter().enumerate() {
        if !occupied.insert(t.pos) {
            return false;
        }
        if k > 0 {
            let prev = seq[k - 1];
            let Some(d) = Dir::ALL.into_iter().find(|&d| prev.pos.step(d) == t.pos) else {
                return false;
            };
            let a = sys.tile(prev.ty).glue(d);
            if a.is_none() || a != sys.tile(t.ty).glue(d.opposite()) {
                return false;
            }
        }
    }
    true
}

/// The first pair `(i, j)` in lexicographic order whose pumping holds.
pub fn brute_pumpable(sys: &TileSystem, p: &[Tile], budget: &EnumBudget) -> Option<PumpingSpec> {
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if pumping_pair_holds(sys, p, i, j, budget) {
                return Some(PumpingSpec::new(p.to_vec(), i, j));
            }
        }
    }
    None
}

/// Side of `pt` by 4-connected flood fill inside `window`, from anchors on
/// the window's west and east columns.
pub fn floodfill_side(curve: &PolyCurve, window: &Window, pt: GridPoint) -> Result<Side, OracleError> {
    if !window.contains(pt) {
        return Err(OracleError::OutsideWindow);
    }
    floodfill_sides(curve, window)?.remove(&pt).ok_or(OracleError::WindowTooSmall)
}

/// Sides of every point of `window` by one pair of flood fills on the
/// lattice refined by 2, where points of the curve that are adjacent but
/// not linked leave a gap between them.
pub fn floodfill_sides(curve: &PolyCurve, window: &Window) -> Result<HashMap<GridPoint, Side>, OracleError> {
    let fw = curve.finite_window().ok_or(OracleError::WindowTooSmall)?;
    if !(window.xmin < fw.xmin && window.xmax > fw.xmax && window.ymin < fw.ymin && window.ymax > fw.ymax) {
        return Err(OracleError::WindowTooSmall);
    }
    let fine = Window::new(2 * window.xmin, 2 * window.xmax, 2 * window.ymin, 2 * window.ymax);
    let mut sides: HashMap<GridPoint, Side> =
        curve.scaled(2).points_in(&fine).into_iter().map(|p| (p, Side::OnCurve)).collect();
    let mid = window.ymin + window.ymax;
    for (from, side) in [(GridPoint::new(fine.xmin, mid), Side::Left), (GridPoint::new(fine.xmax, mid), Side::Right)] {
        if sides.contains_key(&from) {
            return Err(OracleError::WindowTooSmall);
        }
        sides.insert(from, side);
        let mut queue = VecDeque::from([from]);
        while let Some(q) = queue.pop_front() {
            for d in Dir::ALL {
                let n = q + d.unit();
                if fine.contains(n) && !sides.contains_key(&n) {
                    sides.insert(n, side);
                    queue.push_back(n);
                }
            }
        }
    }
    window
        .points()
        .map(|p| sides.get(&GridPoint::new(2 * p.x, 2 * p.y)).map(|&s| (p, s)).ok_or(OracleError::WindowTooSmall))
        .collect()
}

/// The right-priority element of `S` by exhaustive enumeration of `S̄`.
pub fn brute_right_priority(bp: &BindingProblem, budget: &EnumBudget) -> Result<Vec<GridPoint>, OracleError> {
    if bp.vertex_count() > budget.max_graph_vertices {
        return Err(OracleError::GraphTooLarge(bp.vertex_count()));
    }
    let mut all: Vec<Vec<GridPoint>> = Vec::new();
    let mut stack: Vec<Vec<GridPoint>> = vec![vec![bp.start, bp.first]];
    while let Some(q) = stack.pop() {
        let last = *q.last().unwrap();
        if let Some(ns) = bp.adj.get(&last) {
            for &n in ns {
                if !q.contains(&n) {
                    let mut e = q.clone();
                    e.push(n);
                    stack.push(e);
                }
            }
        }
        all.push(q);
    }
    let s_bar: Vec<Vec<GridPoint>> = all.into_iter().filter(|q| bp.in_s_bar(q)).collect();
    let height = |q: &Vec<GridPoint>| q.last().unwrap().y;
    let s: Vec<Vec<GridPoint>> = s_bar
        .iter()
        .filter(|q| {
            // Equal heights are allowed for extensions only, so a prefix wins a tie.
            s_bar.iter().all(|o| {
                if o.len() < q.len() && q.starts_with(o) {
                    height(o) < height(q)
                } else if o.len() > q.len() && o.starts_with(q) {
                    height(o) <= height(q)
                } else {
                    true
                }
            })
        })
        .cloned()
        .collect();
    if s.is_empty() {
        return Err(OracleError::EmptyS);
    }
    let best = right_priority_points(&s).map_err(|_| OracleError::EmptyS)?;
    Ok(s[best].clone())
}

/// A random simple almost-vertical curve with its finite part inside
/// `[0, w] x [0, h]`, starting on the bottom row and ending on the top row.
pub fn random_almost_vertical<R: Rng>(rng: &mut R, w: i64, h: i64) -> PolyCurve {
    assert!(w >= 0 && h >= 1);
    'retry: loop {
        let start = GridPoint::new(rng.gen_range(0..=w), 0);
        let mut pts = vec![start];
        let mut seen = HashSet::from([start]);
        let mut cur = start;
        for _ in 0..(w + 1) * (h + 1) * 4 {
            if cur.y == h {
                return PolyCurve::almost_vertical(pts);
            }
            let mut dirs = Dir::ALL.to_vec();
            dirs.shuffle(rng);
            let next = dirs.into_iter().map(|d| cur + d.unit()).find(|n| {
                n.x >= 0 && n.x <= w && n.y >= 1 && n.y <= h && !seen.contains(n)
            });
            match next {
                Some(n) => {
                    pts.push(n);
                    seen.insert(n);
                    cur = n;
                }
                None => continue 'retry,
            }
        }
    }
}

/// Parameters of one generated corpus, printed with every artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusParams {
    pub seed: u64,
    pub systems: usize,
    pub max_tiles: usize,
    pub alphabet: usize,
    pub max_seed: usize,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams { seed: 0x5eed, systems: 200, max_tiles: 4, alphabet: 4, max_seed: 3 }
    }
}

impl fmt::Display for CorpusParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "corpus seed={:#x} systems={} |T|<={} glues<={} |seed|<={}",
            self.seed, self.systems, self.max_tiles, self.alphabet, self.max_seed
        )
    }
}

const LABELS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

fn random_glue<R: Rng>(rng: &mut R, alphabet: usize) -> Option<&'static str> {
    if rng.gen_bool(0.45) {
        None
    } else {
        Some(LABELS[rng.gen_range(0..alphabet.clamp(1, LABELS.len()))])
    }
}

pub fn random_system<R: Rng>(rng: &mut R, params: &CorpusParams) -> TileSystem {
    let n = rng.gen_range(1..=params.max_tiles.max(1));
    let tiles: Vec<TileType> = (0..n)
        .map(|k| {
            let name = format!("T{k}");
            let g: Vec<Option<&str>> = (0..4).map(|_| random_glue(rng, params.alphabet)).collect();
            TileType::new(&name, g[0], g[1], g[2], g[3])
        })
        .collect();
    let size = rng.gen_range(1..=params.max_seed.max(1));
    let mut cells = vec![Pos::new(0, 0)];
    while cells.len() < size {
        let base = cells[rng.gen_range(0..cells.len())];
        let q = base.step(Dir::ALL[rng.gen_range(0..4)]);
        if !cells.contains(&q) {
            cells.push(q);
        }
    }
    let names: Vec<String> = (0..cells.len()).map(|_| format!("T{}", rng.gen_range(0..n))).collect();
    let seed: Vec<(Pos, &str)> = cells.iter().zip(&names).map(|(p, s)| (*p, s.as_str())).collect();
    TileSystem::new(tiles, &seed).expect("generated system is valid")
}

/// One generated system with its enumerated paths.
#[derive(Debug, Clone)]
pub struct CorpusInstance {
    pub index: usize,
    pub sys: TileSystem,
    pub paths: Vec<Path>,
}

/// Deterministic corpus; systems whose enumeration hits `max_paths` are
/// skipped and counted in the second component.
pub fn corpus(params: &CorpusParams, budget: &EnumBudget) -> (Vec<CorpusInstance>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut out = Vec::new();
    let mut rejected = 0;
    for index in 0..params.systems {
        let sys = random_system(&mut rng, params);
        let en = enumerate_paths(&sys, budget);
        if en.truncated {
            rejected += 1;
            continue;
        }
        out.push(CorpusInstance { index, sys, paths: en.paths });
    }
    (out, rejected)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> TileSystem {
        TileSystem::new(vec![TileType::new("A", None, Some("g"), None, Some("g"))], &[(Pos::new(0, 0), "A")])
            .unwrap()
    }

    #[test]
    fn unit_enumeration() {
        let b = EnumBudget { max_path_len: 3, ..EnumBudget::default() };
        let en = enumerate_paths(&unit(), &b);
        // The west glue of the seed grows a mirror branch.
        assert_eq!(en.paths.len(), 6);
        assert!(!en.truncated);
        let xs: Vec<Vec<i64>> = en.paths.iter().map(|p| p.iter().map(|t| t.pos.x).collect()).collect();
        for east in [vec![1], vec![1, 2], vec![1, 2, 3]] {
            assert!(xs.contains(&east));
        }
    }

    #[test]
    fn unit_line_is_pumpable_not_fragile() {
        let p: Path = (1..=3).map(|x| Tile::new(Pos::new(x, 0), 0)).collect();
        let b = EnumBudget::default();
        assert!(brute_fragile(&unit(), &p, &b).is_none());
        let spec = brute_pumpable(&unit(), &p, &b).unwrap();
        assert_eq!((spec.i, spec.j), (0, 1));
    }

    #[test]
    fn flood_fill_on_a_line() {
        let c = PolyCurve::almost_vertical(vec![GridPoint::new(0, 0)]);
        let w = Window::new(-3, 3, -3, 3);
        assert_eq!(floodfill_side(&c, &w, GridPoint::new(2, 1)), Ok(Side::Right));
        assert_eq!(floodfill_side(&c, &w, GridPoint::new(-2, 1)), Ok(Side::Left));
        assert_eq!(floodfill_side(&c, &w, GridPoint::new(0, 3)), Ok(Side::OnCurve));
        assert_eq!(floodfill_side(&c, &Window::new(0, 3, -3, 3), GridPoint::new(1, 1)), Err(OracleError::WindowTooSmall));
    }

    #[test]
    fn random_curves_are_simple() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let c = random_almost_vertical(&mut rng, 5, 6);
            assert!(c.is_simple());
            assert!(c.is_almost_vertical());
        }
    }
}
