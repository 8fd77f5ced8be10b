// SPDX-License-Identifier: Apache-2.0
//! Shields and the pump-or-block construction.
//!
//! Given a shield `(i, j, k)` the engine builds the cut `c`, the dominant
//! tile, the binding path `r` and the path `R`, then runs the induction on
//! `(u_n, m_n, v_n)` until it can emit a pumping certificate. Every claim the
//! construction relies on is re-checked on the concrete instance and reported
//! as [`EngineError::ClaimViolation`] when it fails.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::ops::RangeInclusive;

use crate::analysis::{glue_ref, Visibility};
use crate::geometry::{
    curves_meet, precious_check, Dir, Displacement, GridPoint, Heading, PolyCurve, Region, Side, VRay, Window,
};
use crate::tam::{
    validate_producible_path, verify_fragile_cert, verify_pumpable_cert, FragilityCert, Path, Pos, PumpingSpec,
    Tile, TileSystem,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shield {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl Shield {
    pub fn new(i: usize, j: usize, k: usize) -> Shield {
        Shield { i, j, k }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("claim {0} failed on this instance")]
    ClaimViolation(String),
    #[error("search budget exceeded in {0}")]
    BudgetExceeded(&'static str),
    #[error("not a shield: {0}")]
    NotAShield(String),
}

fn violated(name: &str) -> EngineError {
    EngineError::ClaimViolation(name.to_string())
}

fn claim(ok: bool, name: &str) -> Result<(), EngineError> {
    if ok {
        Ok(())
    } else {
        Err(violated(name))
    }
}

/// Search limits. Both can be overridden with `PUMPKIT_BUDGET_NODES` and
/// `PUMPKIT_BUDGET_STEPS`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    pub max_nodes: usize,
    pub max_steps: usize,
    pub check_claims: bool,
    /// When false, a failure of the literal H4 intersection condition is
    /// recorded in the trace and the run continues to certificate
    /// verification.
    pub strict: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { max_nodes: 1_000_000, max_steps: 10_000, check_claims: true, strict: false }
    }
}

impl EngineConfig {
    pub fn from_env() -> EngineConfig {
        let mut cfg = EngineConfig::default();
        let read = |name: &str| std::env::var(name).ok().and_then(|v| v.trim().parse::<usize>().ok());
        if let Some(n) = read("PUMPKIT_BUDGET_NODES") {
            cfg.max_nodes = n;
        }
        if let Some(n) = read("PUMPKIT_BUDGET_STEPS") {
            cfg.max_steps = n;
        }
        cfg
    }
}

fn center(t: &Tile) -> GridPoint {
    t.pos.center()
}

fn centers(ts: &[Tile]) -> Vec<GridPoint> {
    ts.iter().map(center).collect()
}

fn midpoint_of(sys: &TileSystem, p: &[Tile], g: usize) -> Result<GridPoint, EngineError> {
    glue_ref(sys, p, g).map(|r| r.midpoint).map_err(|e| EngineError::NotAShield(e.to_string()))
}

/// Whether the translated north ray of glue `k` stays off `embed(P_{i..k})`
/// except at its start point.
fn backup_holds(vis: &Visibility, p: &[Tile], sh: Shield) -> bool {
    let start = vis.glue(sh.k).midpoint + (p[sh.i].pos - p[sh.j].pos).doubled();
    // Points of embed(P) on an odd column are midpoints of horizontal glues.
    (sh.i..sh.k).all(|g| {
        let m = vis.glue(g).midpoint;
        m.x != start.x || m.y < start.y || m == start
    })
}

/// All shields of `p`, in lexicographic order.
pub fn enumerate_shields(sys: &TileSystem, p: &[Tile]) -> Vec<Shield> {
    if p.len() < 3 {
        return Vec::new();
    }
    let vis = Visibility::new(sys, p);
    let n = vis.glues().len();
    if n + 1 != p.len() {
        return Vec::new();
    }
    let south: Vec<usize> = (0..n)
        .filter(|&g| vis.glue(g).pointing == Dir::East && vis.visible(g, Dir::South) == Ok(true))
        .collect();
    let north: Vec<usize> = (0..n)
        .filter(|&g| vis.glue(g).points_east_west() && vis.visible(g, Dir::North) == Ok(true))
        .collect();
    let mut out = Vec::new();
    for (a, &i) in south.iter().enumerate() {
        for &j in &south[a + 1..] {
            if vis.glue(i).label != vis.glue(j).label {
                continue;
            }
            for &k in north.iter().filter(|&&k| k >= j) {
                let sh = Shield::new(i, j, k);
                if backup_holds(&vis, p, sh) {
                    out.push(sh);
                }
            }
        }
    }
    out
}

pub fn is_shield(sys: &TileSystem, p: &[Tile], sh: Shield) -> bool {
    sh.i < sh.j && sh.j <= sh.k && sh.k + 1 < p.len() && enumerate_shields(sys, p).contains(&sh)
}

#[derive(Debug, Clone)]
pub struct Workspace {
    pub cut: PolyCurve,
    pub region: Region,
    /// Start points of `l^i` and `l^k`.
    pub li: GridPoint,
    pub lk: GridPoint,
}

pub fn build_workspace(sys: &TileSystem, p: &[Tile], sh: Shield) -> Result<Workspace, EngineError> {
    let (i, j, k) = (sh.i, sh.j, sh.k);
    if !(i < j && j <= k && k + 1 < p.len()) {
        return Err(EngineError::NotAShield(format!("indices ({i}, {j}, {k})")));
    }
    let li = midpoint_of(sys, p, i)?;
    let lk = midpoint_of(sys, p, k)?;
    let mut verts = vec![li];
    verts.extend(centers(&p[i + 1..=k]));
    verts.push(lk);
    let cut = PolyCurve::almost_vertical(verts);
    let region = Region::right_of(&cut).map_err(|_| violated("lem:c-cuts"))?;

    let left = |q: Pos| region.index().classify(q.center()) == Side::Left;
    claim(sys.seed().keys().all(|&q| left(q)) && p[..=i].iter().all(|t| left(t.pos)), "lem:c")?;

    let start = lk + (p[i].pos - p[j].pos).doubled();
    let ray = PolyCurve { south_ray: false, vertices: vec![start], north_ray: true };
    let w = region.window().union(Window::new(start.x, start.x, start.y, start.y)).grow(2);
    let touches = ray.points_in(&w).into_iter().any(|q| q != start && region.contains(q))
        || region.contains_strictly(start)
        || ray.unit_segments_in(&w).into_iter().any(|(a, b)| region.contains_segment(a, b));
    claim(!touches, "lem:c-lk")?;
    Ok(Workspace { cut, region, li, lk })
}

#[derive(Debug, Clone)]
pub struct Dominant {
    pub m0: usize,
    /// The lowest ray of vector `P_i P_j`, anchored at its westernmost tile
    /// of `P_{i+1..k}`.
    pub rho: VRay,
    pub lm0: VRay,
    /// `c^{m0}`; its right-hand side is `C+`.
    pub cm0: PolyCurve,
    pub plus: Region,
}

/// Number of translates by `v` before `c` lies entirely east of `w`.
fn translates_until_east(c: &PolyCurve, w: &Window, v: Displacement) -> i64 {
    let cw = c.finite_window().unwrap();
    (w.xmax - cw.xmin).max(0) / v.dx.max(1) + 2
}

pub fn dominant(sys: &TileSystem, p: &[Tile], sh: Shield, ws: &Workspace) -> Result<Dominant, EngineError> {
    let (i, j, k) = (sh.i, sh.j, sh.k);
    let v = (p[j].pos - p[i].pos).doubled();
    claim(v.dx > 0, "glue:east")?;
    let xl = ws.li.x;
    let key = |q: GridPoint| q.y * v.dx - (q.x - xl) * v.dy;
    let on_line: Vec<usize> = (i + 1..=k).filter(|&a| center(&p[a]).x > xl).collect();
    let low = on_line.iter().map(|&a| key(center(&p[a]))).min().ok_or_else(|| violated("lem:m0i1"))?;
    let on_rho: Vec<usize> = on_line.into_iter().filter(|&a| key(center(&p[a])) == low).collect();
    let m0 = *on_rho.iter().max_by_key(|&&a| p[a].pos.x).unwrap();
    let west = *on_rho.iter().min_by_key(|&&a| p[a].pos.x).unwrap();
    // With j = k the tile P_{j+1} is not part of P_{i+1..k}, so m0 = i+1 is possible.
    claim(j == k || m0 > i + 1, "lem:m0i1")?;

    let e = PolyCurve::finite(centers(&p[i + 1..=k]));
    let pm = center(&p[m0]);
    let l = PolyCurve::from_south(pm);
    let ew = e.finite_window().unwrap();
    claim(curves_meet(&l, &e) == vec![pm], "lem:cmz")?;
    let reach = translates_until_east(&l, &ew, v);
    for n in 1..=reach {
        claim(curves_meet(&l.translated(v * n), &e).is_empty(), "lem:cmz")?;
    }
    claim(ws.region.contains_curve(&l), "lem:lmzInC")?;
    if m0 > j {
        let lj = midpoint_of(sys, p, j)?;
        claim(pm.x > lj.x, "lem:lmzEast")?;
        let back = curves_meet(&l.translated(-v), &e);
        claim(back.iter().all(|&q| q == pm - v), "lem:lmzEast")?;
    }

    let mut verts = centers(&p[m0..=k]);
    verts.push(ws.lk);
    let cm0 = PolyCurve::almost_vertical(verts);
    let plus = Region::right_of(&cm0).map_err(|_| violated("lem:lmzInCp"))?;
    let w = ws.region.window();
    for n in 1..=translates_until_east(&l, &w, v) {
        claim(plus.contains_curve(&l.translated(v * n)), "lem:lmzInCp")?;
    }
    Ok(Dominant {
        m0,
        rho: VRay::new(center(&p[west]), Heading::Along(v)),
        lm0: VRay::new(pm, Heading::South),
        cm0,
        plus,
    })
}

/// The graph `G'` restricted to the workspace, and the admissible final
/// vertices of binding paths in `S̄`.
#[derive(Debug, Clone)]
pub struct BindingProblem {
    pub start: GridPoint,
    pub first: GridPoint,
    pub adj: BTreeMap<GridPoint, Vec<GridPoint>>,
    pub ends: BTreeSet<GridPoint>,
}

impl BindingProblem {
    pub fn new(p: &[Tile], sh: Shield, ws: &Workspace) -> BindingProblem {
        let (i, j, k) = (sh.i, sh.j, sh.k);
        let back = (p[i].pos - p[j].pos).doubled();
        let region = &ws.region;
        let mut edges: BTreeSet<(GridPoint, GridPoint)> = BTreeSet::new();
        let mut verts: BTreeSet<GridPoint> = BTreeSet::new();
        let mut add = |a: GridPoint, b: GridPoint, verts: &mut BTreeSet<GridPoint>| {
            verts.insert(a);
            verts.insert(b);
            edges.insert((a.min(b), a.max(b)));
        };
        for a in i + 1..k {
            add(center(&p[a]), center(&p[a + 1]), &mut verts);
        }
        for b in j + 1..k {
            add(center(&p[b]) + back, center(&p[b + 1]) + back, &mut verts);
        }
        verts.insert(center(&p[i + 1]));
        for b in j + 1..=k {
            verts.insert(center(&p[b]) + back);
        }
        let inside: BTreeSet<GridPoint> = verts.into_iter().filter(|&q| region.contains(q)).collect();
        let mut adj: BTreeMap<GridPoint, Vec<GridPoint>> = inside.iter().map(|&q| (q, Vec::new())).collect();
        for (a, b) in edges {
            if !(inside.contains(&a) && inside.contains(&b)) {
                continue;
            }
            let mid = GridPoint::new((a.x + b.x) / 2, (a.y + b.y) / 2);
            if region.contains(mid) && region.contains_segment(a, mid) && region.contains_segment(mid, b) {
                adj.get_mut(&a).unwrap().push(b);
                adj.get_mut(&b).unwrap().push(a);
            }
        }
        let lk = ws.lk;
        let ends = inside
            .iter()
            .copied()
            .filter(|q| {
                (q.x - lk.x).abs() == 1
                    && q.y >= lk.y
                    && region.contains_segment(*q, GridPoint::new(lk.x, q.y))
            })
            .collect();
        BindingProblem { start: center(&p[i]), first: center(&p[i + 1]), adj, ends }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len() + 1
    }

    /// Whether `q` (starting with `start`, `first`) is a member of `S̄`.
    pub fn in_s_bar(&self, q: &[GridPoint]) -> bool {
        if q.len() < 2 || q[0] != self.start || q[1] != self.first {
            return false;
        }
        let mut seen = HashSet::new();
        if !q.iter().all(|x| seen.insert(*x)) {
            return false;
        }
        q[1..].windows(2).all(|w| self.adj.get(&w[0]).is_some_and(|n| n.contains(&w[1])))
            && self.ends.contains(q.last().unwrap())
    }

    /// Neighbors of `cur` reached from `prev`, rightmost first.
    pub fn successors(&self, prev: GridPoint, cur: GridPoint) -> Vec<GridPoint> {
        let w = Dir::of((prev - cur).signum()).expect("adjacent vertices");
        let rank = |q: GridPoint| {
            let d = Dir::of((q - cur).signum()).expect("adjacent vertices");
            let mut x = w;
            let mut r = 0;
            while x != d {
                x = x.cw();
                r += 1;
            }
            r
        };
        let mut out: Vec<GridPoint> = self.adj.get(&cur).cloned().unwrap_or_default();
        out.sort_by_key(|&q| std::cmp::Reverse(rank(q)));
        out
    }
}

struct Frame {
    v: GridPoint,
    succ: Vec<GridPoint>,
    next: usize,
    member: bool,
    anc: Option<i64>,
    desc: Option<i64>,
    pre: usize,
}

/// The right-priority element of `S`, as a full binding path `q'` starting
/// with `start`, `first`.
pub fn search_s(bp: &BindingProblem, max_nodes: usize) -> Result<Vec<GridPoint>, EngineError> {
    if !bp.adj.contains_key(&bp.first) {
        return Err(violated("S nonempty"));
    }
    let mut path = vec![bp.start];
    let mut on_path: HashSet<GridPoint> = HashSet::from([bp.start]);
    let mut stack: Vec<Frame> = Vec::new();
    let mut best: Option<(usize, Vec<GridPoint>)> = None;
    let mut visits = 0usize;

    let mut enter = |v: GridPoint, anc: Option<i64>, path: &mut Vec<GridPoint>, stack: &mut Vec<Frame>| {
        let prev = *path.last().unwrap();
        path.push(v);
        stack.push(Frame {
            v,
            succ: bp.successors(prev, v),
            next: 0,
            member: bp.ends.contains(&v),
            anc,
            desc: None,
            pre: visits,
        });
        visits += 1;
        visits
    };
    on_path.insert(bp.first);
    enter(bp.first, None, &mut path, &mut stack);

    while let Some(top) = stack.last_mut() {
        if top.next < top.succ.len() {
            let q = top.succ[top.next];
            top.next += 1;
            if on_path.contains(&q) {
                continue;
            }
            let anc = if top.member { Some(top.anc.map_or(top.v.y, |a| a.max(top.v.y))) } else { top.anc };
            on_path.insert(q);
            if enter(q, anc, &mut path, &mut stack) > max_nodes {
                return Err(EngineError::BudgetExceeded("r search"));
            }
            continue;
        }
        let f = stack.pop().unwrap();
        let y = f.v.y;
        if f.member && f.anc.is_none_or(|a| a < y) && f.desc.is_none_or(|d| d <= y) {
            if best.as_ref().is_none_or(|(pre, _)| f.pre < *pre) {
                best = Some((f.pre, path.clone()));
            }
        }
        let up = match (f.desc, f.member) {
            (d, true) => Some(d.map_or(y, |d| d.max(y))),
            (d, false) => d,
        };
        if let Some(parent) = stack.last_mut() {
            parent.desc = match (parent.desc, up) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            };
        }
        path.pop();
        on_path.remove(&f.v);
    }
    best.map(|(_, q)| q).ok_or_else(|| violated("S nonempty"))
}

fn tile_pos(q: GridPoint) -> Pos {
    Pos::new(q.x / 2, q.y / 2)
}

/// The binding path `r`, in tile coordinates.
pub fn build_r(sys: &TileSystem, p: &[Tile], sh: Shield, ws: &Workspace, cfg: &EngineConfig) -> Result<Vec<Pos>, EngineError> {
    let (i, j, k) = (sh.i, sh.j, sh.k);
    if j == k {
        return Err(violated("lem:if-j=k"));
    }
    let bp = BindingProblem::new(p, sh, ws);
    let q = search_s(&bp, cfg.max_nodes)?;
    let r: Vec<Pos> = q[1..].iter().map(|&g| tile_pos(g)).collect();
    if cfg.check_claims {
        let idx: HashMap<Pos, usize> = (i + 1..=k).map(|a| (p[a].pos, a)).collect();
        let seq: Vec<usize> = r.iter().filter_map(|q| idx.get(q).copied()).collect();
        claim(seq.windows(2).all(|w| w[0] < w[1]), "lem:order")?;
        let d = build_d(sys, p, sh)?;
        let left = |q: Pos| d.index().classify(q.center()) == Side::Left;
        claim(sys.seed().keys().all(|&q| left(q)) && p[..=j].iter().all(|t| left(t.pos)), "lem:d")?;
        let shifted = PolyCurve::finite(r.iter().map(|q| (*q + (p[j].pos - p[i].pos)).center()).collect());
        claim(d.contains_curve(&shifted), "lem:d")?;
    }
    Ok(r)
}

/// The curve `d` and its right-hand side `D` (requires `j < k`).
pub fn build_d(sys: &TileSystem, p: &[Tile], sh: Shield) -> Result<Region, EngineError> {
    let lj = midpoint_of(sys, p, sh.j)?;
    let lk = midpoint_of(sys, p, sh.k)?;
    let mut verts = vec![lj];
    verts.extend(centers(&p[sh.j + 1..=sh.k]));
    verts.push(lk);
    Region::right_of(&PolyCurve::almost_vertical(verts)).map_err(|_| violated("lem:d"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RPath {
    Full(Path),
    Blocked { cert: FragilityCert, blocked: RangeInclusive<usize> },
}

pub fn build_big_r(sys: &TileSystem, p: &[Tile], sh: Shield, r: &[Pos]) -> Result<RPath, EngineError> {
    let (i, j, k) = (sh.i, sh.j, sh.k);
    let v = p[j].pos - p[i].pos;
    let own: HashMap<Pos, usize> = (i + 1..=k).map(|a| (p[a].pos, a)).collect();
    let copy: HashMap<Pos, usize> = (j + 1..=k).map(|b| (p[b].pos - v, b)).collect();
    let mut big_r: Path = Vec::with_capacity(r.len());
    for (s, q) in r.iter().enumerate() {
        let tile = match (own.get(q), copy.get(q)) {
            (Some(&a), Some(&b)) if p[a].ty != p[b].ty => return blocking_cert(sys, p, sh, r, &big_r, s, b),
            (Some(&a), _) => p[a],
            (None, Some(&b)) => p[b].shifted(-v),
            (None, None) => return Err(violated("lem:r")),
        };
        big_r.push(tile);
    }
    let mut one = p[..=i].to_vec();
    one.extend(big_r.iter().copied());
    let mut two = p[..=j].to_vec();
    two.extend(big_r.iter().map(|t| t.shifted(v)));
    claim(validate_producible_path(sys, &one).is_ok() && validate_producible_path(sys, &two).is_ok(), "lem:r")?;
    Ok(RPath::Full(big_r))
}

/// The fragility certificate of a type conflict at `r_{s0}`, where
/// `P_b - v` sits on the same position as a tile of `P_{i+1..k}`.
fn blocking_cert(
    sys: &TileSystem,
    p: &[Tile],
    sh: Shield,
    r: &[Pos],
    big_r: &[Tile],
    s0: usize,
    b: usize,
) -> Result<RPath, EngineError> {
    let (i, j, k) = (sh.i, sh.j, sh.k);
    let v = p[j].pos - p[i].pos;
    let copy_edge =
        (s0 > 0).then(|| (j + 1..k).find(|&b2| p[b2].pos - v == r[s0 - 1] && p[b2 + 1].pos - v == r[s0])).flatten();
    let (attachments, conflict, blocked) = if let Some(b2) = copy_edge {
        let mut seq = p[..=i].to_vec();
        seq.extend_from_slice(big_r);
        seq.push(p[b2 + 1].shifted(-v));
        (seq, r[s0], i + 1..=k)
    } else {
        let a = if s0 == 0 {
            i
        } else {
            (i + 1..k).find(|&a| p[a].pos == r[s0 - 1] && p[a + 1].pos == r[s0]).ok_or_else(|| violated("lem:r"))?
        };
        let mut seq = p[..=j].to_vec();
        seq.extend(big_r.iter().map(|t| t.shifted(v)));
        seq.push(p[a + 1].shifted(v));
        (seq, p[b].pos, j + 1..=k)
    };
    let cert = FragilityCert { attachments, conflict };
    claim(verify_fragile_cert(sys, p, &cert).is_ok(), "lem:r")?;
    Ok(RPath::Blocked { cert, blocked })
}

/// One state of the induction, with the curves it was checked against.
#[derive(Debug, Clone)]
pub struct InductionStep {
    pub u: usize,
    pub m: usize,
    pub v: usize,
    pub s: i64,
    pub f: PolyCurve,
    pub g: PolyCurve,
    pub h: Option<PolyCurve>,
}

#[derive(Debug, Clone, Default)]
pub struct ShieldTrace {
    pub shield: Option<Shield>,
    pub cut: Option<PolyCurve>,
    pub m0: Option<usize>,
    pub rho: Option<VRay>,
    pub lm0: Option<VRay>,
    pub cm0: Option<PolyCurve>,
    pub d: Option<PolyCurve>,
    pub r: Vec<Pos>,
    pub big_r: Path,
    pub history: Vec<InductionStep>,
    pub trail: Vec<String>,
    /// Literal hypotheses that failed in non-strict mode, with the step.
    pub violations: Vec<(usize, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShieldOutcome {
    Pumpable { i: usize, j: usize, vector: Pos },
    Fragile { cert: FragilityCert, blocked: RangeInclusive<usize> },
}

struct Engine<'a> {
    p: &'a [Tile],
    sh: Shield,
    v: Pos,
    v2: Displacement,
    idx: HashMap<Pos, usize>,
    cut: PolyCurve,
    region: Region,
    lk: GridPoint,
    r: Vec<Pos>,
}

impl Engine<'_> {
    /// `(u, v)` from the last tile of `R` at or before `P_m` whose translate
    /// lies on `P_{i+1..k}`.
    fn uv_at(&self, m: usize, name: &str) -> Result<(usize, usize), EngineError> {
        let b = self.r.iter().position(|&q| q == self.p[m].pos).ok_or_else(|| violated(name))?;
        let d = (0..=b).rev().find(|&d| self.idx.contains_key(&(self.r[d] + self.v))).ok_or_else(|| violated(name))?;
        let u = *self.idx.get(&self.r[d]).ok_or_else(|| violated(name))?;
        let w = self.idx[&(self.r[d] + self.v)];
        claim(self.p[u].ty == self.p[w].ty, "lem:r")?;
        Ok((u, w))
    }

    fn embed(&self, a: usize, b: usize) -> PolyCurve {
        PolyCurve::finite(centers(&self.p[a..=b]))
    }

    fn g_curve(&self, f: &PolyCurve, m: usize) -> PolyCurve {
        let mut g = f.clone();
        g.append(&self.embed(m, self.sh.k));
        g.push(self.lk);
        g.with_north_ray()
    }

    fn h_curve(&self, f: &PolyCurve, u: usize, m: usize, v: usize) -> PolyCurve {
        let mut h = f.translated(self.v2);
        let mut back = centers(&self.p[u..=m]);
        back.reverse();
        h.append(&PolyCurve::finite(back).translated(self.v2));
        h.append(&self.embed(v, self.sh.k));
        h.push(self.lk);
        h.with_north_ray()
    }

    /// Checks H1-H4. The literal "meets g only at P_v" part of H4 fails
    /// when f already carries a unit translate of `P_{u..m}`; that case is
    /// returned as `Some` instead of an error.
    fn check_hypotheses(
        &self,
        f: &PolyCurve,
        g: &PolyCurve,
        u: usize,
        m: usize,
        v: usize,
    ) -> Result<Option<&'static str>, EngineError> {
        claim(f.is_simple(), "H1")?;
        let pm = center(&self.p[m]);
        claim(self.region.contains_curve(f) && self.region.meets_boundary(f) == vec![pm], "H2")?;
        let w = self.region.window().union(f.finite_window().unwrap());
        for n in 1..=translates_until_east(f, &w, self.v2) {
            let t = f.translated(self.v2 * n);
            claim(curves_meet(&t, f).is_empty() && curves_meet(&t, &self.cut).is_empty(), "H3")?;
        }
        claim(u <= m && m <= v, "H4")?;
        let seg = self.embed(u, m).translated(self.v2);
        let pv = vec![center(&self.p[v])];
        claim(curves_meet(&seg, &self.cut) == pv, "H4")?;
        let extra: Vec<GridPoint> = curves_meet(&seg, g).into_iter().filter(|q| *q != pv[0]).collect();
        if extra.is_empty() {
            return Ok(None);
        }
        let on_f = curves_meet(f, &seg);
        claim(extra.iter().all(|q| on_f.contains(q)), "H4")?;
        Ok(Some("H4:g"))
    }

    /// Largest `(a, t)` with `P_a + t·v` on `P_{i+1..k}`, and that index.
    fn largest_pair(&self, u: usize, m: usize) -> Option<(usize, i64, usize)> {
        let w = Window::bounding(self.p.iter().map(|t| GridPoint::new(t.pos.x, t.pos.y)).collect::<Vec<_>>().iter())
            .unwrap();
        let tmax = (w.width().max(w.height())) / self.v.x.abs().max(self.v.y.abs()).max(1) + 1;
        for a in (u..=m).rev() {
            if let Some(t) = (1..=tmax).rev().find(|&t| self.idx.contains_key(&(self.p[a].pos + self.v * t))) {
                return Some((a, t, self.idx[&(self.p[a].pos + self.v * t)]));
            }
        }
        None
    }
}

/// Runs the construction for one shield and returns a verified outcome.
pub fn pump_or_block(sys: &TileSystem, p: &[Tile], sh: Shield) -> Result<(ShieldOutcome, ShieldTrace), EngineError> {
    pump_or_block_with(sys, p, sh, &EngineConfig::from_env())
}

pub fn pump_or_block_with(
    sys: &TileSystem,
    full: &[Tile],
    sh: Shield,
    cfg: &EngineConfig,
) -> Result<(ShieldOutcome, ShieldTrace), EngineError> {
    if !is_shield(sys, full, sh) {
        return Err(EngineError::NotAShield(format!("({}, {}, {})", sh.i, sh.j, sh.k)));
    }
    let (i, j, k) = (sh.i, sh.j, sh.k);
    let p = &full[..=k + 1];
    let mut trace = ShieldTrace { shield: Some(sh), ..ShieldTrace::default() };
    let ws = build_workspace(sys, p, sh)?;
    trace.cut = Some(ws.cut.clone());
    let v = p[j].pos - p[i].pos;
    if j == k {
        trace.trail.push("lem:if-j=k".into());
        let out = ShieldOutcome::Pumpable { i, j, vector: v };
        return finish(sys, full, &ws, out, trace);
    }
    let dom = dominant(sys, p, sh, &ws)?;
    trace.m0 = Some(dom.m0);
    trace.rho = Some(dom.rho);
    trace.lm0 = Some(dom.lm0);
    trace.cm0 = Some(dom.cm0.clone());
    let mut dv = vec![midpoint_of(sys, p, j)?];
    dv.extend(centers(&p[j + 1..=k]));
    dv.push(ws.lk);
    trace.d = Some(PolyCurve::almost_vertical(dv));

    let r = build_r(sys, p, sh, &ws, cfg)?;
    trace.r = r.clone();
    match build_big_r(sys, p, sh, &r)? {
        RPath::Blocked { cert, blocked } => {
            trace.trail.push("lem:r".into());
            return finish(sys, full, &ws, ShieldOutcome::Fragile { cert, blocked }, trace);
        }
        RPath::Full(big_r) => trace.big_r = big_r,
    }

    let eng = Engine {
        p,
        sh,
        v,
        v2: v.doubled(),
        idx: (i + 1..=k).map(|a| (p[a].pos, a)).collect(),
        cut: ws.cut.clone(),
        region: ws.region.clone(),
        lk: ws.lk,
        r,
    };
    let m0 = dom.m0;
    let (u0, v0) = eng.uv_at(m0, "lem:u0v0")?;
    if cfg.check_claims {
        claim(i < u0 && u0 <= m0 && m0 <= v0, "lem:u0v0")?;
        claim(dom.plus.contains_curve(&eng.embed(u0, m0).translated(eng.v2)), "lem:u0v0")?;
        let hits: Vec<usize> = (u0..=m0).filter_map(|a| eng.idx.get(&(p[a].pos + v)).copied()).collect();
        claim(hits == vec![v0], "lem:u0v0")?;
    }

    let (mut u, mut m, mut vv) = (u0, m0, v0);
    let mut f = PolyCurve::from_south(center(&p[m0]));
    let mut s = 0i64;
    for step in 0.. {
        if step >= cfg.max_steps {
            return Err(EngineError::BudgetExceeded("induction"));
        }
        let g = eng.g_curve(&f, m);
        if vv == k && u < m && p[u + 1].pos + v == p[k + 1].pos {
            trace.history.push(InductionStep { u, m, v: vv, s, f, g, h: None });
            trace.trail.push("special case".into());
            return finish(sys, full, &ws, ShieldOutcome::Pumpable { i: u, j: k, vector: v }, trace);
        }
        let h = eng.h_curve(&f, u, m, vv);
        if cfg.check_claims {
            let soft = eng.check_hypotheses(&f, &g, u, m, vv)?;
            claim(h.is_simple(), "h_n")?;
            if let Some(name) = soft {
                claim(!cfg.strict, name)?;
                trace.violations.push((step, name.to_string()));
            }
        }
        trace.history.push(InductionStep { u, m, v: vv, s, f: f.clone(), g, h: Some(h) });
        let (a, t, next) = eng.largest_pair(u, m).ok_or_else(|| violated("H4"))?;
        if next == m {
            claim(m == vv, "case A")?;
            trace.trail.push("case A".into());
            return finish(sys, full, &ws, ShieldOutcome::Pumpable { i: u, j: vv, vector: v }, trace);
        }
        claim(next >= vv && next > m, "case B")?;
        trace.trail.push("case B".into());
        let mut back = centers(&p[a..=m]);
        back.reverse();
        f.append(&PolyCurve::finite(back));
        f = f.translated(eng.v2 * t);
        s += t;
        m = next;
        let (nu, nv) = eng.uv_at(m, "H4")?;
        u = nu;
        vv = nv;
        claim(u <= m && m <= vv, "H4")?;
    }
    unreachable!()
}

/// Checks the outcome against the independent verifiers.
fn finish(
    sys: &TileSystem,
    full: &[Tile],
    ws: &Workspace,
    out: ShieldOutcome,
    trace: ShieldTrace,
) -> Result<(ShieldOutcome, ShieldTrace), EngineError> {
    match &out {
        ShieldOutcome::Pumpable { i, j, .. } => {
            let spec = PumpingSpec::new(full.to_vec(), *i, *j);
            let cells = centers(&full[i + 1..=*j]);
            let disjoint = precious_check(&cells, spec.vector().doubled(), 1).unwrap_or(false);
            claim(verify_pumpable_cert(sys, &spec).is_ok() && disjoint, "certificate")?;
        }
        ShieldOutcome::Fragile { cert, .. } => {
            claim(verify_fragile_cert(sys, full, cert).is_ok(), "certificate")?;
            let sh = trace.shield.unwrap();
            let outside: HashSet<Pos> =
                sys.seed().keys().copied().chain(full[..=sh.i].iter().map(|t| t.pos)).collect();
            let inside = cert
                .attachments
                .iter()
                .filter(|t| !outside.contains(&t.pos))
                .all(|t| ws.region.contains(t.pos.center()));
            claim(inside, "lem:shield")?;
        }
    }
    Ok((out, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tam::TileType;

    fn unit() -> TileSystem {
        TileSystem::new(vec![TileType::new("A", None, Some("g"), None, Some("g"))], &[(Pos::new(0, 0), "A")])
            .unwrap()
    }

    fn line(n: i64) -> Path {
        (1..=n).map(|x| Tile::new(Pos::new(x, 0), 0)).collect()
    }

    fn blocker() -> (TileSystem, Path) {
        let sys = TileSystem::new(
            vec![
                TileType::new("A", None, Some("g"), None, Some("g")),
                TileType::new("B", Some("g"), Some("g"), Some("g"), Some("g")),
            ],
            &[(Pos::new(0, 0), "A")],
        )
        .unwrap();
        let a = sys.id("A").unwrap();
        let b = sys.id("B").unwrap();
        let p = vec![
            Tile::new(Pos::new(1, 0), a),
            Tile::new(Pos::new(2, 0), a),
            Tile::new(Pos::new(3, 0), b),
            Tile::new(Pos::new(3, 1), b),
            Tile::new(Pos::new(4, 1), a),
        ];
        (sys, p)
    }

    #[test]
    fn unit_line_shields() {
        let sys = unit();
        let sh = enumerate_shields(&sys, &line(3));
        assert!(sh.contains(&Shield::new(0, 1, 1)));
        assert!(enumerate_shields(&sys, &line(2)).is_empty());
    }

    #[test]
    fn unit_line_pumps() {
        let (out, trace) = pump_or_block(&unit(), &line(3), Shield::new(0, 1, 1)).unwrap();
        assert_eq!(out, ShieldOutcome::Pumpable { i: 0, j: 1, vector: Pos::new(1, 0) });
        assert_eq!(trace.trail, vec!["lem:if-j=k".to_string()]);
    }

    #[test]
    fn workspace_of_unit_line() {
        let ws = build_workspace(&unit(), &line(3), Shield::new(0, 1, 1)).unwrap();
        assert!(ws.region.contains_strictly(GridPoint::new(9, -5)));
        assert!(!ws.region.contains(GridPoint::new(1, 0)));
        assert!(ws.region.contains(GridPoint::new(9, 5)));
        assert!(!ws.region.contains(GridPoint::new(2, 5)));
    }

    #[test]
    fn unit_line_dominant() {
        let (sys, p, sh) = (unit(), line(3), Shield::new(0, 1, 1));
        let ws = build_workspace(&sys, &p, sh).unwrap();
        let dom = dominant(&sys, &p, sh, &ws).unwrap();
        assert_eq!(dom.m0, 1);
        assert_eq!(dom.rho.start, GridPoint::new(4, 0));
        assert_eq!(dom.rho.heading, Heading::Along(Displacement::new(2, 0)));
    }

    #[test]
    fn engineered_blocker() {
        let (sys, p) = blocker();
        assert!(is_shield(&sys, &p, Shield::new(0, 1, 3)));
        let (out, trace) = pump_or_block(&sys, &p, Shield::new(0, 1, 3)).unwrap();
        assert_eq!(trace.m0, Some(2));
        assert_eq!(trace.r, vec![Pos::new(2, 0), Pos::new(3, 0), Pos::new(3, 1)]);
        let a = sys.id("A").unwrap();
        match out {
            ShieldOutcome::Fragile { cert, blocked } => {
                assert_eq!(
                    cert.attachments,
                    vec![Tile::new(Pos::new(1, 0), a), Tile::new(Pos::new(2, 0), a), Tile::new(Pos::new(3, 0), a)]
                );
                assert_eq!(cert.conflict, Pos::new(3, 0));
                assert_eq!(blocked, 2..=3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn seed_in_region_is_a_violation() {
        // Glue 0 points west, so the cut leaves the seed on its right.
        let sys = TileSystem::new(
            vec![TileType::new("B", Some("g"), Some("g"), Some("g"), Some("g"))],
            &[(Pos::new(0, 0), "B")],
        )
        .unwrap();
        let p: Path = [(0, 1), (-1, 1), (-2, 1), (-3, 1)].iter().map(|&(x, y)| Tile::new(Pos::new(x, y), 0)).collect();
        let err = build_workspace(&sys, &p, Shield::new(0, 1, 2)).unwrap_err();
        assert_eq!(err, EngineError::ClaimViolation("lem:c".into()));
    }
}
