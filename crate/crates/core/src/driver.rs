// SPDX-License-Identifier: Apache-2.0
//! End-to-end analysis of a producible path: canonical position, span
//! bookkeeping, the case analysis that locates a shield, and the 2HAM
//! reduction.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;

use crate::analysis::{
    check_glue_side, last_tile_unique_extreme, spans, AnalysisError, Axis, Orientation, Span, SpanProps, Visibility,
};
use crate::geometry::Dir;
use crate::shield::{is_shield, pump_or_block_with, EngineConfig, EngineError, Shield, ShieldOutcome, ShieldTrace};
use crate::tam::{
    validate_producible_path, verify_fragile_cert, verify_pumpable_cert, Assembly, FragilityCert, Path, PathError,
    Pos, PumpingSpec, Tile, TileSystem, TileType,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DriverError {
    #[error("tile and seed counts must be positive")]
    BadCounts,
    #[error("path never reaches the square of half-side {0}")]
    TooShort(String),
    #[error("invalid path: {0}")]
    Path(#[from] PathError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

fn claim(ok: bool, name: &str) -> Result<(), DriverError> {
    if ok {
        Ok(())
    } else {
        Err(EngineError::ClaimViolation(name.to_string()).into())
    }
}

fn check_counts(tiles: u64, seed: u64) -> Result<u32, DriverError> {
    if tiles == 0 || seed == 0 {
        return Err(DriverError::BadCounts);
    }
    tiles.checked_mul(4).and_then(|t| t.checked_add(1)).and_then(|e| u32::try_from(e).ok()).ok_or(DriverError::BadCounts)
}

/// `(4|T|)^(4|T|+1) (4|σ|+6)`: how far east of the seed the last tile must be.
pub fn bound_theorem_main_distance(tiles: u64, seed: u64) -> Result<BigUint, DriverError> {
    let e = check_counts(tiles, seed)?;
    Ok(BigUint::from(4 * tiles).pow(e) * BigUint::from(4 * seed + 6))
}

/// The distance bound; same as [`bound_theorem_main_distance`].
pub fn bound(tiles: u64, seed: u64) -> Result<BigUint, DriverError> {
    bound_theorem_main_distance(tiles, seed)
}

/// Half-side of the square used to truncate the path: the distance bound
/// plus `|σ|`.
pub fn bound_theorem1_half_side(tiles: u64, seed: u64) -> Result<BigUint, DriverError> {
    Ok(bound_theorem_main_distance(tiles, seed)? + BigUint::from(seed))
}

/// `(8|T|)^(4|T|+1) (5|σ|+6)`: the width or height a path needs for the
/// headline statement.
pub fn bound_theorem1_extent(tiles: u64, seed: u64) -> Result<BigUint, DriverError> {
    let e = check_counts(tiles, seed)?;
    Ok(BigUint::from(8 * tiles).pow(e) * BigUint::from(5 * seed + 6))
}

/// One step of a change of frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    /// Counter-clockwise quarter turns about the origin.
    Rotate(u8),
    /// `x -> -x`.
    FlipH,
    /// `y -> -y`.
    FlipV,
    Shift(Pos),
}

impl Op {
    pub fn vector(self, v: Pos) -> Pos {
        match self {
            Op::Rotate(q) => (0..q % 4).fold(v, |v, _| Pos::new(-v.y, v.x)),
            Op::FlipH => Pos::new(-v.x, v.y),
            Op::FlipV => Pos::new(v.x, -v.y),
            Op::Shift(_) => v,
        }
    }

    pub fn pos(self, p: Pos) -> Pos {
        match self {
            Op::Shift(s) => p + s,
            _ => self.vector(p),
        }
    }

    /// Where a tile side facing `d` faces afterwards.
    pub fn dir(self, d: Dir) -> Dir {
        let u = d.unit();
        let v = self.vector(Pos::new(u.dx, u.dy));
        Dir::ALL.into_iter().find(|e| e.unit().dx == v.x && e.unit().dy == v.y).unwrap()
    }

    pub fn inverse(self) -> Op {
        match self {
            Op::Rotate(q) => Op::Rotate((4 - q % 4) % 4),
            Op::Shift(s) => Op::Shift(Pos::new(-s.x, -s.y)),
            other => other,
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Rotate(q) => write!(f, "rot90x{q}"),
            Op::FlipH => f.write_str("flipH"),
            Op::FlipV => f.write_str("flipV"),
            Op::Shift(s) => write!(f, "shift({},{})", s.x, s.y),
        }
    }
}

/// A composed change of frame, applied left to right.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Transform {
    ops: Vec<Op>,
}

impl Transform {
    pub fn identity() -> Transform {
        Transform::default()
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn is_identity(&self) -> bool {
        self.ops.is_empty()
    }

    /// Appends `op`, merging it into the last step where possible.
    pub fn push(&mut self, op: Op) {
        let merged = match (self.ops.last().copied(), op) {
            (Some(Op::Shift(a)), Op::Shift(b)) => Some(Op::Shift(a + b)),
            (Some(Op::Rotate(a)), Op::Rotate(b)) => Some(Op::Rotate((a + b) % 4)),
            (Some(Op::FlipH), Op::FlipH) | (Some(Op::FlipV), Op::FlipV) => Some(Op::Shift(Pos::new(0, 0))),
            _ => None,
        };
        match merged {
            Some(m) => {
                self.ops.pop();
                if m != Op::Shift(Pos::new(0, 0)) && m != Op::Rotate(0) {
                    self.ops.push(m);
                }
            }
            None if op != Op::Shift(Pos::new(0, 0)) && op != Op::Rotate(0) => self.ops.push(op),
            None => {}
        }
    }

    pub fn then(&self, op: Op) -> Transform {
        let mut t = self.clone();
        t.push(op);
        t
    }

    pub fn inverse(&self) -> Transform {
        let mut t = Transform::identity();
        for op in self.ops.iter().rev() {
            t.push(op.inverse());
        }
        t
    }

    pub fn pos(&self, p: Pos) -> Pos {
        self.ops.iter().fold(p, |p, op| op.pos(p))
    }

    pub fn vector(&self, v: Pos) -> Pos {
        self.ops.iter().fold(v, |v, op| op.vector(v))
    }

    pub fn dir(&self, d: Dir) -> Dir {
        self.ops.iter().fold(d, |d, op| op.dir(d))
    }

    pub fn tile_type(&self, t: &TileType) -> TileType {
        let mut out = t.clone();
        for d in Dir::ALL {
            out.glues[self.dir(d).index()] = t.glues[d.index()].clone();
        }
        out
    }

    pub fn system(&self, sys: &TileSystem) -> TileSystem {
        let tiles = sys.tiles().iter().map(|t| self.tile_type(t)).collect();
        let seed: Assembly = sys.seed().iter().map(|(&p, &ty)| (self.pos(p), ty)).collect();
        TileSystem::with_parts(tiles, seed)
    }

    pub fn path(&self, p: &[Tile]) -> Path {
        p.iter().map(|t| Tile::new(self.pos(t.pos), t.ty)).collect()
    }

    pub fn cert(&self, c: &FragilityCert) -> FragilityCert {
        FragilityCert { attachments: self.path(&c.attachments), conflict: self.pos(c.conflict) }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ops.is_empty() {
            return f.write_str("identity");
        }
        let parts: Vec<String> = self.ops.iter().map(Op::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub sys: TileSystem,
    pub path: Path,
    /// Maps original coordinates to canonical ones.
    pub transform: Transform,
    /// Index `b` of the last kept tile of the original path.
    pub truncated_at: usize,
    /// Easternmost glue column `X`.
    pub x_end: i64,
    /// Whether the truncation square was reached (false for the best-effort
    /// form of a short path).
    pub reached_bound: bool,
}

fn glue_column(a: Pos, b: Pos) -> Option<i64> {
    (a.y == b.y).then_some(a.x.min(b.x))
}

fn easternmost_glue_column(p: &[Tile]) -> Option<i64> {
    p.windows(2).filter_map(|w| glue_column(w[0].pos, w[1].pos)).max()
}

fn turns_to_east(d: Dir) -> u8 {
    match d {
        Dir::East => 0,
        Dir::North => 3,
        Dir::West => 2,
        Dir::South => 1,
    }
}

fn build_canonical(sys: &TileSystem, p: &[Tile], b: usize, first: Transform, reached_bound: bool) -> CanonicalForm {
    let pts: Vec<Pos> = sys.seed().keys().copied().chain(p[..=b].iter().map(|t| t.pos)).map(|q| first.pos(q)).collect();
    let minx = pts.iter().map(|q| q.x).min().unwrap();
    let miny = pts.iter().map(|q| q.y).min().unwrap();
    let t = first.then(Op::Shift(Pos::new(-minx, -miny)));
    let path = t.path(&p[..=b]);
    CanonicalForm {
        sys: t.system(sys),
        x_end: easternmost_glue_column(&path).unwrap_or(0),
        path,
        transform: t,
        truncated_at: b,
        reached_bound,
    }
}

/// Truncates `p` at its first tile on the square of half-side
/// `distance + |σ|` around `P_0`, rotates that tile to the unique
/// easternmost position and translates to the first quadrant.
pub fn canonicalize(sys: &TileSystem, p: &[Tile], distance: &BigUint) -> Result<CanonicalForm, DriverError> {
    validate_producible_path(sys, p)?;
    let half_big = distance + BigUint::from(sys.seed().len());
    let origin = Transform::identity().then(Op::Shift(Pos::new(-p[0].pos.x, -p[0].pos.y)));
    let hit = i64::try_from(&half_big).ok().and_then(|h| {
        p.iter().position(|t| {
            let q = origin.pos(t.pos);
            q.x.abs().max(q.y.abs()) >= h
        })
        .map(|b| (h, b))
    });
    let Some((h, b)) = hit else {
        return Err(DriverError::TooShort(half_big.to_string()));
    };
    let q = origin.pos(p[b].pos);
    let side = if q.x == h {
        Dir::East
    } else if q.y == h {
        Dir::North
    } else if q.x == -h {
        Dir::West
    } else {
        Dir::South
    };
    Ok(build_canonical(sys, p, b, origin.then(Op::Rotate(turns_to_east(side))), true))
}

/// Best-effort form for a path that never reaches the square: the longest
/// prefix whose last tile is a unique extreme of σ ∪ prefix.
pub fn canonicalize_prefix(sys: &TileSystem, p: &[Tile]) -> Result<CanonicalForm, DriverError> {
    validate_producible_path(sys, p)?;
    for b in (1..p.len()).rev() {
        for d in [Dir::East, Dir::North, Dir::West, Dir::South] {
            if last_tile_unique_extreme(sys, &p[..=b], d) {
                let t = Transform::identity().then(Op::Rotate(turns_to_east(d)));
                return Ok(build_canonical(sys, p, b, t, false));
            }
        }
    }
    Err(DriverError::TooShort("no prefix ends on a unique extreme tile".into()))
}

type Signature = (String, Orientation);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEntry {
    pub span: Span,
    pub props: SpanProps,
}

impl LedgerEntry {
    fn signature(&self) -> Signature {
        (self.props.label.clone(), self.props.orientation)
    }

    fn column(&self) -> i64 {
        self.span.column
    }
}

/// First occurrences `x_0 < … < x_n` of each span signature from `x_0` on,
/// closed by `x_{n+1} = X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanLedger {
    pub firsts: Vec<LedgerEntry>,
    /// Every span on columns `x_0..=X`.
    pub spans: Vec<LedgerEntry>,
    pub x_end: i64,
    pub h_end: i64,
}

impl SpanLedger {
    pub fn build(all: &[(Span, SpanProps)], x0: i64, x_end: i64) -> SpanLedger {
        let spans: Vec<LedgerEntry> = all
            .iter()
            .filter(|(s, _)| s.column >= x0)
            .map(|(s, p)| LedgerEntry { span: *s, props: p.clone() })
            .collect();
        let mut seen = BTreeMap::new();
        let mut firsts = Vec::new();
        for e in &spans {
            if seen.insert(e.signature(), ()).is_none() {
                firsts.push(e.clone());
            }
        }
        let h_end = spans.iter().find(|e| e.column() == x_end).map_or(0, |e| e.props.height);
        SpanLedger { firsts, spans, x_end, h_end }
    }

    /// `n + 2` columns `x_0..=x_{n+1}`.
    pub fn len(&self) -> usize {
        self.firsts.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        self.firsts.is_empty()
    }

    pub fn column(&self, c: usize) -> i64 {
        self.firsts.get(c).map_or(self.x_end, LedgerEntry::column)
    }

    pub fn height(&self, c: usize) -> i64 {
        self.firsts.get(c).map_or(self.h_end, |e| e.props.height)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pumpable(PumpingSpec),
    Fragile(FragilityCert),
    NoShieldFound,
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Pumpable(_) => "Pumpable",
            Verdict::Fragile(_) => "Fragile",
            Verdict::NoShieldFound => "NoShieldFound",
        }
    }

    /// Process exit code for the verdict.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Pumpable(_) => 0,
            Verdict::Fragile(_) => 1,
            Verdict::NoShieldFound => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalysisResult {
    /// Certificates refer to the original system and path.
    pub verdict: Verdict,
    pub trail: Vec<String>,
    pub canonical: CanonicalForm,
    /// The shield, the frame it lives in, and the length of the path it was
    /// applied to.
    pub shield: Option<(Shield, Transform, usize)>,
    pub engine: Option<ShieldTrace>,
}

#[derive(Debug, Clone, Default)]
pub struct AnalyzeOptions {
    /// Replaces the distance bound `(4|T|)^(4|T|+1)(4|σ|+6)`.
    pub bound_override: Option<BigUint>,
    pub engine: EngineConfig,
}

#[derive(Debug, Clone)]
struct Frame {
    t: Transform,
    sys: TileSystem,
    path: Path,
}

impl Frame {
    fn then(&self, op: Op) -> Frame {
        let step = Transform::identity().then(op);
        Frame { t: self.t.then(op), sys: step.system(&self.sys), path: step.path(&self.path) }
    }

    fn prefix(&self, last: usize) -> Frame {
        Frame { t: self.t.clone(), sys: self.sys.clone(), path: self.path[..=last].to_vec() }
    }

    /// Translates so σ ∪ path touches both axes from the positive side.
    fn to_margins(&self) -> Frame {
        let pts: Vec<Pos> = self.sys.seed().keys().copied().chain(self.path.iter().map(|t| t.pos)).collect();
        let minx = pts.iter().map(|q| q.x).min().unwrap();
        let miny = pts.iter().map(|q| q.y).min().unwrap();
        self.then(Op::Shift(Pos::new(-minx, -miny)))
    }
}

struct Found {
    frame: Frame,
    shield: Shield,
}

enum Normalized {
    Shield(Found),
    Spans { frame: Frame, x0: i64, spans: Vec<(Span, SpanProps)> },
}

struct Ctx {
    tiles: i64,
    seed: i64,
    trail: Vec<String>,
    theorem_scale: bool,
}

impl Ctx {
    fn note(&mut self, s: &str) {
        self.trail.push(s.to_string());
    }

    fn cone(&self, x: i64) -> i128 {
        4 * (self.tiles as i128).pow(2) * (x as i128 + 4 * self.seed as i128 + 6)
    }
}

fn shield_in(frame: Frame, sh: Shield, name: &str) -> Result<Found, DriverError> {
    claim(is_shield(&frame.sys, &frame.path, sh), name)?;
    Ok(Found { frame, shield: sh })
}

/// Vertical mirror so that north-visible glues point east, then either a
/// shield from west-pointing south-visible glues or the column `x_0`.
fn couple_almost(frame: Frame, ctx: &mut Ctx) -> Result<Normalized, DriverError> {
    claim(check_glue_side(&frame.sys, &frame.path)?.is_none(), "glue:side")?;
    let vis = Visibility::new(&frame.sys, &frame.path);
    let ew: Vec<usize> = (0..frame.path.len() - 1).filter(|&g| vis.glue(g).points_east_west()).collect();
    let north_east = ew.iter().filter(|&&g| vis.visible(g, Dir::North).unwrap()).all(|&g| vis.glue(g).pointing == Dir::East);
    let frame = if north_east {
        frame
    } else {
        ctx.note("glue:side flipV");
        frame.then(Op::FlipV)
    };
    let vis = Visibility::new(&frame.sys, &frame.path);
    let west: Vec<usize> = ew
        .iter()
        .copied()
        .filter(|&g| vis.visible(g, Dir::South).unwrap() && vis.glue(g).pointing == Dir::West)
        .collect();
    if west.len() as i64 > ctx.tiles {
        let mut first: HashMap<&str, usize> = HashMap::new();
        let pair = west.iter().find_map(|&j| match first.get(vis.glue(j).label.as_str()) {
            Some(&i) => Some((i, j)),
            None => {
                first.insert(vis.glue(j).label.as_str(), j);
                None
            }
        });
        if let Some((i, j)) = pair {
            ctx.note("glue:almost");
            let k = frame.path.len() - 2;
            return Ok(Normalized::Shield(shield_in(frame.then(Op::FlipH), Shield::new(i, j, k), "glue:almost")?));
        }
    }
    let spans = spans(&frame.sys, &frame.path, Axis::Vertical)?;
    let x0 = spans
        .iter()
        .find(|(s, _)| vis.glue(s.s).pointing == Dir::East)
        .map(|(s, _)| s.column)
        .ok_or_else(|| EngineError::ClaimViolation("couple:almost".into()))?;
    claim(spans.iter().filter(|(s, _)| s.column >= x0).all(|(_, p)| p.pointing == Some(Dir::East)), "couple:almost")?;
    Ok(Normalized::Spans { frame, x0, spans })
}

fn couple_use(frame: &Frame, a: &LedgerEntry, b: &LedgerEntry, ctx: &mut Ctx) -> Result<Found, DriverError> {
    ctx.note("couple:use");
    if a.props.orientation == Orientation::Up {
        shield_in(frame.clone(), Shield::new(a.span.s, b.span.s, b.span.n), "couple:use")
    } else {
        shield_in(frame.then(Op::FlipV), Shield::new(a.span.n, b.span.n, b.span.s), "couple:use")
    }
}

/// The westernmost pair of same-signature spans whose eastern member is at
/// least as high.
fn westernmost_pair(entries: &[LedgerEntry], equal_only: bool) -> Option<(&LedgerEntry, &LedgerEntry)> {
    for (ia, a) in entries.iter().enumerate() {
        for b in &entries[ia + 1..] {
            let h_ok = if equal_only { b.props.height == a.props.height } else { b.props.height >= a.props.height };
            if a.signature() == b.signature() && a.column() < b.column() && h_ok {
                return Some((a, b));
            }
        }
    }
    None
}

fn glue_columns(p: &[Tile]) -> Option<i64> {
    easternmost_glue_column(p)
}

fn case_one(frame: Frame, ledger: &SpanLedger, c: usize, ctx: &mut Ctx) -> Result<Found, DriverError> {
    ctx.note("case 1");
    let span = ledger.firsts.get(c).map_or_else(
        || ledger.spans.iter().find(|e| e.column() == ledger.x_end).cloned().unwrap(),
        |e| e.clone(),
    );
    let (frame, n_c) = if span.props.orientation == Orientation::Up {
        (frame, span.span.n)
    } else {
        (frame.then(Op::FlipV), span.span.s)
    };
    let x_c = ledger.column(c);
    let h_c = ledger.height(c) as i128;
    let q = frame.prefix(n_c + 1);
    let x_q = glue_columns(&q.path).unwrap_or(0) as i128;
    let (t, s) = (ctx.tiles as i128, ctx.seed as i128);
    if h_c < 4 * t * (x_q + 2) + 3 * s + 1 {
        ctx.note("case 1.1");
        let sp = spans(&frame.sys, &frame.path, Axis::Vertical)?;
        let s0 = sp.iter().find(|(x, _)| x.column == ledger.column(0)).map(|(x, _)| x.s);
        let s0 = s0.ok_or_else(|| EngineError::ClaimViolation("case 1.1".into()))?;
        let vis = Visibility::new(&q.sys, &q.path);
        let col = |g: usize| vis.glue(g).midpoint.x;
        let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        let mut cands: Vec<usize> = (0..q.path.len() - 1)
            .filter(|&g| {
                vis.glue(g).pointing == Dir::East && vis.visible(g, Dir::South).unwrap() && col(g) >= col(s0)
            })
            .collect();
        cands.sort_by_key(|&g| col(g));
        let need = x_c as usize + 2;
        let mut label = None;
        for &g in &cands {
            let v = groups.entry(vis.glue(g).label.as_str()).or_default();
            v.push(g);
            if v.len() >= need && label.is_none() {
                label = Some(vis.glue(g).label.clone());
            }
        }
        let label = label.ok_or_else(|| EngineError::ClaimViolation("case 1.1".into()))?;
        let members = &groups[label.as_str()];
        let i = *members.iter().min_by_key(|&&g| col(g)).unwrap();
        let j = *members.iter().max_by_key(|&&g| col(g)).unwrap();
        return shield_in(q, Shield::new(i, j, n_c), "case 1.1");
    }
    ctx.note("case 1.2");
    let thr = (2 * t * (x_q + 2) + s + 1) as i64;
    let seed_top = q.sys.seed().keys().map(|p| p.y).max().unwrap();
    let seed_bottom = q.sys.seed().keys().map(|p| p.y).min().unwrap();
    let north = q.path.iter().position(|t| t.pos.y >= seed_top + thr);
    let south = q.path.iter().position(|t| t.pos.y <= seed_bottom - thr);
    let (b, turns) = match (north, south) {
        (Some(b), _) => (b, turns_to_east(Dir::North)),
        (None, Some(b)) => (b, turns_to_east(Dir::South)),
        _ => return Err(EngineError::ClaimViolation("case 1.2".into()).into()),
    };
    let q2 = q.prefix(b).then(Op::Rotate(turns)).to_margins();
    ctx.note("cor:couple:almost");
    match couple_almost(q2, ctx)? {
        Normalized::Shield(f) => Ok(f),
        Normalized::Spans { frame, x0, spans } => {
            let x_end = glue_columns(&frame.path).unwrap_or(0);
            let l = SpanLedger::build(&spans, x0, x_end);
            let (a, b) = westernmost_pair(&l.spans, false).ok_or_else(|| EngineError::ClaimViolation("case 1.2".into()))?;
            couple_use(&frame, a, b, ctx)
        }
    }
}

fn case_two(frame: Frame, ledger: &SpanLedger, ctx: &mut Ctx) -> Result<Option<Found>, DriverError> {
    let x0 = ledger.column(0);
    let base = BigUint::from(4 * ctx.tiles as u64);
    let tail = BigUint::from(4 * ctx.seed as u64 + 6);
    let mut sum = x0 as i128;
    let mut c0 = None;
    for c in 0..ledger.len() {
        if (ledger.column(c) as i128) > sum {
            c0 = Some(c);
            break;
        }
        let cap = base.pow(2 * c as u32 + 1) * &tail;
        if BigUint::from(sum.max(0) as u128) + 2u32 > cap {
            claim(!ctx.theorem_scale, "case 2")?;
            return Ok(None);
        }
        sum += ledger.height(c) as i128;
    }
    let Some(c0) = c0 else {
        claim(!ctx.theorem_scale, "case 2")?;
        return Ok(None);
    };
    ctx.note("case 2");
    let end = ledger.column(c0);
    for d in 0..c0 {
        let first = &ledger.firsts[d];
        let same: Vec<LedgerEntry> = ledger
            .spans
            .iter()
            .filter(|e| e.signature() == first.signature() && e.column() >= first.column() && e.column() < end)
            .cloned()
            .collect();
        if (same.len() as i64) < first.props.height + 2 {
            continue;
        }
        if let Some(b) = same.iter().find(|e| e.column() > first.column() && e.props.height >= first.props.height) {
            return couple_use(&frame, first, b, ctx).map(Some);
        }
        let (a, b) = westernmost_pair(&same, true).ok_or_else(|| EngineError::ClaimViolation("case 2".into()))?;
        return couple_use(&frame, a, b, ctx).map(Some);
    }
    claim(!ctx.theorem_scale, "case 2")?;
    ctx.trail.pop();
    Ok(None)
}

fn find_shield(frame: Frame, ctx: &mut Ctx) -> Result<Option<Found>, DriverError> {
    let (frame, x0, all) = match couple_almost(frame, ctx)? {
        Normalized::Shield(f) => return Ok(Some(f)),
        Normalized::Spans { frame, x0, spans } => (frame, x0, spans),
    };
    let x_end = glue_columns(&frame.path).unwrap_or(0);
    let ledger = SpanLedger::build(&all, x0, x_end);
    claim(ledger.firsts.len() <= 2 * ctx.tiles as usize, "span ledger")?;
    if let Some(c) = (0..ledger.len()).find(|&c| ledger.height(c) as i128 > ctx.cone(ledger.column(c))) {
        return case_one(frame, &ledger, c, ctx).map(Some);
    }
    if let Some(f) = case_two(frame.clone(), &ledger, ctx)? {
        return Ok(Some(f));
    }
    match westernmost_pair(&ledger.spans, false) {
        Some((a, b)) => couple_use(&frame, a, b, ctx).map(Some),
        None => Ok(None),
    }
}

/// Runs the full case analysis and returns certificates for the original
/// system and path.
pub fn analyze(sys: &TileSystem, p: &[Tile], opts: &AnalyzeOptions) -> Result<AnalysisResult, DriverError> {
    validate_producible_path(sys, p)?;
    let tiles = sys.growth_tile_count() as u64;
    let seed = sys.seed().len() as u64;
    let true_bound = bound(tiles, seed)?;
    let distance = opts.bound_override.clone().unwrap_or_else(|| true_bound.clone());
    let mut ctx = Ctx { tiles: tiles as i64, seed: seed as i64, trail: Vec::new(), theorem_scale: distance >= true_bound };
    let canonical = match canonicalize(sys, p, &distance) {
        Ok(c) => c,
        Err(DriverError::TooShort(_)) => {
            ctx.note("below bound");
            ctx.theorem_scale = false;
            match canonicalize_prefix(sys, p) {
                Ok(c) => c,
                Err(DriverError::TooShort(_)) => {
                    let canonical = build_canonical(sys, p, p.len() - 1, Transform::identity(), false);
                    return Ok(AnalysisResult {
                        verdict: Verdict::NoShieldFound,
                        trail: ctx.trail,
                        canonical,
                        shield: None,
                        engine: None,
                    });
                }
                Err(e) => return Err(e),
            }
        }
        Err(e) => return Err(e),
    };
    let frame = Frame { t: canonical.transform.clone(), sys: canonical.sys.clone(), path: canonical.path.clone() };
    let Some(found) = find_shield(frame, &mut ctx)? else {
        return Ok(AnalysisResult { verdict: Verdict::NoShieldFound, trail: ctx.trail, canonical, shield: None, engine: None });
    };
    let Found { frame, shield } = found;
    let (outcome, trace) = pump_or_block_with(&frame.sys, &frame.path, shield, &opts.engine)?;
    ctx.trail.extend(trace.trail.iter().cloned());
    let back = frame.t.inverse();
    let verdict = match outcome {
        ShieldOutcome::Pumpable { i, j, .. } => {
            let spec = PumpingSpec::new(p.to_vec(), i, j);
            claim(verify_pumpable_cert(sys, &spec).is_ok(), "certificate")?;
            Verdict::Pumpable(spec)
        }
        ShieldOutcome::Fragile { cert, .. } => {
            let cert = back.cert(&cert);
            claim(verify_fragile_cert(sys, p, &cert).is_ok(), "certificate")?;
            Verdict::Fragile(cert)
        }
    };
    Ok(AnalysisResult {
        verdict,
        trail: ctx.trail,
        canonical,
        shield: Some((shield, frame.t, frame.path.len())),
        engine: Some(trace),
    })
}

/// An aTAM system whose seed is one tile of a 2HAM path, with the part of
/// the path that grows from it.
#[derive(Debug, Clone)]
pub struct TwoHamReduction {
    pub sys: TileSystem,
    pub path: Path,
    /// Applied to the input coordinates before the reduction.
    pub transform: Transform,
    /// Kept segment `a..=b` of the input path.
    pub segment: (usize, usize),
    /// Index of the seed tile in the input path.
    pub seed_index: usize,
    /// The westernmost tile was not unique; the lowest one was taken.
    pub ambiguous_westernmost: bool,
}

fn extent(p: &[Tile], f: impl Fn(Pos) -> i64) -> i64 {
    let lo = p.iter().map(|t| f(t.pos)).min().unwrap();
    let hi = p.iter().map(|t| f(t.pos)).max().unwrap();
    hi - lo + 1
}

/// Reduces a glue-matched simple path of a 2HAM tile set to a path of an
/// aTAM system seeded with its westernmost tile. `width`, if given, keeps a
/// shortest segment spanning exactly that many columns.
pub fn reduce_2ham(tiles: Vec<TileType>, p: &[Tile], width: Option<i64>) -> Result<TwoHamReduction, DriverError> {
    if p.is_empty() {
        return Err(PathError::EmptyPath.into());
    }
    let probe = TileSystem::with_parts(tiles.clone(), Assembly::new());
    let mut seen = std::collections::HashSet::new();
    for (k, t) in p.iter().enumerate() {
        if !seen.insert(t.pos) {
            return Err(PathError::NotSimple(k).into());
        }
        if k > 0 && !probe.tiles_interact(p[k - 1], *t) {
            return Err(PathError::GlueMismatch(k).into());
        }
    }
    let mut transform = Transform::identity();
    if extent(p, |q| q.y) > extent(p, |q| q.x) {
        transform.push(Op::Rotate(1));
    }
    let rotated = transform.path(p);
    let (a, b) = match width {
        None => (0, p.len() - 1),
        Some(w) => {
            let mut best: Option<(usize, usize)> = None;
            for a in 0..rotated.len() {
                if let Some(b) = (a..rotated.len()).find(|&b| extent(&rotated[a..=b], |q| q.x) >= w) {
                    if extent(&rotated[a..=b], |q| q.x) == w && best.is_none_or(|(x, y)| b - a < y - x) {
                        best = Some((a, b));
                    }
                }
            }
            best.ok_or_else(|| DriverError::TooShort(format!("width {w}")))?
        }
    };
    let seg = &rotated[a..=b];
    let minx = seg.iter().map(|t| t.pos.x).min().unwrap();
    let west: Vec<usize> = (0..seg.len()).filter(|&k| seg[k].pos.x == minx).collect();
    let m = *west.iter().min_by_key(|&&k| seg[k].pos.y).unwrap();
    let maxx = seg.iter().map(|t| t.pos.x).max().unwrap();
    let forward: Path = seg[m + 1..].to_vec();
    let backward: Path = seg[..m].iter().rev().copied().collect();
    let reaches = |q: &Path| q.iter().any(|t| t.pos.x == maxx);
    let path = match (forward.is_empty(), backward.is_empty()) {
        (false, true) => forward,
        (true, false) => backward,
        _ if reaches(&forward) && (!reaches(&backward) || forward.len() >= backward.len()) => forward,
        _ => backward,
    };
    let transformed = TileSystem::with_parts(tiles.iter().map(|t| transform.tile_type(t)).collect(), Assembly::new());
    let seed_tile = seg[m];
    let seed: Assembly = [(seed_tile.pos, seed_tile.ty)].into_iter().collect();
    let sys = TileSystem::with_parts(transformed.tiles().to_vec(), seed);
    validate_producible_path(&sys, &path)?;
    Ok(TwoHamReduction {
        sys,
        path,
        transform,
        segment: (a, b),
        seed_index: a + m,
        ambiguous_westernmost: west.len() > 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> TileSystem {
        TileSystem::new(vec![TileType::new("A", None, Some("g"), None, Some("g"))], &[(Pos::new(0, 0), "A")])
            .unwrap()
    }

    fn line(n: i64) -> Path {
        (1..=n).map(|x| Tile::new(Pos::new(x, 0), 0)).collect()
    }

    #[test]
    fn bounds() {
        assert_eq!(bound(1, 1).unwrap(), BigUint::from(10240u32));
        assert_eq!(bound(2, 1).unwrap(), BigUint::from(1342177280u64));
        assert_eq!(bound_theorem1_half_side(1, 1).unwrap(), BigUint::from(10241u32));
        assert_eq!(bound(0, 1), Err(DriverError::BadCounts));
        assert_eq!(bound_theorem1_extent(1, 1).unwrap(), BigUint::from(8u32).pow(5) * BigUint::from(11u32));
    }

    #[test]
    fn transforms_invert() {
        let t = Transform::identity().then(Op::Rotate(1)).then(Op::FlipH).then(Op::Shift(Pos::new(3, -2)));
        let q = Pos::new(5, 7);
        assert_eq!(t.inverse().pos(t.pos(q)), q);
        let four = (0..4).fold(Transform::identity(), |t, _| t.then(Op::Rotate(1)));
        assert!(four.is_identity());
        assert!(Transform::identity().then(Op::FlipH).then(Op::FlipH).is_identity());
        assert_eq!(Op::Rotate(1).dir(Dir::East), Dir::North);
        assert_eq!(Op::FlipV.dir(Dir::North), Dir::South);
    }

    #[test]
    fn east_line_is_canonical() {
        let c = canonicalize(&unit(), &line(8), &BigUint::from(2u32)).unwrap();
        assert!(c.transform.is_identity());
        assert_eq!(c.truncated_at, 3);
        assert_eq!(c.x_end, 3);
    }

    #[test]
    fn north_line_rotates_once() {
        let sys = TileSystem::new(vec![TileType::new("A", Some("g"), None, Some("g"), None)], &[(Pos::new(0, 0), "A")])
            .unwrap();
        let p: Path = (1..=6).map(|y| Tile::new(Pos::new(0, y), 0)).collect();
        let c = canonicalize(&sys, &p, &BigUint::from(2u32)).unwrap();
        let rotations: Vec<&Op> = c.transform.ops().iter().filter(|o| matches!(o, Op::Rotate(_))).collect();
        assert_eq!(rotations, vec![&Op::Rotate(3)]);
        assert!(last_tile_unique_extreme(&c.sys, &c.path, Dir::East));
        assert!(validate_producible_path(&c.sys, &c.path).is_ok());
    }

    #[test]
    fn unit_line_pumps_through_couple_use() {
        let opts = AnalyzeOptions { bound_override: Some(BigUint::from(2u32)), ..Default::default() };
        let r = analyze(&unit(), &line(8), &opts).unwrap();
        match &r.verdict {
            Verdict::Pumpable(spec) => assert_eq!(spec.vector(), Pos::new(1, 0)),
            v => panic!("{v:?}"),
        }
        assert!(r.trail.iter().any(|s| s == "couple:use"), "{:?}", r.trail);
    }

    #[test]
    fn short_path_has_no_shield() {
        let sys = TileSystem::new(
            vec![
                TileType::new("A", None, Some("a"), None, None),
                TileType::new("B", Some("b"), None, None, Some("a")),
                TileType::new("C", None, Some("c"), Some("b"), None),
                TileType::new("D", None, None, None, Some("c")),
                TileType::new("S", None, Some("s"), None, None),
            ],
            &[(Pos::new(0, 0), "S")],
        );
        let sys = sys.unwrap();
        let id = |n: &str| sys.id(n).unwrap();
        let mut tiles = sys.tiles().to_vec();
        tiles[id("A")].glues[Dir::West.index()] = Some("s".into());
        let sys = TileSystem::with_parts(tiles, sys.seed().clone());
        let p = vec![
            Tile::new(Pos::new(1, 0), id("A")),
            Tile::new(Pos::new(2, 0), id("B")),
            Tile::new(Pos::new(2, 1), id("C")),
            Tile::new(Pos::new(3, 1), id("D")),
        ];
        let r = analyze(&sys, &p, &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::NoShieldFound);
    }

    #[test]
    fn two_ham_east_line() {
        let tiles = vec![TileType::new("A", None, Some("g"), None, Some("g"))];
        let p: Path = (0..3).map(|x| Tile::new(Pos::new(x, 0), 0)).collect();
        let r = reduce_2ham(tiles, &p, None).unwrap();
        assert_eq!(r.seed_index, 0);
        assert_eq!(r.path.len(), 2);
        assert!(r.transform.is_identity());
    }

    #[test]
    fn two_ham_vertical_rotates() {
        let tiles = vec![TileType::new("A", Some("g"), None, Some("g"), None)];
        let p: Path = (0..4).map(|y| Tile::new(Pos::new(0, y), 0)).collect();
        let r = reduce_2ham(tiles, &p, None).unwrap();
        assert_eq!(r.transform.ops(), &[Op::Rotate(1)]);
        assert_eq!(r.path.len(), 3);
    }
}
