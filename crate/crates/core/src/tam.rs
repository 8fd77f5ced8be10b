// SPDX-License-Identifier: Apache-2.0
//! Temperature-1 tile assembly: tile systems, assemblies, paths, pumping
//! and the certificate verifiers.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::geometry::{squares_disjoint, Dir, Displacement, GridPoint, Window};

/// Tile coordinates, also used for tile-unit vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Pos {
    pub x: i64,
    pub y: i64,
}

impl Pos {
    pub const fn new(x: i64, y: i64) -> Pos {
        Pos { x, y }
    }

    pub fn center(self) -> GridPoint {
        GridPoint::tile(self.x, self.y)
    }

    pub fn doubled(self) -> Displacement {
        Displacement::new(2 * self.x, 2 * self.y)
    }

    pub fn step(self, d: Dir) -> Pos {
        let u = d.unit();
        Pos::new(self.x + u.dx, self.y + u.dy)
    }

    /// Direction from `self` to an adjacent `o`.
    pub fn dir_to(self, o: Pos) -> Option<Dir> {
        let d = o - self;
        if d.x.abs() + d.y.abs() != 1 {
            return None;
        }
        Dir::of(Displacement::new(d.x, d.y))
    }

    pub fn is_adjacent(self, o: Pos) -> bool {
        self.dir_to(o).is_some()
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Pos {
    type Output = Pos;
    fn add(self, o: Pos) -> Pos {
        Pos::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Pos {
    type Output = Pos;
    fn sub(self, o: Pos) -> Pos {
        Pos::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Pos {
    type Output = Pos;
    fn neg(self) -> Pos {
        Pos::new(-self.x, -self.y)
    }
}

impl Mul<i64> for Pos {
    type Output = Pos;
    fn mul(self, k: i64) -> Pos {
        Pos::new(self.x * k, self.y * k)
    }
}

/// Index into the canonically ordered tile set.
pub type TileId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TileType {
    pub name: String,
    /// Glue labels indexed by `Dir::index()`; `None` is the null glue.
    pub glues: [Option<String>; 4],
    /// Usable in the seed only.
    pub seed_only: bool,
}

impl TileType {
    pub fn new(name: &str, north: Option<&str>, east: Option<&str>, south: Option<&str>, west: Option<&str>) -> TileType {
        TileType {
            name: name.to_string(),
            glues: [north, east, south, west].map(|g| g.map(str::to_string)),
            seed_only: false,
        }
    }

    pub fn glue(&self, d: Dir) -> Option<&str> {
        self.glues[d.index()].as_deref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tile {
    pub pos: Pos,
    pub ty: TileId,
}

impl Tile {
    pub const fn new(pos: Pos, ty: TileId) -> Tile {
        Tile { pos, ty }
    }

    pub fn shifted(self, v: Pos) -> Tile {
        Tile::new(self.pos + v, self.ty)
    }
}

/// Finite partial map from positions to tile types.
pub type Assembly = BTreeMap<Pos, TileId>;

/// A path is a sequence of tiles; producibility is checked separately.
pub type Path = Vec<Tile>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SystemError {
    #[error("tile set is empty")]
    NoTiles,
    #[error("duplicate tile name `{0}`")]
    DuplicateTile(String),
    #[error("unknown tile name `{0}`")]
    UnknownTile(String),
    #[error("seed is empty")]
    EmptySeed,
    #[error("seed position {0} used twice")]
    SeedOverlap(Pos),
    #[error("seed is not connected")]
    DisconnectedSeed,
    #[error("seed-only tile `{0}` used outside the seed")]
    SeedOnlyTile(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TileSystem {
    tiles: Vec<TileType>,
    seed: Assembly,
    by_name: BTreeMap<String, TileId>,
}

impl TileSystem {
    /// Builds a system; tiles are re-ordered by name.
    pub fn new(mut tiles: Vec<TileType>, seed: &[(Pos, &str)]) -> Result<TileSystem, SystemError> {
        tiles.sort_by(|a, b| a.name.cmp(&b.name));
        if tiles.iter().all(|t| t.seed_only) {
            return Err(SystemError::NoTiles);
        }
        let mut by_name = BTreeMap::new();
        for (k, t) in tiles.iter().enumerate() {
            if by_name.insert(t.name.clone(), k).is_some() {
                return Err(SystemError::DuplicateTile(t.name.clone()));
            }
        }
        let mut asm = Assembly::new();
        for (p, name) in seed {
            let id = *by_name.get(*name).ok_or_else(|| SystemError::UnknownTile(name.to_string()))?;
            if asm.insert(*p, id).is_some() {
                return Err(SystemError::SeedOverlap(*p));
            }
        }
        if asm.is_empty() {
            return Err(SystemError::EmptySeed);
        }
        if !positions_connected(asm.keys().copied()) {
            return Err(SystemError::DisconnectedSeed);
        }
        Ok(TileSystem { tiles, seed: asm, by_name })
    }

    pub fn tiles(&self) -> &[TileType] {
        &self.tiles
    }

    pub fn tile(&self, id: TileId) -> &TileType {
        &self.tiles[id]
    }

    pub fn id(&self, name: &str) -> Option<TileId> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, id: TileId) -> &str {
        &self.tiles[id].name
    }

    pub fn seed(&self) -> &Assembly {
        &self.seed
    }

    /// Number of tile types available for growth, |T|.
    pub fn growth_tile_count(&self) -> usize {
        self.tiles.iter().filter(|t| !t.seed_only).count()
    }

    pub fn growth_tiles(&self) -> impl Iterator<Item = TileId> + '_ {
        self.tiles.iter().enumerate().filter(|(_, t)| !t.seed_only).map(|(k, _)| k)
    }

    /// Whether a tile of type `a` interacts with a tile of type `b` placed on
    /// its `d` side.
    pub fn interacts(&self, a: TileId, d: Dir, b: TileId) -> bool {
        match (self.tiles[a].glue(d), self.tiles[b].glue(d.opposite())) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    pub fn tiles_interact(&self, a: Tile, b: Tile) -> bool {
        a.pos.dir_to(b.pos).is_some_and(|d| self.interacts(a.ty, d, b.ty))
    }

    /// Whether `t` could attach to `asm` (free position, one matching glue).
    pub fn can_attach(&self, asm: &Assembly, t: Tile) -> bool {
        !asm.contains_key(&t.pos)
            && Dir::ALL.iter().any(|&d| {
                asm.get(&t.pos.step(d)).is_some_and(|&n| self.interacts(t.ty, d, n))
            })
    }

    pub fn with_parts(tiles: Vec<TileType>, seed: Assembly) -> TileSystem {
        let by_name = tiles.iter().enumerate().map(|(k, t)| (t.name.clone(), k)).collect();
        TileSystem { tiles, seed, by_name }
    }
}

pub fn positions_connected<I: IntoIterator<Item = Pos>>(it: I) -> bool {
    let set: HashSet<Pos> = it.into_iter().collect();
    let Some(&start) = set.iter().next() else {
        return true;
    };
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        for d in Dir::ALL {
            let q = p.step(d);
            if set.contains(&q) && seen.insert(q) {
                queue.push_back(q);
            }
        }
    }
    seen.len() == set.len()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("path is empty")]
    EmptyPath,
    #[error("tile {0} overlaps the seed")]
    OverlapsSeed(usize),
    #[error("tile {0} does not bind to its predecessor")]
    GlueMismatch(usize),
    #[error("tile {0} repeats an earlier position")]
    NotSimple(usize),
    #[error("first tile does not interact with the seed")]
    SeedDetached,
    #[error("tile {0} has a seed-only type")]
    SeedOnlyType(usize),
}

/// Successful validation; `seed_contacts` lists later tiles that also
/// interact with the seed (informational).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PathReport {
    pub seed_contacts: Vec<usize>,
}

pub fn validate_producible_path(sys: &TileSystem, p: &[Tile]) -> Result<PathReport, PathError> {
    if p.is_empty() {
        return Err(PathError::EmptyPath);
    }
    let seed = sys.seed();
    let mut seen = HashSet::new();
    for (i, t) in p.iter().enumerate() {
        if sys.tile(t.ty).seed_only {
            return Err(PathError::SeedOnlyType(i));
        }
        if seed.contains_key(&t.pos) {
            return Err(PathError::OverlapsSeed(i));
        }
        if !seen.insert(t.pos) {
            return Err(PathError::NotSimple(i));
        }
        if i > 0 && !sys.tiles_interact(p[i - 1], *t) {
            return Err(PathError::GlueMismatch(i));
        }
    }
    let touches_seed = |t: &Tile| {
        Dir::ALL
            .iter()
            .any(|&d| seed.get(&t.pos.step(d)).is_some_and(|&s| sys.interacts(t.ty, d, s)))
    };
    if !touches_seed(&p[0]) {
        return Err(PathError::SeedDetached);
    }
    let seed_contacts = (1..p.len()).filter(|&i| touches_seed(&p[i])).collect();
    Ok(PathReport { seed_contacts })
}

/// σ ∪ asm(P).
pub fn path_assembly(sys: &TileSystem, p: &[Tile]) -> Assembly {
    let mut a = sys.seed().clone();
    a.extend(p.iter().map(|t| (t.pos, t.ty)));
    a
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("attachment {0} does not bind")]
    IllegalAttachment(usize),
    #[error("attachment {0} targets an occupied position")]
    Occupied(usize),
}

pub fn replay_assembly_sequence(sys: &TileSystem, seq: &[Tile]) -> Result<Assembly, ReplayError> {
    let mut asm = sys.seed().clone();
    for (step, t) in seq.iter().enumerate() {
        if asm.contains_key(&t.pos) {
            return Err(ReplayError::Occupied(step));
        }
        if sys.tile(t.ty).seed_only || !sys.can_attach(&asm, *t) {
            return Err(ReplayError::IllegalAttachment(step));
        }
        asm.insert(t.pos, t.ty);
    }
    Ok(asm)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("target is not a non-seed position of the assembly, or is unreachable")]
    BadTarget,
}

/// A producible path ending at `target`, found by breadth-first search of the
/// binding graph from the seed.
pub fn extract_path(sys: &TileSystem, asm: &Assembly, target: Pos) -> Result<Path, ExtractError> {
    let seed = sys.seed();
    if seed.contains_key(&target) || !asm.contains_key(&target) {
        return Err(ExtractError::BadTarget);
    }
    let mut parent: HashMap<Pos, Option<Pos>> = HashMap::new();
    let mut queue = VecDeque::new();
    for (&s, &st) in seed {
        for d in Dir::ALL {
            let q = s.step(d);
            if seed.contains_key(&q) || parent.contains_key(&q) {
                continue;
            }
            if let Some(&qt) = asm.get(&q) {
                if sys.interacts(st, d, qt) {
                    parent.insert(q, None);
                    queue.push_back(q);
                }
            }
        }
    }
    while let Some(p) = queue.pop_front() {
        if p == target {
            break;
        }
        let pt = asm[&p];
        for d in Dir::ALL {
            let q = p.step(d);
            if seed.contains_key(&q) || parent.contains_key(&q) {
                continue;
            }
            if let Some(&qt) = asm.get(&q) {
                if sys.interacts(pt, d, qt) {
                    parent.insert(q, Some(p));
                    queue.push_back(q);
                }
            }
        }
    }
    if !parent.contains_key(&target) {
        return Err(ExtractError::BadTarget);
    }
    let mut out = vec![Tile::new(target, asm[&target])];
    let mut cur = target;
    while let Some(Some(prev)) = parent.get(&cur) {
        out.push(Tile::new(*prev, asm[prev]));
        cur = *prev;
    }
    out.reverse();
    Ok(out)
}

/// A path together with two indices `i < j` defining its pumping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PumpingSpec {
    pub path: Path,
    pub i: usize,
    pub j: usize,
}

impl PumpingSpec {
    pub fn new(path: Path, i: usize, j: usize) -> PumpingSpec {
        PumpingSpec { path, i, j }
    }

    /// The pumping vector from `P_i` to `P_j`, in tile units.
    pub fn vector(&self) -> Pos {
        self.path[self.j].pos - self.path[self.i].pos
    }

    pub fn period(&self) -> usize {
        self.j - self.i
    }
}

/// Term `k` of the ultimately periodic sequence generated by the spec.
pub fn pumping_term(spec: &PumpingSpec, k: usize) -> Tile {
    if k <= spec.i {
        return spec.path[k];
    }
    let m = k - spec.i - 1;
    let (q, r) = (m / spec.period(), m % spec.period());
    spec.path[spec.i + 1 + r].shifted(spec.vector() * q as i64)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PumpCertError {
    #[error("indices {i}, {j} are not valid for a path of length {len}")]
    BadIndices { i: usize, j: usize, len: usize },
    #[error("(a) translated tile {i1} does not interact with tile {j}", i1 = .0 + 1, j = .1)]
    NoInteraction(usize, usize),
    #[error("(b) one period overlaps its translate")]
    PeriodOverlap,
    #[error("(c) period {period} tile {term} collides with the seed or the prefix at {pos}")]
    Collision { period: usize, term: usize, pos: Pos },
}

/// Number of periods checked against σ ∪ P_{0..i}.
pub fn pump_check_periods(sys: &TileSystem, spec: &PumpingSpec) -> usize {
    let pts: Vec<GridPoint> = sys
        .seed()
        .keys()
        .chain(spec.path[..=spec.j].iter().map(|t| &t.pos))
        .map(|p| GridPoint::new(p.x, p.y))
        .collect();
    let w = Window::bounding(pts.iter()).unwrap();
    let diameter = w.width().max(w.height());
    let v = spec.vector();
    let step = v.x.abs().max(v.y.abs());
    (diameter + step - 1).div_euclid(step) as usize + 2
}

pub fn verify_pumpable_cert(sys: &TileSystem, spec: &PumpingSpec) -> Result<(), PumpCertError> {
    let (i, j, p) = (spec.i, spec.j, &spec.path);
    if i >= j || j >= p.len() {
        return Err(PumpCertError::BadIndices { i, j, len: p.len() });
    }
    let v = spec.vector();
    if !sys.tiles_interact(p[j], p[i + 1].shifted(v)) {
        return Err(PumpCertError::NoInteraction(i, j));
    }
    let cells: Vec<GridPoint> = p[i + 1..=j].iter().map(|t| t.pos.center()).collect();
    if !squares_disjoint(&cells, v.doubled()) {
        return Err(PumpCertError::PeriodOverlap);
    }
    let blocked: HashSet<Pos> =
        sys.seed().keys().copied().chain(p[..=i].iter().map(|t| t.pos)).collect();
    let periods = pump_check_periods(sys, spec);
    for period in 0..periods {
        for (r, t) in p[i + 1..=j].iter().enumerate() {
            let q = t.pos + v * period as i64;
            if blocked.contains(&q) {
                return Err(PumpCertError::Collision { period, term: i + 1 + r, pos: q });
            }
        }
    }
    Ok(())
}

/// An assembly sequence from the seed whose final assembly disagrees with a
/// path at `conflict`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FragilityCert {
    pub attachments: Vec<Tile>,
    pub conflict: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FragileCertError {
    #[error("replay failed: {0}")]
    Replay(#[from] ReplayError),
    #[error("conflict position {0} is not on the path or not in the assembly")]
    NotOnPath(Pos),
    #[error("assembly agrees with the path at the conflict position")]
    NoConflict,
}

pub fn verify_fragile_cert(sys: &TileSystem, p: &[Tile], cert: &FragilityCert) -> Result<(), FragileCertError> {
    let asm = replay_assembly_sequence(sys, &cert.attachments)?;
    let on_path = p.iter().find(|t| t.pos == cert.conflict);
    match (on_path, asm.get(&cert.conflict)) {
        (Some(t), Some(&a)) if a != t.ty => Ok(()),
        (Some(_), Some(_)) => Err(FragileCertError::NoConflict),
        _ => Err(FragileCertError::NotOnPath(cert.conflict)),
    }
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
    fn unit_paths() {
        let u = unit();
        assert!(validate_producible_path(&u, &line(2)).is_ok());
        let mut p = line(2);
        p[1].pos = Pos::new(0, 0);
        assert_eq!(validate_producible_path(&u, &p), Err(PathError::OverlapsSeed(1)));
        assert_eq!(validate_producible_path(&u, &[]), Err(PathError::EmptyPath));
        let far = vec![Tile::new(Pos::new(3, 3), 0)];
        assert_eq!(validate_producible_path(&u, &far), Err(PathError::SeedDetached));
    }

    #[test]
    fn glue_mismatch_reports_index() {
        let sys = TileSystem::new(
            vec![
                TileType::new("A", None, Some("g"), None, Some("g")),
                TileType::new("B", None, None, None, Some("h")),
            ],
            &[(Pos::new(0, 0), "A")],
        )
        .unwrap();
        let p = vec![Tile::new(Pos::new(1, 0), 0), Tile::new(Pos::new(2, 0), 1)];
        assert_eq!(validate_producible_path(&sys, &p), Err(PathError::GlueMismatch(1)));
    }

    #[test]
    fn replay_examples() {
        let u = unit();
        assert_eq!(replay_assembly_sequence(&u, &[Tile::new(Pos::new(1, 0), 0)]).unwrap().len(), 2);
        assert_eq!(
            replay_assembly_sequence(&u, &[Tile::new(Pos::new(5, 5), 0)]),
            Err(ReplayError::IllegalAttachment(0))
        );
        assert_eq!(
            replay_assembly_sequence(&u, &[Tile::new(Pos::new(0, 0), 0)]),
            Err(ReplayError::Occupied(0))
        );
    }

    #[test]
    fn extract_examples() {
        let sys = TileSystem::new(
            vec![TileType::new("A", Some("s"), Some("g"), Some("s"), Some("g"))],
            &[(Pos::new(0, 0), "A")],
        )
        .unwrap();
        let asm = replay_assembly_sequence(&sys, &[Tile::new(Pos::new(1, 0), 0), Tile::new(Pos::new(1, 1), 0)]).unwrap();
        let p = extract_path(&sys, &asm, Pos::new(1, 1)).unwrap();
        assert_eq!(p.last().unwrap().pos, Pos::new(1, 1));
        assert!(validate_producible_path(&sys, &p).is_ok());
        assert_eq!(extract_path(&sys, &asm, Pos::new(0, 0)), Err(ExtractError::BadTarget));
    }

    #[test]
    fn pumping_terms_on_a_line() {
        let spec = PumpingSpec::new(line(3), 0, 1);
        assert_eq!(pumping_term(&spec, 4), Tile::new(Pos::new(5, 0), 0));
        for k in 0..20 {
            assert_eq!(pumping_term(&spec, k + 1).pos - pumping_term(&spec, k).pos, Pos::new(1, 0));
        }
        assert_eq!(verify_pumpable_cert(&unit(), &spec), Ok(()));
    }

    #[test]
    fn u_turn_period_overlaps() {
        let sys = TileSystem::new(
            vec![TileType::new("A", Some("g"), Some("g"), Some("g"), Some("g"))],
            &[(Pos::new(0, 0), "A")],
        )
        .unwrap();
        let p: Path = [(1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (1, 1)]
            .iter()
            .map(|&(x, y)| Tile::new(Pos::new(x, y), 0))
            .collect();
        let spec = PumpingSpec::new(p, 0, 5);
        assert_eq!(verify_pumpable_cert(&sys, &spec), Err(PumpCertError::PeriodOverlap));
    }

    #[test]
    fn fragile_cert_checks() {
        let u = unit();
        let p = line(2);
        let same = FragilityCert { attachments: vec![Tile::new(Pos::new(1, 0), 0)], conflict: Pos::new(1, 0) };
        assert_eq!(verify_fragile_cert(&u, &p, &same), Err(FragileCertError::NoConflict));
        let bad = FragilityCert { attachments: vec![Tile::new(Pos::new(4, 4), 0)], conflict: Pos::new(1, 0) };
        assert_eq!(
            verify_fragile_cert(&u, &p, &bad),
            Err(FragileCertError::Replay(ReplayError::IllegalAttachment(0)))
        );
    }
}
