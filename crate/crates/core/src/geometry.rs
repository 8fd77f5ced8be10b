// SPDX-License-Identifier: Apache-2.0
//! Exact integer geometry on the doubled lattice.
//!
//! Tile `(x, y)` lives at `(2x, 2y)`; a glue midpoint has exactly one odd
//! coordinate. Every curve handled here is axis-aligned with vertices on
//! this lattice, so two curves meet iff their unit-step rasterizations share
//! a lattice point.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("path is empty")]
    EmptyPath,
    #[error("curve is not simple")]
    NonSimpleCurve,
    #[error("points are not adjacent")]
    NotAdjacent,
    #[error("curve does not start on the reference curve")]
    NotOnCurve,
    #[error("zero translation vector")]
    ZeroVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GridPoint {
    pub x: i64,
    pub y: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Displacement {
    pub dx: i64,
    pub dy: i64,
}

impl GridPoint {
    pub const fn new(x: i64, y: i64) -> Self {
        GridPoint { x, y }
    }

    /// Center of the tile at tile coordinates `(x, y)`.
    pub const fn tile(x: i64, y: i64) -> Self {
        GridPoint { x: 2 * x, y: 2 * y }
    }

    pub fn is_tile_center(self) -> bool {
        self.x.rem_euclid(2) == 0 && self.y.rem_euclid(2) == 0
    }

    pub fn scaled(self, s: i64) -> Self {
        GridPoint::new(self.x * s, self.y * s)
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Displacement {
    pub const fn new(dx: i64, dy: i64) -> Self {
        Displacement { dx, dy }
    }

    pub fn is_zero(self) -> bool {
        self.dx == 0 && self.dy == 0
    }

    /// Clockwise quarter turn, `(x, y) -> (y, -x)`.
    pub fn rotate_cw(self) -> Self {
        Displacement::new(self.dy, -self.dx)
    }

    pub fn signum(self) -> Self {
        Displacement::new(self.dx.signum(), self.dy.signum())
    }

    pub fn linf(self) -> i64 {
        self.dx.abs().max(self.dy.abs())
    }
}

impl fmt::Display for Displacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.dx, self.dy)
    }
}

impl Add<Displacement> for GridPoint {
    type Output = GridPoint;
    fn add(self, v: Displacement) -> GridPoint {
        GridPoint::new(self.x + v.dx, self.y + v.dy)
    }
}

impl AddAssign<Displacement> for GridPoint {
    fn add_assign(&mut self, v: Displacement) {
        self.x += v.dx;
        self.y += v.dy;
    }
}

impl Sub<Displacement> for GridPoint {
    type Output = GridPoint;
    fn sub(self, v: Displacement) -> GridPoint {
        GridPoint::new(self.x - v.dx, self.y - v.dy)
    }
}

impl Sub for GridPoint {
    type Output = Displacement;
    fn sub(self, o: GridPoint) -> Displacement {
        Displacement::new(self.x - o.x, self.y - o.y)
    }
}

impl Add for Displacement {
    type Output = Displacement;
    fn add(self, o: Displacement) -> Displacement {
        Displacement::new(self.dx + o.dx, self.dy + o.dy)
    }
}

impl Neg for Displacement {
    type Output = Displacement;
    fn neg(self) -> Displacement {
        Displacement::new(-self.dx, -self.dy)
    }
}

impl Mul<i64> for Displacement {
    type Output = Displacement;
    fn mul(self, k: i64) -> Displacement {
        Displacement::new(self.dx * k, self.dy * k)
    }
}

/// Compass direction; also names the four sides of a tile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    North,
    East,
    South,
    West,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::North, Dir::East, Dir::South, Dir::West];

    /// Unit step on the doubled lattice.
    pub fn unit(self) -> Displacement {
        match self {
            Dir::North => Displacement::new(0, 1),
            Dir::East => Displacement::new(1, 0),
            Dir::South => Displacement::new(0, -1),
            Dir::West => Displacement::new(-1, 0),
        }
    }

    pub fn opposite(self) -> Dir {
        match self {
            Dir::North => Dir::South,
            Dir::East => Dir::West,
            Dir::South => Dir::North,
            Dir::West => Dir::East,
        }
    }

    pub fn cw(self) -> Dir {
        match self {
            Dir::North => Dir::East,
            Dir::East => Dir::South,
            Dir::South => Dir::West,
            Dir::West => Dir::North,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn of(d: Displacement) -> Option<Dir> {
        match (d.dx.signum(), d.dy.signum()) {
            (0, 1) => Some(Dir::North),
            (1, 0) => Some(Dir::East),
            (0, -1) => Some(Dir::South),
            (-1, 0) => Some(Dir::West),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dir::North => "north",
            Dir::East => "east",
            Dir::South => "south",
            Dir::West => "west",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    OnCurve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Turn {
    Left,
    Right,
    Same,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Heading {
    North,
    South,
    East,
    West,
    DiagNe,
    DiagSw,
    Along(Displacement),
}

/// A ray given symbolically by its start and heading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VRay {
    pub start: GridPoint,
    pub heading: Heading,
}

impl VRay {
    pub fn new(start: GridPoint, heading: Heading) -> Self {
        VRay { start, heading }
    }

    pub fn step(&self) -> Displacement {
        match self.heading {
            Heading::North => Dir::North.unit(),
            Heading::South => Dir::South.unit(),
            Heading::East => Dir::East.unit(),
            Heading::West => Dir::West.unit(),
            Heading::DiagNe => Displacement::new(1, 1),
            Heading::DiagSw => Displacement::new(-1, -1),
            Heading::Along(v) => v,
        }
    }

    pub fn translated(&self, v: Displacement) -> VRay {
        VRay::new(self.start + v, self.heading)
    }
}

/// Axis-aligned rectangle of lattice points, bounds inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub xmin: i64,
    pub xmax: i64,
    pub ymin: i64,
    pub ymax: i64,
}

impl Window {
    pub fn new(xmin: i64, xmax: i64, ymin: i64, ymax: i64) -> Self {
        Window { xmin, xmax, ymin, ymax }
    }

    pub fn bounding<'a, I: IntoIterator<Item = &'a GridPoint>>(pts: I) -> Option<Window> {
        let mut it = pts.into_iter();
        let first = it.next()?;
        let mut w = Window::new(first.x, first.x, first.y, first.y);
        for p in it {
            w.include(*p);
        }
        Some(w)
    }

    pub fn include(&mut self, p: GridPoint) {
        self.xmin = self.xmin.min(p.x);
        self.xmax = self.xmax.max(p.x);
        self.ymin = self.ymin.min(p.y);
        self.ymax = self.ymax.max(p.y);
    }

    pub fn union(self, o: Window) -> Window {
        Window::new(
            self.xmin.min(o.xmin),
            self.xmax.max(o.xmax),
            self.ymin.min(o.ymin),
            self.ymax.max(o.ymax),
        )
    }

    pub fn grow(self, m: i64) -> Window {
        Window::new(self.xmin - m, self.xmax + m, self.ymin - m, self.ymax + m)
    }

    pub fn contains(&self, p: GridPoint) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    pub fn width(&self) -> i64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> i64 {
        self.ymax - self.ymin
    }

    pub fn points(&self) -> impl Iterator<Item = GridPoint> + '_ {
        (self.ymin..=self.ymax)
            .flat_map(move |y| (self.xmin..=self.xmax).map(move |x| GridPoint::new(x, y)))
    }
}

/// Polygonal curve: optional south ray ending at the first vertex, a vertex
/// chain with axis-aligned steps, optional north ray leaving the last vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PolyCurve {
    pub south_ray: bool,
    pub vertices: Vec<GridPoint>,
    pub north_ray: bool,
}

impl PolyCurve {
    pub fn finite(vertices: Vec<GridPoint>) -> Self {
        let mut c = PolyCurve::default();
        for v in vertices {
            c.push(v);
        }
        c
    }

    pub fn almost_vertical(vertices: Vec<GridPoint>) -> Self {
        let mut c = PolyCurve::finite(vertices);
        c.south_ray = true;
        c.north_ray = true;
        c
    }

    /// The curve `rev(l)` for a south ray `l` starting at `p`: it arrives
    /// from below and stops at `p`.
    pub fn from_south(p: GridPoint) -> Self {
        PolyCurve { south_ray: true, vertices: vec![p], north_ray: false }
    }

    /// Appends a vertex, dropping it if it repeats the current last vertex.
    pub fn push(&mut self, p: GridPoint) {
        if let Some(&last) = self.vertices.last() {
            if last == p {
                return;
            }
            debug_assert!(
                last.x == p.x || last.y == p.y,
                "non axis-aligned step {last} -> {p}"
            );
        }
        self.vertices.push(p);
    }

    pub fn append(&mut self, other: &PolyCurve) {
        debug_assert!(!self.north_ray && !other.south_ray);
        for &p in &other.vertices {
            self.push(p);
        }
        self.north_ray = other.north_ray;
    }

    pub fn then(mut self, other: &PolyCurve) -> PolyCurve {
        self.append(other);
        self
    }

    pub fn with_north_ray(mut self) -> PolyCurve {
        self.north_ray = true;
        self
    }

    pub fn translated(&self, v: Displacement) -> PolyCurve {
        PolyCurve {
            south_ray: self.south_ray,
            vertices: self.vertices.iter().map(|&p| p + v).collect(),
            north_ray: self.north_ray,
        }
    }

    pub fn scaled(&self, s: i64) -> PolyCurve {
        PolyCurve {
            south_ray: self.south_ray,
            vertices: self.vertices.iter().map(|&p| p.scaled(s)).collect(),
            north_ray: self.north_ray,
        }
    }

    pub fn first(&self) -> Option<GridPoint> {
        self.vertices.first().copied()
    }

    pub fn last(&self) -> Option<GridPoint> {
        self.vertices.last().copied()
    }

    pub fn is_almost_vertical(&self) -> bool {
        self.south_ray && self.north_ray && !self.vertices.is_empty()
    }

    /// Unit-step rasterization of the finite part, and for each raster point
    /// the index of the vertex segment it was produced from.
    pub fn raster_with_segments(&self) -> (Vec<GridPoint>, Vec<usize>) {
        let mut pts = Vec::new();
        let mut seg = Vec::new();
        if let Some(&p0) = self.vertices.first() {
            pts.push(p0);
            seg.push(0);
        }
        for (k, w) in self.vertices.windows(2).enumerate() {
            let d = (w[1] - w[0]).signum();
            let mut p = w[0];
            while p != w[1] {
                p += d;
                pts.push(p);
                seg.push(k + 1);
            }
        }
        (pts, seg)
    }

    pub fn raster(&self) -> Vec<GridPoint> {
        self.raster_with_segments().0
    }

    /// Bounding window of the finite part.
    pub fn finite_window(&self) -> Option<Window> {
        Window::bounding(self.vertices.iter())
    }

    /// Point-set simplicity test, rays included.
    pub fn is_simple(&self) -> bool {
        let pts = self.raster();
        let mut seen = HashSet::with_capacity(pts.len());
        for p in &pts {
            if !seen.insert(*p) {
                return false;
            }
        }
        let (Some(first), Some(last)) = (self.first(), self.last()) else {
            return true;
        };
        if self.south_ray && pts.iter().any(|p| p.x == first.x && p.y < first.y) {
            return false;
        }
        if self.north_ray && pts.iter().any(|p| p.x == last.x && p.y > last.y) {
            return false;
        }
        true
    }

    /// Lattice points of the curve inside `w`, rays clipped to `w`.
    pub fn points_in(&self, w: &Window) -> Vec<GridPoint> {
        let mut out: Vec<GridPoint> = self.raster().into_iter().filter(|p| w.contains(*p)).collect();
        if let (true, Some(f)) = (self.south_ray, self.first()) {
            for y in w.ymin..f.y.min(w.ymax + 1) {
                let p = GridPoint::new(f.x, y);
                if w.contains(p) {
                    out.push(p);
                }
            }
        }
        if let (true, Some(l)) = (self.north_ray, self.last()) {
            for y in (l.y + 1).max(w.ymin)..=w.ymax {
                let p = GridPoint::new(l.x, y);
                if w.contains(p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Unit segments of the curve whose both ends lie in `w`, in curve order,
    /// with rays clipped to `w`.
    pub fn unit_segments_in(&self, w: &Window) -> Vec<(GridPoint, GridPoint)> {
        let mut out = Vec::new();
        let pts = self.raster();
        if let (true, Some(f)) = (self.south_ray, self.first()) {
            let mut y = w.ymin;
            while y < f.y {
                let a = GridPoint::new(f.x, y);
                let b = GridPoint::new(f.x, y + 1);
                if w.contains(a) && w.contains(b) {
                    out.push((a, b));
                }
                y += 1;
            }
        }
        for s in pts.windows(2) {
            if w.contains(s[0]) && w.contains(s[1]) {
                out.push((s[0], s[1]));
            }
        }
        if let (true, Some(l)) = (self.north_ray, self.last()) {
            let mut y = l.y;
            while y < w.ymax {
                let a = GridPoint::new(l.x, y);
                let b = GridPoint::new(l.x, y + 1);
                if w.contains(a) && w.contains(b) {
                    out.push((a, b));
                }
                y += 1;
            }
        }
        out
    }
}

/// Embedding of a sequence of tile centers.
pub fn embed_path(centers: &[GridPoint]) -> Result<PolyCurve, GeometryError> {
    if centers.is_empty() {
        return Err(GeometryError::EmptyPath);
    }
    Ok(PolyCurve::finite(centers.to_vec()))
}

/// Classifies `candidate` against `taken` at `cur`, coming from `prev`.
///
/// Candidates are ordered by the clockwise sequence starting after the
/// reversed incoming direction; a later candidate turns right of an earlier one.
pub fn turn_right_of_path(
    prev: GridPoint,
    cur: GridPoint,
    taken: GridPoint,
    candidate: GridPoint,
) -> Result<Turn, GeometryError> {
    let w = unit_dir(prev - cur)?;
    let t = unit_dir(taken - cur)?;
    let c = unit_dir(candidate - cur)?;
    if t == w || c == w {
        return Err(GeometryError::NotAdjacent);
    }
    if t == c {
        return Ok(Turn::Same);
    }
    let rank = |d: Dir| {
        let mut x = w;
        let mut r = 0;
        while x != d {
            x = x.cw();
            r += 1;
        }
        r
    };
    Ok(if rank(c) > rank(t) { Turn::Right } else { Turn::Left })
}

fn unit_dir(d: Displacement) -> Result<Dir, GeometryError> {
    if d.dx != 0 && d.dy != 0 {
        return Err(GeometryError::NotAdjacent);
    }
    Dir::of(d).ok_or(GeometryError::NotAdjacent)
}

/// True when direction `e` leaving a curve vertex lies strictly on the right
/// of a curve arriving from direction `from` and leaving toward `to`.
fn leaves_right(from: Dir, to: Dir, e: Dir) -> bool {
    let mut d = to.cw();
    while d != from {
        if d == e {
            return true;
        }
        d = d.cw();
    }
    false
}

/// Side oracle for one simple almost-vertical curve.
#[derive(Debug, Clone)]
pub struct CurveIndex {
    curve: PolyCurve,
    pts: Vec<GridPoint>,
    at: HashMap<GridPoint, usize>,
    /// Vertical unit edges keyed by their lower y, sorted by x.
    rows: HashMap<i64, Vec<i64>>,
    south: GridPoint,
    north: GridPoint,
}

impl CurveIndex {
    pub fn new(curve: &PolyCurve) -> Result<CurveIndex, GeometryError> {
        if !curve.is_almost_vertical() || !curve.is_simple() {
            return Err(GeometryError::NonSimpleCurve);
        }
        let pts = curve.raster();
        let at = pts.iter().enumerate().map(|(k, p)| (*p, k)).collect();
        let mut rows: HashMap<i64, Vec<i64>> = HashMap::new();
        for s in pts.windows(2) {
            if s[0].x == s[1].x {
                rows.entry(s[0].y.min(s[1].y)).or_default().push(s[0].x);
            }
        }
        for xs in rows.values_mut() {
            xs.sort_unstable();
        }
        Ok(CurveIndex {
            curve: curve.clone(),
            south: pts[0],
            north: *pts.last().unwrap(),
            pts,
            at,
            rows,
        })
    }

    pub fn curve(&self) -> &PolyCurve {
        &self.curve
    }

    pub fn raster(&self) -> &[GridPoint] {
        &self.pts
    }

    pub fn finite_window(&self) -> Window {
        Window::bounding(self.pts.iter()).unwrap()
    }

    pub fn on_curve(&self, p: GridPoint) -> bool {
        self.at.contains_key(&p)
            || (p.x == self.south.x && p.y < self.south.y)
            || (p.x == self.north.x && p.y > self.north.y)
    }

    /// Direction toward the preceding and following curve point at `p`.
    fn local_dirs(&self, p: GridPoint) -> (Dir, Dir) {
        if let Some(&k) = self.at.get(&p) {
            let from = if k == 0 { Dir::South } else { Dir::of(self.pts[k - 1] - p).unwrap() };
            let to = if k + 1 == self.pts.len() { Dir::North } else { Dir::of(self.pts[k + 1] - p).unwrap() };
            (from, to)
        } else {
            (Dir::South, Dir::North)
        }
    }

    fn is_edge(&self, a: GridPoint, b: GridPoint) -> bool {
        match (self.at.get(&a), self.at.get(&b)) {
            (Some(&i), Some(&j)) => i.abs_diff(j) == 1,
            _ => {
                let on_south = |p: GridPoint| p.x == self.south.x && p.y <= self.south.y;
                let on_north = |p: GridPoint| p.x == self.north.x && p.y >= self.north.y;
                (on_south(a) && on_south(b)) || (on_north(a) && on_north(b))
            }
        }
    }

    /// Side of a lattice point by horizontal ray parity just above `p`.
    pub fn classify(&self, p: GridPoint) -> Side {
        if self.on_curve(p) {
            return Side::OnCurve;
        }
        let mut crossings = 0usize;
        if let Some(xs) = self.rows.get(&p.y) {
            crossings += xs.len() - xs.partition_point(|&x| x <= p.x);
        }
        if self.south.x > p.x && p.y < self.south.y {
            crossings += 1;
        }
        if self.north.x > p.x && p.y >= self.north.y {
            crossings += 1;
        }
        if crossings % 2 == 1 {
            Side::Left
        } else {
            Side::Right
        }
    }

    /// Side of the open unit segment `a`-`b`.
    pub fn segment_side(&self, a: GridPoint, b: GridPoint) -> Side {
        let (ca, cb) = (self.on_curve(a), self.on_curve(b));
        if ca && cb && self.is_edge(a, b) {
            return Side::OnCurve;
        }
        if !ca {
            return self.classify(a);
        }
        if !cb {
            return self.classify(b);
        }
        let (from, to) = self.local_dirs(a);
        let e = Dir::of(b - a).expect("unit segment");
        if leaves_right(from, to, e) {
            Side::Right
        } else {
            Side::Left
        }
    }
}

/// Side of `p` relative to a simple almost-vertical curve.
pub fn classify_side(curve: &PolyCurve, p: GridPoint) -> Result<Side, GeometryError> {
    Ok(CurveIndex::new(curve)?.classify(p))
}

/// Independent side oracle: parity of transversal crossings of the
/// north-east diagonal ray from `p`.
pub fn diagonal_parity_side(curve: &PolyCurve, p: GridPoint) -> Result<Side, GeometryError> {
    if !curve.is_almost_vertical() || !curve.is_simple() {
        return Err(GeometryError::NonSimpleCurve);
    }
    let pts = curve.raster();
    let first = pts[0];
    let last = *pts.last().unwrap();
    if pts.contains(&p)
        || (p.x == first.x && p.y < first.y)
        || (p.x == last.x && p.y > last.y)
    {
        return Ok(Side::OnCurve);
    }
    // Negative when the step points below the diagonal line through the point.
    let below = |d: Displacement| d.dy - d.dx < 0;
    let diag = p.x - p.y;
    let mut crossings = 0usize;
    for (k, q) in pts.iter().enumerate() {
        if q.x <= p.x || q.x - q.y != diag {
            continue;
        }
        let prev = if k == 0 { Dir::South.unit() } else { pts[k - 1] - *q };
        let next = if k + 1 == pts.len() { Dir::North.unit() } else { pts[k + 1] - *q };
        if below(prev) != below(next) {
            crossings += 1;
        }
    }
    if first.x > p.x && p.y + (first.x - p.x) < first.y {
        crossings += 1;
    }
    if last.x > p.x && p.y + (last.x - p.x) > last.y {
        crossings += 1;
    }
    Ok(if crossings % 2 == 1 { Side::Left } else { Side::Right })
}

/// Where `d` first leaves `c`: the index of the vertex of `d` ending the
/// departing segment (`d.vertices.len()` for the trailing ray) and the side.
pub fn first_departure(
    d: &PolyCurve,
    c: &PolyCurve,
) -> Result<Option<(usize, Side)>, GeometryError> {
    let idx = CurveIndex::new(c)?;
    let first = d.first().ok_or(GeometryError::EmptyPath)?;
    if !idx.on_curve(first) {
        return Err(GeometryError::NotOnCurve);
    }
    let (pts, seg) = d.raster_with_segments();
    for t in 1..pts.len() {
        let s = idx.segment_side(pts[t - 1], pts[t]);
        if s != Side::OnCurve {
            return Ok(Some((seg[t], s)));
        }
    }
    if d.north_ray {
        let last = *pts.last().unwrap();
        let top = idx.finite_window().ymax.max(last.y) + 1;
        let mut y = last.y;
        while y < top {
            let s = idx.segment_side(GridPoint::new(last.x, y), GridPoint::new(last.x, y + 1));
            if s != Side::OnCurve {
                return Ok(Some((d.vertices.len(), s)));
            }
            y += 1;
        }
    }
    Ok(None)
}

/// Closed region bounded by a simple almost-vertical curve.
#[derive(Debug, Clone)]
pub struct Region {
    pub side: Side,
    index: CurveIndex,
}

impl Region {
    pub fn new(boundary: &PolyCurve, side: Side) -> Result<Region, GeometryError> {
        debug_assert!(side != Side::OnCurve);
        Ok(Region { side, index: CurveIndex::new(boundary)? })
    }

    pub fn right_of(boundary: &PolyCurve) -> Result<Region, GeometryError> {
        Region::new(boundary, Side::Right)
    }

    pub fn boundary(&self) -> &PolyCurve {
        self.index.curve()
    }

    pub fn index(&self) -> &CurveIndex {
        &self.index
    }

    pub fn window(&self) -> Window {
        self.index.finite_window().grow(2)
    }

    pub fn contains(&self, p: GridPoint) -> bool {
        let s = self.index.classify(p);
        s == Side::OnCurve || s == self.side
    }

    pub fn contains_strictly(&self, p: GridPoint) -> bool {
        self.index.classify(p) == self.side
    }

    /// Whether the open unit segment `a`-`b` lies in the closed region.
    pub fn contains_segment(&self, a: GridPoint, b: GridPoint) -> bool {
        let s = self.index.segment_side(a, b);
        s == Side::OnCurve || s == self.side
    }

    /// Whether the whole curve (points and open unit segments) lies in the
    /// closed region.
    pub fn contains_curve(&self, c: &PolyCurve) -> bool {
        let w = self.test_window(c);
        c.points_in(&w).into_iter().all(|p| self.contains(p))
            && c.unit_segments_in(&w).into_iter().all(|(a, b)| self.contains_segment(a, b))
    }

    /// Lattice points and unit segments of `c` that lie on the boundary.
    pub fn meets_boundary(&self, c: &PolyCurve) -> Vec<GridPoint> {
        let w = self.test_window(c);
        let mut out: Vec<GridPoint> =
            c.points_in(&w).into_iter().filter(|p| self.index.on_curve(*p)).collect();
        out.sort();
        out.dedup();
        out
    }

    fn test_window(&self, c: &PolyCurve) -> Window {
        let mut w = self.window();
        if let Some(cw) = c.finite_window() {
            w = w.union(cw.grow(2));
        }
        w
    }
}

/// Whether two curves share a point, rays clipped to the joint window.
pub fn curves_meet(a: &PolyCurve, b: &PolyCurve) -> Vec<GridPoint> {
    let mut w = match (a.finite_window(), b.finite_window()) {
        (Some(x), Some(y)) => x.union(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => return Vec::new(),
    };
    w = w.grow(2);
    let pa: HashSet<GridPoint> = a.points_in(&w).into_iter().collect();
    let mut out: Vec<GridPoint> = b.points_in(&w).into_iter().filter(|p| pa.contains(p)).collect();
    out.sort();
    out.dedup();
    out
}

/// Whether `cells` and `cells + v` are disjoint; when they are, they stay
/// disjoint under `c·v` for every nonzero integer `c`.
pub fn precious_check(cells: &[GridPoint], v: Displacement, c: i64) -> Result<bool, GeometryError> {
    if v.is_zero() || c == 0 {
        return Err(GeometryError::ZeroVector);
    }
    Ok(squares_disjoint(cells, v))
}

/// Whether the side-2 squares centered at `cells` have interiors disjoint
/// from those of their translates by `v`.
pub fn squares_disjoint(cells: &[GridPoint], v: Displacement) -> bool {
    if v.dx % 2 == 0 && v.dy % 2 == 0 {
        let set: HashSet<GridPoint> = cells.iter().copied().collect();
        return cells.iter().all(|p| !set.contains(&(*p + v)));
    }
    cells
        .iter()
        .all(|a| cells.iter().all(|b| ((*b + v).x - a.x).abs() >= 2 || ((*b + v).y - a.y).abs() >= 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vline(x: i64) -> PolyCurve {
        PolyCurve::almost_vertical(vec![GridPoint::new(x, 0)])
    }

    #[test]
    fn straight_cut_sides() {
        let c = vline(1);
        assert_eq!(classify_side(&c, GridPoint::new(4, 0)).unwrap(), Side::Right);
        assert_eq!(classify_side(&c, GridPoint::new(-4, 0)).unwrap(), Side::Left);
        assert_eq!(classify_side(&c, GridPoint::new(1, 7)).unwrap(), Side::OnCurve);
        assert_eq!(classify_side(&c, GridPoint::new(1, -7)).unwrap(), Side::OnCurve);
    }

    #[test]
    fn turn_examples() {
        let (p, c) = (GridPoint::new(0, 0), GridPoint::new(0, 2));
        let (e, w) = (GridPoint::new(2, 2), GridPoint::new(-2, 2));
        assert_eq!(turn_right_of_path(p, c, e, w).unwrap(), Turn::Left);
        assert_eq!(turn_right_of_path(p, c, w, e).unwrap(), Turn::Right);
        assert_eq!(turn_right_of_path(p, c, e, e).unwrap(), Turn::Same);
        assert_eq!(
            turn_right_of_path(p, c, GridPoint::new(2, 4), w),
            Err(GeometryError::NotAdjacent)
        );
    }

    #[test]
    fn embed_examples() {
        assert_eq!(embed_path(&[]), Err(GeometryError::EmptyPath));
        let c = embed_path(&[GridPoint::tile(0, 0), GridPoint::tile(0, 1), GridPoint::tile(1, 1)]).unwrap();
        assert_eq!(c.vertices, vec![GridPoint::new(0, 0), GridPoint::new(0, 2), GridPoint::new(2, 2)]);
        assert_eq!(c.raster().len(), 5);
    }

    #[test]
    fn departure_examples() {
        let c = vline(1);
        let d = PolyCurve::finite(vec![GridPoint::new(1, 0), GridPoint::new(3, 0)]);
        assert_eq!(first_departure(&d, &c).unwrap(), Some((1, Side::Right)));
        let along = PolyCurve::finite(vec![GridPoint::new(1, 0), GridPoint::new(1, 5)]);
        assert_eq!(first_departure(&along, &c).unwrap(), None);
        let off = PolyCurve::finite(vec![GridPoint::new(2, 0)]);
        assert_eq!(first_departure(&off, &c), Err(GeometryError::NotOnCurve));
    }

    #[test]
    fn departure_from_a_corner() {
        // c runs north, turns east at (1,2), then north again at (5,2).
        let c = PolyCurve::almost_vertical(vec![
            GridPoint::new(1, 0),
            GridPoint::new(1, 2),
            GridPoint::new(5, 2),
        ]);
        let up = PolyCurve::finite(vec![GridPoint::new(3, 2), GridPoint::new(3, 4)]);
        assert_eq!(first_departure(&up, &c).unwrap(), Some((1, Side::Left)));
        let down = PolyCurve::finite(vec![GridPoint::new(3, 2), GridPoint::new(3, 0)]);
        assert_eq!(first_departure(&down, &c).unwrap(), Some((1, Side::Right)));
    }

    #[test]
    fn precious_examples() {
        let one = [GridPoint::new(0, 0)];
        assert!(precious_check(&one, Displacement::new(4, 0), 5).unwrap());
        let two = [GridPoint::new(0, 0), GridPoint::new(4, 0)];
        assert!(!precious_check(&two, Displacement::new(4, 0), 1).unwrap());
        assert_eq!(precious_check(&one, Displacement::new(0, 0), 1), Err(GeometryError::ZeroVector));
    }

    #[test]
    fn non_simple_curve_rejected() {
        let c = PolyCurve::almost_vertical(vec![
            GridPoint::new(0, 0),
            GridPoint::new(0, 2),
            GridPoint::new(2, 2),
            GridPoint::new(2, 0),
            GridPoint::new(0, 0),
        ]);
        assert_eq!(classify_side(&c, GridPoint::new(9, 9)), Err(GeometryError::NonSimpleCurve));
        let ray_hit = PolyCurve::almost_vertical(vec![
            GridPoint::new(0, 0),
            GridPoint::new(2, 0),
            GridPoint::new(2, -2),
            GridPoint::new(0, -2),
            GridPoint::new(-2, -2),
        ]);
        assert!(!ray_hit.is_simple());
    }

    #[test]
    fn diagonal_matches_on_a_hook() {
        let c = PolyCurve::almost_vertical(vec![
            GridPoint::new(0, 0),
            GridPoint::new(0, 4),
            GridPoint::new(6, 4),
            GridPoint::new(6, -2),
            GridPoint::new(3, -2),
            GridPoint::new(3, -4),
            GridPoint::new(8, -4),
        ]);
        let idx = CurveIndex::new(&c).unwrap();
        for p in Window::new(-4, 12, -6, 8).points() {
            assert_eq!(idx.classify(p), diagonal_parity_side(&c, p).unwrap(), "at {p}");
        }
    }
}
