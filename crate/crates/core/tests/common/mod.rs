// SPDX-License-Identifier: Apache-2.0
//! Test-side checks written against raw tile glues and positions, shared by
//! the property suites and the acceptance harness.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};

use pumpkit::analysis::{check_glue_east, check_glue_side, last_tile_unique_extreme};
use pumpkit::driver::{Op, Transform};
use pumpkit::geometry::{Dir, Displacement, GridPoint, Window};
use pumpkit::io::parse_system;
use pumpkit::oracle::{floodfill_sides, random_almost_vertical, CorpusInstance, EnumBudget};
use pumpkit::shield::{enumerate_shields, pump_or_block_with, EngineConfig, EngineError, ShieldOutcome};
use pumpkit::tam::{FragilityCert, Path, Pos, PumpingSpec, Tile, TileSystem};
use rand::Rng;

const NEIGHBORS: [(i64, i64, usize, usize); 4] = [(0, 1, 0, 2), (1, 0, 1, 3), (0, -1, 2, 0), (-1, 0, 3, 1)];

pub fn fixture(name: &str) -> (TileSystem, Path) {
    let text = std::fs::read_to_string(format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap();
    let f = parse_system(&text).unwrap();
    (f.sys, f.path.unwrap())
}

fn binds(sys: &TileSystem, a: Tile, b: Tile) -> bool {
    NEIGHBORS.iter().any(|&(dx, dy, side, opp)| {
        b.pos == Pos::new(a.pos.x + dx, a.pos.y + dy) && {
            let (ga, gb) = (&sys.tiles()[a.ty].glues[side], &sys.tiles()[b.ty].glues[opp]);
            ga.is_some() && ga == gb
        }
    })
}

/// Temperature-1 replay of the attachments, ending on a tile that differs
/// from the path at the conflict position.
pub fn replay_conflicts(sys: &TileSystem, path: &[Tile], cert: &FragilityCert) -> bool {
    let mut asm: HashMap<Pos, Tile> = sys.seed().iter().map(|(&p, &ty)| (p, Tile::new(p, ty))).collect();
    for &t in &cert.attachments {
        if asm.contains_key(&t.pos) {
            return false;
        }
        if !asm.values().any(|n| binds(sys, t, *n)) {
            return false;
        }
        asm.insert(t.pos, t);
    }
    let on_path = path.iter().find(|t| t.pos == cert.conflict);
    matches!((on_path, asm.get(&cert.conflict)), (Some(a), Some(b)) if a.ty != b.ty)
}

/// Grows `periods` periods of the pumping by translation and checks that
/// the sequence stays simple, off the seed, and glue-matched.
pub fn simulate_pumping(sys: &TileSystem, p: &[Tile], i: usize, j: usize, periods: usize) -> bool {
    let v = p[j].pos - p[i].pos;
    let mut seq: Vec<Tile> = p[..=i].to_vec();
    for c in 0..periods as i64 {
        seq.extend(p[i + 1..=j].iter().map(|t| Tile::new(t.pos + v * c, t.ty)));
    }
    let mut seen: HashSet<Pos> = sys.seed().keys().copied().collect();
    seq.iter().all(|t| seen.insert(t.pos)) && seq.windows(2).all(|w| binds(sys, w[0], w[1]))
}

/// `q_{k+(j-i)} = q_k + v` in position for all `i <= k <= depth`, and in
/// tile type once `k > i` (`q_i` and `q_j` are both path tiles).
pub fn torture_holds(spec: &PumpingSpec, depth: usize) -> bool {
    let v = spec.vector();
    (spec.i..=depth).all(|k| {
        let (a, b) = (pumpkit::tam::pumping_term(spec, k), pumpkit::tam::pumping_term(spec, k + spec.period()));
        b.pos == a.pos + v && (k == spec.i || a.ty == b.ty)
    })
}

/// A random connected set of tile centers and a random nonzero vector.
pub fn random_polyomino<R: Rng>(rng: &mut R) -> (Vec<GridPoint>, Displacement) {
    let n = rng.gen_range(1..=10);
    let mut cells = vec![Pos::new(0, 0)];
    while cells.len() < n {
        let q = cells[rng.gen_range(0..cells.len())].step(Dir::ALL[rng.gen_range(0..4)]);
        if !cells.contains(&q) {
            cells.push(q);
        }
    }
    let v = loop {
        let v = Displacement::new(rng.gen_range(-5..=5), rng.gen_range(-5..=5));
        if !v.is_zero() {
            break Displacement::new(2 * v.dx, 2 * v.dy);
        }
    };
    (cells.iter().map(|p| p.center()).collect(), v)
}

/// Whether the cells meet their `c·v` translate, by direct set intersection.
pub fn overlaps(cells: &[GridPoint], v: Displacement, c: i64) -> bool {
    let set: HashSet<GridPoint> = cells.iter().copied().collect();
    cells.iter().any(|&p| set.contains(&(p + Displacement::new(c * v.dx, c * v.dy))))
}

/// Number of window points where `classify_side` and the flood fill
/// disagree, over `curves` random curves.
pub fn jordan_mismatches<R: Rng>(rng: &mut R, curves: usize) -> (usize, usize) {
    let window = Window::new(-1, 38, -1, 38);
    let mut bad = 0;
    let mut points = 0;
    for _ in 0..curves {
        let c = random_almost_vertical(rng, 37, 37);
        let truth = floodfill_sides(&c, &window).expect("window contains the curve");
        let idx = pumpkit::geometry::CurveIndex::new(&c).expect("simple curve");
        for p in window.points() {
            points += 1;
            if idx.classify(p) != truth[&p] {
                bad += 1;
            }
        }
    }
    (bad, points)
}

/// Rotations of `p` that bring a uniquely extreme last tile to the east.
pub fn east_frames(sys: &TileSystem, p: &[Tile]) -> Vec<(TileSystem, Path)> {
    [(Dir::East, 0u8), (Dir::North, 3), (Dir::West, 2), (Dir::South, 1)]
        .into_iter()
        .filter(|(d, _)| p.len() >= 2 && last_tile_unique_extreme(sys, p, *d))
        .map(|(_, q)| {
            let t = Transform::identity().then(Op::Rotate(q));
            (t.system(sys), t.path(p))
        })
        .collect()
}

/// Counterexamples to the glue lemmas over all canonical frames of the corpus.
pub fn glue_lemma_counterexamples(instances: &[CorpusInstance]) -> (usize, usize) {
    let mut checked = 0;
    let mut bad = 0;
    for inst in instances {
        for p in &inst.paths {
            for (sys, q) in east_frames(&inst.sys, p) {
                checked += 1;
                let east = check_glue_east(&sys, &q).expect("canonical frame");
                let side = check_glue_side(&sys, &q).expect("canonical frame");
                if east.is_some() || side.is_some() {
                    bad += 1;
                }
            }
        }
    }
    (checked, bad)
}

#[derive(Debug, Default)]
pub struct DifferentialStats {
    pub systems: usize,
    pub paths: usize,
    pub shielded: usize,
    pub certified: usize,
    pub verified: usize,
    pub claim_violations: BTreeMap<String, usize>,
    pub literal_violations: BTreeMap<String, usize>,
    pub budget: usize,
    pub first_failure: Option<String>,
    pub first_literal: Option<String>,
}

/// Runs the engine on the first shield of every shielded path and checks
/// each certificate with the raw-glue replays.
pub fn differential(instances: &[CorpusInstance], budget: &EnumBudget) -> DifferentialStats {
    let mut st = DifferentialStats { systems: instances.len(), ..Default::default() };
    let cfg = EngineConfig::default();
    for inst in instances {
        for p in &inst.paths {
            st.paths += 1;
            let Some(&sh) = enumerate_shields(&inst.sys, p).first() else {
                continue;
            };
            st.shielded += 1;
            match pump_or_block_with(&inst.sys, p, sh, &cfg) {
                Ok((out, trace)) => {
                    st.certified += 1;
                    let ok = match out {
                        ShieldOutcome::Pumpable { i, j, .. } => {
                            simulate_pumping(&inst.sys, p, i, j, 50)
                                && pumpkit::oracle::pumping_pair_holds(&inst.sys, p, i, j, budget)
                        }
                        ShieldOutcome::Fragile { cert, .. } => replay_conflicts(&inst.sys, p, &cert),
                    };
                    if ok {
                        st.verified += 1;
                    } else if st.first_failure.is_none() {
                        st.first_failure = Some(format!("system #{} shield {sh:?} path {p:?}", inst.index));
                    }
                    for (_, name) in trace.violations {
                        if st.first_literal.is_none() {
                            st.first_literal = Some(format!("{name}: system #{} shield {sh:?} path {p:?}", inst.index));
                        }
                        *st.literal_violations.entry(name).or_default() += 1;
                    }
                }
                Err(EngineError::BudgetExceeded(_)) => st.budget += 1,
                Err(EngineError::ClaimViolation(name)) => {
                    *st.claim_violations.entry(name.clone()).or_default() += 1;
                    if st.first_failure.is_none() {
                        st.first_failure = Some(format!("{name}: system #{} shield {sh:?} path {p:?}", inst.index));
                    }
                }
                Err(e) => panic!("system #{} shield {sh:?}: {e}", inst.index),
            }
        }
    }
    st
}
