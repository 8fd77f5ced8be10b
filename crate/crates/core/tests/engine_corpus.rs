// SPDX-License-Identifier: Apache-2.0
use std::collections::{BTreeMap, HashMap};

use pumpkit::oracle::{brute_right_priority, corpus, pumping_pair_holds, CorpusParams, EnumBudget};
use pumpkit::shield::{
    build_workspace, enumerate_shields, pump_or_block_with, search_s, BindingProblem, EngineConfig, EngineError,
    ShieldOutcome,
};
use pumpkit::tam::{FragilityCert, Pos, Tile, TileSystem};

const NEIGHBORS: [(i64, i64, usize, usize); 4] = [(0, 1, 0, 2), (1, 0, 1, 3), (0, -1, 2, 0), (-1, 0, 3, 1)];

fn glues(sys: &TileSystem, t: Tile) -> [Option<String>; 4] {
    sys.tiles()[t.ty].glues.clone()
}

/// Temperature-1 replay written against the raw tile glues.
fn replay_conflicts(sys: &TileSystem, path: &[Tile], cert: &FragilityCert) -> bool {
    let mut asm: HashMap<Pos, Tile> = sys.seed().iter().map(|(&p, &ty)| (p, Tile::new(p, ty))).collect();
    for &t in &cert.attachments {
        if asm.contains_key(&t.pos) {
            return false;
        }
        let mine = glues(sys, t);
        let binds = NEIGHBORS.iter().any(|&(dx, dy, side, opp)| {
            asm.get(&Pos::new(t.pos.x + dx, t.pos.y + dy))
                .is_some_and(|n| mine[side].is_some() && mine[side] == glues(sys, *n)[opp])
        });
        if !binds {
            return false;
        }
        asm.insert(t.pos, t);
    }
    let on_path = path.iter().find(|t| t.pos == cert.conflict);
    matches!((on_path, asm.get(&cert.conflict)), (Some(a), Some(b)) if a.ty != b.ty)
}

#[test]
fn engine_agrees_with_oracles_on_a_small_corpus() {
    let params = CorpusParams { seed: 0xc0ffee, systems: 150, max_tiles: 3, alphabet: 3, max_seed: 2 };
    let budget = EnumBudget { max_path_len: 10, ..EnumBudget::default() };
    let (instances, _) = corpus(&params, &budget);
    let cfg = EngineConfig::default();
    let mut violations: BTreeMap<String, usize> = BTreeMap::new();
    let mut trails: BTreeMap<String, usize> = BTreeMap::new();
    let mut longest = 0;
    let mut rp_checked = 0;
    for inst in &instances {
        for p in &inst.paths {
            for sh in enumerate_shields(&inst.sys, p) {
                if sh.k + 1 >= p.len() {
                    continue;
                }
                if sh.j < sh.k {
                    let ws = build_workspace(&inst.sys, &p[..=sh.k + 1], sh).unwrap();
                    let bp = BindingProblem::new(&p[..=sh.k + 1], sh, &ws);
                    if let Ok(want) = brute_right_priority(&bp, &budget) {
                        assert_eq!(search_s(&bp, cfg.max_nodes).unwrap(), want, "#{} {sh:?}", inst.index);
                        rp_checked += 1;
                    }
                }
                match pump_or_block_with(&inst.sys, p, sh, &cfg) {
                    Ok((out, trace)) => {
                        let ok = match out {
                            ShieldOutcome::Pumpable { i, j, .. } => pumping_pair_holds(&inst.sys, p, i, j, &budget),
                            ShieldOutcome::Fragile { cert, .. } => replay_conflicts(&inst.sys, p, &cert),
                        };
                        assert!(ok, "{params} #{} {sh:?}", inst.index);
                        for (_, name) in &trace.violations {
                            assert_eq!(name, "H4:g");
                            *violations.entry(name.clone()).or_default() += 1;
                        }
                        longest = longest.max(trace.history.len());
                        *trails.entry(trace.trail.join(",")).or_default() += 1;
                    }
                    Err(EngineError::BudgetExceeded(_)) => {}
                    Err(e) => panic!("{params} system #{} shield {sh:?} path {p:?}: {e}", inst.index),
                }
            }
        }
    }
    eprintln!("{params}: trails {trails:?}, longest induction {longest}, violations {violations:?}, rp checked {rp_checked}");
    assert!(!trails.is_empty());
}
