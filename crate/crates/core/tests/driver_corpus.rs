// SPDX-License-Identifier: Apache-2.0
use std::collections::BTreeMap;

use num_bigint::BigUint;
use pumpkit::driver::{analyze, AnalyzeOptions, Verdict};
use pumpkit::oracle::{corpus, pumping_pair_holds, CorpusParams, EnumBudget};
use pumpkit::shield::EngineError;
use pumpkit::driver::DriverError;
use pumpkit::tam::verify_fragile_cert;

#[test]
fn analyze_certificates_hold_on_a_small_corpus() {
    let params = CorpusParams { seed: 0xbead, systems: 150, max_tiles: 3, alphabet: 3, max_seed: 2 };
    let budget = EnumBudget { max_path_len: 10, ..EnumBudget::default() };
    let (instances, _) = corpus(&params, &budget);
    let mut verdicts: BTreeMap<String, usize> = BTreeMap::new();
    for inst in &instances {
        for p in &inst.paths {
            for d in 1u32..=3 {
                let opts = AnalyzeOptions { bound_override: Some(BigUint::from(d)), ..Default::default() };
                let r = match analyze(&inst.sys, p, &opts) {
                    Ok(r) => r,
                    Err(DriverError::Engine(EngineError::BudgetExceeded(_))) => continue,
                    Err(e) => panic!("{params} #{} d={d} path {p:?}: {e}", inst.index),
                };
                match &r.verdict {
                    Verdict::Pumpable(spec) => {
                        assert!(pumping_pair_holds(&inst.sys, p, spec.i, spec.j, &budget), "#{}", inst.index)
                    }
                    Verdict::Fragile(cert) => assert!(verify_fragile_cert(&inst.sys, p, cert).is_ok()),
                    Verdict::NoShieldFound => {}
                }
                let marks: Vec<&str> = r
                    .trail
                    .iter()
                    .map(String::as_str)
                    .filter(|s| ["glue:almost", "case 1.1", "case 1.2", "case 2", "couple:use", "below bound"].contains(s))
                    .collect();
                *verdicts.entry(format!("{} {}", r.verdict.kind(), marks.join(","))).or_default() += 1;
            }
        }
    }
    eprintln!("{params}: {verdicts:?}");
    assert!(verdicts.keys().any(|k| k.starts_with("Pumpable")));
}
