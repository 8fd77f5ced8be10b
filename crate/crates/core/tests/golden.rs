// SPDX-License-Identifier: Apache-2.0
//! Byte comparison of rendered figures against checked-in fixtures. Set
//! `PUMPKIT_BLESS=1` to rewrite the fixtures after reviewing a change.

use pumpkit::io::parse_system;
use pumpkit::shield::{build_workspace, pump_or_block, Shield};
use pumpkit::svg::{render_svg, Overlays};

fn dir() -> String {
    format!("{}/tests/fixtures", env!("CARGO_MANIFEST_DIR"))
}

fn check(system: &str, shield: Option<Shield>, golden: &str) {
    let f = parse_system(&std::fs::read_to_string(format!("{}/{system}", dir())).unwrap()).unwrap();
    let p = f.path.unwrap();
    let overlays = match shield {
        None => Overlays::default(),
        Some(sh) => {
            let mut o = Overlays::workspace(&build_workspace(&f.sys, &p, sh).unwrap());
            let (_, trace) = pump_or_block(&f.sys, &p, sh).unwrap();
            let t = Overlays::trace(&trace);
            o.curves.extend(t.curves.into_iter().filter(|(n, _)| n != "cut"));
            o.rays.extend(t.rays);
            o
        }
    };
    let svg = render_svg(&f.sys, &p, &overlays);
    let path = format!("{}/{golden}", dir());
    if std::env::var_os("PUMPKIT_BLESS").is_some() {
        std::fs::write(&path, &svg).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {path}; run with PUMPKIT_BLESS=1"));
    assert!(svg == want, "{golden} differs from the rendered figure");
}

#[test]
fn unit_path_figure() {
    check("unit.txt", None, "unit.svg");
}

#[test]
fn unit_workspace_figure() {
    check("unit.txt", Some(Shield::new(0, 1, 1)), "unit_workspace.svg");
}

#[test]
fn blocker_workspace_figure() {
    check("blocker.txt", Some(Shield::new(0, 1, 3)), "blocker_workspace.svg");
}
