// SPDX-License-Identifier: Apache-2.0
//! `pumpkit` command-line front end.
//!
//! Exit codes: 0 pumpable or success, 1 fragile, 2 no shield found,
//! 3 invalid input or failed verification, 4 internal claim violation,
//! 5 budget exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use pumpkit::analysis::{spans, Axis, Orientation};
use pumpkit::driver::{
    analyze, bound_theorem1_extent, bound_theorem1_half_side, bound_theorem_main_distance, reduce_2ham,
    AnalyzeOptions, DriverError, Verdict,
};
use pumpkit::io::{emit_certificate, parse_2ham, parse_certificate, parse_system, print_system, Certificate};
use pumpkit::oracle::{brute_fragile, brute_pumpable, brute_right_priority, enumerate_paths, EnumBudget};
use pumpkit::shield::{
    build_workspace, enumerate_shields, pump_or_block_with, BindingProblem, EngineConfig, EngineError, Shield,
    ShieldOutcome,
};
use pumpkit::svg::{render_svg, Overlays};
use pumpkit::tam::{validate_producible_path, verify_fragile_cert, verify_pumpable_cert, Path, TileSystem};

#[derive(Parser)]
#[command(name = "pumpkit", version, about = "Temperature-1 aTAM path analysis")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a system file and check its path, if any.
    Validate { file: PathBuf },
    /// Find a shield and produce a pumping or fragility certificate.
    Analyze {
        file: PathBuf,
        /// Replaces the distance bound used to truncate the path.
        #[arg(long)]
        bound_override: Option<BigUint>,
        /// Treat failed literal hypotheses as errors.
        #[arg(long)]
        strict: bool,
    },
    /// List all shields of the path.
    Shields { file: PathBuf },
    /// Run the shield engine on one shield.
    PumpOrBlock {
        file: PathBuf,
        #[arg(long, num_args = 3, value_names = ["I", "J", "K"])]
        shield: Vec<usize>,
        #[arg(long)]
        strict: bool,
    },
    /// List the spans of a path whose last tile is a unique extreme.
    Spans {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "v")]
        axis: AxisArg,
    },
    /// Check a certificate against a system file.
    Verify { file: PathBuf, cert: PathBuf },
    /// Exhaustive reference searches.
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
    /// Draw the system and path as SVG.
    Render {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Overlay the workspace and engine curves of this shield.
        #[arg(long, num_args = 3, value_names = ["I", "J", "K"])]
        shield: Option<Vec<usize>>,
    },
    /// Print the distance, half-side and extent bounds.
    Bound {
        #[arg(long)]
        tiles: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Turn a 2HAM path into an aTAM system and path.
    Reduce2ham {
        file: PathBuf,
        /// Keep a shortest segment spanning exactly this many columns.
        #[arg(long)]
        width: Option<i64>,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// All producible paths within the length budget.
    Enumerate { file: PathBuf },
    /// Search for an assembly that blocks the path.
    Fragile { file: PathBuf },
    /// Search for an index pair whose pumping stays valid.
    Pumpable { file: PathBuf },
    /// Right-priority binding path for a shield by exhaustive search.
    Rp {
        file: PathBuf,
        #[arg(long, num_args = 3, value_names = ["I", "J", "K"])]
        shield: Vec<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    V,
    H,
}

fn env_usize(name: &str, default: usize) -> Result<usize> {
    match std::env::var(format!("PUMPKIT_BUDGET_{name}")) {
        Ok(v) => v.parse().with_context(|| format!("PUMPKIT_BUDGET_{name}={v}")),
        Err(_) => Ok(default),
    }
}

fn budget() -> Result<EnumBudget> {
    let d = EnumBudget::default();
    Ok(EnumBudget {
        max_path_len: env_usize("MAX_PATH_LEN", d.max_path_len)?,
        max_assembly_size: env_usize("MAX_ASSEMBLY_SIZE", d.max_assembly_size)?,
        max_graph_vertices: env_usize("MAX_GRAPH_VERTICES", d.max_graph_vertices)?,
        max_pump_depth: env_usize("MAX_PUMP_DEPTH", d.max_pump_depth)?,
        max_paths: env_usize("MAX_PATHS", d.max_paths)?,
    })
}

fn engine_config(strict: bool) -> Result<EngineConfig> {
    let d = EngineConfig::default();
    Ok(EngineConfig {
        max_nodes: env_usize("MAX_NODES", d.max_nodes)?,
        max_steps: env_usize("MAX_STEPS", d.max_steps)?,
        strict,
        ..d
    })
}

fn load(file: &PathBuf) -> Result<(TileSystem, Option<Path>)> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let f = parse_system(&text).with_context(|| format!("parsing {}", file.display()))?;
    Ok((f.sys, f.path))
}

fn load_path(file: &PathBuf) -> Result<(TileSystem, Path)> {
    let (sys, p) = load(file)?;
    let p = p.ok_or_else(|| anyhow!("{} has no path line", file.display()))?;
    validate_producible_path(&sys, &p).context("path is not producible")?;
    Ok((sys, p))
}

fn shield_arg(v: &[usize]) -> Shield {
    Shield::new(v[0], v[1], v[2])
}

fn warn_violations(v: &[(usize, String)]) {
    for (step, name) in v {
        eprintln!("warning: literal hypothesis {name} fails at induction step {step}");
    }
}

fn outcome_cert(p: &Path, out: &ShieldOutcome) -> (Certificate, u8) {
    match out {
        ShieldOutcome::Pumpable { i, j, .. } => {
            (Certificate::Pumpable(pumpkit::tam::PumpingSpec::new(p.clone(), *i, *j)), 0)
        }
        ShieldOutcome::Fragile { cert, .. } => (Certificate::Fragile(cert.clone()), 1),
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Validate { file } => {
            let (sys, p) = load(&file)?;
            println!("tiles {} seed {}", sys.growth_tile_count(), sys.seed().len());
            if let Some(p) = p {
                let report = validate_producible_path(&sys, &p).context("path is not producible")?;
                println!("path {} tiles, producible", p.len());
                if !report.seed_contacts.is_empty() {
                    println!("note: tiles {:?} also touch the seed", report.seed_contacts);
                }
            }
            Ok(0)
        }
        Cmd::Analyze { file, bound_override, strict } => {
            let (sys, p) = load_path(&file)?;
            let opts = AnalyzeOptions { bound_override, engine: engine_config(strict)? };
            let r = analyze(&sys, &p, &opts)?;
            if let Some(t) = &r.engine {
                warn_violations(&t.violations);
            }
            println!("# verdict {}", r.verdict.kind());
            println!("# trail {}", r.trail.join(", "));
            println!("# canonical frame {} truncated at {}", r.canonical.transform, r.canonical.truncated_at);
            if let Some((sh, t, len)) = &r.shield {
                println!("# shield {} {} {} on {len} tiles in frame {t}", sh.i, sh.j, sh.k);
            }
            match &r.verdict {
                Verdict::Pumpable(spec) => {
                    let v = spec.vector();
                    println!("# vector {} {}", v.x, v.y);
                    print!("{}", emit_certificate(&sys, &Certificate::Pumpable(spec.clone())));
                }
                Verdict::Fragile(c) => print!("{}", emit_certificate(&sys, &Certificate::Fragile(c.clone()))),
                Verdict::NoShieldFound => {}
            }
            Ok(r.verdict.exit_code() as u8)
        }
        Cmd::Shields { file } => {
            let (sys, p) = load_path(&file)?;
            for sh in enumerate_shields(&sys, &p) {
                println!("{} {} {}", sh.i, sh.j, sh.k);
            }
            Ok(0)
        }
        Cmd::PumpOrBlock { file, shield, strict } => {
            let (sys, p) = load_path(&file)?;
            let (out, trace) = pump_or_block_with(&sys, &p, shield_arg(&shield), &engine_config(strict)?)?;
            warn_violations(&trace.violations);
            println!("# trail {}", trace.trail.join(", "));
            let (cert, code) = outcome_cert(&p, &out);
            print!("{}", emit_certificate(&sys, &cert));
            Ok(code)
        }
        Cmd::Spans { file, axis } => {
            let (sys, p) = load_path(&file)?;
            let axis = match axis {
                AxisArg::V => Axis::Vertical,
                AxisArg::H => Axis::Horizontal,
            };
            for (s, props) in spans(&sys, &p, axis)? {
                let o = if props.orientation == Orientation::Up { "up" } else { "down" };
                let pointing = props.pointing.map_or("mixed", |d| d.name());
                println!("line {} s={} n={} {o} {pointing} label={} height={}", s.column, s.s, s.n, props.label, props.height);
            }
            Ok(0)
        }
        Cmd::Verify { file, cert } => {
            let (sys, p) = load(&file)?;
            let text = fs::read_to_string(&cert).with_context(|| format!("reading {}", cert.display()))?;
            match parse_certificate(&sys, &text)? {
                Certificate::Pumpable(spec) => {
                    validate_producible_path(&sys, &spec.path).map_err(|e| anyhow!("invalid: {e}"))?;
                    verify_pumpable_cert(&sys, &spec).map_err(|e| anyhow!("invalid: {e}"))?;
                    println!("valid pumpable");
                }
                Certificate::Fragile(c) => {
                    let p = p.ok_or_else(|| anyhow!("a fragility certificate needs the path line"))?;
                    verify_fragile_cert(&sys, &p, &c).map_err(|e| anyhow!("invalid: {e}"))?;
                    println!("valid fragile");
                }
            }
            Ok(0)
        }
        Cmd::Oracle { cmd } => oracle(cmd),
        Cmd::Render { file, output, shield } => {
            let (sys, p) = load(&file)?;
            let p = p.unwrap_or_default();
            let overlays = match shield {
                Some(v) => {
                    let sh = shield_arg(&v);
                    let ws = build_workspace(&sys, &p, sh)?;
                    let mut o = Overlays::workspace(&ws);
                    if let Ok((_, trace)) = pump_or_block_with(&sys, &p, sh, &engine_config(false)?) {
                        let t = Overlays::trace(&trace);
                        o.curves.extend(t.curves.into_iter().filter(|(n, _)| n != "cut"));
                        o.rays.extend(t.rays);
                    }
                    o
                }
                None => Overlays::default(),
            };
            let svg = render_svg(&sys, &p, &overlays);
            match output {
                Some(f) => fs::write(&f, svg).with_context(|| format!("writing {}", f.display()))?,
                None => print!("{svg}"),
            }
            Ok(0)
        }
        Cmd::Bound { tiles, seed } => {
            println!("distance {}", bound_theorem_main_distance(tiles, seed)?);
            println!("half-side {}", bound_theorem1_half_side(tiles, seed)?);
            println!("extent {}", bound_theorem1_extent(tiles, seed)?);
            Ok(0)
        }
        Cmd::Reduce2ham { file, width } => {
            let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let (tiles, p) = parse_2ham(&text)?;
            let r = reduce_2ham(tiles, &p, width)?;
            if r.ambiguous_westernmost {
                eprintln!("warning: westernmost tile is not unique; the lowest one was used");
            }
            println!("# frame {} segment {}..={} seed index {}", r.transform, r.segment.0, r.segment.1, r.seed_index);
            print!("{}", print_system(&r.sys, Some(&r.path)));
            Ok(0)
        }
    }
}

fn oracle(cmd: OracleCmd) -> Result<u8> {
    let budget = budget()?;
    match cmd {
        OracleCmd::Enumerate { file } => {
            let (sys, _) = load(&file)?;
            let e = enumerate_paths(&sys, &budget);
            for p in &e.paths {
                print!("{}", pumpkit::io::print_path(&sys, p));
            }
            if e.truncated {
                eprintln!("warning: enumeration stopped at the path budget");
            }
            Ok(0)
        }
        OracleCmd::Fragile { file } => {
            let (sys, p) = load_path(&file)?;
            match brute_fragile(&sys, &p, &budget) {
                Some(c) => {
                    print!("{}", emit_certificate(&sys, &Certificate::Fragile(c)));
                    Ok(1)
                }
                None => {
                    println!("# no blocking assembly within budget");
                    Ok(2)
                }
            }
        }
        OracleCmd::Pumpable { file } => {
            let (sys, p) = load_path(&file)?;
            match brute_pumpable(&sys, &p, &budget) {
                Some(spec) => {
                    print!("{}", emit_certificate(&sys, &Certificate::Pumpable(spec)));
                    Ok(0)
                }
                None => {
                    println!("# no pumping pair within budget");
                    Ok(2)
                }
            }
        }
        OracleCmd::Rp { file, shield } => {
            let (sys, p) = load_path(&file)?;
            let sh = shield_arg(&shield);
            if sh.k + 1 >= p.len() {
                bail!("shield needs a tile after index k");
            }
            let q = &p[..=sh.k + 1];
            let ws = build_workspace(&sys, q, sh)?;
            let bp = BindingProblem::new(q, sh, &ws);
            let pts = brute_right_priority(&bp, &budget)?;
            let s: Vec<String> = pts.iter().map(|g| format!("{} {}", g.x, g.y)).collect();
            println!("{}", s.join(" ; "));
            Ok(0)
        }
    }
}

fn code_for(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        let engine = cause
            .downcast_ref::<EngineError>()
            .or_else(|| match cause.downcast_ref::<DriverError>() {
                Some(DriverError::Engine(x)) => Some(x),
                _ => None,
            });
        match engine {
            Some(EngineError::ClaimViolation(_)) => return 4,
            Some(EngineError::BudgetExceeded(_)) => return 5,
            _ => {}
        }
    }
    3
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code_for(&e))
        }
    }
}
