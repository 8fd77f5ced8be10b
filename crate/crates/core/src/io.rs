// SPDX-License-Identifier: Apache-2.0
//! Text formats for tile systems, paths and certificates.
//!
//! ```text
//! # comment
//! tile A north=- east=g south=- west=g
//! tile S north=- east=g south=- west=- seed-only
//! seed 0 0 S
//! path 1 0 A ; 2 0 A
//! ```
//!
//! Certificates are either `kind pumpable i=<i> j=<j>` followed by a `path`
//! line, or `kind fragile` followed by `attach <x> <y> <name>` lines and one
//! `conflict <x> <y>` line.

use crate::geometry::Dir;
use crate::tam::{FragilityCert, Path, Pos, PumpingSpec, SystemError, Tile, TileSystem, TileType};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    System(#[from] SystemError),
}

impl ParseError {
    fn at(line: usize, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax { line, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemFile {
    pub sys: TileSystem,
    pub path: Option<Path>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Pumpable(PumpingSpec),
    Fragile(FragilityCert),
}

const SIDES: [(&str, Dir); 4] = [("north", Dir::North), ("east", Dir::East), ("south", Dir::South), ("west", Dir::West)];

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, l)| {
        let l = l.split('#').next().unwrap_or("");
        let words: Vec<&str> = l.split_whitespace().collect();
        (!words.is_empty()).then_some((k + 1, words))
    })
}

fn valid_label(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_graphic() && !matches!(b, b'=' | b';' | b'#'))
}

fn int(line: usize, s: &str) -> Result<i64, ParseError> {
    s.parse().map_err(|_| ParseError::at(line, format!("expected an integer, found `{s}`")))
}

fn index(line: usize, word: &str, key: &str) -> Result<usize, ParseError> {
    word.strip_prefix(key)
        .and_then(|v| v.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| ParseError::at(line, format!("expected {key}=<index>, found `{word}`")))
}

fn parse_tile_line(line: usize, words: &[&str]) -> Result<TileType, ParseError> {
    let (name, rest) = words.split_first().ok_or_else(|| ParseError::at(line, "tile needs a name"))?;
    if !valid_label(name) {
        return Err(ParseError::at(line, format!("bad tile name `{name}`")));
    }
    let mut t = TileType::new(name, None, None, None, None);
    let mut seen = [false; 4];
    for w in rest {
        if *w == "seed-only" {
            t.seed_only = true;
            continue;
        }
        let (key, val) = w.split_once('=').ok_or_else(|| ParseError::at(line, format!("unexpected `{w}`")))?;
        let (_, d) = SIDES.iter().find(|(k, _)| *k == key).ok_or_else(|| ParseError::at(line, format!("unknown side `{key}`")))?;
        if std::mem::replace(&mut seen[d.index()], true) {
            return Err(ParseError::at(line, format!("side `{key}` given twice")));
        }
        if val != "-" {
            if !valid_label(val) {
                return Err(ParseError::at(line, format!("bad glue label `{val}`")));
            }
            t.glues[d.index()] = Some(val.to_string());
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(ParseError::at(line, "tile must give all four sides"));
    }
    Ok(t)
}

fn positioned<'a>(line: usize, words: &[&'a str]) -> Result<(Pos, &'a str), ParseError> {
    match words {
        [x, y, name] => Ok((Pos::new(int(line, x)?, int(line, y)?), name)),
        _ => Err(ParseError::at(line, "expected <x> <y> <name>")),
    }
}

fn parse_path_words(sys: &TileSystem, line: usize, words: &[&str]) -> Result<Path, ParseError> {
    let joined = words.join(" ");
    joined
        .split(';')
        .map(|part| {
            let w: Vec<&str> = part.split_whitespace().collect();
            let (pos, name) = positioned(line, &w)?;
            let ty = sys.id(name).ok_or_else(|| ParseError::at(line, format!("unknown tile `{name}`")))?;
            Ok(Tile::new(pos, ty))
        })
        .collect()
}

pub fn parse_system(text: &str) -> Result<SystemFile, ParseError> {
    let mut tiles = Vec::new();
    let mut seed: Vec<(Pos, String)> = Vec::new();
    let mut path_line: Option<(usize, Vec<&str>)> = None;
    for (line, words) in lines(text) {
        match words[0] {
            "tile" => tiles.push(parse_tile_line(line, &words[1..])?),
            "seed" => {
                let (p, name) = positioned(line, &words[1..])?;
                seed.push((p, name.to_string()));
            }
            "path" if path_line.is_some() => return Err(ParseError::at(line, "second path line")),
            "path" => path_line = Some((line, words[1..].to_vec())),
            other => return Err(ParseError::at(line, format!("unknown directive `{other}`"))),
        }
    }
    let seed_refs: Vec<(Pos, &str)> = seed.iter().map(|(p, n)| (*p, n.as_str())).collect();
    let sys = TileSystem::new(tiles, &seed_refs)?;
    let path = path_line.map(|(line, words)| parse_path_words(&sys, line, &words)).transpose()?;
    Ok(SystemFile { sys, path })
}

/// Tile lines and one path line, without a seed.
pub fn parse_2ham(text: &str) -> Result<(Vec<TileType>, Path), ParseError> {
    let mut tiles: Vec<TileType> = Vec::new();
    let mut path_line = None;
    for (line, words) in lines(text) {
        match words[0] {
            "tile" => {
                let t = parse_tile_line(line, &words[1..])?;
                if tiles.iter().any(|u| u.name == t.name) {
                    return Err(SystemError::DuplicateTile(t.name).into());
                }
                tiles.push(t);
            }
            "path" if path_line.is_none() => path_line = Some((line, words[1..].to_vec())),
            other => return Err(ParseError::at(line, format!("unexpected `{other}` in a 2HAM file"))),
        }
    }
    tiles.sort_by(|a, b| a.name.cmp(&b.name));
    let probe = TileSystem::with_parts(tiles.clone(), Default::default());
    let (line, words) = path_line.ok_or_else(|| ParseError::at(0, "no path line"))?;
    let path = parse_path_words(&probe, line, &words)?;
    Ok((tiles, path))
}

pub fn parse_path(sys: &TileSystem, text: &str) -> Result<Path, ParseError> {
    let mut found = None;
    for (line, words) in lines(text) {
        match words[0] {
            "path" if found.is_none() => found = Some(parse_path_words(sys, line, &words[1..])?),
            _ => return Err(ParseError::at(line, "expected a single path line")),
        }
    }
    found.ok_or_else(|| ParseError::at(0, "no path line"))
}

pub fn print_path(sys: &TileSystem, p: &[Tile]) -> String {
    let parts: Vec<String> = p.iter().map(|t| format!("{} {} {}", t.pos.x, t.pos.y, sys.name(t.ty))).collect();
    format!("path {}\n", parts.join(" ; "))
}

pub fn print_system(sys: &TileSystem, path: Option<&[Tile]>) -> String {
    let mut out = String::new();
    for t in sys.tiles() {
        out.push_str("tile ");
        out.push_str(&t.name);
        for (key, d) in SIDES {
            out.push_str(&format!(" {key}={}", t.glue(d).unwrap_or("-")));
        }
        if t.seed_only {
            out.push_str(" seed-only");
        }
        out.push('\n');
    }
    for (p, &ty) in sys.seed() {
        out.push_str(&format!("seed {} {} {}\n", p.x, p.y, sys.name(ty)));
    }
    if let Some(p) = path.filter(|p| !p.is_empty()) {
        out.push_str(&print_path(sys, p));
    }
    out
}

pub fn emit_certificate(sys: &TileSystem, cert: &Certificate) -> String {
    match cert {
        Certificate::Pumpable(spec) => {
            format!("kind pumpable i={} j={}\n{}", spec.i, spec.j, print_path(sys, &spec.path))
        }
        Certificate::Fragile(c) => {
            let mut out = String::from("kind fragile\n");
            for t in &c.attachments {
                out.push_str(&format!("attach {} {} {}\n", t.pos.x, t.pos.y, sys.name(t.ty)));
            }
            out.push_str(&format!("conflict {} {}\n", c.conflict.x, c.conflict.y));
            out
        }
    }
}

pub fn parse_certificate(sys: &TileSystem, text: &str) -> Result<Certificate, ParseError> {
    let mut it = lines(text);
    let (line, head) = it.next().ok_or_else(|| ParseError::at(0, "empty certificate"))?;
    match head.as_slice() {
        ["kind", "pumpable", i, j] => {
            let (i, j) = (index(line, i, "i")?, index(line, j, "j")?);
            let (line, words) = it.next().ok_or_else(|| ParseError::at(line, "missing path line"))?;
            if words[0] != "path" {
                return Err(ParseError::at(line, "expected a path line"));
            }
            let path = parse_path_words(sys, line, &words[1..])?;
            if let Some((line, _)) = it.next() {
                return Err(ParseError::at(line, "trailing content"));
            }
            Ok(Certificate::Pumpable(PumpingSpec::new(path, i, j)))
        }
        ["kind", "fragile"] => {
            let mut attachments = Vec::new();
            let mut conflict = None;
            for (line, words) in it {
                match (words.as_slice(), conflict) {
                    (["attach", rest @ ..], None) => {
                        let (pos, name) = positioned(line, rest)?;
                        let ty = sys.id(name).ok_or_else(|| ParseError::at(line, format!("unknown tile `{name}`")))?;
                        attachments.push(Tile::new(pos, ty));
                    }
                    (["conflict", x, y], None) => conflict = Some(Pos::new(int(line, x)?, int(line, y)?)),
                    _ => return Err(ParseError::at(line, "expected attach lines then one conflict line")),
                }
            }
            let conflict = conflict.ok_or_else(|| ParseError::at(line, "missing conflict line"))?;
            Ok(Certificate::Fragile(FragilityCert { attachments, conflict }))
        }
        _ => Err(ParseError::at(line, "expected `kind pumpable i=<i> j=<j>` or `kind fragile`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const U: &str = "tile A north=- east=g south=- west=g\nseed 0 0 A\n";

    #[test]
    fn unit_system_parses() {
        let f = parse_system(U).unwrap();
        assert_eq!(f.sys.tiles().len(), 1);
        assert_eq!(f.path, None);
        assert_eq!(print_system(&f.sys, None), U);
    }

    #[test]
    fn rejects_bad_input() {
        let dup = format!("{U}tile A north=- east=- south=- west=-\n");
        assert_eq!(parse_system(&dup), Err(SystemError::DuplicateTile("A".into()).into()));
        let split = "tile A north=- east=- south=- west=-\nseed 0 0 A\nseed 2 0 A\n";
        assert_eq!(parse_system(split), Err(SystemError::DisconnectedSeed.into()));
        assert!(matches!(parse_system("glue x\n"), Err(ParseError::Syntax { line: 1, .. })));
        assert!(matches!(parse_system("tile A north=-\n"), Err(ParseError::Syntax { line: 1, .. })));
    }

    #[test]
    fn comments_and_seed_only() {
        let text = "# U with a foreign seed\ntile A north=- east=g south=- west=g\ntile S north=- east=g south=- west=- seed-only\nseed 0 0 S # here\npath 1 0 A ; 2 0 A\n";
        let f = parse_system(text).unwrap();
        assert!(f.sys.tile(f.sys.id("S").unwrap()).seed_only);
        assert_eq!(f.path.as_ref().unwrap().len(), 2);
        let again = parse_system(&print_system(&f.sys, f.path.as_deref())).unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn certificates_round_trip() {
        let f = parse_system(U).unwrap();
        let p: Path = (1..=3).map(|x| Tile::new(Pos::new(x, 0), 0)).collect();
        let pump = Certificate::Pumpable(PumpingSpec::new(p, 0, 1));
        let text = emit_certificate(&f.sys, &pump);
        assert_eq!(text.lines().count(), 2);
        assert_eq!(parse_certificate(&f.sys, &text).unwrap(), pump);
        let attachments = (1..=5).map(|x| Tile::new(Pos::new(-x, 0), 0)).collect();
        let frag = Certificate::Fragile(FragilityCert { attachments, conflict: Pos::new(-5, 0) });
        let text = emit_certificate(&f.sys, &frag);
        assert_eq!(text.lines().count(), 7);
        assert_eq!(parse_certificate(&f.sys, &text).unwrap(), frag);
    }
}
