//! CSV output. Every file starts with a `# schema=thinfilm/1 …` line followed
//! by the column header; floats carry 17 significant digits.

use std::io::{BufRead, Write};

use super::{Diagnostics, Frame, Trajectory};
use crate::error::{Error, Result};
use crate::SCHEMA_VERSION;

const DIAG_HEADER: &str = "t,s,sdot,energy,dissipation,mass,energy_residual";

pub(crate) fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn schema_line(kind: &str) -> String {
    format!("# schema={SCHEMA_VERSION} kind={kind}")
}

fn check_schema<'a>(lines: &mut impl Iterator<Item = &'a str>, kind: &str) -> Result<()> {
    let first = lines.next().ok_or_else(|| Error::Parse("empty file".into()))?;
    let want = schema_line(kind);
    if first.trim() != want {
        return Err(Error::Parse(format!("expected `{want}`, found `{}`", first.trim())));
    }
    Ok(())
}

/// Profile snapshots, one block per recorded state: `t,xi,h` (moving) or `t,x,h` (fixed).
pub fn write_profiles<W: Write>(mut w: W, traj: &Trajectory) -> Result<()> {
    writeln!(w, "{}", schema_line("profile"))?;
    let col = match traj.config.frame {
        Frame::Moving => "xi",
        Frame::Fixed => "x",
    };
    writeln!(w, "t,{col},h")?;
    for st in &traj.states {
        let t = fmt(st.t);
        for (x, h) in traj.grid.nodes.iter().zip(&st.h) {
            writeln!(w, "{t},{},{}", fmt(*x), fmt(*h))?;
        }
    }
    Ok(())
}

pub fn write_diagnostics<W: Write>(mut w: W, diagnostics: &[Diagnostics]) -> Result<()> {
    writeln!(w, "{}", schema_line("diagnostics"))?;
    writeln!(w, "{DIAG_HEADER}")?;
    for d in diagnostics {
        let row = [d.t, d.s, d.sdot, d.energy, d.dissipation, d.mass, d.energy_residual].map(fmt).join(",");
        writeln!(w, "{row}")?;
    }
    Ok(())
}

fn parse_row(line: &str, width: usize, lineno: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = line
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {lineno}: {e}"))))
        .collect::<Result<_>>()?;
    if v.len() != width {
        return Err(Error::Parse(format!("line {lineno}: expected {width} columns, found {}", v.len())));
    }
    Ok(v)
}

pub fn read_diagnostics<R: BufRead>(r: R) -> Result<Vec<Diagnostics>> {
    let text: Vec<String> = r.lines().collect::<std::io::Result<_>>()?;
    let mut lines = text.iter().map(String::as_str);
    check_schema(&mut lines, "diagnostics")?;
    match lines.next() {
        Some(h) if h.trim() == DIAG_HEADER => {}
        other => return Err(Error::Parse(format!("expected header `{DIAG_HEADER}`, found {other:?}"))),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| {
            let v = parse_row(l, 7, k + 3)?;
            Ok(Diagnostics {
                t: v[0],
                s: v[1],
                sdot: v[2],
                energy: v[3],
                dissipation: v[4],
                mass: v[5],
                energy_residual: v[6],
            })
        })
        .collect()
}

/// One snapshot read back from a profile CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileBlock {
    pub t: f64,
    pub x: Vec<f64>,
    pub h: Vec<f64>,
}

pub fn read_profiles<R: BufRead>(r: R) -> Result<(Frame, Vec<ProfileBlock>)> {
    let text: Vec<String> = r.lines().collect::<std::io::Result<_>>()?;
    let mut lines = text.iter().map(String::as_str);
    check_schema(&mut lines, "profile")?;
    let frame = match lines.next().map(str::trim) {
        Some("t,xi,h") => Frame::Moving,
        Some("t,x,h") => Frame::Fixed,
        other => return Err(Error::Parse(format!("unexpected profile header {other:?}"))),
    };
    let mut blocks: Vec<ProfileBlock> = Vec::new();
    for (k, l) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let v = parse_row(l, 3, k + 3)?;
        match blocks.last_mut() {
            Some(b) if b.t == v[0] => {
                b.x.push(v[1]);
                b.h.push(v[2]);
            }
            _ => blocks.push(ProfileBlock { t: v[0], x: vec![v[1]], h: vec![v[2]] }),
        }
    }
    Ok((frame, blocks))
}
