//! Text grid files, PGM snapshots and radial profile CSV.
//!
//! Grid file layout: the first line is `n L`, followed by `n` lines of `n`
//! space-separated values; the first data line is row 0 (lowest `y`). Lines
//! starting with `#` are comments and may appear after the data.

use std::io::{self, Write};

use super::ops::RadialProfile;
use super::{GridError, GridFunction};

/// Writes `f` in the grid file format. Values use shortest round-trip
/// formatting, so reading the file back reproduces them bit for bit.
pub fn write_grid<W: Write>(f: &GridFunction, mut out: W, comments: &[String]) -> io::Result<()> {
    let n = f.resolution();
    writeln!(out, "{} {}", n, f.half_width())?;
    let mut line = String::new();
    for row in 0..n {
        line.clear();
        for col in 0..n {
            if col > 0 {
                line.push(' ');
            }
            line.push_str(&f.get(row, col).to_string());
        }
        writeln!(out, "{line}")?;
    }
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    Ok(())
}

pub fn read_grid(text: &str) -> Result<GridFunction, GridError> {
    let parse_err = |msg: String| GridError::Parse(msg);
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (lineno, header) = lines.next().ok_or_else(|| parse_err("empty file".into()))?;
    let mut head = header.split_whitespace();
    let n: usize = head
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(format!("line {lineno}: expected resolution")))?;
    let half_width: f64 = head
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(format!("line {lineno}: expected half-width")))?;
    if head.next().is_some() {
        return Err(parse_err(format!(
            "line {lineno}: trailing tokens in header"
        )));
    }

    let mut values = Vec::with_capacity(n * n);
    for row in 0..n {
        let (lineno, line) = lines
            .next()
            .ok_or_else(|| parse_err(format!("expected {n} rows, found {row}")))?;
        let before = values.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(format!("line {lineno}: bad value {tok:?}")))?;
            values.push(v);
        }
        if values.len() - before != n {
            return Err(parse_err(format!(
                "line {lineno}: expected {n} values, found {}",
                values.len() - before
            )));
        }
    }
    if let Some((lineno, _)) = lines.next() {
        return Err(parse_err(format!("line {lineno}: data after the last row")));
    }
    GridFunction::from_values(n, half_width, values)
}

/// 8-bit plain PGM, top row first, scaled so the maximum value maps to 255.
pub fn write_pgm<W: Write>(f: &GridFunction, mut out: W, comments: &[String]) -> io::Result<()> {
    let n = f.resolution();
    let max = f.max_value();
    writeln!(out, "P2")?;
    writeln!(out, "# max-value scaling: 255 = {max}")?;
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "{n} {n}")?;
    writeln!(out, "255")?;
    let scale = if max > 0.0 { 255.0 / max } else { 0.0 };
    for row in (0..n).rev() {
        let line: Vec<String> = (0..n)
            .map(|col| ((f.get(row, col) * scale).round() as u8).to_string())
            .collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// `rank,radius,value` rows along the radial fill order.
pub fn write_profile_csv<W: Write>(
    profile: &RadialProfile,
    mut out: W,
    comments: &[String],
) -> io::Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "rank,radius,value")?;
    for (rank, r, v) in profile.entries() {
        writeln!(out, "{rank},{r},{v}")?;
    }
    Ok(())
}
