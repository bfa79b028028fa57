//! Text file formats for sinograms (`FKR1`) and reconstructions
//! (`F64GRID`), and 8-bit PGM previews.
//!
//! Floats are written in the shortest decimal form that reads back to the
//! same bits, so a write–read cycle is exact.
//!
//! ```text
//! FKR1
//! radon:support=1
//! mphi 513 360 -1 1 full
//! <n_phi lines of n_lambda values, phi ascending, lambda ascending>
//! ```
//!
//! ```text
//! F64GRID nx ny x0 y0 h
//! <ny lines of nx values, y ascending, x ascending>
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{Grid, ScalarField};
use crate::geometry::Geometry;
use crate::transform::{DataKind, LambdaAxis, PhiRange, Sinogram};

/// Shortest decimal that parses back to `v` exactly. Very large and very
/// small magnitudes use exponent notation.
pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn write_row(w: &mut impl Write, row: &[f64]) -> std::io::Result<()> {
    let mut line = String::with_capacity(row.len() * 22);
    for (i, v) in row.iter().enumerate() {
        if i > 0 {
            line.push(' ');
        }
        line.push_str(&format_f64(*v));
    }
    line.push('\n');
    w.write_all(line.as_bytes())
}

pub fn write_sinogram(mut w: impl Write, s: &Sinogram) -> Result<()> {
    writeln!(w, "FKR1")?;
    writeln!(w, "{}", s.geometry)?;
    writeln!(
        w,
        "{} {} {} {} {} {}",
        s.kind,
        s.lambda.n,
        s.n_phi,
        format_f64(s.lambda.min),
        format_f64(s.lambda.max),
        s.phi_range.as_str()
    )?;
    for j in 0..s.n_phi {
        write_row(&mut w, s.row(j))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads lines, keeping count for error messages.
struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
    what: &'static str,
}

impl<R: BufRead> Lines<R> {
    fn new(r: R, what: &'static str) -> Self {
        Lines {
            inner: r.lines(),
            line: 0,
            what,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Format {
            what: self.what,
            line: self.line,
            msg: msg.into(),
        }
    }

    fn next(&mut self) -> Result<String> {
        self.line += 1;
        match self.inner.next() {
            Some(l) => Ok(l?),
            None => Err(self.err("unexpected end of file")),
        }
    }

    fn floats(&mut self, n: usize) -> Result<Vec<f64>> {
        let l = self.next()?;
        let v: Vec<f64> = l
            .split_ascii_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| self.err(format!("bad number {t:?}"))))
            .collect::<Result<_>>()?;
        if v.len() != n {
            return Err(self.err(format!("expected {n} values, found {}", v.len())));
        }
        Ok(v)
    }

    fn finish(&mut self) -> Result<()> {
        while let Some(l) = self.inner.next() {
            self.line += 1;
            if !l?.trim().is_empty() {
                return Err(self.err("trailing data"));
            }
        }
        Ok(())
    }
}

fn field<T: std::str::FromStr>(lines: &Lines<impl BufRead>, tok: Option<&str>, name: &str) -> Result<T> {
    let t = tok.ok_or_else(|| lines.err(format!("missing {name}")))?;
    t.parse().map_err(|_| lines.err(format!("bad {name} {t:?}")))
}

pub fn read_sinogram(r: impl BufRead) -> Result<Sinogram> {
    let mut lines = Lines::new(r, "FKR1");
    if lines.next()?.trim() != "FKR1" {
        return Err(lines.err("missing FKR1 magic"));
    }
    let geometry = Geometry::parse(lines.next()?.trim())?;
    let header = lines.next()?;
    let mut t = header.split_ascii_whitespace();
    let kind = match t.next() {
        Some("mphi") => DataKind::Mphi,
        Some("riemann") => DataKind::Riemann,
        other => return Err(lines.err(format!("unknown data kind {other:?}"))),
    };
    let n_lambda: usize = field(&lines, t.next(), "n_lambda")?;
    let n_phi: usize = field(&lines, t.next(), "n_phi")?;
    let min: f64 = field(&lines, t.next(), "lambda_min")?;
    let max: f64 = field(&lines, t.next(), "lambda_max")?;
    let phi_range = match t.next() {
        Some("full") => PhiRange::Full,
        Some("half") => PhiRange::Half,
        other => return Err(lines.err(format!("phi range must be full or half, got {other:?}"))),
    };
    if t.next().is_some() {
        return Err(lines.err("trailing fields in header"));
    }
    let axis = LambdaAxis::new(min, max, n_lambda)?;
    let mut data = Vec::with_capacity(n_lambda * n_phi);
    for _ in 0..n_phi {
        data.extend(lines.floats(n_lambda)?);
    }
    lines.finish()?;
    Sinogram::new(geometry, kind, axis, n_phi, phi_range, data)
}

pub fn write_field(mut w: impl Write, f: &ScalarField) -> Result<()> {
    let g = f.grid;
    writeln!(
        w,
        "F64GRID {} {} {} {} {}",
        g.nx,
        g.ny,
        format_f64(g.x0),
        format_f64(g.y0),
        format_f64(g.h)
    )?;
    for j in 0..g.ny {
        write_row(&mut w, &f.values[j * g.nx..(j + 1) * g.nx])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_field(r: impl BufRead) -> Result<ScalarField> {
    let mut lines = Lines::new(r, "F64GRID");
    let header = lines.next()?;
    let mut t = header.split_ascii_whitespace();
    if t.next() != Some("F64GRID") {
        return Err(lines.err("missing F64GRID magic"));
    }
    let nx: usize = field(&lines, t.next(), "nx")?;
    let ny: usize = field(&lines, t.next(), "ny")?;
    let x0: f64 = field(&lines, t.next(), "x0")?;
    let y0: f64 = field(&lines, t.next(), "y0")?;
    let h: f64 = field(&lines, t.next(), "h")?;
    if t.next().is_some() {
        return Err(lines.err("trailing fields in header"));
    }
    let grid = Grid::new(nx, ny, x0, y0, h)?;
    let mut values = Vec::with_capacity(nx * ny);
    for _ in 0..ny {
        values.extend(lines.floats(nx)?);
    }
    lines.finish()?;
    Ok(ScalarField { grid, values })
}

/// Binary PGM, min–max scaled to 0..=255, top row = largest `y`.
pub fn write_pgm(mut w: impl Write, f: &ScalarField) -> Result<()> {
    let g = f.grid;
    let (lo, hi) = f
        .values
        .iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    write!(w, "P5\n{} {}\n255\n", g.nx, g.ny)?;
    let mut bytes = Vec::with_capacity(g.len());
    for j in (0..g.ny).rev() {
        for i in 0..g.nx {
            let v = f.values[j * g.nx + i];
            let b = if span > 0.0 && v.is_finite() {
                (255.0 * (v - lo) / span).round().clamp(0.0, 255.0) as u8
            } else {
                0
            };
            bytes.push(b);
        }
    }
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(())
}

pub fn save_sinogram(path: impl AsRef<Path>, s: &Sinogram) -> Result<()> {
    write_sinogram(BufWriter::new(File::create(path)?), s)
}

pub fn load_sinogram(path: impl AsRef<Path>) -> Result<Sinogram> {
    read_sinogram(BufReader::new(File::open(path)?))
}

pub fn save_field(path: impl AsRef<Path>, f: &ScalarField) -> Result<()> {
    write_field(BufWriter::new(File::create(path)?), f)
}

pub fn load_field(path: impl AsRef<Path>) -> Result<ScalarField> {
    read_field(BufReader::new(File::open(path)?))
}

pub fn save_pgm(path: impl AsRef<Path>, f: &ScalarField) -> Result<()> {
    write_pgm(BufWriter::new(File::create(path)?), f)
}
