use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{Field, Space, SpectralGrid};
use crate::error::{Error, Result};

/// CSV with coordinate columns (`x0..` or `xi0..`) followed by `re,im`.
pub fn write_csv(field: &Field, path: &Path) -> Result<()> {
    let grid = field.grid();
    let n = grid.dim();
    let mut w = BufWriter::new(File::create(path)?);
    let prefix = match field.space() {
        Space::Position => "x",
        Space::Frequency => "xi",
    };
    let header: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
    writeln!(w, "{},re,im", header.join(","))?;
    for (i, v) in field.values().iter().enumerate() {
        let c = match field.space() {
            Space::Position => grid.position(i),
            Space::Frequency => grid.frequency(i),
        };
        for x in &c[..n] {
            write!(w, "{x:.16e},")?;
        }
        writeln!(w, "{:.16e},{:.16e}", v.re, v.im)?;
    }
    w.flush()?;
    Ok(())
}

/// Binary dump of a position-space field: `u32 n`, `u32 M`, `f64 L`, then
/// interleaved `re, im` pairs, all little-endian.
pub fn write_dump(field: &Field, path: &Path) -> Result<()> {
    if field.space() != Space::Position {
        return Err(Error::Params("binary dumps hold position-space fields".into()));
    }
    let grid = field.grid();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    w.write_all(&(grid.points_per_axis() as u32).to_le_bytes())?;
    w.write_all(&grid.extent().to_le_bytes())?;
    for v in field.values() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_dump(path: &Path) -> Result<Field> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 16 {
        return Err(Error::Io(format!("{}: truncated header", path.display())));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let grid = SpectralGrid::new(u32_at(0) as usize, f64_at(8), u32_at(4) as usize)?;
    let expected = 16 + 16 * grid.len();
    if bytes.len() != expected {
        return Err(Error::Io(format!("{}: expected {expected} bytes, found {}", path.display(), bytes.len())));
    }
    let values = (0..grid.len()).map(|i| Complex64::new(f64_at(16 + 16 * i), f64_at(24 + 16 * i))).collect();
    Field::new(grid, values, Space::Position)
}
