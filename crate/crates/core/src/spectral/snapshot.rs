//! Binary field snapshots.
//!
//! Layout (all little endian): magic `NSCF`, `u32` version, `u32` n,
//! `f64` box length, `f64` time, `u32` component count, then for each
//! component the interleaved `(re, im)` pairs of every stored mode in flat
//! spectral order.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::field::{SpectralField, VectorField};
use super::grid::Grid;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"NSCF";
pub const VERSION: u32 = 1;

/// Decoded snapshot contents.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub grid: Grid,
    pub time: f64,
    pub components: Vec<Vec<Complex64>>,
}

impl Snapshot {
    pub fn of<F: SpectralField>(field: &F, time: f64) -> Self {
        Self { grid: *field.grid(), time, components: field.components().to_vec() }
    }

    pub fn into_velocity(self) -> Result<VectorField> {
        let Ok(comps) = <[Vec<Complex64>; 3]>::try_from(self.components) else {
            return Err(Error::Format("velocity snapshot needs 3 components".into()));
        };
        Ok(VectorField::from_coeffs(self.grid, comps)?.with_time(self.time))
    }
}

pub fn write_snapshot<W: Write>(mut out: W, snap: &Snapshot) -> Result<()> {
    let grid = snap.grid;
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(grid.n() as u32).to_le_bytes())?;
    out.write_all(&grid.box_length().to_le_bytes())?;
    out.write_all(&snap.time.to_le_bytes())?;
    out.write_all(&(snap.components.len() as u32).to_le_bytes())?;
    let mut buf = Vec::with_capacity(grid.spectral_len() * 16);
    for comp in &snap.components {
        if comp.len() != grid.spectral_len() {
            return Err(Error::Structure("snapshot component length mismatch".into()));
        }
        buf.clear();
        for c in comp {
            buf.extend_from_slice(&c.re.to_le_bytes());
            buf.extend_from_slice(&c.im.to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_snapshot<R: Read>(mut input: R) -> Result<Snapshot> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let version = read_u32(&mut input)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported snapshot version {version}")));
    }
    let n = read_u32(&mut input)? as usize;
    let box_length = read_f64(&mut input)?;
    let time = read_f64(&mut input)?;
    let count = read_u32(&mut input)? as usize;
    let grid = Grid::new(n, box_length).map_err(|e| Error::Format(e.to_string()))?;
    if count == 0 || count > 9 {
        return Err(Error::Format(format!("implausible component count {count}")));
    }
    let len = grid.spectral_len();
    let mut bytes = vec![0u8; len * 16];
    let mut components = Vec::with_capacity(count);
    for _ in 0..count {
        input.read_exact(&mut bytes)?;
        let comp = bytes
            .chunks_exact(16)
            .map(|b| {
                let re = f64::from_le_bytes(b[..8].try_into().unwrap());
                let im = f64::from_le_bytes(b[8..].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect();
        components.push(comp);
    }
    Ok(Snapshot { grid, time, components })
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_header() {
        let g = Grid::new(8, 3.0).unwrap();
        let u = VectorField::from_fn(g, |x| [x[1].sin(), x[2].cos(), 0.5]);
        let mut bytes = Vec::new();
        write_snapshot(&mut bytes, &Snapshot::of(&u, 0.25)).unwrap();
        assert_eq!(&bytes[..4], b"NSCF");
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 8);
        assert_eq!(bytes.len(), 4 + 4 + 4 + 8 + 8 + 4 + 3 * g.spectral_len() * 16);
        let back = read_snapshot(&bytes[..]).unwrap();
        assert_eq!(back.time, 0.25);
        assert_eq!(back.into_velocity().unwrap().comps(), u.comps());
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(read_snapshot(&b"XXXX"[..]), Err(Error::Format(_))));
        assert!(read_snapshot(&b"NSCF\x01\x00\x00\x00"[..]).is_err());
    }
}
