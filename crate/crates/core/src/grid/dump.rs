//! Binary wavefunction dump.
//!
//! Layout (all little-endian): the 16-byte magic `CHERNOFF-WF` padded with
//! NULs, `u32` dimension, one `u32` point count per axis, one `f64` length
//! per axis, then interleaved `f64` (re, im) pairs in storage order.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{Grid, WaveFunction};
use crate::error::{ChernoffError, Result};

pub const DUMP_MAGIC: [u8; 16] = *b"CHERNOFF-WF\0\0\0\0\0";

pub fn write_dump<W: Write>(f: &WaveFunction, mut out: W) -> Result<()> {
    let grid = f.grid();
    out.write_all(&DUMP_MAGIC)?;
    out.write_all(&(grid.dim() as u32).to_le_bytes())?;
    for &n in grid.n_points() {
        out.write_all(&(n as u32).to_le_bytes())?;
    }
    for &l in grid.length() {
        out.write_all(&l.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(16 * f.values().len());
    for v in f.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_dump<R: Read>(mut input: R) -> Result<WaveFunction> {
    let mut magic = [0u8; 16];
    read_exact(&mut input, &mut magic, "magic")?;
    if magic != DUMP_MAGIC {
        return Err(ChernoffError::BadDump("bad magic".into()));
    }
    let d = read_u32(&mut input)? as usize;
    if d == 0 || d > 16 {
        return Err(ChernoffError::BadDump(format!("implausible dimension {d}")));
    }
    let n_points = (0..d).map(|_| read_u32(&mut input).map(|n| n as usize)).collect::<Result<Vec<_>>>()?;
    let length = (0..d).map(|_| read_f64(&mut input)).collect::<Result<Vec<_>>>()?;
    let grid = Grid::new(&n_points, &length).map_err(|e| ChernoffError::BadDump(e.to_string()))?;
    let mut raw = vec![0u8; 16 * grid.total_size()];
    read_exact(&mut input, &mut raw, "values")?;
    let values = raw
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    let mut trailing = [0u8; 1];
    if input.read(&mut trailing)? != 0 {
        return Err(ChernoffError::BadDump("trailing bytes".into()));
    }
    WaveFunction::new(&grid, values)
}

fn read_exact<R: Read>(input: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    input.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => ChernoffError::BadDump(format!("truncated {what}")),
        _ => ChernoffError::Io(e),
    })
}

fn read_u32<R: Read>(input: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(input, &mut b, "header")?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(input: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    read_exact(input, &mut b, "header")?;
    Ok(f64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::random_wave;
    use proptest::prelude::*;

    #[test]
    fn header_layout_is_fixed() {
        let g = Grid::new(&[2, 1], &[1.5, 4.0]).unwrap();
        let f = WaveFunction::new(&g, vec![Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.25)]).unwrap();
        let mut bytes = Vec::new();
        write_dump(&f, &mut bytes).unwrap();
        assert_eq!(&bytes[..16], b"CHERNOFF-WF\0\0\0\0\0");
        assert_eq!(&bytes[16..20], &2u32.to_le_bytes());
        assert_eq!(&bytes[20..24], &2u32.to_le_bytes());
        assert_eq!(&bytes[24..28], &1u32.to_le_bytes());
        assert_eq!(&bytes[28..36], &1.5f64.to_le_bytes());
        assert_eq!(&bytes[36..44], &4.0f64.to_le_bytes());
        assert_eq!(&bytes[44..52], &1.0f64.to_le_bytes());
        assert_eq!(&bytes[52..60], &(-2.0f64).to_le_bytes());
        assert_eq!(bytes.len(), 44 + 32);
    }

    #[test]
    fn rejects_corrupt_input() {
        let g = Grid::line(4, 1.0).unwrap();
        let mut bytes = Vec::new();
        write_dump(&WaveFunction::zeros(&g), &mut bytes).unwrap();
        assert!(read_dump(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(read_dump(extra.as_slice()).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(read_dump(bad.as_slice()).is_err());
    }

    proptest! {
        #[test]
        fn dump_round_trip(n0 in 1usize..9, n1 in 1usize..5, seed in 0u64..1000) {
            let g = Grid::new(&[n0, n1], &[1.0 + n0 as f64, 0.5]).unwrap();
            let f = random_wave(&g, seed);
            let mut bytes = Vec::new();
            write_dump(&f, &mut bytes).unwrap();
            let back = read_dump(bytes.as_slice()).unwrap();
            prop_assert_eq!(back.grid(), f.grid());
            prop_assert_eq!(back.values(), f.values());
        }
    }
}
