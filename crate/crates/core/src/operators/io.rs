//! Plain-text operator container.
//!
//! ```text
//! torus-density-operator v1
//! cutoff 2
//! hermitian true
//! <re> <im>        # (2M+1)^2 lines, row-major, rows m = -M..M, columns n = -M..M
//! ```
//!
//! Numbers use Rust's shortest round-trip formatting, so a write/read cycle is lossless.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{CMatrix, DensityOperator};
use crate::error::{Error, Result};

const MAGIC: &str = "torus-density-operator v1";

pub fn to_writer(op: &DensityOperator, mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "cutoff {}", op.cutoff())?;
    writeln!(w, "hermitian {}", op.is_hermitian())?;
    for z in op.matrix().as_slice() {
        writeln!(w, "{:e} {:e}", z.re, z.im)?;
    }
    Ok(())
}

pub fn from_reader(r: impl Read) -> Result<DensityOperator> {
    let mut lines = BufReader::new(r).lines();
    let mut next = |what: &str| -> Result<String> {
        lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what}")))?
            .map_err(|e| Error::Parse(e.to_string()))
    };
    if next("header")?.trim() != MAGIC {
        return Err(Error::Parse("not an operator container".into()));
    }
    let cutoff: usize = field(&next("cutoff")?, "cutoff")?;
    let hermitian: bool = field(&next("hermitian flag")?, "hermitian")?;
    let d = 2 * cutoff + 1;
    let mut data = Vec::with_capacity(d * d);
    for i in 0..d * d {
        let line = next("matrix entry")?;
        let mut parts = line.split_whitespace();
        let mut num = || -> Result<f64> {
            parts
                .next()
                .ok_or_else(|| Error::Parse(format!("entry {i} incomplete")))?
                .parse()
                .map_err(|e| Error::Parse(format!("entry {i}: {e}")))
        };
        data.push(Complex64::new(num()?, num()?));
    }
    let op = DensityOperator::new(cutoff, CMatrix::from_row_major(d, data).expect("sized"))?;
    if hermitian && !op.is_hermitian() {
        return Err(Error::Parse("header claims a Hermitian matrix".into()));
    }
    Ok(op)
}

fn field<T: std::str::FromStr>(line: &str, key: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let rest = line
        .trim()
        .strip_prefix(key)
        .ok_or_else(|| Error::Parse(format!("expected `{key}`, got `{line}`")))?;
    rest.trim()
        .parse()
        .map_err(|e| Error::Parse(format!("{key}: {e}")))
}

pub fn write_operator(path: impl AsRef<Path>, op: &DensityOperator) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    to_writer(op, &mut w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_operator(path: impl AsRef<Path>) -> Result<DensityOperator> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    from_reader(file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_is_lossless() {
        let a = DensityOperator::random_hermitian(3, 3, &mut ChaCha8Rng::seed_from_u64(2));
        let mut buf = Vec::new();
        to_writer(&a, &mut buf).unwrap();
        let b = from_reader(buf.as_slice()).unwrap();
        assert_eq!(a, b);
        assert!(b.is_hermitian());
    }

    #[test]
    fn rejects_truncated_input() {
        let text = format!("{MAGIC}\ncutoff 1\nhermitian false\n1 0\n");
        assert!(matches!(from_reader(text.as_bytes()), Err(Error::Parse(_))));
        assert!(from_reader("garbage".as_bytes()).is_err());
    }
}
