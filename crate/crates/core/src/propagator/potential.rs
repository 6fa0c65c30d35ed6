//! Real space-time potentials on `[0, T] x T`.
//!
//! Samples sit on `t_j = j T / (nt - 1)` and `x_k = 2 pi k / K`, row-major in
//! time. Values between time samples are linear; in `x` the field is the
//! trigonometric interpolant of its row. With a single time sample the field
//! is constant in time.
//!
//! Text format:
//!
//! ```text
//! torus-density-potential v1
//! horizon <T>
//! times <nt>
//! points <K>
//! <value>            # nt * K lines, row-major in time
//! ```

use std::borrow::Cow;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{fft_in_place, wrap};

const MAGIC: &str = "torus-density-potential v1";

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialField {
    horizon: f64,
    times: usize,
    points: usize,
    values: Vec<f64>,
}

impl PotentialField {
    pub fn new(horizon: f64, times: usize, points: usize, values: Vec<f64>) -> Result<Self> {
        if !(horizon >= 0.0) || !horizon.is_finite() {
            return Err(Error::MalformedGrid(format!("horizon {horizon}")));
        }
        if times == 0 || points == 0 {
            return Err(Error::MalformedGrid(format!("{times} x {points} grid")));
        }
        if times > 1 && horizon == 0.0 {
            return Err(Error::MalformedGrid("several time samples on a zero horizon".into()));
        }
        if values.len() != times * points {
            return Err(Error::MalformedGrid(format!(
                "{} values for a {times} x {points} grid",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::MalformedGrid(format!("non-finite value {bad}")));
        }
        Ok(Self {
            horizon,
            times,
            points,
            values,
        })
    }

    /// Rejects any sample with a nonzero imaginary part.
    pub fn from_complex(horizon: f64, times: usize, points: usize, values: &[Complex64]) -> Result<Self> {
        let max_imag = values.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
        if max_imag > 0.0 {
            return Err(Error::ComplexPotential { max_imag });
        }
        Self::new(horizon, times, points, values.iter().map(|v| v.re).collect())
    }

    pub fn from_fn(horizon: f64, times: usize, points: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(times * points);
        for j in 0..times {
            let t = time_of(j, times, horizon);
            for k in 0..points {
                values.push(f(t, 2.0 * std::f64::consts::PI * k as f64 / points as f64));
            }
        }
        Self::new(horizon, times, points, values)
    }

    pub fn constant(c: f64, horizon: f64) -> Self {
        Self::new(horizon, 1, 1, vec![c]).expect("valid grid")
    }

    pub fn zero(horizon: f64) -> Self {
        Self::constant(0.0, horizon)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn times(&self) -> usize {
        self.times
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self, j: usize) -> f64 {
        time_of(j, self.times, self.horizon)
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.points..(j + 1) * self.points]
    }

    pub fn covers(&self, s: f64, t: f64) -> Result<()> {
        let (lo, hi) = (s.min(t), s.max(t));
        let slack = 1e-12 * self.horizon.max(1.0);
        if lo < -slack || hi > self.horizon + slack || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::WindowViolation {
                start: s,
                end: t,
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    /// `V + c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v + c).collect(),
            ..self.clone()
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * s).collect(),
            ..self.clone()
        }
    }

    /// The same field with every row interpolated onto `points` grid points.
    pub fn resampled(&self, points: usize) -> Cow<'_, PotentialField> {
        if points == self.points {
            return Cow::Borrowed(self);
        }
        let mut values = Vec::with_capacity(self.times * points);
        for j in 0..self.times {
            values.extend(resample_row(self.row(j), points));
        }
        Cow::Owned(Self {
            horizon: self.horizon,
            times: self.times,
            points,
            values,
        })
    }

    /// Row at time `t` (linear in time), written into `out`.
    pub fn row_at(&self, t: f64, out: &mut Vec<f64>) {
        out.clear();
        if self.times == 1 {
            out.extend_from_slice(&self.values);
            return;
        }
        let pos = (t / self.horizon * (self.times - 1) as f64).clamp(0.0, (self.times - 1) as f64);
        let j = (pos.floor() as usize).min(self.times - 2);
        let w = pos - j as f64;
        let (a, b) = (self.row(j), self.row(j + 1));
        out.extend(a.iter().zip(b).map(|(x, y)| (1.0 - w) * x + w * y));
    }

    /// Point value at `(t, x)`, for diagnostics.
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let mut row = Vec::new();
        self.row_at(t, &mut row);
        let coeffs = row_coefficients(&row);
        let k = row.len() as i64;
        let half = (k - 1) / 2;
        let mut acc = Complex64::new(0.0, 0.0);
        for n in -half..=half {
            acc += coeffs[wrap(n, row.len())] * Complex64::from_polar(1.0, n as f64 * x);
        }
        if k % 2 == 0 {
            acc += coeffs[(k / 2) as usize] * (k as f64 / 2.0 * x).cos();
        }
        acc.re
    }

    /// `||V||_{L^2([0, T] x T)}`: trapezoid in time, rectangle rule in space.
    pub fn l2_norm(&self) -> f64 {
        let dx = 2.0 * std::f64::consts::PI / self.points as f64;
        let row_sq = |j: usize| self.row(j).iter().map(|v| v * v).sum::<f64>() * dx;
        if self.times == 1 {
            return (row_sq(0) * self.horizon).sqrt();
        }
        let dt = self.horizon / (self.times - 1) as f64;
        let mut acc = 0.0;
        for j in 0..self.times {
            let w = if j == 0 || j + 1 == self.times { 0.5 } else { 1.0 };
            acc += w * row_sq(j);
        }
        (acc * dt).sqrt()
    }

    pub fn to_writer(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "{MAGIC}")?;
        writeln!(w, "horizon {:e}", self.horizon)?;
        writeln!(w, "times {}", self.times)?;
        writeln!(w, "points {}", self.points)?;
        for v in &self.values {
            writeln!(w, "{v:e}")?;
        }
        Ok(())
    }

    pub fn from_reader(r: impl Read) -> Result<Self> {
        let mut lines = BufReader::new(r).lines();
        let mut next = |what: &str| -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {what}")))?
                .map_err(|e| Error::Parse(e.to_string()))
        };
        if next("header")?.trim() != MAGIC {
            return Err(Error::Parse("not a potential container".into()));
        }
        let horizon: f64 = keyed(&next("horizon")?, "horizon")?;
        let times: usize = keyed(&next("times")?, "times")?;
        let points: usize = keyed(&next("points")?, "points")?;
        let mut values = Vec::with_capacity(times.saturating_mul(points).min(1 << 24));
        for i in 0..times * points {
            let line = next("value")?;
            values.push(
                line.trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("value {i}: {e}")))?,
            );
        }
        Self::new(horizon, times, points, values)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.to_writer(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_reader(File::open(path).map_err(|e| Error::io(path, e))?)
    }
}

fn time_of(j: usize, times: usize, horizon: f64) -> f64 {
    if times == 1 {
        0.0
    } else {
        horizon * j as f64 / (times - 1) as f64
    }
}

fn keyed<T: std::str::FromStr>(line: &str, key: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    line.trim()
        .strip_prefix(key)
        .ok_or_else(|| Error::Parse(format!("expected `{key}`, got `{line}`")))?
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("{key}: {e}")))
}

/// DFT coefficients of a real row, scaled so that `row_k = sum_n c_n e^{i n x_k}`.
fn row_coefficients(row: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = row.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    fft_in_place(&mut buf, false);
    let k = row.len() as f64;
    buf.iter_mut().for_each(|c| *c /= k);
    buf
}

/// Trigonometric interpolation of a real periodic row onto `points` samples.
/// An even-length source splits its Nyquist mode evenly between `+-K/2`.
pub(crate) fn resample_row(row: &[f64], points: usize) -> Vec<f64> {
    let k = row.len();
    if k == points {
        return row.to_vec();
    }
    let coeffs = row_coefficients(row);
    let mut buf = vec![Complex64::new(0.0, 0.0); points];
    let half = ((k - 1) / 2) as i64;
    let keep = half.min(((points - 1) / 2) as i64);
    for n in -keep..=keep {
        buf[wrap(n, points)] += coeffs[wrap(n, k)];
    }
    if k % 2 == 0 {
        let ny = (k / 2) as i64;
        let c = coeffs[k / 2];
        if 2 * ny < points as i64 {
            buf[wrap(ny, points)] += c / 2.0;
            buf[wrap(-ny, points)] += c / 2.0;
        }
    }
    fft_in_place(&mut buf, true);
    buf.iter().map(|c| c.re).collect()
}
