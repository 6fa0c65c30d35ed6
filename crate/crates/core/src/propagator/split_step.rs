use num_complex::Complex64;

use super::potential::PotentialField;
use crate::error::{Error, Result};
use crate::fourier::{fft_in_place, kinetic_phase, wrap, FourierField};

/// Strang splitting on the odd grid `K = 2 cutoff + 1`:
/// half kinetic phase, potential phase `e^{-i V(t_mid) h}` in sample space,
/// half kinetic phase. Every factor is unitary on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitStep {
    pub dt: f64,
    pub cutoff: usize,
}

impl SplitStep {
    pub fn new(dt: f64, cutoff: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("time step {dt}")));
        }
        Ok(Self { dt, cutoff })
    }

    pub fn grid_points(&self) -> usize {
        2 * self.cutoff + 1
    }

    /// Nodes from `s` to `t`: the endpoints plus every multiple of `dt`
    /// strictly between them. Anchoring the mesh at zero makes
    /// `U(t, r) U(r, s) = U(t, s)` hold at roundoff for mesh points `r`.
    pub fn anchored_nodes(&self, s: f64, t: f64) -> Vec<f64> {
        let (lo, hi) = (s.min(t), s.max(t));
        let mut nodes = vec![lo];
        let mut j = (lo / self.dt).floor() as i64 + 1;
        loop {
            let x = j as f64 * self.dt;
            if x >= hi - 1e-14 * self.dt.max(hi.abs()) {
                break;
            }
            if x > lo + 1e-14 * self.dt.max(lo.abs()) {
                nodes.push(x);
            }
            j += 1;
        }
        if hi > lo {
            nodes.push(hi);
        }
        if s > t {
            nodes.reverse();
        }
        nodes
    }

    pub fn evolve(&self, phi: &FourierField, v: &PotentialField, s: f64, t: f64) -> Result<FourierField> {
        self.evolve_through(phi, v, &self.anchored_nodes(s, t))
    }

    /// One Strang step per consecutive pair of `nodes`.
    pub fn evolve_through(&self, phi: &FourierField, v: &PotentialField, nodes: &[f64]) -> Result<FourierField> {
        let mut out = None;
        self.evolve_with(phi, v, nodes, |i, c| {
            if i + 1 == nodes.len() {
                out = Some(c.to_vec());
            }
        })?;
        let k = self.grid_points();
        let c = out.unwrap_or_else(|| self.load(phi).expect("checked"));
        Ok(FourierField::from_fn(self.cutoff, |n| c[wrap(n, k)]))
    }

    fn load(&self, phi: &FourierField) -> Result<Vec<Complex64>> {
        if phi.cutoff() > self.cutoff {
            return Err(Error::CutoffMismatch {
                left: phi.cutoff(),
                right: self.cutoff,
            });
        }
        let k = self.grid_points();
        let mut c = vec![Complex64::new(0.0, 0.0); k];
        for (n, z) in phi.modes() {
            c[wrap(n, k)] = z;
        }
        Ok(c)
    }

    /// Evolves through `nodes`, calling `visit(i, coeffs)` at every node with
    /// the coefficients in DFT order (`coeffs[wrap(n, K)]` is the `e_n` coefficient).
    pub fn evolve_with(
        &self,
        phi: &FourierField,
        v: &PotentialField,
        nodes: &[f64],
        mut visit: impl FnMut(usize, &[Complex64]),
    ) -> Result<()> {
        let Some((&first, &last)) = nodes.first().zip(nodes.last()) else {
            return Ok(());
        };
        v.covers(first, last)?;
        let mut c = self.load(phi)?;
        let v = v.resampled(self.grid_points());
        let mut stepper = Stepper::new(self.cutoff);
        visit(0, &c);
        for (i, w) in nodes.windows(2).enumerate() {
            stepper.step(&mut c, &v, w[0], w[1]);
            visit(i + 1, &c);
        }
        Ok(())
    }
}

/// Scratch space for repeated Strang steps on one grid.
pub(crate) struct Stepper {
    cutoff: usize,
    k: usize,
    samples: Vec<Complex64>,
    row: Vec<f64>,
    half: f64,
    phases: Vec<Complex64>,
}

impl Stepper {
    pub(crate) fn new(cutoff: usize) -> Self {
        let k = 2 * cutoff + 1;
        Self {
            cutoff,
            k,
            samples: vec![Complex64::new(0.0, 0.0); k],
            row: Vec::with_capacity(k),
            half: f64::NAN,
            phases: vec![Complex64::new(1.0, 0.0); k],
        }
    }

    pub(crate) fn kinetic(&mut self, c: &mut [Complex64], tau: f64) {
        if tau != self.half {
            let m = self.cutoff as i64;
            for n in -m..=m {
                self.phases[wrap(n, self.k)] = kinetic_phase(n, tau);
            }
            self.half = tau;
        }
        for (z, p) in c.iter_mut().zip(&self.phases) {
            *z *= p;
        }
    }

    /// Multiplies the field by `e^{-i h V_k}` pointwise.
    pub(crate) fn potential(&mut self, c: &mut [Complex64], potential: &[f64], h: f64) {
        self.samples.copy_from_slice(c);
        fft_in_place(&mut self.samples, true);
        let scale = 1.0 / self.k as f64;
        for (u, v) in self.samples.iter_mut().zip(potential) {
            *u *= Complex64::from_polar(scale, -v * h);
        }
        fft_in_place(&mut self.samples, false);
        c.copy_from_slice(&self.samples);
    }

    pub(crate) fn step(&mut self, c: &mut [Complex64], v: &PotentialField, a: f64, b: f64) {
        let h = b - a;
        self.kinetic(c, h / 2.0);
        let mut row = std::mem::take(&mut self.row);
        v.row_at(0.5 * (a + b), &mut row);
        self.potential(c, &row, h);
        self.row = row;
        self.kinetic(c, h / 2.0);
    }
}

/// Uniform Strang steps from `s` to `t` on the grid of `phi`'s cutoff
/// (or `cutoff`, if larger).
pub fn split_step_evolve(
    phi: &FourierField,
    v: &PotentialField,
    s: f64,
    t: f64,
    steps: usize,
    cutoff: usize,
) -> Result<FourierField> {
    if steps == 0 {
        return Err(Error::InvalidArgument("at least one step is required".into()));
    }
    let dt = ((t - s) / steps as f64).abs().max(f64::MIN_POSITIVE);
    let engine = SplitStep::new(dt, cutoff.max(phi.cutoff()))?;
    let nodes: Vec<f64> = (0..=steps)
        .map(|j| if j == steps { t } else { s + (t - s) * j as f64 / steps as f64 })
        .collect();
    engine.evolve_through(phi, v, &nodes)
}
