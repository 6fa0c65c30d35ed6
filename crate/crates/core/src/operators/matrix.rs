use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Option<Self> {
        (data.len() == dim * dim).then_some(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        let d = self.dim;
        let mut out = CMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let out_row = &mut out.data[i * d..(i + 1) * d];
                for (o, b) in out_row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// `max |a_ij - conj(a_ji)|`.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Principal submatrix on `indices`.
    pub fn submatrix(&self, indices: &[usize]) -> CMatrix {
        CMatrix::from_fn(indices.len(), |i, j| self[(indices[i], indices[j])])
    }

    /// Index sets of the connected components of the sparsity graph
    /// `i ~ j  <=>  a_ij != 0 or a_ji != 0`. The matrix is block diagonal
    /// after the induced permutation.
    pub fn connected_blocks(&self) -> Vec<Vec<usize>> {
        let d = self.dim;
        let mut parent: Vec<usize> = (0..d).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for i in 0..d {
            for j in (i + 1)..d {
                if self[(i, j)] != ZERO || self[(j, i)] != ZERO {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; d];
        for i in 0..d {
            let r = find(&mut parent, i);
            if slot[r] == usize::MAX {
                slot[r] = blocks.len();
                blocks.push(Vec::new());
            }
            blocks[slot[r]].push(i);
        }
        blocks
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Off-diagonal stopping threshold, relative to the Frobenius norm.
pub const JACOBI_THRESHOLD: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 30;

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues (unsorted) and a unitary matrix whose columns are the
/// corresponding eigenvectors. Only the Hermitian part of `a` is used.
pub fn jacobi_eigh(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let d = a.dim();
    let mut m = a.clone();
    let mut v = CMatrix::identity(d);
    let scale = m.frobenius();
    if d <= 1 || scale == 0.0 {
        return ((0..d).map(|i| m[(i, i)].re).collect(), v);
    }
    let tol = JACOBI_THRESHOLD * scale;

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= tol {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE || r < 1e-3 * tol / d as f64 {
                    continue;
                }
                let phase = apq / r;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J: J_pp = J_qq = c, J_pq = s e^{i phi}, J_qp = -s e^{-i phi}.
                let jpq = phase * s;
                let jqp = -phase.conj() * s;
                // M <- M J
                for k in 0..d {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * c + mkq * jqp;
                    m[(k, q)] = mkp * jpq + mkq * c;
                }
                // M <- J^H M
                for k in 0..d {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = mpk * c + mqk * jqp.conj();
                    m[(q, k)] = mpk * jpq.conj() + mqk * c;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
                // V <- V J
                for k in 0..d {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * c;
                }
            }
        }
    }
    ((0..d).map(|i| m[(i, i)].re).collect(), v)
}

/// Eigenvalues of a Hermitian matrix, solving each connected block separately.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.dim());
    for block in a.connected_blocks() {
        if block.len() == 1 {
            out.push(a[(block[0], block[0])].re);
        } else {
            out.extend(jacobi_eigh(&a.submatrix(&block)).0);
        }
    }
    out
}

/// Full eigenpairs of a Hermitian matrix, block by block. Eigenvectors are
/// returned as dense columns of length `dim`.
pub fn hermitian_eigenpairs(a: &CMatrix) -> Vec<(f64, Vec<Complex64>)> {
    let d = a.dim();
    let mut out = Vec::with_capacity(d);
    for block in a.connected_blocks() {
        let (vals, vecs) = jacobi_eigh(&a.submatrix(&block));
        for (j, val) in vals.into_iter().enumerate() {
            let mut full = vec![ZERO; d];
            for (local, &global) in block.iter().enumerate() {
                full[global] = vecs[(local, j)];
            }
            out.push((val, full));
        }
    }
    out
}
