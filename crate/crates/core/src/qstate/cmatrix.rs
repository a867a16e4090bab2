use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, RealMatrix};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self { rows, cols, data }
    }

    pub fn from_real(m: &RealMatrix) -> Self {
        Self::from_fn(m.rows(), m.cols(), |r, c| Complex64::new(m.get(r, c), 0.0))
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let other_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `out = self · v`, with `out` and `v` of matching lengths.
    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    pub fn kron(&self, other: &CMatrix) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        Self::from_fn(rows, cols, |r, c| {
            self.get(r / other.rows, c / other.cols) * other.get(r % other.rows, c % other.cols)
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> Result<f64> {
        let gram = self.adjoint().matmul(self)?;
        let top = gram
            .hermitian_eigenvalues()?
            .into_iter()
            .fold(0.0_f64, f64::max);
        Ok(top.max(0.0).sqrt())
    }

    /// `max |U†U − I|` entrywise; zero for an exact unitary.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += self.data[k * n + i].conj() * self.data[k * n + j];
                }
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    fn is_real(&self) -> bool {
        self.data.iter().all(|v| v.im == 0.0)
    }

    fn real_part(&self) -> RealMatrix {
        let mut m = RealMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c).re);
            }
        }
        m
    }

    /// `[[A, −B], [B, A]]` for `self = A + iB`.
    fn real_embedding(&self) -> RealMatrix {
        let n = self.rows;
        let mut m = RealMatrix::zeros(2 * n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                let z = self.get(r, c);
                m.set(r, c, z.re);
                m.set(r + n, c + n, z.re);
                m.set(r, c + n, -z.im);
                m.set(r + n, c, z.im);
            }
        }
        m
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        self.require_square()?;
        if self.is_real() {
            return Ok(symmetric_eigen(&self.real_part())?.values);
        }
        // The real embedding repeats every eigenvalue twice.
        let doubled = symmetric_eigen(&self.real_embedding())?.values;
        Ok(doubled.into_iter().step_by(2).collect())
    }

    /// `f(H)` for Hermitian `H` through its spectral decomposition.
    pub fn hermitian_map(&self, f: impl Fn(f64) -> Complex64) -> Result<CMatrix> {
        self.require_square()?;
        let n = self.rows;
        if self.is_real() {
            let eig = symmetric_eigen(&self.real_part())?;
            let fv: Vec<Complex64> = eig.values.iter().map(|&x| f(x)).collect();
            return Ok(Self::from_fn(n, n, |r, c| {
                (0..n)
                    .map(|k| fv[k] * eig.vectors.get(r, k) * eig.vectors.get(c, k))
                    .sum()
            }));
        }
        // g(H) for real g lifts to g of the embedding; split f into Re and Im.
        let eig = symmetric_eigen(&self.real_embedding())?;
        let lift = |g: &dyn Fn(f64) -> f64| -> CMatrix {
            let gv: Vec<f64> = eig.values.iter().map(|&x| g(x)).collect();
            let block = |r: usize, c: usize| -> f64 {
                (0..2 * n)
                    .map(|k| gv[k] * eig.vectors.get(r, k) * eig.vectors.get(c, k))
                    .sum()
            };
            Self::from_fn(n, n, |r, c| Complex64::new(block(r, c), block(r + n, c)))
        };
        let re = lift(&|x| f(x).re);
        let im = lift(&|x| f(x).im);
        let i = Complex64::new(0.0, 1.0);
        Ok(Self::from_fn(n, n, |r, c| re.get(r, c) + i * im.get(r, c)))
    }

    /// `self^(2^k)` by repeated squaring.
    pub fn pow2(&self, k: u32) -> Result<CMatrix> {
        let mut m = self.clone();
        for _ in 0..k {
            m = m.matmul(&m)?;
        }
        Ok(m)
    }

    fn require_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::Dimension {
                expected: self.rows,
                got: self.cols,
            });
        }
        Ok(())
    }
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_fn(2, 2, |r, c| if r != c { ONE } else { ZERO })
}

pub fn hadamard() -> CMatrix {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    CMatrix::from_fn(2, 2, |r, c| if r == 1 && c == 1 { -h } else { h })
}

/// Real rotation sending `|0⟩` to `√(1−f²)|0⟩ + f|1⟩`.
pub fn ry_amplitude(f: f64) -> CMatrix {
    let g = (1.0 - f * f).max(0.0).sqrt();
    CMatrix::from_fn(2, 2, |r, c| {
        let v = match (r, c) {
            (0, 0) | (1, 1) => g,
            (1, 0) => f,
            _ => -f,
        };
        Complex64::new(v, 0.0)
    })
}
