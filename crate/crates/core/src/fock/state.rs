use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::FockError;

/// Tolerance on `ρ = ρ†`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Two-mode density operator on a truncated Fock box.
///
/// Row `(m₁, m₂)` and column `(n₁, n₂)` map to `m₁·(cutoff2+1) + m₂` and
/// `n₁·(cutoff2+1) + n₂`. `trace_deficit` is the probability that truncation
/// has removed from the state so far.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityOp {
    cutoff1: usize,
    cutoff2: usize,
    matrix: DMatrix<Complex64>,
    trace_deficit: f64,
}

impl FockDensityOp {
    pub fn from_matrix(
        cutoff1: usize,
        cutoff2: usize,
        matrix: DMatrix<Complex64>,
        trace_deficit: f64,
    ) -> Result<Self, FockError> {
        let dim = (cutoff1 + 1) * (cutoff2 + 1);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(FockError::DimensionMismatch(format!(
                "expected {dim}x{dim} for cutoffs ({cutoff1}, {cutoff2}), got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL * matrix.iter().map(|z| z.norm()).fold(1.0, f64::max) {
            return Err(FockError::NotHermitian(dev));
        }
        if !(trace_deficit.is_finite() && trace_deficit >= -1e-12) {
            return Err(FockError::InvalidParameter(format!(
                "trace deficit {trace_deficit}"
            )));
        }
        Ok(Self {
            cutoff1,
            cutoff2,
            matrix,
            trace_deficit: trace_deficit.max(0.0),
        })
    }

    pub(crate) fn from_parts_unchecked(
        cutoff1: usize,
        cutoff2: usize,
        matrix: DMatrix<Complex64>,
        trace_deficit: f64,
    ) -> Self {
        debug_assert_eq!(matrix.nrows(), (cutoff1 + 1) * (cutoff2 + 1));
        Self {
            cutoff1,
            cutoff2,
            matrix,
            trace_deficit: trace_deficit.max(0.0),
        }
    }

    /// Projector onto `Σ ψ(m₁,m₂) |m₁,m₂⟩`.
    pub fn from_pure<F>(cutoff1: usize, cutoff2: usize, trace_deficit: f64, amplitude: F) -> Self
    where
        F: Fn(usize, usize) -> Complex64,
    {
        let d2 = cutoff2 + 1;
        let dim = (cutoff1 + 1) * d2;
        let psi: Vec<Complex64> = (0..dim).map(|i| amplitude(i / d2, i % d2)).collect();
        let matrix = DMatrix::from_fn(dim, dim, |r, c| psi[r] * psi[c].conj());
        Self::from_parts_unchecked(cutoff1, cutoff2, matrix, trace_deficit)
    }

    pub fn cutoff1(&self) -> usize {
        self.cutoff1
    }

    pub fn cutoff2(&self) -> usize {
        self.cutoff2
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace_deficit(&self) -> f64 {
        self.trace_deficit
    }

    #[inline]
    pub fn index(&self, m1: usize, m2: usize) -> usize {
        m1 * (self.cutoff2 + 1) + m2
    }

    /// `⟨m₁,m₂|ρ|n₁,n₂⟩`, zero outside the box.
    pub fn element(&self, m1: usize, m2: usize, n1: usize, n2: usize) -> Complex64 {
        if m1 > self.cutoff1 || n1 > self.cutoff1 || m2 > self.cutoff2 || n2 > self.cutoff2 {
            return Complex64::new(0.0, 0.0);
        }
        self.matrix[(self.index(m1, m2), self.index(n1, n2))]
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Photon-number distribution of mode 2.
    pub fn mode2_distribution(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.cutoff2 + 1];
        for m1 in 0..=self.cutoff1 {
            for (m2, slot) in p.iter_mut().enumerate() {
                let i = self.index(m1, m2);
                *slot += self.matrix[(i, i)].re;
            }
        }
        p
    }

    /// Same state on a different box. Entries outside the new box are dropped
    /// and their weight is added to the deficit.
    pub fn resized(&self, cutoff1: usize, cutoff2: usize) -> Self {
        let d2 = cutoff2 + 1;
        let dim = (cutoff1 + 1) * d2;
        let matrix = DMatrix::from_fn(dim, dim, |r, c| {
            self.element(r / d2, r % d2, c / d2, c % d2)
        });
        let kept: f64 = matrix.diagonal().iter().map(|z| z.re).sum();
        let deficit = self.trace_deficit + (self.trace() - kept);
        Self::from_parts_unchecked(cutoff1, cutoff2, matrix, deficit)
    }

    /// Dumps the non-zero entries as `row col re im` lines with a
    /// Matrix-Market style header. Indices are 1-based.
    pub fn write_triplets<W: Write>(&self, mut out: W) -> io::Result<()> {
        let nnz = self.matrix.iter().filter(|z| z.norm() > 0.0).count();
        writeln!(
            out,
            "%%MatrixMarket matrix coordinate complex hermitian-as-general"
        )?;
        writeln!(
            out,
            "% cutoff1={} cutoff2={} trace_deficit={:e}",
            self.cutoff1, self.cutoff2, self.trace_deficit
        )?;
        writeln!(out, "{} {} {}", self.dim(), self.dim(), nnz)?;
        for c in 0..self.dim() {
            for r in 0..self.dim() {
                let z = self.matrix[(r, c)];
                if z.norm() > 0.0 {
                    writeln!(out, "{} {} {:e} {:e}", r + 1, c + 1, z.re, z.im)?;
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for r in 0..n {
        for c in r..n {
            dev = dev.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    dev
}

/// Eigenvalues of a Hermitian matrix, ascending. Real matrices take the
/// cheaper real-symmetric route.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = if m.iter().all(|z| z.im == 0.0) {
        m.map(|z| z.re)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    } else {
        m.symmetric_eigenvalues().iter().copied().collect()
    };
    ev.sort_by(f64::total_cmp);
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn indexing_and_elements() {
        let rho =
            FockDensityOp::from_pure(
                1,
                2,
                0.0,
                |a, b| if (a, b) == (1, 2) { c(1.0) } else { c(0.0) },
            );
        assert_eq!(rho.dim(), 6);
        assert_eq!(rho.index(1, 2), 5);
        assert_eq!(rho.element(1, 2, 1, 2), c(1.0));
        assert_eq!(rho.element(3, 0, 0, 0), c(0.0));
        assert_eq!(rho.mode2_distribution(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn rejects_bad_matrices() {
        let m = DMatrix::from_element(4, 4, c(0.25));
        assert!(FockDensityOp::from_matrix(1, 1, m.clone(), 0.0).is_ok());
        assert!(matches!(
            FockDensityOp::from_matrix(1, 2, m.clone(), 0.0),
            Err(FockError::DimensionMismatch(_))
        ));
        let mut nh = m;
        nh[(0, 1)] = Complex64::new(0.25, 0.1);
        assert!(matches!(
            FockDensityOp::from_matrix(1, 1, nh, 0.0),
            Err(FockError::NotHermitian(_))
        ));
    }

    #[test]
    fn complex_hermitian_spectrum() {
        // σ_y has eigenvalues ±1
        let mut m = DMatrix::from_element(2, 2, c(0.0));
        m[(0, 1)] = Complex64::new(0.0, -1.0);
        m[(1, 0)] = Complex64::new(0.0, 1.0);
        let ev = hermitian_eigenvalues(&m);
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn resize_tracks_deficit() {
        let amp = |a: usize, b: usize| c(if a == b { 0.5 } else { 0.0 });
        let rho = FockDensityOp::from_pure(3, 3, 0.0, amp);
        let small = rho.resized(1, 1);
        assert!((small.trace() - 0.5).abs() < 1e-15);
        assert!((small.trace_deficit() - 0.5).abs() < 1e-15);
        let big = small.resized(2, 4);
        assert!((big.trace() - 0.5).abs() < 1e-15);
        assert_eq!(big.element(1, 1, 0, 0), c(0.25));
    }

    #[test]
    fn triplet_dump() {
        let rho = FockDensityOp::from_pure(1, 1, 0.0, |a, b| {
            c(if a + b == 1 {
                std::f64::consts::FRAC_1_SQRT_2
            } else {
                0.0
            })
        });
        let mut buf = Vec::new();
        rho.write_triplets(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[2], "4 4 4");
        assert_eq!(lines.len(), 7);
    }
}
