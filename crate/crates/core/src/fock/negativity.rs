use nalgebra::DMatrix;
use num_complex::Complex64;
use petgraph::unionfind::UnionFind;

use super::state::hermitian_eigenvalues;
use super::{FockDensityOp, FockError, TruncationPolicy};

/// PT eigenvalues above `-NEGATIVE_EIGENVALUE_THRESHOLD` count as zero.
pub const NEGATIVE_EIGENVALUE_THRESHOLD: f64 = 1e-10;

/// Partial transpose with respect to mode 2:
/// `⟨m₁,m₂|ρ^Γ|n₁,n₂⟩ = ⟨m₁,n₂|ρ|n₁,m₂⟩`.
pub fn partial_transpose(rho: &FockDensityOp) -> DMatrix<Complex64> {
    let d2 = rho.cutoff2() + 1;
    let dim = rho.dim();
    let m = rho.matrix();
    DMatrix::from_fn(dim, dim, |r, c| {
        let (m1, m2) = (r / d2, r % d2);
        let (n1, n2) = (c / d2, c % d2);
        m[(m1 * d2 + n2, n1 * d2 + m2)]
    })
}

/// Eigenvalues of `ρ^Γ`, ascending.
///
/// The matrix is split into the connected components of its sparsity graph
/// and each block is diagonalised on its own.
pub fn pt_eigenvalues(rho: &FockDensityOp) -> Vec<f64> {
    let pt = partial_transpose(rho);
    let dim = pt.nrows();
    let zero = Complex64::new(0.0, 0.0);
    let mut uf = UnionFind::<usize>::new(dim);
    for c in 0..dim {
        for r in (c + 1)..dim {
            if pt[(r, c)] != zero {
                uf.union(r, c);
            }
        }
    }
    let labels = uf.into_labeling();
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (i, root) in labels.into_iter().enumerate() {
        groups.entry(root).or_default().push(i);
    }
    let mut ev = Vec::with_capacity(dim);
    for idx in groups.values() {
        if idx.len() == 1 {
            ev.push(pt[(idx[0], idx[0])].re);
            continue;
        }
        let block = DMatrix::from_fn(idx.len(), idx.len(), |r, c| pt[(idx[r], idx[c])]);
        ev.extend(hermitian_eigenvalues(&block));
    }
    ev.sort_by(f64::total_cmp);
    ev
}

/// Sum of the magnitudes of the negative PT eigenvalues.
pub fn negativity_fock(rho: &FockDensityOp) -> f64 {
    pt_eigenvalues(rho)
        .into_iter()
        .filter(|&x| x < -NEGATIVE_EIGENVALUE_THRESHOLD)
        .map(|x| -x)
        .sum()
}

/// `log₂(1 + 2N)`.
pub fn log_negativity_fock(rho: &FockDensityOp) -> f64 {
    (1.0 + 2.0 * negativity_fock(rho)).log2()
}

/// Outcome of a cutoff-doubling run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergedLogNeg {
    pub e_ln: f64,
    /// Photon cutoff of the last evaluation.
    pub cutoff: usize,
    /// `|E(cutoff) − E(cutoff/2)|`, or infinity if only one cutoff was tried.
    pub change: f64,
    pub trace_deficit: f64,
    pub converged: bool,
}

impl ConvergedLogNeg {
    pub fn require_converged(self, tol: f64) -> Result<Self, FockError> {
        if self.converged {
            Ok(self)
        } else {
            Err(FockError::NonConverged {
                cutoff: self.cutoff,
                value: self.e_ln,
                previous: self.e_ln - self.change,
                tol,
            })
        }
    }
}

/// Evaluates E_LN at `policy.total_photon_cutoff` and keeps doubling the
/// cutoff until two successive values agree within `policy.convergence_tol`
/// or the next cutoff would exceed `policy.max_total_photon_cutoff`.
pub fn converge_log_negativity<F>(
    policy: &TruncationPolicy,
    mut state_at: F,
) -> Result<ConvergedLogNeg, FockError>
where
    F: FnMut(usize) -> Result<FockDensityOp, FockError>,
{
    policy.validate()?;
    let mut cutoff = policy.total_photon_cutoff;
    let rho = state_at(cutoff)?;
    let mut e_prev = log_negativity_fock(&rho);
    let mut result = ConvergedLogNeg {
        e_ln: e_prev,
        cutoff,
        change: f64::INFINITY,
        trace_deficit: rho.trace_deficit(),
        converged: false,
    };
    while 2 * cutoff <= policy.max_total_photon_cutoff {
        cutoff *= 2;
        let rho = state_at(cutoff)?;
        let e = log_negativity_fock(&rho);
        let change = (e - e_prev).abs();
        result = ConvergedLogNeg {
            e_ln: e,
            cutoff,
            change,
            trace_deficit: rho.trace_deficit(),
            converged: change <= policy.convergence_tol,
        };
        if result.converged {
            break;
        }
        e_prev = e;
    }
    Ok(result)
}
