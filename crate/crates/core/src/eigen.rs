use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::ComplexOperator;

/// Off-diagonal threshold at which a sweep is considered converged.
pub const JACOBI_OFFDIAG_TOL: f64 = 1e-13;
/// Hard cap on cyclic sweeps; dimensions here are at most 54.
pub const JACOBI_MAX_SWEEPS: usize = 100;

const HERMITICITY_TOL: f64 = 1e-9;

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, sorted
/// descending.
///
/// Each rotation annihilates one off-diagonal entry: the complex phase of
/// `a_pq` is absorbed first, then a real plane rotation is applied. `tol`
/// bounds the largest off-diagonal modulus (relative to the matrix scale) at
/// convergence.
pub fn hermitian_eigenvalues(m: &Array2<Complex64>, tol: f64) -> Result<Vec<f64>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "eigensolver needs a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    if dev > HERMITICITY_TOL {
        return Err(Error::NotHermitian(dev));
    }

    // Work on the symmetrized copy so sub-tolerance asymmetries cannot drift.
    let mut a = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = 0.5 * (m[(i, j)] + m[(j, i)].conj());
        }
    }

    let scale = a.iter().fold(0.0_f64, |acc, z| acc.max(z.norm())).max(1.0);
    let threshold = tol.max(f64::EPSILON) * scale;

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, p, q);
            }
        }
    }
    if !converged {
        // One final check: the last sweep may have finished the job.
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off > threshold {
            return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
        }
    }

    let mut eigenvalues: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    eigenvalues.sort_by(|x, y| y.partial_cmp(x).expect("eigenvalues are finite"));
    Ok(eigenvalues)
}

/// Single Jacobi rotation annihilating `a[(p, q)]`.
fn rotate(a: &mut Array2<Complex64>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r; // e^{i theta}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Unitary: column p <- c*col_p - s*conj(phase)*col_q,
    //          column q <- s*phase*col_p + c*col_q  (phase folded in).
    let n = a.nrows();
    let ph_conj = phase.conj();
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        let new_kp = akp * c - akq * ph_conj * s;
        let new_kq = akp * phase * s + akq * c;
        a[(k, p)] = new_kp;
        a[(p, k)] = new_kp.conj();
        a[(k, q)] = new_kq;
        a[(q, k)] = new_kq.conj();
    }
    a[(p, p)] = Complex64::new(app - t * r, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * r, 0.0);
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
}

/// Von Neumann entropy in bits, `-sum e_i log2 e_i`.
///
/// Eigenvalues in `[-1e-9, 0)` are clamped to zero; anything more negative
/// signals an invalid state.
pub fn von_neumann_entropy(rho: &ComplexOperator) -> Result<f64> {
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > 1e-9 || trace.im.abs() > 1e-9 {
        return Err(Error::NotNormalized(trace.re));
    }
    let eigenvalues = hermitian_eigenvalues(rho.matrix(), JACOBI_OFFDIAG_TOL)?;
    let mut entropy = 0.0;
    for e in eigenvalues {
        if e < -1e-9 {
            return Err(Error::NegativeEigenvalue(e));
        }
        if e > 1e-15 {
            entropy -= e * e.log2();
        }
    }
    Ok(entropy)
}

/// Trace distance `(1/2) sum |eig(rho - sigma)|`.
///
/// Inputs only need to be Hermitian; unnormalized operators are accepted,
/// which the unitality probe relies on.
pub fn trace_distance(rho: &ComplexOperator, sigma: &ComplexOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(
            "trace distance of operators with different dimensions".into(),
        ));
    }
    let mut diff = rho.clone();
    diff.add_scaled(sigma, -1.0);
    let eigenvalues = hermitian_eigenvalues(diff.matrix(), JACOBI_OFFDIAG_TOL)?;
    Ok(0.5 * eigenvalues.iter().map(|e| e.abs()).sum::<f64>())
}
