//! Thin wrapper over faer's dense eigensolvers.
//!
//! Every call runs sequentially so a single diagonalization is bitwise
//! reproducible; parallelism lives one level up, across matrices.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::{Mat, Par};

use crate::{Error, Result, C64};

/// Scaling factors of the diagonal similarity `B = D⁻¹ A D`, powers of two.
#[derive(Debug, Clone)]
pub struct Balancing {
    pub scale: Vec<f64>,
}

fn l1(z: C64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Diagonal balancing (row/column norm equalization without permutation),
/// applied in place. Powers of two keep the similarity exact.
pub fn balance(a: &mut Mat<C64>) -> Balancing {
    const RADIX: f64 = 2.0;
    let n = a.nrows();
    let mut scale = vec![1.0; n];
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += l1(a[(j, i)]);
                    r += l1(a[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            // aim for c·f² ≈ r to within a factor of RADIX²
            let mut f = 1.0;
            while c * f * f * RADIX * RADIX < r {
                f *= RADIX;
            }
            while c * f * f > r * RADIX * RADIX {
                f /= RADIX;
            }
            if c * f + r / f < 0.95 * (c + r) {
                converged = false;
                scale[i] *= f;
                for j in 0..n {
                    a[(j, i)] *= f;
                    a[(i, j)] /= f;
                }
            }
        }
    }
    Balancing { scale }
}

fn map_err(e: evd::EvdError) -> Error {
    log::debug!("eigensolver error: {e:?}");
    Error::ConvergenceFailure(None)
}

fn check_finite(a: &Mat<C64>) -> Result<()> {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let z = a[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::PreconditionViolation(format!(
                    "matrix entry ({i}, {j}) is not finite"
                )));
            }
        }
    }
    Ok(())
}

/// All eigenvalues of a general complex matrix (balanced Hessenberg-QR).
pub fn eigenvalues(a: &Mat<C64>) -> Result<Vec<C64>> {
    check_finite(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut b = a.clone();
    balance(&mut b);
    let mut s = faer::diag::Diag::<C64>::zeros(n);
    let req = evd::evd_scratch::<C64>(
        n,
        ComputeEigenvectors::No,
        ComputeEigenvectors::No,
        Par::Seq,
        Default::default(),
    );
    evd::evd_cplx(
        b.as_ref(),
        s.as_mut(),
        None,
        None,
        Par::Seq,
        MemStack::new(&mut MemBuffer::new(req)),
        Default::default(),
    )
    .map_err(map_err)?;
    Ok(s.column_vector().iter().copied().collect())
}

/// Eigenvalues and unit-norm right eigenvectors (columns).
pub fn eigen(a: &Mat<C64>) -> Result<(Vec<C64>, Mat<C64>)> {
    check_finite(a)?;
    let n = a.nrows();
    let mut b = a.clone();
    let bal = balance(&mut b);
    let mut s = faer::diag::Diag::<C64>::zeros(n);
    let mut u = Mat::<C64>::zeros(n, n);
    let req = evd::evd_scratch::<C64>(
        n,
        ComputeEigenvectors::No,
        ComputeEigenvectors::Yes,
        Par::Seq,
        Default::default(),
    );
    evd::evd_cplx(
        b.as_ref(),
        s.as_mut(),
        None,
        Some(u.as_mut()),
        Par::Seq,
        MemStack::new(&mut MemBuffer::new(req)),
        Default::default(),
    )
    .map_err(map_err)?;
    for j in 0..n {
        let mut norm2 = 0.0;
        for i in 0..n {
            u[(i, j)] *= bal.scale[i];
            norm2 += u[(i, j)].norm_sqr();
        }
        let inv = 1.0 / norm2.sqrt();
        for i in 0..n {
            u[(i, j)] *= inv;
        }
    }
    Ok((s.column_vector().iter().copied().collect(), u))
}

/// Eigenvalues of a Hermitian matrix in nondecreasing order (lower triangle
/// is read).
pub fn hermitian_eigenvalues(a: &Mat<C64>) -> Result<Vec<f64>> {
    check_finite(a)?;
    let n = a.nrows();
    let mut s = faer::diag::Diag::<C64>::zeros(n);
    let req = evd::self_adjoint_evd_scratch::<C64>(
        n,
        ComputeEigenvectors::No,
        Par::Seq,
        Default::default(),
    );
    evd::self_adjoint_evd(
        a.as_ref(),
        s.as_mut(),
        None,
        Par::Seq,
        MemStack::new(&mut MemBuffer::new(req)),
        Default::default(),
    )
    .map_err(map_err)?;
    Ok(s.column_vector().iter().map(|z| z.re).collect())
}
