//! Factorization of `M ∈ U(N)` into two-level `SU(2)` rotations and a
//! diagonal phase shift,
//!
//! ```text
//! M = R_{N-1,N-2} · R_{N-1,N-3} ⋯ R_{N-1,0} · R_{N-2,N-3} ⋯ R_{1,0} · Φ
//! ```
//!
//! The rotations are found by Givens-style elimination: for each column
//! `i` from the right, the entries above the diagonal are folded one at a
//! time into row `i`. Each folding kernel is in `SU(2)`, and its adjoint is
//! the corresponding `R_{i,j}`. When all columns are done the remaining
//! matrix is diagonal with unit-modulus entries, which is `Φ`.

use num_complex::Complex64;

use crate::embedding::{merge_within, SubspaceRotation};
use crate::error::{Error, Result};
use crate::linalg::{dist_phase, ComplexMatrix, PhaseShift, ZERO};

/// Kernels closer than this to the identity are dropped.
pub const IDENTITY_SKIP_TOL: f64 = 1e-12;

/// Output of [`reck_decompose`].
#[derive(Clone, Debug)]
pub struct DecompositionResult {
    /// Two-level rotations in product order: the first entry is the
    /// leftmost factor.
    pub rotations: Vec<SubspaceRotation>,
    pub phase: PhaseShift,
    /// Phase-insensitive Frobenius distance between the reconstruction and
    /// the input.
    pub residual: f64,
}

impl DecompositionResult {
    pub fn dim(&self) -> usize {
        self.phase.dim()
    }
}

/// Kernel `W ∈ SU(2)` with `W·(x, y)ᵀ = (0, ‖(x,y)‖·e^{i arg y})ᵀ`.
///
/// The phase of `y` is pulled into the kernel so that `W → I` as `x → 0`.
fn folding_kernel(x: Complex64, y: Complex64) -> ComplexMatrix {
    let norm = x.norm().hypot(y.norm());
    let beta = if y == ZERO {
        Complex64::new(1.0, 0.0)
    } else {
        y / y.norm()
    };
    let ay = Complex64::new(y.norm() / norm, 0.0);
    let xs = x / norm;
    ComplexMatrix::new(2, vec![ay, -xs * beta.conj(), xs.conj() * beta, ay]).expect("2x2 kernel")
}

/// Decomposes `m` into at most `N(N−1)/2` two-level rotations and `Φ`.
///
/// `tol` is the unitarity tolerance for the input; the reconstruction
/// residual must come in under `tol · N` or the call fails.
pub fn reck_decompose(m: &ComplexMatrix, tol: f64) -> Result<DecompositionResult> {
    let dev = m.unitarity_deviation();
    if dev > tol {
        return Err(Error::NotUnitary { deviation: dev });
    }
    let n = m.dim();
    let mut work = m.clone();
    let mut rotations = Vec::new();
    for i in (1..n).rev() {
        for j in (0..i).rev() {
            let x = work[(j, i)];
            if x == ZERO {
                continue;
            }
            let w = folding_kernel(x, work[(i, i)]);
            if w.is_identity(IDENTITY_SKIP_TOL) {
                continue;
            }
            let fold = SubspaceRotation::two_level(n, i, j, w)?;
            fold.apply_left(&mut work);
            rotations.push(SubspaceRotation::two_level(
                n,
                i,
                j,
                fold.kernel().adjoint(),
            )?);
        }
    }

    let off_diagonal = (0..n)
        .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
        .map(|rc| work[rc].norm())
        .fold(0.0, f64::max);
    if off_diagonal > tol.max(1e-6) {
        return Err(Error::NonConvergent {
            residual: off_diagonal,
        });
    }
    let phase = PhaseShift {
        phases: (0..n).map(|k| work[(k, k)].arg()).collect(),
    };

    let mut result = DecompositionResult {
        rotations,
        phase,
        residual: 0.0,
    };
    result.residual = dist_phase(&reck_reconstruct(&result), m)?;
    if result.residual > tol * n as f64 {
        return Err(Error::NonConvergent {
            residual: result.residual,
        });
    }
    Ok(result)
}

/// `(∏ R) · Φ`.
pub fn reck_reconstruct(d: &DecompositionResult) -> ComplexMatrix {
    reconstruct_from(&d.rotations, &d.phase)
}

/// Product of `rotations` in list order, times `phase`.
pub fn reconstruct_from(rotations: &[SubspaceRotation], phase: &PhaseShift) -> ComplexMatrix {
    let mut acc = phase.to_matrix();
    for rot in rotations.iter().rev() {
        rot.apply_left(&mut acc);
    }
    acc
}

/// Regroups a two-level decomposition into three-level rotations.
///
/// Rotations are scanned left to right; the current group keeps absorbing
/// the next rotation as long as the union of their indices has at most
/// three elements (this covers the chained `R_{p,q} R_{q,r}` pattern as
/// well as pairs sharing their first index). A finished group with fewer
/// than three indices is widened with the smallest unused index, on which
/// it acts as the identity. Leftovers are therefore always empty; the
/// second element of the tuple is kept for callers that split differently.
pub fn pair_three_level(
    d: &DecompositionResult,
) -> Result<(Vec<SubspaceRotation>, Vec<SubspaceRotation>)> {
    let n = d.dim();
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    if let Some(bad) = d.rotations.iter().find(|r| r.arity() != 2) {
        return Err(Error::InvalidIndices(bad.indices().to_vec()));
    }

    let mut threes = Vec::new();
    let mut current: Option<SubspaceRotation> = None;
    for rot in &d.rotations {
        current = Some(match current.take() {
            None => rot.clone(),
            Some(group) => {
                if union_size(group.indices(), rot.indices()) <= 3 {
                    merge_within(&group, rot)?
                } else {
                    threes.push(widen_to_three(&group)?);
                    rot.clone()
                }
            }
        });
    }
    if let Some(group) = current {
        threes.push(widen_to_three(&group)?);
    }
    Ok((threes, Vec::new()))
}

fn union_size(a: &[usize], b: &[usize]) -> usize {
    a.len() + b.iter().filter(|i| !a.contains(i)).count()
}

fn widen_to_three(rot: &SubspaceRotation) -> Result<SubspaceRotation> {
    let missing = 3 - rot.arity();
    let extra: Vec<usize> = (0..rot.ambient_dim())
        .filter(|i| !rot.indices().contains(i))
        .take(missing)
        .collect();
    rot.extend_to(&extra)
}
