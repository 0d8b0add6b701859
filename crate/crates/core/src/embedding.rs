//! Subspace rotations: small unitaries embedded into `U(N)` so that they
//! act only on a chosen set of basis vectors.
//!
//! Indices are stored strictly decreasing (`p_n > … > p_1`). The kernel's
//! coordinates map onto the indices in *ascending* order: kernel row/column
//! 0 acts on the smallest index. This is the orientation that reproduces
//! the worked matrices such as `T³₁,₀(X)` and `T⁶₄,₂,₀(V)`.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ZERO};

/// Tolerance for the unitarity check on rotation kernels.
pub const KERNEL_TOL: f64 = 1e-10;

/// A unitary kernel acting on a subset of basis vectors of `C^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceRotation {
    ambient_dim: usize,
    indices: Vec<usize>,
    kernel: ComplexMatrix,
}

impl SubspaceRotation {
    /// `indices` must be strictly decreasing, all below `ambient_dim`, and
    /// as many as the kernel's dimension.
    pub fn new(ambient_dim: usize, indices: Vec<usize>, kernel: ComplexMatrix) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= ambient_dim) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                dim: ambient_dim,
            });
        }
        if indices.is_empty() || indices.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidIndices(indices));
        }
        if kernel.dim() != indices.len() {
            return Err(Error::DimensionMismatch {
                expected: indices.len(),
                actual: kernel.dim(),
            });
        }
        let dev = kernel.unitarity_deviation();
        if dev > KERNEL_TOL {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(Self {
            ambient_dim,
            indices,
            kernel,
        })
    }

    /// Two-level rotation `T^N_{p,q}(kernel)` with `p > q`.
    pub fn two_level(
        ambient_dim: usize,
        p: usize,
        q: usize,
        kernel: ComplexMatrix,
    ) -> Result<Self> {
        Self::new(ambient_dim, vec![p, q], kernel)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Indices in decreasing order.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn kernel(&self) -> &ComplexMatrix {
        &self.kernel
    }

    pub fn arity(&self) -> usize {
        self.indices.len()
    }

    /// Indices in the order of the kernel's coordinates (ascending).
    pub fn kernel_basis(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().rev().copied()
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.kernel.is_identity(tol)
    }

    /// Full `N×N` matrix.
    pub fn embed(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::identity(self.ambient_dim);
        let basis: Vec<usize> = self.kernel_basis().collect();
        for (a, &row) in basis.iter().enumerate() {
            for (b, &col) in basis.iter().enumerate() {
                m[(row, col)] = self.kernel[(a, b)];
            }
        }
        m
    }

    /// `target ← embed(self) · target`, touching only the rotated rows.
    pub(crate) fn apply_left(&self, target: &mut ComplexMatrix) {
        let n = self.ambient_dim;
        let basis: Vec<usize> = self.kernel_basis().collect();
        let k = basis.len();
        let mut gathered = vec![ZERO; k];
        for col in 0..n {
            for (a, &row) in basis.iter().enumerate() {
                gathered[a] = target[(row, col)];
            }
            for (a, &row) in basis.iter().enumerate() {
                let mut s = ZERO;
                for (b, g) in gathered.iter().enumerate() {
                    s += self.kernel[(a, b)] * g;
                }
                target[(row, col)] = s;
            }
        }
    }

    /// Extends the kernel with identity action on extra indices.
    pub fn extend_to(&self, extra: &[usize]) -> Result<SubspaceRotation> {
        let mut indices = self.indices.clone();
        indices.extend_from_slice(extra);
        indices.sort_unstable_by(|a, b| b.cmp(a));
        let before = indices.len();
        indices.dedup();
        if indices.len() != before {
            return Err(Error::InvalidIndices(indices));
        }
        let kernel = lift_kernel(&self.kernel, &self.indices, &indices);
        SubspaceRotation::new(self.ambient_dim, indices, kernel)
    }
}

/// Rewrites `kernel` (acting on `from`, decreasing) as a kernel on the
/// larger decreasing index set `onto`, with identity on the added indices.
fn lift_kernel(kernel: &ComplexMatrix, from: &[usize], onto: &[usize]) -> ComplexMatrix {
    let asc_onto: Vec<usize> = onto.iter().rev().copied().collect();
    let pos: Vec<usize> = from
        .iter()
        .rev()
        .map(|i| asc_onto.iter().position(|j| j == i).expect("subset"))
        .collect();
    let mut out = ComplexMatrix::identity(onto.len());
    for (a, &pa) in pos.iter().enumerate() {
        for (b, &pb) in pos.iter().enumerate() {
            out[(pa, pb)] = kernel[(a, b)];
        }
    }
    out
}

pub fn embed(rot: &SubspaceRotation) -> ComplexMatrix {
    rot.embed()
}

/// `T_S(A)·T_S(B) = T_S(AB)` for rotations on the same subspace `S`.
pub fn compose_same_subspace(
    a: &SubspaceRotation,
    b: &SubspaceRotation,
) -> Result<SubspaceRotation> {
    if a.indices != b.indices || a.ambient_dim != b.ambient_dim {
        return Err(Error::SubspaceMismatch {
            left: a.indices.clone(),
            right: b.indices.clone(),
        });
    }
    SubspaceRotation::new(a.ambient_dim, a.indices.clone(), &a.kernel * &b.kernel)
}

/// `R_{p,q}·R_{q,r} = T_{p,q,r}(J)` for `p > q > r`.
pub fn merge_chained(a: &SubspaceRotation, b: &SubspaceRotation) -> Result<SubspaceRotation> {
    let chained = a.arity() == 2
        && b.arity() == 2
        && a.ambient_dim == b.ambient_dim
        && a.indices[1] == b.indices[0];
    if !chained {
        return Err(Error::NotChained {
            left: a.indices.clone(),
            right: b.indices.clone(),
        });
    }
    merge_within(a, b)
}

/// Product `a·b` as a single rotation on the union of both index sets.
///
/// Unlike [`merge_chained`] this accepts any overlap pattern; the result's
/// arity is the size of the union.
pub fn merge_within(a: &SubspaceRotation, b: &SubspaceRotation) -> Result<SubspaceRotation> {
    if a.ambient_dim != b.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: a.ambient_dim,
            actual: b.ambient_dim,
        });
    }
    let mut union: Vec<usize> = a.indices.iter().chain(&b.indices).copied().collect();
    union.sort_unstable_by(|x, y| y.cmp(x));
    union.dedup();
    let ka = lift_kernel(&a.kernel, &a.indices, &union);
    let kb = lift_kernel(&b.kernel, &b.indices, &union);
    SubspaceRotation::new(a.ambient_dim, union, &ka * &kb)
}

/// Single-index rotation carrying the phase `e^{iφ}` on basis vector `index`.
pub fn phase_rotation(ambient_dim: usize, index: usize, phase: f64) -> Result<SubspaceRotation> {
    let kernel = ComplexMatrix::diagonal(&[num_complex::Complex64::from_polar(1.0, phase)]);
    SubspaceRotation::new(ambient_dim, vec![index], kernel)
}
