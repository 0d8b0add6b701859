//! Matrix and state-vector semantics.
//!
//! Three routes compute the same thing and are cross-checked in tests:
//! [`gate_matrix`] builds a gate's full-register matrix from Kronecker
//! products and control projectors, [`circuit_unitary`] multiplies per-row
//! sparse gate matrices read straight off the block definition, and
//! [`apply_state`] updates a state vector one target axis at a time.

use num_complex::Complex64;

use super::{Circuit, Gate, Radix};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ONE, ZERO};

/// Largest register dimension for which full matrices are formed (3^7 ≤ cap).
pub const MAX_DENSE_DIM: usize = 4096;

/// Normalization tolerance for input states.
const STATE_NORM_TOL: f64 = 1e-10;

fn register_dim(radix: Radix, wires: usize) -> Result<usize> {
    radix
        .get()
        .checked_pow(wires as u32)
        .filter(|&dim| dim <= MAX_DENSE_DIM)
        .ok_or(Error::CapExceeded {
            dim: radix.get().saturating_pow(wires as u32),
            cap: MAX_DENSE_DIM,
        })
}

/// Place value of each wire; wire 0 is the most significant digit.
fn strides(radix: Radix, wires: usize) -> Vec<usize> {
    (0..wires)
        .map(|w| radix.get().pow((wires - 1 - w) as u32))
        .collect()
}

/// Full-register matrix of one gate: `I − P + P ⊗ U`, where `P` projects
/// onto the control condition.
pub fn gate_matrix(gate: &Gate, radix: Radix, wires: usize) -> Result<ComplexMatrix> {
    let dim = register_dim(radix, wires)?;
    let d = radix.get();
    let id = ComplexMatrix::identity(d);
    let u = gate.target_matrix();
    let controls = gate.controls();
    let tensor = |on_target: &ComplexMatrix| {
        (0..wires)
            .map(|w| {
                if w == gate.target() {
                    on_target.clone()
                } else if let Some(c) = controls.iter().find(|c| c.wire == w) {
                    let mut p = ComplexMatrix::zeros(d);
                    p[(c.digit as usize, c.digit as usize)] = ONE;
                    p
                } else {
                    id.clone()
                }
            })
            .reduce(|acc, f| acc.kron(&f))
            .expect("at least one wire")
    };
    let active = tensor(&u);
    if controls.is_empty() {
        return Ok(active);
    }
    let projector = tensor(&id);
    Ok(ComplexMatrix::from_fn(dim, |r, c| {
        let delta = if r == c { ONE } else { ZERO };
        delta - projector[(r, c)] + active[(r, c)]
    }))
}

/// Nonzero entries of row `r` of the gate's full-register matrix.
fn gate_row(
    gate: &Gate,
    u: &ComplexMatrix,
    place: &[usize],
    d: usize,
    r: usize,
) -> Vec<(usize, Complex64)> {
    let digit = |x: usize, w: usize| (x / place[w]) % d;
    let fires = gate
        .controls()
        .iter()
        .all(|c| digit(r, c.wire) == c.digit as usize);
    if !fires {
        return vec![(r, ONE)];
    }
    let t = gate.target();
    let rt = digit(r, t);
    let base = r - rt * place[t];
    (0..d)
        .map(|ct| (base + ct * place[t], u[(rt, ct)]))
        .filter(|&(_, v)| v != ZERO)
        .collect()
}

/// Matrix of the whole circuit, `U_{k-1} ⋯ U_0` for gates `0..k`.
pub fn circuit_unitary(c: &Circuit) -> Result<ComplexMatrix> {
    let dim = register_dim(c.radix(), c.wires())?;
    let d = c.radix().get();
    let place = strides(c.radix(), c.wires());
    let mut acc: Vec<Complex64> = ComplexMatrix::identity(dim).as_slice().to_vec();
    let mut next = vec![ZERO; dim * dim];
    for gate in c.gates() {
        let u = gate.target_matrix();
        for r in 0..dim {
            let out = &mut next[r * dim..(r + 1) * dim];
            out.fill(ZERO);
            for (col, v) in gate_row(gate, &u, &place, d, r) {
                let src = &acc[col * dim..(col + 1) * dim];
                for (o, s) in out.iter_mut().zip(src) {
                    *o += v * s;
                }
            }
        }
        std::mem::swap(&mut acc, &mut next);
    }
    ComplexMatrix::new(dim, acc)
}

/// Applies the circuit to a normalized state without forming any
/// register-sized matrix.
pub fn apply_state(c: &Circuit, s: &[Complex64]) -> Result<Vec<Complex64>> {
    let dim = c.dim();
    if s.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: s.len(),
        });
    }
    let norm = s.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > STATE_NORM_TOL {
        return Err(Error::NotNormalized { norm });
    }

    let d = c.radix().get();
    let place = strides(c.radix(), c.wires());
    let mut psi = s.to_vec();
    let mut gathered = vec![ZERO; d];
    for gate in c.gates() {
        let u = gate.target_matrix();
        let stride = place[gate.target()];
        for base in 0..dim {
            if !(base / stride).is_multiple_of(d) {
                continue;
            }
            if !gate
                .controls()
                .iter()
                .all(|ctl| (base / place[ctl.wire]) % d == ctl.digit as usize)
            {
                continue;
            }
            for (k, g) in gathered.iter_mut().enumerate() {
                *g = psi[base + k * stride];
            }
            for k in 0..d {
                psi[base + k * stride] = (0..d).map(|l| u[(k, l)] * gathered[l]).sum();
            }
        }
    }
    Ok(psi)
}
