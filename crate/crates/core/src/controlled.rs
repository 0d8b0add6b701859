//! Controlled gates from one-control primitives.
//!
//! Qubits: any `Λ₁(u)` is `C`, CNOT, `B`, CNOT, `A` on the target plus a
//! phase on the control, with `ABC = I` and `e^{iδ}·AXBXC = u`.
//!
//! Qutrits: the same sandwich works inside a two-level subspace of the
//! target once the controlled transposition of that subspace is available.
//! CTRANS gives the `{1,2}` transposition; the `{0,1}` and `{0,2}` ones are
//! obtained by conjugating with powers of ROT on the target, which acts
//! as `ROT³ = I` when the control is inactive.

use num_complex::Complex64;

use crate::circuit::{Circuit, Control, Gate, Radix};
use crate::embedding::SubspaceRotation;
use crate::error::{Error, Result};
use crate::linalg::{special_unitarize, ComplexMatrix, DEFAULT_TOL, ONE, ZERO};
use crate::reck::reck_decompose;

pub use crate::circuit::NamedGate;

/// Phases smaller than this are not emitted.
const PHASE_SKIP_TOL: f64 = 1e-14;

/// Fixed 3×3 matrix of a qutrit primitive.
pub fn named_qutrit_gate(name: NamedGate) -> Result<ComplexMatrix> {
    match name {
        NamedGate::Trans12 | NamedGate::Trans01 | NamedGate::Trans02 | NamedGate::Rot => {
            Ok(name.target_matrix())
        }
        other => Err(Error::UnknownGate(format!(
            "{other} is not a qutrit primitive"
        ))),
    }
}

/// [`named_qutrit_gate`] by name.
pub fn qutrit_gate_by_name(name: &str) -> Result<ComplexMatrix> {
    named_qutrit_gate(name.parse()?)
}

/// `u = e^{iδ}·A·X·B·X·C` with `A, B, C ∈ SU(2)` and `ABC = I`.
#[derive(Clone, Debug)]
pub struct ABCDecomposition {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
    pub delta: f64,
}

fn rz(phi: f64) -> ComplexMatrix {
    ComplexMatrix::diagonal(&[
        Complex64::from_polar(1.0, -phi / 2.0),
        Complex64::from_polar(1.0, phi / 2.0),
    ])
}

fn ry(theta: f64) -> ComplexMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    ComplexMatrix::from_real_rows(&[&[c, -s], &[s, c]]).expect("2x2")
}

/// Principal argument, with exact zeros mapped to 0.
fn arg_or_zero(z: Complex64) -> f64 {
    if z.norm() < 1e-15 {
        0.0
    } else {
        z.arg()
    }
}

pub fn abc_decompose(u: &ComplexMatrix) -> Result<ABCDecomposition> {
    if u.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: u.dim(),
        });
    }
    let (delta, v) = special_unitarize(u)?;
    // v = Rz(α)·Ry(θ)·Rz(β), with v00 = e^{−i(α+β)/2}cos(θ/2) and
    // v10 = e^{i(α−β)/2}sin(θ/2).
    let (v00, v10) = (v[(0, 0)], v[(1, 0)]);
    let theta = 2.0 * v10.norm().atan2(v00.norm());
    let (arg0, arg1) = (arg_or_zero(v00), arg_or_zero(v10));
    let alpha = arg1 - arg0;
    let beta = -arg0 - arg1;
    let a = &rz(alpha) * &ry(theta / 2.0);
    let b = &ry(-theta / 2.0) * &rz(-(alpha + beta) / 2.0);
    let c = rz((beta - alpha) / 2.0);
    Ok(ABCDecomposition { a, b, c, delta })
}

/// Gates for `Λ₁(u)` on qubits, control on digit 1.
pub(crate) fn emit_controlled_qubit(
    u: &ComplexMatrix,
    control: usize,
    target: usize,
) -> Result<Vec<Gate>> {
    let abc = abc_decompose(u)?;
    let cnot = || Gate::named_controlled(NamedGate::Cnot, vec![Control::new(control, 1)], target);
    Ok(vec![
        Gate::Unitary {
            target,
            matrix: abc.c,
        },
        cnot(),
        Gate::Unitary {
            target,
            matrix: abc.b,
        },
        cnot(),
        Gate::Unitary {
            target,
            matrix: abc.a,
        },
        Gate::Phase {
            target: control,
            angles: vec![0.0, abc.delta],
        },
    ])
}

/// Two-qubit circuit for `diag(I₂, u)`.
pub fn controlled_u_qubit(u: &ComplexMatrix) -> Result<Circuit> {
    let mut c = Circuit::new(Radix::Two, 2)?;
    c.extend(emit_controlled_qubit(u, 0, 1)?)?;
    Ok(c)
}

/// Controlled transposition of target levels `{lo, hi}`, active on control
/// digit 2, from CTRANS and ROT.
pub(crate) fn emit_controlled_transposition(
    lo: u8,
    hi: u8,
    control: usize,
    target: usize,
) -> Vec<Gate> {
    let rot = || Gate::named(NamedGate::Rot, target);
    let ctrans = Gate::named_controlled(NamedGate::Ctrans, vec![Control::new(control, 2)], target);
    match (lo.min(hi), lo.max(hi)) {
        (1, 2) => vec![ctrans],
        // ROT·TRANS12·ROT² = TRANS01
        (0, 1) => vec![rot(), rot(), ctrans, rot()],
        // ROT²·TRANS12·ROT = TRANS02
        (0, 2) => vec![rot(), ctrans, rot(), rot()],
        _ => panic!("levels {lo}, {hi} are not a qutrit pair"),
    }
}

/// Two-qutrit circuit for the controlled transposition of target levels
/// `{lo, hi}`, control on wire 0 (digit 2), target wire 1.
pub fn controlled_transposition(lo: u8, hi: u8) -> Result<Circuit> {
    if lo == hi || lo.max(hi) > 2 {
        return Err(Error::InvalidIndices(vec![lo as usize, hi as usize]));
    }
    let mut c = Circuit::new(Radix::Three, 2)?;
    c.extend(emit_controlled_transposition(lo, hi, 0, 1))?;
    Ok(c)
}

/// Embeds a 2×2 kernel on levels `lo < hi` of one qutrit.
fn qutrit_two_level(lo: usize, hi: usize, k: &ComplexMatrix) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(3);
    let idx = [lo, hi];
    for (r, &gr) in idx.iter().enumerate() {
        for (c, &gc) in idx.iter().enumerate() {
            m[(gr, gc)] = k[(r, c)];
        }
    }
    m
}

/// Gates for `Λ₁(T_{hi,lo}(v))` on qutrits. The global phase of `v` is
/// dropped unless `with_phase` is set.
fn emit_controlled_two_level(
    lo: usize,
    hi: usize,
    v: &ComplexMatrix,
    control: usize,
    target: usize,
    with_phase: bool,
) -> Result<Vec<Gate>> {
    let abc = abc_decompose(v)?;
    let lift = |k: &ComplexMatrix| Gate::Unitary {
        target,
        matrix: qutrit_two_level(lo, hi, k),
    };
    let ctrans = emit_controlled_transposition(lo as u8, hi as u8, control, target);
    let mut gates = vec![lift(&abc.c)];
    gates.extend(ctrans.iter().cloned());
    gates.push(lift(&abc.b));
    gates.extend(ctrans);
    gates.push(lift(&abc.a));
    if with_phase && abc.delta.abs() > PHASE_SKIP_TOL {
        let mut phases = [0.0; 3];
        phases[lo] = abc.delta;
        phases[hi] = abc.delta;
        gates.extend(emit_controlled_diagonal(&phases, control, target)?);
    }
    Ok(gates)
}

/// Gates for `Λ₁(diag(e^{iφ₀}, e^{iφ₁}, e^{iφ₂}))` on qutrits.
///
/// The mean phase goes onto digit 2 of the control; the traceless rest is
/// `T_{1,0}(diag(e^{ia₀}, e^{−ia₀})) · T_{2,1}(diag(e^{−ia₂}, e^{ia₂}))`,
/// and each factor is an `SU(2)` two-level rotation.
pub(crate) fn emit_controlled_diagonal(
    phases: &[f64; 3],
    control: usize,
    target: usize,
) -> Result<Vec<Gate>> {
    let mean = phases.iter().sum::<f64>() / 3.0;
    let a0 = phases[0] - mean;
    let a2 = phases[2] - mean;
    let mut gates = Vec::new();
    let diag = |x: f64| {
        ComplexMatrix::diagonal(&[
            Complex64::from_polar(1.0, x),
            Complex64::from_polar(1.0, -x),
        ])
    };
    if a2.abs() > PHASE_SKIP_TOL {
        gates.extend(emit_controlled_two_level(
            1,
            2,
            &diag(-a2),
            control,
            target,
            false,
        )?);
    }
    if a0.abs() > PHASE_SKIP_TOL {
        gates.extend(emit_controlled_two_level(
            0,
            1,
            &diag(a0),
            control,
            target,
            false,
        )?);
    }
    if mean.abs() > PHASE_SKIP_TOL {
        gates.push(Gate::Phase {
            target: control,
            angles: vec![0.0, 0.0, mean],
        });
    }
    Ok(gates)
}

/// Two-qutrit circuit for `Λ₁(T_{i,j}(V))`, control active on digit 2.
pub fn controlled_two_level_qutrit(rot: &SubspaceRotation) -> Result<Circuit> {
    if rot.ambient_dim() != 3 || rot.arity() != 2 {
        return Err(Error::InvalidIndices(rot.indices().to_vec()));
    }
    let (hi, lo) = (rot.indices()[0], rot.indices()[1]);
    let mut c = Circuit::new(Radix::Three, 2)?;
    c.extend(emit_controlled_two_level(lo, hi, rot.kernel(), 0, 1, true)?)?;
    Ok(c)
}

/// Gates for `Λ₁(v)` on qutrits, `v ∈ U(3)`.
pub(crate) fn emit_controlled_qutrit(
    v: &ComplexMatrix,
    control: usize,
    target: usize,
) -> Result<Vec<Gate>> {
    let d = reck_decompose(v, DEFAULT_TOL)?;
    let phases: [f64; 3] = d.phase.phases.clone().try_into().expect("3 phases");
    let mut gates = emit_controlled_diagonal(&phases, control, target)?;
    // v = R_0 ⋯ R_{K−1} Φ, so R_{K−1} acts first.
    for r in d.rotations.iter().rev() {
        let (hi, lo) = (r.indices()[0], r.indices()[1]);
        gates.extend(emit_controlled_two_level(
            lo,
            hi,
            r.kernel(),
            control,
            target,
            true,
        )?);
    }
    Ok(gates)
}

/// Two-qutrit circuit for `diag(I₃, I₃, v)`.
pub fn controlled_u_qutrit(v: &ComplexMatrix) -> Result<Circuit> {
    if v.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            actual: v.dim(),
        });
    }
    let mut c = Circuit::new(Radix::Three, 2)?;
    c.extend(emit_controlled_qutrit(v, 0, 1)?)?;
    Ok(c)
}

/// `Λ_m(u)`: controls on wires `0..m` (all on the top digit), target `m`.
/// The gate is kept as a single IR primitive.
pub fn multi_controlled(u: &ComplexMatrix, m: usize, radix: Radix) -> Result<Gate> {
    if u.dim() != radix.get() {
        return Err(Error::DimensionMismatch {
            expected: radix.get(),
            actual: u.dim(),
        });
    }
    if m == 0 {
        return Err(Error::InvalidGate("Λ_m needs at least one control".into()));
    }
    let dev = u.unitarity_deviation();
    if dev > DEFAULT_TOL {
        return Err(Error::NotUnitary { deviation: dev });
    }
    let top = radix.active_digit();
    Ok(Gate::Controlled {
        controls: (0..m).map(|w| Control::new(w, top)).collect(),
        target: m,
        matrix: u.clone(),
    })
}

/// Block matrix `diag(I, …, I, u)` of a single-control gate, for tests and
/// callers that want the definition directly.
pub fn controlled_block(u: &ComplexMatrix) -> ComplexMatrix {
    let d = u.dim();
    ComplexMatrix::from_fn(d * d, |r, c| {
        let (br, bc) = (r / d, c / d);
        if br != bc {
            ZERO
        } else if br == d - 1 {
            u[(r % d, c % d)]
        } else if r == c {
            ONE
        } else {
            ZERO
        }
    })
}
