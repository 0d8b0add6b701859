//! End-to-end synthesis of `U(2ⁿ)` and `U(3ⁿ)` matrices.
//!
//! A matrix is factored as `M = R_0 ⋯ R_{K−1} · Φ` (two-level rotations for
//! qubits, three-level groups for qutrits). Each rotation becomes
//! `K⁻¹ · Λ_{n−1}(kernel) · K`, where `K` is a routing plan that moves the
//! rotated basis states onto the last wire under all-top-digit controls.
//! `Φ` becomes a ladder of phase gates. The circuit lists `Φ` first and
//! `R_0` last.

use serde::Serialize;

use crate::circuit::{
    circuit_unitary, gate_stats, Circuit, Control, Gate, GateStats, NamedGate, Radix,
};
use crate::controlled::{
    emit_controlled_diagonal, emit_controlled_qubit, emit_controlled_qutrit,
    emit_controlled_transposition, multi_controlled,
};
use crate::embedding::SubspaceRotation;
use crate::error::{Error, Result};
use crate::linalg::{dist_phase, ComplexMatrix, DEFAULT_TOL};
use crate::reck::{pair_three_level, reck_decompose, IDENTITY_SKIP_TOL};
use crate::routing::{plan_binary_routing, plan_ternary_routing, RoutingStep};

/// Phase-ladder angles below this are treated as zero.
const ANGLE_SKIP_TOL: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct SynthOptions {
    /// Lower single-control `Λ₁` primitives to CNOT/CTRANS circuits.
    /// Gates with two or more controls are always kept as primitives.
    pub expand_lambda: bool,
    /// Unitarity tolerance for the input.
    pub tol: f64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            expand_lambda: false,
            tol: DEFAULT_TOL,
        }
    }
}

fn register(radix: Radix, wires: usize, dim: usize) -> Result<Circuit> {
    let expected = radix
        .get()
        .checked_pow(wires as u32)
        .ok_or(Error::DimensionMismatch {
            expected: usize::MAX,
            actual: dim,
        })?;
    if wires == 0 || expected != dim {
        return Err(Error::DimensionMismatch {
            expected,
            actual: dim,
        });
    }
    Circuit::new(radix, wires)
}

/// Flip on each control wire that maps its required digit onto the top
/// digit (self-inverse, so the same gates undo it).
fn control_fixups(radix: Radix, controls: &[(usize, u8)]) -> Vec<Gate> {
    let top = radix.active_digit();
    controls
        .iter()
        .filter(|&&(_, d)| d != top)
        .map(|&(w, d)| match radix {
            Radix::Two => Gate::named(NamedGate::X, w),
            Radix::Three => Gate::named(
                NamedGate::transposition(d, top).expect("distinct digits"),
                w,
            ),
        })
        .collect()
}

fn top_controls(radix: Radix, controls: &[(usize, u8)]) -> Vec<Control> {
    controls
        .iter()
        .map(|&(w, _)| Control::new(w, radix.active_digit()))
        .collect()
}

fn conjugated(fix: Vec<Gate>, core: Vec<Gate>) -> Vec<Gate> {
    let mut out = fix.clone();
    out.extend(core);
    out.extend(fix);
    out
}

/// Gates realizing one routing step.
fn lower_step(radix: Radix, step: &RoutingStep) -> Vec<Gate> {
    let t = step.target_wire;
    let core = match (radix, step.controls.len()) {
        (Radix::Two, 0) => vec![Gate::named(NamedGate::X, t)],
        (Radix::Two, 1) => vec![Gate::named_controlled(
            NamedGate::Cnot,
            top_controls(radix, &step.controls),
            t,
        )],
        (Radix::Two, _) => vec![Gate::named_controlled(
            NamedGate::X,
            top_controls(radix, &step.controls),
            t,
        )],
        (Radix::Three, m) => {
            let (a, b) = step.flip;
            let name = NamedGate::transposition(a, b).expect("distinct digits");
            match m {
                0 => vec![Gate::named(name, t)],
                1 => emit_controlled_transposition(a, b, step.controls[0].0, t),
                _ => vec![Gate::named_controlled(
                    name,
                    top_controls(radix, &step.controls),
                    t,
                )],
            }
        }
    };
    conjugated(control_fixups(radix, &step.controls), core)
}

/// `Λ_{n−1}(u)` on the last wire, or its one-control lowering.
fn core_gate(
    u: &ComplexMatrix,
    radix: Radix,
    wires: usize,
    opts: &SynthOptions,
) -> Result<Vec<Gate>> {
    match wires {
        1 => Ok(vec![Gate::Unitary {
            target: 0,
            matrix: u.clone(),
        }]),
        2 if opts.expand_lambda => match radix {
            Radix::Two => emit_controlled_qubit(u, 0, 1),
            Radix::Three => emit_controlled_qutrit(u, 0, 1),
        },
        _ => Ok(vec![multi_controlled(u, wires - 1, radix)?]),
    }
}

/// `K, core, K⁻¹`. The plan is reversed step by step; the gates inside a
/// lowered step are not reordered.
fn sandwich(radix: Radix, steps: &[RoutingStep], core: Vec<Gate>) -> Vec<Gate> {
    let blocks: Vec<Vec<Gate>> = steps.iter().map(|s| lower_step(radix, s)).collect();
    let mut out: Vec<Gate> = blocks.iter().flatten().cloned().collect();
    out.extend(core);
    out.extend(blocks.into_iter().rev().flatten());
    out
}

fn rotation_gates(
    rot: &SubspaceRotation,
    radix: Radix,
    wires: usize,
    opts: &SynthOptions,
) -> Result<Vec<Gate>> {
    if rot.is_identity(IDENTITY_SKIP_TOL) {
        return Ok(Vec::new());
    }
    let idx = rot.indices();
    let plan = match (radix, idx.len()) {
        (Radix::Two, 2) => plan_binary_routing(idx[0], idx[1], wires)?,
        (Radix::Three, 3) => plan_ternary_routing(idx[0], idx[1], idx[2], wires)?,
        _ => return Err(Error::InvalidIndices(idx.to_vec())),
    };
    let core = core_gate(rot.kernel(), radix, wires, opts)?;
    Ok(sandwich(radix, &plan.steps, core))
}

fn synthesize_rotation(
    rot: &SubspaceRotation,
    radix: Radix,
    wires: usize,
    opts: &SynthOptions,
) -> Result<Circuit> {
    let mut c = register(radix, wires, rot.ambient_dim())?;
    c.extend(rotation_gates(rot, radix, wires, opts)?)?;
    Ok(c)
}

/// Circuit for `embed(rot)`, `rot` a two-level rotation on `2ⁿ` states.
pub fn synthesize_two_level(
    rot: &SubspaceRotation,
    wires: usize,
    opts: &SynthOptions,
) -> Result<Circuit> {
    synthesize_rotation(rot, Radix::Two, wires, opts)
}

/// Circuit for `embed(rot)`, `rot` a three-level rotation on `3ⁿ` states.
pub fn synthesize_three_level(
    rot: &SubspaceRotation,
    wires: usize,
    opts: &SynthOptions,
) -> Result<Circuit> {
    synthesize_rotation(rot, Radix::Three, wires, opts)
}

/// Controlled diagonal on `target` conditioned on `prefix` (the digits of
/// wires `0..target`).
fn controlled_phase(
    radix: Radix,
    prefix: &[u8],
    target: usize,
    angles: &[f64],
    opts: &SynthOptions,
) -> Result<Vec<Gate>> {
    let controls: Vec<(usize, u8)> = prefix.iter().copied().enumerate().collect();
    let diag = ComplexMatrix::diagonal(
        &angles
            .iter()
            .map(|&a| num_complex::Complex64::from_polar(1.0, a))
            .collect::<Vec<_>>(),
    );
    let core = if target == 1 && opts.expand_lambda {
        match radix {
            Radix::Two => emit_controlled_qubit(&diag, 0, 1)?,
            Radix::Three => emit_controlled_diagonal(&[angles[0], angles[1], angles[2]], 0, 1)?,
        }
    } else {
        vec![Gate::Controlled {
            controls: top_controls(radix, &controls),
            target,
            matrix: diag,
        }]
    };
    Ok(conjugated(control_fixups(radix, &controls), core))
}

/// Gates for `Φ = diag(e^{iφ_x})`.
///
/// With `ψ_w(x₀…x_w) = φ(x₀…x_w 0…0)`, `φ` telescopes into a phase gate
/// on wire 0 with angles `ψ₀` plus, for each wire `w ≥ 1` and each prefix
/// `p` of the wires above it, a diagonal `ψ_w(p, x_w) − ψ_w(p, 0)` on wire
/// `w` controlled by `p`.
fn phase_gates(
    phases: &[f64],
    radix: Radix,
    wires: usize,
    opts: &SynthOptions,
) -> Result<Vec<Gate>> {
    let d = radix.get();
    let index = |prefix: &[u8]| {
        prefix
            .iter()
            .map(|&x| x as usize)
            .chain(std::iter::repeat(0))
            .take(wires)
            .fold(0, |acc, x| acc * d + x)
    };
    let trivial = |angles: &[f64]| angles.iter().all(|a| a.abs() <= ANGLE_SKIP_TOL);

    let mut gates = Vec::new();
    let top: Vec<f64> = (0..d as u8).map(|x| phases[index(&[x])]).collect();
    if !trivial(&top) {
        gates.push(Gate::Phase {
            target: 0,
            angles: top,
        });
    }
    for w in 1..wires {
        for p in 0..d.pow(w as u32) {
            let prefix: Vec<u8> = (0..w)
                .map(|k| ((p / d.pow((w - 1 - k) as u32)) % d) as u8)
                .collect();
            let mut ext = prefix.clone();
            ext.push(0);
            let base = phases[index(&ext)];
            let angles: Vec<f64> = (0..d as u8)
                .map(|x| {
                    ext[w] = x;
                    phases[index(&ext)] - base
                })
                .collect();
            if !trivial(&angles) {
                gates.extend(controlled_phase(radix, &prefix, w, &angles, opts)?);
            }
        }
    }
    Ok(gates)
}

/// Circuit for an arbitrary unitary on `wires` qudits of the given radix.
pub fn synthesize(
    m: &ComplexMatrix,
    radix: usize,
    wires: usize,
    opts: &SynthOptions,
) -> Result<Circuit> {
    let radix = Radix::try_from(radix)?;
    let mut c = register(radix, wires, m.dim())?;
    let dev = m.unitarity_deviation();
    if dev > opts.tol {
        return Err(Error::NotUnitary { deviation: dev });
    }
    if wires == 1 {
        if !m.is_identity(IDENTITY_SKIP_TOL) {
            c.push(Gate::Unitary {
                target: 0,
                matrix: m.clone(),
            })?;
        }
        return Ok(c);
    }

    let d = reck_decompose(m, opts.tol)?;
    let rotations = match radix {
        Radix::Two => d.rotations.clone(),
        Radix::Three => pair_three_level(&d)?.0,
    };
    c.extend(phase_gates(&d.phase.phases, radix, wires, opts)?)?;
    for rot in rotations.iter().rev() {
        c.extend(rotation_gates(rot, radix, wires, opts)?)?;
    }
    Ok(c)
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub residual: f64,
    pub passed: bool,
    pub stats: GateStats,
}

/// Compares the circuit's matrix with `target` up to global phase.
pub fn verify(c: &Circuit, target: &ComplexMatrix, tol: f64) -> Result<VerifyReport> {
    if c.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            actual: target.dim(),
        });
    }
    let residual = dist_phase(&circuit_unitary(c)?, target)?;
    Ok(VerifyReport {
        residual,
        passed: residual <= tol,
        stats: gate_stats(c),
    })
}

/// Indices of gates outside the synthesis gate set of the circuit's radix:
/// generic single-qudit and phase gates, the radix's named primitives
/// (CNOT for qubits; ROT, TRANS and CTRANS for qutrits), and multi-control
/// primitives whose controls all sit on the top digit.
pub fn gate_set_violations(c: &Circuit) -> Vec<usize> {
    let top = c.radix().active_digit();
    let all_top = |controls: &[Control]| controls.iter().all(|k| k.digit == top);
    c.gates()
        .iter()
        .enumerate()
        .filter(|(_, g)| {
            let ok = match g {
                Gate::Unitary { .. } | Gate::Phase { .. } => true,
                Gate::Controlled { controls, .. } => all_top(controls),
                Gate::Named { name, controls, .. } => match (c.radix(), name) {
                    (Radix::Two, NamedGate::X | NamedGate::H) => controls.is_empty(),
                    (Radix::Two, NamedGate::Cnot) | (Radix::Three, NamedGate::Ctrans) => true,
                    (Radix::Three, NamedGate::Rot) => controls.is_empty(),
                    (
                        Radix::Three,
                        NamedGate::Trans01 | NamedGate::Trans02 | NamedGate::Trans12,
                    ) => controls.is_empty() || (controls.len() >= 2 && all_top(controls)),
                    _ => false,
                },
            };
            let multi_x = matches!(g, Gate::Named { name: NamedGate::X, controls, .. }
                if controls.len() >= 2 && all_top(controls));
            !(ok || multi_x)
        })
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::embed;
    use crate::linalg::{haar_random_unitary, ONE, ZERO};
    use crate::routing::plan_binary_routing;
    use proptest::prelude::*;

    fn opts() -> SynthOptions {
        SynthOptions::default()
    }

    fn expanded() -> SynthOptions {
        SynthOptions {
            expand_lambda: true,
            ..SynthOptions::default()
        }
    }

    fn check(c: &Circuit, m: &ComplexMatrix, tol: f64) {
        let r = verify(c, m, tol).unwrap();
        assert!(r.passed, "residual {}", r.residual);
        assert!(gate_set_violations(c).is_empty());
    }

    #[test]
    fn canonical_two_level_is_one_gate() {
        for n in 1..=4 {
            let dim = 1 << n;
            let u = haar_random_unitary(2, n as u64);
            let rot = SubspaceRotation::two_level(dim, dim - 1, dim - 2, u).unwrap();
            let c = synthesize_two_level(&rot, n, &opts()).unwrap();
            assert_eq!(c.len(), 1);
            check(&c, &embed(&rot), 1e-12);
        }
    }

    #[test]
    fn worked_gray_example() {
        let u = haar_random_unitary(2, 5);
        let rot = SubspaceRotation::two_level(16, 11, 4, u).unwrap();
        let c = synthesize_two_level(&rot, 4, &opts()).unwrap();
        check(&c, &embed(&rot), 1e-9);
        // 1011 -> 1010: flip wire 3 when wires 0,1,2 read 1,0,1
        let toffoli = Gate::named_controlled(
            NamedGate::X,
            vec![Control::new(0, 1), Control::new(1, 1), Control::new(2, 1)],
            3,
        );
        assert_eq!(
            &c.gates()[..3],
            &[
                Gate::named(NamedGate::X, 1),
                toffoli,
                Gate::named(NamedGate::X, 1)
            ]
        );
        let plan = plan_binary_routing(11, 4, 4).unwrap();
        let lowered: usize = plan
            .steps
            .iter()
            .map(|s| lower_step(Radix::Two, s).len())
            .sum();
        assert_eq!(c.len(), 2 * lowered + 1);
    }

    #[test]
    fn canonical_three_level_is_one_gate() {
        for n in 2..=3 {
            let dim = 3usize.pow(n as u32);
            let u = haar_random_unitary(3, 8);
            let rot = SubspaceRotation::new(dim, vec![dim - 1, dim - 2, dim - 3], u).unwrap();
            let c = synthesize_three_level(&rot, n, &opts()).unwrap();
            assert_eq!(c.len(), 1);
            check(&c, &embed(&rot), 1e-12);
        }
    }

    #[test]
    fn worked_ternary_example() {
        let u = haar_random_unitary(3, 2);
        let rot = SubspaceRotation::new(81, vec![52, 45, 8], u).unwrap();
        let c = synthesize_three_level(&rot, 4, &opts()).unwrap();
        check(&c, &embed(&rot), 1e-9);
    }

    #[test]
    fn identity_gives_empty_circuit() {
        for (radix, n) in [(2usize, 1), (2, 3), (3, 1), (3, 2)] {
            let dim = radix.pow(n as u32);
            let c = synthesize(&ComplexMatrix::identity(dim), radix, n, &opts()).unwrap();
            assert!(c.is_empty());
        }
    }

    #[test]
    fn single_wire_bypass() {
        let u = haar_random_unitary(3, 1);
        let c = synthesize(&u, 3, 1, &opts()).unwrap();
        assert_eq!(
            c.gates(),
            &[Gate::Unitary {
                target: 0,
                matrix: u
            }]
        );
    }

    #[test]
    fn cnot_reconstruction() {
        let cnot = ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        for o in [opts(), expanded()] {
            let c = synthesize(&cnot, 2, 2, &o).unwrap();
            check(&c, &cnot, 1e-10);
        }
    }

    #[test]
    fn haar_reconstruction() {
        for (radix, n) in [(2usize, 2), (2, 3), (2, 4), (3, 2), (3, 3)] {
            let dim = radix.pow(n as u32);
            for seed in 0..3 {
                let m = haar_random_unitary(dim, seed);
                for o in [opts(), expanded()] {
                    let c = synthesize(&m, radix, n, &o).unwrap();
                    check(&c, &m, 1e-8 * dim as f64);
                }
            }
        }
    }

    #[test]
    fn larger_qubit_registers() {
        for n in [5, 6] {
            let dim = 1 << n;
            let m = haar_random_unitary(dim, 100 + n as u64);
            let c = synthesize(&m, 2, n, &opts()).unwrap();
            check(&c, &m, 1e-8 * dim as f64);
        }
    }

    #[test]
    fn diagonal_input_uses_only_phase_gates() {
        let phases = [0.1, -0.4, 2.0, 3.0, -1.0, 0.5, 0.0, 1.5, -2.5];
        let m =
            ComplexMatrix::diagonal(&phases.map(|p| num_complex::Complex64::from_polar(1.0, p)));
        let c = synthesize(&m, 3, 2, &opts()).unwrap();
        assert!(c.gates().iter().all(|g| matches!(
            g,
            Gate::Phase { .. } | Gate::Controlled { .. }
        ) || matches!(
            g,
            Gate::Named {
                name: NamedGate::Trans02 | NamedGate::Trans12,
                ..
            }
        )));
        check(&c, &m, 1e-10);
    }

    #[test]
    fn input_validation() {
        let m = haar_random_unitary(8, 0);
        assert!(matches!(
            synthesize(&m, 3, 2, &opts()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            synthesize(&m, 4, 2, &opts()),
            Err(Error::UnsupportedRadix(4))
        ));
        assert!(synthesize(&m, 2, 2, &opts()).is_err());
        let mut bad = m.clone();
        bad[(0, 0)] += ONE;
        assert!(matches!(
            synthesize(&bad, 2, 3, &opts()),
            Err(Error::NotUnitary { .. })
        ));
        let rot = SubspaceRotation::two_level(8, 3, 1, haar_random_unitary(2, 0)).unwrap();
        assert!(synthesize_two_level(&rot, 2, &opts()).is_err());
        assert!(synthesize_three_level(&rot, 2, &opts()).is_err());
    }

    #[test]
    fn verify_reports() {
        let r = verify(
            &Circuit::new(Radix::Two, 2).unwrap(),
            &ComplexMatrix::identity(4),
            1e-12,
        )
        .unwrap();
        assert!(r.passed);
        assert_eq!(r.residual, 0.0);

        let mut c = Circuit::new(Radix::Two, 2).unwrap();
        c.push(Gate::named_controlled(
            NamedGate::Cnot,
            vec![Control::new(0, 1)],
            1,
        ))
        .unwrap();
        let swap = ComplexMatrix::from_fn(4, |r, col| {
            let s = [0, 2, 1, 3];
            if s[col] == r {
                ONE
            } else {
                ZERO
            }
        });
        let r = verify(&c, &swap, 1e-8).unwrap();
        assert!(!r.passed);
        // six entries differ by one and |tr(CNOT†·SWAP)| = 1
        assert!((r.residual - 6f64.sqrt()).abs() < 1e-12);
        assert!(verify(&c, &ComplexMatrix::identity(8), 1e-8).is_err());
    }

    #[test]
    fn foreign_gates_are_flagged() {
        let mut c = Circuit::new(Radix::Two, 3).unwrap();
        c.push(Gate::named_controlled(
            NamedGate::X,
            vec![Control::new(0, 1)],
            1,
        ))
        .unwrap();
        c.push(Gate::Controlled {
            controls: vec![Control::new(0, 0)],
            target: 1,
            matrix: haar_random_unitary(2, 0),
        })
        .unwrap();
        c.push(Gate::named(NamedGate::H, 2)).unwrap();
        assert_eq!(gate_set_violations(&c), vec![0, 1]);
    }

    #[test]
    fn output_is_deterministic() {
        let m = haar_random_unitary(9, 4);
        let a = crate::circuit::serialize(&synthesize(&m, 3, 2, &opts()).unwrap());
        let b = crate::circuit::serialize(&synthesize(&m, 3, 2, &opts()).unwrap());
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn two_level_matches_embedding(n in 1usize..=3, a in any::<usize>(), b in any::<usize>(), seed in any::<u64>()) {
            let dim = 1 << n;
            let (p, q) = (a % dim, b % dim);
            prop_assume!(p != q);
            let rot = SubspaceRotation::two_level(dim, p.max(q), p.min(q), haar_random_unitary(2, seed)).unwrap();
            let c = synthesize_two_level(&rot, n, &SynthOptions::default()).unwrap();
            let r = verify(&c, &embed(&rot), 1e-9).unwrap();
            prop_assert!(r.passed, "residual {}", r.residual);
            // both entry points agree
            let whole = synthesize(&embed(&rot), 2, n, &SynthOptions::default()).unwrap();
            let diff = dist_phase(&circuit_unitary(&whole).unwrap(), &circuit_unitary(&c).unwrap()).unwrap();
            prop_assert!(diff <= 1e-9);
        }

        #[test]
        fn three_level_matches_embedding(n in 2usize..=3, raw in proptest::collection::vec(any::<usize>(), 3), seed in any::<u64>()) {
            let dim = 3usize.pow(n as u32);
            let mut idx: Vec<usize> = raw.iter().map(|x| x % dim).collect();
            idx.sort_unstable_by(|a, b| b.cmp(a));
            idx.dedup();
            prop_assume!(idx.len() == 3);
            let rot = SubspaceRotation::new(dim, idx, haar_random_unitary(3, seed)).unwrap();
            let c = synthesize_three_level(&rot, n, &SynthOptions::default()).unwrap();
            let r = verify(&c, &embed(&rot), 1e-9).unwrap();
            prop_assert!(r.passed, "residual {}", r.residual);
        }
    }
}
