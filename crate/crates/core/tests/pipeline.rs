use num_complex::Complex64;
use qsynth::controlled::{controlled_u_qutrit, multi_controlled};
use qsynth::linalg::ZERO;
use qsynth::synth::gate_set_violations;
use qsynth::{
    apply_state, circuit_unitary, dist_phase, haar_random_unitary, parse, serialize, synthesize,
    verify, Circuit, Radix, SynthOptions,
};

#[test]
fn synthesized_circuit_survives_the_text_format() {
    for (radix, n) in [(2usize, 3), (3, 2)] {
        let dim = radix.pow(n as u32);
        let m = haar_random_unitary(dim, 77);
        let c = synthesize(&m, radix, n, &SynthOptions::default()).unwrap();
        let back = parse(&serialize(&c)).unwrap();
        assert_eq!(back, c);
        assert!(verify(&back, &m, 1e-8 * dim as f64).unwrap().passed);
    }
}

#[test]
fn columns_of_synthesized_circuit_match_target() {
    let m = haar_random_unitary(27, 3);
    let c = synthesize(&m, 3, 3, &SynthOptions::default()).unwrap();
    let u = circuit_unitary(&c).unwrap();
    // fix the global phase from one entry, then compare basis-state images
    let k = (0..27)
        .max_by(|&a, &b| m[(a, 0)].norm().total_cmp(&m[(b, 0)].norm()))
        .unwrap();
    let phase = m[(k, 0)] / u[(k, 0)];
    for col in [0, 13, 26] {
        let mut e = vec![ZERO; 27];
        e[col] = Complex64::new(1.0, 0.0);
        let out = apply_state(&c, &e).unwrap();
        for r in 0..27 {
            assert!((out[r] * phase - m[(r, col)]).norm() < 1e-9);
        }
    }
}

#[test]
fn lowered_and_primitive_controls_agree() {
    let v = haar_random_unitary(3, 12);
    let lowered = controlled_u_qutrit(&v).unwrap();
    let mut primitive = Circuit::new(Radix::Three, 2).unwrap();
    primitive
        .push(multi_controlled(&v, 1, Radix::Three).unwrap())
        .unwrap();
    let d = dist_phase(
        &circuit_unitary(&lowered).unwrap(),
        &circuit_unitary(&primitive).unwrap(),
    )
    .unwrap();
    assert!(d < 1e-9);
    assert!(gate_set_violations(&lowered).is_empty());
}

#[test]
fn expanded_lambda_keeps_only_one_control_primitives_out() {
    let m = haar_random_unitary(4, 21);
    let opts = SynthOptions {
        expand_lambda: true,
        ..SynthOptions::default()
    };
    let c = synthesize(&m, 2, 2, &opts).unwrap();
    assert!(c
        .gates()
        .iter()
        .all(|g| !matches!(g, qsynth::Gate::Controlled { .. })));
    assert!(verify(&c, &m, 4e-8).unwrap().passed);
}
