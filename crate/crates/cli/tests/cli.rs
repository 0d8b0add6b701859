mod common;

use std::fs;

use common::{code, path_str, qsynth, qsynth_env, residual, stderr, stdout};
use qsynth::circuit::random_circuit;
use qsynth::controlled::controlled_u_qubit;
use qsynth::{
    haar_random_unitary, serialize, Circuit, ComplexMatrix, Control, Gate, NamedGate, Radix,
};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use tempfile::TempDir;

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(TempDir::new().unwrap())
    }

    fn path(&self, name: &str) -> String {
        path_str(&self.0.path().join(name)).to_string()
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        p
    }
}

fn cnot_circuit() -> Circuit {
    let mut c = Circuit::new(Radix::Two, 2).unwrap();
    c.push(Gate::named_controlled(
        NamedGate::Cnot,
        vec![Control::new(0, 1)],
        1,
    ))
    .unwrap();
    c
}

fn swap() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
    ])
    .unwrap()
}

#[test]
fn synth_identity_gives_empty_body() {
    let d = Dir::new();
    let input = d.write("id.json", &ComplexMatrix::identity(9).to_json());
    let out = d.path("id.qc");
    let run = qsynth(&[
        "synth", "--input", &input, "--radix", "3", "--wires", "2", "--out", &out,
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    assert_eq!(
        fs::read_to_string(&out).unwrap(),
        "qcir v1 radix=3 wires=2\n"
    );
}

#[test]
fn synth_single_qutrit_is_one_gate() {
    let d = Dir::new();
    let t10x =
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]])
            .unwrap();
    let input = d.write("t.json", &t10x.to_json());
    let out = d.path("t.qc");
    let run = qsynth(&[
        "synth", "--input", &input, "--radix", "3", "--wires", "1", "--out", &out,
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let c = qsynth::parse(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(c.len(), 1);
}

#[test]
fn synth_verify_haar_u8() {
    let d = Dir::new();
    let m = d.path("m.json");
    let out = d.path("m.qc");
    assert_eq!(
        code(&qsynth(&[
            "random", "--dim", "8", "--seed", "3", "--out", &m
        ])),
        0
    );
    let run = qsynth(&[
        "synth", "--input", &m, "--radix", "2", "--wires", "3", "--out", &out, "--verify",
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    assert!(residual(&run) <= 8e-8);
    assert!(stdout(&run).contains("PASS"));

    let again = qsynth(&["verify", "--circuit", &out, "--target", &m]);
    assert_eq!(code(&again), 0);
    assert!(stdout(&again).contains("PASS"));

    // an absurdly small tolerance from the environment makes it fail
    let strict = qsynth_env(
        &["verify", "--circuit", &out, "--target", &m],
        &[("QSYNTH_TOL", "1e-300")],
    );
    assert_eq!(code(&strict), 2);
    assert!(stdout(&strict).contains("FAIL"));
}

#[test]
fn synth_is_deterministic_and_lambda_expansion_verifies() {
    let d = Dir::new();
    let m = d.path("m.json");
    qsynth(&["random", "--dim", "9", "--seed", "1", "--out", &m]);
    let (a, b) = (d.path("a.qc"), d.path("b.qc"));
    for out in [&a, &b] {
        let run = qsynth(&[
            "synth",
            "--input",
            &m,
            "--radix",
            "3",
            "--wires",
            "2",
            "--out",
            out,
            "--expand-lambda",
            "--verify",
        ]);
        assert_eq!(code(&run), 0, "{}", stderr(&run));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn synth_errors() {
    let d = Dir::new();
    let out = d.path("x.qc");
    let bad = d.write("bad.json", "{\"dim\": 2, \"entries\": [[[1,0]]]}");
    let run = qsynth(&[
        "synth", "--input", &bad, "--radix", "2", "--wires", "1", "--out", &out,
    ]);
    assert_eq!(code(&run), 1);
    assert!(stderr(&run).contains("bad.json"));

    let skew = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
    let skew = d.write("skew.json", &skew.to_json());
    let run = qsynth(&[
        "synth", "--input", &skew, "--radix", "2", "--wires", "1", "--out", &out,
    ]);
    assert_eq!(code(&run), 1);
    assert!(stderr(&run).contains("deviation"));

    // 64 = 2^6, never 3^n
    let m = d.path("m.json");
    qsynth(&["random", "--dim", "64", "--seed", "0", "--out", &m]);
    let run = qsynth(&[
        "synth", "--input", &m, "--radix", "3", "--wires", "4", "--out", &out,
    ]);
    assert_eq!(code(&run), 1);
    let run = qsynth(&[
        "synth", "--input", &m, "--radix", "5", "--wires", "1", "--out", &out,
    ]);
    assert_eq!(code(&run), 1);
    let missing = d.path("missing.json");
    let run = qsynth(&[
        "synth", "--input", &missing, "--radix", "2", "--wires", "1", "--out", &out,
    ]);
    assert_eq!(code(&run), 1);
    assert!(stderr(&run).contains("missing.json"));
}

#[test]
fn verify_cases() {
    let d = Dir::new();
    let empty = d.write("e.qc", "qcir v1 radix=2 wires=2\n");
    let id = d.write("id.json", &ComplexMatrix::identity(4).to_json());
    let run = qsynth(&["verify", "--circuit", &empty, "--target", &id]);
    assert_eq!(code(&run), 0);
    assert!(stdout(&run).contains("PASS"));

    let cnot = d.write("cnot.qc", &serialize(&cnot_circuit()));
    let sw = d.write("swap.json", &swap().to_json());
    let run = qsynth(&["verify", "--circuit", &cnot, "--target", &sw]);
    assert_eq!(code(&run), 2);
    assert!(stdout(&run).contains("FAIL"));

    let id8 = d.write("id8.json", &ComplexMatrix::identity(8).to_json());
    let run = qsynth(&["verify", "--circuit", &cnot, "--target", &id8]);
    assert_eq!(code(&run), 1);
    assert!(stderr(&run).contains("dimension mismatch"));
}

#[test]
fn random_cases() {
    let d = Dir::new();
    let one = d.path("one.json");
    assert_eq!(
        code(&qsynth(&[
            "random", "--dim", "1", "--seed", "5", "--out", &one
        ])),
        0
    );
    let m = ComplexMatrix::from_json(&fs::read_to_string(&one).unwrap()).unwrap();
    assert_eq!(m.dim(), 1);
    assert!((m[(0, 0)].norm() - 1.0).abs() < 1e-12);

    let (a, b) = (d.path("a.json"), d.path("b.json"));
    qsynth(&["random", "--dim", "27", "--seed", "42", "--out", &a]);
    qsynth(&["random", "--dim", "27", "--seed", "42", "--out", &b]);
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let m = ComplexMatrix::from_json(&text).unwrap();
    assert!(m.is_unitary(1e-10));
    assert_eq!(m, haar_random_unitary(27, 42));

    let run = qsynth(&["random", "--dim", "0", "--seed", "1", "--out", &a]);
    assert_eq!(code(&run), 1);
}

#[test]
fn stats_cases() {
    let d = Dir::new();
    let empty = d.write("e.qc", "qcir v1 radix=3 wires=2\n");
    let run = qsynth(&["stats", "--circuit", &empty, "--json"]);
    assert_eq!(code(&run), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&run)).unwrap();
    assert_eq!(v["total"], 0);
    assert!(v["counts"].as_object().unwrap().is_empty());

    let u = haar_random_unitary(2, 17);
    let lowered = d.write("cu.qc", &serialize(&controlled_u_qubit(&u).unwrap()));
    let run = qsynth(&["stats", "--circuit", &lowered, "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&run)).unwrap();
    assert_eq!(v["counts"]["CNOT"], 2);
    let human = qsynth(&["stats", "--circuit", &lowered]);
    assert!(stdout(&human).contains("CNOT"));

    let mut rng = ChaCha20Rng::seed_from_u64(50);
    let fifty = d.write(
        "r.qc",
        &serialize(&random_circuit(&mut rng, Radix::Three, 3, 50)),
    );
    let run = qsynth(&["stats", "--circuit", &fifty, "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&run)).unwrap();
    let sum: u64 = v["counts"]
        .as_object()
        .unwrap()
        .values()
        .map(|x| x.as_u64().unwrap())
        .sum();
    assert_eq!(sum, 50);
    assert_eq!(v["total"], 50);

    let broken = d.write("b.qc", "qcir v1 radix=2 wires=1\ng X t0\ng NOPE t0\n");
    let run = qsynth(&["stats", "--circuit", &broken]);
    assert_eq!(code(&run), 1);
    assert!(stderr(&run).contains("line 3"), "{}", stderr(&run));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&qsynth(&[])), 1);
    assert_eq!(code(&qsynth(&["frobnicate"])), 1);
    assert_eq!(code(&qsynth(&["random", "--dim", "4"])), 1);
    assert_eq!(code(&qsynth(&["--help"])), 0);
}
