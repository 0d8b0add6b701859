//! Circuit IR for fixed-radix qudit registers.
//!
//! Gates are stored in temporal order: gate 0 acts first, so the circuit's
//! matrix is `U_{k-1} ⋯ U_1 · U_0`. Wire 0 is the most significant digit
//! of a basis index, which puts the controlled block of `Λ_m(U)` in the
//! bottom-right corner.

mod sim;
mod stats;
mod text;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{haar_random_unitary, ComplexMatrix, ONE, ZERO};

pub use sim::{apply_state, circuit_unitary, gate_matrix, MAX_DENSE_DIM};
pub use stats::{gate_stats, GateStats};
pub use text::{parse, serialize};

/// Unitarity tolerance for matrices attached to gates.
pub const GATE_UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Radix {
    Two,
    Three,
}

impl Radix {
    pub fn get(self) -> usize {
        match self {
            Radix::Two => 2,
            Radix::Three => 3,
        }
    }

    /// Digit value on which controls fire.
    pub fn active_digit(self) -> u8 {
        (self.get() - 1) as u8
    }
}

impl TryFrom<usize> for Radix {
    type Error = Error;

    fn try_from(r: usize) -> Result<Self> {
        match r {
            2 => Ok(Radix::Two),
            3 => Ok(Radix::Three),
            other => Err(Error::UnsupportedRadix(other)),
        }
    }
}

impl fmt::Display for Radix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.get())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Control {
    pub wire: usize,
    pub digit: u8,
}

impl Control {
    pub fn new(wire: usize, digit: u8) -> Self {
        Self { wire, digit }
    }
}

/// Primitive gates with fixed matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NamedGate {
    X,
    H,
    /// `X` with exactly one control on digit 1.
    Cnot,
    Trans12,
    Trans01,
    Trans02,
    Rot,
    /// `TRANS12` with exactly one control on digit 2.
    Ctrans,
}

impl NamedGate {
    pub const ALL: [NamedGate; 8] = [
        NamedGate::X,
        NamedGate::H,
        NamedGate::Cnot,
        NamedGate::Trans12,
        NamedGate::Trans01,
        NamedGate::Trans02,
        NamedGate::Rot,
        NamedGate::Ctrans,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NamedGate::X => "X",
            NamedGate::H => "H",
            NamedGate::Cnot => "CNOT",
            NamedGate::Trans12 => "TRANS12",
            NamedGate::Trans01 => "TRANS01",
            NamedGate::Trans02 => "TRANS02",
            NamedGate::Rot => "ROT",
            NamedGate::Ctrans => "CTRANS",
        }
    }

    pub fn radix(self) -> Radix {
        match self {
            NamedGate::X | NamedGate::H | NamedGate::Cnot => Radix::Two,
            _ => Radix::Three,
        }
    }

    /// Digit of the single mandatory control, for the controlled names.
    pub fn required_control(self) -> Option<u8> {
        match self {
            NamedGate::Cnot => Some(1),
            NamedGate::Ctrans => Some(2),
            _ => None,
        }
    }

    /// Transposition of two qutrit levels, `a < b`.
    pub fn transposition(a: u8, b: u8) -> Option<NamedGate> {
        match (a.min(b), a.max(b)) {
            (0, 1) => Some(NamedGate::Trans01),
            (0, 2) => Some(NamedGate::Trans02),
            (1, 2) => Some(NamedGate::Trans12),
            _ => None,
        }
    }

    /// Matrix acting on the target wire (without controls).
    pub fn target_matrix(self) -> ComplexMatrix {
        let perm = |images: &[usize]| {
            // column c is mapped to row images[c]
            let n = images.len();
            ComplexMatrix::from_fn(n, |r, c| if images[c] == r { ONE } else { ZERO })
        };
        match self {
            NamedGate::X | NamedGate::Cnot => perm(&[1, 0]),
            NamedGate::H => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                ComplexMatrix::new(2, vec![h, h, h, -h]).expect("2x2")
            }
            NamedGate::Trans12 | NamedGate::Ctrans => perm(&[0, 2, 1]),
            NamedGate::Trans01 => perm(&[1, 0, 2]),
            NamedGate::Trans02 => perm(&[2, 1, 0]),
            NamedGate::Rot => perm(&[2, 0, 1]),
        }
    }
}

impl fmt::Display for NamedGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NamedGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NamedGate::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| Error::UnknownGate(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    /// Generic single-qudit unitary.
    Unitary {
        target: usize,
        matrix: ComplexMatrix,
    },
    /// Generic single-qudit unitary with controls (`Λ_m(U)` when every
    /// control sits on the top digit).
    Controlled {
        controls: Vec<Control>,
        target: usize,
        matrix: ComplexMatrix,
    },
    /// Named primitive, optionally with controls.
    Named {
        name: NamedGate,
        controls: Vec<Control>,
        target: usize,
    },
    /// Diagonal phase gate `diag(e^{iθ_0}, …)` on one wire.
    Phase { target: usize, angles: Vec<f64> },
}

impl Gate {
    pub fn named(name: NamedGate, target: usize) -> Self {
        Gate::Named {
            name,
            controls: Vec::new(),
            target,
        }
    }

    pub fn named_controlled(name: NamedGate, controls: Vec<Control>, target: usize) -> Self {
        Gate::Named {
            name,
            controls,
            target,
        }
    }

    pub fn target(&self) -> usize {
        match self {
            Gate::Unitary { target, .. }
            | Gate::Controlled { target, .. }
            | Gate::Named { target, .. }
            | Gate::Phase { target, .. } => *target,
        }
    }

    pub fn controls(&self) -> &[Control] {
        match self {
            Gate::Controlled { controls, .. } | Gate::Named { controls, .. } => controls,
            Gate::Unitary { .. } | Gate::Phase { .. } => &[],
        }
    }

    /// Number of wires the gate touches.
    pub fn arity(&self) -> usize {
        1 + self.controls().len()
    }

    /// Matrix applied to the target wire when all controls are satisfied.
    pub fn target_matrix(&self) -> ComplexMatrix {
        match self {
            Gate::Unitary { matrix, .. } | Gate::Controlled { matrix, .. } => matrix.clone(),
            Gate::Named { name, .. } => name.target_matrix(),
            Gate::Phase { angles, .. } => ComplexMatrix::diagonal(
                &angles
                    .iter()
                    .map(|&a| Complex64::from_polar(1.0, a))
                    .collect::<Vec<_>>(),
            ),
        }
    }

    /// Key used in gate statistics.
    pub fn kind_name(&self) -> String {
        match self {
            Gate::Unitary { .. } => "U".into(),
            Gate::Phase { .. } => "PH".into(),
            Gate::Controlled { controls, .. } if controls.len() == 1 => "CU".into(),
            Gate::Controlled { controls, .. } => format!("C{}-U", controls.len()),
            Gate::Named { name, controls, .. } => {
                if controls.is_empty() || name.required_control().is_some() {
                    name.as_str().into()
                } else {
                    format!("C{}-{}", controls.len(), name)
                }
            }
        }
    }
}

/// Ordered gate list on `wires` qudits of a fixed radix.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    radix: Radix,
    wires: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(radix: Radix, wires: usize) -> Result<Self> {
        if wires == 0 {
            return Err(Error::InvalidGate(
                "a circuit needs at least one wire".into(),
            ));
        }
        radix
            .get()
            .checked_pow(wires as u32)
            .ok_or(Error::CapExceeded {
                dim: usize::MAX,
                cap: MAX_DENSE_DIM,
            })?;
        Ok(Self {
            radix,
            wires,
            gates: Vec::new(),
        })
    }

    pub fn radix(&self) -> Radix {
        self.radix
    }

    pub fn wires(&self) -> usize {
        self.wires
    }

    /// Dimension of the register's state space.
    pub fn dim(&self) -> usize {
        self.radix.get().pow(self.wires as u32)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        self.validate(&gate)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// Appends `other`'s gates (which then act after this circuit's).
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.radix != self.radix || other.wires != self.wires {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    fn validate(&self, gate: &Gate) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGate(msg));
        let target = gate.target();
        if target >= self.wires {
            return bad(format!("target wire {target} out of range"));
        }
        let controls = gate.controls();
        for (k, c) in controls.iter().enumerate() {
            if c.wire >= self.wires {
                return bad(format!("control wire {} out of range", c.wire));
            }
            if c.wire == target || controls[..k].iter().any(|o| o.wire == c.wire) {
                return bad(format!("wire {} used twice", c.wire));
            }
            if c.digit as usize >= self.radix.get() {
                return bad(format!(
                    "control digit {} exceeds radix {}",
                    c.digit, self.radix
                ));
            }
        }
        match gate {
            Gate::Unitary { matrix, .. } | Gate::Controlled { matrix, .. } => {
                if matrix.dim() != self.radix.get() {
                    return bad(format!(
                        "matrix of dimension {} on radix-{} wire",
                        matrix.dim(),
                        self.radix
                    ));
                }
                let dev = matrix.unitarity_deviation();
                if dev > GATE_UNITARY_TOL {
                    return Err(Error::NotUnitary { deviation: dev });
                }
            }
            Gate::Named { name, controls, .. } => {
                if name.radix() != self.radix {
                    return bad(format!("{name} is not a radix-{} gate", self.radix));
                }
                if let Some(d) = name.required_control() {
                    if controls.len() != 1 || controls[0].digit != d {
                        return bad(format!("{name} takes exactly one control on digit {d}"));
                    }
                }
            }
            Gate::Phase { angles, .. } => {
                if angles.len() != self.radix.get() || angles.iter().any(|a| !a.is_finite()) {
                    return bad(format!("phase gate needs {} finite angles", self.radix));
                }
            }
        }
        Ok(())
    }
}

/// Random valid circuit with a mix of every gate kind, for tests and
/// benchmarks.
///
/// Panics if `wires` is zero.
pub fn random_circuit<R: Rng + ?Sized>(
    rng: &mut R,
    radix: Radix,
    wires: usize,
    len: usize,
) -> Circuit {
    let d = radix.get();
    let mut c = Circuit::new(radix, wires).unwrap();
    let named: Vec<NamedGate> = NamedGate::ALL
        .into_iter()
        .filter(|g| g.radix() == radix)
        .collect();
    while c.len() < len {
        let target = rng.random_range(0..wires);
        let mut controls = Vec::new();
        for w in (0..wires).filter(|&w| w != target) {
            if rng.random_bool(0.4) {
                controls.push(Control::new(w, rng.random_range(0..d) as u8));
            }
        }
        let gate = match rng.random_range(0..4) {
            0 => Gate::Unitary {
                target,
                matrix: haar_random_unitary(d, rng.random()),
            },
            1 => Gate::Controlled {
                controls,
                target,
                matrix: haar_random_unitary(d, rng.random()),
            },
            2 => {
                let name = named[rng.random_range(0..named.len())];
                if let Some(digit) = name.required_control() {
                    if wires < 2 {
                        continue;
                    }
                    let w = (target + 1 + rng.random_range(0..wires - 1)) % wires;
                    controls = vec![Control::new(w, digit)];
                }
                Gate::named_controlled(name, controls, target)
            }
            _ => Gate::Phase {
                target,
                angles: (0..d).map(|_| rng.random_range(-3.0..3.0)).collect(),
            },
        };
        c.push(gate).unwrap();
    }
    c
}
