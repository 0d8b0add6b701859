//! Classical routing plans that move two (radix 2) or three (radix 3)
//! basis states onto the canonical last-wire subspace, where a single
//! multi-controlled gate can act on them.
//!
//! Wire 0 is the most significant digit. Every step is a controlled
//! transposition of two digit values on one wire, so every step is its own
//! inverse and a plan is undone by replaying its steps backwards.

use std::fmt;

use crate::error::{Error, Result};

/// Fixed-length digit string, most significant digit first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigitString {
    radix: u8,
    digits: Vec<u8>,
}

impl DigitString {
    pub fn from_index(value: usize, radix: u8, len: usize) -> Self {
        let r = radix as usize;
        let mut digits = vec![0u8; len];
        let mut v = value;
        for d in digits.iter_mut().rev() {
            *d = (v % r) as u8;
            v /= r;
        }
        debug_assert_eq!(v, 0, "value {value} does not fit in {len} digits");
        Self { radix, digits }
    }

    pub fn radix(&self) -> u8 {
        self.radix
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn value(&self) -> usize {
        self.digits
            .iter()
            .fold(0, |acc, &d| acc * self.radix as usize + d as usize)
    }
}

impl fmt::Display for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Transposes the values `flip.0 ↔ flip.1` on `target_wire` for basis
/// states that satisfy every `(wire, digit)` control.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoutingStep {
    pub target_wire: usize,
    pub flip: (u8, u8),
    pub controls: Vec<(usize, u8)>,
}

impl RoutingStep {
    fn apply(&self, digits: &mut [u8]) {
        if self.controls.iter().all(|&(w, d)| digits[w] == d) {
            let t = &mut digits[self.target_wire];
            if *t == self.flip.0 {
                *t = self.flip.1;
            } else if *t == self.flip.1 {
                *t = self.flip.0;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoutingPlan {
    pub radix: u8,
    pub wires: usize,
    pub steps: Vec<RoutingStep>,
    /// Images of the routed indices, in input order.
    pub final_states: Vec<usize>,
    /// Step counts at the end of each stage (Gray walk / fill / normalize
    /// for radix 2; last-digit split / prefix match / fill for radix 3).
    pub stage_ends: Vec<usize>,
}

impl RoutingPlan {
    /// The same steps in reverse order, which undoes the plan.
    pub fn inverse(&self) -> Vec<RoutingStep> {
        self.steps.iter().rev().cloned().collect()
    }

    /// Image of `x` after the first `count` steps.
    pub fn apply_prefix(&self, count: usize, x: usize) -> usize {
        let mut s = DigitString::from_index(x, self.radix, self.wires);
        for step in &self.steps[..count] {
            step.apply(&mut s.digits);
        }
        s.value()
    }
}

pub fn apply_plan_to_index(plan: &RoutingPlan, x: usize) -> usize {
    plan.apply_prefix(plan.steps.len(), x)
}

pub fn apply_steps_to_index(steps: &[RoutingStep], radix: u8, wires: usize, x: usize) -> usize {
    let mut s = DigitString::from_index(x, radix, wires);
    for step in steps {
        step.apply(&mut s.digits);
    }
    s.value()
}

/// Tracks a handful of basis states while steps are appended.
struct Tracker {
    radix: u8,
    wires: usize,
    states: Vec<Vec<u8>>,
    steps: Vec<RoutingStep>,
    stage_ends: Vec<usize>,
}

impl Tracker {
    fn new(radix: u8, wires: usize, indices: &[usize]) -> Self {
        Self {
            radix,
            wires,
            states: indices
                .iter()
                .map(|&i| DigitString::from_index(i, radix, wires).digits)
                .collect(),
            steps: Vec::new(),
            stage_ends: Vec::new(),
        }
    }

    fn push(&mut self, step: RoutingStep) {
        for s in &mut self.states {
            step.apply(s);
        }
        self.steps.push(step);
    }

    /// Moves tracked state `which` to `to` on `wire`, conditioned on all its
    /// other digits.
    fn set_digit(&mut self, which: usize, wire: usize, to: u8) {
        let from = self.states[which][wire];
        if from == to {
            return;
        }
        let controls = (0..self.wires)
            .filter(|&w| w != wire)
            .map(|w| (w, self.states[which][w]))
            .collect();
        self.push(RoutingStep {
            target_wire: wire,
            flip: (from.min(to), from.max(to)),
            controls,
        });
    }

    fn end_stage(&mut self) {
        self.stage_ends.push(self.steps.len());
    }

    fn finish(self) -> RoutingPlan {
        let final_states = self
            .states
            .iter()
            .map(|d| {
                DigitString {
                    radix: self.radix,
                    digits: d.clone(),
                }
                .value()
            })
            .collect();
        RoutingPlan {
            radix: self.radix,
            wires: self.wires,
            steps: self.steps,
            final_states,
            stage_ends: self.stage_ends,
        }
    }
}

fn check_range(indices: &[usize], radix: usize, wires: usize) -> Result<()> {
    let dim = radix.pow(wires as u32);
    match indices.iter().find(|&&i| i >= dim) {
        Some(&index) => Err(Error::IndexOutOfRange { index, dim }),
        None => Ok(()),
    }
}

/// Gray walk from `i` to `j`, flipping differing bits from the least
/// significant to the most significant. Empty when `i == j`.
pub fn binary_gray_path(i: usize, j: usize, wires: usize) -> Result<Vec<DigitString>> {
    check_range(&[i, j], 2, wires)?;
    if i == j {
        return Ok(Vec::new());
    }
    let mut cur = DigitString::from_index(i, 2, wires);
    let target = DigitString::from_index(j, 2, wires);
    let mut path = vec![cur.clone()];
    for w in (0..wires).rev() {
        if cur.digits[w] != target.digits[w] {
            cur.digits[w] = target.digits[w];
            path.push(cur.clone());
        }
    }
    Ok(path)
}

/// Plan sending `i → 2ⁿ−1` and `j → 2ⁿ−2`.
///
/// Stage 1 walks `i` along its Gray path towards `j`, stopping one flip
/// short so the two differ in exactly one bit. Stage 2 sets every other
/// bit to 1 with plain flips. Stage 3 moves the differing bit to the last
/// wire (and orients it so `i` ends on the all-ones state).
pub fn plan_binary_routing(i: usize, j: usize, wires: usize) -> Result<RoutingPlan> {
    let path = binary_gray_path(i, j, wires)?;
    let mut t = Tracker::new(2, wires, &[i, j]);
    if path.is_empty() {
        for _ in 0..3 {
            t.end_stage();
        }
        let mut plan = t.finish();
        plan.final_states.truncate(1);
        return Ok(plan);
    }

    for pair in path.windows(2).take(path.len().saturating_sub(2)) {
        let w = differing_wire(&pair[0], &pair[1]);
        t.set_digit(0, w, pair[1].digits[w]);
    }
    t.end_stage();

    let diff = (0..wires)
        .find(|&w| t.states[0][w] != t.states[1][w])
        .expect("states differ");
    for w in (0..wires).filter(|&w| w != diff) {
        if t.states[0][w] == 0 {
            t.push(RoutingStep {
                target_wire: w,
                flip: (0, 1),
                controls: Vec::new(),
            });
        }
    }
    t.end_stage();

    let last = wires - 1;
    if diff != last {
        // Both states read 1 on `last`. Drop j's last bit to 0, then lift
        // j's bit on `diff` to 1 (or i's, if i is the one holding the 0).
        t.set_digit(1, last, 0);
        if t.states[0][diff] == 1 {
            t.set_digit(1, diff, 1);
        } else {
            t.set_digit(0, diff, 1);
        }
    } else if t.states[0][last] == 0 {
        t.set_digit(0, last, 1);
    }
    t.end_stage();

    let plan = t.finish();
    debug_assert_eq!(plan.final_states, vec![(1 << wires) - 1, (1 << wires) - 2]);
    Ok(plan)
}

fn differing_wire(a: &DigitString, b: &DigitString) -> usize {
    a.digits
        .iter()
        .zip(&b.digits)
        .position(|(x, y)| x != y)
        .expect("adjacent Gray states differ")
}

/// Plan sending `(i, j, k) → (3ⁿ−1, 3ⁿ−2, 3ⁿ−3)`, i.e. `2…22`, `2…21`,
/// `2…20`.
///
/// Stage 1 sets the last digits of `i`, `j`, `k` to 2, 1, 0. Stage 2 makes
/// the leading digits of `j` and then `k` equal to those of `i`, scanning
/// wires left to right; since the three last digits now differ, these
/// steps never disturb another tracked state. Stage 3 sets the shared
/// leading digits to 2.
pub fn plan_ternary_routing(i: usize, j: usize, k: usize, wires: usize) -> Result<RoutingPlan> {
    check_range(&[i, j, k], 3, wires)?;
    if i == j || j == k || i == k {
        return Err(Error::InvalidIndices(vec![i, j, k]));
    }
    let last = wires - 1;
    let mut t = Tracker::new(3, wires, &[i, j, k]);

    for (which, digit) in [(0, 2), (1, 1), (2, 0)] {
        t.set_digit(which, last, digit);
    }
    t.end_stage();

    for which in [1, 2] {
        for w in 0..last {
            let want = t.states[0][w];
            t.set_digit(which, w, want);
        }
    }
    t.end_stage();

    for w in 0..last {
        let d = t.states[0][w];
        if d != 2 {
            t.push(RoutingStep {
                target_wire: w,
                flip: (d, 2),
                controls: Vec::new(),
            });
        }
    }
    t.end_stage();

    let plan = t.finish();
    let top = 3usize.pow(wires as u32);
    debug_assert_eq!(plan.final_states, vec![top - 1, top - 2, top - 3]);
    Ok(plan)
}
