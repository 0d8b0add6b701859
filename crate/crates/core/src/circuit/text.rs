//! Line-oriented circuit files.
//!
//! ```text
//! qcir v1 radix=2 wires=2
//! mat 0 dim=2
//! 1.0000000000000000e0+0.0000000000000000e0j 0.0000000000000000e0+0.0000000000000000e0j
//! 0.0000000000000000e0+0.0000000000000000e0j -1.0000000000000000e0+0.0000000000000000e0j
//! g U ref=0 t1
//! g CNOT c0=1 t1
//! g PH t0 0.0000000000000000e0 1.5707963267948966e0
//! ```
//!
//! Matrices are written once each (identical matrices share an id) before
//! the gate lines. A control written as a bare `c<wire>` fires on the top
//! digit. Everything after `#` on a line is ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::{Circuit, Control, Gate, NamedGate, Radix};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

const MAGIC: &str = "qcir";
const VERSION: &str = "v1";

fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_complex(z: Complex64) -> String {
    format!("{:.16e}{:+.16e}j", z.re, z.im)
}

fn fmt_controls(out: &mut String, controls: &[Control]) {
    for c in controls {
        let _ = write!(out, " c{}={}", c.wire, c.digit);
    }
}

pub fn serialize(c: &Circuit) -> String {
    let mut table: Vec<&ComplexMatrix> = Vec::new();
    let mut refs = Vec::with_capacity(c.len());
    for gate in c.gates() {
        refs.push(match gate {
            Gate::Unitary { matrix, .. } | Gate::Controlled { matrix, .. } => {
                Some(match table.iter().position(|m| *m == matrix) {
                    Some(id) => id,
                    None => {
                        table.push(matrix);
                        table.len() - 1
                    }
                })
            }
            _ => None,
        });
    }

    let mut out = format!(
        "{MAGIC} {VERSION} radix={} wires={}\n",
        c.radix(),
        c.wires()
    );
    for (id, m) in table.iter().enumerate() {
        let _ = writeln!(out, "mat {id} dim={}", m.dim());
        for row in m.rows() {
            let line: Vec<String> = row.iter().map(|&z| fmt_complex(z)).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    for (gate, id) in c.gates().iter().zip(refs) {
        out.push_str("g ");
        match gate {
            Gate::Unitary { target, .. } => {
                let _ = write!(out, "U ref={}", id.expect("matrix gate"));
                let _ = write!(out, " t{target}");
            }
            Gate::Controlled {
                controls, target, ..
            } => {
                let _ = write!(out, "CU ref={}", id.expect("matrix gate"));
                fmt_controls(&mut out, controls);
                let _ = write!(out, " t{target}");
            }
            Gate::Named {
                name,
                controls,
                target,
            } => {
                out.push_str(name.as_str());
                fmt_controls(&mut out, controls);
                let _ = write!(out, " t{target}");
            }
            Gate::Phase { target, angles } => {
                let _ = write!(out, "PH t{target}");
                for &a in angles {
                    out.push(' ');
                    out.push_str(&fmt_real(a));
                }
            }
        }
        out.push('\n');
    }
    out
}

struct Parser<'a> {
    lines: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)>> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
                .filter(|(_, l)| !l.is_empty()),
        );
        Self {
            lines: it.peekable(),
        }
    }
}

fn err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

fn keyed<'t>(line: usize, tok: &'t str, key: &str) -> Result<&'t str> {
    tok.strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| err(line, format!("expected `{key}=…`, found `{tok}`")))
}

fn number<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| err(line, format!("invalid {what} `{tok}`")))
}

fn parse_real(line: usize, tok: &str) -> Result<f64> {
    let x: f64 = number(line, tok, "number")?;
    if !x.is_finite() {
        return Err(err(line, format!("non-finite number `{tok}`")));
    }
    Ok(x)
}

fn parse_complex(line: usize, tok: &str) -> Result<Complex64> {
    let body = tok
        .strip_suffix('j')
        .ok_or_else(|| err(line, format!("complex entry `{tok}` must end in `j`")))?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(|| {
            err(
                line,
                format!("complex entry `{tok}` needs a real and an imaginary part"),
            )
        })?;
    Ok(Complex64::new(
        parse_real(line, &body[..split])?,
        parse_real(line, &body[split..])?,
    ))
}

fn parse_wire(line: usize, tok: &str, prefix: char) -> Result<usize> {
    let rest = tok
        .strip_prefix(prefix)
        .ok_or_else(|| err(line, format!("expected `{prefix}<wire>`, found `{tok}`")))?;
    number(line, rest, "wire")
}

fn parse_control(line: usize, tok: &str, radix: Radix) -> Result<Control> {
    let rest = &tok[1..];
    match rest.split_once('=') {
        Some((w, d)) => Ok(Control::new(
            number(line, w, "wire")?,
            number(line, d, "digit")?,
        )),
        None => Ok(Control::new(
            number(line, rest, "wire")?,
            radix.active_digit(),
        )),
    }
}

/// Controls followed by exactly one target token.
fn parse_operands(line: usize, toks: &[&str], radix: Radix) -> Result<(Vec<Control>, usize)> {
    let (last, init) = toks
        .split_last()
        .ok_or_else(|| err(line, "missing target wire"))?;
    let controls = init
        .iter()
        .map(|t| {
            if t.starts_with('c') {
                parse_control(line, t, radix)
            } else {
                Err(err(
                    line,
                    format!("expected control `c<wire>=<digit>`, found `{t}`"),
                ))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((controls, parse_wire(line, last, 't')?))
}

pub fn parse(text: &str) -> Result<Circuit> {
    let mut p = Parser::new(text);
    let (line, header) = p.lines.next().ok_or_else(|| err(1, "empty circuit file"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != MAGIC || toks[1] != VERSION {
        return Err(err(
            line,
            format!("expected `{MAGIC} {VERSION} radix=<r> wires=<n>`"),
        ));
    }
    let radix = Radix::try_from(number::<usize>(
        line,
        keyed(line, toks[2], "radix")?,
        "radix",
    )?)
    .map_err(|e| err(line, e.to_string()))?;
    let wires: usize = number(line, keyed(line, toks[3], "wires")?, "wire count")?;
    let mut circuit = Circuit::new(radix, wires).map_err(|e| err(line, e.to_string()))?;

    let mut table: BTreeMap<usize, ComplexMatrix> = BTreeMap::new();
    while let Some((line, content)) = p.lines.next() {
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[0] {
            "mat" => {
                if toks.len() != 3 {
                    return Err(err(line, "expected `mat <id> dim=<d>`"));
                }
                let id: usize = number(line, toks[1], "matrix id")?;
                let dim: usize = number(line, keyed(line, toks[2], "dim")?, "dimension")?;
                if dim == 0 {
                    return Err(err(line, "matrix dimension must be positive"));
                }
                if table.contains_key(&id) {
                    return Err(err(line, format!("matrix {id} defined twice")));
                }
                let mut data = Vec::with_capacity(dim * dim);
                for r in 0..dim {
                    let (row_line, row) = p
                        .lines
                        .next()
                        .ok_or_else(|| err(line, format!("matrix {id} is missing row {r}")))?;
                    let entries: Vec<&str> = row.split_whitespace().collect();
                    if entries.len() != dim {
                        return Err(err(
                            row_line,
                            format!("matrix row has {} entries, expected {dim}", entries.len()),
                        ));
                    }
                    for e in entries {
                        data.push(parse_complex(row_line, e)?);
                    }
                }
                table.insert(id, ComplexMatrix::new(dim, data)?);
            }
            "g" => {
                let kind = *toks.get(1).ok_or_else(|| err(line, "missing gate name"))?;
                let rest = &toks[2..];
                let lookup = |tok: Option<&&str>| -> Result<ComplexMatrix> {
                    let tok = tok.ok_or_else(|| err(line, "missing matrix reference"))?;
                    let id: usize = number(line, keyed(line, tok, "ref")?, "matrix id")?;
                    table
                        .get(&id)
                        .cloned()
                        .ok_or_else(|| err(line, format!("undefined matrix {id}")))
                };
                let gate = match kind {
                    "U" => {
                        let matrix = lookup(rest.first())?;
                        let (controls, target) = parse_operands(line, &rest[1..], radix)?;
                        if !controls.is_empty() {
                            return Err(err(line, "U takes no controls; use CU"));
                        }
                        Gate::Unitary { target, matrix }
                    }
                    "CU" => {
                        let matrix = lookup(rest.first())?;
                        let (controls, target) = parse_operands(line, &rest[1..], radix)?;
                        Gate::Controlled {
                            controls,
                            target,
                            matrix,
                        }
                    }
                    "PH" => {
                        let target = parse_wire(
                            line,
                            rest.first()
                                .ok_or_else(|| err(line, "missing target wire"))?,
                            't',
                        )?;
                        let angles = rest[1..]
                            .iter()
                            .map(|t| parse_real(line, t))
                            .collect::<Result<Vec<_>>>()?;
                        Gate::Phase { target, angles }
                    }
                    name => {
                        let name: NamedGate =
                            name.parse().map_err(|e: Error| err(line, e.to_string()))?;
                        let (controls, target) = parse_operands(line, rest, radix)?;
                        Gate::named_controlled(name, controls, target)
                    }
                };
                circuit.push(gate).map_err(|e| err(line, e.to_string()))?;
            }
            other => return Err(err(line, format!("unexpected `{other}`"))),
        }
    }
    Ok(circuit)
}
