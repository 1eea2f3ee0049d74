//! Reversible-circuit IR, text format, and exact statevector execution.
//!
//! Circuits act on `zero_inputs` wires prepared in |0⟩ followed by
//! `plus_inputs` wires prepared in |+⟩. Every gate is a classical permutation
//! of computational basis states, so amplitudes are only ever moved around,
//! never mixed.
//!
//! Text format (UTF-8, `#` starts a comment):
//!
//! ```text
//! work <n> <m>
//! X <q>
//! CNOT <c> <t>
//! CCX <a> <b> <t>
//! ID
//! PERM <k> <q1..qk> <2^k images>
//! ```
//!
//! Wire 0 is the most significant bit of a basis index; in a `PERM` gate the
//! first listed wire is the most significant bit of the local index.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{Basis, QuantumState};

/// Default cap on total wires for dense statevector execution.
pub const DEFAULT_WIRE_CAP: usize = 24;

/// Maximum arity of a `PERM` gate.
pub const PERM_ARITY_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gate {
    X { target: usize },
    Cnot { control: usize, target: usize },
    Toffoli { controls: [usize; 2], target: usize },
    Id,
    Perm { wires: Vec<usize>, table: Vec<usize> },
}

impl Gate {
    /// Wires the gate acts on, most significant local bit first.
    pub fn wires(&self) -> Vec<usize> {
        match self {
            Gate::X { target } => vec![*target],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Toffoli { controls, target } => vec![controls[0], controls[1], *target],
            Gate::Id => vec![],
            Gate::Perm { wires, .. } => wires.clone(),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Gate::X { .. } => 1,
            Gate::Cnot { .. } => 2,
            Gate::Toffoli { .. } => 3,
            Gate::Id => 0,
            Gate::Perm { wires, .. } => wires.len(),
        }
    }

    /// Image of a local basis index under the gate's permutation.
    pub fn map_local(&self, local: usize) -> usize {
        match self {
            Gate::X { .. } => local ^ 1,
            Gate::Cnot { .. } => {
                if local & 0b10 != 0 {
                    local ^ 1
                } else {
                    local
                }
            }
            Gate::Toffoli { .. } => {
                if local & 0b110 == 0b110 {
                    local ^ 1
                } else {
                    local
                }
            }
            Gate::Id => local,
            Gate::Perm { table, .. } => table[local],
        }
    }

    /// Full permutation table over the gate's local space.
    pub fn permutation_table(&self) -> Vec<usize> {
        (0..1usize << self.arity()).map(|i| self.map_local(i)).collect()
    }

    fn validate(&self, num_wires: usize, line: usize) -> Result<()> {
        let wires = self.wires();
        for &w in &wires {
            if w >= num_wires {
                return Err(Error::WireOutOfRange { wire: w, wires: num_wires, line });
            }
        }
        for i in 0..wires.len() {
            for j in i + 1..wires.len() {
                if wires[i] == wires[j] {
                    return Err(Error::InvalidGate(format!(
                        "duplicate wire {} (line {line})",
                        wires[i]
                    )));
                }
            }
        }
        if let Gate::Perm { wires, table } = self {
            if wires.is_empty() || wires.len() > PERM_ARITY_CAP {
                return Err(Error::InvalidGate(format!(
                    "PERM arity {} outside 1..={PERM_ARITY_CAP} (line {line})",
                    wires.len()
                )));
            }
            let size = 1usize << wires.len();
            if table.len() != size {
                return Err(Error::NonBijectivePerm {
                    size,
                    msg: format!("table has {} entries, expected {size} (line {line})", table.len()),
                });
            }
            let mut seen = vec![false; size];
            for &image in table {
                if image >= size || seen[image] {
                    return Err(Error::NonBijectivePerm {
                        size,
                        msg: format!("image {image} repeated or out of range (line {line})"),
                    });
                }
                seen[image] = true;
            }
        }
        Ok(())
    }
}

/// Ordered gate list over `zero_inputs` |0⟩ wires and `plus_inputs` |+⟩ wires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub zero_inputs: usize,
    pub plus_inputs: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(zero_inputs: usize, plus_inputs: usize, gates: Vec<Gate>) -> Result<Self> {
        let c = Circuit { zero_inputs, plus_inputs, gates };
        c.validate()?;
        Ok(c)
    }

    pub fn num_wires(&self) -> usize {
        self.zero_inputs + self.plus_inputs
    }

    /// Number of gates (clock steps).
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.gates.is_empty() {
            return Err(Error::InvalidGate("circuit must contain at least one gate".into()));
        }
        if self.num_wires() == 0 {
            return Err(Error::InvalidGate("circuit must have at least one wire".into()));
        }
        for (i, g) in self.gates.iter().enumerate() {
            g.validate(self.num_wires(), i + 2)?;
        }
        Ok(())
    }

    /// Identity-padded copy: `len()` extra steps appended so the clock runs
    /// over `0..2T-1` with trivial gates in the second half. This makes the
    /// accepting clock window `T..=2T-1` carry exactly half the history
    /// weight.
    pub fn padded(&self) -> Circuit {
        let t = self.len();
        let mut gates = self.gates.clone();
        gates.extend(std::iter::repeat(Gate::Id).take(t - 1));
        Circuit { zero_inputs: self.zero_inputs, plus_inputs: self.plus_inputs, gates }
    }

    /// Accepting clock window: `{T}` unpadded, `{T..=2T-1}` padded, expressed
    /// relative to the circuit that was actually lowered.
    pub fn accept_window(original_len: usize, padded: bool) -> Vec<usize> {
        if padded {
            (original_len..2 * original_len).collect()
        } else {
            vec![original_len]
        }
    }

    /// The product state |0⟩^n |+⟩^m as a work-only statevector.
    pub fn input_state(&self) -> QuantumState {
        let basis = Basis::Work { wires: self.num_wires() };
        let dim = basis.dimension();
        let m = self.plus_inputs;
        // amplitude 2^{-m/2} on every index whose zero-wires are all 0
        let amp = 2f64.powf(-(m as f64) / 2.0);
        let zero_mask = if self.zero_inputs == 0 {
            0
        } else {
            ((1usize << self.zero_inputs) - 1) << self.plus_inputs
        };
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        for (i, a) in amps.iter_mut().enumerate() {
            if i & zero_mask == 0 {
                *a = Complex64::new(amp, 0.0);
            }
        }
        QuantumState { basis, amps }
    }
}

/// Apply `gate` in place to a register of `total_wires` qubits.
///
/// Amplitudes move by index remapping only; no matrix is ever formed.
pub fn apply_gate(amps: &mut Vec<Complex64>, total_wires: usize, gate: &Gate) {
    let wires = gate.wires();
    if wires.is_empty() {
        return;
    }
    let shifts: Vec<usize> = wires.iter().map(|&q| total_wires - 1 - q).collect();
    let dim = amps.len();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for g in 0..dim {
        let mut local = 0usize;
        for &sh in &shifts {
            local = (local << 1) | ((g >> sh) & 1);
        }
        let image = gate.map_local(local);
        let mut g2 = g;
        for (bit_pos, &sh) in shifts.iter().enumerate() {
            let b = (image >> (shifts.len() - 1 - bit_pos)) & 1;
            g2 = (g2 & !(1usize << sh)) | (b << sh);
        }
        out[g2] = amps[g];
    }
    *amps = out;
}

/// Run the whole circuit on |0⟩^n |+⟩^m and return the work-register state.
pub fn run_circuit(c: &Circuit) -> Result<QuantumState> {
    run_circuit_with_cap(c, DEFAULT_WIRE_CAP)
}

pub fn run_circuit_with_cap(c: &Circuit, wire_cap: usize) -> Result<QuantumState> {
    partial_history_with_cap(c, c.len(), wire_cap)
}

/// Work part of the partial execution after the first `t` gates.
pub fn partial_history(c: &Circuit, t: usize) -> Result<QuantumState> {
    partial_history_with_cap(c, t, DEFAULT_WIRE_CAP)
}

pub fn partial_history_with_cap(c: &Circuit, t: usize, wire_cap: usize) -> Result<QuantumState> {
    if t > c.len() {
        return Err(Error::StepOutOfRange { t, max: c.len() });
    }
    if c.num_wires() > wire_cap {
        return Err(Error::DimensionCap {
            required: 1usize << c.num_wires(),
            cap: 1usize << wire_cap,
        });
    }
    let mut state = c.input_state();
    let wires = c.num_wires();
    for gate in &c.gates[..t] {
        apply_gate(&mut state.amps, wires, gate);
    }
    Ok(state)
}

// --- text format ---------------------------------------------------------

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut header: Option<(usize, usize)> = None;
    let mut gates: Vec<Gate> = Vec::new();
    for (line_idx, raw) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens = tokenize(line, line_no);
        if tokens.is_empty() {
            continue;
        }
        if header.is_none() {
            if tokens[0].text != "work" {
                return Err(parse_err(&tokens[0], "expected header `work <n> <m>`"));
            }
            if tokens.len() != 3 {
                return Err(parse_err(&tokens[0], "header needs exactly two counts"));
            }
            let n = parse_usize(&tokens[1])?;
            let m = parse_usize(&tokens[2])?;
            header = Some((n, m));
            continue;
        }
        gates.push(parse_gate(&tokens)?);
    }
    let (n, m) = header.ok_or(Error::Parse {
        line: 1,
        col: 1,
        msg: "empty circuit file (missing `work` header)".into(),
    })?;
    let c = Circuit { zero_inputs: n, plus_inputs: m, gates };
    c.validate()?;
    Ok(c)
}

/// Inverse of [`parse_circuit`]; `parse(serialize(c)) == c` bit-exactly.
pub fn serialize_circuit(c: &Circuit) -> String {
    let mut out = format!("work {} {}\n", c.zero_inputs, c.plus_inputs);
    for g in &c.gates {
        match g {
            Gate::X { target } => out.push_str(&format!("X {target}\n")),
            Gate::Cnot { control, target } => out.push_str(&format!("CNOT {control} {target}\n")),
            Gate::Toffoli { controls, target } => {
                out.push_str(&format!("CCX {} {} {target}\n", controls[0], controls[1]))
            }
            Gate::Id => out.push_str("ID\n"),
            Gate::Perm { wires, table } => {
                out.push_str(&format!("PERM {}", wires.len()));
                for w in wires {
                    out.push_str(&format!(" {w}"));
                }
                for v in table {
                    out.push_str(&format!(" {v}"));
                }
                out.push('\n');
            }
        }
    }
    out
}

struct Token<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

fn tokenize(line: &str, line_no: usize) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut col = 0;
    for part in line.split(char::is_whitespace) {
        if !part.is_empty() {
            let offset = line[col..].find(part).unwrap() + col;
            tokens.push(Token { text: part, line: line_no, col: offset + 1 });
            col = offset + part.len();
        }
    }
    tokens
}

fn parse_err(tok: &Token, msg: &str) -> Error {
    Error::Parse { line: tok.line, col: tok.col, msg: format!("{msg} (got `{}`)", tok.text) }
}

fn parse_usize(tok: &Token) -> Result<usize> {
    tok.text
        .parse::<usize>()
        .map_err(|_| parse_err(tok, "expected a non-negative integer"))
}

fn parse_gate(tokens: &[Token]) -> Result<Gate> {
    let expect_args = |n: usize| -> Result<()> {
        if tokens.len() != n + 1 {
            Err(parse_err(&tokens[0], &format!("expected {n} arguments")))
        } else {
            Ok(())
        }
    };
    match tokens[0].text {
        "X" => {
            expect_args(1)?;
            Ok(Gate::X { target: parse_usize(&tokens[1])? })
        }
        "CNOT" => {
            expect_args(2)?;
            Ok(Gate::Cnot { control: parse_usize(&tokens[1])?, target: parse_usize(&tokens[2])? })
        }
        "CCX" => {
            expect_args(3)?;
            Ok(Gate::Toffoli {
                controls: [parse_usize(&tokens[1])?, parse_usize(&tokens[2])?],
                target: parse_usize(&tokens[3])?,
            })
        }
        "ID" => {
            expect_args(0)?;
            Ok(Gate::Id)
        }
        "PERM" => {
            if tokens.len() < 2 {
                return Err(parse_err(&tokens[0], "PERM needs an arity"));
            }
            let k = parse_usize(&tokens[1])?;
            if k == 0 || k > PERM_ARITY_CAP {
                return Err(parse_err(&tokens[1], &format!("PERM arity must be 1..={PERM_ARITY_CAP}")));
            }
            let size = 1usize << k;
            expect_args(1 + k + size)?;
            let wires = tokens[2..2 + k].iter().map(parse_usize).collect::<Result<Vec<_>>>()?;
            let table =
                tokens[2 + k..].iter().map(parse_usize).collect::<Result<Vec<_>>>()?;
            Ok(Gate::Perm { wires, table })
        }
        _ => Err(parse_err(&tokens[0], "unknown gate")),
    }
}
