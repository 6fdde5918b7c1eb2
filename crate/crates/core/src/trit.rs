//! Unbalanced ternary algebra.
//!
//! Logical values live in `{0, 1, 2}` and map onto the three physical levels
//! `{0V, ½VDD, VDD}`. Carry signals of a partial full adder only ever take
//! `{0, 1}` and may be carried either as `{0V, ½VDD}` or as `{0V, VDD}`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Supply voltage used when a netlist does not declare one.
pub const DEFAULT_VDD: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("trit value {0} is outside {{0, 1, 2}}")]
    InvalidTrit(i64),
    #[error("carry-in {0} is outside the partial domain {{0, 1}}")]
    PartialCarryIn(Trit),
    #[error("trit {trit} cannot be encoded under {encoding}")]
    Unencodable { trit: Trit, encoding: SignalEncoding },
    #[error("level {level} is not a valid code under {encoding}")]
    Undecodable {
        level: VoltageLevel,
        encoding: SignalEncoding,
    },
}

/// A single unsigned ternary digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Trit(u8);

impl Trit {
    pub const ZERO: Trit = Trit(0);
    pub const ONE: Trit = Trit(1);
    pub const TWO: Trit = Trit(2);
    pub const ALL: [Trit; 3] = [Trit::ZERO, Trit::ONE, Trit::TWO];

    pub fn new(value: u8) -> Result<Self, DomainError> {
        if value <= 2 {
            Ok(Trit(value))
        } else {
            Err(DomainError::InvalidTrit(value as i64))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for Trit {
    type Error = DomainError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        Trit::new(value)
    }
}

/// Balanced digits (-1) and anything above 2 are rejected.
impl TryFrom<i64> for Trit {
    type Error = DomainError;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        if (0..=2).contains(&value) {
            Ok(Trit(value as u8))
        } else {
            Err(DomainError::InvalidTrit(value))
        }
    }
}

impl From<Trit> for u8 {
    fn from(t: Trit) -> u8 {
        t.0
    }
}

impl fmt::Display for Trit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One of the three physical levels of a single-supply ternary circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VoltageLevel {
    Gnd,
    Half,
    Vdd,
}

impl VoltageLevel {
    pub const ALL: [VoltageLevel; 3] = [VoltageLevel::Gnd, VoltageLevel::Half, VoltageLevel::Vdd];

    pub fn volts(self, vdd: f64) -> f64 {
        match self {
            VoltageLevel::Gnd => 0.0,
            VoltageLevel::Half => vdd / 2.0,
            VoltageLevel::Vdd => vdd,
        }
    }

    /// Level expressed in half-supply steps: 0, 1 or 2.
    pub fn steps(self) -> u8 {
        match self {
            VoltageLevel::Gnd => 0,
            VoltageLevel::Half => 1,
            VoltageLevel::Vdd => 2,
        }
    }

    pub fn from_steps(steps: u8) -> Option<Self> {
        match steps {
            0 => Some(VoltageLevel::Gnd),
            1 => Some(VoltageLevel::Half),
            2 => Some(VoltageLevel::Vdd),
            _ => None,
        }
    }

    /// Digit used in pattern files and trace output.
    pub fn digit(self) -> char {
        (b'0' + self.steps()) as char
    }
}

impl fmt::Display for VoltageLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VoltageLevel::Gnd => "GND",
            VoltageLevel::Half => "HALF",
            VoltageLevel::Vdd => "VDD",
        })
    }
}

/// How a logical carry '1' is carried on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CarryEncoding {
    /// '1' is ½VDD, produced by voltage division in single-supply designs.
    HalfVddHigh,
    /// '1' is VDD; the carry is a plain binary signal.
    FullVddHigh,
}

/// Encoding of any signal: standard ternary or one of the two carry encodings.
///
/// The set of levels an encoding can produce doubles as the declared domain of
/// a netlist input (`ternary`, `halfpair`, `binary`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SignalEncoding {
    Standard,
    HalfVddHigh,
    FullVddHigh,
}

impl SignalEncoding {
    pub fn levels(self) -> &'static [VoltageLevel] {
        match self {
            SignalEncoding::Standard => &VoltageLevel::ALL,
            SignalEncoding::HalfVddHigh => &[VoltageLevel::Gnd, VoltageLevel::Half],
            SignalEncoding::FullVddHigh => &[VoltageLevel::Gnd, VoltageLevel::Vdd],
        }
    }

    /// Number of logical values the encoding carries.
    pub fn radix(self) -> u8 {
        self.levels().len() as u8
    }

    /// Keyword used by the netlist format and the CLI.
    pub fn keyword(self) -> &'static str {
        match self {
            SignalEncoding::Standard => "ternary",
            SignalEncoding::HalfVddHigh => "halfpair",
            SignalEncoding::FullVddHigh => "binary",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        match word.to_ascii_lowercase().as_str() {
            "ternary" => Some(SignalEncoding::Standard),
            "halfpair" => Some(SignalEncoding::HalfVddHigh),
            "binary" => Some(SignalEncoding::FullVddHigh),
            _ => None,
        }
    }
}

impl From<CarryEncoding> for SignalEncoding {
    fn from(c: CarryEncoding) -> Self {
        match c {
            CarryEncoding::HalfVddHigh => SignalEncoding::HalfVddHigh,
            CarryEncoding::FullVddHigh => SignalEncoding::FullVddHigh,
        }
    }
}

impl fmt::Display for SignalEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

pub fn encode(t: Trit, encoding: SignalEncoding) -> Result<VoltageLevel, DomainError> {
    match (encoding, t.value()) {
        (SignalEncoding::Standard, v) => Ok(VoltageLevel::from_steps(v).expect("trit in range")),
        (_, 0) => Ok(VoltageLevel::Gnd),
        (SignalEncoding::HalfVddHigh, 1) => Ok(VoltageLevel::Half),
        (SignalEncoding::FullVddHigh, 1) => Ok(VoltageLevel::Vdd),
        _ => Err(DomainError::Unencodable { trit: t, encoding }),
    }
}

pub fn decode(level: VoltageLevel, encoding: SignalEncoding) -> Result<Trit, DomainError> {
    match (encoding, level) {
        (SignalEncoding::Standard, l) => Ok(Trit(l.steps())),
        (_, VoltageLevel::Gnd) => Ok(Trit::ZERO),
        (SignalEncoding::HalfVddHigh, VoltageLevel::Half) => Ok(Trit::ONE),
        (SignalEncoding::FullVddHigh, VoltageLevel::Vdd) => Ok(Trit::ONE),
        _ => Err(DomainError::Undecodable { level, encoding }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InverterKind {
    /// Negative ternary inverter: 2 only for input 0.
    Nti,
    /// Positive ternary inverter: 0 only for input 2.
    Pti,
    /// Standard ternary inverter: 2 - x.
    Sti,
}

pub fn ternary_inverter(kind: InverterKind, t: Trit) -> Trit {
    match kind {
        InverterKind::Nti => {
            if t == Trit::ZERO {
                Trit::TWO
            } else {
                Trit::ZERO
            }
        }
        InverterKind::Pti => {
            if t == Trit::TWO {
                Trit::ZERO
            } else {
                Trit::TWO
            }
        }
        InverterKind::Sti => Trit(2 - t.0),
    }
}

/// Complete ternary full adder: returns `(carry, sum)` with `3·carry + sum = a + b + c`.
pub fn full_add_complete(a: Trit, b: Trit, c: Trit) -> (Trit, Trit) {
    let total = a.0 + b.0 + c.0;
    (Trit(total / 3), Trit(total % 3))
}

/// Partial ternary full adder; the carry-in never takes the value 2.
pub fn full_add_partial(a: Trit, b: Trit, cin: Trit) -> Result<(Trit, Trit), DomainError> {
    if cin == Trit::TWO {
        return Err(DomainError::PartialCarryIn(cin));
    }
    Ok(full_add_complete(a, b, cin))
}
