//! Phased Pauli operators in symplectic form.
//!
//! An operator on `n` qubits is stored as two bit vectors `x`, `z` and a phase
//! exponent `phase ∈ {0,1,2,3}` with value
//!
//! ```text
//!     i^phase · ∏_q X_q^{x_q} Z_q^{z_q}        (X to the left of Z on each qubit)
//! ```
//!
//! Because `Y = i·X·Z`, an operator written with letters carries
//! `phase = prefix + #Y (mod 4)`: the text form `+Y` is stored with `phase = 1`
//! and `-iXZY` with `phase = 3 + 1 = 0`. Display performs the inverse mapping.
//!
//! Text form: one of the prefixes `+`, `-`, `+i`, `-i` (or none, meaning `+`)
//! followed by one letter from `IXYZ` per qubit, qubit 0 first.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits::BitSet;
use crate::error::{Result, SpfError};

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn basis(self) -> Option<Basis> {
        match self {
            Letter::I => None,
            Letter::X => Some(Basis::X),
            Letter::Y => Some(Basis::Y),
            Letter::Z => Some(Basis::Z),
        }
    }

    /// Two single-qubit letters commute iff either is the identity or they are equal.
    pub fn commutes_with(self, other: Letter) -> bool {
        self == Letter::I || other == Letter::I || self == other
    }
}

/// Single-qubit measurement basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    pub fn letter(self) -> Letter {
        match self {
            Basis::X => Letter::X,
            Basis::Y => Letter::Y,
            Basis::Z => Letter::Z,
        }
    }

    pub fn as_char(self) -> char {
        self.letter().as_char()
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for Basis {
    type Err = SpfError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "X" | "x" => Ok(Basis::X),
            "Y" | "y" => Ok(Basis::Y),
            "Z" | "z" => Ok(Basis::Z),
            other => Err(SpfError::PauliParse(other.to_string())),
        }
    }
}

/// Clifford gates the tracker understands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    H,
    S,
    Cz,
}

impl Gate {
    pub fn arity(self) -> usize {
        match self {
            Gate::H | Gate::S => 1,
            Gate::Cz => 2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Gate::H => "H",
            Gate::S => "S",
            Gate::Cz => "CZ",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    x: BitSet,
    z: BitSet,
    phase: u8,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        PauliOperator { n, x: BitSet::new(), z: BitSet::new(), phase: 0 }
    }

    /// Builds from raw symplectic parts. Bits beyond `n` are rejected.
    pub fn from_parts(n: usize, x: BitSet, z: BitSet, phase: u8) -> Result<Self> {
        for bits in [&x, &z] {
            if bits.span() > n {
                return Err(SpfError::QubitIndex { index: bits.span() - 1, n });
            }
        }
        Ok(PauliOperator { n, x, z, phase: phase & 3 })
    }

    /// `+P_q` for a single letter on qubit `q`, with the letter's real sign.
    pub fn single(n: usize, q: usize, letter: Letter) -> Result<Self> {
        if q >= n {
            return Err(SpfError::QubitIndex { index: q, n });
        }
        let mut op = PauliOperator::identity(n);
        op.set_letter(q, letter);
        Ok(op)
    }

    /// Operator from `(qubit, letter)` pairs with a `+` sign.
    pub fn from_letters(n: usize, letters: &[(usize, Letter)]) -> Result<Self> {
        let mut op = PauliOperator::identity(n);
        for &(q, l) in letters {
            if q >= n {
                return Err(SpfError::QubitIndex { index: q, n });
            }
            op.set_letter(q, l);
        }
        Ok(op)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn x_bits(&self) -> &BitSet {
        &self.x
    }

    #[inline]
    pub fn z_bits(&self) -> &BitSet {
        &self.z
    }

    /// Raw exponent of `i` in the symplectic convention.
    #[inline]
    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    /// Exponent of `i` in front of the letter string, i.e. the printed sign.
    pub fn letter_phase(&self) -> u8 {
        let ys = self.x.and_count(&self.z) as u8;
        self.phase.wrapping_sub(ys & 3) & 3
    }

    /// True when the letter-string sign is `±1`.
    pub fn is_hermitian(&self) -> bool {
        self.letter_phase().is_multiple_of(2)
    }

    /// Returns `-1` or `+1` for Hermitian operators, `None` otherwise.
    pub fn sign(&self) -> Option<i8> {
        match self.letter_phase() {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn negate(&mut self) {
        self.phase = (self.phase + 2) & 3;
    }

    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.negate();
        out
    }

    /// Multiplies the whole operator by `i^k`.
    pub fn mul_phase(&mut self, k: u8) {
        self.phase = (self.phase + k) & 3;
    }

    /// Same letters with a `+` sign.
    pub fn unsigned(&self) -> Self {
        let mut out = self.clone();
        out.phase = (self.x.and_count(&self.z) & 3) as u8;
        out
    }

    #[inline]
    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x.contains(q), self.z.contains(q))
    }

    /// Replaces the letter on `q`, keeping the printed sign unchanged.
    pub fn set_letter(&mut self, q: usize, letter: Letter) {
        let printed = self.letter_phase();
        let (xb, zb) = letter.bits();
        if xb != self.x.contains(q) {
            self.x.toggle(q);
        }
        if zb != self.z.contains(q) {
            self.z.toggle(q);
        }
        self.phase = (printed + (self.x.and_count(&self.z) & 3) as u8) & 3;
    }

    /// The set of qubits acted on non-trivially.
    #[inline]
    pub fn support(&self) -> BitSet {
        self.x.union(&self.z)
    }

    #[inline]
    pub fn weight(&self) -> usize {
        self.support().len()
    }

    #[inline]
    pub fn is_identity_letters(&self) -> bool {
        self.x.is_empty() && self.z.is_empty()
    }

    #[inline]
    pub fn acts_on(&self, q: usize) -> bool {
        self.x.contains(q) || self.z.contains(q)
    }

    /// Letters with the support, qubit order ascending.
    pub fn letters(&self) -> impl Iterator<Item = (usize, Letter)> + '_ {
        self.support().to_vec().into_iter().map(move |q| (q, self.letter(q)))
    }

    /// Group product `self · other`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(SpfError::Dimension { left: self.n, right: other.n });
        }
        Ok(self.mul_unchecked(other))
    }

    #[inline]
    fn mul_unchecked(&self, other: &Self) -> Self {
        let swaps = self.z.and_count(&other.x) as u8;
        PauliOperator {
            n: self.n,
            x: self.x.symmetric_difference(&other.x),
            z: self.z.symmetric_difference(&other.z),
            phase: (self.phase + other.phase + 2 * (swaps & 1)) & 3,
        }
    }

    /// In-place right multiplication `self ← self · other`.
    pub fn mul_assign_right(&mut self, other: &Self) {
        debug_assert_eq!(self.n, other.n);
        let swaps = self.z.and_count(&other.x) as u8;
        self.phase = (self.phase + other.phase + 2 * (swaps & 1)) & 3;
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    /// Inverse element; Paulis square to `±1` so this only adjusts the phase.
    pub fn inverse(&self) -> Self {
        let sq = self.mul_unchecked(self);
        // self·self = i^sq.phase, so self⁻¹ = i^{-sq.phase}·self
        let mut out = self.clone();
        out.mul_phase((4 - sq.phase) & 3);
        out
    }

    pub fn checked_commutes(&self, other: &Self) -> Result<bool> {
        if self.n != other.n {
            return Err(SpfError::Dimension { left: self.n, right: other.n });
        }
        Ok(self.commutes(other))
    }

    /// Symplectic commutation test; ignores phases.
    #[inline]
    pub fn commutes(&self, other: &Self) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.x.and_parity(&other.z) == self.z.and_parity(&other.x)
    }

    /// Does `self` anticommute with the single-qubit letter `letter` on `q`?
    #[inline]
    pub fn anticommutes_at(&self, q: usize, letter: Letter) -> bool {
        !self.letter(q).commutes_with(letter)
    }

    /// Extends the register to `n` qubits with identity letters.
    pub fn extend_to(&mut self, n: usize) {
        debug_assert!(n >= self.n);
        self.n = n;
    }

    fn check_target(&self, q: usize) -> Result<()> {
        if q >= self.n {
            Err(SpfError::QubitIndex { index: q, n: self.n })
        } else {
            Ok(())
        }
    }

    /// `U · self · U†` for the given gate and targets.
    pub fn conjugate(&self, gate: Gate, targets: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.conjugate_in_place(gate, targets)?;
        Ok(out)
    }

    pub fn conjugate_in_place(&mut self, gate: Gate, targets: &[usize]) -> Result<()> {
        if targets.len() != gate.arity() {
            return Err(SpfError::GateArity {
                gate: gate.name(),
                expected: gate.arity(),
                got: targets.len(),
            });
        }
        for &t in targets {
            self.check_target(t)?;
        }
        match gate {
            Gate::H => self.apply_h(targets[0]),
            Gate::S => self.apply_s(targets[0]),
            Gate::Cz => {
                if targets[0] == targets[1] {
                    return Err(SpfError::SameQubit(targets[0]));
                }
                self.apply_cz(targets[0], targets[1]);
            }
        }
        Ok(())
    }

    /// Hadamard conjugation: X ↔ Z, Y → −Y.
    #[inline]
    pub fn apply_h(&mut self, q: usize) {
        let (xb, zb) = (self.x.contains(q), self.z.contains(q));
        if xb && zb {
            self.phase = (self.phase + 2) & 3;
        }
        if xb != zb {
            self.x.toggle(q);
            self.z.toggle(q);
        }
    }

    /// Phase-gate conjugation: X → Y, Y → −X, Z → Z.
    #[inline]
    pub fn apply_s(&mut self, q: usize) {
        if self.x.contains(q) {
            self.phase = (self.phase + 1) & 3;
            self.z.toggle(q);
        }
    }

    /// Controlled-Z conjugation: X_u → X_u Z_v, X_v → Z_u X_v.
    #[inline]
    pub fn apply_cz(&mut self, u: usize, v: usize) {
        let (xu, xv) = (self.x.contains(u), self.x.contains(v));
        if xu {
            self.z.toggle(v);
        }
        if xv {
            self.z.toggle(u);
        }
        if xu && xv {
            self.phase = (self.phase + 2) & 3;
        }
    }

    /// Parses the text form with `n` inferred from the letter count.
    pub fn parse(s: &str) -> Result<Self> {
        s.parse()
    }

    /// Builds a compact textual form listing only the support, e.g. `-X0 Z3`.
    pub fn sparse_string(&self) -> String {
        let prefix = match self.letter_phase() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        let body: Vec<String> =
            self.letters().map(|(q, l)| format!("{}{}", l.as_char(), q)).collect();
        if body.is_empty() {
            format!("{prefix}I")
        } else {
            format!("{prefix}{}", body.join(" "))
        }
    }
}

impl Mul for &PauliOperator {
    type Output = PauliOperator;

    /// Panics on a qubit-count mismatch; see [`PauliOperator::checked_mul`].
    fn mul(self, rhs: &PauliOperator) -> PauliOperator {
        assert_eq!(self.n, rhs.n, "Pauli dimension mismatch");
        self.mul_unchecked(rhs)
    }
}

impl Mul for PauliOperator {
    type Output = PauliOperator;

    fn mul(self, rhs: PauliOperator) -> PauliOperator {
        &self * &rhs
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.letter_phase() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}

impl FromStr for PauliOperator {
    type Err = SpfError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (printed, body) = if let Some(rest) = t.strip_prefix("+i") {
            (1u8, rest)
        } else if let Some(rest) = t.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = t.strip_prefix('+') {
            (0, rest)
        } else if let Some(rest) = t.strip_prefix('-') {
            (2, rest)
        } else {
            (0, t)
        };
        let mut x = BitSet::new();
        let mut z = BitSet::new();
        let mut n = 0;
        for (q, ch) in body.chars().enumerate() {
            let letter = match ch {
                'I' => Letter::I,
                'X' => Letter::X,
                'Y' => Letter::Y,
                'Z' => Letter::Z,
                _ => return Err(SpfError::PauliParse(s.to_string())),
            };
            let (xb, zb) = letter.bits();
            if xb {
                x.insert(q);
            }
            if zb {
                z.insert(q);
            }
            n = q + 1;
        }
        if n == 0 {
            return Err(SpfError::PauliParse(s.to_string()));
        }
        let ys = x.and_count(&z) as u8;
        Ok(PauliOperator { n, x, z, phase: (printed + (ys & 3)) & 3 })
    }
}

impl Serialize for PauliOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn text_round_trip_and_y_convention() {
        for s in ["+X", "-iXZYI", "+iYY", "-ZIZ", "+IIII"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("+Y").phase_exp(), 1);
        assert_eq!(p("XZ").to_string(), "+XZ");
    }

    #[test]
    fn single_qubit_products() {
        assert_eq!((p("X") * p("X")).to_string(), "+I");
        assert_eq!((p("X") * p("Z")).to_string(), "-iY");
        assert_eq!((p("Z") * p("X")).to_string(), "+iY");
        assert_eq!((p("Y") * p("Y")).to_string(), "+I");
        assert_eq!((p("X") * p("Y")).to_string(), "+iZ");
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(p("XX").checked_mul(&p("X")).is_err());
        assert!(p("XX").checked_commutes(&p("X")).is_err());
    }

    #[test]
    fn commutation() {
        assert!(!p("X").commutes(&p("Z")));
        assert!(p("XZ").commutes(&p("ZX")));
        assert!(p("YI").commutes(&p("-YZ")));
    }

    #[test]
    fn clifford_conjugation_rules() {
        assert_eq!(p("X").conjugate(Gate::H, &[0]).unwrap().to_string(), "+Z");
        assert_eq!(p("Y").conjugate(Gate::H, &[0]).unwrap().to_string(), "-Y");
        assert_eq!(p("X").conjugate(Gate::S, &[0]).unwrap().to_string(), "+Y");
        assert_eq!(p("Y").conjugate(Gate::S, &[0]).unwrap().to_string(), "-X");
        assert_eq!(p("Z").conjugate(Gate::S, &[0]).unwrap().to_string(), "+Z");
        assert_eq!(p("XI").conjugate(Gate::Cz, &[0, 1]).unwrap().to_string(), "+XZ");
        assert_eq!(p("XX").conjugate(Gate::Cz, &[0, 1]).unwrap().to_string(), "+YY");
        assert_eq!(p("YX").conjugate(Gate::Cz, &[0, 1]).unwrap().to_string(), "-XY");
        assert_eq!(p("ZZ").conjugate(Gate::Cz, &[0, 1]).unwrap().to_string(), "+ZZ");
    }

    #[test]
    fn conjugation_errors() {
        assert!(matches!(p("XX").conjugate(Gate::Cz, &[1, 1]), Err(SpfError::SameQubit(1))));
        assert!(matches!(p("XX").conjugate(Gate::H, &[2]), Err(SpfError::QubitIndex { .. })));
        assert!(matches!(p("XX").conjugate(Gate::H, &[0, 1]), Err(SpfError::GateArity { .. })));
    }

    #[test]
    fn set_letter_keeps_printed_sign() {
        let mut a = p("-XZ");
        a.set_letter(0, Letter::Y);
        assert_eq!(a.to_string(), "-YZ");
        a.set_letter(1, Letter::I);
        assert_eq!(a.to_string(), "-YI");
    }

    #[test]
    fn inverse_of_non_hermitian() {
        let a = p("+iXY");
        assert_eq!((&a * &a.inverse()).to_string(), "+II");
    }

    #[test]
    fn sparse_form() {
        assert_eq!(p("-XIZ").sparse_string(), "-X0 Z2");
        assert_eq!(p("III").sparse_string(), "+I");
    }
}
