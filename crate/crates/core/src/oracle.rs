//! Brute-force reference implementations used to validate the tracker and the
//! pattern search: exhaustive non-trivial enumeration, a dense state-vector
//! simulator, teleportation certification and exhaustive pattern search.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Result, SpfError};
use crate::patterns::{bare_logical, pair_measurements, LogicalKind, MeasurementPattern};
use crate::pauli::{Basis, Gate, Letter, PauliOperator};
use crate::state::{CircuitOp, Combination, StabMap, StabilizerState};

/// Largest generator count for exhaustive enumeration.
pub const MAX_ENUMERATION_GENERATORS: usize = 16;
/// Largest register simulated densely.
pub const MAX_DENSE_QUBITS: usize = 22;
/// Largest state searched exhaustively for patterns.
pub const MAX_BRUTE_FORCE_QUBITS: usize = 8;
/// Branches less likely than this are not checked.
pub const BRANCH_FLOOR: f64 = 1e-12;
pub const FIDELITY_TOLERANCE: f64 = 1e-10;

fn mask(bits: &BitSet) -> usize {
    bits.iter().fold(0, |m, q| m | 1 << q)
}

/// Every non-trivial combination, found by testing all bipartitions of all
/// `2^g − 1` combinations against a table of all products.
pub fn enumerate_nontrivial_bruteforce(generators: &[PauliOperator]) -> Result<StabMap> {
    let g = generators.len();
    if g > MAX_ENUMERATION_GENERATORS {
        return Err(SpfError::SizeGuard { what: "generators for exhaustive enumeration", limit: MAX_ENUMERATION_GENERATORS, got: g });
    }
    let n = generators.first().map_or(0, PauliOperator::num_qubits);
    let mut products = vec![PauliOperator::identity(n); 1 << g];
    let mut supports = vec![0usize; 1 << g];
    for m in 1usize..1 << g {
        let top = usize::BITS as usize - 1 - m.leading_zeros() as usize;
        products[m] = &products[m & !(1 << top)] * &generators[top];
        supports[m] = mask(&products[m].support());
    }
    let mut out = StabMap::default();
    for c in 1usize..1 << g {
        let low = c & c.wrapping_neg();
        let rest = c & !low;
        // halves containing the lowest member, excluding c itself
        let mut trivial = false;
        let mut sub = rest;
        loop {
            let alpha = sub | low;
            if alpha != c && supports[alpha] & supports[c & !alpha] == 0 {
                trivial = true;
                break;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        if !trivial {
            let combo: Combination = (0..g).filter(|i| c >> i & 1 == 1).collect();
            out.insert(combo, products[c].clone());
        }
    }
    Ok(out)
}

/// Dense state vector; qubit `q` is bit `q` of the amplitude index.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

const I: Complex64 = Complex64::new(0.0, 1.0);

impl DenseState {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_DENSE_QUBITS {
            return Err(SpfError::SizeGuard { what: "qubits for dense simulation", limit: MAX_DENSE_QUBITS, got: n });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(DenseState { n, amps })
    }

    pub fn single(alpha: Complex64, beta: Complex64) -> Self {
        DenseState { n: 1, amps: vec![alpha, beta] }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalise(&mut self) {
        let s = self.norm_sqr().sqrt();
        if s > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= s);
        }
    }

    /// Appends a qubit in `|0⟩` as the new highest bit.
    pub fn add_qubit(&mut self) -> Result<()> {
        if self.n + 1 > MAX_DENSE_QUBITS {
            return Err(SpfError::SizeGuard { what: "qubits for dense simulation", limit: MAX_DENSE_QUBITS, got: self.n + 1 });
        }
        self.amps.resize(1 << (self.n + 1), Complex64::new(0.0, 0.0));
        self.n += 1;
        Ok(())
    }

    fn check(&self, q: usize) -> Result<()> {
        if q < self.n {
            Ok(())
        } else {
            Err(SpfError::QubitIndex { index: q, n: self.n })
        }
    }

    pub fn apply_h(&mut self, q: usize) -> Result<()> {
        self.check(q)?;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let b = 1 << q;
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | b]);
                self.amps[i] = (a0 + a1) * h;
                self.amps[i | b] = (a0 - a1) * h;
            }
        }
        Ok(())
    }

    /// Multiplies the `|1⟩` component of qubit `q` by `factor`.
    fn phase_one(&mut self, q: usize, factor: Complex64) -> Result<()> {
        self.check(q)?;
        let b = 1 << q;
        self.amps.iter_mut().enumerate().filter(|(i, _)| i & b != 0).for_each(|(_, a)| *a *= factor);
        Ok(())
    }

    pub fn apply_s(&mut self, q: usize) -> Result<()> {
        self.phase_one(q, I)
    }

    pub fn apply_sdg(&mut self, q: usize) -> Result<()> {
        self.phase_one(q, -I)
    }

    pub fn apply_cz(&mut self, u: usize, v: usize) -> Result<()> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(SpfError::SameQubit(u));
        }
        let m = 1 << u | 1 << v;
        self.amps.iter_mut().enumerate().filter(|(i, _)| i & m == m).for_each(|(_, a)| *a = -*a);
        Ok(())
    }

    /// `P|ψ⟩` for a Pauli operator on the same register.
    pub fn apply_pauli(&self, op: &PauliOperator) -> Result<DenseState> {
        if op.num_qubits() != self.n {
            return Err(SpfError::Dimension { left: self.n, right: op.num_qubits() });
        }
        let (x, z) = (mask(op.x_bits()), mask(op.z_bits()));
        let global = I.powu(op.phase_exp() as u32);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            let sign = if (z & b).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[b ^ x] = a * global * sign;
        }
        Ok(DenseState { n: self.n, amps: out })
    }

    pub fn inner(&self, other: &DenseState) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `⟨ψ|P|ψ⟩ / ⟨ψ|ψ⟩`.
    pub fn expectation(&self, op: &PauliOperator) -> Result<Complex64> {
        Ok(self.inner(&self.apply_pauli(op)?) / self.norm_sqr())
    }

    /// Projects onto the `outcome` eigenspace of `basis` on `q` (unnormalised)
    /// and returns the probability relative to the incoming norm.
    pub fn project(&mut self, q: usize, basis: Basis, sign: i8) -> Result<f64> {
        let before = self.norm_sqr();
        let p = PauliOperator::single(self.n, q, basis.letter())?;
        let flipped = self.apply_pauli(&p)?;
        let s = if sign < 0 { -1.0 } else { 1.0 };
        for (a, b) in self.amps.iter_mut().zip(&flipped.amps) {
            *a = (*a + b * s) * 0.5;
        }
        Ok(if before > 0.0 { self.norm_sqr() / before } else { 0.0 })
    }

    /// Maps the `basis` eigenstates of `q` onto the computational basis,
    /// `+1 → |0⟩` and `−1 → |1⟩`.
    pub fn rotate_to_z(&mut self, q: usize, basis: Basis) -> Result<()> {
        match basis {
            Basis::Z => Ok(()),
            Basis::X => self.apply_h(q),
            Basis::Y => {
                self.apply_sdg(q)?;
                self.apply_h(q)
            }
        }
    }

    fn add(&self, other: &DenseState, a: Complex64, b: Complex64) -> DenseState {
        DenseState { n: self.n, amps: self.amps.iter().zip(&other.amps).map(|(x, y)| x * a + y * b).collect() }
    }
}

/// Replays the recorded circuit of `state` with the input qubit prepared in
/// `alpha|0⟩ + beta|1⟩`; measurements project without renormalising, so
/// the result is linear in the input.
pub fn replay(state: &StabilizerState, alpha: Complex64, beta: Complex64) -> Result<DenseState> {
    if state.num_qubits() > MAX_DENSE_QUBITS {
        return Err(SpfError::SizeGuard { what: "qubits for dense simulation", limit: MAX_DENSE_QUBITS, got: state.num_qubits() });
    }
    let mut psi = DenseState::single(alpha, beta);
    for op in state.circuit() {
        match op {
            CircuitOp::AddQubit { .. } => psi.add_qubit()?,
            CircuitOp::Gate { gate, qubits } => match gate {
                Gate::H => psi.apply_h(qubits[0])?,
                Gate::S => psi.apply_s(qubits[0])?,
                Gate::Cz => psi.apply_cz(qubits[0], qubits[1])?,
            },
            CircuitOp::Measure { qubit, basis, outcome } => {
                psi.project(*qubit, *basis, outcome.sign())?;
            }
        }
    }
    Ok(psi)
}

/// Checks the tracked generators and logicals against a dense replay:
/// every generator stabilizes the state, and the logicals act on the
/// encoded qubit as `X` and `Z` act on the input.
pub fn check_against_dense(state: &StabilizerState) -> Result<()> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let psi0 = replay(state, one, zero)?;
    let psi1 = replay(state, zero, one)?;
    if psi0.norm_sqr() < BRANCH_FLOOR || (psi0.norm_sqr() - psi1.norm_sqr()).abs() > 1e-9 {
        return Err(SpfError::Internal("replayed branch has inconsistent norm".into()));
    }
    for (i, g) in state.generators().iter().enumerate() {
        for psi in [&psi0, &psi1] {
            let e = psi.expectation(g)?;
            if (e - one).norm() > 1e-9 {
                return Err(SpfError::Internal(format!("generator {i} = {g} has expectation {e}")));
            }
        }
    }
    // X̄ ψ0 = ψ1 and Z̄ ψ0 = ψ0, Z̄ ψ1 = −ψ1, up to the common norm
    let scale = psi0.norm_sqr();
    let lx = psi0.apply_pauli(state.logical_x())?;
    let lz0 = psi0.apply_pauli(state.logical_z())?;
    let lz1 = psi1.apply_pauli(state.logical_z())?;
    let checks = [
        (psi1.inner(&lx) / scale, one, "X̄"),
        (psi0.inner(&lz0) / scale, one, "Z̄ on |0⟩"),
        (psi1.inner(&lz1) / scale, -one, "Z̄ on |1⟩"),
    ];
    for (got, want, what) in checks {
        if (got - want).norm() > 1e-9 {
            return Err(SpfError::Internal(format!("logical {what} overlap {got}, expected {want}")));
        }
    }
    Ok(())
}

/// Single-qubit input state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputState {
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
}

impl InputState {
    pub fn new(alpha: Complex64, beta: Complex64) -> Self {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        let (a, b) = (alpha / norm, beta / norm);
        InputState { alpha: (a.re, a.im), beta: (b.re, b.im) }
    }

    fn amplitudes(&self) -> (Complex64, Complex64) {
        (Complex64::new(self.alpha.0, self.alpha.1), Complex64::new(self.beta.0, self.beta.1))
    }

    /// Bloch vector `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)`.
    pub fn bloch(&self) -> [f64; 3] {
        let (a, b) = self.amplitudes();
        let c = a.conj() * b;
        [2.0 * c.re, 2.0 * c.im, a.norm_sqr() - b.norm_sqr()]
    }

    /// The six Pauli eigenstates followed by one Haar-random state.
    pub fn default_set(seed: u64) -> Vec<InputState> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let mut v = vec![
            InputState::new(c(1.0, 0.0), c(0.0, 0.0)),
            InputState::new(c(0.0, 0.0), c(1.0, 0.0)),
            InputState::new(c(h, 0.0), c(h, 0.0)),
            InputState::new(c(h, 0.0), c(-h, 0.0)),
            InputState::new(c(h, 0.0), c(0.0, h)),
            InputState::new(c(h, 0.0), c(0.0, -h)),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gauss = || {
            // Box–Muller
            let (u1, u2): (f64, f64) = (rng.random::<f64>().max(f64::MIN_POSITIVE), rng.random());
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        };
        let (a, b) = (c(gauss(), gauss()), c(gauss(), gauss()));
        v.push(InputState::new(a, b));
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificationMethod {
    /// Inputs teleported and corrected with the computed byproduct.
    Byproduct,
    /// Reference qubit maximally entangled with the input; each branch must
    /// leave reference and output maximally entangled.
    Choi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub certified: bool,
    pub method: CertificationMethod,
    pub min_fidelity: f64,
    pub branches_checked: u64,
    pub branches_skipped: u64,
    pub inputs: usize,
    pub failure: Option<String>,
}

/// Reduced output-qubit data per outcome branch: probability weight and
/// the 2×2 block `ρ[o][o']` summed over unmeasured non-output qubits.
type BranchBlocks = Vec<[Complex64; 4]>;

/// Rotates the measured qubits to the computational basis in place.
fn rotate_all(psi: &mut DenseState, measurements: &BTreeMap<usize, Basis>) -> Result<()> {
    for (&q, &b) in measurements {
        psi.rotate_to_z(q, b)?;
    }
    Ok(())
}

/// Branch index of an amplitude index: the measured bits packed in order.
fn branch_of(index: usize, measured: &[usize]) -> usize {
    measured.iter().enumerate().fold(0, |acc, (k, &q)| acc | ((index >> q) & 1) << k)
}

/// `Σ_rest a[o, rest] conj(b[o', rest])` per branch, for amplitude vectors
/// `a`, `b` already rotated.
fn blocks(a: &DenseState, b: &DenseState, measured: &[usize], output: usize) -> BranchBlocks {
    let mut out = vec![[Complex64::new(0.0, 0.0); 4]; 1 << measured.len()];
    let ob = 1 << output;
    for i in 0..a.amps.len() {
        if i & ob != 0 {
            continue;
        }
        let br = branch_of(i, measured);
        let (a0, a1) = (a.amps[i], a.amps[i | ob]);
        let (b0, b1) = (b.amps[i].conj(), b.amps[i | ob].conj());
        let blk = &mut out[br];
        blk[0] += a0 * b0;
        blk[1] += a0 * b1;
        blk[2] += a1 * b0;
        blk[3] += a1 * b1;
    }
    out
}

fn letter_matrix(l: Letter) -> [Complex64; 4] {
    let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    match l {
        Letter::I => [o, z, z, o],
        Letter::X => [z, o, o, z],
        Letter::Y => [z, -I, I, z],
        Letter::Z => [o, z, z, -o],
    }
}

fn mat_mul(a: &[Complex64; 4], b: &[Complex64; 4]) -> [Complex64; 4] {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

/// `Tr(ρ P)` for a 2×2 block.
fn trace_with(rho: &[Complex64; 4], p: &[Complex64; 4]) -> Complex64 {
    let m = mat_mul(rho, p);
    m[0] + m[3]
}

fn validate_pattern(state: &StabilizerState, pattern: &MeasurementPattern) -> Result<()> {
    let n = state.num_qubits();
    if pattern.output >= n {
        return Err(SpfError::QubitIndex { index: pattern.output, n });
    }
    if pattern.output == 0 {
        return Err(SpfError::OutputQubit("output coincides with the input qubit".into()));
    }
    for &q in pattern.measurements.keys() {
        if q >= n {
            return Err(SpfError::QubitIndex { index: q, n });
        }
        if q == pattern.output {
            return Err(SpfError::OutputQubit("pattern measures the output qubit".into()));
        }
    }
    Ok(())
}

/// Certifies that `pattern` teleports the input of `state` to its output.
///
/// Patterns carrying logical provenance are checked by teleporting every
/// input state and applying the computed byproduct; other patterns get the
/// reference-entanglement check. Every outcome branch with probability above
/// [`BRANCH_FLOOR`] is examined.
pub fn certify_pattern(
    state: &StabilizerState,
    pattern: &MeasurementPattern,
    inputs: &[InputState],
) -> Result<Certification> {
    validate_pattern(state, pattern)?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut psi0 = replay(state, one, zero)?;
    let mut psi1 = replay(state, zero, one)?;
    let norm = psi0.norm_sqr();
    if norm < BRANCH_FLOOR {
        return Err(SpfError::Internal("circuit replay has zero norm".into()));
    }
    rotate_all(&mut psi0, &pattern.measurements)?;
    rotate_all(&mut psi1, &pattern.measurements)?;
    let measured: Vec<usize> = pattern.measurements.keys().copied().collect();
    if pattern.provenance.is_empty() {
        Ok(choi_check(&psi0, &psi1, norm, &measured, pattern.output))
    } else {
        byproduct_check(&psi0, &psi1, norm, &measured, pattern, inputs)
    }
}

fn choi_check(psi0: &DenseState, psi1: &DenseState, norm: f64, measured: &[usize], output: usize) -> Certification {
    let b00 = blocks(psi0, psi0, measured, output);
    let b01 = blocks(psi0, psi1, measured, output);
    let b11 = blocks(psi1, psi1, measured, output);
    let mut report = Certification {
        certified: true,
        method: CertificationMethod::Choi,
        min_fidelity: 1.0,
        branches_checked: 0,
        branches_skipped: 0,
        inputs: 0,
        failure: None,
    };
    for br in 0..b00.len() {
        // ρ_RO with reference index r, output index o: ((r,o),(r',o'))
        let blk = |r: usize, rp: usize| match (r, rp) {
            (0, 0) => b00[br],
            (1, 1) => b11[br],
            (0, 1) => b01[br],
            _ => {
                let t = b01[br];
                [t[0].conj(), t[2].conj(), t[1].conj(), t[3].conj()]
            }
        };
        let trace = (b00[br][0] + b00[br][3] + b11[br][0] + b11[br][3]).re;
        let prob = trace / (2.0 * norm);
        if prob < BRANCH_FLOOR {
            report.branches_skipped += 1;
            continue;
        }
        report.branches_checked += 1;
        let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
        for r in 0..2 {
            for rp in 0..2 {
                let b = blk(r, rp);
                for o in 0..2 {
                    for op in 0..2 {
                        rho[2 * r + o][2 * rp + op] = b[2 * o + op] / trace;
                    }
                }
            }
        }
        let mut purity = 0.0;
        for row in &rho {
            for v in row {
                purity += v.norm_sqr();
            }
        }
        let r00 = rho[0][0] + rho[1][1];
        let r11 = rho[2][2] + rho[3][3];
        let r01 = rho[0][2] + rho[1][3];
        // fidelity-like score: 1 only for a pure, maximally entangled ρ_RO
        let deviation = (1.0 - purity).abs() + (r00.re - 0.5).abs() + (r11.re - 0.5).abs() + r01.norm();
        let score = 1.0 - deviation;
        report.min_fidelity = report.min_fidelity.min(score);
        if deviation > FIDELITY_TOLERANCE && report.certified {
            report.certified = false;
            report.failure = Some(format!("branch {br}: purity {purity:.12}, reference not maximally mixed"));
        }
    }
    report
}

fn byproduct_check(
    psi0: &DenseState,
    psi1: &DenseState,
    norm: f64,
    measured: &[usize],
    pattern: &MeasurementPattern,
    inputs: &[InputState],
) -> Result<Certification> {
    let mut report = Certification {
        certified: true,
        method: CertificationMethod::Byproduct,
        min_fidelity: 1.0,
        branches_checked: 0,
        branches_skipped: 0,
        inputs: inputs.len(),
        failure: None,
    };
    let branches = 1usize << measured.len();
    let mut corrections = Vec::with_capacity(branches);
    for br in 0..branches {
        let outcomes: BTreeMap<usize, i8> =
            measured.iter().enumerate().map(|(k, &q)| (q, if br >> k & 1 == 1 { -1 } else { 1 })).collect();
        corrections.push(pattern.byproduct(&outcomes)?);
    }
    for input in inputs {
        let (a, b) = input.amplitudes();
        let psi = psi0.add(psi1, a, b);
        let blks = blocks(&psi, &psi, measured, pattern.output);
        let r = input.bloch();
        for (br, blk) in blks.iter().enumerate() {
            let trace = (blk[0] + blk[3]).re;
            if trace / norm < BRANCH_FLOOR {
                report.branches_skipped += 1;
                continue;
            }
            report.branches_checked += 1;
            let bp = &corrections[br];
            let c = letter_matrix(bp.correction);
            // C ρ C† with Pauli C (Hermitian)
            let rho = mat_mul(&mat_mul(&c, blk), &c).map(|v| v / trace);
            let fx = letter_matrix(bp.frame_x);
            let fz = letter_matrix(bp.frame_z);
            let fy = mat_mul(&fx, &fz).map(|v| v * I);
            let fidelity = 0.5
                * (1.0
                    + r[0] * trace_with(&rho, &fx).re
                    + r[1] * trace_with(&rho, &fy).re
                    + r[2] * trace_with(&rho, &fz).re);
            report.min_fidelity = report.min_fidelity.min(fidelity);
            if (1.0 - fidelity) > FIDELITY_TOLERANCE && report.certified {
                report.certified = false;
                report.failure = Some(format!("branch {br}: fidelity {fidelity:.12}"));
            }
        }
    }
    Ok(report)
}

/// Minimal measurement maps that teleport, found by trying every
/// assignment of {unmeasured, X, Y, Z} to the non-output qubits.
pub fn brute_force_patterns(state: &StabilizerState, output: usize) -> Result<Vec<BTreeMap<usize, Basis>>> {
    let n = state.num_qubits();
    if n > MAX_BRUTE_FORCE_QUBITS {
        return Err(SpfError::SizeGuard { what: "qubits for exhaustive pattern search", limit: MAX_BRUTE_FORCE_QUBITS, got: n });
    }
    if output == 0 || output >= n {
        return Err(SpfError::OutputQubit(format!("invalid output qubit {output}")));
    }
    let others: Vec<usize> = (0..n).filter(|&q| q != output).collect();
    let mut certified: Vec<BTreeMap<usize, Basis>> = Vec::new();
    for code in 0..4usize.pow(others.len() as u32) {
        let mut m = BTreeMap::new();
        let mut c = code;
        for &q in &others {
            match c % 4 {
                1 => {
                    m.insert(q, Basis::X);
                }
                2 => {
                    m.insert(q, Basis::Y);
                }
                3 => {
                    m.insert(q, Basis::Z);
                }
                _ => {}
            }
            c /= 4;
        }
        let pattern = MeasurementPattern { output, measurements: m, provenance: Vec::new() };
        if certify_pattern(state, &pattern, &[])?.certified {
            certified.push(pattern.measurements);
        }
    }
    Ok(minimal_maps(certified))
}

/// `small` is contained in `big` with matching bases.
pub fn map_contains(big: &BTreeMap<usize, Basis>, small: &BTreeMap<usize, Basis>) -> bool {
    small.iter().all(|(q, b)| big.get(q) == Some(b))
}

/// Drops every map that strictly contains another map of the list.
pub fn minimal_maps(mut maps: Vec<BTreeMap<usize, Basis>>) -> Vec<BTreeMap<usize, Basis>> {
    maps.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    maps.dedup();
    let mut kept: Vec<BTreeMap<usize, Basis>> = Vec::new();
    for m in maps {
        if !kept.iter().any(|k| map_contains(&m, k)) {
            kept.push(m);
        }
    }
    kept
}

/// Measurement maps from pairing logicals multiplied by every stabilizer,
/// trivial ones included. This is the search without the restriction to
/// non-trivial sources.
pub fn unrestricted_patterns(state: &StabilizerState, output: usize) -> Result<Vec<BTreeMap<usize, Basis>>> {
    let g = state.num_generators();
    if g > MAX_ENUMERATION_GENERATORS {
        return Err(SpfError::SizeGuard { what: "generators for exhaustive enumeration", limit: MAX_ENUMERATION_GENERATORS, got: g });
    }
    let gens = state.generators();
    let n = state.num_qubits();
    let mut products = vec![PauliOperator::identity(n); 1 << g];
    for m in 1usize..1 << g {
        let top = usize::BITS as usize - 1 - m.leading_zeros() as usize;
        products[m] = &products[m & !(1 << top)] * &gens[top];
    }
    let mut logicals: Vec<PauliOperator> = Vec::new();
    for kind in LogicalKind::ALL {
        let l = bare_logical(state, kind);
        for s in &products {
            let op = s * &l;
            if op.acts_on(output) {
                logicals.push(op);
            }
        }
    }
    let mut maps = Vec::new();
    for (i, a) in logicals.iter().enumerate() {
        for b in &logicals[i + 1..] {
            if let Some(m) = pair_measurements(output, a, b) {
                maps.push(m);
            }
        }
    }
    Ok(minimal_maps(maps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bond() -> StabilizerState {
        let mut s = StabilizerState::initialise();
        s.apply_h(0usize).unwrap();
        s.add_qubit("O").unwrap();
        s.apply_h("O").unwrap();
        s.apply_cz(0usize, 1usize).unwrap();
        s
    }

    #[test]
    fn dense_gates() {
        let mut psi = DenseState::new(2).unwrap();
        psi.apply_h(0).unwrap();
        psi.apply_h(1).unwrap();
        psi.apply_cz(0, 1).unwrap();
        let xz: PauliOperator = "XZ".parse().unwrap();
        assert!((psi.expectation(&xz).unwrap() - 1.0).norm() < 1e-12);
        let yy: PauliOperator = "YY".parse().unwrap();
        assert!((psi.expectation(&yy).unwrap() - 1.0).norm() < 1e-12);
        let p = psi.project(0, Basis::X, 1).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bond_teleports() {
        let s = bond();
        check_against_dense(&s).unwrap();
        let pattern = MeasurementPattern {
            output: 1,
            measurements: [(0, Basis::X)].into_iter().collect(),
            provenance: Vec::new(),
        };
        assert!(certify_pattern(&s, &pattern, &[]).unwrap().certified);
        let wrong = MeasurementPattern { measurements: [(0, Basis::Z)].into_iter().collect(), ..pattern };
        assert!(!certify_pattern(&s, &wrong, &[]).unwrap().certified);
        let found = brute_force_patterns(&s, 1).unwrap();
        assert!(found.contains(&[(0, Basis::X)].into_iter().collect()));
        assert!(!found.contains(&[(0, Basis::Z)].into_iter().collect()));
    }

    #[test]
    fn enumeration_of_disjoint_generators() {
        let gens: Vec<PauliOperator> = ["XII", "IZI", "IIY"].iter().map(|s| s.parse().unwrap()).collect();
        let nt = enumerate_nontrivial_bruteforce(&gens).unwrap();
        assert_eq!(nt.len(), 3);
        assert!(nt.keys().all(|c| c.len() == 1));
    }

    #[test]
    fn default_inputs_are_normalised() {
        for s in InputState::default_set(1) {
            let r = s.bloch();
            assert!((r.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
