//! No-go checkers.
//!
//! Controlled routing of an encoded message to `n` receivers in one of two
//! orders leaves, on the computational branch `b`, the state
//! `α'|b⟩|0⟩ + β'|τb⟩|1⟩` where `τ` is the relative permutation of the two
//! orders. Any index `j` with `b_j = b_{τ(j)}` is a receiver whose state does not
//! depend on the message. [`fixed_bit_scan`] enumerates every `(τ, b)`;
//! [`routed_channel_state_scan`] confirms the witness on the simulated state.
//!
//! [`check_term_proportionality`] tests whether every Kraus composite
//! `L_i S_j R_k` is a multiple of the identity, the condition for the composite
//! channel to act as the identity channel.

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocols::MessageState;
use crate::qcore::{serialize_complex, Complex64, DensityMatrix, Ket, Operator, TOL};

pub const MIN_SCAN_N: usize = 2;
pub const MAX_SCAN_N: usize = 7;
/// Largest `n` accepted by [`routed_channel_state_scan`].
pub const MAX_ROUTED_N: usize = 7;
/// Agreement required between reduced states for different messages.
pub const STATE_TOL: f64 = 1e-12;

/// Relative permutation `τ` of two routing orders, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationPair {
    tau: Vec<usize>,
}

impl PermutationPair {
    pub fn new(tau: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; tau.len()];
        for &t in &tau {
            if t >= tau.len() || seen[t] {
                return Err(Error::InvalidPermutation(tau));
            }
            seen[t] = true;
        }
        Ok(Self { tau })
    }

    /// From 1-based images, as printed in reports.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::InvalidPermutation(images.to_vec()));
        }
        Self::new(images.iter().map(|&t| t - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self { tau: (0..n).collect() }
    }

    /// `j ↦ j + 1 mod n`.
    pub fn cycle(n: usize) -> Self {
        Self {
            tau: (0..n).map(|j| (j + 1) % n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.tau.len()
    }

    pub fn image(&self, j: usize) -> usize {
        self.tau[j]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.tau
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.tau.iter().map(|t| t + 1).collect()
    }

    /// Disjoint cycles, each starting at its smallest element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for start in 0..self.n() {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                cyc.push(j);
                j = self.tau[j];
            }
            out.push(cyc);
        }
        out
    }
}

impl Serialize for PermutationPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

/// Bitstring `b` with the first index `j` (0-based) where `b_j = b_{τ(j)}`, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedBitWitness {
    pub bits: Vec<u8>,
    pub index: Option<usize>,
}

impl FixedBitWitness {
    pub fn find(tau: &PermutationPair, bits: &[u8]) -> Self {
        let index = (0..tau.n()).find(|&j| bits[j] == bits[tau.image(j)]);
        Self {
            bits: bits.to_vec(),
            index,
        }
    }

    pub fn bit_string(&self) -> String {
        self.bits.iter().map(|b| char::from(b'0' + b)).collect()
    }
}

impl Serialize for FixedBitWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("FixedBitWitness", 2)?;
        st.serialize_field("bits", &self.bit_string())?;
        st.serialize_field("index", &self.index.map(|j| j + 1))?;
        st.end()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub tau: PermutationPair,
    pub bits: String,
    /// The moved indices split into even cycles with alternating bits.
    pub alternating_even_cycles: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NogoReport {
    pub n: usize,
    pub cells: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl NogoReport {
    pub fn has_counterexample(&self) -> bool {
        !self.counterexamples.is_empty()
    }

    pub fn structure_holds(&self) -> bool {
        self.counterexamples.iter().all(|c| c.alternating_even_cycles)
    }
}

fn bits_of(mask: usize, n: usize) -> Vec<u8> {
    (0..n).map(|j| ((mask >> (n - 1 - j)) & 1) as u8).collect()
}

fn alternating_even_cycles(tau: &PermutationPair, bits: &[u8]) -> bool {
    tau.cycles().iter().all(|cyc| {
        cyc.len() % 2 == 0 && cyc.iter().all(|&j| bits[j] != bits[tau.image(j)])
    })
}

fn check_scan_n(n: usize, max: usize) -> Result<()> {
    if (MIN_SCAN_N..=max).contains(&n) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "n",
            value: n,
            min: MIN_SCAN_N,
            max,
        })
    }
}

/// Every permutation `τ ∈ S_n` and bitstring `b`, in lexicographic order.
pub fn fixed_bit_scan(n: usize) -> Result<NogoReport> {
    check_scan_n(n, MAX_SCAN_N)?;
    let mut cells = 0;
    let mut counterexamples = Vec::new();
    for perm in (0..n).permutations(n) {
        let tau = PermutationPair { tau: perm };
        for mask in 0..1usize << n {
            cells += 1;
            let bits = bits_of(mask, n);
            let w = FixedBitWitness::find(&tau, &bits);
            if w.index.is_none() {
                counterexamples.push(Counterexample {
                    alternating_even_cycles: alternating_even_cycles(&tau, &bits),
                    bits: w.bit_string(),
                    tau: tau.clone(),
                });
            }
        }
    }
    Ok(NogoReport {
        n,
        cells,
        counterexamples,
    })
}

/// Reduced-state verdict for one computational branch.
#[derive(Clone, Debug, Serialize)]
pub struct RoutedBranch {
    pub witness: FixedBitWitness,
    /// 0-based receivers whose reduced state is `|b_j⟩⟨b_j|` for every probe message.
    pub message_independent: Vec<usize>,
    /// The message-independent set equals `{j : b_j = b_{τ(j)}}`.
    pub agrees_with_witness: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RoutedReport {
    pub n: usize,
    pub tau: PermutationPair,
    pub branches: Vec<RoutedBranch>,
}

impl RoutedReport {
    pub fn all_agree(&self) -> bool {
        self.branches.iter().all(|b| b.agrees_with_witness)
    }

    pub fn branch(&self, bits: &[u8]) -> Option<&RoutedBranch> {
        self.branches.iter().find(|b| b.witness.bits == bits)
    }
}

/// `α'|b⟩|0⟩ + β'|τb⟩|1⟩` on `n` receiver qubits and the order qubit, where `(τb)_j = b_{τ(j)}`.
pub fn routed_state(tau: &PermutationPair, bits: &[u8], msg: &MessageState) -> Result<Ket> {
    let n = tau.n();
    if bits.len() != n {
        return Err(Error::DimensionMismatch(format!("{} bits for n = {n}", bits.len())));
    }
    let moved: Vec<u8> = (0..n).map(|j| bits[tau.image(j)]).collect();
    let index = |bs: &[u8], ctrl: usize| bs.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize) * 2 + ctrl;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << (n + 1)];
    amps[index(bits, 0)] += msg.alpha();
    amps[index(&moved, 1)] += msg.beta();
    Ket::new(amps, vec![2; n + 1])
}

fn probe_messages(msg: &MessageState) -> Vec<MessageState> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        *msg,
        MessageState::zero(),
        MessageState::one(),
        MessageState::plus(),
        MessageState::new(Complex64::new(h, 0.0), Complex64::new(0.0, h)).expect("normalized"),
    ]
}

/// Simulates the routed state for every branch `b` and checks which receivers
/// end up with a message-independent reduced state. `msg` is probed together
/// with a fixed set of reference messages.
pub fn routed_channel_state_scan(tau: &PermutationPair, msg: &MessageState) -> Result<RoutedReport> {
    let n = tau.n();
    if !(1..=MAX_ROUTED_N).contains(&n) {
        return Err(Error::OutOfRange {
            what: "n",
            value: n,
            min: 1,
            max: MAX_ROUTED_N,
        });
    }
    let probes = probe_messages(msg);
    let mut branches = Vec::with_capacity(1 << n);
    for mask in 0..1usize << n {
        let bits = bits_of(mask, n);
        let states = probes
            .iter()
            .map(|m| Ok(routed_state(tau, &bits, m)?.to_density()))
            .collect::<Result<Vec<DensityMatrix>>>()?;
        let mut independent = Vec::new();
        for (j, &bj) in bits.iter().enumerate() {
            let fixed = Ket::bits(&[bj]).to_density();
            let mut ok = true;
            for s in &states {
                if s.partial_trace(&[j])?.distance(&fixed) > STATE_TOL {
                    ok = false;
                    break;
                }
            }
            if ok {
                independent.push(j);
            }
        }
        let expected: Vec<usize> = (0..n).filter(|&j| bits[j] == bits[tau.image(j)]).collect();
        branches.push(RoutedBranch {
            witness: FixedBitWitness::find(tau, &bits),
            agrees_with_witness: independent == expected,
            message_independent: independent,
        });
    }
    Ok(RoutedReport {
        n,
        tau: tau.clone(),
        branches,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TermVerdict {
    pub left: usize,
    pub mid: usize,
    pub right: usize,
    #[serde(serialize_with = "serialize_complex")]
    pub lambda: Complex64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProportionalityReport {
    pub terms: Vec<TermVerdict>,
    /// `Σ |λ|²` over all terms.
    pub weight: f64,
    pub pass: bool,
}

impl ProportionalityReport {
    pub fn max_residual(&self) -> f64 {
        self.terms.iter().map(|t| t.residual).fold(0.0, f64::max)
    }
}

/// For every `(i, j, k)` fits `L_i S_j R_k ≈ λ I` with `λ = tr(M)/d` and records
/// the max-entry residual. Passes iff every residual is below `1e-9` and
/// `Σ |λ|² = 1`, i.e. the composite is the identity channel.
pub fn check_term_proportionality(
    left: &[Operator],
    mid: &[Operator],
    right: &[Operator],
) -> Result<ProportionalityReport> {
    if left.is_empty() || mid.is_empty() || right.is_empty() {
        return Err(Error::DimensionMismatch("empty Kraus set".into()));
    }
    let mut terms = Vec::with_capacity(left.len() * mid.len() * right.len());
    for (i, l) in left.iter().enumerate() {
        for (j, s) in mid.iter().enumerate() {
            let ls = l.compose(s)?;
            for (k, r) in right.iter().enumerate() {
                let m = ls.compose(r)?;
                if !m.is_square() {
                    return Err(Error::DimensionMismatch(format!(
                        "composite is {}x{}, not square",
                        m.nrows(),
                        m.ncols()
                    )));
                }
                let d = m.nrows();
                let lambda = m.trace() / d as f64;
                let residual = m.distance(&Operator::identity(m.row_dims()).scale(lambda));
                terms.push(TermVerdict {
                    left: i,
                    mid: j,
                    right: k,
                    lambda,
                    residual,
                });
            }
        }
    }
    let weight: f64 = terms.iter().map(|t| t.lambda.norm_sqr()).sum();
    let pass = terms.iter().all(|t| t.residual < TOL) && (weight - 1.0).abs() < TOL;
    Ok(ProportionalityReport { terms, weight, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::PauliChannel;
    use crate::random::{random_unitary, rng};

    #[test]
    fn two_party_swap_counterexample() {
        let r = fixed_bit_scan(2).unwrap();
        assert_eq!(r.cells, 8);
        let swap = PermutationPair::new(vec![1, 0]).unwrap();
        assert!(r.counterexamples.iter().any(|c| c.tau == swap && c.bits == "01"));
        assert!(r.structure_holds());
    }

    #[test]
    fn odd_n_has_no_counterexample() {
        let r = fixed_bit_scan(3).unwrap();
        assert_eq!(r.cells, 48);
        assert!(!r.has_counterexample());
        let id = PermutationPair::identity(3);
        for mask in 0..8 {
            assert_eq!(FixedBitWitness::find(&id, &bits_of(mask, 3)).index, Some(0));
        }
        assert!(!fixed_bit_scan(5).unwrap().has_counterexample());
    }

    #[test]
    fn even_n_has_counterexamples() {
        for n in [2, 4, 6] {
            let r = fixed_bit_scan(n).unwrap();
            assert!(r.has_counterexample(), "n = {n}");
            assert!(r.structure_holds(), "n = {n}");
        }
    }

    #[test]
    fn scan_range() {
        assert!(fixed_bit_scan(1).is_err());
        assert!(fixed_bit_scan(8).is_err());
    }

    #[test]
    fn permutation_validation() {
        assert!(PermutationPair::new(vec![0, 0]).is_err());
        assert!(PermutationPair::new(vec![0, 2]).is_err());
        assert_eq!(PermutationPair::from_one_based(&[2, 3, 1]).unwrap().as_slice(), &[1, 2, 0]);
        assert_eq!(PermutationPair::cycle(4).cycles(), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn routed_three_cycle() {
        let tau = PermutationPair::cycle(3);
        let msg = MessageState::haar(&mut rng(8));
        let report = routed_channel_state_scan(&tau, &msg).unwrap();
        assert!(report.all_agree());
        let b = report.branch(&[0, 1, 0]).unwrap();
        assert!(b.witness.index.is_some());
        assert!(b.message_independent.contains(&b.witness.index.unwrap()));
        assert!(report.branches.iter().all(|b| !b.message_independent.is_empty()));
    }

    #[test]
    fn routed_identity_everything_fixed() {
        let report = routed_channel_state_scan(&PermutationPair::identity(3), &MessageState::plus()).unwrap();
        assert!(report.branches.iter().all(|b| b.message_independent == vec![0, 1, 2]));
    }

    #[test]
    fn routed_reduced_state_across_messages() {
        let tau = PermutationPair::cycle(3);
        let bits = [0u8, 1, 0];
        let j = FixedBitWitness::find(&tau, &bits).index.unwrap();
        let mut r = rng(21);
        let reference = routed_state(&tau, &bits, &MessageState::haar(&mut r))
            .unwrap()
            .to_density()
            .partial_trace(&[j])
            .unwrap();
        for _ in 0..10 {
            let rho = routed_state(&tau, &bits, &MessageState::haar(&mut r))
                .unwrap()
                .to_density()
                .partial_trace(&[j])
                .unwrap();
            assert!(rho.distance(&reference) < 1e-12);
        }
    }

    #[test]
    fn proportionality_examples() {
        let id = vec![Operator::identity(&[2])];
        let r = check_term_proportionality(&id, &id, &id).unwrap();
        assert!(r.pass);
        assert!((r.terms[0].lambda - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let deph = PauliChannel::dephasing().kraus();
        let r = check_term_proportionality(&id, &deph, &id).unwrap();
        assert!(!r.pass);
        let z_term = r.terms.iter().find(|t| t.lambda.norm() < 1e-15).unwrap();
        assert!((z_term.residual - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);

        let x = vec![Operator::pauli_x()];
        let r = check_term_proportionality(&id, &x, &id).unwrap();
        assert!(!r.pass);
        assert!(r.terms[0].lambda.norm() < 1e-15);
        assert!((r.terms[0].residual - 1.0).abs() < 1e-15);
        let r = check_term_proportionality(&x, &x, &id).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn unitary_then_inverse_passes() {
        let u = random_unitary(&mut rng(4), &[2]);
        let r = check_term_proportionality(&[u.dagger()], &[u], &[Operator::identity(&[2])]).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn proportionality_dimension_mismatch() {
        let id2 = vec![Operator::identity(&[2])];
        let id4 = vec![Operator::identity(&[2, 2])];
        assert!(check_term_proportionality(&id2, &id4, &id2).is_err());
    }
}
