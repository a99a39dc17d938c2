//! Pauli channels, their composition, Choi matrices and the entanglement-breaking test.
//!
//! A [`PauliChannel`] stores the *probabilities* `w = (w_I, w_X, w_Y, w_Z)` of
//! applying each Pauli. Parameterizations by Kraus amplitudes `p_l` (with
//! `Σ p_l² = 1`) map onto this via `w_l = p_l²`, see
//! [`PauliChannel::from_amplitudes`].

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::{
    c, check_completeness, kraus_map, partial_transpose, tensor, CMatrix, Complex64, DensityMatrix, Operator, ONE,
};

/// Single-qubit Pauli operator.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Pauli {
        Self::ALL[i & 3]
    }

    pub fn operator(self) -> Operator {
        match self {
            Pauli::I => Operator::identity(&[2]),
            Pauli::X => Operator::pauli_x(),
            Pauli::Y => Operator::pauli_y(),
            Pauli::Z => Operator::pauli_z(),
        }
    }

    /// `self · rhs = phase · result`.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: Pauli) -> (Phase, Pauli) {
        let (a, b) = (self.index(), rhs.index());
        let out = Pauli::from_index(a ^ b);
        let k = match (a, b) {
            (0, _) | (_, 0) => 0,
            _ if a == b => 0,
            (1, 2) | (2, 3) | (3, 1) => 1,
            _ => 3,
        };
        (Phase(k), out)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

/// A phase `i^k`, `k ∈ {0, 1, 2, 3}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub struct Phase(pub u8);

impl Phase {
    pub const ONE: Phase = Phase(0);

    pub fn times(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }

    pub fn value(self) -> Complex64 {
        match self.0 % 4 {
            0 => c(1.0, 0.0),
            1 => c(0.0, 1.0),
            2 => c(-1.0, 0.0),
            _ => c(0.0, -1.0),
        }
    }
}

/// Tensor product of single-qubit Paulis; factor 0 is the leftmost qubit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Self {
        Self(ops)
    }

    pub fn identity(n: usize) -> Self {
        Self(vec![Pauli::I; n])
    }

    /// Z on every qubit whose bit is set in `mask` (bit `k` ↔ qubit `k`).
    pub fn z_mask(n: usize, mask: usize) -> Self {
        Self((0..n).map(|k| if mask >> k & 1 == 1 { Pauli::Z } else { Pauli::I }).collect())
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn z_weight(&self) -> usize {
        self.0.iter().filter(|&&p| p == Pauli::Z).count()
    }

    pub fn is_z_type(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I || p == Pauli::Z)
    }

    /// `self · rhs = phase · result`, computed factor by factor.
    pub fn mul(&self, rhs: &PauliString) -> (Phase, PauliString) {
        assert_eq!(self.len(), rhs.len(), "Pauli strings of different length");
        let mut phase = Phase::ONE;
        let ops = self
            .0
            .iter()
            .zip(&rhs.0)
            .map(|(&a, &b)| {
                let (k, p) = a.mul(b);
                phase = phase.times(k);
                p
            })
            .collect();
        (phase, PauliString(ops))
    }

    pub fn operator(&self) -> Operator {
        let ops: Vec<Operator> = self.0.iter().map(|p| p.operator()).collect();
        crate::qcore::tensor_all(&ops).unwrap_or_else(|| Operator::identity(&[]))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Random application of I, X, Y, Z with fixed probabilities.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct PauliChannel {
    weights: [f64; 4],
}

impl PauliChannel {
    pub fn new(weights: [f64; 4]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidWeights(format!("{weights:?} has a negative or non-finite entry")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidWeights(format!("{weights:?} sums to {sum}")));
        }
        Ok(Self { weights })
    }

    /// From Kraus amplitudes: Kraus operators `p_l σ_l` with `Σ p_l² = 1`, stored as `w_l = p_l²`.
    pub fn from_amplitudes(p: [f64; 4]) -> Result<Self> {
        Self::new(p.map(|a| a * a))
    }

    pub fn identity() -> Self {
        Self { weights: [1.0, 0.0, 0.0, 0.0] }
    }

    /// `ρ ↦ ½(XρX + YρY)`.
    pub fn nxy() -> Self {
        Self { weights: [0.0, 0.5, 0.5, 0.0] }
    }

    /// Full dephasing `ρ ↦ ½(ρ + ZρZ)`.
    pub fn dephasing() -> Self {
        Self { weights: [0.5, 0.0, 0.0, 0.5] }
    }

    /// Completely depolarizing channel.
    pub fn uniform() -> Self {
        Self { weights: [0.25; 4] }
    }

    /// Uniform draw from the probability simplex via sorted-uniform spacings.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut u = [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()];
        u.sort_by(|a, b| a.total_cmp(b));
        Self {
            weights: [u[0], u[1] - u[0], u[2] - u[1], 1.0 - u[2]],
        }
    }

    pub fn weights(&self) -> [f64; 4] {
        self.weights
    }

    pub fn weight(&self, p: Pauli) -> f64 {
        self.weights[p.index()]
    }

    /// Kraus operators `√w_l σ_l`, zero-weight terms omitted.
    pub fn kraus(&self) -> Vec<Operator> {
        pauli_kraus(self)
    }
}

impl Default for PauliChannel {
    fn default() -> Self {
        Self::identity()
    }
}

pub fn pauli_kraus(ch: &PauliChannel) -> Vec<Operator> {
    Pauli::ALL
        .iter()
        .filter(|&&p| ch.weight(p) > 0.0)
        .map(|&p| p.operator().scale(c(ch.weight(p).sqrt(), 0.0)))
        .collect()
}

/// Sequential composition: `a` then `b`. Pauli channels commute, so the order
/// does not affect the result.
pub fn compose(a: &PauliChannel, b: &PauliChannel) -> PauliChannel {
    let mut w = [0.0; 4];
    for p in Pauli::ALL {
        for q in Pauli::ALL {
            let (_, r) = q.mul(p);
            w[r.index()] += a.weight(p) * b.weight(q);
        }
    }
    PauliChannel { weights: w }
}

/// Pauli strings of a product channel `⊗ ch_k` with their probabilities; zero weights omitted.
pub fn product_terms(channels: &[PauliChannel]) -> Vec<(PauliString, f64)> {
    let mut terms = vec![(Vec::new(), 1.0)];
    for ch in channels {
        let mut next = Vec::with_capacity(terms.len() * 4);
        for (ops, w) in &terms {
            for p in Pauli::ALL {
                let wp = ch.weight(p);
                if wp > 0.0 {
                    let mut o: Vec<Pauli> = ops.clone();
                    o.push(p);
                    next.push((o, w * wp));
                }
            }
        }
        terms = next;
    }
    terms.into_iter().map(|(o, w)| (PauliString::new(o), w)).collect()
}

/// Kraus operators of the product channel `⊗ ch_k`.
pub fn product_kraus(channels: &[PauliChannel]) -> Vec<Operator> {
    product_terms(channels)
        .into_iter()
        .map(|(s, w)| s.operator().scale(c(w.sqrt(), 0.0)))
        .collect()
}

/// Normalized Choi state `(𝒞 ⊗ id)|Φ+⟩⟨Φ+|`, output factors first, reference factors last.
#[derive(Clone, Debug)]
pub struct ChoiMatrix {
    state: DensityMatrix,
    input_dims: Vec<usize>,
    output_dims: Vec<usize>,
}

impl ChoiMatrix {
    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn input_dims(&self) -> &[usize] {
        &self.input_dims
    }

    pub fn output_dims(&self) -> &[usize] {
        &self.output_dims
    }
}

/// Choi operator of an arbitrary linear map, built from its action on `|i⟩⟨j|`.
pub fn choi_of_map<F>(input_dims: &[usize], mut map: F) -> Result<Operator>
where
    F: FnMut(&Operator) -> Result<Operator>,
{
    let d: usize = input_dims.iter().product();
    let mut acc: Option<CMatrix> = None;
    let mut out_dims = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let mut e = CMatrix::zeros(d, d);
            e[(i, j)] = ONE;
            let e = Operator::from_parts(e, input_dims.to_vec(), input_dims.to_vec());
            let out = map(&e)?;
            let term = tensor(&out, &e);
            out_dims = out.dims().to_vec();
            match acc.as_mut() {
                Some(a) => *a += term.matrix(),
                None => acc = Some(term.into_matrix()),
            }
        }
    }
    let m = acc.unwrap_or_else(|| CMatrix::zeros(0, 0)).map(|z| z / d as f64);
    let mut dims = out_dims;
    dims.extend_from_slice(input_dims);
    Operator::new(m, dims)
}

/// Choi matrix of a CPTP Kraus set.
pub fn choi(kraus: &[Operator]) -> Result<ChoiMatrix> {
    check_completeness(kraus)?;
    let input_dims = kraus[0].col_dims().to_vec();
    let output_dims = kraus[0].row_dims().to_vec();
    let op = choi_of_map(&input_dims, |x| kraus_map(x, kraus))?;
    Ok(ChoiMatrix {
        state: DensityMatrix::new(op)?,
        input_dims,
        output_dims,
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct EbVerdict {
    pub entanglement_breaking: bool,
    /// Smallest eigenvalue of the partially transposed Choi matrix.
    pub min_pt_eigenvalue: f64,
}

/// PPT test on a qubit channel's Choi matrix; in 2⊗2 PPT is equivalent to separability.
pub fn is_entanglement_breaking_qubit(ch: &ChoiMatrix) -> Result<EbVerdict> {
    if ch.input_dims != [2] || ch.output_dims != [2] {
        return Err(Error::DimensionMismatch(format!(
            "expected a qubit channel, got {:?} -> {:?}",
            ch.input_dims, ch.output_dims
        )));
    }
    let pt = partial_transpose(ch.state.operator(), 1)?;
    let min = pt
        .into_matrix()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(EbVerdict {
        entanglement_breaking: min >= -1e-9,
        min_pt_eigenvalue: min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{completeness_deviation, max_abs, Ket, ZERO};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn pauli_table() {
        assert_eq!(Pauli::X.mul(Pauli::Y), (Phase(1), Pauli::Z));
        assert_eq!(Pauli::Y.mul(Pauli::X), (Phase(3), Pauli::Z));
        assert_eq!(Pauli::Z.mul(Pauli::X), (Phase(1), Pauli::Y));
        assert_eq!(Pauli::Y.mul(Pauli::Y), (Phase(0), Pauli::I));
        // brute-force against matrices
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                let (ph, r) = a.mul(b);
                let lhs = a.operator().compose(&b.operator()).unwrap();
                let rhs = r.operator().scale(ph.value());
                assert!(lhs.distance(&rhs) < 1e-15, "{a}{b}");
            }
        }
    }

    #[test]
    fn kraus_examples() {
        assert_eq!(PauliChannel::identity().kraus(), vec![Operator::identity(&[2])]);
        let s = c(FRAC_1_SQRT_2, 0.0);
        let k = PauliChannel::nxy().kraus();
        assert_eq!(k.len(), 2);
        assert!(k[0].distance(&Operator::pauli_x().scale(s)) < 1e-15);
        assert!(k[1].distance(&Operator::pauli_y().scale(s)) < 1e-15);
        let k = PauliChannel::uniform().kraus();
        assert_eq!(k.len(), 4);
        assert!(completeness_deviation(&k).unwrap() < 1e-12);
    }

    #[test]
    fn weight_validation() {
        assert!(PauliChannel::new([0.5, 0.5, 0.1, 0.0]).is_err());
        assert!(PauliChannel::new([1.5, -0.5, 0.0, 0.0]).is_err());
        let ch = PauliChannel::from_amplitudes([0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]).unwrap();
        assert!((ch.weight(Pauli::X) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn compose_examples() {
        let ch = PauliChannel::new([0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(compose(&PauliChannel::identity(), &ch), ch);
        let d = compose(&PauliChannel::nxy(), &PauliChannel::nxy());
        assert_eq!(d.weights(), [0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn choi_examples() {
        let h = FRAC_1_SQRT_2;
        let phi = Ket::new(vec![c(h, 0.0), ZERO, ZERO, c(h, 0.0)], vec![2, 2]).unwrap();
        let id = choi(&PauliChannel::identity().kraus()).unwrap();
        assert!(id.state().distance(&phi.to_density()) < 1e-12);

        let nxy = choi(&PauliChannel::nxy().kraus()).unwrap();
        let expect = CMatrix::from_fn(4, 4, |r, col| if r == col && (r == 1 || r == 2) { c(0.5, 0.0) } else { ZERO });
        assert!(max_abs(&(nxy.state().matrix() - expect)) < 1e-12);

        let deph = choi(&PauliChannel::dephasing().kraus()).unwrap();
        let expect = CMatrix::from_fn(4, 4, |r, col| if r == col && (r == 0 || r == 3) { c(0.5, 0.0) } else { ZERO });
        assert!(max_abs(&(deph.state().matrix() - expect)) < 1e-12);
    }

    #[test]
    fn eb_examples() {
        let v = is_entanglement_breaking_qubit(&choi(&PauliChannel::nxy().kraus()).unwrap()).unwrap();
        assert!(v.entanglement_breaking);
        assert!(v.min_pt_eigenvalue.abs() < 1e-12);
        let v = is_entanglement_breaking_qubit(&choi(&PauliChannel::identity().kraus()).unwrap()).unwrap();
        assert!(!v.entanglement_breaking);
        assert!((v.min_pt_eigenvalue + 0.5).abs() < 1e-12);
        let v = is_entanglement_breaking_qubit(&choi(&PauliChannel::dephasing().kraus()).unwrap()).unwrap();
        assert!(v.entanglement_breaking);
    }

    #[test]
    fn eb_rejects_two_qubit_channels() {
        let ch = choi(&product_kraus(&[PauliChannel::nxy(), PauliChannel::nxy()])).unwrap();
        assert!(is_entanglement_breaking_qubit(&ch).is_err());
    }

    #[test]
    fn product_terms_weights() {
        let terms = product_terms(&[PauliChannel::nxy(), PauliChannel::dephasing()]);
        let names: Vec<String> = terms.iter().map(|(s, _)| s.to_string()).collect();
        assert_eq!(names, ["XI", "XZ", "YI", "YZ"]);
        assert!(terms.iter().all(|(_, w)| (*w - 0.25).abs() < 1e-15));
    }
}
