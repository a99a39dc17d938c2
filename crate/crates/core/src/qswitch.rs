//! The quantum SWITCH of two channels.
//!
//! [`switch_generic`] builds the switched output directly from Kraus operators
//! `S_jk = A_j B_k ⊗ |0⟩⟨0| + B_k A_j ⊗ |1⟩⟨1|`, with the order qubit as the last
//! tensor factor. For products of Pauli channels every `S_jk` collapses to
//! `c · P ⊗ (|0⟩⟨0| ± |1⟩⟨1|)`, so the switched channel splits into a part that
//! leaves the order qubit alone and a part that conjugates it by `Z`:
//!
//! ```text
//! S_ω(A, B)(ρ) = p₊ C₊(ρ) ⊗ ω + p₋ C₋(ρ) ⊗ ZωZ
//! ```
//!
//! [`closed_form_pauli_product`] computes that split exactly with Pauli algebra;
//! [`validate_closed_forms`] checks it against the generic construction.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::channels::{choi_of_map, product_kraus, product_terms, PauliChannel, PauliString};
use crate::error::{Error, Result};
use crate::qcore::{
    c, check_completeness, max_abs, tensor, CMatrix, DensityMatrix, Ket, Operator, ZERO,
};
use crate::random::{random_density, sub_rng};

/// Largest number of message qubits handled by the closed forms.
pub const MAX_PARTIES: usize = 6;

fn check_parties(n: usize) -> Result<()> {
    if (1..=MAX_PARTIES).contains(&n) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "n",
            value: n,
            min: 1,
            max: MAX_PARTIES,
        })
    }
}

fn check_order_state(omega: &DensityMatrix) -> Result<()> {
    if omega.dims() != [2] {
        return Err(Error::DimensionMismatch(format!(
            "order qubit state has dims {:?}",
            omega.dims()
        )));
    }
    Ok(())
}

fn check_pair(a: &[Operator], b: &[Operator]) -> Result<usize> {
    check_completeness(a)?;
    check_completeness(b)?;
    let d = a[0].ncols();
    if a[0].nrows() != d || b[0].nrows() != d || b[0].ncols() != d {
        return Err(Error::DimensionMismatch(
            "both channels must act on the same message space".into(),
        ));
    }
    Ok(d)
}

fn z_conjugate(omega: &DensityMatrix) -> DensityMatrix {
    let z = Operator::pauli_z();
    let m = z.matrix() * omega.matrix() * z.matrix();
    DensityMatrix::from_operator_unchecked(Operator::from_parts(m, vec![2], vec![2]))
}

/// Both orderings `A_j B_k` and `B_k A_j` for every Kraus pair.
fn ordered_products(a: &[Operator], b: &[Operator]) -> Vec<[CMatrix; 2]> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for aj in a {
        for bk in b {
            out.push([aj.matrix() * bk.matrix(), bk.matrix() * aj.matrix()]);
        }
    }
    out
}

/// `Σ_jk S_jk (X ⊗ ω) S_jk†` for an arbitrary message operator `X`; no completeness check.
pub fn switch_map(a: &[Operator], b: &[Operator], x: &Operator, omega: &Operator) -> Result<Operator> {
    let d = x.nrows();
    if a.is_empty() || b.is_empty() || a[0].ncols() != d || b[0].ncols() != d {
        return Err(Error::DimensionMismatch("Kraus sets do not match the input".into()));
    }
    if omega.nrows() != 2 || omega.ncols() != 2 {
        return Err(Error::DimensionMismatch("order qubit must be a qubit".into()));
    }
    let mut blocks = [
        CMatrix::zeros(d, d),
        CMatrix::zeros(d, d),
        CMatrix::zeros(d, d),
        CMatrix::zeros(d, d),
    ];
    for [m0, m1] in ordered_products(a, b) {
        let ms = [&m0, &m1];
        let xs = [ms[0] * x.matrix(), ms[1] * x.matrix()];
        for c0 in 0..2 {
            for c1 in 0..2 {
                blocks[2 * c0 + c1] += &xs[c0] * ms[c1].adjoint();
            }
        }
    }
    let mut out = CMatrix::zeros(2 * d, 2 * d);
    for c0 in 0..2 {
        for c1 in 0..2 {
            let w = omega.matrix()[(c0, c1)];
            if w == ZERO {
                continue;
            }
            let blk = &blocks[2 * c0 + c1];
            for r in 0..d {
                for s in 0..d {
                    out[(2 * r + c0, 2 * s + c1)] += w * blk[(r, s)];
                }
            }
        }
    }
    let mut dims = x.row_dims().to_vec();
    dims.push(2);
    Ok(Operator::from_parts(out, dims.clone(), dims))
}

/// Switched output `Σ_jk S_jk (ρ ⊗ ω) S_jk†` on message ⊗ order qubit.
pub fn switch_generic(
    a: &[Operator],
    b: &[Operator],
    input: &DensityMatrix,
    omega: &DensityMatrix,
) -> Result<DensityMatrix> {
    let d = check_pair(a, b)?;
    check_order_state(omega)?;
    if input.matrix().nrows() != d {
        return Err(Error::DimensionMismatch(format!(
            "channels act on dimension {d}, input has {}",
            input.matrix().nrows()
        )));
    }
    let out = switch_map(a, b, input.operator(), omega.operator())?;
    let dims = out.dims().to_vec();
    let m = out.into_matrix();
    let m = (&m + m.adjoint()).map(|z| z * 0.5);
    DensityMatrix::new(Operator::from_parts(m, dims.clone(), dims))
}

/// Choi operator of `ρ ↦ S_ω(A, B)(ρ)`, factors ordered message, order qubit, reference.
pub fn switched_choi(a: &[Operator], b: &[Operator], omega: &DensityMatrix) -> Result<Operator> {
    let d = check_pair(a, b)?;
    check_order_state(omega)?;
    let products = ordered_products(a, b);
    // (M ⊗ I)|Φ⟩ is the vectorization of M; v[c] has one column per Kraus pair, holding the c-ordered product
    let mut v = [CMatrix::zeros(d * d, products.len()), CMatrix::zeros(d * d, products.len())];
    for (p, pair) in products.iter().enumerate() {
        for (ctl, m) in pair.iter().enumerate() {
            for r in 0..d {
                for i in 0..d {
                    v[ctl][(r * d + i, p)] = m[(r, i)];
                }
            }
        }
    }
    let g00 = &v[0] * v[0].adjoint();
    let g01 = &v[0] * v[1].adjoint();
    let g11 = &v[1] * v[1].adjoint();
    let g10 = g01.adjoint();
    let grams = [[&g00, &g01], [&g10, &g11]];
    let om = omega.matrix();
    let mut acc = CMatrix::zeros(2 * d * d, 2 * d * d);
    for c0 in 0..2 {
        for c1 in 0..2 {
            let w = om[(c0, c1)] / d as f64;
            let g = grams[c0][c1];
            for r in 0..d {
                for s in 0..d {
                    let blk = g.view((r * d, s * d), (d, d)) * w;
                    acc.view_mut(((2 * r + c0) * d, (2 * s + c1) * d), (d, d)).copy_from(&blk);
                }
            }
        }
    }
    let mut dims = a[0].row_dims().to_vec();
    dims.push(2);
    dims.extend_from_slice(a[0].col_dims());
    Operator::new(acc, dims)
}

/// A normalized mixture of Pauli strings on `n` qubits, kept sorted by string.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PauliMixture {
    n: usize,
    terms: Vec<(PauliString, f64)>,
}

impl PauliMixture {
    fn from_table(n: usize, table: BTreeMap<PauliString, f64>) -> Self {
        let total: f64 = table.values().sum();
        if total <= 0.0 {
            // empty branch: any CPTP map works, use the identity
            return Self {
                n,
                terms: vec![(PauliString::identity(n), 1.0)],
            };
        }
        let terms = table
            .into_iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|(s, w)| (s, w / total))
            .collect();
        Self { n, terms }
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(PauliString, f64)] {
        &self.terms
    }

    pub fn weight(&self, s: &PauliString) -> f64 {
        self.terms.iter().find(|(t, _)| t == s).map_or(0.0, |(_, w)| *w)
    }

    pub fn kraus(&self) -> Vec<Operator> {
        self.terms
            .iter()
            .map(|(s, w)| s.operator().scale(c(w.sqrt(), 0.0)))
            .collect()
    }

    /// `Σ w_s P_s X P_s` for an arbitrary operator `X`.
    pub fn apply_operator(&self, x: &Operator) -> Result<Operator> {
        let d = 1usize << self.n;
        if x.nrows() != d || x.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}-qubit channel applied to a {}x{} operator",
                self.n,
                x.nrows(),
                x.ncols()
            )));
        }
        let mut acc = CMatrix::zeros(d, d);
        for (s, w) in &self.terms {
            let p = s.operator();
            acc += (p.matrix() * x.matrix() * p.matrix()).map(|z| z * *w);
        }
        Ok(Operator::from_parts(acc, x.row_dims().to_vec(), x.col_dims().to_vec()))
    }
}

/// `p₊ C₊ ⊗ ω₊ + p₋ C₋ ⊗ ω₋` with `ω₋ = Z ω₊ Z`.
#[derive(Clone, Debug)]
pub struct SwitchedChannel {
    pub p_plus: f64,
    pub p_minus: f64,
    pub c_plus: PauliMixture,
    pub c_minus: PauliMixture,
    pub omega_plus: DensityMatrix,
    pub omega_minus: DensityMatrix,
}

impl SwitchedChannel {
    fn from_tables(n: usize, plus: BTreeMap<PauliString, f64>, minus: BTreeMap<PauliString, f64>) -> Self {
        let p_plus: f64 = plus.values().sum();
        let p_minus: f64 = minus.values().sum();
        let total = p_plus + p_minus;
        let omega = Ket::plus().to_density();
        Self {
            p_plus: p_plus / total,
            p_minus: p_minus / total,
            c_plus: PauliMixture::from_table(n, plus),
            c_minus: PauliMixture::from_table(n, minus),
            omega_minus: z_conjugate(&omega),
            omega_plus: omega,
        }
    }

    /// Same channel pair with the order qubit prepared in `omega` instead of `|+⟩`.
    pub fn with_order_state(mut self, omega: &DensityMatrix) -> Result<Self> {
        check_order_state(omega)?;
        self.omega_minus = z_conjugate(omega);
        self.omega_plus = omega.clone();
        Ok(self)
    }

    pub fn qubits(&self) -> usize {
        self.c_plus.qubits()
    }

    pub fn apply_operator(&self, x: &Operator) -> Result<Operator> {
        let plus = tensor(&self.c_plus.apply_operator(x)?, self.omega_plus.operator());
        let minus = tensor(&self.c_minus.apply_operator(x)?, self.omega_minus.operator());
        plus.scale(c(self.p_plus, 0.0)).add(&minus.scale(c(self.p_minus, 0.0)))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.apply_operator(rho.operator())?;
        DensityMatrix::new(out)
    }

    /// Choi operator, factors ordered message, order qubit, reference.
    pub fn choi(&self) -> Result<Operator> {
        choi_of_map(&vec![2; self.qubits()], |x| self.apply_operator(x))
    }
}

/// Exact split of `S(A, B)` for `A = ⊗ a_k`, `B = ⊗ b_k` by enumerating every Kraus
/// pair and comparing the phases of `P_A P_B` and `P_B P_A`.
pub fn closed_form_pauli_product(a: &[PauliChannel], b: &[PauliChannel]) -> Result<SwitchedChannel> {
    check_parties(a.len())?;
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {} qubit channels",
            a.len(),
            b.len()
        )));
    }
    let ta = product_terms(a);
    let tb = product_terms(b);
    let mut plus = BTreeMap::new();
    let mut minus = BTreeMap::new();
    for (sa, wa) in &ta {
        for (sb, wb) in &tb {
            let (ab_phase, ab) = sa.mul(sb);
            let (ba_phase, ba) = sb.mul(sa);
            debug_assert_eq!(ab, ba);
            // the two orderings agree up to a sign: equal phases leave ω alone, opposite ones flip it
            let table = if ab_phase == ba_phase { &mut plus } else { &mut minus };
            *table.entry(ab).or_insert(0.0) += wa * wb;
        }
    }
    Ok(SwitchedChannel::from_tables(a.len(), plus, minus))
}

/// `S(E, E)` for `E = e1 ⊗ e2`, order qubit in `|+⟩`.
pub fn closed_form_two_party(e1: &PauliChannel, e2: &PauliChannel) -> Result<SwitchedChannel> {
    closed_form_pauli_product(&[*e1, *e2], &[*e1, *e2])
}

/// `S(N_XY^⊗n, N_XY^⊗n)`: even-weight Z-strings in `C₊`, odd-weight ones in `C₋`,
/// every string with total weight `2^-n`; order qubit in `|+⟩`.
pub fn closed_form_nxy_n(n: usize) -> Result<SwitchedChannel> {
    check_parties(n)?;
    let mut plus = BTreeMap::new();
    let mut minus = BTreeMap::new();
    let w = 0.5f64.powi(n as i32);
    for mask in 0..(1usize << n) {
        let s = PauliString::z_mask(n, mask);
        if mask.count_ones() % 2 == 0 {
            plus.insert(s, w);
        } else {
            minus.insert(s, w);
        }
    }
    Ok(SwitchedChannel::from_tables(n, plus, minus))
}

/// Max-entry distance between the Choi operators of the closed form and of
/// [`switch_generic`] for product Pauli channels `A = ⊗ a_k`, `B = ⊗ b_k`.
pub fn closed_form_deviation(
    closed: &SwitchedChannel,
    a: &[PauliChannel],
    b: &[PauliChannel],
) -> Result<f64> {
    let generic = switched_choi(&product_kraus(a), &product_kraus(b), &closed.omega_plus)?;
    let exact = closed.choi()?;
    Ok(max_abs(&(generic.matrix() - exact.matrix())))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelFamily {
    /// Independent uniform simplex draw per qubit; the same product channel is used twice.
    Random,
    Identity,
    Nxy,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationRecord {
    pub n: usize,
    pub trial: usize,
    pub family: ChannelFamily,
    pub channels: Vec<PauliChannel>,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub trials: usize,
    pub records: Vec<ValidationRecord>,
    pub max_deviation: f64,
    #[serde(skip)]
    pub elapsed_secs: f64,
}

/// One closed-form vs generic comparison. For `Random`, the channel and a mixed
/// order-qubit state are drawn from the `(seed, n, trial)` stream.
pub fn validate_case(seed: u64, n: usize, trial: usize, family: ChannelFamily) -> Result<ValidationRecord> {
    check_parties(n)?;
    let (channels, closed) = match family {
        ChannelFamily::Random => {
            let mut rng = sub_rng(seed, (trial as u64) << 8 | n as u64);
            let chans: Vec<PauliChannel> = (0..n).map(|_| PauliChannel::random(&mut rng)).collect();
            let omega = random_density(&mut rng, &[2]);
            let closed = if n == 2 {
                closed_form_two_party(&chans[0], &chans[1])?
            } else {
                closed_form_pauli_product(&chans, &chans)?
            };
            (chans, closed.with_order_state(&omega)?)
        }
        ChannelFamily::Identity => {
            let chans = vec![PauliChannel::identity(); n];
            let closed = closed_form_pauli_product(&chans, &chans)?;
            (chans, closed)
        }
        ChannelFamily::Nxy => (vec![PauliChannel::nxy(); n], closed_form_nxy_n(n)?),
    };
    let deviation = closed_form_deviation(&closed, &channels, &channels)?;
    Ok(ValidationRecord {
        n,
        trial,
        family,
        channels,
        deviation,
    })
}

/// Random draws for every `n` in `ns`, `trials` each.
pub fn validate_closed_forms_for(seed: u64, trials: usize, ns: &[usize], family: ChannelFamily) -> Result<ValidationReport> {
    let start = Instant::now();
    let mut records = Vec::new();
    for &n in ns {
        for trial in 0..trials {
            records.push(validate_case(seed, n, trial, family)?);
        }
    }
    let max_deviation = records.iter().map(|r| r.deviation).fold(0.0, f64::max);
    Ok(ValidationReport {
        seed,
        trials,
        records,
        max_deviation,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

/// `trials` random Pauli draws for `n ∈ {1, 2, 3}`, plus the `N_XY` closed form for each `n`.
pub fn validate_closed_forms(seed: u64, trials: usize) -> Result<ValidationReport> {
    let start = Instant::now();
    let mut report = validate_closed_forms_for(seed, trials, &[1, 2, 3], ChannelFamily::Random)?;
    for n in 1..=3 {
        report.records.push(validate_case(seed, n, 0, ChannelFamily::Nxy)?);
    }
    report.max_deviation = report.records.iter().map(|r| r.deviation).fold(0.0, f64::max);
    report.elapsed_secs = start.elapsed().as_secs_f64();
    Ok(report)
}
