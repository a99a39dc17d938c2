//! Dense complex linear algebra for small qubit registers.
//!
//! Everything is stored as a dense [`DMatrix`] of [`Complex64`] together with
//! the list of tensor-factor dimensions. Factor 0 is the leftmost slot of the
//! Kronecker product (the most significant digit of a basis index).

use nalgebra::{DMatrix, DVector};
pub use nalgebra::Complex;

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;
pub type CMatrix = DMatrix<Complex64>;

/// Tolerance for equality and validity checks.
pub const TOL: f64 = 1e-9;
/// Branches with probability below this are dropped.
pub const ZERO_PROB: f64 = 1e-12;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Serializes a complex number as `[re, im]`.
pub fn serialize_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    [z.re, z.im].serialize(s)
}

/// Largest absolute entry of a matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn check_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Row-major strides of a tensor-factor list.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Offset of every multi-index over `factors` inside the full index space.
fn offsets(dims: &[usize], factors: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &f in factors {
        let mut next = Vec::with_capacity(out.len() * dims[f]);
        for base in &out {
            for d in 0..dims[f] {
                next.push(base + d * st[f]);
            }
        }
        out = next;
    }
    out
}

/// `(A ⊗ I) M` where `A` acts on the factor offsets `t_off` and `r_off` enumerates the rest.
fn left_local(a: &CMatrix, m: &CMatrix, t_off: &[usize], r_off: &[usize]) -> CMatrix {
    let k = t_off.len();
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    let mut buf = vec![ZERO; k];
    for col in 0..m.ncols() {
        for &base in r_off {
            for (b, &tb) in t_off.iter().enumerate() {
                buf[b] = m[(base + tb, col)];
            }
            for (i, &ti) in t_off.iter().enumerate() {
                let mut acc = ZERO;
                for (j, z) in buf.iter().enumerate() {
                    acc += a[(i, j)] * z;
                }
                out[(base + ti, col)] = acc;
            }
        }
    }
    out
}

/// `(A ⊗ I) M (A ⊗ I)†` without building the full-register operator.
fn conjugate_local(a: &CMatrix, m: &CMatrix, dims: &[usize], factors: &[usize]) -> CMatrix {
    let rest: Vec<usize> = (0..dims.len()).filter(|f| !factors.contains(f)).collect();
    let t_off = offsets(dims, factors);
    let r_off = offsets(dims, &rest);
    let am = left_local(a, m, &t_off, &r_off);
    left_local(a, &am.adjoint(), &t_off, &r_off).adjoint()
}

fn check_factors(dims: &[usize], factors: &[usize]) -> Result<()> {
    for (i, &f) in factors.iter().enumerate() {
        if f >= dims.len() {
            return Err(Error::FactorOutOfRange {
                index: f,
                count: dims.len(),
            });
        }
        if factors[..i].contains(&f) {
            return Err(Error::DimensionMismatch(format!("factor {f} listed twice")));
        }
    }
    Ok(())
}

/// A dense complex matrix with explicit tensor-factor dimensions on both sides.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: CMatrix,
    row_dims: Vec<usize>,
    col_dims: Vec<usize>,
}

impl Operator {
    /// Square operator whose rows and columns share `dims`.
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        Self::rect(matrix, dims.clone(), dims)
    }

    pub fn rect(matrix: CMatrix, row_dims: Vec<usize>, col_dims: Vec<usize>) -> Result<Self> {
        let rows: usize = row_dims.iter().product();
        let cols: usize = col_dims.iter().product();
        if matrix.nrows() != rows || matrix.ncols() != cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, dims {:?} x {:?}",
                matrix.nrows(),
                matrix.ncols(),
                row_dims,
                col_dims
            )));
        }
        check_finite(&matrix)?;
        Ok(Self {
            matrix,
            row_dims,
            col_dims,
        })
    }

    /// Single-qubit operator from a row-major 2x2 array.
    pub fn qubit(entries: [[Complex64; 2]; 2]) -> Self {
        let m = CMatrix::from_fn(2, 2, |r, c| entries[r][c]);
        Self::from_parts(m, vec![2], vec![2])
    }

    pub(crate) fn from_parts(matrix: CMatrix, row_dims: Vec<usize>, col_dims: Vec<usize>) -> Self {
        debug_assert_eq!(matrix.nrows(), row_dims.iter().product::<usize>());
        debug_assert_eq!(matrix.ncols(), col_dims.iter().product::<usize>());
        Self {
            matrix,
            row_dims,
            col_dims,
        }
    }

    pub fn identity(dims: &[usize]) -> Self {
        let d = dims.iter().product();
        Self::from_parts(CMatrix::identity(d, d), dims.to_vec(), dims.to_vec())
    }

    pub fn zeros(dims: &[usize]) -> Self {
        let d = dims.iter().product();
        Self::from_parts(CMatrix::zeros(d, d), dims.to_vec(), dims.to_vec())
    }

    pub fn pauli_x() -> Self {
        Self::qubit([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn pauli_y() -> Self {
        Self::qubit([[ZERO, -I], [I, ZERO]])
    }

    pub fn pauli_z() -> Self {
        Self::qubit([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// CNOT on two qubits, first factor is the control.
    pub fn cnot() -> Self {
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = ONE;
        m[(1, 1)] = ONE;
        m[(2, 3)] = ONE;
        m[(3, 2)] = ONE;
        Self::from_parts(m, vec![2, 2], vec![2, 2])
    }

    /// Rank-one projector onto a ket.
    pub fn projector(ket: &Ket) -> Self {
        let v = ket.amplitudes();
        Self::from_parts(v * v.adjoint(), ket.dims().to_vec(), ket.dims().to_vec())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Dimensions of the row (output) factors; equal to the column factors for square operators.
    pub fn dims(&self) -> &[usize] {
        &self.row_dims
    }

    pub fn row_dims(&self) -> &[usize] {
        &self.row_dims
    }

    pub fn col_dims(&self) -> &[usize] {
        &self.col_dims
    }

    pub fn is_square(&self) -> bool {
        self.row_dims == self.col_dims
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn dagger(&self) -> Self {
        Self::from_parts(
            self.matrix.adjoint(),
            self.col_dims.clone(),
            self.row_dims.clone(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_parts(
            self.matrix.map(|z| z * s),
            self.row_dims.clone(),
            self.col_dims.clone(),
        )
    }

    /// Matrix product `self * rhs`.
    pub fn compose(&self, rhs: &Operator) -> Result<Self> {
        if self.ncols() != rhs.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows(),
                self.ncols(),
                rhs.nrows(),
                rhs.ncols()
            )));
        }
        Ok(Self::from_parts(
            &self.matrix * &rhs.matrix,
            self.row_dims.clone(),
            rhs.col_dims.clone(),
        ))
    }

    pub fn add(&self, rhs: &Operator) -> Result<Self> {
        if self.matrix.shape() != rhs.matrix.shape() {
            return Err(Error::DimensionMismatch("operator sum".into()));
        }
        Ok(Self::from_parts(
            &self.matrix + &rhs.matrix,
            self.row_dims.clone(),
            self.col_dims.clone(),
        ))
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Max-entry distance to another operator of the same shape.
    pub fn distance(&self, other: &Operator) -> f64 {
        if self.matrix.shape() != other.matrix.shape() {
            return f64::INFINITY;
        }
        max_abs(&(&self.matrix - &other.matrix))
    }

    /// Lift an operator acting on `targets` (in the listed order) to the full register `dims`.
    pub fn embed(&self, targets: &[usize], dims: &[usize]) -> Result<Self> {
        check_factors(dims, targets)?;
        if !self.is_square() {
            return Err(Error::DimensionMismatch("embedding needs a square operator".into()));
        }
        let sub: Vec<usize> = targets.iter().map(|&t| dims[t]).collect();
        if sub != self.row_dims {
            return Err(Error::DimensionMismatch(format!(
                "operator dims {:?} do not match target dims {:?}",
                self.row_dims, sub
            )));
        }
        let rest: Vec<usize> = (0..dims.len()).filter(|f| !targets.contains(f)).collect();
        let t_off = offsets(dims, targets);
        let r_off = offsets(dims, &rest);
        let total: usize = dims.iter().product();
        let mut m = CMatrix::zeros(total, total);
        for &base in &r_off {
            for (a, &ra) in t_off.iter().enumerate() {
                for (b, &cb) in t_off.iter().enumerate() {
                    let z = self.matrix[(a, b)];
                    if z != ZERO {
                        m[(base + ra, base + cb)] = z;
                    }
                }
            }
        }
        Ok(Self::from_parts(m, dims.to_vec(), dims.to_vec()))
    }
}

/// Kronecker product; factor lists are concatenated in order.
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    let mut rd = a.row_dims.clone();
    rd.extend_from_slice(&b.row_dims);
    let mut cd = a.col_dims.clone();
    cd.extend_from_slice(&b.col_dims);
    Operator::from_parts(a.matrix.kronecker(&b.matrix), rd, cd)
}

/// Tensor product of a non-empty list of operators.
pub fn tensor_all<'a>(ops: impl IntoIterator<Item = &'a Operator>) -> Option<Operator> {
    ops.into_iter().fold(None, |acc, op| match acc {
        None => Some(op.clone()),
        Some(a) => Some(tensor(&a, op)),
    })
}

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amplitudes: DVector<Complex64>,
    dims: Vec<usize>,
}

impl Ket {
    pub fn new(amplitudes: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        if amplitudes.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dims {:?}",
                amplitudes.len(),
                dims
            )));
        }
        let v = DVector::from_vec(amplitudes);
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = v.norm();
        if (norm - 1.0).abs() > TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes: v, dims })
    }

    /// Computational basis state of a qubit register.
    pub fn bits(bits: &[u8]) -> Self {
        let n = bits.len();
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        let mut v = DVector::zeros(1 << n);
        v[idx] = ONE;
        Self {
            amplitudes: v,
            dims: vec![2; n],
        }
    }

    pub fn zero() -> Self {
        Self::bits(&[0])
    }

    pub fn one() -> Self {
        Self::bits(&[1])
    }

    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amplitudes: DVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]),
            dims: vec![2],
        }
    }

    pub fn minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amplitudes: DVector::from_vec(vec![c(h, 0.0), c(-h, 0.0)]),
            dims: vec![2],
        }
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Ket {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
            dims,
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_operator_unchecked(Operator::projector(self))
    }
}

/// A validated density operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
    tolerance: f64,
}

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        Self::with_tolerance(op, TOL)
    }

    /// Validates Hermiticity, unit trace and positivity within `tolerance`.
    pub fn with_tolerance(op: Operator, tolerance: f64) -> Result<Self> {
        if !op.is_square() {
            return Err(Error::InvalidState("not square".into()));
        }
        let herm = max_abs(&(op.matrix() - op.matrix().adjoint()));
        if herm > tolerance {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = op.trace();
        if (tr - ONE).norm() > tolerance {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let rho = Self { op, tolerance };
        let min = rho.min_eigenvalue();
        if min < -tolerance {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    pub(crate) fn from_operator_unchecked(op: Operator) -> Self {
        Self { op, tolerance: TOL }
    }

    /// Maximally mixed state on `dims`.
    pub fn maximally_mixed(dims: &[usize]) -> Self {
        let d: usize = dims.iter().product();
        Self::from_operator_unchecked(Operator::identity(dims).scale(c(1.0 / d as f64, 0.0)))
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn dims(&self) -> &[usize] {
        self.op.dims()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn trace(&self) -> f64 {
        self.op.trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.op.matrix().clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        self.op.distance(&other.op)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::from_operator_unchecked(tensor(&self.op, &other.op))
    }

    /// Reduced state on the factors in `keep`; their original order is preserved.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let op = partial_trace_op(&self.op, keep)?;
        Ok(Self::from_operator_unchecked(op))
    }

    /// Conjugation by a unitary acting on `factors`.
    pub fn apply_unitary(&self, unitary: &Operator, factors: &[usize]) -> Result<DensityMatrix> {
        check_factors(self.dims(), factors)?;
        let sub: Vec<usize> = factors.iter().map(|&f| self.dims()[f]).collect();
        if unitary.row_dims() != sub || unitary.col_dims() != sub {
            return Err(Error::DimensionMismatch(format!(
                "operator dims {:?} do not match target dims {:?}",
                unitary.row_dims(),
                sub
            )));
        }
        let u = unitary.matrix();
        let dev = max_abs(&(u.adjoint() * u - CMatrix::identity(u.nrows(), u.ncols())));
        if dev > self.tolerance {
            return Err(Error::Numerical(format!("operator is not unitary (deviation {dev:e})")));
        }
        let out = conjugate_local(u, self.matrix(), self.dims(), factors);
        Self::after_positive_map(Operator::from_parts(hermitize(out), self.dims().to_vec(), self.dims().to_vec()))
    }

    /// Output of a map that cannot create negative eigenvalues (unitary
    /// conjugation, normalized projection); Hermiticity and trace are still checked.
    fn after_positive_map(op: Operator) -> Result<DensityMatrix> {
        let herm = max_abs(&(op.matrix() - op.matrix().adjoint()));
        let tr = op.trace();
        if herm > TOL || (tr - ONE).norm() > TOL || !op.matrix().iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidState(format!("trace {tr}, Hermiticity deviation {herm:e}")));
        }
        Ok(Self::from_operator_unchecked(op))
    }
}

fn hermitize(m: CMatrix) -> CMatrix {
    let adj = m.adjoint();
    (m + adj).map(|z| z * 0.5)
}

/// Partial trace of a square operator (not necessarily a state).
pub fn partial_trace_op(op: &Operator, keep: &[usize]) -> Result<Operator> {
    if !op.is_square() {
        return Err(Error::DimensionMismatch("partial trace needs a square operator".into()));
    }
    let dims = op.dims();
    check_factors(dims, keep)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    let traced: Vec<usize> = (0..dims.len()).filter(|f| !kept.contains(f)).collect();
    let k_off = offsets(dims, &kept);
    let t_off = offsets(dims, &traced);
    let dk = k_off.len();
    let m = op.matrix();
    let out = CMatrix::from_fn(dk, dk, |r, col| {
        t_off
            .iter()
            .map(|&t| m[(k_off[r] + t, k_off[col] + t)])
            .sum()
    });
    let kd: Vec<usize> = kept.iter().map(|&f| dims[f]).collect();
    Ok(Operator::from_parts(out, kd.clone(), kd))
}

/// Transpose of a single tensor factor.
pub fn partial_transpose(op: &Operator, factor: usize) -> Result<Operator> {
    if !op.is_square() {
        return Err(Error::DimensionMismatch("partial transpose needs a square operator".into()));
    }
    let dims = op.dims();
    check_factors(dims, &[factor])?;
    let st = strides(dims);
    let s = st[factor];
    let d = dims[factor];
    let digit = |i: usize| (i / s) % d;
    let m = op.matrix();
    let out = CMatrix::from_fn(m.nrows(), m.ncols(), |r, col| {
        let (a, b) = (digit(r), digit(col));
        let r2 = r - a * s + b * s;
        let c2 = col - b * s + a * s;
        m[(r2, c2)]
    });
    Ok(Operator::from_parts(out, dims.to_vec(), dims.to_vec()))
}

/// Max deviation of `Σ K†K` from the identity.
pub fn completeness_deviation(kraus: &[Operator]) -> Result<f64> {
    let first = kraus
        .first()
        .ok_or_else(|| Error::DimensionMismatch("empty Kraus set".into()))?;
    let d = first.ncols();
    let mut acc = CMatrix::zeros(d, d);
    for k in kraus {
        if k.ncols() != d || k.nrows() != first.nrows() {
            return Err(Error::DimensionMismatch("Kraus operators differ in shape".into()));
        }
        acc += k.matrix().adjoint() * k.matrix();
    }
    Ok(max_abs(&(acc - CMatrix::identity(d, d))))
}

pub fn check_completeness(kraus: &[Operator]) -> Result<()> {
    let dev = completeness_deviation(kraus)?;
    if dev > TOL {
        Err(Error::NotComplete(dev))
    } else {
        Ok(())
    }
}

/// `Σ K X K†` on an arbitrary operator; no completeness check.
pub fn kraus_map(x: &Operator, kraus: &[Operator]) -> Result<Operator> {
    let first = kraus
        .first()
        .ok_or_else(|| Error::DimensionMismatch("empty Kraus set".into()))?;
    if first.ncols() != x.nrows() || x.nrows() != x.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "Kraus input dimension {} vs operator {}x{}",
            first.ncols(),
            x.nrows(),
            x.ncols()
        )));
    }
    let mut acc = CMatrix::zeros(first.nrows(), first.nrows());
    for k in kraus {
        acc += k.matrix() * x.matrix() * k.matrix().adjoint();
    }
    Ok(Operator::from_parts(acc, first.row_dims().to_vec(), first.row_dims().to_vec()))
}

/// Channel action `Σ K ρ K†`; the result is symmetrized and re-validated.
pub fn apply_kraus(rho: &DensityMatrix, kraus: &[Operator]) -> Result<DensityMatrix> {
    check_completeness(kraus)?;
    let out = kraus_map(rho.operator(), kraus)?;
    let dims = out.dims().to_vec();
    DensityMatrix::new(Operator::from_parts(hermitize(out.into_matrix()), dims.clone(), dims))
}

#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    pub outcome: usize,
    pub probability: f64,
    pub state: DensityMatrix,
}

/// Result of a projective measurement. Outcomes whose probability is below
/// [`ZERO_PROB`] are listed in `dropped` and carry no state.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub outcomes: Vec<MeasurementOutcome>,
    pub dropped: Vec<usize>,
}

impl Measurement {
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }
}

/// Projective measurement of one tensor factor.
pub fn measure_projective(rho: &DensityMatrix, projectors: &[Operator], factor: usize) -> Result<Measurement> {
    let dims = rho.dims();
    check_factors(dims, &[factor])?;
    let d = dims[factor];
    let mut sum = CMatrix::zeros(d, d);
    let mut dev: f64 = 0.0;
    for (i, p) in projectors.iter().enumerate() {
        if p.nrows() != d || p.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "projector {i} is {}x{}, factor has dimension {d}",
                p.nrows(),
                p.ncols()
            )));
        }
        sum += p.matrix();
        for (j, q) in projectors.iter().enumerate() {
            let prod = p.matrix() * q.matrix();
            let expect = if i == j { p.matrix().clone() } else { CMatrix::zeros(d, d) };
            dev = dev.max(max_abs(&(prod - expect)));
        }
    }
    dev = dev.max(max_abs(&(sum - CMatrix::identity(d, d))));
    if dev > TOL {
        return Err(Error::IncompleteProjectors(dev));
    }

    let mut outcomes = Vec::new();
    let mut dropped = Vec::new();
    for (i, p) in projectors.iter().enumerate() {
        let post = conjugate_local(p.matrix(), rho.matrix(), dims, &[factor]);
        let prob = post.trace().re;
        if prob < ZERO_PROB {
            dropped.push(i);
            continue;
        }
        let state = hermitize(post.map(|z| z / prob));
        let state = DensityMatrix::after_positive_map(Operator::from_parts(state, dims.to_vec(), dims.to_vec()))?;
        outcomes.push(MeasurementOutcome {
            outcome: i,
            probability: prob,
            state,
        });
    }
    Ok(Measurement { outcomes, dropped })
}

/// Computational-basis projectors `{|0⟩⟨0|, |1⟩⟨1|}`.
pub fn z_basis() -> Vec<Operator> {
    vec![Operator::projector(&Ket::zero()), Operator::projector(&Ket::one())]
}

/// Fourier-basis projectors `{|+⟩⟨+|, |−⟩⟨−|}`.
pub fn x_basis() -> Vec<Operator> {
    vec![Operator::projector(&Ket::plus()), Operator::projector(&Ket::minus())]
}

/// Overlap `⟨ψ|ρ|ψ⟩`.
pub fn fidelity_pure(target: &Ket, rho: &DensityMatrix) -> Result<f64> {
    if target.dims() != rho.dims() {
        return Err(Error::DimensionMismatch(format!(
            "ket dims {:?} vs state dims {:?}",
            target.dims(),
            rho.dims()
        )));
    }
    let v = target.amplitudes();
    Ok((v.adjoint() * rho.matrix() * v)[(0, 0)].re)
}
