//! GHZ-based random-receiver protocols on top of a small LOCC runtime.
//!
//! Every tensor factor of the simulated register has an owner ([`Party`]).
//! Local events are validated against the ownership map when they are
//! constructed, so a transcript can only contain a local unitary or local
//! measurement that really is local. Operations spanning several owners must be
//! recorded as [`NonlocalOperation`]s, which a protocol has to declare up front.
//!
//! Measurements branch the simulation. With [`OutcomePolicy::Exhaustive`] every
//! outcome with non-negligible probability is followed; with
//! [`OutcomePolicy::Sample`] one outcome is drawn per measurement.

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::channels::{compose, product_kraus, PauliChannel};
use crate::error::{Error, Result};
use crate::qcore::{
    apply_kraus, fidelity_pure, measure_projective, x_basis, z_basis, Complex64, DensityMatrix, Ket, Operator, TOL,
};
use crate::qswitch::{closed_form_nxy_n, switch_generic, MAX_PARTIES};
use crate::random::{gaussian_complex, rng, SimRng};

/// Largest receiver count supported by the protocols.
pub const MAX_RECEIVERS: usize = MAX_PARTIES;
/// Largest `n` for which [`OutcomePolicy::for_receivers`] enumerates every branch.
pub const EXHAUSTIVE_MAX_N: usize = 4;
/// Largest `n` for which the SWITCH protocol cross-checks the closed form against the Kraus construction.
pub const GENERIC_CHECK_MAX_N: usize = 3;

/// Single-qubit message `α|0⟩ + β|1⟩`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct MessageState {
    alpha: Complex64,
    beta: Complex64,
}

impl MessageState {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { alpha, beta })
    }

    /// Rescales to unit norm; also returns the norm of the input.
    pub fn normalized(alpha: Complex64, beta: Complex64) -> Result<(Self, f64)> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotNormalized(norm));
        }
        Ok((
            Self {
                alpha: alpha / norm,
                beta: beta / norm,
            },
            norm,
        ))
    }

    pub fn zero() -> Self {
        Self {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    pub fn one() -> Self {
        Self {
            alpha: Complex64::new(0.0, 0.0),
            beta: Complex64::new(1.0, 0.0),
        }
    }

    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            alpha: Complex64::new(h, 0.0),
            beta: Complex64::new(h, 0.0),
        }
    }

    /// Haar-random qubit: a normalized pair of independent standard complex Gaussians.
    pub fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let (a, b) = (gaussian_complex(rng), gaussian_complex(rng));
        Self::normalized(a, b).expect("non-zero with probability one").0
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn ket(&self) -> Ket {
        Ket::new(vec![self.alpha, self.beta], vec![2]).expect("normalized")
    }
}

/// A participant owning some tensor factors. Receivers are numbered from 1.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    Sender,
    Receiver(usize),
    ControlHolder,
    ThirdParty,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Sender => f.write_str("sender"),
            Party::Receiver(i) => write!(f, "B{i}"),
            Party::ControlHolder => f.write_str("control-holder"),
            Party::ThirdParty => f.write_str("third-party"),
        }
    }
}

impl Serialize for Party {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Owner of every tensor factor; ownership is exclusive by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Ownership {
    owners: Vec<Party>,
}

impl Ownership {
    pub fn new(owners: Vec<Party>) -> Self {
        Self { owners }
    }

    pub fn owner(&self, factor: usize) -> Option<Party> {
        self.owners.get(factor).copied()
    }

    pub fn factors(&self) -> usize {
        self.owners.len()
    }

    pub fn owned_by(&self, party: Party) -> Vec<usize> {
        (0..self.owners.len()).filter(|&f| self.owners[f] == party).collect()
    }

    fn transfer(&mut self, factor: usize, to: Party) {
        self.owners[factor] = to;
    }

    /// Fails unless `party` owns every factor in `factors`.
    pub fn check_local(&self, party: Party, factors: &[usize]) -> Result<()> {
        let foreign: Vec<usize> = factors
            .iter()
            .copied()
            .filter(|&f| self.owner(f) != Some(party))
            .collect();
        if foreign.is_empty() && !factors.is_empty() {
            Ok(())
        } else {
            Err(Error::LocalityViolation {
                party: party.to_string(),
                factors: if foreign.is_empty() { factors.to_vec() } else { foreign },
            })
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    Computational,
    /// `{|+⟩, |−⟩}`; outcome 0 is `+`.
    Fourier,
}

impl Basis {
    pub fn projectors(self) -> Vec<Operator> {
        match self {
            Basis::Computational => z_basis(),
            Basis::Fourier => x_basis(),
        }
    }
}

fn check_operator_dims(op: &Operator, factors: &[usize]) -> Result<()> {
    let expect = vec![2; factors.len()];
    if op.row_dims() != expect || op.col_dims() != expect {
        return Err(Error::DimensionMismatch(format!(
            "operator dims {:?} on {} qubit factor(s)",
            op.row_dims(),
            factors.len()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalUnitary {
    party: Party,
    factors: Vec<usize>,
    label: String,
    #[serde(skip)]
    operator: Operator,
}

impl LocalUnitary {
    /// Fails with [`Error::LocalityViolation`] if `party` does not own all `factors`.
    pub fn new(party: Party, factors: Vec<usize>, label: &str, operator: Operator, ownership: &Ownership) -> Result<Self> {
        ownership.check_local(party, &factors)?;
        check_operator_dims(&operator, &factors)?;
        Ok(Self {
            party,
            factors,
            label: label.to_string(),
            operator,
        })
    }

    pub fn party(&self) -> Party {
        self.party
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalMeasurement {
    party: Party,
    factor: usize,
    basis: Basis,
    outcome: usize,
}

impl LocalMeasurement {
    pub fn new(party: Party, factor: usize, basis: Basis, outcome: usize, ownership: &Ownership) -> Result<Self> {
        ownership.check_local(party, &[factor])?;
        Ok(Self {
            party,
            factor,
            basis,
            outcome,
        })
    }

    pub fn party(&self) -> Party {
        self.party
    }

    pub fn factor(&self) -> usize {
        self.factor
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn outcome(&self) -> usize {
        self.outcome
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalMessage {
    pub from: Party,
    pub to: Vec<Party>,
    pub bits: Vec<u8>,
}

/// An operation across several owners, performed by `actor`. Always flagged.
#[derive(Clone, Debug, Serialize)]
pub struct NonlocalOperation {
    actor: Party,
    factors: Vec<usize>,
    owners: Vec<Party>,
    label: String,
    flagged: bool,
    #[serde(skip)]
    operator: Operator,
}

impl NonlocalOperation {
    pub fn actor(&self) -> Party {
        self.actor
    }

    pub fn owners(&self) -> &[Party] {
        &self.owners
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn flagged(&self) -> bool {
        self.flagged
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }
}

/// Qubits sent through a channel and handed to new owners.
#[derive(Clone, Debug, Serialize)]
pub struct Transmission {
    pub channel: String,
    pub routes: Vec<(usize, Party)>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Event {
    LocalUnitary(LocalUnitary),
    LocalMeasurement(LocalMeasurement),
    ClassicalMessage(ClassicalMessage),
    NonlocalOperation(NonlocalOperation),
    Transmission(Transmission),
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Transcript {
    declares_nonlocal: bool,
    events: Vec<Event>,
}

impl Transcript {
    pub fn new(declares_nonlocal: bool) -> Self {
        Self {
            declares_nonlocal,
            events: Vec::new(),
        }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn declares_nonlocal(&self) -> bool {
        self.declares_nonlocal
    }

    pub fn push(&mut self, event: Event) -> Result<()> {
        if matches!(event, Event::NonlocalOperation(_)) && !self.declares_nonlocal {
            return Err(Error::UndeclaredNonlocal);
        }
        self.events.push(event);
        Ok(())
    }

    pub fn nonlocal_operations(&self) -> impl Iterator<Item = &NonlocalOperation> {
        self.events.iter().filter_map(|e| match e {
            Event::NonlocalOperation(op) => Some(op),
            _ => None,
        })
    }

    pub fn classical_messages(&self) -> impl Iterator<Item = &ClassicalMessage> {
        self.events.iter().filter_map(|e| match e {
            Event::ClassicalMessage(m) => Some(m),
            _ => None,
        })
    }

    /// Total number of classical bits sent by `party`.
    pub fn bits_sent_by(&self, party: Party) -> usize {
        self.classical_messages()
            .filter(|m| m.from == party)
            .map(|m| m.bits.len())
            .sum()
    }

    /// True when every local event touches only factors its party owned at the time.
    pub fn is_pure_locc(&self) -> bool {
        self.nonlocal_operations().next().is_none()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasurementRecord {
    pub party: Party,
    pub factor: usize,
    pub basis: Basis,
    pub outcome: usize,
    pub probability: f64,
}

/// The simulated register together with ownership and transcript along one branch.
#[derive(Clone, Debug)]
pub struct LoccSystem {
    state: DensityMatrix,
    ownership: Ownership,
    transcript: Transcript,
    outcomes: Vec<MeasurementRecord>,
    probability: f64,
}

impl LoccSystem {
    pub fn new(state: DensityMatrix, owners: Vec<Party>, declares_nonlocal: bool) -> Result<Self> {
        if owners.len() != state.dims().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} owners for {} factors",
                owners.len(),
                state.dims().len()
            )));
        }
        Ok(Self {
            state,
            ownership: Ownership::new(owners),
            transcript: Transcript::new(declares_nonlocal),
            outcomes: Vec::new(),
            probability: 1.0,
        })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn ownership(&self) -> &Ownership {
        &self.ownership
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn outcomes(&self) -> &[MeasurementRecord] {
        &self.outcomes
    }

    pub fn probability(&self) -> f64 {
        self.probability
    }

    pub fn local_unitary(&mut self, party: Party, factors: &[usize], label: &str, op: &Operator) -> Result<()> {
        let event = LocalUnitary::new(party, factors.to_vec(), label, op.clone(), &self.ownership)?;
        self.state = self.state.apply_unitary(op, factors)?;
        self.transcript.push(Event::LocalUnitary(event))
    }

    pub fn nonlocal(&mut self, actor: Party, factors: &[usize], label: &str, op: &Operator) -> Result<()> {
        if !self.transcript.declares_nonlocal {
            return Err(Error::UndeclaredNonlocal);
        }
        check_operator_dims(op, factors)?;
        let owners = factors
            .iter()
            .map(|&f| {
                self.ownership.owner(f).ok_or(Error::FactorOutOfRange {
                    index: f,
                    count: self.ownership.factors(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        self.state = self.state.apply_unitary(op, factors)?;
        self.transcript.push(Event::NonlocalOperation(NonlocalOperation {
            actor,
            factors: factors.to_vec(),
            owners,
            label: label.to_string(),
            flagged: true,
            operator: op.clone(),
        }))
    }

    pub fn send(&mut self, from: Party, to: Vec<Party>, bits: Vec<u8>) -> Result<()> {
        self.transcript
            .push(Event::ClassicalMessage(ClassicalMessage { from, to, bits }))
    }

    /// Applies a channel to the whole register and reassigns the routed factors.
    pub fn transmit(&mut self, channel: &str, routes: Vec<(usize, Party)>, state: DensityMatrix) -> Result<()> {
        if state.dims() != self.state.dims() {
            return Err(Error::DimensionMismatch("channel changed the register layout".into()));
        }
        for &(f, to) in &routes {
            if f >= self.ownership.factors() {
                return Err(Error::FactorOutOfRange {
                    index: f,
                    count: self.ownership.factors(),
                });
            }
            self.ownership.transfer(f, to);
        }
        self.state = state;
        self.transcript.push(Event::Transmission(Transmission {
            channel: channel.to_string(),
            routes,
        }))
    }

    /// All post-measurement branches with non-negligible probability.
    pub fn measure(&self, party: Party, factor: usize, basis: Basis) -> Result<Vec<LoccSystem>> {
        self.ownership.check_local(party, &[factor])?;
        let m = measure_projective(&self.state, &basis.projectors(), factor)?;
        m.outcomes
            .into_iter()
            .map(|o| {
                let mut next = self.clone();
                let event = LocalMeasurement::new(party, factor, basis, o.outcome, &self.ownership)?;
                next.transcript.push(Event::LocalMeasurement(event))?;
                next.state = o.state;
                next.probability *= o.probability;
                next.outcomes.push(MeasurementRecord {
                    party,
                    factor,
                    basis,
                    outcome: o.outcome,
                    probability: o.probability,
                });
                Ok(next)
            })
            .collect()
    }

    fn last_outcome(&self) -> usize {
        self.outcomes.last().map_or(0, |r| r.outcome)
    }
}

/// How measurement outcomes are explored.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomePolicy {
    Exhaustive,
    Sample(u64),
}

impl OutcomePolicy {
    /// Exhaustive up to [`EXHAUSTIVE_MAX_N`] receivers, seeded sampling beyond.
    pub fn for_receivers(n: usize, seed: u64) -> Self {
        if n <= EXHAUSTIVE_MAX_N {
            OutcomePolicy::Exhaustive
        } else {
            OutcomePolicy::Sample(seed)
        }
    }
}

enum Brancher {
    All,
    One(Box<SimRng>),
}

impl Brancher {
    fn new(policy: OutcomePolicy) -> Self {
        match policy {
            OutcomePolicy::Exhaustive => Brancher::All,
            OutcomePolicy::Sample(seed) => Brancher::One(Box::new(rng(seed))),
        }
    }

    fn measure(&mut self, frontier: Vec<LoccSystem>, party: Party, factor: usize, basis: Basis) -> Result<Vec<LoccSystem>> {
        let mut out = Vec::new();
        for sys in frontier {
            let mut branches = sys.measure(party, factor, basis)?;
            match self {
                Brancher::All => out.append(&mut branches),
                Brancher::One(r) => {
                    let total: f64 = branches.iter().map(|b| b.outcomes.last().map_or(0.0, |o| o.probability)).sum();
                    let mut u = r.random::<f64>() * total;
                    let mut pick = branches.len() - 1;
                    for (i, b) in branches.iter().enumerate() {
                        let p = b.outcomes.last().map_or(0.0, |o| o.probability);
                        if u < p {
                            pick = i;
                            break;
                        }
                        u -= p;
                    }
                    out.push(branches.swap_remove(pick));
                }
            }
        }
        Ok(out)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolVariant {
    Noiseless,
    Switch,
    Baseline,
    ControlledOps,
}

impl ProtocolVariant {
    /// True for the variants that are expected to deliver the message perfectly.
    pub fn is_perfect(self) -> bool {
        !matches!(self, ProtocolVariant::Baseline)
    }
}

/// Outcome of one measurement branch.
#[derive(Clone, Debug)]
pub struct ProtocolResult {
    pub fidelity: f64,
    pub probability: f64,
    pub transcript: Transcript,
    pub outcome_branch: Vec<MeasurementRecord>,
    pub final_state: DensityMatrix,
}

/// All explored branches of one protocol run.
#[derive(Clone, Debug)]
pub struct ProtocolRun {
    pub variant: ProtocolVariant,
    pub n: usize,
    pub x: usize,
    pub message: MessageState,
    pub branches: Vec<ProtocolResult>,
}

impl ProtocolRun {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    pub fn min_fidelity(&self) -> f64 {
        self.branches.iter().map(|b| b.fidelity).fold(f64::INFINITY, f64::min)
    }

    pub fn max_fidelity(&self) -> f64 {
        self.branches.iter().map(|b| b.fidelity).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Probability-weighted fidelity over the explored branches.
    pub fn mean_fidelity(&self) -> f64 {
        let total = self.total_probability();
        self.branches.iter().map(|b| b.probability * b.fidelity).sum::<f64>() / total
    }
}

fn check_nx(n: usize, x: usize) -> Result<()> {
    if !(1..=MAX_RECEIVERS).contains(&n) {
        return Err(Error::OutOfRange {
            what: "n",
            value: n,
            min: 1,
            max: MAX_RECEIVERS,
        });
    }
    if !(1..=n).contains(&x) {
        return Err(Error::OutOfRange {
            what: "x",
            value: x,
            min: 1,
            max: n,
        });
    }
    Ok(())
}

/// `α|0⟩^⊗n + β|1⟩^⊗n`.
pub fn ghz_encode(msg: &MessageState, n: usize) -> Result<Ket> {
    if !(1..=MAX_RECEIVERS).contains(&n) {
        return Err(Error::OutOfRange {
            what: "n",
            value: n,
            min: 1,
            max: MAX_RECEIVERS,
        });
    }
    let d = 1usize << n;
    let mut amps = vec![Complex64::new(0.0, 0.0); d];
    amps[0] = msg.alpha;
    amps[d - 1] += msg.beta;
    Ket::new(amps, vec![2; n])
}

fn receivers_route(n: usize) -> Vec<(usize, Party)> {
    (0..n).map(|k| (k, Party::Receiver(k + 1))).collect()
}

/// Parties `y ≠ x` measure their share in the Fourier basis and report to `x`,
/// who applies `Z^s` with `s` the parity of the reported outcomes.
/// `share(y)` gives the factor holding receiver `y`'s GHZ share.
fn retrieval_tail(
    frontier: Vec<LoccSystem>,
    n: usize,
    x: usize,
    brancher: &mut Brancher,
    share: impl Fn(usize) -> usize,
) -> Result<Vec<LoccSystem>> {
    let mut frontier = frontier;
    for y in (1..=n).filter(|&y| y != x) {
        frontier = brancher.measure(frontier, Party::Receiver(y), share(y), Basis::Fourier)?;
        for sys in &mut frontier {
            let o = sys.last_outcome() as u8;
            sys.send(Party::Receiver(y), vec![Party::Receiver(x)], vec![o])?;
        }
    }
    let z = Operator::pauli_z();
    for sys in &mut frontier {
        let start = sys.outcomes.len() - (n - 1);
        let s = sys.outcomes[start..].iter().map(|r| r.outcome).sum::<usize>() % 2;
        if s == 1 {
            sys.local_unitary(Party::Receiver(x), &[share(x)], "Z", &z)?;
        }
    }
    Ok(frontier)
}

fn finish(
    variant: ProtocolVariant,
    msg: &MessageState,
    n: usize,
    x: usize,
    frontier: Vec<LoccSystem>,
    target_factor: usize,
) -> Result<ProtocolRun> {
    let target = msg.ket();
    let branches = frontier
        .into_iter()
        .map(|sys| {
            let final_state = sys.state.partial_trace(&[target_factor])?;
            let fidelity = fidelity_pure(&target, &final_state)?;
            Ok(ProtocolResult {
                fidelity,
                probability: sys.probability,
                transcript: sys.transcript,
                outcome_branch: sys.outcomes,
                final_state,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProtocolRun {
        variant,
        n,
        x,
        message: *msg,
        branches,
    })
}

/// Noiseless channels: GHZ encoding, Fourier measurements by the other receivers, `Z^s` at `x`.
pub fn run_noiseless_protocol(msg: &MessageState, n: usize, x: usize, policy: OutcomePolicy) -> Result<ProtocolRun> {
    check_nx(n, x)?;
    let ghz = ghz_encode(msg, n)?.to_density();
    let mut sys = LoccSystem::new(ghz.clone(), vec![Party::Sender; n], false)?;
    sys.transmit("identity", receivers_route(n), ghz)?;
    let mut brancher = Brancher::new(policy);
    let frontier = retrieval_tail(vec![sys], n, x, &mut brancher, |y| y - 1)?;
    finish(ProtocolVariant::Noiseless, msg, n, x, frontier, x - 1)
}

/// GHZ state sent through `N_XY^⊗n` twice in a superposition of orders. The
/// control holder measures the order qubit in the Fourier basis and broadcasts
/// the outcome; on `−` receiver 1 applies `Z`, then the noiseless retrieval runs.
pub fn run_switch_protocol(msg: &MessageState, n: usize, x: usize, policy: OutcomePolicy) -> Result<ProtocolRun> {
    check_nx(n, x)?;
    let ghz = ghz_encode(msg, n)?.to_density();
    let omega = Ket::plus().to_density();
    let switched = closed_form_nxy_n(n)?;
    let out = switched.apply(&ghz)?;
    if n <= GENERIC_CHECK_MAX_N {
        let kraus = product_kraus(&vec![PauliChannel::nxy(); n]);
        let generic = switch_generic(&kraus, &kraus, &ghz, &omega)?;
        let dev = generic.distance(&out);
        if dev > TOL {
            return Err(Error::Numerical(format!(
                "closed-form switched channel deviates from the Kraus construction by {dev:e}"
            )));
        }
    }

    let mut owners = vec![Party::Sender; n];
    owners.push(Party::ControlHolder);
    let initial = ghz.tensor(&omega);
    let mut sys = LoccSystem::new(initial, owners, false)?;
    sys.transmit(&format!("SWITCH(N_XY^{n}, N_XY^{n})"), receivers_route(n), out)?;

    let mut brancher = Brancher::new(policy);
    let control = n;
    let mut frontier = brancher.measure(vec![sys], Party::ControlHolder, control, Basis::Fourier)?;
    let everyone: Vec<Party> = (1..=n).map(Party::Receiver).collect();
    let z = Operator::pauli_z();
    for sys in &mut frontier {
        let bit = sys.last_outcome() as u8;
        sys.send(Party::ControlHolder, everyone.clone(), vec![bit])?;
        if bit == 1 {
            sys.local_unitary(Party::Receiver(1), &[0], "Z", &z)?;
        }
    }
    let frontier = retrieval_tail(frontier, n, x, &mut brancher, |y| y - 1)?;
    finish(ProtocolVariant::Switch, msg, n, x, frontier, x - 1)
}

/// Same pipeline without the order qubit: every qubit goes through `N_XY` twice
/// in a fixed order, i.e. through full dephasing.
pub fn run_definite_order_baseline(msg: &MessageState, n: usize, x: usize) -> Result<ProtocolRun> {
    run_definite_order_baseline_with(msg, n, x, OutcomePolicy::Exhaustive)
}

pub fn run_definite_order_baseline_with(
    msg: &MessageState,
    n: usize,
    x: usize,
    policy: OutcomePolicy,
) -> Result<ProtocolRun> {
    check_nx(n, x)?;
    let ghz = ghz_encode(msg, n)?.to_density();
    let cascade = compose(&PauliChannel::nxy(), &PauliChannel::nxy());
    let out = apply_kraus(&ghz, &product_kraus(&vec![cascade; n]))?;
    let mut sys = LoccSystem::new(ghz, vec![Party::Sender; n], false)?;
    sys.transmit(&format!("(N_XY N_XY)^{n}"), receivers_route(n), out)?;
    let mut brancher = Brancher::new(policy);
    let frontier = retrieval_tail(vec![sys], n, x, &mut brancher, |y| y - 1)?;
    finish(ProtocolVariant::Baseline, msg, n, x, frontier, x - 1)
}

/// Controlled operations in a definite order. The control qubit (last factor,
/// prepared in `|+⟩`) flips the message; the message and `n − 1` ancillas go
/// through `(N_XY N_XY)^⊗n`; a third party applies CNOTs from the control onto
/// the ancillas and hands the control to receiver 1; receiver 1 measures the
/// dephased message qubit and broadcasts it, and on outcome 1 every GHZ share
/// is flipped. Receiver 1's GHZ share is the control qubit.
pub fn run_controlled_ops_protocol(msg: &MessageState, n: usize, x: usize) -> Result<ProtocolRun> {
    run_controlled_ops_protocol_with(msg, n, x, OutcomePolicy::Exhaustive)
}

pub fn run_controlled_ops_protocol_with(
    msg: &MessageState,
    n: usize,
    x: usize,
    policy: OutcomePolicy,
) -> Result<ProtocolRun> {
    check_nx(n, x)?;
    let control = n;
    let mut register = msg.ket();
    for _ in 1..n {
        register = register.tensor(&Ket::zero());
    }
    let initial = register.tensor(&Ket::plus()).to_density();
    let mut sys = LoccSystem::new(initial, vec![Party::Sender; n + 1], true)?;
    let cnot = Operator::cnot();
    sys.local_unitary(Party::Sender, &[control, 0], "CNOT", &cnot)?;

    let cascade = compose(&PauliChannel::nxy(), &PauliChannel::nxy());
    let mut per_factor = vec![cascade; n];
    per_factor.push(PauliChannel::identity());
    let out = apply_kraus(sys.state(), &product_kraus(&per_factor))?;
    let mut routes = receivers_route(n);
    routes.push((control, Party::ThirdParty));
    sys.transmit(&format!("(N_XY N_XY)^{n}"), routes, out)?;

    for k in 1..n {
        sys.nonlocal(Party::ThirdParty, &[control, k], "CNOT", &cnot)?;
    }
    let state = sys.state().clone();
    sys.transmit("identity", vec![(control, Party::Receiver(1))], state)?;

    let mut brancher = Brancher::new(policy);
    let mut frontier = brancher.measure(vec![sys], Party::Receiver(1), 0, Basis::Computational)?;
    let x_gate = Operator::pauli_x();
    for sys in &mut frontier {
        let bit = sys.last_outcome() as u8;
        let others: Vec<Party> = (2..=n).map(Party::Receiver).collect();
        if !others.is_empty() {
            sys.send(Party::Receiver(1), others, vec![bit])?;
        }
        if bit == 1 {
            for k in 1..n {
                sys.local_unitary(Party::Receiver(k + 1), &[k], "X", &x_gate)?;
            }
            sys.local_unitary(Party::Receiver(1), &[control], "X", &x_gate)?;
        }
    }
    let share = move |y: usize| if y == 1 { control } else { y - 1 };
    let frontier = retrieval_tail(frontier, n, x, &mut brancher, share)?;
    finish(ProtocolVariant::ControlledOps, msg, n, x, frontier, share(x))
}

pub fn run_protocol(
    variant: ProtocolVariant,
    msg: &MessageState,
    n: usize,
    x: usize,
    policy: OutcomePolicy,
) -> Result<ProtocolRun> {
    match variant {
        ProtocolVariant::Noiseless => run_noiseless_protocol(msg, n, x, policy),
        ProtocolVariant::Switch => run_switch_protocol(msg, n, x, policy),
        ProtocolVariant::Baseline => run_definite_order_baseline_with(msg, n, x, policy),
        ProtocolVariant::ControlledOps => run_controlled_ops_protocol_with(msg, n, x, policy),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::PauliString;
    use crate::qcore::c;
    use crate::random::rng;

    fn assert_perfect(run: &ProtocolRun) {
        assert!((run.total_probability() - 1.0).abs() < 1e-9);
        for b in &run.branches {
            assert!((b.fidelity - 1.0).abs() < 1e-9, "fidelity {} on {:?}", b.fidelity, b.outcome_branch);
        }
    }

    #[test]
    fn ghz_examples() {
        let ket = ghz_encode(&MessageState::zero(), 3).unwrap();
        assert_eq!(ket, Ket::bits(&[0, 0, 0]));
        let bell = ghz_encode(&MessageState::plus(), 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((bell.amplitudes()[0] - c(h, 0.0)).norm() < 1e-15);
        assert!((bell.amplitudes()[3] - c(h, 0.0)).norm() < 1e-15);
        assert!(ghz_encode(&MessageState::zero(), 0).is_err());
        assert!(ghz_encode(&MessageState::zero(), MAX_RECEIVERS + 1).is_err());
    }

    #[test]
    fn ghz_fixed_by_even_z_strings() {
        let msg = MessageState::haar(&mut rng(1));
        let ket = ghz_encode(&msg, 3).unwrap();
        let zzi = PauliString::z_mask(3, 0b011).operator();
        let v = zzi.matrix() * ket.amplitudes();
        assert!((v - ket.amplitudes()).norm() < 1e-15);
        let zii = PauliString::z_mask(3, 0b001).operator();
        let v = zii.matrix() * ket.amplitudes();
        assert!((v - ket.amplitudes()).norm() > 0.1);
    }

    #[test]
    fn noiseless_examples() {
        let run = run_noiseless_protocol(&MessageState::plus(), 3, 2, OutcomePolicy::Exhaustive).unwrap();
        assert_eq!(run.branches.len(), 4);
        assert_perfect(&run);
        assert!(run.branches.iter().all(|b| b.transcript.is_pure_locc()));

        let run = run_noiseless_protocol(&MessageState::zero(), 2, 1, OutcomePolicy::Exhaustive).unwrap();
        assert_perfect(&run);

        let msg = MessageState::haar(&mut rng(5));
        let run = run_noiseless_protocol(&msg, 5, 5, OutcomePolicy::Exhaustive).unwrap();
        assert_eq!(run.branches.len(), 16);
        assert_perfect(&run);
    }

    #[test]
    fn switch_examples() {
        let msg = MessageState::haar(&mut rng(2));
        let run = run_switch_protocol(&msg, 2, 1, OutcomePolicy::Exhaustive).unwrap();
        assert_eq!(run.branches.len(), 4);
        assert_perfect(&run);
        let controls: Vec<usize> = run.branches.iter().map(|b| b.outcome_branch[0].outcome).collect();
        assert!(controls.contains(&0) && controls.contains(&1));

        let run = run_switch_protocol(&MessageState::plus(), 3, 2, OutcomePolicy::Exhaustive).unwrap();
        assert_eq!(run.branches.len(), 8);
        assert_perfect(&run);
        for b in &run.branches {
            assert_eq!(b.transcript.bits_sent_by(Party::ControlHolder), 1);
            assert!(b.transcript.is_pure_locc());
        }

        for n in 1..=4 {
            for x in 1..=n {
                assert_perfect(&run_switch_protocol(&MessageState::zero(), n, x, OutcomePolicy::Exhaustive).unwrap());
            }
        }
    }

    #[test]
    fn sampled_switch_is_perfect() {
        let msg = MessageState::haar(&mut rng(3));
        let run = run_switch_protocol(&msg, 6, 4, OutcomePolicy::Sample(9)).unwrap();
        assert_eq!(run.branches.len(), 1);
        assert!((run.branches[0].fidelity - 1.0).abs() < 1e-9);
        let again = run_switch_protocol(&msg, 6, 4, OutcomePolicy::Sample(9)).unwrap();
        let outcomes = |r: &ProtocolRun| r.branches[0].outcome_branch.iter().map(|o| o.outcome).collect::<Vec<_>>();
        assert_eq!(outcomes(&run), outcomes(&again));
    }

    #[test]
    fn baseline_examples() {
        let run = run_definite_order_baseline(&MessageState::plus(), 2, 1).unwrap();
        assert!((run.mean_fidelity() - 0.5).abs() < 1e-9);
        assert!((run.min_fidelity() - 0.5).abs() < 1e-9);
        let run = run_definite_order_baseline(&MessageState::zero(), 3, 2).unwrap();
        assert!((run.min_fidelity() - 1.0).abs() < 1e-9);
        // |α|⁴ + |β|⁴ for (0.6, 0.8)
        let msg = MessageState::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let run = run_definite_order_baseline(&msg, 2, 2).unwrap();
        assert!((run.mean_fidelity() - (0.1296 + 0.4096)).abs() < 1e-9);
    }

    #[test]
    fn controlled_ops_examples() {
        let msg = MessageState::haar(&mut rng(4));
        let run = run_controlled_ops_protocol(&msg, 2, 2).unwrap();
        assert_perfect(&run);
        assert_perfect(&run_controlled_ops_protocol(&MessageState::zero(), 3, 3).unwrap());
        let run = run_controlled_ops_protocol(&MessageState::plus(), 3, 1).unwrap();
        assert_perfect(&run);
        for b in &run.branches {
            let ops: Vec<_> = b.transcript.nonlocal_operations().collect();
            assert_eq!(ops.len(), 2);
            assert!(ops.iter().all(|o| o.flagged() && o.label() == "CNOT" && o.actor() == Party::ThirdParty));
        }
        assert_perfect(&run_controlled_ops_protocol(&msg, 1, 1).unwrap());
    }

    #[test]
    fn invalid_receiver_index() {
        let msg = MessageState::plus();
        assert!(matches!(
            run_noiseless_protocol(&msg, 3, 0, OutcomePolicy::Exhaustive),
            Err(Error::OutOfRange { what: "x", .. })
        ));
        assert!(run_switch_protocol(&msg, 3, 4, OutcomePolicy::Exhaustive).is_err());
        assert!(run_definite_order_baseline(&msg, 0, 1).is_err());
        assert!(run_controlled_ops_protocol(&msg, 7, 1).is_err());
    }

    #[test]
    fn locality_is_enforced() {
        let own = Ownership::new(vec![Party::Receiver(1), Party::Receiver(2)]);
        let err = LocalUnitary::new(Party::Receiver(1), vec![0, 1], "CNOT", Operator::cnot(), &own).unwrap_err();
        assert!(matches!(err, Error::LocalityViolation { ref factors, .. } if factors == &vec![1]));
        assert!(LocalUnitary::new(Party::Receiver(1), vec![0], "X", Operator::pauli_x(), &own).is_ok());
        assert!(LocalMeasurement::new(Party::Receiver(2), 0, Basis::Fourier, 0, &own).is_err());

        let mut sys = LoccSystem::new(DensityMatrix::maximally_mixed(&[2, 2]), vec![Party::Receiver(1), Party::Receiver(2)], false).unwrap();
        assert_eq!(
            sys.nonlocal(Party::ThirdParty, &[0, 1], "CNOT", &Operator::cnot()).unwrap_err(),
            Error::UndeclaredNonlocal
        );
        assert!(sys.local_unitary(Party::Receiver(2), &[0], "Z", &Operator::pauli_z()).is_err());
    }

    #[test]
    fn message_normalization() {
        assert!(MessageState::new(c(1.0, 0.0), c(1.0, 0.0)).is_err());
        let (m, norm) = MessageState::normalized(c(3.0, 0.0), c(0.0, 4.0)).unwrap();
        assert!((norm - 5.0).abs() < 1e-15);
        assert!((m.alpha() - c(0.6, 0.0)).norm() < 1e-15);
        assert!(MessageState::normalized(c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }
}
