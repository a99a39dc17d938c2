//! Command-line front end.
//!
//! Every command produces one report that can be rendered as JSON, CSV or text.
//! JSON reports have the shape
//! `{schema_version, version, command, config, records, summary}`; complex
//! numbers are `[re, im]` pairs. The same flags and seed give byte-identical JSON.
//!
//! Exit status: 0 all checks pass, 1 usage error, 2 check failed,
//! 3 numerical validity violation.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::channels::{choi, is_entanglement_breaking_qubit, PauliChannel};
use crate::error::Error;
use crate::nogo::fixed_bit_scan;
use crate::protocols::{
    run_definite_order_baseline, run_protocol, MeasurementRecord, MessageState, OutcomePolicy, ProtocolRun,
    ProtocolVariant, Transcript,
};
use crate::qcore::{c, serialize_complex, Complex64};
use crate::qswitch::{validate_closed_forms_for, ChannelFamily, ValidationReport};
use crate::random::rng;

pub const SCHEMA_VERSION: u32 = 1;
/// Deviation from unit norm above which a message is normalized with a warning.
pub const NORMALIZE_WARN: f64 = 1e-6;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_CHECK_FAILED: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

const PROTOCOL_CSV: &str =
    "case,variant,n,x,message,alpha_re,alpha_im,beta_re,beta_im,branch,outcomes,probability,fidelity";
const VALIDATE_CSV: &str = "n,trial,family,channels,deviation";
const NOGO_CSV: &str = "n,tau,bits,alternating_even_cycles";
const EB_CSV: &str = "channel,w_i,w_x,w_y,w_z,entanglement_breaking,min_pt_eigenvalue";
const SWEEP_CSV: &str = "n,x,samples,mean_fidelity,min_fidelity,max_fidelity,plus_fidelity";

#[derive(Parser, Debug)]
#[command(name = "rrqc", version, about = "Random-receiver quantum communication simulator")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Absolute tolerance for every pass/fail check.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Include full event transcripts for every branch.
    #[arg(long, global = true)]
    pub transcript: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a random-receiver protocol for every (message, x) case.
    ///
    /// CSV columns: case, variant, n, x, message, alpha_re, alpha_im, beta_re,
    /// beta_im, branch, outcomes (';'-separated measurement outcomes), probability, fidelity.
    /// One row per (case, branch).
    Protocol(ProtocolArgs),
    /// Compare closed-form switched channels with the Kraus construction.
    ///
    /// CSV columns: n, trial, family, channels ('|'-separated qubits, ';'-separated
    /// weights I;X;Y;Z), deviation.
    ValidateSwitch(ValidateArgs),
    /// Exhaustive fixed-bit scan over permutations and bitstrings.
    ///
    /// CSV columns: n, tau (1-based images, ';'-separated), bits, alternating_even_cycles.
    /// One row per counterexample.
    NogoScan(NogoArgs),
    /// PPT test for entanglement breaking of a single-qubit Pauli channel.
    ///
    /// CSV columns: channel, w_i, w_x, w_y, w_z, entanglement_breaking, min_pt_eigenvalue.
    EbCheck(EbArgs),
    /// Definite-order baseline fidelity over Haar-random messages for a range of n.
    ///
    /// CSV columns: n, x, samples, mean_fidelity, min_fidelity, max_fidelity, plus_fidelity.
    BaselineSweep(SweepArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    /// Exhaustive up to n = 4, sampled beyond.
    Auto,
    Exhaustive,
    Sample,
}

#[derive(Args, Debug, Clone)]
pub struct ProtocolArgs {
    #[arg(long, value_enum)]
    pub variant: VariantArg,
    #[arg(long)]
    pub n: usize,
    /// Receiver index (1-based) or ALL.
    #[arg(long, default_value = "ALL")]
    pub x: String,
    /// `alpha,beta` as complex literals (`0.6,0.8i`, `1+2i,-i`) or `HAAR(count)`.
    #[arg(long, default_value = "HAAR(1)")]
    pub message: String,
    #[arg(long, value_enum, default_value_t = PolicyArg::Auto)]
    pub policy: PolicyArg,
    /// Check the mean fidelity over all cases against this value.
    #[arg(long)]
    pub expect_fidelity: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Noiseless,
    Switch,
    Baseline,
    ControlledOps,
}

impl From<VariantArg> for ProtocolVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Noiseless => ProtocolVariant::Noiseless,
            VariantArg::Switch => ProtocolVariant::Switch,
            VariantArg::Baseline => ProtocolVariant::Baseline,
            VariantArg::ControlledOps => ProtocolVariant::ControlledOps,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct ValidateArgs {
    /// Number of qubits per channel use; defaults to 1, 2 and 3.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = FamilyArg::Random)]
    pub channels: FamilyArg,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Random,
    Identity,
    Nxy,
}

impl From<FamilyArg> for ChannelFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Random => ChannelFamily::Random,
            FamilyArg::Identity => ChannelFamily::Identity,
            FamilyArg::Nxy => ChannelFamily::Nxy,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct NogoArgs {
    #[arg(long)]
    pub n: usize,
}

#[derive(Args, Debug, Clone)]
pub struct EbArgs {
    /// Pauli weights `w_I,w_X,w_Y,w_Z`.
    #[arg(long, conflicts_with = "channel")]
    pub weights: Option<String>,
    #[arg(long, value_enum)]
    pub channel: Option<NamedChannel>,
    /// Fail unless the verdict matches.
    #[arg(long, value_enum)]
    pub expect: Option<EbExpect>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum NamedChannel {
    Nxy,
    Identity,
    Dephasing,
    Uniform,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum EbExpect {
    Eb,
    NotEb,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    /// Haar-random messages per n.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

/// A rendered command result.
pub struct Outcome {
    pub json: Value,
    pub csv: String,
    pub text: String,
    pub passed: bool,
}

/// Command failure with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::OutOfRange { .. } | Error::InvalidWeights(_) | Error::InvalidPermutation(_) => EXIT_USAGE,
            _ => EXIT_NUMERICAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Parses a complex literal such as `0.6`, `-0.8i`, `i`, `1+2i` or `1e-3-2.5i`.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s: String = s.chars().filter(|ch| !ch.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().ok().filter(|v| v.is_finite()).map(|re| c(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> Option<f64> {
        match t {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => t.parse::<f64>().ok(),
        }
    };
    let (re, im) = match split {
        Some(k) => (body[..k].parse::<f64>().ok()?, imag(&body[k..])?),
        None => (0.0, imag(body)?),
    };
    (re.is_finite() && im.is_finite()).then(|| c(re, im))
}

/// Messages from `alpha,beta` or `HAAR(count)`, with a flag per message that was renormalized.
pub fn parse_messages(spec: &str, seed: u64) -> Result<Vec<(MessageState, bool)>, Failure> {
    let t = spec.trim();
    if let Some(count) = t.strip_prefix("HAAR(").and_then(|r| r.strip_suffix(')')) {
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("invalid HAAR count in {spec:?}")))?;
        if count == 0 {
            return Err(Failure::usage("HAAR count must be positive"));
        }
        let mut r = rng(seed);
        return Ok((0..count).map(|_| (MessageState::haar(&mut r), false)).collect());
    }
    let parts: Vec<&str> = t.split(',').collect();
    let [a, b] = parts[..] else {
        return Err(Failure::usage(format!("message {spec:?} is not `alpha,beta` or HAAR(count)")));
    };
    let alpha = parse_complex(a).ok_or_else(|| Failure::usage(format!("invalid complex literal {a:?}")))?;
    let beta = parse_complex(b).ok_or_else(|| Failure::usage(format!("invalid complex literal {b:?}")))?;
    let (msg, norm) = MessageState::normalized(alpha, beta).map_err(|_| Failure::usage("message has zero norm"))?;
    Ok(vec![(msg, (norm - 1.0).abs() > NORMALIZE_WARN)])
}

fn parse_x(spec: &str, n: usize) -> Result<Vec<usize>, Failure> {
    if spec.eq_ignore_ascii_case("all") {
        return Ok((1..=n).collect());
    }
    let x: usize = spec
        .trim()
        .parse()
        .map_err(|_| Failure::usage(format!("--x must be an integer or ALL, got {spec:?}")))?;
    Ok(vec![x])
}

#[derive(Serialize)]
struct Report<'a, R: Serialize, S: Serialize> {
    schema_version: u32,
    version: &'static str,
    command: &'a str,
    config: Value,
    records: &'a [R],
    summary: S,
}

fn report<R: Serialize, S: Serialize>(command: &str, config: Value, records: &[R], summary: S) -> Value {
    serde_json::to_value(Report {
        schema_version: SCHEMA_VERSION,
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
        records,
        summary,
    })
    .expect("report is serializable")
}

#[derive(Serialize)]
struct MessageRecord {
    #[serde(serialize_with = "serialize_complex")]
    alpha: Complex64,
    #[serde(serialize_with = "serialize_complex")]
    beta: Complex64,
}

impl From<&MessageState> for MessageRecord {
    fn from(m: &MessageState) -> Self {
        Self {
            alpha: m.alpha(),
            beta: m.beta(),
        }
    }
}

#[derive(Serialize)]
struct BranchRecord {
    outcomes: Vec<MeasurementRecord>,
    probability: f64,
    fidelity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    transcript: Option<Transcript>,
}

#[derive(Serialize)]
struct CaseRecord {
    case: usize,
    message_index: usize,
    x: usize,
    message: MessageRecord,
    total_probability: f64,
    min_fidelity: f64,
    mean_fidelity: f64,
    branches: Vec<BranchRecord>,
}

#[derive(Serialize)]
struct ProtocolSummary {
    cases: usize,
    branches: usize,
    min_fidelity: f64,
    mean_fidelity: f64,
    max_fidelity: f64,
    expected_fidelity: Option<f64>,
    perfect_expected: bool,
    pass: bool,
}

fn outcome_string(outcomes: &[MeasurementRecord]) -> String {
    outcomes.iter().map(|o| o.outcome.to_string()).collect::<Vec<_>>().join(";")
}

pub fn cmd_protocol(g: &GlobalArgs, a: &ProtocolArgs) -> Result<Outcome, Failure> {
    let variant: ProtocolVariant = a.variant.into();
    let xs = parse_x(&a.x, a.n)?;
    let messages = parse_messages(&a.message, g.seed)?;
    for (i, (m, renormalized)) in messages.iter().enumerate() {
        if *renormalized {
            eprintln!(
                "warning: message {i} normalized to alpha = {}, beta = {}",
                m.alpha(),
                m.beta()
            );
        }
    }

    let mut runs: Vec<(usize, ProtocolRun)> = Vec::with_capacity(messages.len() * xs.len());
    for (mi, (msg, _)) in messages.iter().enumerate() {
        for &x in &xs {
            let case = runs.len();
            let policy = match a.policy {
                PolicyArg::Exhaustive => OutcomePolicy::Exhaustive,
                PolicyArg::Sample => OutcomePolicy::Sample(g.seed.wrapping_add(case as u64)),
                PolicyArg::Auto => OutcomePolicy::for_receivers(a.n, g.seed.wrapping_add(case as u64)),
            };
            runs.push((mi, run_protocol(variant, msg, a.n, x, policy)?));
        }
    }

    let records: Vec<CaseRecord> = runs
        .iter()
        .enumerate()
        .map(|(case, (mi, run))| CaseRecord {
            case,
            message_index: *mi,
            x: run.x,
            message: MessageRecord::from(&run.message),
            total_probability: run.total_probability(),
            min_fidelity: run.min_fidelity(),
            mean_fidelity: run.mean_fidelity(),
            branches: run
                .branches
                .iter()
                .map(|b| BranchRecord {
                    outcomes: b.outcome_branch.clone(),
                    probability: b.probability,
                    fidelity: b.fidelity,
                    transcript: g.transcript.then(|| b.transcript.clone()),
                })
                .collect(),
        })
        .collect();

    let min = records.iter().map(|r| r.min_fidelity).fold(f64::INFINITY, f64::min);
    let max = runs.iter().map(|(_, r)| r.max_fidelity()).fold(f64::NEG_INFINITY, f64::max);
    let mean = records.iter().map(|r| r.mean_fidelity).sum::<f64>() / records.len() as f64;
    let perfect = variant.is_perfect();
    let mut pass = true;
    if perfect {
        pass &= min >= 1.0 - g.tolerance;
    }
    if let Some(f) = a.expect_fidelity {
        pass &= (mean - f).abs() <= g.tolerance;
    }
    let summary = ProtocolSummary {
        cases: records.len(),
        branches: records.iter().map(|r| r.branches.len()).sum(),
        min_fidelity: min,
        mean_fidelity: mean,
        max_fidelity: max,
        expected_fidelity: a.expect_fidelity,
        perfect_expected: perfect,
        pass,
    };

    let config = json!({
        "variant": variant,
        "n": a.n,
        "x": a.x,
        "message": a.message,
        "policy": format!("{:?}", a.policy).to_lowercase(),
        "seed": g.seed,
        "tolerance": g.tolerance,
        "transcript": g.transcript,
    });
    let variant_name = serde_json::to_value(variant).expect("enum").as_str().unwrap_or_default().to_string();

    let mut csv = format!("{PROTOCOL_CSV}\n");
    let mut text = format!(
        "protocol {variant_name}  n = {}  seed = {}  tolerance = {:e}\n{:>5} {:>3} {:>26} {:>26} {:>8} {:>14} {:>14}\n",
        a.n, g.seed, g.tolerance, "case", "x", "alpha", "beta", "branches", "min fidelity", "mean fidelity"
    );
    for r in &records {
        let (al, be) = (r.message.alpha, r.message.beta);
        for (bi, b) in r.branches.iter().enumerate() {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.case,
                variant_name,
                a.n,
                r.x,
                r.message_index,
                al.re,
                al.im,
                be.re,
                be.im,
                bi,
                outcome_string(&b.outcomes),
                b.probability,
                b.fidelity
            );
        }
        let _ = writeln!(
            text,
            "{:>5} {:>3} {:>26} {:>26} {:>8} {:>14.12} {:>14.12}",
            r.case,
            r.x,
            format!("{:.6}{:+.6}i", al.re, al.im),
            format!("{:.6}{:+.6}i", be.re, be.im),
            r.branches.len(),
            r.min_fidelity,
            r.mean_fidelity
        );
        if g.transcript {
            for b in &r.branches {
                let _ = writeln!(text, "      branch [{}]", outcome_string(&b.outcomes));
                if let Some(t) = &b.transcript {
                    for e in t.events() {
                        let _ = writeln!(text, "        {}", serde_json::to_string(e).expect("event"));
                    }
                }
            }
        }
    }
    let _ = writeln!(
        text,
        "summary: {} case(s), {} branch(es), fidelity min {:.12} mean {:.12} max {:.12}{}\n{}",
        summary.cases,
        summary.branches,
        min,
        mean,
        max,
        a.expect_fidelity.map(|f| format!(", expected {f}")).unwrap_or_default(),
        verdict(pass)
    );

    Ok(Outcome {
        json: report("protocol", config, &records, summary),
        csv,
        text,
        passed: pass,
    })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn weights_string(w: [f64; 4]) -> String {
    w.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

pub fn cmd_validate_switch(g: &GlobalArgs, a: &ValidateArgs) -> Result<Outcome, Failure> {
    let ns: Vec<usize> = a.n.map_or_else(|| vec![1, 2, 3], |n| vec![n]);
    let family: ChannelFamily = a.channels.into();
    let rep: ValidationReport = validate_closed_forms_for(g.seed, a.trials, &ns, family)?;
    let pass = rep.max_deviation < g.tolerance;

    let per_n: Vec<Value> = ns
        .iter()
        .map(|&n| {
            let max = rep.records.iter().filter(|r| r.n == n).map(|r| r.deviation).fold(0.0, f64::max);
            json!({ "n": n, "max_deviation": max })
        })
        .collect();
    let summary = json!({
        "records": rep.records.len(),
        "max_deviation": rep.max_deviation,
        "per_n": per_n,
        "pass": pass,
    });
    let config = json!({
        "n": a.n,
        "trials": a.trials,
        "channels": family,
        "seed": g.seed,
        "tolerance": g.tolerance,
    });

    let mut csv = format!("{VALIDATE_CSV}\n");
    for r in &rep.records {
        let chans = r.channels.iter().map(|c| weights_string(c.weights())).collect::<Vec<_>>().join("|");
        let family = serde_json::to_value(r.family).expect("enum");
        let _ = writeln!(csv, "{},{},{},{},{}", r.n, r.trial, family.as_str().unwrap_or_default(), chans, r.deviation);
    }
    let mut text = format!(
        "validate-switch  trials = {}  seed = {}  tolerance = {:e}\n",
        a.trials, g.seed, g.tolerance
    );
    for v in &per_n {
        let _ = writeln!(text, "  n = {}  max Choi deviation {:.3e}", v["n"], v["max_deviation"].as_f64().unwrap_or(0.0));
    }
    let _ = writeln!(
        text,
        "summary: {} comparison(s), max deviation {:.3e}, runtime {:.3} s\n{}",
        rep.records.len(),
        rep.max_deviation,
        rep.elapsed_secs,
        verdict(pass)
    );
    eprintln!("validate-switch runtime: {:.3} s", rep.elapsed_secs);

    Ok(Outcome {
        json: report("validate-switch", config, &rep.records, summary),
        csv,
        text,
        passed: pass,
    })
}

pub fn cmd_nogo_scan(g: &GlobalArgs, a: &NogoArgs) -> Result<Outcome, Failure> {
    let rep = fixed_bit_scan(a.n)?;
    let odd = a.n % 2 == 1;
    let expectation_met = if odd { !rep.has_counterexample() } else { rep.has_counterexample() };
    let pass = expectation_met && rep.structure_holds();
    let summary = json!({
        "n": rep.n,
        "cells": rep.cells,
        "counterexamples": rep.counterexamples.len(),
        "expected": if odd { "none" } else { "at-least-one" },
        "structure_holds": rep.structure_holds(),
        "pass": pass,
    });
    let config = json!({ "n": a.n, "seed": g.seed, "tolerance": g.tolerance });

    let mut csv = format!("{NOGO_CSV}\n");
    for cx in &rep.counterexamples {
        let tau = cx.tau.one_based().iter().map(|t| t.to_string()).collect::<Vec<_>>().join(";");
        let _ = writeln!(csv, "{},{},{},{}", rep.n, tau, cx.bits, cx.alternating_even_cycles);
    }
    let mut text = format!(
        "nogo-scan  n = {}\n  {} cell(s), {} counterexample(s) (expected {})\n",
        rep.n,
        rep.cells,
        rep.counterexamples.len(),
        if odd { "none" } else { "at least one" }
    );
    for cx in rep.counterexamples.iter().take(10) {
        let _ = writeln!(text, "  tau = {:?}  b = {}", cx.tau.one_based(), cx.bits);
    }
    if rep.counterexamples.len() > 10 {
        let _ = writeln!(text, "  ... {} more", rep.counterexamples.len() - 10);
    }
    let _ = writeln!(text, "{}", verdict(pass));

    Ok(Outcome {
        json: report("nogo-scan", config, &rep.counterexamples, summary),
        csv,
        text,
        passed: pass,
    })
}

fn parse_weights(s: &str) -> Result<[f64; 4], Failure> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Failure::usage(format!("invalid weights {s:?}")))?;
    vals.try_into()
        .map_err(|_| Failure::usage(format!("expected four weights, got {s:?}")))
}

pub fn cmd_eb_check(g: &GlobalArgs, a: &EbArgs) -> Result<Outcome, Failure> {
    let (name, channel) = match (&a.weights, a.channel) {
        (Some(w), None) => ("custom".to_string(), PauliChannel::new(parse_weights(w)?)?),
        (None, Some(ch)) => {
            let channel = match ch {
                NamedChannel::Nxy => PauliChannel::nxy(),
                NamedChannel::Identity => PauliChannel::identity(),
                NamedChannel::Dephasing => PauliChannel::dephasing(),
                NamedChannel::Uniform => PauliChannel::uniform(),
            };
            (format!("{ch:?}").to_lowercase(), channel)
        }
        _ => return Err(Failure::usage("eb-check needs exactly one of --weights or --channel")),
    };
    let v = is_entanglement_breaking_qubit(&choi(&channel.kraus())?)?;
    let pass = match a.expect {
        Some(EbExpect::Eb) => v.entanglement_breaking,
        Some(EbExpect::NotEb) => !v.entanglement_breaking,
        None => true,
    };
    let record = json!({
        "channel": name,
        "weights": channel.weights(),
        "entanglement_breaking": v.entanglement_breaking,
        "min_pt_eigenvalue": v.min_pt_eigenvalue,
    });
    let summary = json!({ "entanglement_breaking": v.entanglement_breaking, "expected": a.expect.map(|e| format!("{e:?}").to_lowercase()), "pass": pass });
    let config = json!({ "channel": name, "weights": channel.weights(), "seed": g.seed, "tolerance": g.tolerance });
    let w = channel.weights();
    let csv = format!(
        "{EB_CSV}\n{name},{},{},{},{},{},{}\n",
        w[0], w[1], w[2], w[3], v.entanglement_breaking, v.min_pt_eigenvalue
    );
    let text = format!(
        "eb-check  channel = {name}  weights = {:?}\n  {}  (min eigenvalue of partially transposed Choi matrix {:.6e})\n{}\n",
        w,
        if v.entanglement_breaking { "entanglement-breaking" } else { "not entanglement-breaking" },
        v.min_pt_eigenvalue,
        verdict(pass)
    );
    Ok(Outcome {
        json: report("eb-check", config, &[record], summary),
        csv,
        text,
        passed: pass,
    })
}

#[derive(Serialize)]
struct SweepRecord {
    n: usize,
    x: usize,
    samples: usize,
    mean_fidelity: f64,
    min_fidelity: f64,
    max_fidelity: f64,
    plus_fidelity: f64,
}

/// Haar average of `|α|⁴ + |β|⁴`.
pub const HAAR_BASELINE_MEAN: f64 = 2.0 / 3.0;

pub fn cmd_baseline_sweep(g: &GlobalArgs, a: &SweepArgs) -> Result<Outcome, Failure> {
    if a.samples == 0 {
        return Err(Failure::usage("--samples must be positive"));
    }
    if a.n_min > a.n_max {
        return Err(Failure::usage("--n-min exceeds --n-max"));
    }
    let mut r = rng(g.seed);
    let messages: Vec<MessageState> = (0..a.samples).map(|_| MessageState::haar(&mut r)).collect();
    let mut records = Vec::new();
    for n in a.n_min..=a.n_max {
        for x in 1..=n {
            let mut fids = Vec::with_capacity(messages.len());
            for m in &messages {
                fids.push(run_definite_order_baseline(m, n, x)?.mean_fidelity());
            }
            let plus = run_definite_order_baseline(&MessageState::plus(), n, x)?.mean_fidelity();
            records.push(SweepRecord {
                n,
                x,
                samples: a.samples,
                mean_fidelity: fids.iter().sum::<f64>() / fids.len() as f64,
                min_fidelity: fids.iter().copied().fold(f64::INFINITY, f64::min),
                max_fidelity: fids.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                plus_fidelity: plus,
            });
        }
    }
    let overall = records.iter().map(|r| r.mean_fidelity).sum::<f64>() / records.len() as f64;
    let summary = json!({
        "mean_fidelity": overall,
        "haar_expectation": HAAR_BASELINE_MEAN,
        "switch_fidelity": 1.0,
        "pass": true,
    });
    let config = json!({
        "n_min": a.n_min,
        "n_max": a.n_max,
        "samples": a.samples,
        "seed": g.seed,
        "tolerance": g.tolerance,
    });
    let mut csv = format!("{SWEEP_CSV}\n");
    let mut text = format!(
        "baseline-sweep  samples = {}  seed = {}\n{:>3} {:>3} {:>14} {:>14} {:>14} {:>14}\n",
        a.samples, g.seed, "n", "x", "mean", "min", "max", "|+> fidelity"
    );
    for r in &records {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.n, r.x, r.samples, r.mean_fidelity, r.min_fidelity, r.max_fidelity, r.plus_fidelity
        );
        let _ = writeln!(
            text,
            "{:>3} {:>3} {:>14.6} {:>14.6} {:>14.6} {:>14.6}",
            r.n, r.x, r.mean_fidelity, r.min_fidelity, r.max_fidelity, r.plus_fidelity
        );
    }
    let _ = writeln!(
        text,
        "summary: mean baseline fidelity {overall:.6} (Haar expectation {HAAR_BASELINE_MEAN:.6}); SWITCH protocol fidelity 1"
    );
    Ok(Outcome {
        json: report("baseline-sweep", config, &records, summary),
        csv,
        text,
        passed: true,
    })
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    if !(cli.global.tolerance.is_finite() && cli.global.tolerance >= 0.0) {
        return Err(Failure::usage("--tolerance must be a non-negative number"));
    }
    let g = &cli.global;
    match &cli.command {
        Command::Protocol(a) => cmd_protocol(g, a),
        Command::ValidateSwitch(a) => cmd_validate_switch(g, a),
        Command::NogoScan(a) => cmd_nogo_scan(g, a),
        Command::EbCheck(a) => cmd_eb_check(g, a),
        Command::BaselineSweep(a) => cmd_baseline_sweep(g, a),
    }
}

fn render(outcome: &Outcome, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.json).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => outcome.csv.clone(),
        Format::Text => outcome.text.clone(),
    }
}

/// Parses `args`, runs the command, writes the report, and returns the exit status.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    let body = render(&outcome, cli.global.format);
    let written = match &cli.global.output {
        Some(path) => std::fs::write(path, body.as_bytes()).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    ExitCode::from(if outcome.passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.6"), Some(c(0.6, 0.0)));
        assert_eq!(parse_complex("0.8i"), Some(c(0.0, 0.8)));
        assert_eq!(parse_complex("-i"), Some(c(0.0, -1.0)));
        assert_eq!(parse_complex("i"), Some(c(0.0, 1.0)));
        assert_eq!(parse_complex("1+2i"), Some(c(1.0, 2.0)));
        assert_eq!(parse_complex("-1-2.5i"), Some(c(-1.0, -2.5)));
        assert_eq!(parse_complex("1e-3+2E+1i"), Some(c(1e-3, 20.0)));
        assert_eq!(parse_complex(" 0.5 - i "), Some(c(0.5, -1.0)));
        assert_eq!(parse_complex("abc"), None);
        assert_eq!(parse_complex(""), None);
        assert_eq!(parse_complex("1+i+i"), None);
    }

    #[test]
    fn message_specs() {
        let m = parse_messages("0.6,0.8i", 0).unwrap();
        assert_eq!(m.len(), 1);
        assert!(!m[0].1);
        let m = parse_messages("1,1", 0).unwrap();
        assert!(m[0].1);
        assert!((m[0].0.alpha().re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(parse_messages("HAAR(5)", 3).unwrap().len(), 5);
        assert_eq!(
            parse_messages("HAAR(5)", 3).unwrap()[4].0,
            parse_messages("HAAR(5)", 3).unwrap()[4].0
        );
        assert!(parse_messages("HAAR(0)", 0).is_err());
        assert!(parse_messages("0,0", 0).is_err());
        assert!(parse_messages("1", 0).is_err());
    }

    #[test]
    fn receiver_spec() {
        assert_eq!(parse_x("ALL", 3).unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_x("2", 3).unwrap(), vec![2]);
        assert!(parse_x("two", 3).is_err());
    }

    #[test]
    fn error_exit_codes() {
        let usage: Failure = Error::OutOfRange { what: "x", value: 0, min: 1, max: 3 }.into();
        assert_eq!(usage.code, EXIT_USAGE);
        let numerical: Failure = Error::Numerical("x".into()).into();
        assert_eq!(numerical.code, EXIT_NUMERICAL);
    }

    #[test]
    fn json_is_deterministic() {
        let cli = Cli::try_parse_from(["rrqc", "--seed", "4", "protocol", "--variant", "switch", "--n", "2", "--message", "HAAR(2)"]).unwrap();
        let a = render(&execute(&cli).unwrap(), Format::Json);
        let b = render(&execute(&cli).unwrap(), Format::Json);
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["summary"]["pass"], true);
        assert!(v["records"][0]["message"]["alpha"].is_array());
    }
}
