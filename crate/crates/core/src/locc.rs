//! Two-outcome local POVMs and numerical entanglement-monotonicity checks.
//!
//! A POVM on one qubit is `A1 = U1·diag(α, β)·V`,
//! `A2 = U2·diag(√(1−α²), √(1−β²))·V`. A measure `E` is monotone on average
//! when `E(ψ) − p1·E(φ1) − p2·E(φ2) >= 0` for every such pair.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use serde::Serialize;

use crate::cluster::{self, ClusterFamily, FamilyTag};
use crate::error::{Error, Result};
use crate::linalg::{mat2_adjoint, mat2_diag, mat2_identity, mat2_max_abs_diff, mat2_mul, Mat2, C64};
use crate::measures::{self, Pair, Triple};
use crate::qstate::{PureState, Qubit};
use crate::random;

/// Outcomes with probability below this are skipped.
pub const MIN_PROBABILITY: f64 = 1e-12;
/// A delta below this counts as a monotonicity violation.
pub const VIOLATION_THRESHOLD: f64 = -1e-9;
/// Margin keeping sampled `α`, `β` away from 0 and 1.
pub const SAMPLING_MARGIN: f64 = 1e-3;

const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PovmPair {
    pub alpha: f64,
    pub beta: f64,
    #[serde(skip)]
    pub v: Mat2,
    #[serde(skip)]
    pub u1: Mat2,
    #[serde(skip)]
    pub u2: Mat2,
}

impl PovmPair {
    /// Diagonal POVM, `α, β ∈ (0, 1)`.
    pub fn diagonal(alpha: f64, beta: f64) -> Result<Self> {
        Self::with_unitaries(alpha, beta, mat2_identity(), mat2_identity(), mat2_identity())
    }

    pub fn with_unitaries(alpha: f64, beta: f64, v: Mat2, u1: Mat2, u2: Mat2) -> Result<Self> {
        for (name, x) in [("alpha", alpha), ("beta", beta)] {
            if !(x > 0.0 && x < 1.0) {
                return Err(Error::Domain(format!("{name} = {x} must lie in (0, 1)")));
            }
        }
        for u in [&v, &u1, &u2] {
            let dev = mat2_max_abs_diff(&mat2_mul(&mat2_adjoint(u), u), &mat2_identity());
            if dev > UNITARY_TOL {
                return Err(Error::Domain(format!("matrix is not unitary (deviation {dev:e})")));
            }
        }
        Ok(Self {
            alpha,
            beta,
            v,
            u1,
            u2,
        })
    }

    pub fn is_diagonal(&self) -> bool {
        let id = mat2_identity();
        [self.v, self.u1, self.u2]
            .iter()
            .all(|u| mat2_max_abs_diff(u, &id) == 0.0)
    }

    /// The Kraus operators `(A1, A2)`.
    pub fn kraus(&self) -> (Mat2, Mat2) {
        let d1 = mat2_diag(self.alpha, self.beta);
        let d2 = mat2_diag(
            libm::sqrt(1.0 - self.alpha * self.alpha),
            libm::sqrt(1.0 - self.beta * self.beta),
        );
        (
            mat2_mul(&self.u1, &mat2_mul(&d1, &self.v)),
            mat2_mul(&self.u2, &mat2_mul(&d2, &self.v)),
        )
    }

    /// `max |A1†A1 + A2†A2 − I|`.
    pub fn completeness_deviation(&self) -> f64 {
        let (a1, a2) = self.kraus();
        let s1 = mat2_mul(&mat2_adjoint(&a1), &a1);
        let s2 = mat2_mul(&mat2_adjoint(&a2), &a2);
        let mut sum = s1;
        for i in 0..2 {
            for j in 0..2 {
                sum[i][j] += s2[i][j];
            }
        }
        mat2_max_abs_diff(&sum, &mat2_identity())
    }
}

/// One branch of a POVM: its probability and, unless negligible, the
/// normalized post-measurement state.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub probability: f64,
    pub state: Option<PureState>,
}

/// Applies both Kraus operators of `pair` to `qubit`.
pub fn apply_povm(state: &PureState, qubit: Qubit, pair: &PovmPair) -> Result<[Outcome; 2]> {
    let (a1, a2) = pair.kraus();
    let branch = |op: &Mat2| -> Result<Outcome> {
        let (amps, p) = state.apply_local_operator(qubit, op)?;
        let post = if p >= MIN_PROBABILITY {
            Some(PureState::normalized(amps)?.with_labels(state.labels().to_vec())?)
        } else {
            None
        };
        Ok(Outcome {
            probability: p,
            state: post,
        })
    };
    Ok([branch(&a1)?, branch(&a2)?])
}

/// Measures that can be tested for monotonicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    /// Average multipartite correlation.
    Ems,
    /// Residual correlation of one qubit.
    Residual(Qubit),
    /// Closed-form four-tangle of a table family (F1, F2, F3).
    Tau4(FamilyTag),
    /// Closed-form three-tangle of a triple for a table family.
    Tau3(FamilyTag, Triple),
    /// Squared concurrence of a pair.
    Tau2(Pair),
}

impl Measure {
    pub fn name(&self) -> String {
        match self {
            Measure::Ems => String::from("ems"),
            Measure::Residual(q) => format!("m_{}", q.label()),
            Measure::Tau4(_) => String::from("tau4"),
            Measure::Tau3(_, t) => format!("tau3_{}", t.name().to_ascii_lowercase()),
            Measure::Tau2(p) => format!("tau2_{}", p.name().to_ascii_lowercase()),
        }
    }

    /// Parses `ems`, `m_<q>`, `tau4`, `tau3_<triple>`, `tau2_<pair>`; the
    /// closed forms take `family` as their table column.
    pub fn parse(s: &str, family: Option<FamilyTag>) -> Result<Measure> {
        let lower = s.trim().to_ascii_lowercase();
        let bad = || Error::Format(format!("unknown measure {s:?}"));
        let need_family = || {
            family.ok_or_else(|| {
                Error::UnsupportedFamily(format!("measure {s:?} needs a table family"))
            })
        };
        if lower == "ems" {
            return Ok(Measure::Ems);
        }
        if lower == "tau4" {
            return Ok(Measure::Tau4(need_family()?));
        }
        if let Some(rest) = lower.strip_prefix("m_").or_else(|| lower.strip_prefix("m")) {
            let mut chars = rest.chars();
            return match (chars.next(), chars.next()) {
                (Some(c), None) => Qubit::from_label(c).map(Measure::Residual).ok_or_else(bad),
                _ => Err(bad()),
            };
        }
        if let Some(rest) = lower.strip_prefix("tau3_") {
            let t = Triple::parse(rest).ok_or_else(bad)?;
            return Ok(Measure::Tau3(need_family()?, t));
        }
        if let Some(rest) = lower.strip_prefix("tau2_") {
            return Pair::parse(rest).map(Measure::Tau2).ok_or_else(bad);
        }
        Err(bad())
    }

    pub fn evaluate(&self, state: &PureState) -> Result<f64> {
        match *self {
            Measure::Ems => measures::ems(state),
            Measure::Residual(q) => measures::residual_correlation(state, q),
            Measure::Tau4(tag) => Ok(fitted_record(tag, state)?.tau4),
            Measure::Tau3(tag, t) => Ok(fitted_record(tag, state)?.tau3(t)),
            Measure::Tau2(p) => {
                let [k, l] = p.qubits();
                measures::pair_concurrence_sq(state, k, l)
            }
        }
    }
}

fn fitted_record(tag: FamilyTag, state: &PureState) -> Result<cluster::ClosedFormRecord> {
    let coefficients = cluster::fit_coefficients(tag, state)?;
    cluster::closed_form_measures(&ClusterFamily::new(tag, &coefficients)?)
}

/// Average change of one measure under one POVM.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityRecord {
    pub measure: String,
    pub state: String,
    pub qubit: Qubit,
    pub alpha: f64,
    pub beta: f64,
    pub p1: f64,
    pub p2: f64,
    pub value_input: f64,
    pub value_outcome1: Option<f64>,
    pub value_outcome2: Option<f64>,
    pub delta: f64,
}

/// `E(ψ) − p1·E(φ1) − p2·E(φ2)`; negligible outcomes contribute zero.
pub fn monotonicity_delta(
    measure: &Measure,
    state: &PureState,
    qubit: Qubit,
    pair: &PovmPair,
) -> Result<MonotonicityRecord> {
    monotonicity_delta_described(measure, state, "state", qubit, pair)
}

fn monotonicity_delta_described(
    measure: &Measure,
    state: &PureState,
    descriptor: &str,
    qubit: Qubit,
    pair: &PovmPair,
) -> Result<MonotonicityRecord> {
    let value_input = measure.evaluate(state)?;
    let [o1, o2] = apply_povm(state, qubit, pair)?;
    let eval = |o: &Outcome| o.state.as_ref().map(|s| measure.evaluate(s)).transpose();
    let (v1, v2) = (eval(&o1)?, eval(&o2)?);
    let delta = value_input
        - v1.map_or(0.0, |v| o1.probability * v)
        - v2.map_or(0.0, |v| o2.probability * v);
    Ok(MonotonicityRecord {
        measure: measure.name(),
        state: String::from(descriptor),
        qubit,
        alpha: pair.alpha,
        beta: pair.beta,
        p1: o1.probability,
        p2: o2.probability,
        value_input,
        value_outcome1: v1,
        value_outcome2: v2,
        delta,
    })
}

/// Source of input states for a campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Family(FamilyTag),
    /// Haar-random four-qubit states.
    Haar4,
}

impl Generator {
    pub fn name(&self) -> String {
        match self {
            Generator::Family(tag) => tag.name(),
            Generator::Haar4 => String::from("haar4"),
        }
    }

    pub fn parse(s: &str) -> Result<Generator> {
        if s.trim().eq_ignore_ascii_case("haar4") {
            Ok(Generator::Haar4)
        } else {
            FamilyTag::parse(s).map(Generator::Family)
        }
    }

    fn n_qubits(&self) -> usize {
        match self {
            Generator::Family(tag) => tag.n_qubits(),
            Generator::Haar4 => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzConfig {
    pub measure: Measure,
    pub generator: Generator,
    pub trials: usize,
    pub seed: u64,
    pub alpha_bounds: (f64, f64),
    pub beta_bounds: (f64, f64),
    /// Sample Haar-random `U1`, `U2`, `V` as well.
    pub unitaries: bool,
}

impl FuzzConfig {
    pub fn new(measure: Measure, generator: Generator, trials: usize, seed: u64) -> Self {
        let bounds = (SAMPLING_MARGIN, 1.0 - SAMPLING_MARGIN);
        Self {
            measure,
            generator,
            trials,
            seed,
            alpha_bounds: bounds,
            beta_bounds: bounds,
            unitaries: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Domain(String::from("trials must be at least 1")));
        }
        for (name, (lo, hi)) in [("alpha", self.alpha_bounds), ("beta", self.beta_bounds)] {
            if !(lo >= SAMPLING_MARGIN && hi <= 1.0 - SAMPLING_MARGIN && lo <= hi) {
                return Err(Error::Domain(format!(
                    "{name} bounds [{lo}, {hi}] must lie within [{SAMPLING_MARGIN}, {}]",
                    1.0 - SAMPLING_MARGIN
                )));
            }
        }
        let closed_form = matches!(self.measure, Measure::Tau4(_) | Measure::Tau3(..));
        if closed_form && self.unitaries {
            return Err(Error::UnsupportedFamily(String::from(
                "closed-form measures need diagonal POVMs to stay in the family",
            )));
        }
        if let (Measure::Tau4(tag) | Measure::Tau3(tag, _), Generator::Family(g)) =
            (self.measure, self.generator)
        {
            if tag != g {
                return Err(Error::UnsupportedFamily(format!(
                    "measure for {} on generator {}",
                    tag.name(),
                    g.name()
                )));
            }
        }
        Ok(())
    }
}

/// Trial that produced the smallest delta.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Argmin {
    pub coefficients: Vec<C64>,
    pub qubit: Qubit,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzReport {
    pub seed: u64,
    pub trials: usize,
    pub generator: String,
    pub measure: String,
    pub min_delta: f64,
    pub argmin: Argmin,
    pub violations: usize,
    pub mean_delta: f64,
    pub max_delta: f64,
    pub min_record: MonotonicityRecord,
}

/// One sampled trial: coefficients, state, target and POVM.
struct Trial {
    coefficients: Vec<C64>,
    state: PureState,
    qubit: Qubit,
    pair: PovmPair,
}

fn sample_trial(config: &FuzzConfig, index: u64) -> Result<Trial> {
    let mut rng = random::stream_rng(config.seed, index);
    let (coefficients, state) = match config.generator {
        Generator::Family(tag) => {
            let c = random::complex_gaussian_vec(&mut rng, tag.n_coefficients());
            let fam = ClusterFamily::new(tag, &c)?;
            (fam.normalized_coefficients()?, cluster::family_state(&fam)?)
        }
        Generator::Haar4 => {
            let s = random::haar_state(&mut rng, 4)?;
            (s.amplitudes().to_vec(), s)
        }
    };
    let qubit = Qubit(rng.gen_range(0..config.generator.n_qubits()));
    let alpha = rng.gen_range(config.alpha_bounds.0..=config.alpha_bounds.1);
    let beta = rng.gen_range(config.beta_bounds.0..=config.beta_bounds.1);
    let pair = if config.unitaries {
        let v = random::haar_unitary2(&mut rng);
        let u1 = random::haar_unitary2(&mut rng);
        let u2 = random::haar_unitary2(&mut rng);
        PovmPair::with_unitaries(alpha, beta, v, u1, u2)?
    } else {
        PovmPair::diagonal(alpha, beta)?
    };
    Ok(Trial {
        coefficients,
        state,
        qubit,
        pair,
    })
}

/// Runs `trials` independent monotonicity checks. Trial `i` draws from the
/// stream `(seed, i)`, so reports are reproducible.
pub fn fuzz_campaign(config: &FuzzConfig) -> Result<FuzzReport> {
    config.validate()?;
    let descriptor = config.generator.name();
    let mut best: Option<(MonotonicityRecord, Argmin)> = None;
    let (mut sum, mut max, mut violations) = (0.0, f64::NEG_INFINITY, 0usize);
    for i in 0..config.trials {
        let trial = sample_trial(config, i as u64)?;
        let rec = monotonicity_delta_described(
            &config.measure,
            &trial.state,
            &descriptor,
            trial.qubit,
            &trial.pair,
        )?;
        sum += rec.delta;
        max = max.max(rec.delta);
        if rec.delta < VIOLATION_THRESHOLD {
            violations += 1;
        }
        if best.as_ref().is_none_or(|(b, _)| rec.delta < b.delta) {
            let argmin = Argmin {
                coefficients: trial.coefficients,
                qubit: trial.qubit,
                alpha: trial.pair.alpha,
                beta: trial.pair.beta,
            };
            best = Some((rec, argmin));
        }
    }
    let (min_record, argmin) = best.expect("at least one trial");
    Ok(FuzzReport {
        seed: config.seed,
        trials: config.trials,
        generator: descriptor,
        measure: config.measure.name(),
        min_delta: min_record.delta,
        argmin,
        violations,
        mean_delta: sum / config.trials as f64,
        max_delta: max,
        min_record,
    })
}

/// Raw coefficients of the F2 counterexample state.
pub const COUNTEREXAMPLE_COEFFICIENTS: [f64; 4] = [2.0, 2.0, 0.2, 3.0];
pub const COUNTEREXAMPLE_ALPHA: f64 = 0.9;
pub const COUNTEREXAMPLE_BETA: f64 = 0.2;
/// Reference values, in the order of [`CounterexampleRecord::values`].
pub const COUNTEREXAMPLE_REFERENCE: [(&str, f64); 5] = [
    ("M_A", 0.5643),
    ("M_C", 0.2915),
    ("dM_C", -0.1151),
    ("dtau3_BCD", -0.1964),
    ("dtau4", 0.08127),
];
pub const REPRODUCTION_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleRecord {
    pub m_a: f64,
    pub m_c: f64,
    pub delta_m_c: f64,
    pub delta_tau3_bcd: f64,
    pub delta_tau4: f64,
    pub p1: f64,
    pub p2: f64,
}

impl CounterexampleRecord {
    pub fn values(&self) -> [f64; 5] {
        [
            self.m_a,
            self.m_c,
            self.delta_m_c,
            self.delta_tau3_bcd,
            self.delta_tau4,
        ]
    }

    /// Compares against the reference values to `1e-4`.
    pub fn check(&self) -> Result<()> {
        for ((name, expected), computed) in COUNTEREXAMPLE_REFERENCE.iter().zip(self.values()) {
            if !((computed - expected).abs() <= REPRODUCTION_TOL) {
                return Err(Error::Reproduction {
                    quantity: String::from(*name),
                    computed,
                    expected: *expected,
                });
            }
        }
        Ok(())
    }
}

/// Recomputes the residual-correlation counterexample on F2 from scratch.
pub fn counterexample_values() -> Result<CounterexampleRecord> {
    let fam = ClusterFamily::from_reals(FamilyTag::F2, &COUNTEREXAMPLE_COEFFICIENTS)?;
    let state = cluster::family_state(&fam)?;
    let pair = PovmPair::diagonal(COUNTEREXAMPLE_ALPHA, COUNTEREXAMPLE_BETA)?;
    let delta = |m: Measure| monotonicity_delta(&m, &state, Qubit::A, &pair);
    let d_mc = delta(Measure::Residual(Qubit::C))?;
    Ok(CounterexampleRecord {
        m_a: measures::residual_correlation(&state, Qubit::A)?,
        m_c: d_mc.value_input,
        delta_m_c: d_mc.delta,
        delta_tau3_bcd: delta(Measure::Tau3(FamilyTag::F2, Triple::BCD))?.delta,
        delta_tau4: delta(Measure::Tau4(FamilyTag::F2))?.delta,
        p1: d_mc.p1,
        p2: d_mc.p2,
    })
}

/// Recomputes the counterexample and fails on any mismatch beyond `1e-4`.
pub fn reproduce_counterexample() -> Result<CounterexampleRecord> {
    let rec = counterexample_values()?;
    rec.check()?;
    Ok(rec)
}
