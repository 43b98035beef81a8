//! Convex-roof minimization for rank-2 mixed states.
//!
//! Every pure-state decomposition of a rank-2 state `ρ = μ0|e0⟩⟨e0| + μ1|e1⟩⟨e1|`
//! comes from an `m×2` isometry `U` via `√p_x|Z_x⟩ = Σ_j conj(U_xj)·√μ_j|e_j⟩`.
//! The roof is the minimum of `Σ p_x·τ(Z_x)` over such isometries, found by a
//! multi-start Hooke-Jeeves pattern search over Givens angles and phases.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{C64, ZERO};
use crate::qstate::{DensityMatrix, PureState, EIGEN_FLOOR, STATE_TOL};
use crate::random;

/// Second eigenvalue at or below this makes the input rank one.
pub const RANK_ONE_FLOOR: f64 = 1e-12;
/// Isometry columns must be orthonormal to this.
pub const ISOMETRY_TOL: f64 = 1e-10;
/// Largest supported decomposition size.
pub const MAX_M: usize = 4;

/// Amplitude indices of the four F1 kets `|0000⟩, |0011⟩, |1100⟩, |1111⟩`.
const F1_SUPPORT: [usize; 4] = [0b0000, 0b0011, 0b1100, 0b1111];
/// Decomposition weights below this get no well-defined direction.
const NEGLIGIBLE_WEIGHT: f64 = 1e-14;

/// Eigen-decomposition of a state of rank at most two.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSplit {
    /// Larger eigenvalue.
    pub p: f64,
    pub psi1: PureState,
    /// Arbitrary null-space vector when `rank_one` is set.
    pub psi2: PureState,
    /// Both clipped eigenvalues, descending.
    pub mu: [f64; 2],
    pub rank_one: bool,
}

pub fn eigen_split(dm: &DensityMatrix) -> Result<EigenSplit> {
    if dm.dim() < 2 {
        return Err(Error::Dimension {
            expected: 2,
            actual: dm.dim(),
        });
    }
    let (vals, vecs) = dm.clipped_eigen()?;
    if let Some(&l3) = vals.get(2) {
        if l3 > EIGEN_FLOOR {
            return Err(Error::Rank(l3));
        }
    }
    let column = |j: usize| -> Result<PureState> {
        let amps = (0..dm.dim()).map(|i| vecs[(i, j)]).collect();
        PureState::normalized(amps)?.with_labels(dm.labels().to_vec())
    };
    Ok(EigenSplit {
        p: vals[0],
        psi1: column(0)?,
        psi2: column(1)?,
        mu: [vals[0], vals[1]],
        rank_one: vals[1] <= RANK_ONE_FLOOR,
    })
}

/// A pure-state decomposition `ρ = Σ p_x |Z_x⟩⟨Z_x|` generated by an isometry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rank2Decomposition {
    pub weights: Vec<f64>,
    #[serde(serialize_with = "serialize_states")]
    pub vectors: Vec<PureState>,
    /// Rows of the `m×2` isometry.
    pub isometry: Vec<[C64; 2]>,
}

fn serialize_states<S: Serializer>(states: &[PureState], s: S) -> core::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(states.len()))?;
    for st in states {
        seq.serialize_element(st.amplitudes())?;
    }
    seq.end()
}

impl Rank2Decomposition {
    pub fn m(&self) -> usize {
        self.weights.len()
    }

    /// `Σ p_x |Z_x⟩⟨Z_x|`.
    pub fn reconstruct(&self) -> crate::linalg::CMatrix {
        let dim = self.vectors[0].dim();
        let mut rho = crate::linalg::CMatrix::zeros(dim);
        for (w, v) in self.weights.iter().zip(&self.vectors) {
            rho = rho.add(&crate::linalg::CMatrix::outer(v.amplitudes()).scale(C64::new(*w, 0.0)));
        }
        rho
    }
}

/// Largest deviation of `U†U` from the 2×2 identity.
pub fn isometry_deviation(rows: &[[C64; 2]]) -> f64 {
    let mut g = [[ZERO; 2]; 2];
    for r in rows {
        for i in 0..2 {
            for j in 0..2 {
                g[i][j] += r[i].conj() * r[j];
            }
        }
    }
    let mut dev: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((g[i][j] - id).norm());
        }
    }
    dev
}

pub fn decomposition_from_isometry(dm: &DensityMatrix, isometry: &[[C64; 2]]) -> Result<Rank2Decomposition> {
    let split = eigen_split(dm)?;
    check_isometry(isometry)?;
    build_decomposition(&Weighted::new(&split), isometry, dm.labels())
}

fn check_isometry(isometry: &[[C64; 2]]) -> Result<()> {
    if !(2..=MAX_M).contains(&isometry.len()) {
        return Err(Error::Domain(format!(
            "decomposition size {} outside [2, {MAX_M}]",
            isometry.len()
        )));
    }
    let dev = isometry_deviation(isometry);
    if !(dev <= ISOMETRY_TOL) {
        return Err(Error::Isometry(dev));
    }
    Ok(())
}

/// Weighted eigenvectors `√μ_j|e_j⟩`.
struct Weighted {
    w: [Vec<C64>; 2],
    e: [Vec<C64>; 2],
}

impl Weighted {
    fn new(split: &EigenSplit) -> Self {
        let e = [split.psi1.amplitudes().to_vec(), split.psi2.amplitudes().to_vec()];
        let w = [0, 1].map(|j| {
            let s = libm::sqrt(split.mu[j]);
            e[j].iter().map(|z| z * s).collect()
        });
        Self { w, e }
    }
}

fn combine(basis: &[Vec<C64>; 2], row: &[C64; 2]) -> Vec<C64> {
    let (c0, c1) = (row[0].conj(), row[1].conj());
    basis[0].iter().zip(&basis[1]).map(|(a, b)| c0 * a + c1 * b).collect()
}

fn build_decomposition(w: &Weighted, isometry: &[[C64; 2]], labels: &[char]) -> Result<Rank2Decomposition> {
    let mut weights = Vec::with_capacity(isometry.len());
    let mut vectors = Vec::with_capacity(isometry.len());
    for row in isometry {
        let v = combine(&w.w, row);
        let p: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let direction = if p > NEGLIGIBLE_WEIGHT { v } else { combine(&w.e, row) };
        weights.push(p);
        vectors.push(PureState::normalized(direction)?.with_labels(labels.to_vec())?);
    }
    Ok(Rank2Decomposition {
        weights,
        vectors,
        isometry: isometry.to_vec(),
    })
}

/// Pure-state measures the roof can extend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RoofMeasure {
    /// Three-tangle of a three-qubit state.
    ThreeTangle,
    /// Four-tangle `4|ad+bc|²` of an F1-form four-qubit state.
    Tau4F1,
}

impl RoofMeasure {
    pub fn name(self) -> &'static str {
        match self {
            RoofMeasure::ThreeTangle => "tau3",
            RoofMeasure::Tau4F1 => "tau4_f1",
        }
    }

    pub fn parse(s: &str) -> Result<RoofMeasure> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tau3" | "three_tangle" => Ok(RoofMeasure::ThreeTangle),
            "tau4" | "tau4_f1" => Ok(RoofMeasure::Tau4F1),
            _ => Err(Error::Format(format!("unknown roof measure {s:?}"))),
        }
    }

    fn n_qubits(self) -> usize {
        match self {
            RoofMeasure::ThreeTangle => 3,
            RoofMeasure::Tau4F1 => 4,
        }
    }

    /// Measure of a normalized pure state.
    pub fn evaluate(self, state: &PureState) -> Result<f64> {
        if state.n_qubits() != self.n_qubits() {
            return Err(Error::Dimension {
                expected: self.n_qubits(),
                actual: state.n_qubits(),
            });
        }
        let amps = state.amplitudes();
        match self {
            RoofMeasure::ThreeTangle => Ok(hyperdeterminant_tangle(amps)),
            RoofMeasure::Tau4F1 => {
                check_f1_support(amps)?;
                let f: Vec<C64> = F1_SUPPORT.iter().map(|&i| amps[i]).collect();
                Ok(f1_tangle(&f))
            }
        }
    }
}

/// `4|d1 − 2d2 + 4d3|`, the Cayley hyperdeterminant form of the three-tangle.
/// Homogeneous of degree four in the amplitudes.
pub fn hyperdeterminant_tangle(a: &[C64]) -> f64 {
    let d1 = a[0] * a[0] * a[7] * a[7]
        + a[1] * a[1] * a[6] * a[6]
        + a[2] * a[2] * a[5] * a[5]
        + a[4] * a[4] * a[3] * a[3];
    let d2 = a[0] * a[7] * (a[3] * a[4] + a[5] * a[2] + a[6] * a[1])
        + a[3] * a[4] * (a[5] * a[2] + a[6] * a[1])
        + a[5] * a[2] * a[6] * a[1];
    let d3 = a[0] * a[6] * a[5] * a[3] + a[7] * a[1] * a[2] * a[4];
    4.0 * (d1 - 2.0 * d2 + 4.0 * d3).norm()
}

/// `4|ad + bc|²` on the F1 amplitudes `(a, b, c, −d)`.
fn f1_tangle(f: &[C64]) -> f64 {
    4.0 * (-(f[0] * f[3]) + f[1] * f[2]).norm_sqr()
}

fn check_f1_support(amps: &[C64]) -> Result<()> {
    let off: f64 = amps
        .iter()
        .enumerate()
        .filter(|(i, _)| !F1_SUPPORT.contains(i))
        .map(|(_, z)| z.norm_sqr())
        .sum();
    if off > STATE_TOL {
        return Err(Error::UnsupportedSupport(off));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoofConfig {
    pub m_values: Vec<usize>,
    pub restarts: usize,
    /// Pattern-search step at which a local search stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self {
            m_values: vec![2, 3, 4],
            restarts: 20,
            tolerance: 1e-8,
            max_iterations: 10_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoofResult {
    pub measure: RoofMeasure,
    pub value: f64,
    pub argmin: Rank2Decomposition,
    pub restarts: usize,
    /// Max minus min of the per-restart optima.
    pub spread: f64,
    /// `Σ μ_j·τ(e_j)`, the eigen-decomposition's average.
    pub eigen_value: f64,
}

/// The objective restricted to the coordinates the measure reads.
struct Objective {
    measure: RoofMeasure,
    w: [Vec<C64>; 2],
    rows: Vec<[C64; 2]>,
    scratch: Vec<C64>,
}

impl Objective {
    fn new(measure: RoofMeasure, weighted: &Weighted) -> Self {
        let w = match measure {
            RoofMeasure::ThreeTangle => weighted.w.clone(),
            RoofMeasure::Tau4F1 => {
                [0, 1].map(|j| F1_SUPPORT.iter().map(|&i| weighted.w[j][i]).collect())
            }
        };
        let len = w[0].len();
        Self {
            measure,
            w,
            rows: Vec::with_capacity(MAX_M),
            scratch: vec![ZERO; len],
        }
    }

    fn pure(&self, v: &[C64]) -> f64 {
        match self.measure {
            RoofMeasure::ThreeTangle => hyperdeterminant_tangle(v),
            RoofMeasure::Tau4F1 => f1_tangle(v),
        }
    }

    /// `Σ_x p_x·τ(Z_x) = Σ_x τ(v_x)/‖v_x‖²` by homogeneity.
    fn value_of_rows(&mut self) -> f64 {
        let mut total = 0.0;
        for r in 0..self.rows.len() {
            let (c0, c1) = (self.rows[r][0].conj(), self.rows[r][1].conj());
            let mut p = 0.0;
            for (k, s) in self.scratch.iter_mut().enumerate() {
                *s = c0 * self.w[0][k] + c1 * self.w[1][k];
                p += s.norm_sqr();
            }
            if p > 1e-300 {
                total += self.pure(&self.scratch) / p;
            }
        }
        total
    }

    fn eval(&mut self, m: usize, params: &[f64]) -> f64 {
        givens_isometry(m, params, &mut self.rows);
        self.value_of_rows()
    }
}

/// Number of real parameters of the Givens isometry for `m` rows.
pub fn n_parameters(m: usize) -> usize {
    let base = 2 * (2 * m - 3);
    if m >= 3 {
        base + 1
    } else {
        base
    }
}

/// `m×2` isometry from Givens rotations on the identity columns: planes
/// `(1,k)` for `k ≥ 2`, then `(0,k)` for `k ≥ 1`, each with an angle and a
/// phase, then a relative phase on the second column when `m ≥ 3`.
pub fn givens_isometry(m: usize, params: &[f64], rows: &mut Vec<[C64; 2]>) {
    rows.clear();
    rows.resize(m, [ZERO; 2]);
    rows[0][0] = C64::new(1.0, 0.0);
    rows[1][1] = C64::new(1.0, 0.0);
    let mut it = params.chunks_exact(2);
    let planes = (2..m).map(|k| (1, k)).chain((1..m).map(|k| (0, k)));
    for (i, k) in planes {
        let pair = it.next().expect("parameter count matches m");
        let (s, c) = libm::sincos(pair[0]);
        let (ps, pc) = libm::sincos(pair[1]);
        let ph = C64::new(pc, ps);
        for col in 0..2 {
            let (ri, rk) = (rows[i][col], rows[k][col]);
            rows[i][col] = ri * c - ph * rk * s;
            rows[k][col] = ph.conj() * ri * s + rk * c;
        }
    }
    if m >= 3 {
        let chi = params[params.len() - 1];
        let (s, c) = libm::sincos(chi);
        let ph = C64::new(c, s);
        for r in rows.iter_mut() {
            r[1] *= ph;
        }
    }
}

/// Hooke-Jeeves pattern search from `start`; returns the best point and value.
fn pattern_search(
    objective: &mut Objective,
    m: usize,
    start: Vec<f64>,
    config: &RoofConfig,
) -> (Vec<f64>, f64) {
    let mut base = start;
    let mut fb = objective.eval(m, &base);
    let mut step = 0.5;
    let mut iterations = 0;
    while step >= config.tolerance && iterations < config.max_iterations {
        iterations += 1;
        let (mut xe, mut fe) = explore(objective, m, &base, fb, step);
        if fe < fb {
            while iterations < config.max_iterations {
                iterations += 1;
                let xp: Vec<f64> = xe.iter().zip(&base).map(|(e, b)| 2.0 * e - b).collect();
                base = xe;
                fb = fe;
                let fp = objective.eval(m, &xp);
                let (x2, f2) = explore(objective, m, &xp, fp, step);
                if f2 < fb {
                    xe = x2;
                    fe = f2;
                } else {
                    break;
                }
            }
        } else {
            step *= 0.5;
        }
    }
    (base, fb)
}

fn explore(objective: &mut Objective, m: usize, x: &[f64], fx: f64, step: f64) -> (Vec<f64>, f64) {
    let mut x = x.to_vec();
    let mut fx = fx;
    for i in 0..x.len() {
        let orig = x[i];
        x[i] = orig + step;
        let up = objective.eval(m, &x);
        if up < fx {
            fx = up;
            continue;
        }
        x[i] = orig - step;
        let down = objective.eval(m, &x);
        if down < fx {
            fx = down;
            continue;
        }
        x[i] = orig;
    }
    (x, fx)
}

fn validate(dm: &DensityMatrix, measure: RoofMeasure, config: &RoofConfig) -> Result<()> {
    if dm.n_qubits() != measure.n_qubits() {
        return Err(Error::Dimension {
            expected: measure.n_qubits(),
            actual: dm.n_qubits(),
        });
    }
    if config.m_values.is_empty() || config.m_values.iter().any(|m| !(2..=MAX_M).contains(m)) {
        return Err(Error::Domain(format!(
            "m values {:?} must be non-empty and within [2, {MAX_M}]",
            config.m_values
        )));
    }
    if config.restarts == 0 {
        return Err(Error::Domain(String::from("restarts must be at least 1")));
    }
    if !(config.tolerance > 0.0) {
        return Err(Error::Domain(String::from("tolerance must be positive")));
    }
    Ok(())
}

/// Minimizes `Σ p_x·τ(Z_x)` over decompositions of size `m ∈ config.m_values`.
///
/// Restart 0 starts every `m` from the eigen-decomposition, later restarts
/// from random Givens parameters drawn from stream `(seed, restart)`.
pub fn roof_minimize(dm: &DensityMatrix, measure: RoofMeasure, config: &RoofConfig) -> Result<RoofResult> {
    validate(dm, measure, config)?;
    let split = eigen_split(dm)?;
    if measure == RoofMeasure::Tau4F1 {
        check_f1_support(split.psi1.amplitudes())?;
        if !split.rank_one {
            check_f1_support(split.psi2.amplitudes())?;
        }
    }
    let weighted = Weighted::new(&split);
    let identity = [[C64::new(1.0, 0.0), ZERO], [ZERO, C64::new(1.0, 0.0)]];
    if split.rank_one {
        let value = measure.evaluate(&split.psi1)?;
        return Ok(RoofResult {
            measure,
            value,
            argmin: build_decomposition(&weighted, &identity, dm.labels())?,
            restarts: 0,
            spread: 0.0,
            eigen_value: value,
        });
    }
    let mut objective = Objective::new(measure, &weighted);
    objective.rows.clear();
    objective.rows.extend_from_slice(&identity);
    let eigen_value = objective.value_of_rows();

    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in 0..config.restarts {
        let mut rng = random::stream_rng(config.seed, r as u64);
        let mut restart_best = f64::INFINITY;
        for &m in &config.m_values {
            let start: Vec<f64> = if r == 0 {
                vec![0.0; n_parameters(m)]
            } else {
                (0..n_parameters(m))
                    .map(|_| rng.gen_range(0.0..core::f64::consts::TAU))
                    .collect()
            };
            let (x, f) = pattern_search(&mut objective, m, start, config);
            restart_best = restart_best.min(f);
            if best.as_ref().is_none_or(|(bf, _, _)| f < *bf) {
                best = Some((f, m, x));
            }
        }
        lo = lo.min(restart_best);
        hi = hi.max(restart_best);
    }
    let (value, m, x) = best.expect("at least one restart");
    let mut rows = Vec::new();
    givens_isometry(m, &x, &mut rows);
    Ok(RoofResult {
        measure,
        value,
        argmin: build_decomposition(&weighted, &rows, dm.labels())?,
        restarts: config.restarts,
        spread: hi - lo,
        eigen_value,
    })
}

/// Roof of the F1 four-tangle over decompositions that stay F1-form.
pub fn tau4_roof_restricted(dm: &DensityMatrix, config: &RoofConfig) -> Result<RoofResult> {
    roof_minimize(dm, RoofMeasure::Tau4F1, config)
}
