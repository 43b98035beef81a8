//! Cluster-class state families and their closed-form entanglement measures.
//!
//! Coefficients are raw (non-normalized) everywhere in the public API and
//! are normalized exactly once, when a state or record is built.
//!
//! | family | kets |
//! |--------|------|
//! | F1 (1D)  | `a|0000> + b|0011> + c|1100> - d|1111>` |
//! | F2 (box) | `a|0000> - b|0111> - c|1010> + d|1101>` |
//! | F3 (GHZ) | `a|0000> + b|1111>` |
//! | F6       | `a|000000> + b|000111> + c|111000> - d|111111>` |
//! | GHZ_N    | `a|0...0> + b|1...1>` |

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{C64, ZERO};
use crate::measures::{self, Pair, Triple};
use crate::qstate::{PureState, Qubit, MAX_QUBITS};

/// Weight outside a family's kets tolerated when fitting coefficients.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FamilyTag {
    F1,
    F2,
    F3,
    F6,
    Ghz(usize),
}

impl FamilyTag {
    pub fn n_qubits(self) -> usize {
        match self {
            FamilyTag::F1 | FamilyTag::F2 | FamilyTag::F3 => 4,
            FamilyTag::F6 => 6,
            FamilyTag::Ghz(n) => n,
        }
    }

    pub fn n_coefficients(self) -> usize {
        match self {
            FamilyTag::F3 | FamilyTag::Ghz(_) => 2,
            _ => 4,
        }
    }

    /// Basis index and sign attached to each coefficient.
    pub fn kets(self) -> Vec<(usize, f64)> {
        match self {
            FamilyTag::F1 => vec![(0b0000, 1.0), (0b0011, 1.0), (0b1100, 1.0), (0b1111, -1.0)],
            FamilyTag::F2 => vec![(0b0000, 1.0), (0b0111, -1.0), (0b1010, -1.0), (0b1101, 1.0)],
            FamilyTag::F3 => vec![(0b0000, 1.0), (0b1111, 1.0)],
            FamilyTag::F6 => vec![
                (0b000000, 1.0),
                (0b000111, 1.0),
                (0b111000, 1.0),
                (0b111111, -1.0),
            ],
            FamilyTag::Ghz(n) => vec![(0, 1.0), ((1 << n) - 1, 1.0)],
        }
    }

    pub fn name(self) -> String {
        match self {
            FamilyTag::F1 => String::from("f1"),
            FamilyTag::F2 => String::from("f2"),
            FamilyTag::F3 => String::from("f3"),
            FamilyTag::F6 => String::from("f6"),
            FamilyTag::Ghz(n) => format!("ghz{n}"),
        }
    }

    /// Parses `f1`, `f2`, `f3`, `f6`, or `ghz<n>` / `ghz:<n>`.
    pub fn parse(s: &str) -> Result<FamilyTag> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "f1" => Ok(FamilyTag::F1),
            "f2" => Ok(FamilyTag::F2),
            "f3" => Ok(FamilyTag::F3),
            "f6" => Ok(FamilyTag::F6),
            other => {
                let n = other
                    .strip_prefix("ghz")
                    .map(|rest| rest.trim_start_matches([':', '_']))
                    .and_then(|rest| rest.parse::<usize>().ok())
                    .ok_or_else(|| Error::Format(format!("unknown family {s:?}")))?;
                FamilyTag::ghz(n)
            }
        }
    }

    pub fn ghz(n: usize) -> Result<FamilyTag> {
        if !(2..=MAX_QUBITS).contains(&n) {
            return Err(Error::RegisterSize(n));
        }
        Ok(FamilyTag::Ghz(n))
    }

    /// Triples whose three-tangle vanishes identically on the family, used
    /// as the known inputs of the complementarity solver.
    pub fn known_t3(self) -> Option<BTreeMap<Triple, f64>> {
        let zero = |ts: &[Triple]| ts.iter().map(|&t| (t, 0.0)).collect();
        match self {
            FamilyTag::F1 | FamilyTag::F3 => Some(zero(&Triple::ALL)),
            FamilyTag::F2 => Some(zero(&[Triple::ABC, Triple::ACD])),
            FamilyTag::Ghz(4) => Some(zero(&Triple::ALL)),
            _ => None,
        }
    }
}

/// A family tag with raw coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterFamily {
    pub tag: FamilyTag,
    pub coefficients: Vec<C64>,
}

impl ClusterFamily {
    pub fn new(tag: FamilyTag, coefficients: &[C64]) -> Result<Self> {
        if coefficients.len() != tag.n_coefficients() {
            return Err(Error::Dimension {
                expected: tag.n_coefficients(),
                actual: coefficients.len(),
            });
        }
        Ok(Self {
            tag,
            coefficients: coefficients.to_vec(),
        })
    }

    pub fn from_reals(tag: FamilyTag, coefficients: &[f64]) -> Result<Self> {
        let c: Vec<C64> = coefficients.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::new(tag, &c)
    }

    pub fn normalized_coefficients(&self) -> Result<Vec<C64>> {
        normalize(&self.coefficients)
    }
}

fn normalize(coefficients: &[C64]) -> Result<Vec<C64>> {
    let norm = libm::sqrt(coefficients.iter().map(|z| z.norm_sqr()).sum::<f64>());
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Normalization);
    }
    Ok(coefficients.iter().map(|z| z / norm).collect())
}

/// Normalized state of a family with the sign conventions baked in.
pub fn family_state(family: &ClusterFamily) -> Result<PureState> {
    let tag = family.tag;
    let mut amps = vec![ZERO; 1 << tag.n_qubits()];
    for ((index, sign), &c) in tag.kets().into_iter().zip(&family.coefficients) {
        amps[index] = c * sign;
    }
    PureState::normalized(amps)
}

/// Reads the (normalized) family coefficients off a state whose support
/// lies on the family's kets.
pub fn fit_coefficients(tag: FamilyTag, state: &PureState) -> Result<Vec<C64>> {
    if state.n_qubits() != tag.n_qubits() {
        return Err(Error::UnsupportedFamily(format!(
            "{}-qubit state is not in family {}",
            state.n_qubits(),
            tag.name()
        )));
    }
    let kets = tag.kets();
    let amps = state.amplitudes();
    let on_support: f64 = kets.iter().map(|&(i, _)| amps[i].norm_sqr()).sum();
    let off_support = state.norm_sqr() - on_support;
    if off_support > SUPPORT_TOL {
        return Err(Error::UnsupportedFamily(format!(
            "weight {off_support:e} outside the kets of family {}",
            tag.name()
        )));
    }
    Ok(kets.iter().map(|&(i, sign)| amps[i] * sign).collect())
}

/// Entries of the closed-form table for one state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormRecord {
    pub tau4: f64,
    pub tau3: BTreeMap<Triple, f64>,
    pub tau2: BTreeMap<Pair, f64>,
    pub e_ms: f64,
}

impl ClosedFormRecord {
    fn zeros() -> Self {
        Self {
            tau4: 0.0,
            tau3: Triple::ALL.into_iter().map(|t| (t, 0.0)).collect(),
            tau2: Pair::ALL.into_iter().map(|p| (p, 0.0)).collect(),
            e_ms: 0.0,
        }
    }

    fn nan() -> Self {
        Self {
            tau4: f64::NAN,
            tau3: Triple::ALL.into_iter().map(|t| (t, f64::NAN)).collect(),
            tau2: Pair::ALL.into_iter().map(|p| (p, f64::NAN)).collect(),
            e_ms: f64::NAN,
        }
    }

    pub fn tau3(&self, t: Triple) -> f64 {
        self.tau3[&t]
    }

    pub fn tau2(&self, p: Pair) -> f64 {
        self.tau2[&p]
    }

    /// Largest absolute difference over every entry.
    pub fn max_discrepancy(&self, other: &Self) -> f64 {
        let mut d = (self.tau4 - other.tau4).abs().max((self.e_ms - other.e_ms).abs());
        for t in Triple::ALL {
            d = d.max((self.tau3(t) - other.tau3(t)).abs());
        }
        for p in Pair::ALL {
            d = d.max((self.tau2(p) - other.tau2(p)).abs());
        }
        d
    }

    pub fn entries(&self) -> Vec<(String, f64)> {
        let mut out = vec![(String::from("tau4"), self.tau4)];
        out.extend(
            Triple::ALL
                .iter()
                .map(|t| (format!("tau3_{}", t.name().to_ascii_lowercase()), self.tau3(*t))),
        );
        out.extend(
            Pair::ALL
                .iter()
                .map(|p| (format!("tau2_{}", p.name().to_ascii_lowercase()), self.tau2(*p))),
        );
        out.push((String::from("e_ms"), self.e_ms));
        out
    }
}

fn as4(c: &[C64]) -> [C64; 4] {
    [c[0], c[1], c[2], c[3]]
}

/// Table entries for F1, F2 and F3 evaluated on the normalized coefficients.
pub fn closed_form_measures(family: &ClusterFamily) -> Result<ClosedFormRecord> {
    let c = family.normalized_coefficients()?;
    let mut rec = ClosedFormRecord::zeros();
    match family.tag {
        FamilyTag::F1 => {
            let [a, b, c, d] = as4(&c);
            rec.tau4 = 4.0 * (a * d + b * c).norm_sqr();
            rec.tau2.insert(Pair::AB, 4.0 * (a.conj() * c - b.conj() * d).norm_sqr());
            rec.tau2.insert(Pair::CD, 4.0 * (a.conj() * b - c.conj() * d).norm_sqr());
            rec.e_ms = rec.tau4;
        }
        FamilyTag::F2 => {
            let [a, b, c, d] = as4(&c);
            let (a, b, c, d) = (a.norm(), b.norm(), c.norm(), d.norm());
            rec.tau4 = 16.0 * a * b * c * d;
            rec.tau3.insert(Triple::ABD, 4.0 * sq(a * d - b * c));
            rec.tau3.insert(Triple::BCD, 4.0 * sq(a * b - c * d));
            rec.tau2.insert(Pair::AC, 4.0 * sq(a * c - b * d));
            rec.e_ms = ems_family2_normalized(a, b, c, d);
        }
        FamilyTag::F3 => {
            rec.tau4 = 4.0 * (c[0] * c[1]).norm_sqr();
            rec.e_ms = rec.tau4;
        }
        other => {
            return Err(Error::UnsupportedFamily(format!(
                "no closed-form table for {}",
                other.name()
            )))
        }
    }
    Ok(rec)
}

#[inline]
fn sq(x: f64) -> f64 {
    x * x
}

fn ems_family2_normalized(a: f64, b: f64, c: f64, d: f64) -> f64 {
    3.0 * (a * a + c * c) * (b * b + d * d) + 4.0 * a * b * c * d
}

/// Same table entries computed through the numeric pipeline: partial traces,
/// Wootters concurrences, linear entropies and the complementarity solver
/// with the family's vanishing three-tangles as known inputs.
pub fn numeric_measures(family: &ClusterFamily) -> Result<ClosedFormRecord> {
    let known = match family.tag {
        FamilyTag::F1 | FamilyTag::F2 | FamilyTag::F3 => family.tag.known_t3().unwrap(),
        other => {
            return Err(Error::UnsupportedFamily(format!(
                "no table for {}",
                other.name()
            )))
        }
    };
    let state = family_state(family)?;
    let mut m = [0.0; 4];
    for (k, mk) in m.iter_mut().enumerate() {
        *mk = measures::linear_entropy(&state, Qubit(k))?;
    }
    let mut rec = ClosedFormRecord::zeros();
    for p in Pair::ALL {
        let [k, l] = p.qubits();
        let c2 = measures::pair_concurrence_sq(&state, k, l)?;
        rec.tau2.insert(p, c2);
        m[k.0] -= c2;
        m[l.0] -= c2;
    }
    let sol = measures::qcr_solve(m, &known)?;
    rec.tau4 = sol.t4;
    rec.tau3 = sol.t3;
    rec.e_ms = m.iter().sum::<f64>() / 4.0;
    Ok(rec)
}

/// `E_ms` of F2 in closed form: `3(|a|²+|c|²)(|b|²+|d|²) + 4|abcd|`.
pub fn ems_closed_family2(coefficients: &[C64; 4]) -> Result<f64> {
    let c = normalize(coefficients)?;
    Ok(ems_family2_normalized(c[0].norm(), c[1].norm(), c[2].norm(), c[3].norm()))
}

fn check_povm_parameter(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("{name} = {x} must lie in (0, 1)")));
    }
    Ok(())
}

/// Closed-form average change of `E_ms` on F2 under the diagonal two-outcome
/// POVM `diag(α, β)`, `diag(√(1−α²), √(1−β²))` applied to qubit A or C.
pub fn delta_ems_closed_family2(
    coefficients: &[C64; 4],
    alpha: f64,
    beta: f64,
    target: Qubit,
) -> Result<f64> {
    check_povm_parameter("alpha", alpha)?;
    check_povm_parameter("beta", beta)?;
    let c = normalize(coefficients)?;
    let (a, b, c, d) = (c[0].norm(), c[1].norm(), c[2].norm(), c[3].norm());
    let (w0, w1, bracket) = match target {
        Qubit::A => {
            let (w0, w1) = (a * a + b * b, c * c + d * d);
            (w0, w1, 4.0 * a * b * c * d * w0 * w1 + 3.0 * sq(sq(b * c) - sq(a * d)))
        }
        Qubit::C => {
            let (w0, w1) = (a * a + d * d, b * b + c * c);
            (w0, w1, 4.0 * a * b * c * d * w0 * w1 + 3.0 * sq(sq(a * b) - sq(c * d)))
        }
        other => {
            return Err(Error::Domain(format!(
                "closed form only for qubits A and C, got {}",
                other.label()
            )))
        }
    };
    let p1 = alpha * alpha * w0 + beta * beta * w1;
    let p2 = 1.0 - p1;
    Ok(sq(alpha * alpha - beta * beta) * bracket / (p1 * p2))
}

/// Two-parameter grid over raw coefficients of F1 or F2.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub family: FamilyTag,
    /// Indices (0..4, i.e. a..d) of the two coefficients that vary.
    pub vary: [usize; 2],
    pub range: (f64, f64),
    pub steps: usize,
    /// Raw values of the coefficients; the varied ones are overwritten.
    pub base: [C64; 4],
    /// Evaluate through the numeric pipeline instead of closed forms.
    pub numeric: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub coefficients: [C64; 4],
    pub record: ClosedFormRecord,
}

/// Evaluates every grid point, row-major in the first varied coefficient.
/// A point whose raw coefficients all vanish yields a row of NaNs.
pub fn scan_grid(spec: &ScanSpec) -> Result<Vec<ScanRow>> {
    if !matches!(spec.family, FamilyTag::F1 | FamilyTag::F2) {
        return Err(Error::UnsupportedFamily(format!(
            "scans cover f1 and f2, not {}",
            spec.family.name()
        )));
    }
    if spec.steps < 2 {
        return Err(Error::Domain(format!("steps = {} must be at least 2", spec.steps)));
    }
    let [i, j] = spec.vary;
    if i >= 4 || j >= 4 || i == j {
        return Err(Error::Domain(format!("invalid coefficient pair ({i}, {j})")));
    }
    let (lo, hi) = spec.range;
    let at = |k: usize| lo + (hi - lo) * k as f64 / (spec.steps - 1) as f64;
    let mut rows = Vec::with_capacity(spec.steps * spec.steps);
    for u in 0..spec.steps {
        for v in 0..spec.steps {
            let mut coefficients = spec.base;
            coefficients[i] = C64::new(at(u), 0.0);
            coefficients[j] = C64::new(at(v), 0.0);
            let family = ClusterFamily::new(spec.family, &coefficients)?;
            let record = if spec.numeric {
                numeric_measures(&family)
            } else {
                closed_form_measures(&family)
            };
            let record = match record {
                Ok(r) => r,
                Err(Error::Normalization) => ClosedFormRecord::nan(),
                Err(e) => return Err(e),
            };
            rows.push(ScanRow {
                coefficients,
                record,
            });
        }
    }
    Ok(rows)
}

/// Index of a coefficient name `a`..`d`.
pub fn coefficient_index(name: char) -> Option<usize> {
    match name.to_ascii_lowercase() {
        'a' => Some(0),
        'b' => Some(1),
        'c' => Some(2),
        'd' => Some(3),
        _ => None,
    }
}
