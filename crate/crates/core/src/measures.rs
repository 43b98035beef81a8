//! Scalar correlation measures on generic states: linear entropy, Wootters
//! concurrence, residual correlations `M_k`, their average `E_ms`, the pure
//! three-tangle, and the complementarity-relation solver for four qubits.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::qstate::{DensityMatrix, PureState, Qubit};

/// Density-matrix eigenvalues below this are treated as exact zeros before
/// square roots are taken; it bounds the √ε blow-up of round-off.
pub const NUMERICAL_RANK_FLOOR: f64 = 1e-14;
/// Monogamy slack: pure four-qubit states have `M_k >= -MONOGAMY_TOL`.
pub const MONOGAMY_TOL: f64 = 1e-9;

/// Unordered qubit pair of a four-qubit register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Pair {
    AB,
    AC,
    AD,
    BC,
    BD,
    CD,
}

impl Pair {
    pub const ALL: [Pair; 6] = [Pair::AB, Pair::AC, Pair::AD, Pair::BC, Pair::BD, Pair::CD];

    pub fn qubits(self) -> [Qubit; 2] {
        match self {
            Pair::AB => [Qubit::A, Qubit::B],
            Pair::AC => [Qubit::A, Qubit::C],
            Pair::AD => [Qubit::A, Qubit::D],
            Pair::BC => [Qubit::B, Qubit::C],
            Pair::BD => [Qubit::B, Qubit::D],
            Pair::CD => [Qubit::C, Qubit::D],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Pair::AB => "AB",
            Pair::AC => "AC",
            Pair::AD => "AD",
            Pair::BC => "BC",
            Pair::BD => "BD",
            Pair::CD => "CD",
        }
    }

    pub fn parse(s: &str) -> Option<Pair> {
        Pair::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
    }
}

/// Qubit triple of a four-qubit register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Triple {
    ABC,
    ABD,
    ACD,
    BCD,
}

impl Triple {
    pub const ALL: [Triple; 4] = [Triple::ABC, Triple::ABD, Triple::ACD, Triple::BCD];

    pub fn qubits(self) -> [Qubit; 3] {
        match self {
            Triple::ABC => [Qubit::A, Qubit::B, Qubit::C],
            Triple::ABD => [Qubit::A, Qubit::B, Qubit::D],
            Triple::ACD => [Qubit::A, Qubit::C, Qubit::D],
            Triple::BCD => [Qubit::B, Qubit::C, Qubit::D],
        }
    }

    pub fn contains(self, q: Qubit) -> bool {
        self.qubits().contains(&q)
    }

    pub fn name(self) -> &'static str {
        match self {
            Triple::ABC => "ABC",
            Triple::ABD => "ABD",
            Triple::ACD => "ACD",
            Triple::BCD => "BCD",
        }
    }

    pub fn parse(s: &str) -> Option<Triple> {
        Triple::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
    }
}

/// `τ_{k(R_k)} = 4 det ρ_k`: total correlation of qubit `k` with the rest.
pub fn linear_entropy(state: &PureState, k: Qubit) -> Result<f64> {
    let rho = state.partial_trace(&[k])?;
    let m = rho.matrix();
    Ok(4.0 * (m[(0, 0)].re * m[(1, 1)].re - m[(0, 1)].norm_sqr()))
}

/// Square roots of the eigenvalues of `ρ ρ̃`, descending.
///
/// With `ρ = W W†` from the eigen-decomposition, these equal the singular
/// values of `Wᵀ (σy⊗σy) W`, whose squares are the spectrum of the Hermitian
/// `√ρ ρ̃ √ρ`. Taking singular values directly keeps zero modes at machine
/// precision instead of √ε.
pub fn wootters_roots(dm: &DensityMatrix) -> Result<[f64; 4]> {
    if dm.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            actual: dm.dim(),
        });
    }
    let (vals, vecs) = dm.clipped_eigen()?;
    let mut w = CMatrix::zeros(4);
    for (j, &lambda) in vals.iter().enumerate() {
        if lambda < NUMERICAL_RANK_FLOOR {
            continue;
        }
        let s = libm::sqrt(lambda);
        for i in 0..4 {
            w[(i, j)] = vecs[(i, j)] * s;
        }
    }
    // (σy⊗σy)_{i,3-i} = [-1, 1, 1, -1]
    const SIGN: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
    let mut t = CMatrix::zeros(4);
    for a in 0..4 {
        for b in 0..4 {
            t[(a, b)] = (0..4)
                .map(|i| w[(i, a)] * w[(3 - i, b)] * SIGN[i])
                .sum::<C64>();
        }
    }
    let sv = linalg::singular_values(&t);
    Ok([sv[0], sv[1], sv[2], sv[3]])
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn concurrence(dm: &DensityMatrix) -> Result<f64> {
    let s = wootters_roots(dm)?;
    Ok((s[0] - s[1] - s[2] - s[3]).max(0.0))
}

/// `C²` of the two-qubit marginal of a pure state.
pub fn pair_concurrence_sq(state: &PureState, k: Qubit, l: Qubit) -> Result<f64> {
    let c = concurrence(&state.partial_trace(&[k, l])?)?;
    Ok(c * c)
}

/// `M_k = τ_{k(R_k)} − Σ_{l≠k} C²_{kl}`.
pub fn residual_correlation(state: &PureState, k: Qubit) -> Result<f64> {
    state.check_qubit(k)?;
    let tau = linear_entropy(state, k)?;
    let mut pairs = 0.0;
    for l in (0..state.n_qubits()).map(Qubit).filter(|&l| l != k) {
        pairs += pair_concurrence_sq(state, k, l)?;
    }
    Ok(tau - pairs)
}

/// Average multipartite correlation `E_ms = (Σ_k M_k) / n` for `n >= 3`.
pub fn ems(state: &PureState) -> Result<f64> {
    let n = state.n_qubits();
    if n < 3 {
        return Err(Error::Domain(format!("E_ms needs at least 3 qubits, got {n}")));
    }
    Ok(residuals(state)?.iter().sum::<f64>() / n as f64)
}

/// All `M_k` with each pairwise concurrence evaluated once.
pub fn residuals(state: &PureState) -> Result<Vec<f64>> {
    let n = state.n_qubits();
    let mut m: Vec<f64> = (0..n)
        .map(|k| linear_entropy(state, Qubit(k)))
        .collect::<Result<_>>()?;
    for k in 0..n {
        for l in (k + 1)..n {
            let c2 = pair_concurrence_sq(state, Qubit(k), Qubit(l))?;
            m[k] -= c2;
            m[l] -= c2;
        }
    }
    Ok(m)
}

/// Pure-state three-tangle as the residual `τ_{A(BC)} − C²_AB − C²_AC`,
/// clipped to zero within 1e-10.
pub fn pure_three_tangle(state: &PureState) -> Result<f64> {
    pure_three_tangle_about(state, Qubit::A)
}

/// Three-tangle with `focus` playing the role of qubit A.
pub fn pure_three_tangle_about(state: &PureState, focus: Qubit) -> Result<f64> {
    if state.n_qubits() != 3 {
        return Err(Error::Dimension {
            expected: 3,
            actual: state.n_qubits(),
        });
    }
    let tau = residual_correlation(state, focus)?;
    if tau < -crate::qstate::EIGEN_FLOOR {
        return Err(Error::NegativeEigenvalue(tau));
    }
    Ok(tau.max(0.0))
}

/// Solution of the four-qubit complementarity system
/// `t4 + Σ_{triples ∋ k} t3 = M_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QcrSolution {
    pub t4: f64,
    pub t3: BTreeMap<Triple, f64>,
    /// Largest absolute equation violation.
    pub residual: f64,
}

/// Least-squares solve of the complementarity system given some known `t3`.
///
/// Values are reported unclamped; a nonzero residual flags that the inputs
/// are not compatible with the relations.
pub fn qcr_solve(m: [f64; 4], known_t3: &BTreeMap<Triple, f64>) -> Result<QcrSolution> {
    let unknown: Vec<Triple> = Triple::ALL
        .into_iter()
        .filter(|t| !known_t3.contains_key(t))
        .collect();
    let mut rows = Vec::with_capacity(4);
    let mut rhs = Vec::with_capacity(4);
    for (k, &mk) in m.iter().enumerate() {
        let q = Qubit(k);
        let mut row = Vec::with_capacity(unknown.len() + 1);
        row.push(1.0);
        row.extend(unknown.iter().map(|t| if t.contains(q) { 1.0 } else { 0.0 }));
        rows.push(row);
        let known: f64 = known_t3
            .iter()
            .filter(|(t, _)| t.contains(q))
            .map(|(_, v)| v)
            .sum();
        rhs.push(mk - known);
    }
    let x = linalg::least_squares(&rows, &rhs).map_err(Error::Underdetermined)?;

    let mut t3 = known_t3.clone();
    for (t, &v) in unknown.iter().zip(&x[1..]) {
        t3.insert(*t, v);
    }
    let t4 = x[0];
    let residual = (0..4)
        .map(|k| {
            let lhs = t4
                + t3
                    .iter()
                    .filter(|(t, _)| t.contains(Qubit(k)))
                    .map(|(_, v)| v)
                    .sum::<f64>();
            (lhs - m[k]).abs()
        })
        .fold(0.0, f64::max);
    Ok(QcrSolution { t4, t3, residual })
}

/// Per-state summary of the correlation quantities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub tau_k: BTreeMap<String, f64>,
    pub c2_pairs: BTreeMap<String, f64>,
    pub m_k: BTreeMap<String, f64>,
    pub e_ms: f64,
    pub t3: Option<BTreeMap<String, f64>>,
    pub t4: Option<f64>,
    pub qcr_residual: Option<f64>,
}

/// Computes every measure of a pure state with at least 3 qubits. For four
/// qubits and a set of known `t3` values, the complementarity system is
/// solved as well.
pub fn correlation_report(
    state: &PureState,
    known_t3: Option<&BTreeMap<Triple, f64>>,
) -> Result<CorrelationReport> {
    let n = state.n_qubits();
    let labels = state.labels();
    let key = |qs: &[usize]| qs.iter().map(|&q| labels[q]).collect::<String>();

    let mut tau_k = BTreeMap::new();
    let mut m_vals = Vec::with_capacity(n);
    for k in 0..n {
        let tau = linear_entropy(state, Qubit(k))?;
        tau_k.insert(key(&[k]), tau);
        m_vals.push(tau);
    }
    let mut c2_pairs = BTreeMap::new();
    for k in 0..n {
        for l in (k + 1)..n {
            let c2 = pair_concurrence_sq(state, Qubit(k), Qubit(l))?;
            c2_pairs.insert(key(&[k, l]), c2);
            m_vals[k] -= c2;
            m_vals[l] -= c2;
        }
    }
    if n < 3 {
        return Err(Error::Domain(format!("E_ms needs at least 3 qubits, got {n}")));
    }
    let e_ms = m_vals.iter().sum::<f64>() / n as f64;
    let m_k = m_vals
        .iter()
        .enumerate()
        .map(|(k, &v)| (key(&[k]), v))
        .collect();

    let (t3, t4, qcr_residual) = match known_t3 {
        Some(known) if n == 4 => {
            let sol = qcr_solve([m_vals[0], m_vals[1], m_vals[2], m_vals[3]], known)?;
            let t3 = sol
                .t3
                .iter()
                .map(|(t, &v)| {
                    let qs: Vec<usize> = t.qubits().iter().map(|q| q.0).collect();
                    (key(&qs), v)
                })
                .collect();
            (Some(t3), Some(sol.t4), Some(sol.residual))
        }
        _ => (None, None, None),
    };

    Ok(CorrelationReport {
        tau_k,
        c2_pairs,
        m_k,
        e_ms,
        t3,
        t4,
        qcr_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::make_pure;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn ghz(n: usize) -> PureState {
        let zeros: String = "0".repeat(n);
        let ones: String = "1".repeat(n);
        make_pure(n, &[(&zeros, r(1.0)), (&ones, r(1.0))]).unwrap().0
    }

    #[test]
    fn linear_entropy_basics() {
        let prod = PureState::basis(4, 0).unwrap();
        assert_eq!(linear_entropy(&prod, Qubit::A).unwrap(), 0.0);
        let g = ghz(4);
        for k in 0..4 {
            assert!((linear_entropy(&g, Qubit(k)).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_entropy_family2_qubit_c() {
        // a'|0000> - b'|0111> - c'|1010> + d'|1101>, (2, 2, 0.2, 3)
        let (s, _) = make_pure(
            4,
            &[
                ("0000", r(2.0)),
                ("0111", r(-2.0)),
                ("1010", r(-0.2)),
                ("1101", r(3.0)),
            ],
        )
        .unwrap();
        // 4(|a|²+|d|²)(|b|²+|c|²) with norm² = 17.04
        let oracle = 4.0 * (4.0 + 9.0) * (4.0 + 0.04) / (17.04 * 17.04);
        let tau = linear_entropy(&s, Qubit::C).unwrap();
        assert!((tau - oracle).abs() < 1e-14);
        assert!((tau - 0.72351).abs() < 1e-5);
    }

    #[test]
    fn bell_concurrence_is_one() {
        let (s, _) = make_pure(2, &[("00", r(1.0)), ("11", r(1.0))]).unwrap();
        let c = concurrence(&s.density_matrix()).unwrap();
        assert!((c - 1.0).abs() < 1e-14);
    }

    #[test]
    fn concurrence_rejects_wrong_size() {
        let s = PureState::basis(3, 0).unwrap();
        assert!(matches!(
            concurrence(&s.density_matrix()),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn three_tangle_ghz_w_product() {
        assert!((pure_three_tangle(&ghz(3)).unwrap() - 1.0).abs() < 1e-12);
        let (w, _) = make_pure(3, &[("001", r(1.0)), ("010", r(1.0)), ("100", r(1.0))]).unwrap();
        assert!(pure_three_tangle(&w).unwrap() < 1e-9);
        let (prod, _) = make_pure(3, &[("000", r(1.0)), ("011", r(1.0))]).unwrap();
        assert!(pure_three_tangle(&prod).unwrap() < 1e-12);
    }

    #[test]
    fn w_state_pieces() {
        let (w, _) = make_pure(3, &[("001", r(1.0)), ("010", r(1.0)), ("100", r(1.0))]).unwrap();
        assert!((linear_entropy(&w, Qubit::A).unwrap() - 8.0 / 9.0).abs() < 1e-14);
        let c2 = pair_concurrence_sq(&w, Qubit::A, Qubit::B).unwrap();
        assert!((c2 - 4.0 / 9.0).abs() < 1e-13);
    }

    #[test]
    fn ems_requires_three_qubits() {
        let s = PureState::basis(2, 0).unwrap();
        assert!(matches!(ems(&s), Err(Error::Domain(_))));
    }

    #[test]
    fn qcr_all_known() {
        let known: BTreeMap<Triple, f64> = Triple::ALL.into_iter().map(|t| (t, 0.0)).collect();
        let sol = qcr_solve([1.0; 4], &known).unwrap();
        assert!((sol.t4 - 1.0).abs() < 1e-15);
        assert!(sol.residual < 1e-15);
    }

    #[test]
    fn qcr_inconsistent_system_reports_violation() {
        let known: BTreeMap<Triple, f64> = Triple::ALL.into_iter().map(|t| (t, 0.0)).collect();
        let sol = qcr_solve([1.0, 1.0, 1.0, 0.0], &known).unwrap();
        assert!((sol.t4 - 0.75).abs() < 1e-15);
        // violations are 1/4 on A, B, C and 3/4 on D
        assert!((sol.residual - 0.75).abs() < 1e-15);
    }

    #[test]
    fn qcr_underdetermined_without_knowns() {
        assert_eq!(
            qcr_solve([1.0; 4], &BTreeMap::new()),
            Err(Error::Underdetermined(1))
        );
    }

    #[test]
    fn qcr_single_known_is_determined() {
        let mut known = BTreeMap::new();
        known.insert(Triple::ABC, 0.0);
        let sol = qcr_solve([0.5, 0.5, 0.5, 0.5], &known).unwrap();
        assert!(sol.residual < 1e-12);
        assert_eq!(sol.t3.len(), 4);
    }

    #[test]
    fn pair_and_triple_names_parse() {
        for p in Pair::ALL {
            assert_eq!(Pair::parse(p.name()), Some(p));
        }
        for t in Triple::ALL {
            assert_eq!(Triple::parse(&t.name().to_lowercase()), Some(t));
        }
    }
}
