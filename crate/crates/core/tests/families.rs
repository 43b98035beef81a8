use qcorr_core::cluster::{self, ClusterFamily, FamilyTag, ScanSpec};
use qcorr_core::locc::{self, FuzzConfig, Generator, Measure, PovmPair};
use qcorr_core::measures::{self, Pair, Triple};
use qcorr_core::{random, Qubit, C64};
use rand::Rng;

fn random_family(tag: FamilyTag, seed: u64) -> ClusterFamily {
    let c = random::complex_gaussian_vec(&mut random::stream_rng(seed, 0), tag.n_coefficients());
    ClusterFamily::new(tag, &c).unwrap()
}

fn reals(x: [f64; 4]) -> [C64; 4] {
    x.map(|v| C64::new(v, 0.0))
}

#[test]
fn closed_forms_match_numeric_pipeline() {
    for tag in [FamilyTag::F1, FamilyTag::F2, FamilyTag::F3] {
        for seed in 0..300 {
            let fam = random_family(tag, seed);
            let closed = cluster::closed_form_measures(&fam).unwrap();
            let numeric = cluster::numeric_measures(&fam).unwrap();
            assert!(closed.max_discrepancy(&numeric) <= 1e-9, "{} seed {seed}", tag.name());
            assert!((0.0..=1.0 + 1e-12).contains(&closed.tau4));
        }
    }
}

#[test]
fn ems_closed_form_is_the_mean_residual() {
    for seed in 0..200 {
        let fam = random_family(FamilyTag::F2, seed);
        let s = cluster::family_state(&fam).unwrap();
        let m = measures::residuals(&s).unwrap();
        let coeffs: [C64; 4] = fam.coefficients.clone().try_into().unwrap();
        let closed = cluster::ems_closed_family2(&coeffs).unwrap();
        assert!((closed - m.iter().sum::<f64>() / 4.0).abs() < 1e-10);
    }
}

#[test]
fn ems_delta_closed_form_matches_numeric() {
    for seed in 0..300 {
        let mut rng = random::stream_rng(seed, 1);
        let c = random::complex_gaussian_vec(&mut rng, 4);
        let (alpha, beta) = (rng.gen_range(1e-3..0.999), rng.gen_range(1e-3..0.999));
        let s = cluster::family_state(&ClusterFamily::new(FamilyTag::F2, &c).unwrap()).unwrap();
        let pair = PovmPair::diagonal(alpha, beta).unwrap();
        let coeffs: [C64; 4] = c.try_into().unwrap();
        for q in [Qubit::A, Qubit::C] {
            let closed = cluster::delta_ems_closed_family2(&coeffs, alpha, beta, q).unwrap();
            let numeric = locc::monotonicity_delta(&Measure::Ems, &s, q, &pair).unwrap().delta;
            assert!((closed - numeric).abs() < 1e-10);
            assert!(closed >= 0.0);
        }
    }
    let box_cluster = reals([0.5; 4]);
    let d = cluster::delta_ems_closed_family2(&box_cluster, 0.9, 0.2, Qubit::A).unwrap();
    assert!(d > 0.0);
    assert_eq!(cluster::delta_ems_closed_family2(&box_cluster, 0.4, 0.4, Qubit::C).unwrap(), 0.0);
}

#[test]
fn residual_scales_with_the_povm_determinant() {
    // single-qubit quantities on the measured qubit scale by |det A|²/p²
    for seed in 0..50 {
        let mut rng = random::stream_rng(seed, 2);
        let s = random::haar_state(&mut rng, 4).unwrap();
        let (alpha, beta) = (rng.gen_range(0.01..0.99), rng.gen_range(0.01..0.99));
        let pair = PovmPair::diagonal(alpha, beta).unwrap();
        let [o1, o2] = locc::apply_povm(&s, Qubit::A, &pair).unwrap();
        let m = measures::residual_correlation(&s, Qubit::A).unwrap();
        let m1 = measures::residual_correlation(o1.state.as_ref().unwrap(), Qubit::A).unwrap();
        let m2 = measures::residual_correlation(o2.state.as_ref().unwrap(), Qubit::A).unwrap();
        let f1 = (alpha * beta / o1.probability).powi(2);
        let f2 = ((1.0 - alpha * alpha) * (1.0 - beta * beta)) / o2.probability.powi(2);
        assert!((m1 - f1 * m).abs() < 1e-10);
        assert!((m2 - f2 * m).abs() < 1e-10);
    }
}

#[test]
fn ems_delta_is_local_unitary_invariant() {
    for seed in 0..30 {
        let mut rng = random::stream_rng(seed, 3);
        let s = random::haar_state(&mut rng, 4).unwrap();
        let v = random::haar_unitary2(&mut rng);
        let (u1, u2) = (random::haar_unitary2(&mut rng), random::haar_unitary2(&mut rng));
        let (alpha, beta) = (rng.gen_range(0.01..0.99), rng.gen_range(0.01..0.99));
        let q = Qubit(rng.gen_range(0..4));
        let full = PovmPair::with_unitaries(alpha, beta, v, u1, u2).unwrap();
        let diag = PovmPair::diagonal(alpha, beta).unwrap();
        let d_full = locc::monotonicity_delta(&Measure::Ems, &s, q, &full).unwrap().delta;
        let rotated = s.transformed(q, &v).unwrap();
        let d_diag = locc::monotonicity_delta(&Measure::Ems, &rotated, q, &diag).unwrap().delta;
        assert!((d_full - d_diag).abs() < 1e-10);
    }
}

#[test]
fn diagonal_povms_keep_the_family() {
    for tag in [FamilyTag::F1, FamilyTag::F2, FamilyTag::F3, FamilyTag::F6] {
        let s = cluster::family_state(&random_family(tag, 4)).unwrap();
        let pair = PovmPair::diagonal(0.3, 0.8).unwrap();
        for q in 0..tag.n_qubits() {
            for o in locc::apply_povm(&s, Qubit(q), &pair).unwrap() {
                assert!(cluster::fit_coefficients(tag, o.state.as_ref().unwrap()).is_ok());
            }
        }
    }
}

#[test]
fn small_campaigns_behave() {
    let run = |m: Measure, tag: FamilyTag| {
        locc::fuzz_campaign(&FuzzConfig::new(m, Generator::Family(tag), 500, 99)).unwrap()
    };
    assert_eq!(run(Measure::Ems, FamilyTag::F2).violations, 0);
    assert_eq!(run(Measure::Tau4(FamilyTag::F1), FamilyTag::F1).violations, 0);
    assert!(run(Measure::Residual(Qubit::C), FamilyTag::F2).violations > 0);
    let mut lu = FuzzConfig::new(Measure::Ems, Generator::Family(FamilyTag::F1), 200, 5);
    lu.unitaries = true;
    assert_eq!(locc::fuzz_campaign(&lu).unwrap().violations, 0);
}

#[test]
fn fuzz_report_points_at_its_minimum() {
    let cfg = FuzzConfig::new(Measure::Residual(Qubit::C), Generator::Family(FamilyTag::F2), 300, 17);
    let r = locc::fuzz_campaign(&cfg).unwrap();
    let fam = ClusterFamily::new(FamilyTag::F2, &r.argmin.coefficients).unwrap();
    let s = cluster::family_state(&fam).unwrap();
    let pair = PovmPair::diagonal(r.argmin.alpha, r.argmin.beta).unwrap();
    let again = locc::monotonicity_delta(&cfg.measure, &s, r.argmin.qubit, &pair).unwrap();
    assert!((again.delta - r.min_delta).abs() < 1e-12);
    assert!(r.min_delta <= r.mean_delta && r.mean_delta <= r.max_delta);
}

#[test]
fn generalized_bell_cluster_has_unit_ems() {
    for (x, y) in [(0.5, 0.5), (1.0, 0.3), (0.2, 2.0)] {
        let fam = ClusterFamily::from_reals(FamilyTag::F1, &[x, y, y, x]).unwrap();
        let rec = cluster::closed_form_measures(&fam).unwrap();
        assert!((rec.e_ms - 1.0).abs() < 1e-12);
        let s = cluster::family_state(&fam).unwrap();
        assert!((measures::ems(&s).unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn scan_checkpoints() {
    let spec = |family, vary, range, base| ScanSpec {
        family,
        vary,
        range,
        steps: 11,
        base: reals(base),
        numeric: false,
    };
    let find = |rows: &[cluster::ScanRow], i: usize, j: usize, x: f64, y: f64| {
        rows.iter()
            .find(|r| (r.coefficients[i].re - x).abs() < 1e-12 && (r.coefficients[j].re - y).abs() < 1e-12)
            .unwrap()
            .record
            .clone()
    };
    let f1 = cluster::scan_grid(&spec(FamilyTag::F1, [0, 3], (0.0, 5.0), [0.5; 4])).unwrap();
    assert_eq!(f1.len(), 121);
    assert!((find(&f1, 0, 3, 0.5, 0.5).e_ms - 1.0).abs() < 1e-9);
    let f2 = cluster::scan_grid(&spec(FamilyTag::F2, [0, 3], (0.0, 5.0), [0.5; 4])).unwrap();
    assert!((find(&f2, 0, 3, 0.5, 0.5).e_ms - 1.0).abs() < 1e-9);
    assert!((find(&f2, 0, 3, 5.0, 5.0).e_ms - 0.75).abs() < 0.02);
    let ab = cluster::scan_grid(&spec(FamilyTag::F2, [0, 1], (0.0, 0.7), [0.0, 0.0, 0.5, 0.5])).unwrap();
    assert!((find(&ab, 0, 1, 0.0, 0.7).tau2(Pair::AC) - 0.4999).abs() < 1e-4);
    assert!((find(&ab, 0, 1, 0.7, 0.0).tau2(Pair::AC) - 0.4999).abs() < 1e-4);
    // the all-zero corner is reported, not fatal
    let zero = cluster::scan_grid(&spec(FamilyTag::F1, [0, 3], (0.0, 1.0), [0.0; 4])).unwrap();
    assert!(zero[0].record.e_ms.is_nan());
    assert!(zero[0].record.tau3(Triple::ABD).is_nan());
    let numeric = ScanSpec { numeric: true, ..spec(FamilyTag::F2, [0, 3], (0.0, 5.0), [0.5; 4]) };
    let n = cluster::scan_grid(&numeric).unwrap();
    for (a, b) in n.iter().zip(&f2) {
        assert!(a.record.max_discrepancy(&b.record) < 1e-9);
    }
}
