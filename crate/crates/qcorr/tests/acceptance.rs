//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Runs as a plain binary (`harness = false`) so the verdict lines show up in
//! `cargo test` output without `--nocapture`.

use std::collections::HashMap;
use std::process::Command;
use std::time::{Duration, Instant};

use qcorr_core::cluster::{self, ClusterFamily, FamilyTag};
use qcorr_core::locc::{self, FuzzConfig, Generator, Measure, PovmPair};
use qcorr_core::measures;
use qcorr_core::roof::{self, RoofConfig, RoofMeasure};
use qcorr_core::{random, DensityMatrix, PureState, Qubit, C64};
use rand::Rng;

const SEED: u64 = 20_240_601;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn qcorr(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qcorr"))
        .args(args)
        .env_remove("QCORR_SEED")
        .output()
        .expect("run qcorr")
}

fn within(limit: Duration, elapsed: Duration) -> Result<(), String> {
    if elapsed > limit {
        Err(format!("took {elapsed:.1?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

fn counterexample() -> Outcome {
    let start = Instant::now();
    let out = qcorr(&["repro", "--json"]);
    let elapsed = start.elapsed();
    if out.status.code() != Some(0) {
        return Err(format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let expected = [
        ("m_a", 0.5643),
        ("m_c", 0.2915),
        ("delta_m_c", -0.1151),
        ("delta_tau3_bcd", -0.1964),
        ("delta_tau4", 0.08127),
    ];
    let mut worst: f64 = 0.0;
    for (key, want) in expected {
        let got = v[key].as_f64().ok_or(format!("missing {key}"))?;
        let err = (got - want).abs();
        if err > 1e-4 {
            return Err(format!("{key} = {got}, expected {want}"));
        }
        worst = worst.max(err);
    }
    within(Duration::from_secs(1), elapsed)?;
    Ok(format!("max |error| {worst:.1e}, {elapsed:.2?}"))
}

fn table_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (f, tag) in [FamilyTag::F1, FamilyTag::F2, FamilyTag::F3].into_iter().enumerate() {
        for i in 0..10_000u64 {
            let mut rng = random::stream_rng(SEED + f as u64, i);
            let c = random::complex_gaussian_vec(&mut rng, tag.n_coefficients());
            let fam = ClusterFamily::new(tag, &c).map_err(|e| e.to_string())?;
            let closed = cluster::closed_form_measures(&fam).map_err(|e| e.to_string())?;
            let numeric = cluster::numeric_measures(&fam).map_err(|e| e.to_string())?;
            let d = closed.max_discrepancy(&numeric);
            if !(d <= 1e-9) {
                return Err(format!("{} draw {i}: discrepancy {d:e}", tag.name()));
            }
            worst = worst.max(d);
        }
    }
    let elapsed = start.elapsed();
    within(Duration::from_secs(60), elapsed)?;
    Ok(format!("3 x 10^4 tuples, max discrepancy {worst:.1e}, {elapsed:.1?}"))
}

fn ems_delta_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut smallest = f64::INFINITY;
    for i in 0..1_000u64 {
        let mut rng = random::stream_rng(SEED + 10, i);
        let c = random::complex_gaussian_vec(&mut rng, 4);
        let alpha = rng.gen_range(1e-3..1.0 - 1e-3);
        let beta = rng.gen_range(1e-3..1.0 - 1e-3);
        let fam = ClusterFamily::new(FamilyTag::F2, &c).map_err(|e| e.to_string())?;
        let state = cluster::family_state(&fam).map_err(|e| e.to_string())?;
        let pair = PovmPair::diagonal(alpha, beta).map_err(|e| e.to_string())?;
        let coeffs: [C64; 4] = c.clone().try_into().unwrap();
        for q in [Qubit::A, Qubit::C] {
            let closed = cluster::delta_ems_closed_family2(&coeffs, alpha, beta, q)
                .map_err(|e| e.to_string())?;
            let numeric = locc::monotonicity_delta(&Measure::Ems, &state, q, &pair)
                .map_err(|e| e.to_string())?
                .delta;
            let err = (closed - numeric).abs();
            if !(err <= 1e-10) {
                return Err(format!("draw {i} qubit {}: |closed - numeric| = {err:e}", q.label()));
            }
            if closed < 0.0 {
                return Err(format!("draw {i} qubit {}: closed form {closed} < 0", q.label()));
            }
            worst = worst.max(err);
            smallest = smallest.min(closed);
        }
    }
    Ok(format!("max |error| {worst:.1e}, min delta {smallest:.2e}"))
}

fn monotonicity_suites() -> Outcome {
    let start = Instant::now();
    let trials = 10_000;
    let mut campaigns: Vec<(Measure, FamilyTag, bool)> = Vec::new();
    for tag in [FamilyTag::F1, FamilyTag::F2, FamilyTag::F3, FamilyTag::F6] {
        campaigns.push((Measure::Ems, tag, false));
    }
    for n in 3..=6 {
        campaigns.push((Measure::Ems, FamilyTag::Ghz(n), false));
    }
    campaigns.push((Measure::Residual(Qubit::A), FamilyTag::F1, false));
    campaigns.push((Measure::Tau4(FamilyTag::F2), FamilyTag::F2, false));
    campaigns.push((Measure::Residual(Qubit::C), FamilyTag::F2, true));
    let mut summary = Vec::new();
    for (k, (measure, tag, expect_violation)) in campaigns.into_iter().enumerate() {
        let cfg = FuzzConfig::new(measure, Generator::Family(tag), trials, SEED + 100 + k as u64);
        let r = locc::fuzz_campaign(&cfg).map_err(|e| e.to_string())?;
        let label = format!("{}/{}", r.measure, r.generator);
        match (expect_violation, r.violations) {
            (false, 0) | (true, 1..) => summary.push(format!("{label}:{}", r.violations)),
            (false, v) => return Err(format!("{label}: {v} violations, min delta {:e}", r.min_delta)),
            (true, _) => return Err(format!("{label}: no violation found")),
        }
    }
    let elapsed = start.elapsed();
    within(Duration::from_secs(600), elapsed)?;
    Ok(format!("violations {} in {elapsed:.1?}", summary.join(" ")))
}

fn scan_rows(args: &[&str]) -> Result<Vec<HashMap<String, String>>, String> {
    let out = qcorr(args);
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = reader.headers().map_err(|e| e.to_string())?.clone();
    reader
        .records()
        .map(|r| {
            let r = r.map_err(|e| e.to_string())?;
            Ok(headers.iter().map(String::from).zip(r.iter().map(String::from)).collect())
        })
        .collect()
}

fn lookup(rows: &[HashMap<String, String>], at: &[(&str, f64)], column: &str) -> Result<f64, String> {
    let num = |row: &HashMap<String, String>, k: &str| row[k].parse::<f64>().unwrap_or(f64::NAN);
    rows.iter()
        .find(|row| at.iter().all(|&(k, v)| (num(row, k) - v).abs() < 1e-9))
        .map(|row| num(row, column))
        .ok_or(format!("no grid point at {at:?}"))
}

fn figure_checkpoints() -> Outcome {
    let f1 = scan_rows(&["scan", "--family", "f1", "--vary", "a,d", "--range", "0,5", "--steps", "21"])?;
    let f1_ems = lookup(&f1, &[("a", 0.5), ("d", 0.5)], "e_ms")?;
    let f2 = scan_rows(&["scan", "--family", "f2", "--vary", "a,d", "--range", "0,5", "--steps", "21"])?;
    let f2_ems = lookup(&f2, &[("a", 0.5), ("d", 0.5)], "e_ms")?;
    let f2ab = scan_rows(&[
        "scan", "--family", "f2", "--vary", "a,b", "--range", "0,0.7", "--steps", "15", "--base", "0,0,0.5,0.5",
    ])?;
    let t1 = lookup(&f2ab, &[("a", 0.0), ("b", 0.7)], "tau2_ac")?;
    let t2 = lookup(&f2ab, &[("a", 0.7), ("b", 0.0)], "tau2_ac")?;
    if (f1_ems - 1.0).abs() > 1e-9 {
        return Err(format!("f1 E_ms at a'=d'=0.5 is {f1_ems}"));
    }
    if (f2_ems - 1.0).abs() > 1e-9 {
        return Err(format!("f2 E_ms at the box cluster is {f2_ems}"));
    }
    for t in [t1, t2] {
        if (t - 0.4999).abs() > 1e-4 {
            return Err(format!("f2 tau2_ac = {t}, expected 0.4999"));
        }
    }
    Ok(format!("E_ms {f1_ems}, {f2_ems}; tau2_ac {t1}, {t2}"))
}

fn roof_minimizer() -> Outcome {
    let start = Instant::now();
    let config = RoofConfig {
        seed: SEED,
        ..RoofConfig::default()
    };
    let (mut worst, mut spread): (f64, f64) = (0.0, 0.0);
    for i in 0..1_000u64 {
        let mut rng = random::stream_rng(SEED + 20, i);
        let c = random::complex_gaussian_vec(&mut rng, 4);
        let fam = ClusterFamily::new(FamilyTag::F2, &c).map_err(|e| e.to_string())?;
        let state = cluster::family_state(&fam).map_err(|e| e.to_string())?;
        let k = fam.normalized_coefficients().map_err(|e| e.to_string())?;
        let (a, b, c, d) = (k[0].norm(), k[1].norm(), k[2].norm(), k[3].norm());
        let cases = [
            ("ABD", [Qubit::A, Qubit::B, Qubit::D], 4.0 * (a * d - b * c).powi(2)),
            ("BCD", [Qubit::B, Qubit::C, Qubit::D], 4.0 * (a * b - c * d).powi(2)),
        ];
        for (name, keep, exact) in cases {
            let dm = state.partial_trace(&keep).map_err(|e| e.to_string())?;
            let r = roof::roof_minimize(&dm, RoofMeasure::ThreeTangle, &config)
                .map_err(|e| e.to_string())?;
            let err = (r.value - exact).abs();
            if !(err <= 1e-6) || !(r.spread <= 1e-6) {
                return Err(format!(
                    "draw {i} rho_{name}: roof {} vs {exact}, spread {:e}",
                    r.value, r.spread
                ));
            }
            worst = worst.max(err);
            spread = spread.max(r.spread);
        }
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ket = |pairs: &[(usize, f64)]| {
        let mut v = vec![C64::new(0.0, 0.0); 16];
        for &(i, x) in pairs {
            v[i] = C64::new(x, 0.0);
        }
        PureState::normalized(v).unwrap()
    };
    let psi1 = ket(&[(0b0000, h), (0b1111, h)]);
    let psi2 = ket(&[(0b0011, h), (0b1100, h)]);
    let mixture = DensityMatrix::mixture(&[(0.5, &psi1), (0.5, &psi2)]).map_err(|e| e.to_string())?;
    let tau4 = roof::tau4_roof_restricted(&mixture, &config).map_err(|e| e.to_string())?;
    if !(tau4.value <= 1e-8) {
        return Err(format!("mixture tau4 roof {}", tau4.value));
    }
    let elapsed = start.elapsed();
    within(Duration::from_secs(300), elapsed)?;
    Ok(format!(
        "max |error| {worst:.1e}, max spread {spread:.1e}, mixture tau4 {:.1e}, {elapsed:.1?}",
        tau4.value
    ))
}

fn monogamy() -> Outcome {
    let mut lowest = f64::INFINITY;
    for i in 0..10_000u64 {
        let mut rng = random::stream_rng(SEED + 30, i);
        let s = random::haar_state(&mut rng, 4).map_err(|e| e.to_string())?;
        let m = measures::residuals(&s).map_err(|e| e.to_string())?;
        let low = m.iter().copied().fold(f64::INFINITY, f64::min);
        if !(low >= -1e-9) {
            return Err(format!("draw {i}: M_k = {low:e}"));
        }
        lowest = lowest.min(low);
    }
    Ok(format!("min M_k {lowest:.3e}"))
}

fn haar_conjecture() -> String {
    let cfg = FuzzConfig::new(Measure::Ems, Generator::Haar4, 2_000, SEED + 40);
    match locc::fuzz_campaign(&cfg) {
        Ok(r) => format!(
            "{} trials, {} violations, min delta {:.3e}",
            r.trials, r.violations, r.min_delta
        ),
        Err(e) => format!("campaign failed: {e}"),
    }
}

fn main() {
    let criteria: [Check; 7] = [
        ("counterexample reproduction", counterexample),
        ("closed-form table equivalence", table_equivalence),
        ("E_ms delta closed form", ems_delta_identity),
        ("monotonicity campaigns", monotonicity_suites),
        ("scan checkpoints", figure_checkpoints),
        ("roof minimizer", roof_minimizer),
        ("monogamy of residuals", monogamy),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("criterion 8 REPORT haar4 E_ms campaign (not asserted): {}", haar_conjecture());
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
