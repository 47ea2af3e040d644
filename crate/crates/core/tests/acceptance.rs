//! Acceptance suite: one PASS/FAIL line per criterion. Each criterion is
//! checked here against its own oracle; the library's `verify-all` runner
//! is only exercised by criterion 13.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use cks_core::chaos::{
    check_dist_bound, check_test_bound, coherent_tail_bound, hs_norm_inclusion, random_dist_vector, random_test_vector,
    s_from_t, s_transform, sample_points, t_transform, BoundOptions, CoherentPairing, FiniteGaussianModel, NormWeights,
};
use cks_core::legendre::{dual_function, legendre_sequence, materialize_dual, verify_dual_sequence_range};
use cks_core::measures::{
    check_positive_definite, integrability_check, random_points, validate_sampler, IntegrabilityVerdict, MeasureKind,
    MeasureModel,
};
use cks_core::rng;
use cks_core::sequences::bell_coefficients;
use cks_core::weights::{func_equivalent, WeightFunction};
use num_bigint::BigUint;
use num_complex::Complex64;
use rayon::prelude::*;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn verdict(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn log_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

fn c1_legendre() -> Check {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for beta in [0.0, 0.25, 0.5] {
        let ell = legendre_sequence(&WeightFunction::power_exp(beta).unwrap(), 30).map_err(|e| e.to_string())?;
        for (n, l) in ell.iter().enumerate().skip(1) {
            let x = n as f64;
            worst = worst.max((l - (1.0 + beta) * x * (1.0 - x.ln())).abs());
        }
    }
    let t = start.elapsed();
    verdict(worst <= 1e-6 && within(t, 2.0), format!("max |error| {worst:.2e}, {t:.2?}"))
}

fn c2_dual() -> Check {
    let mut worst: f64 = 0.0;
    for beta in [0.0, 0.25, 0.5] {
        let u = WeightFunction::power_exp(beta).unwrap();
        for i in 0..64 {
            let r = 1e-2 * 1e6f64.powf(i as f64 / 63.0);
            let exact = (1.0 - beta) * r.powf(1.0 / (1.0 - beta));
            let got = dual_function(&u, r).map_err(|e| e.to_string())?.log_dual;
            worst = worst.max(((got - exact) / exact).abs());
        }
    }
    verdict(worst <= 1e-6, format!("max relative error {worst:.2e}"))
}

fn c3_dual_sequence() -> Check {
    let rep = verify_dual_sequence_range(&WeightFunction::power_exp(0.0).unwrap(), 2, 30).map_err(|e| e.to_string())?;
    // Stirling: ℓ_{v*}(n) ℓ_v(n) (n!)^2 = (n!)^2 (e/n)^{2n} ≈ 2πn
    let mut worst: f64 = 0.0;
    for (i, rho) in rep.rho.iter().enumerate() {
        let n = (i + 2) as f64;
        worst = worst.max((rho - (2.0 * std::f64::consts::PI * n).ln()).abs());
    }
    let (_, log_c, _, _) = rep.report.sequence_constants().ok_or("no sequence witness")?;
    verdict(
        worst <= std::f64::consts::LN_2 && log_c.abs() <= 0.05 && rep.report.is_consistent(),
        format!("max |log(ratio/2πn)| {worst:.3}, log c {log_c:.4}"),
    )
}

fn c4_sandwich() -> Check {
    // computed here from scratch in log-space
    let mut violations = 0;
    for beta in [0.0, 0.5, 0.9] {
        let p = 1.0 + beta;
        for n in 1..=50 {
            let x = n as f64;
            let lf = log_factorial(n);
            let mid = p * x * (1.0 - x.ln());
            if -p * lf > mid || mid > p * (1.0 + 0.5 * x * std::f64::consts::LN_2 - lf) {
                violations += 1;
            }
        }
        let lib = cks_core::sequences::stirling_sandwich(beta, 50).map_err(|e| e.to_string())?;
        if !lib.verdict.is_consistent() {
            violations += 1;
        }
    }
    verdict(violations == 0, format!("{violations} violations"))
}

fn c5_bell() -> Check {
    let start = Instant::now();
    let coeffs = bell_coefficients(2, 25).map_err(|e| e.to_string())?;
    let t = start.elapsed();
    let mut row = vec![BigUint::from(1u32)];
    let mut mismatches = 0;
    for c in &coeffs {
        if c.as_integer().as_ref() != Some(&row[0]) {
            mismatches += 1;
        }
        let mut next = vec![row.last().unwrap().clone()];
        for x in &row {
            let v = next.last().unwrap() + x;
            next.push(v);
        }
        row = next;
    }
    verdict(mismatches == 0 && within(t, 1.0), format!("{mismatches} mismatches, {t:.2?}"))
}

fn c6_bell_dual() -> Check {
    let dual = materialize_dual(&WeightFunction::bell(2).unwrap()).map_err(|e| e.to_string())?;
    let asym = WeightFunction::bell_dual_asymptotic(2).unwrap();
    let grid: Vec<f64> = (0..64).map(|i| 10.0 * 1e5f64.powf(i as f64 / 63.0)).collect();
    let rep = func_equivalent(&dual, &asym, &grid).map_err(|e| e.to_string())?;
    let (_, a1, _, a2) = rep.function_constants().ok_or("no function witness")?;
    verdict(rep.is_consistent(), format!("a in [{a1:.3}, {a2:.3}], drift {:.3}", rep.drift))
}

fn c7_hs() -> Check {
    let v = hs_norm_inclusion(2.0, 0.0, None).map_err(|e| e.to_string())?;
    let err = (v - std::f64::consts::PI.powi(2) / 24.0).abs();
    verdict(err <= 1e-9, format!("|error| {err:.2e}"))
}

fn c8_bounds() -> Check {
    let start = Instant::now();
    let model = FiniteGaussianModel::new(6, 10).unwrap();
    let sample = sample_points(&model, 200, &mut rng::stream(2024, 1 << 40));
    let test_opts = BoundOptions { a: 0.25, p: 2.0, q: 0.0 };
    let dist_opts = BoundOptions { a: 0.25, p: 0.0, q: 2.0 };
    let mut violations = 0;
    let mut checked = 0;
    for u in [
        WeightFunction::power_exp(0.0).unwrap(),
        WeightFunction::power_exp(0.5).unwrap(),
        WeightFunction::bell(2).unwrap(),
    ] {
        let nw = NormWeights::new(&u, 10).map_err(|e| e.to_string())?;
        let res: Vec<Result<(bool, bool), String>> = (0..100u64)
            .into_par_iter()
            .map(|i| {
                let mut r = rng::stream(2024, i);
                let phi = random_test_vector(model, &mut r);
                let big = random_dist_vector(model, &mut r);
                let t = check_test_bound(&phi, &nw, &test_opts, &sample).map_err(|e| e.to_string())?;
                let d = check_dist_bound(&big, &nw, &dist_opts, &sample).map_err(|e| e.to_string())?;
                // K^2 / (1 - a e^2 Σ_{j<6} (2j+2)^{-2}), contraction recomputed here
                let hs: f64 = (0..6).map(|j| (2.0 * j as f64 + 2.0).powi(-2)).sum();
                let c = 0.25 * std::f64::consts::E.powi(2) * hs;
                let rhs = |k: f64| k * k / (1.0 - c);
                Ok((
                    t.lhs <= rhs(t.fitted_k) * (1.0 + 1e-9) && t.verdict.is_consistent(),
                    d.lhs <= rhs(d.fitted_k) * (1.0 + 1e-9) && d.verdict.is_consistent(),
                ))
            })
            .collect();
        for r in res {
            let (a, b) = r?;
            checked += 2;
            violations += usize::from(!a) + usize::from(!b);
        }
    }
    let t = start.elapsed();
    verdict(
        violations == 0 && within(t, 60.0),
        format!("{violations} violations in {checked} checks, {t:.2?}"),
    )
}

fn c9_transforms() -> Check {
    let mut r = rng::stream(2024, 9);
    let model = FiniteGaussianModel::new(3, 6).unwrap();
    let big = random_dist_vector(model, &mut r);
    let mut worst_st: f64 = 0.0;
    for _ in 0..100 {
        let xi: Vec<Complex64> = (0..3).map(|_| rng::complex_normal(&mut r) * 0.5).collect();
        let s = s_transform(&big, &xi).map_err(|e| e.to_string())?;
        worst_st = worst_st.max((s - s_from_t(&big, &xi).map_err(|e| e.to_string())?).norm() / s.norm().max(1.0));
        // and the other direction, T(ξ) = S(iξ) e^{-½⟨ξ,ξ⟩}
        let t = t_transform(&big, &xi).map_err(|e| e.to_string())?;
        let ixi: Vec<Complex64> = xi.iter().map(|z| z * Complex64::i()).collect();
        let q: Complex64 = xi.iter().map(|z| z * z).sum();
        let direct = s_transform(&big, &ixi).map_err(|e| e.to_string())? * (-0.5 * q).exp();
        worst_st = worst_st.max((t - direct).norm() / t.norm().max(1.0));
    }
    let cm = FiniteGaussianModel::new(2, 30).unwrap();
    let eta = [Complex64::new(0.3, 0.4), Complex64::new(-0.5, 0.1)];
    let xi = [Complex64::new(0.2, -0.6), Complex64::new(0.7, 0.0)];
    let c = CoherentPairing::compute(cm, &eta, &xi).map_err(|e| e.to_string())?;
    let exact = (eta[0] * xi[0] + eta[1] * xi[1]).exp();
    let err = (c.value - exact).norm();
    let tail = coherent_tail_bound(&eta, &xi, 30);
    verdict(
        worst_st <= 1e-12 && err <= 1e-10 && tail < 1e-10 && c.tail_bound < 1e-10,
        format!("S/T {worst_st:.2e}, coherent {err:.2e}, tail bound {tail:.2e}"),
    )
}

fn c10_positive_definite() -> Check {
    let kinds = [
        MeasureKind::Grey { lambda: 0.3 },
        MeasureKind::Grey { lambda: 0.5 },
        MeasureKind::Grey { lambda: 0.7 },
        MeasureKind::Grey { lambda: 1.0 },
        MeasureKind::Poisson { intensity: 1.0 },
    ];
    let mut worst = f64::INFINITY;
    for (k, kind) in kinds.into_iter().enumerate() {
        let model = MeasureModel::new(kind, 3, 2024).unwrap();
        let mut r = rng::stream(2024, 100 + k as u64);
        for _ in 0..50 {
            let pts = random_points(3, 12, 0.75, &mut r);
            let rep = check_positive_definite(|x| model.char_fn(x), &pts, 1e-8).map_err(|e| e.to_string())?;
            worst = worst.min(rep.min_eigenvalue);
        }
    }
    verdict(worst >= -1e-8, format!("min eigenvalue {worst:.3e}"))
}

fn c11_sampler() -> Check {
    let mut worst: f64 = 0.0;
    for lambda in [0.5, 0.7] {
        let model = MeasureModel::new(MeasureKind::Grey { lambda }, 20, 2024).unwrap();
        let rep = validate_sampler(&model, 100_000).map_err(|e| e.to_string())?;
        if rep.probes.len() != 8 {
            return Err(format!("{} probes", rep.probes.len()));
        }
        worst = worst.max(rep.max_z);
    }
    verdict(worst <= 4.0, format!("max deviation {worst:.2}σ"))
}

fn c12_integrability() -> Check {
    let run = |kind, dim, u: WeightFunction, p| {
        let model = MeasureModel::new(kind, dim, 2024).unwrap();
        integrability_check(&model, &u, p, 100_000).map_err(|e| e.to_string())
    };
    let grey = run(MeasureKind::Grey { lambda: 0.5 }, 20, WeightFunction::power_exp(0.5).unwrap(), 1.0)?;
    let poisson = run(
        MeasureKind::Poisson { intensity: 1.0 },
        20,
        WeightFunction::bell_dual_asymptotic(2).unwrap(),
        1.0,
    )?;
    let gauss = run(MeasureKind::Gaussian, 1, WeightFunction::stretched(2.0, 1.0).unwrap(), 0.0)?;
    verdict(
        grey.verdict == IntegrabilityVerdict::Converged
            && poisson.verdict == IntegrabilityVerdict::Converged
            && gauss.verdict == IntegrabilityVerdict::Diverging,
        format!(
            "grey {:?} (cv {:.3}), poisson {:?} (cv {:.3}), gaussian {:?} (cv {:.2})",
            grey.verdict, grey.cv, poisson.verdict, poisson.cv, gauss.verdict, gauss.cv
        ),
    )
}

fn c13_determinism() -> Check {
    let outputs: Vec<_> = ["1", "8", "8"]
        .par_iter()
        .map(|t| {
            Command::new(env!("CARGO_BIN_EXE_cks"))
                .args(["verify-all", "--seed", "7"])
                .env("RAYON_NUM_THREADS", t)
                .env_remove("CKS_SEED")
                .output()
                .map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    let same = outputs.windows(2).all(|w| w[0].stdout == w[1].stdout);
    let exit = outputs[0].status.code();
    verdict(
        same && exit == Some(0) && !outputs[0].stdout.is_empty(),
        format!("{} bytes, identical: {same}, exit {exit:?}", outputs[0].stdout.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("Legendre closed form", c1_legendre),
        ("dual closed form", c2_dual),
        ("dual-sequence relation", c3_dual_sequence),
        ("Stirling sandwich", c4_sandwich),
        ("Bell numbers", c5_bell),
        ("Bell-dual equivalence", c6_bell_dual),
        ("Hilbert-Schmidt constant", c7_hs),
        ("characterization bounds", c8_bounds),
        ("transform identities", c9_transforms),
        ("positive-definiteness", c10_positive_definite),
        ("grey sampler validation", c11_sampler),
        ("integrability", c12_integrability),
        ("determinism", c13_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
