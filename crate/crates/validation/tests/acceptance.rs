//! Acceptance run: one line per criterion, exit status 1 if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use steinforge::gaussian::{hermite, pushforward_moment};
use steinforge::ibp::{conjecture_run, derive_default, ibp_identity, minimal_scan, verify_certificate, Status};
use steinforge::operator::{catalog, moment_recursion, verify_table1_extrema, NoncentralParams};
use steinforge::verify::noncentral::density_checks;
use steinforge::verify::quadrature::expectation_vector_residual;
use steinforge::verify::{
    mutation_control, noncentral_pdf, verify_monte_carlo, verify_noncentral_operator, verify_quadrature,
    verify_symbolic, verify_symbolic_moments, QuadratureConfig, SampledLaw, TestFunction,
};
use steinforge::{DiffOperator, Polynomial, Rational};
use steinforge_validation::{
    noncentral_pairs, published_centered_chi2, published_h3, published_h4, published_noncentral, published_normal,
    published_quadratic, pushforward_entries,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)*));
        }
    };
}

fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    if t <= limit {
        Ok(())
    } else {
        Err(format!("{what} took {t:.1?}, limit {limit:?}"))
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for (key, published) in pushforward_entries() {
        let e = catalog(key).map_err(|e| e.to_string())?;
        let op = e.operator.ok_or(format!("{key}: no operator"))?;
        let p = e.pushforward.ok_or(format!("{key}: no pushforward"))?;
        ensure!(
            op.proportional_eq(&published).unwrap().equal,
            "{key}: catalog differs from the published operator"
        );
        let r = verify_symbolic(&op, &p, 30);
        ensure!(r.pass && r.tests.len() == 31, "{key}: symbolic check failed");
        ensure!(
            r.tests.iter().all(|t| t.residual == 0.0),
            "{key}: nonzero exact residual"
        );
        checked += 1;
    }
    for (k, l) in noncentral_pairs() {
        let key = format!("noncentral-chi2:{k},{l}");
        let e = catalog(&key).map_err(|e| e.to_string())?;
        let op = e.operator.ok_or(format!("{key}: no operator"))?;
        ensure!(
            op.proportional_eq(&published_noncentral(&k, &l)).unwrap().equal,
            "{key}: differs from published"
        );
        ensure!(e.pushforward.is_none(), "{key}: unexpected pushforward");
        let params = e.noncentral.ok_or(format!("{key}: no parameters"))?;
        let moments = params.moments(32);
        ensure!(
            verify_symbolic_moments(&op, &moments, 30).pass,
            "{key}: moment check failed"
        );
    }
    within(start, Duration::from_secs(5), "catalog fidelity")?;
    Ok(format!(
        "{checked} pushforward operators exact to degree 30; 3 non-central operators exact on cumulant moments; {:.2?}",
        start.elapsed()
    ))
}

fn expect_derivation(p: &Polynomial, m: usize, d: usize, published: &DiffOperator, integer: bool) -> Outcome {
    let r = derive_default(p, m, d).map_err(|e| e.to_string())?;
    ensure!(
        r.status == Status::Found,
        "derive({p}, {m}, {d}) is {}",
        r.status.as_str()
    );
    ensure!(
        verify_certificate(&r, p),
        "derive({p}, {m}, {d}): certificate does not replay"
    );
    let op = r.operator.unwrap();
    let prop = op.proportional_eq(published).unwrap();
    ensure!(
        prop.equal,
        "derive({p}, {m}, {d}) is not proportional to the published operator"
    );
    let ratio = prop.ratio.unwrap();
    if integer {
        ensure!(
            ratio.is_integer(),
            "derive({p}, {m}, {d}): ratio {ratio} is not an integer"
        );
    }
    Ok(format!("ratio {ratio}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let h3 = expect_derivation(&hermite(3), 5, 2, &published_h3(), true)?;
    let h4 = expect_derivation(&hermite(4), 3, 2, &published_h4(), true)?;
    expect_derivation(&Polynomial::x(), 1, 1, &published_normal(), false)?;
    expect_derivation(
        &Polynomial::from_ints(&[-1, 0, 1]),
        1,
        1,
        &published_centered_chi2(),
        false,
    )?;
    expect_derivation(
        &Polynomial::from_ints(&[1, 2, 1]),
        2,
        1,
        &published_quadratic(1, 2, 1),
        false,
    )?;
    within(start, Duration::from_secs(30), "derivations")?;
    Ok(format!(
        "H3 {h3}, H4 {h4}; five certificates replay exactly; {:.2?}",
        start.elapsed()
    ))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut found = Vec::new();
    for (p, name, m) in [(hermite(3), "H3", 4), (hermite(4), "H4", 2)] {
        let s = minimal_scan(&p, m, 6).map_err(|e| e.to_string())?;
        for c in s.grid.iter().filter(|c| c.status != Status::InfeasibleAtBounds) {
            found.push(format!(
                "{name} ({}, {}) {} dim {}",
                c.order,
                c.degree,
                c.status.as_str(),
                c.nullspace_dim
            ));
        }
    }
    within(start, Duration::from_secs(300), "minimality scans")?;
    ensure!(found.is_empty(), "cells not infeasible: {}", found.join("; "));
    Ok(format!("all cells infeasible-at-bounds; {:.2?}", start.elapsed()))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let suite = TestFunction::default_suite();
    let config = QuadratureConfig::default();
    let mut worst: f64 = 0.0;
    let mut mutations = 0;
    for (key, _) in pushforward_entries() {
        let e = catalog(key).map_err(|e| e.to_string())?;
        let (op, p) = (e.operator.unwrap(), e.pushforward.unwrap());
        let quad = verify_quadrature(&op, &p, &suite, &config).map_err(|e| e.to_string())?;
        ensure!(quad.pass, "{key}: quadrature {:?}", quad.failures().collect::<Vec<_>>());
        worst = worst.max(quad.max_abs_residual());
        let mc = verify_monte_carlo(&op, &SampledLaw::Pushforward(p.clone()), &suite, 1_000_000, 0x5EED)
            .map_err(|e| e.to_string())?;
        ensure!(
            mc.pass,
            "{key}: Monte Carlo gate {:?}",
            mc.failures().collect::<Vec<_>>()
        );
        let mutated = mutation_control(&op, &p, &suite, &config).map_err(|e| e.to_string())?;
        ensure!(
            mutated.pass,
            "{key}: undetected mutations {:?}",
            mutated.failures().collect::<Vec<_>>()
        );
        mutations += mutated.tests.len();
    }
    within(start, Duration::from_secs(120), "cross-method agreement")?;
    Ok(format!(
        "max quadrature residual {worst:.1e} (201 points per panel); MC 5 SE gate at 1e6 samples; {mutations} mutations detected; {:.2?}",
        start.elapsed()
    ))
}

/// `E[P(Z)^d]` by expanding the power and using `E[Z^(2m)] = (2m-1)!!`.
fn direct_moment(p: &[i64], d: usize) -> i128 {
    let mut power = vec![1i128];
    for _ in 0..d {
        let mut next = vec![0i128; power.len() + p.len() - 1];
        for (i, a) in power.iter().enumerate() {
            for (j, b) in p.iter().enumerate() {
                next[i + j] += a * *b as i128;
            }
        }
        power = next;
    }
    let mut double_factorial = 1i128;
    let mut total = 0i128;
    for (k, c) in power.iter().enumerate() {
        if k % 2 == 0 {
            if k >= 2 {
                double_factorial *= (k - 1) as i128;
            }
            total += c * double_factorial;
        }
    }
    total
}

fn criterion_5() -> Outcome {
    let anchors = [
        (&[0i64, -3, 0, 1][..], 2, 6i128),
        (&[0, -3, 0, 1], 4, 3348),
        (&[3, 0, -6, 0, 1], 2, 24),
        (&[3, 0, -6, 0, 1], 3, 1728),
    ];
    for &(p, d, value) in &anchors {
        ensure!(
            direct_moment(p, d) == value,
            "direct expansion gives {} for degree {d}",
            direct_moment(p, d)
        );
    }
    for (n, op) in [(3, published_h3()), (4, published_h4())] {
        let p = hermite(n);
        let rec = moment_recursion(&op, &[q(1)], 12).map_err(|e| e.to_string())?;
        ensure!(rec.len() == 13, "H{n}: recursion returned {} moments", rec.len());
        let coeffs: Vec<i64> = p.to_f64_coeffs().iter().map(|&c| c as i64).collect();
        for (d, mu) in rec.iter().enumerate() {
            ensure!(
                *mu == pushforward_moment(&p, d),
                "H{n}: recursion differs at degree {d}"
            );
            if d <= 6 {
                ensure!(
                    *mu == Rational::from_bigint(direct_moment(&coeffs, d).into()),
                    "H{n}: direct expansion differs at degree {d}"
                );
            }
        }
        for &(pc, d, value) in anchors.iter().filter(|a| a.0 == coeffs.as_slice()) {
            ensure!(
                rec[d] == Rational::from_bigint(value.into()),
                "H{n}: anchor mu_{d} {pc:?}"
            );
        }
    }
    Ok("recursion equals exact pushforward moments to degree 12; anchors 6, 3348, 24, 1728 hold".into())
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let suite = TestFunction::default_suite();
    for (k, l) in noncentral_pairs() {
        let params = NoncentralParams::new(k.clone(), l.clone()).map_err(|e| e.to_string())?;
        let d = density_checks(&params, 1e-10, 1e-8).map_err(|e| e.to_string())?;
        ensure!(
            d.pass,
            "(k, lambda) = ({k}, {l}): {:?}",
            d.failures().collect::<Vec<_>>()
        );
        let v = verify_noncentral_operator(&params, &suite, 1e-8).map_err(|e| e.to_string())?;
        ensure!(
            v.pass,
            "(k, lambda) = ({k}, {l}): {:?}",
            v.failures().collect::<Vec<_>>()
        );
    }
    let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut worst: f64 = 0.0;
    for lambda in [0.25f64, 1.0, 4.0] {
        let params = NoncentralParams::new(q(1), Rational::parse_decimal(&lambda.to_string()).unwrap()).unwrap();
        let mu = lambda.sqrt();
        for i in 1..200 {
            let x = i as f64 * 0.1;
            let r = x.sqrt();
            let expected = (phi(r - mu) + phi(r + mu)) / (2.0 * r);
            let got = noncentral_pdf(x, &params).map_err(|e| e.to_string())?;
            worst = worst.max(((got - expected) / expected).abs());
        }
    }
    ensure!(
        worst <= 1e-10,
        "k = 1 density differs from the shifted square by {worst:e} relative"
    );
    within(start, Duration::from_secs(30), "non-central checks")?;
    Ok(format!(
        "mass, mean, variance and operator residuals within tolerance; k = 1 relative error {worst:.1e}; {:.2?}",
        start.elapsed()
    ))
}

fn hermite_f64(n: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, x);
    if n == 0 {
        return a;
    }
    for k in 1..n {
        let c = x * b - k as f64 * a;
        a = b;
        b = c;
    }
    b
}

/// Values of `H_n` at the roots of `H_{n-1}`, found by bisection.
fn critical_values(n: usize) -> Vec<f64> {
    let grid: Vec<f64> = (0..=4000).map(|i| -10.0 + i as f64 * 0.005).collect();
    let mut out = Vec::new();
    for w in grid.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (hermite_f64(n - 1, lo), hermite_f64(n - 1, hi));
        if flo == 0.0 {
            out.push(hermite_f64(n, lo));
            continue;
        }
        if flo * fhi > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hermite_f64(n - 1, lo) * hermite_f64(n - 1, mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(hermite_f64(n, 0.5 * (lo + hi)));
    }
    out
}

fn criterion_7() -> Outcome {
    for n in 2..=6 {
        let r = verify_table1_extrema(n, 1e-10).ok_or(format!("no table row for n = {n}"))?;
        ensure!(
            r.pass && !r.tests.is_empty(),
            "n = {n}: {:?}",
            r.failures().collect::<Vec<_>>()
        );
    }
    let s6 = 6f64.sqrt();
    let s10 = 10f64.sqrt();
    let h5 = [4.0 * (6.0 * (3.0 + s6)).sqrt(), 4.0 * (6.0 * (3.0 - s6)).sqrt()];
    let h6 = [-20.0 * (2.0 + s10), -15.0, 20.0 * (s10 - 2.0)];
    let v5 = critical_values(5);
    for target in h5 {
        for sign in [1.0, -1.0] {
            ensure!(
                v5.iter().any(|v| (v - sign * target).abs() <= 1e-10 * target),
                "H5 has no extremal value {}",
                sign * target
            );
        }
    }
    let v6 = critical_values(6);
    for target in h6 {
        ensure!(
            v6.iter().any(|v| (v - target).abs() <= 1e-10 * target.abs()),
            "H6 has no extremal value {target}"
        );
    }
    Ok("table rows n = 2..6 within 1e-10; H5 and H6 closed-form values confirmed by bisection".into())
}

fn criterion_8() -> Outcome {
    let mut lines = Vec::new();
    for (n, m, d) in [(5, 10, 6), (6, 8, 6)] {
        let start = Instant::now();
        let report = conjecture_run(n, m, d).map_err(|e| e.to_string())?;
        let json = serde_json::to_string(&report).map_err(|e| e.to_string())?;
        ensure!(!json.is_empty() && !report.comparisons.is_empty(), "H{n}: empty report");
        if let Some(r) = &report.scan.minimal {
            let op = r
                .operator
                .as_ref()
                .ok_or(format!("H{n}: found cell without operator"))?;
            ensure!(
                verify_certificate(r, &report.scan.poly),
                "H{n}: certificate does not replay"
            );
            let v = report
                .verification
                .as_ref()
                .ok_or(format!("H{n}: operator was not verified"))?;
            ensure!(
                v.pass,
                "H{n}: verification failed {:?}",
                v.failures().collect::<Vec<_>>()
            );
            // Sine sees mutations with odd d + m when W is symmetric, cosine
            // the even ones; a subset of the suite only makes detection harder.
            let parity_pair = [TestFunction::Sine(1.0), TestFunction::Cosine(0.5)];
            let mutated = mutation_control(op, &report.scan.poly, &parity_pair, &QuadratureConfig::default())
                .map_err(|e| e.to_string())?;
            ensure!(
                mutated.pass,
                "H{n}: undetected mutations {:?}",
                mutated.failures().collect::<Vec<_>>()
            );
        }
        within(start, Duration::from_secs(1800), &format!("H{n} conjecture run"))?;
        let proportional: Vec<String> = report
            .comparisons
            .iter()
            .map(|c| {
                format!(
                    "{}: {}",
                    c.label,
                    c.report.as_ref().map_or("n/a".into(), |r| r.proportional.to_string())
                )
            })
            .collect();
        lines.push(format!(
            "H{n} minimal {:?}, suspected order {} {}, proportional [{}], {:.1?}",
            report.scan.minimal_cell(),
            report.suspected_min_order,
            if report.consistent_with_suspected_order {
                "consistent"
            } else {
                "contradicted"
            },
            proportional.join(", "),
            start.elapsed()
        ));
    }
    Ok(lines.join("; "))
}

fn criterion_9() -> Outcome {
    let config = QuadratureConfig::default();
    let f = TestFunction::Sine(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for p in [
        hermite(3),
        hermite(4),
        Polynomial::from_ints(&[0, 2, 1]),
        Polynomial::from_ints(&[0, 0, 1, 1]),
    ] {
        for _ in 0..50 {
            let k = 1 + (rng.next_u64() % 12) as usize;
            let j = (rng.next_u64() % 7) as usize;
            let v = ibp_identity(k, j, &p).map_err(|e| e.to_string())?;
            let r = expectation_vector_residual(&v, &p, &f, &config).map_err(|e| e.to_string())?;
            ensure!(r.abs() <= 1e-8, "P = {p}, identity ({k}, {j}): residual {r:e}");
            worst = worst.max(r.abs());
        }
    }
    Ok(format!("200 identities, max residual {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("catalog fidelity", criterion_1),
        ("derivation reproduces published operators", criterion_2),
        ("minimality within searched families", criterion_3),
        ("cross-method agreement", criterion_4),
        ("moment recursion", criterion_5),
        ("non-central chi-square", criterion_6),
        ("Hermite extrema table", criterion_7),
        ("conjecture runs for H5 and H6", criterion_8),
        ("identity soundness", criterion_9),
    ];
    if std::env::args().any(|a| a == "--list") {
        for (i, (name, _)) in criteria.iter().enumerate() {
            println!("criterion {}: {name}: test", i + 1);
        }
        return ExitCode::SUCCESS;
    }
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
