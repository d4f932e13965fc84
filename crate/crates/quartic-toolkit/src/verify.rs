//! Acceptance suite: each criterion recomputes reference values and reports
//! pass/fail per row.

use std::time::Instant;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;

use crate::asym_enum::{asymptotic_count, lambda_star, ratio_to_exact};
use crate::detkit::{beta_det, beta_det_direct, exp_det_factorization, shifted_factorial_det, shifted_factorial_det_direct};
use crate::error::{Error, Result};
use crate::exact_count::{count_row_sums, RowSumSpec};
use crate::numkit::{alternating_composition_sum, block_rng, distinct_partition_count, factorial, taylor_truncation_bound, truncation_threshold};
use crate::orthopoly::{band_violations, gamma_quarter_det, quartic_r_sequence, r_band, u_bound, u_coefficients, QUARTIC_MAX};
use crate::partition::{hciz_haar_mc, hciz_value, z_free, z_mc_eigen, z_mc_matrix, z_weak, z_weak_prefactored, FreeExpansion, KineticSpectrum};
use crate::polytope::{asymptotic_volume, exact_volume_n3, exact_volume_n4, mc_volume, mc_volume_sequential, DiagonalSpec};
use crate::quadrature::{pearcey_eval, pearcey_saddle_residual};

#[derive(Debug, Clone, PartialEq)]
pub struct SubCheck {
    pub label: String,
    pub observed: String,
    pub expected: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub id: u32,
    pub name: &'static str,
    pub reference: &'static str,
    pub passed: bool,
    pub detail: String,
    pub checks: Vec<SubCheck>,
}

pub const CRITERIA: u32 = 13;

pub const SUITES: &[(&str, &[u32])] = &[
    ("count", &[1, 2, 3]),
    ("asym", &[4]),
    ("volume", &[5, 6]),
    ("orthopoly", &[7, 8]),
    ("det", &[9]),
    ("pearcey", &[10]),
    ("partition", &[11, 12]),
    ("utilities", &[13]),
];

/// Criterion ids for a named suite; `None` or `"all"` selects every criterion.
pub fn suite_ids(name: Option<&str>) -> Result<Vec<u32>> {
    match name {
        None | Some("all") => Ok((1..=CRITERIA).collect()),
        Some(s) => SUITES
            .iter()
            .find(|(n, _)| *n == s)
            .map(|(_, ids)| ids.to_vec())
            .ok_or_else(|| Error::Domain(format!("unknown suite '{s}'"))),
    }
}

pub fn run(ids: &[u32], seed: u64) -> Vec<CheckResult> {
    ids.iter().map(|&id| run_one(id, seed)).collect()
}

pub fn run_one(id: u32, seed: u64) -> CheckResult {
    let (name, reference, checks) = match id {
        1 => ("exact counts, N=5, total 32", "795, 679, 580, 381, 252, 56; under 10 s", c1()),
        2 => ("exact counts, N=5, totals 16 and 64", "72, 58, 46, 46, 37, 21, 29; 13818", c2()),
        3 => ("exact counts, uniform rows", "3.69E4, 5.42E7, 1.10E11 to 3 s.f.", c3()),
        4 => ("asymptotic enumeration ratio", "N=7 t=8: 0.928; N=6 t=6: 0.906 (+-0.010)", c4()),
        5 => ("polytope volume, N=3 and N=4", "N=4 within 3 s.e. of 1e6-sample MC; N=3 indicator on 20^3 grid", c5(seed)),
        6 => ("polytope asymptotics vs MC", "within 35% (N=5), 25% (N=9), improving with N", c6(seed)),
        7 => ("quartic recursion coefficients", "R_1..R_10 to 4 d.p.; band for 2..64; |U_mk| and bound table", c7()),
        8 => ("Gamma(1/4) moment determinant", "relative agreement <= 1e-8 for n <= 6", c8()),
        9 => ("determinant identities", "exact for n <= 8; ratios 1.30, 1.22, 1.18, 1.15, 1.03 (+-0.02)", c9()),
        10 => ("Pearcey integral, a=-24, b=14", "direct 1.01E-5 (2%); ratios 1.03..1.06 (+-0.02); residuals < 1e-10", c10()),
        11 => ("partition functions", "14.142 +- 0.001; matrix MC 2%; eigenvalue MC 3%; HCIZ vs Haar MC 1%", c11(seed)),
        12 => ("weak coupling", "exp(-3g sum 1/e^2 / 4) to 1e-6; expansion coefficients", c12()),
        13 => ("utilities", "threshold 0.2785; alternating sum = 1/n!; 40 distinct-partition entries", c13()),
        _ => ("unknown criterion", "", vec![sub("id", id, "1..13", false)]),
    };
    let passed = checks.iter().all(|c| c.passed);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.label.as_str()).collect();
    let detail = if failed.is_empty() {
        format!("{} of {} checks pass", checks.len(), checks.len())
    } else {
        format!("{} of {} checks fail: {}", failed.len(), checks.len(), failed.join(", "))
    };
    CheckResult { id, name, reference, passed, detail, checks }
}

fn sub(label: impl Into<String>, observed: impl ToString, expected: impl ToString, passed: bool) -> SubCheck {
    SubCheck { label: label.into(), observed: observed.to_string(), expected: expected.to_string(), passed }
}

fn sci(v: f64) -> String {
    format!("{v:.3e}")
}

fn count(t: &[u64]) -> Result<BigUint> {
    count_row_sums(&RowSumSpec::new(t.to_vec())?)
}

fn exact_rows(rows: &[(&[u64], u32)]) -> Vec<SubCheck> {
    rows.iter()
        .map(|(t, want)| {
            let label = format!("t={t:?}");
            match count(t) {
                Ok(v) => {
                    let ok = v == BigUint::from(*want);
                    sub(label, v, want, ok)
                }
                Err(e) => sub(label, e, want, false),
            }
        })
        .collect()
}

fn c1() -> Vec<SubCheck> {
    let start = Instant::now();
    let mut out = exact_rows(&[
        (&[6, 6, 6, 7, 7], 795),
        (&[5, 6, 6, 7, 8], 679),
        (&[5, 5, 6, 8, 8], 580),
        (&[5, 5, 5, 7, 10], 381),
        (&[5, 5, 5, 6, 11], 252),
        (&[4, 5, 5, 5, 13], 56),
    ]);
    let fast = start.elapsed().as_secs_f64() < 10.0;
    out.push(sub("runtime", if fast { "under 10 s" } else { "over 10 s" }, "under 10 s", fast));
    out
}

fn c2() -> Vec<SubCheck> {
    exact_rows(&[
        (&[3, 3, 3, 3, 4], 72),
        (&[2, 3, 3, 4, 4], 58),
        (&[2, 3, 3, 3, 5], 46),
        (&[2, 2, 4, 4, 4], 46),
        (&[2, 2, 3, 4, 5], 37),
        (&[2, 2, 3, 3, 6], 21),
        (&[2, 2, 2, 5, 5], 29),
        (&[12, 13, 13, 13, 13], 13818),
    ])
}

fn three_sig(v: &BigUint) -> String {
    let s = v.to_string();
    let exp = s.len() - 1;
    let head: u64 = s[..s.len().min(4)].parse().unwrap();
    let scaled = if s.len() >= 4 { (head + 5) / 10 } else { head * 10u64.pow(3 - s.len() as u32) };
    let (mantissa, exp) = if scaled >= 1000 { (scaled / 10, exp + 1) } else { (scaled, exp) };
    format!("{}.{:02}E{}", mantissa / 100, mantissa % 100, exp)
}

fn c3() -> Vec<SubCheck> {
    [(6usize, 6u64, "3.69E4"), (7, 8, "5.42E7"), (8, 9, "1.10E11")]
        .iter()
        .map(|&(n, t, want)| {
            let label = format!("N={n} t={t}");
            match RowSumSpec::uniform(n, t).and_then(|s| count_row_sums(&s)) {
                Ok(v) => {
                    let got = three_sig(&v);
                    let ok = got == want;
                    sub(label, got, want, ok)
                }
                Err(e) => sub(label, e, want, false),
            }
        })
        .collect()
}

fn c4() -> Vec<SubCheck> {
    [(7usize, 8u64, 0.928), (6, 6, 0.906)]
        .iter()
        .map(|&(n, t, want)| {
            let label = format!("N={n} t={t}");
            let r = RowSumSpec::uniform(n, t).and_then(|s| {
                let a = asymptotic_count(&s, lambda_star(&s)?)?;
                Ok(ratio_to_exact(&a, &count_row_sums(&s)?))
            });
            match r {
                Ok(r) => sub(label, format!("{r:.5}"), format!("{want} +- 0.010"), (r - want).abs() <= 0.010),
                Err(e) => sub(label, e, want, false),
            }
        })
        .collect()
}

fn n3_feasible_direct(h: [f64; 3]) -> bool {
    let u = h.map(|v| 1.0 - v);
    let a = (u[0] + u[1] - u[2]) / 2.0;
    let b = (u[0] + u[2] - u[1]) / 2.0;
    let c = (u[1] + u[2] - u[0]) / 2.0;
    a >= 0.0 && b >= 0.0 && c >= 0.0
}

fn c5(seed: u64) -> Vec<SubCheck> {
    let mut out = Vec::new();
    let mut rng = block_rng(seed, 0);
    let mut found = 0;
    while found < 5 {
        let h: Vec<f64> = (0..4).map(|_| rng.random::<f64>()).collect();
        let spec = DiagonalSpec::new(h.clone()).unwrap();
        let exact = exact_volume_n4(&spec).unwrap();
        if exact <= 0.0 {
            continue;
        }
        found += 1;
        let mc = mc_volume(&spec, 1_000_000, seed.wrapping_add(found)).unwrap();
        let ok = (exact - mc.estimate).abs() <= 3.0 * mc.std_error;
        let hs: Vec<String> = h.iter().map(|v| format!("{v:.3}")).collect();
        out.push(sub(
            format!("N=4 h=[{}]", hs.join(",")),
            format!("{exact:.5}"),
            format!("{:.5} +- {:.5}", mc.estimate, 3.0 * mc.std_error),
            ok,
        ));
    }
    let mut mismatches = 0;
    for i in 0..20 {
        for j in 0..20 {
            for k in 0..20 {
                let h = [i, j, k].map(|v| (v as f64 + 0.5) / 20.0);
                let v = exact_volume_n3(&DiagonalSpec::new(h.to_vec()).unwrap()).unwrap();
                if (v > 0.0) != n3_feasible_direct(h) {
                    mismatches += 1;
                }
            }
        }
    }
    out.push(sub("N=3 grid mismatches", mismatches, 0, mismatches == 0));
    out
}

fn c6(seed: u64) -> Vec<SubCheck> {
    let diag5 = vec![0.48, 0.52, 0.5, 0.46, 0.54];
    let diag9 = vec![0.48, 0.52, 0.5, 0.46, 0.54, 0.51, 0.49, 0.47, 0.53];
    let mut ratios = Vec::new();
    let mut out = Vec::new();
    for (h, samples, tol) in [(diag5, 400_000u64, 0.35), (diag9, 200_000, 0.25)] {
        let n = h.len();
        let spec = DiagonalSpec::new(h).unwrap();
        let asym = asymptotic_volume(&spec).unwrap().to_f64();
        let mc = mc_volume_sequential(&spec, samples, seed).unwrap();
        let r = asym / mc.estimate;
        ratios.push(r);
        out.push(sub(format!("N={n} ratio"), format!("{r:.3}"), format!("1 +- {tol}"), (r - 1.0).abs() <= tol));
    }
    let improving = (ratios[1] - 1.0).abs() < (ratios[0] - 1.0).abs();
    out.push(sub("ratio improves with N", improving, true, improving));
    out
}

const R_TABLE: [f64; 10] = [0.3380, 0.4017, 0.5051, 0.5781, 0.6468, 0.7079, 0.7644, 0.8170, 0.8665, 0.9132];

const U_TABLE: [&str; 11] = [
    "1.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0",
    "0.34 1.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0",
    "0.17 1.24 1.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0",
    "0.11 1.40 2.47 1.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0",
    "0.08 1.60 4.58 3.94 1.0 0.0 0.0 0.0 0.0 0.0 0.0",
    "0.07 1.91 7.77 10.6 5.63 1.0 0.0 0.0 0.0 0.0 0.0",
    "0.07 2.38 12.8 24.5 20.3 7.50 1.0 0.0 0.0 0.0 0.0",
    "0.07 3.10 21.1 52.7 60.6 34.7 9.54 1.0 0.0 0.0 0.0",
    "0.08 4.20 35.1 109. 163. 128. 54.5 11.7 1.0 0.0 0.0",
    "0.10 5.94 59.3 224. 413. 419. 243. 80.7 14.1 1.0 0.0",
    "0.12 8.72 102. 455. 1012. 1268. 946. 427. 114. 16.6 1.0",
];

const U_BOUND_TABLE: [&str; 11] = [
    "1.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0",
    "0.39 1.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0",
    "0.20 2.04 1.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0",
    "0.13 2.64 4.39 1.0 0.0 0.0 0.0 0.0 0.0 0.0 0.0",
    "0.10 3.36 10.1 7.28 1.0 0.0 0.0 0.0 0.0 0.0 0.0",
    "0.08 4.36 20.3 25.2 10.6 1.0 0.0 0.0 0.0 0.0 0.0",
    "0.08 5.84 39.0 72.4 50.8 14.3 1.0 0.0 0.0 0.0 0.0",
    "0.08 8.11 73.0 188. 194. 89.5 18.4 1.0 0.0 0.0 0.0",
    "0.09 11.7 136. 463. 650. 434. 144. 22.8 1.0 0.0 0.0",
    "0.11 17.3 254. 1103. 2012. 1807. 858. 217. 27.5 1.0 0.0",
    "0.14 26.7 480. 2578. 5907. 6821. 4318. 1550. 312. 32.5 1.0",
];

/// Agreement within one unit of the last given decimal place.
fn matches_reference(value: f64, given: &str) -> bool {
    let target: f64 = given.trim_end_matches('.').parse().unwrap();
    let decimals = given.split('.').nth(1).map_or(0, str::len) as i32;
    (value - target).abs() <= 10f64.powi(-decimals) * 1.0000001
}

fn table_check(label: &str, table: &[&str; 11], value: impl Fn(usize, usize) -> f64, skip_diagonal: bool) -> SubCheck {
    let mut bad = Vec::new();
    for (m, row) in table.iter().enumerate() {
        for (k, given) in row.split_whitespace().enumerate() {
            if skip_diagonal && k == m {
                continue;
            }
            let v = if k > m { 0.0 } else { value(m, k) };
            if !matches_reference(v, given) {
                bad.push(format!("({m},{k}) {v:.4} vs {given}"));
            }
        }
    }
    let n = bad.len();
    let observed = if n == 0 { "all entries match".to_string() } else { bad.join("; ") };
    sub(label, observed, "every entry within one unit of the last given digit", n == 0)
}

fn c7() -> Vec<SubCheck> {
    let mut out = Vec::new();
    let table = match quartic_r_sequence(QUARTIC_MAX) {
        Ok(t) => t,
        Err(e) => return vec![sub("recursion", e, "R_1..R_64", false)],
    };
    for (i, &want) in R_TABLE.iter().enumerate() {
        let m = i + 1;
        let r = table.r_at(m);
        out.push(sub(format!("R_{m}"), format!("{r:.6}"), format!("{want:.4}"), (r - want).abs() <= 5e-5));
    }
    let violations: Vec<usize> = band_violations(&table).into_iter().filter(|&m| m >= 2).collect();
    for m in &violations {
        let (lo, hi) = r_band(*m);
        out.push(sub(format!("band at m={m}"), format!("{:.5}", table.r_at(*m)), format!("({lo:.5}, {hi:.5})"), false));
    }
    out.push(sub(
        "band for 2 <= m <= 64",
        format!("{} violations", violations.len()),
        "0 violations",
        violations.is_empty(),
    ));
    match u_coefficients(10) {
        Ok(u) => {
            out.push(table_check("|U_mk| table", &U_TABLE, |m, k| u[m][k].abs(), false));
            out.push(table_check("bound table", &U_BOUND_TABLE, u_bound, true));
            let within = (0..=10).all(|m| (0..=m).all(|k| u[m][k].abs() <= u_bound(m, k)));
            out.push(sub("|U_mk| <= bound", within, true, within));
        }
        Err(e) => out.push(sub("U table", e, "U_mk for m <= 10", false)),
    }
    out
}

fn c8() -> Vec<SubCheck> {
    (1..=6)
        .map(|n| match gamma_quarter_det(n) {
            Ok(d) => sub(format!("n={n}"), sci(d.rel_diff), "<= 1e-8", d.rel_diff <= 1e-8),
            Err(e) => sub(format!("n={n}"), e, "<= 1e-8", false),
        })
        .collect()
}

fn c9() -> Vec<SubCheck> {
    let mut out = Vec::new();
    let beta_ok = (1..=8).all(|n| beta_det(n) == beta_det_direct(n));
    out.push(sub("beta determinants n <= 8", beta_ok, true, beta_ok));
    let shifted_ok = (1..=8).all(|n| shifted_factorial_det(n) == shifted_factorial_det_direct(n));
    out.push(sub("shifted factorial determinants n <= 8", shifted_ok, true, shifted_ok));
    for (n, want) in [(3usize, 1.30), (4, 1.22), (5, 1.18), (6, 1.15), (7, 1.03)] {
        let x: Vec<f64> = (1..=n).map(|k| k as f64 * (n as f64).powf(-1.75)).collect();
        let r = exp_det_factorization(&x, &x, Complex64::new(1.0, 0.0));
        let ratio = r.ratio.re;
        out.push(sub(format!("ratio n={n}"), format!("{ratio:.4}"), format!("{want:.2} +- 0.02"), (ratio - want).abs() <= 0.02));
    }
    out
}

const PEARCEY_RATIOS: [f64; 9] = [1.03, 1.05, 1.06, 1.07, 1.08, 1.08, 1.08, 1.08, 1.06];

fn c10() -> Vec<SubCheck> {
    let (a, b) = (-24.0, 14.0);
    let mut out = Vec::new();
    for (k, &want) in PEARCEY_RATIOS.iter().enumerate() {
        let p = pearcey_eval(a, b, k as u32);
        if k == 0 {
            let d = p.direct.re;
            out.push(sub("direct k=0", sci(d), "1.01e-5 +- 2%", (d / 1.01e-5 - 1.0).abs() <= 0.02));
        }
        match p.ratio {
            Some(r) => out.push(sub(format!("ratio k={k}"), format!("{r:.4}"), format!("{want:.2} +- 0.02"), (r - want).abs() <= 0.02)),
            None => out.push(sub(format!("ratio k={k}"), "no saddle", want, false)),
        }
    }
    let i = Complex64::new(0.0, 1.0);
    for (label, z) in [("i", i), ("2i", 2.0 * i), ("-3i", -3.0 * i)] {
        let r = pearcey_saddle_residual(a, b, z);
        out.push(sub(format!("residual at {label}"), sci(r), "< 1e-10", r < 1e-10));
    }
    out
}

fn c11(seed: u64) -> Vec<SubCheck> {
    let mut out = Vec::new();
    let spec = KineticSpectrum::new(vec![1.0, 1.1, 1.2], 0.0).unwrap();
    let zf = z_free(&spec).to_f64();
    out.push(sub("closed form", format!("{zf:.4}"), "14.142 +- 0.001", (zf - 14.142).abs() <= 0.001));
    match z_mc_matrix(&spec, 10_000_000, seed) {
        Ok(v) => {
            let rel = v.estimate / zf - 1.0;
            out.push(sub("matrix MC", format!("{:.4} +- {:.4}", v.estimate, v.std_error), "within 2%", rel.abs() <= 0.02));
        }
        Err(e) => out.push(sub("matrix MC", e, "within 2%", false)),
    }
    match z_mc_eigen(&spec, 1_000_000, seed) {
        Ok(v) => {
            let rel = v.estimate / zf - 1.0;
            out.push(sub("eigenvalue MC", format!("{:.4} +- {:.4}", v.estimate, v.std_error), "within 3%", rel.abs() <= 0.03));
        }
        Err(e) => out.push(sub("eigenvalue MC", e, "within 3%", false)),
    }
    for (x, y, t) in [([0.0, 1.0], [0.0, 1.0], 1.0), ([0.3, 1.2], [-0.5, 0.8], -1.5)] {
        let exact = hciz_value(&x, &y, t).unwrap();
        let (mc, se) = hciz_haar_mc(x, y, t, 1_000_000, seed);
        let rel = mc / exact - 1.0;
        out.push(sub(
            format!("HCIZ x={x:?} y={y:?} t={t}"),
            format!("{exact:.5}"),
            format!("{mc:.5} +- {se:.5} (1%)"),
            rel.abs() <= 0.01,
        ));
    }
    out
}

fn c12() -> Vec<SubCheck> {
    let mut out = Vec::new();
    let g = 1e-8;
    for n in [3usize, 6] {
        let e = 1.3;
        let spec = KineticSpectrum::new(vec![e; n], g).unwrap();
        let ratio = (z_weak(&spec) / z_free(&spec)).to_f64();
        let want = (-3.0 * g * n as f64 / (4.0 * e * e)).exp();
        let rel = (ratio / want - 1.0).abs();
        out.push(sub(format!("N={n} weak/free"), sci(rel), "relative error <= 1e-6", rel <= 1e-6));
        let with_factor = (z_weak_prefactored(&spec) / z_weak(&spec)).to_f64();
        let factor = ((n as f64 - 1.0) / n as f64).sqrt();
        out.push(sub(
            format!("N={n} sqrt((N-1)/N) prefactor"),
            format!("{with_factor:.6}"),
            format!("sqrt((N-1)/N) = {factor:.6}"),
            (with_factor - factor).abs() < 1e-12,
        ));
    }
    for n in [6usize, 20, 100] {
        let p = FreeExpansion::via_polytope(n);
        let d = FreeExpansion::direct(n);
        let second = p.s2 == d.s2 && p.s2_s2 == d.s2_s2;
        out.push(sub(format!("N={n} second-order coefficients"), second, "equal", second));
        let nf = n as f64;
        let third = p.s2_s3 == d.s2_s3 && ((p.s3 - d.s3) * 24.0 / nf).abs() <= 2.0 / nf + 1e-15;
        out.push(sub(
            format!("N={n} third-order coefficients"),
            format!("{:.5} vs {:.5}", p.s3, d.s3),
            "equal at leading order in N",
            third,
        ));
        let diverge = p.s3_s3 != d.s3_s3 && p.s2_s4 != d.s2_s4;
        out.push(sub(
            format!("N={n} higher-order mismatch"),
            format!("S3^2: {:.5} vs {:.5}; S2 S4: {:.5} vs {:.5}", p.s3_s3, d.s3_s3, p.s2_s4, d.s2_s4),
            "coefficients differ",
            diverge,
        ));
    }
    out
}

const DISTINCT_PARTITIONS: [[u32; 4]; 10] = [
    [1, 1, 0, 0],
    [1, 1, 0, 0],
    [1, 2, 1, 0],
    [1, 2, 1, 0],
    [1, 3, 2, 0],
    [1, 3, 3, 1],
    [1, 4, 4, 1],
    [1, 4, 5, 2],
    [1, 5, 7, 3],
    [1, 5, 8, 5],
];

fn c13() -> Vec<SubCheck> {
    let mut out = Vec::new();
    let w = truncation_threshold();
    out.push(sub("threshold", format!("{w:.6}"), "0.2785 +- 1e-4", (w - 0.2785).abs() < 1e-4));
    let monotone = |gamma: f64, decreasing: bool| {
        let v: Vec<f64> = (1..=40).map(|j| taylor_truncation_bound(gamma, 10 * j)).collect();
        v.windows(2).all(|p| if decreasing { p[1] < p[0] } else { p[1] > p[0] })
    };
    let below = monotone(w - 0.01, true);
    let above = monotone(w + 0.01, false);
    out.push(sub("bound decreases below threshold", below, true, below));
    out.push(sub("bound increases above threshold", above, true, above));
    let identity = (1..=10).all(|n| alternating_composition_sum(n) == BigRational::new(One::one(), factorial(n as u64).into()));
    out.push(sub("alternating sum n <= 10", identity, true, identity));
    let mut bad = Vec::new();
    for (i, row) in DISTINCT_PARTITIONS.iter().enumerate() {
        for (j, &want) in row.iter().enumerate() {
            let (n, m) = (i + 1, j + 1);
            if distinct_partition_count(m, n) != BigUint::from(want) {
                bad.push(format!("p_{m}({n})"));
            }
        }
    }
    let ok = bad.is_empty();
    out.push(sub("distinct partitions (40 entries)", if ok { "all match".into() } else { bad.join(", ") }, "all match", ok));
    out
}
