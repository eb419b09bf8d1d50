//! Acceptance suite. Runs without the libtest harness so that every criterion
//! prints exactly one line; the process exits non-zero when any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::{Float, Integer};

use opuc::beta::{beta, find_min_degree, gap_distance, BetaEngine, MinDegree};
use opuc::complex::rel_diff;
use opuc::experiments::{run_bound_table, run_thm_3_3, Thm33Params};
use opuc::exponent::{
    construct_cor_3_4, construct_cor_4_3, construct_thm_1_2, ratio_at_most_inverse, GrowthFn,
};
use opuc::markoff::GeneratorSpec;
use opuc::measure::{
    alphas_from_moments, zhedanov_moments, AtomSource, MeasureSpec, VerblunskySequence,
    WeightSource,
};
use opuc::precision::PrecisionPolicy;
use opuc::szego::{polynomials_from_alphas, szego_constant};
use opuc::Complex;

const P: u32 = 256;

type Outcome = Result<String, String>;

fn policy() -> PrecisionPolicy {
    PrecisionPolicy::from_start(P)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// The four measures with closed-form coefficient moduli.
fn fixtures() -> Vec<(MeasureSpec, Box<dyn Fn(usize) -> Float>)> {
    let zh_sq = |p: f64, n: usize| {
        let p = Float::with_val(P, p);
        let c = Float::with_val(P, n as u32 + 1).cos();
        let num = Float::with_val(P, 1 - &p).square();
        let den = Float::with_val(P, p.square_ref()) + 1u32 - Float::with_val(P, 2 * &p) * c;
        num / den
    };
    vec![
        (
            MeasureSpec::alpha_defined(GeneratorSpec::Poisson { r: 0.5 }),
            Box::new(|n| Float::with_val(P, if n == 0 { 0.25 } else { 0.0 })),
        ),
        (
            MeasureSpec::alpha_defined(GeneratorSpec::Zhedanov {
                p: 0.5,
                theta0: 1.0,
            }),
            Box::new(move |n| zh_sq(0.5, n)),
        ),
        (
            MeasureSpec::alpha_defined(GeneratorSpec::Constant {
                a_re: 0.6,
                a_im: 0.0,
            }),
            Box::new(|_| Float::with_val(P, 0.6).square()),
        ),
        (
            MeasureSpec::alpha_defined(GeneratorSpec::Ell2Szego { c: 0.5, rho: 0.5 }),
            Box::new(|n| Float::with_val(P, 0.25) * Float::with_val(P, 0.25).pow(n as u32)),
        ),
    ]
}

/// `Π_{i≤n} (1 - |α_i|²)^{1/2}` for every `n ≤ n_max`.
fn floors(modulus_sq: &dyn Fn(usize) -> Float, n_max: usize) -> Vec<Float> {
    let mut prod = Float::with_val(P, 1);
    (0..=n_max)
        .map(|n| {
            prod *= Float::with_val(P, 1 - modulus_sq(n));
            Float::with_val(P, prod.sqrt_ref())
        })
        .collect()
}

fn base_case_identity() -> Outcome {
    let mut worst = 0.0f64;
    for (m, sq) in fixtures() {
        let e = BetaEngine::new(&m, 1, 60, policy()).map_err(|e| e.to_string())?;
        for (n, floor) in floors(sq.as_ref(), 60).iter().enumerate() {
            let b = e.beta(1, n).map_err(|e| e.to_string())?;
            worst = worst.max(rel_diff(&b.value, floor, 0.0));
        }
    }
    check(
        worst <= 1e-12,
        format!("max relative deviation {worst:.2e} over 4 measures, n ≤ 60"),
    )
}

fn zhedanov_moduli() -> Outcome {
    let mut worst = 0.0f64;
    let mut bracket = true;
    let mut bits = 0;
    for p in [0.3, 0.5, 0.7] {
        let alphas = policy()
            .run(|prec| {
                bits = bits.max(prec);
                alphas_from_moments(&zhedanov_moments(p, 1.0, 101, prec)?)
            })
            .map_err(|e| e.to_string())?;
        let lower = (1.0 - p) / (1.0 + p);
        for n in 0..=100 {
            let pf = Float::with_val(P, p);
            let num = Float::with_val(P, 1 - &pf).square();
            let den = Float::with_val(P, pf.square_ref()) + 1u32
                - Float::with_val(P, 2 * &pf) * Float::with_val(P, n as u32 + 1).cos();
            let formula = num / den;
            let got = Float::with_val(P, alphas.values()[n].norm_sqr());
            worst = worst.max(rel_diff(&got, &formula, 0.0));
            let modulus = Float::with_val(P, got.sqrt_ref());
            bracket &= modulus > lower && modulus < 1;
        }
    }
    check(
        worst <= 1e-15 && bracket,
        format!("max relative deviation of |α_n|² {worst:.2e}, strict bracket {bracket}, up to {bits} bits"),
    )
}

fn poisson_szego_constant() -> Outcome {
    let oracle = Float::with_val(P, 0.75f64.ln()).exp();
    let alpha = szego_constant(
        &MeasureSpec::alpha_defined(GeneratorSpec::Poisson { r: 0.5 }),
        40,
        policy(),
    )
    .map_err(|e| e.to_string())?;
    let product = alpha.partial_products.last().unwrap().clone();
    let weight = szego_constant(
        &MeasureSpec::weight(WeightSource::Poisson { r: 0.5, grid: 256 }),
        8,
        policy(),
    )
    .map_err(|e| e.to_string())?;
    let quad = weight.quadrature.ok_or("no quadrature value")?;
    let d_prod = Float::with_val(P, &product - &oracle).abs().to_f64();
    let d_quad = Float::with_val(P, &quad - &oracle).abs().to_f64();
    let d_both = Float::with_val(P, &quad - &product).abs().to_f64();
    check(
        d_prod <= 1e-10 && d_quad <= 1e-10 && d_both <= 1e-10,
        format!(
            "product {:.12}, quadrature {:.12}, |Δ| {d_both:.2e}",
            product.to_f64(),
            quad.to_f64()
        ),
    )
}

fn bound_sandwich() -> Outcome {
    let mut ties = 0usize;
    let mut excess = 0.0f64;
    let mut cells = 0usize;
    let mut verdicts_ok = true;
    for (m, _) in fixtures() {
        let e = BetaEngine::new(&m, 6, 60, policy()).map_err(|e| e.to_string())?;
        for k in 1..=6 {
            for n in 1..=60 {
                let b = e.beta(k, n).map_err(|e| e.to_string())?.value;
                let b37 = e.bound_3_7(k, n).map_err(|e| e.to_string())?;
                let b38 = e.bound_3_8(k, n).map_err(|e| e.to_string())?;
                cells += 1;
                if b > b37 || b37 > b38 {
                    ties += 1;
                    let over = |a: &Float, c: &Float| (Float::with_val(P, a - c) / c).to_f64();
                    excess = excess.max(over(&b, &b37)).max(over(&b37, &b38));
                }
            }
        }
        let r = run_bound_table(&m, 6, 60, policy()).map_err(|e| e.to_string())?;
        verdicts_ok &= r.passed() && !r.incomplete;
    }
    check(
        verdicts_ok,
        format!("{cells} cells, {ties} equality cells off by at most {excess:.1e} relative, none beyond 2^-64"),
    )
}

fn binomial(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}

fn combinatorics() -> Outcome {
    let mut identities = 0;
    for k in 2u32..=31 {
        for i in 1..k {
            let lhs: Integer = (i..k).map(|l| binomial(l - 1, i - 1)).sum();
            if lhs != binomial(k - 1, i) {
                return Err(format!("column identity fails at k = {k}, i = {i}"));
            }
            identities += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut coeffs = 0;
    for _ in 0..50 {
        let len = rng.gen_range(1..=60);
        let v: Vec<(f64, f64)> = (0..len)
            .map(|_| {
                let r: f64 = rng.gen_range(0.0..0.999);
                let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                (r * t.cos(), r * t.sin())
            })
            .collect();
        let a = VerblunskySequence::from_f64(P, &v).map_err(|e| e.to_string())?;
        let polys = polynomials_from_alphas(&a, len).map_err(|e| e.to_string())?;
        for (n, phi) in polys.iter().enumerate() {
            for (k, b) in phi.coeffs.iter().enumerate() {
                if b.abs() > Float::with_val(P, binomial(n as u32, k as u32)) {
                    return Err(format!("|b_{{{n},{k}}}| exceeds C({n},{k})"));
                }
                coeffs += 1;
            }
        }
    }
    Ok(format!(
        "{identities} column identities exact, {coeffs} coefficients within binomial bound"
    ))
}

/// `dist(y, span cols)` in `C^N` by Householder QR. Columns are assumed
/// independent up to `min(cols, N)`.
fn least_squares_residual(mut cols: Vec<Vec<Complex>>, mut y: Vec<Complex>) -> Float {
    let rows = y.len();
    let steps = cols.len().min(rows);
    for j in 0..steps {
        let mut norm = Float::new(P);
        for x in &cols[j][j..] {
            norm += x.norm_sqr();
        }
        let norm = norm.sqrt();
        let x0 = cols[j][j].clone();
        let phase = if x0.is_zero() {
            Complex::one(P)
        } else {
            x0.div_real(&x0.abs())
        };
        let alpha = phase.scale(&norm).neg();
        let mut v: Vec<Complex> = cols[j][j..].to_vec();
        v[0] = v[0].sub(&alpha);
        let mut vv = Float::new(P);
        for x in &v {
            vv += x.norm_sqr();
        }
        if vv.is_zero() {
            continue;
        }
        let reflect = |c: &mut [Complex]| {
            let mut s = Complex::zero(P);
            for (vi, ci) in v.iter().zip(c.iter()) {
                s.add_mul(&vi.conj(), ci);
            }
            let s = s.scale(&Float::with_val(P, 2 / &vv));
            for (vi, ci) in v.iter().zip(c.iter_mut()) {
                ci.sub_assign(&vi.mul(&s));
            }
        };
        for c in cols.iter_mut().skip(j) {
            reflect(&mut c[j..]);
        }
        reflect(&mut y[j..]);
    }
    let mut r = Float::new(P);
    for x in &y[steps..] {
        r += x.norm_sqr();
    }
    r.sqrt()
}

/// `(√w_i, z_i)` for the geometric measure cut after `count` points.
fn truncated_atoms(p: f64, count: usize) -> Vec<(Float, Complex)> {
    let pf = Float::with_val(P, p);
    let total = Float::with_val(P, 1 - Float::with_val(P, pf.clone().pow(count as u32)));
    (0..count)
        .map(|n| {
            let w =
                Float::with_val(P, 1 - &pf) * Float::with_val(P, pf.clone().pow(n as u32)) / &total;
            (w.sqrt(), Complex::cis(&Float::with_val(P, n as u32)))
        })
        .collect()
}

fn monomial(atoms: &[(Float, Complex)], e: i64) -> Vec<Complex> {
    atoms
        .iter()
        .map(|(s, z)| {
            let zp = if e >= 0 {
                z.powu(e as u64)
            } else {
                z.conj().powu(e.unsigned_abs())
            };
            zp.scale(s)
        })
        .collect()
}

fn oracle_distance(atoms: &[(Float, Complex)], target: i64, exponents: &[i64]) -> Float {
    let cols = exponents.iter().map(|&e| monomial(atoms, e)).collect();
    least_squares_residual(cols, monomial(atoms, target))
}

fn atomic_oracle() -> Outcome {
    let sparse: [&[i64]; 3] = [&[1, 2, 3, 7], &[2, 4, 6, 8, 10], &[1, 5, 6, 7, 11, 12]];
    let mut worst = 0.0f64;
    let mut cases = 0;
    for p in [0.5, 0.7] {
        for count in [6usize, 12, 32] {
            let m = MeasureSpec::atomic(AtomSource::TruncatedZhedanov {
                p,
                theta0: 1.0,
                count,
            });
            let atoms = truncated_atoms(p, count);
            let e = BetaEngine::new(&m, 5, 10, policy()).map_err(|e| e.to_string())?;
            for k in 1..=5usize {
                for n in 0..=10usize {
                    let poly: Vec<i64> = (0..=n as i64).collect();
                    let want = oracle_distance(&atoms, -(k as i64), &poly);
                    let got = e.beta(k, n).map_err(|e| e.to_string())?.value;
                    let block: Vec<u64> = (k as u64..=(k + n) as u64).collect();
                    let gap = gap_distance(&m, 0, &block, policy())
                        .map_err(|e| e.to_string())?
                        .value;
                    worst = worst.max(Float::with_val(P, &got - &want).abs().to_f64());
                    worst = worst.max(Float::with_val(P, &gap - &want).abs().to_f64());
                    cases += 2;
                }
            }
            for set in sparse.iter().filter(|s| s.len() < count) {
                for target in 0..=5i64 {
                    let want = oracle_distance(&atoms, target, set);
                    let exps: Vec<u64> = set.iter().map(|&s| s as u64).collect();
                    let got = gap_distance(&m, target as u64, &exps, policy())
                        .map_err(|e| e.to_string())?
                        .value;
                    worst = worst.max(Float::with_val(P, &got - &want).abs().to_f64());
                    cases += 1;
                }
            }
        }
    }
    check(
        worst <= 1e-20,
        format!("{cases} distances, max |Δ| {worst:.2e}"),
    )
}

fn witness_mechanics() -> Outcome {
    let m = MeasureSpec::alpha_defined(GeneratorSpec::Zhedanov {
        p: 0.6,
        theta0: 1.0,
    });
    let tol = 0.1;
    let mut k = 1usize;
    let mut worst = 0.0f64;
    let mut largest = 0.0f64;
    let mut chain = Vec::new();
    for j in 1..=4usize {
        let f = match find_min_degree(&m, k, tol, 200, policy()).map_err(|e| e.to_string())? {
            MinDegree::Found(b) => b.n,
            MinDegree::Overflow { .. } => {
                return Err(format!("no degree reaches {tol} at k = {k}"))
            }
        };
        let witness = beta(&m, k, f, policy()).map_err(|e| e.to_string())?.value;
        for t in 0..=2u64 {
            let window: Vec<u64> = (t + k as u64..=t + (k + f) as u64).collect();
            let gap = gap_distance(&m, t, &window, policy())
                .map_err(|e| e.to_string())?
                .value;
            worst = worst.max(rel_diff(&gap, &witness, 0.0));
        }
        largest = largest.max(witness.to_f64());
        chain.push((k, f));
        k += f + j + 1;
    }
    let report = run_thm_3_3(&m, &Thm33Params::default(), policy()).map_err(|e| e.to_string())?;
    check(
        worst <= 1e-12 && largest <= tol && report.passed(),
        format!("(k_j, f) = {chain:?}, identity deviation {worst:.2e}, max witness {largest:.4}, report verdicts pass {}", report.passed()),
    )
}

fn construction_audits() -> Outcome {
    let mut checked = 0;
    let linear = GrowthFn::Linear {
        slope: 2,
        offset: 1,
    };
    let power = GrowthFn::Power { t: 1.5 };
    let mut sets = vec![];
    for s in [1.5, 2.0] {
        sets.push((
            format!("auto s={s}"),
            construct_thm_1_2(s, None, 6).map_err(|e| e.to_string())?,
        ));
    }
    for f in [&linear, &power] {
        sets.push((
            format!("{f:?}"),
            construct_cor_3_4(&|k| f.eval(k), 6).map_err(|e| e.to_string())?,
        ));
    }
    for (name, b) in &sets {
        let cps = b.checkpoints();
        if cps.len() < 6 {
            return Err(format!("{name}: only {} checkpoints", cps.len()));
        }
        for (j, &n) in cps.iter().take(6).enumerate() {
            if !ratio_at_most_inverse(b.set.count_upto(n), n, j as u128 + 1) {
                return Err(format!("{name}: density above 1/{} at N = {n}", j + 1));
            }
            checked += 1;
        }
    }
    let g = construct_cor_4_3(2.0, 2.0, 1.0, 5, None).map_err(|e| e.to_string())?;
    let first = g.gamma.intervals()[0];
    check(
        g.gamma.is_disjoint(&g.lambda) && first == [7, 14],
        format!(
            "{checked} checkpoints at most 1/j, Γ ∩ Λ empty {}, first Γ interval {first:?}",
            g.gamma.is_disjoint(&g.lambda)
        ),
    )
}

fn negative_control() -> Outcome {
    let fx = fixtures();
    let (m, sq) = &fx[3];
    let e = BetaEngine::new(m, 1, 200, policy()).map_err(|e| e.to_string())?;
    let floor = floors(sq.as_ref(), 200);
    let mut margin = f64::INFINITY;
    for (n, fl) in floor.iter().enumerate() {
        let b = e.beta(1, n).map_err(|e| e.to_string())?.value;
        margin = margin.min(Float::with_val(P, &b - fl).to_f64());
    }
    check(
        margin >= -1e-12,
        format!(
            "min β(1,n) - floor = {margin:.2e} for n ≤ 200, floor {:.6}",
            floor[200].to_f64()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("base-case identity", base_case_identity),
        ("geometric measure coefficient moduli", zhedanov_moduli),
        ("Szegő constant cross-check", poisson_szego_constant),
        ("bound sandwich", bound_sandwich),
        ("combinatorial identities", combinatorics),
        ("atom-coordinate oracle", atomic_oracle),
        ("block witness mechanics", witness_mechanics),
        ("construction audits", construction_audits),
        ("Szegő negative control", negative_control),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS criterion {}: {name}: {d} [{secs:.2}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {d} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
