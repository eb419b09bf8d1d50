//! Distances `β_μ(k, n) = min_{π ∈ P_{≤n}} ‖z^{-k} - π‖` and their bounds.
//!
//! The engine projects `z^{-k}` onto the orthonormal polynomials produced by
//! the moment-driven Szegő recurrence. A Cholesky solve of the monomial Gram
//! system handles arbitrary finite exponent sets and doubles as a cross-check.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;
use serde::Serialize;

use crate::complex::{pow2_neg, Complex};
use crate::error::{OpucError, Result};
use crate::measure::{levinson, MeasureSpec, MomentSequence, VerblunskySequence};
use crate::precision::{conditioning_floor, residual_tolerance, PrecisionPolicy};
use crate::szego::{polynomials_from_alphas, MonicPolynomial};

#[derive(Clone, Debug, PartialEq)]
pub struct BetaResult {
    pub k: usize,
    pub n: usize,
    pub value: Float,
    pub precision: u32,
    pub residual: f64,
    /// The monomials up to degree `n` already span `L²(μ)`.
    pub rank_limited: bool,
}

impl BetaResult {
    pub const CSV_HEADER: &'static str = "k,n,value,precision_bits,residual";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:e},{},{:e}",
            self.k,
            self.n,
            self.value.to_f64(),
            self.precision,
            self.residual
        )
    }
}

/// Precomputed β table for `k_min ≤ k ≤ k_max`, `0 ≤ n ≤ n_max` at one precision.
#[derive(Clone, Debug)]
pub struct BetaEngine {
    precision: u32,
    rank: Option<usize>,
    k_min: usize,
    k_max: usize,
    n_max: usize,
    moments: MomentSequence,
    alphas: Vec<Complex>,
    polys: Vec<MonicPolynomial>,
    defect: Float,
    /// `beta_sq[k - k_min][n]`.
    beta_sq: Vec<Vec<Float>>,
}

impl BetaEngine {
    /// Builds the table, doubling the precision while the orthogonality
    /// defect of the computed polynomials exceeds `2^{-bits/4}`.
    pub fn new(
        measure: &MeasureSpec,
        k_max: usize,
        n_max: usize,
        policy: PrecisionPolicy,
    ) -> Result<Self> {
        policy.run(|bits| Self::at_precision(measure, k_max, n_max, bits))
    }

    /// Only the rows `k_min..=k_max`.
    pub fn rows(
        measure: &MeasureSpec,
        k_min: usize,
        k_max: usize,
        n_max: usize,
        policy: PrecisionPolicy,
    ) -> Result<Self> {
        if k_min > k_max {
            return Err(OpucError::domain(format!(
                "empty row range {k_min}..={k_max}"
            )));
        }
        policy.run(|bits| Self::build(measure, k_min, k_max, n_max, bits))
    }

    pub fn at_precision(
        measure: &MeasureSpec,
        k_max: usize,
        n_max: usize,
        bits: u32,
    ) -> Result<Self> {
        Self::build(measure, 0, k_max, n_max, bits)
    }

    fn build(
        measure: &MeasureSpec,
        k_min: usize,
        k_max: usize,
        n_max: usize,
        bits: u32,
    ) -> Result<Self> {
        let rank = measure.rank();
        let order = (k_max + n_max).max(n_max + 1);
        let moments = measure.moments(order, bits)?;
        let count = match rank {
            Some(r) => (n_max + 1).min(r.saturating_sub(1)),
            None => n_max + 1,
        };
        let (alphas, polys) = levinson(&moments, count).map_err(|e| match e {
            OpucError::Degenerate { order } => OpucError::Precision {
                index: order,
                detail: format!("moment matrix numerically singular at {bits} bits"),
            },
            e => e,
        })?;
        let defect = orthogonality_defect(&moments, &polys);
        let tol = residual_tolerance(bits);
        if defect > tol {
            return Err(OpucError::Precision {
                index: count,
                detail: format!(
                    "orthogonality defect {:e} above 2^-{} at {bits} bits",
                    defect.to_f64(),
                    bits / 4
                ),
            });
        }
        let beta_sq = (k_min..=k_max)
            .into_par_iter()
            .map(|k| beta_sq_row(&moments, &polys, rank, k, n_max, &tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(BetaEngine {
            precision: bits,
            rank,
            k_min,
            k_max,
            n_max,
            moments,
            alphas,
            polys,
            defect,
            beta_sq,
        })
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn k_min(&self) -> usize {
        self.k_min
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn moments(&self) -> &MomentSequence {
        &self.moments
    }

    /// Coefficients recovered from the moments, as many as the rank allows.
    pub fn alphas(&self) -> &[Complex] {
        &self.alphas
    }

    pub fn polynomials(&self) -> &[MonicPolynomial] {
        &self.polys
    }

    /// `max_{i<j} |⟨Φ_j, z^i⟩| / ‖Φ_j‖` over the computed polynomials.
    pub fn defect(&self) -> f64 {
        self.defect.to_f64()
    }

    fn is_rank_limited(&self, n: usize) -> bool {
        self.rank.is_some_and(|r| n + 1 >= r)
    }

    pub fn beta(&self, k: usize, n: usize) -> Result<BetaResult> {
        if k < self.k_min || k > self.k_max || n > self.n_max {
            return Err(OpucError::domain(format!(
                "β({k}, {n}) outside the engine range {} ≤ k ≤ {}, n ≤ {}",
                self.k_min, self.k_max, self.n_max
            )));
        }
        Ok(BetaResult {
            k,
            n,
            value: self.beta_sq[k - self.k_min][n].clone().sqrt(),
            precision: self.precision,
            residual: self.defect.to_f64(),
            rank_limited: k > 0 && self.is_rank_limited(n),
        })
    }

    /// `β(k, 0..=n_max)`.
    pub fn row(&self, k: usize) -> Result<Vec<BetaResult>> {
        (0..=self.n_max).map(|n| self.beta(k, n)).collect()
    }

    /// `‖Φ_n‖`, zero once `n` reaches the rank of an atomic measure.
    pub fn monic_norm(&self, n: usize) -> Result<Float> {
        match self.polys.get(n) {
            Some(p) => Ok(p.norm()),
            None if self.rank.is_some_and(|r| n >= r) => Ok(Float::new(self.precision)),
            None => Err(OpucError::domain(format!(
                "‖Φ_{n}‖ beyond the engine degree {}",
                self.polys.len() - 1
            ))),
        }
    }

    /// Lemma 3.7 bound from the engine's own `Φ_{n+1}`.
    pub fn bound_3_7(&self, k: usize, n: usize) -> Result<Float> {
        check_bound_args(k, n)?;
        match self.polys.get(n + 1) {
            Some(phi) => Ok(bound_3_7_from_poly(phi, k)),
            None => self.monic_norm(n + 1),
        }
    }

    /// Lemma 3.8 bound `‖Φ_{n+1}‖ (2n+2)^{k-1}`.
    pub fn bound_3_8(&self, k: usize, n: usize) -> Result<Float> {
        check_bound_args(k, n)?;
        let norm = self.monic_norm(n + 1)?;
        Ok(norm * growth_factor(self.precision, k, n))
    }
}

fn beta_sq_row(
    moments: &MomentSequence,
    polys: &[MonicPolynomial],
    rank: Option<usize>,
    k: usize,
    n_max: usize,
    tol: &Float,
) -> Result<Vec<Float>> {
    let prec = moments.precision();
    let m = moments.values();
    let mut row = Vec::with_capacity(n_max + 1);
    let mut captured = Float::new(prec);
    for n in 0..=n_max {
        if k == 0 || rank.is_some_and(|r| n + 1 >= r) {
            row.push(Float::new(prec));
            continue;
        }
        // |⟨z^{-k}, Φ_n⟩| = |Σ_i b_{n,i} m_{k+i}|
        let phi = &polys[n];
        let mut inner = Complex::zero(prec);
        for (b, mi) in phi.coeffs.iter().zip(&m[k..]) {
            inner.add_mul(b, mi);
        }
        captured += inner.norm_sqr() / &phi.norm_sq;
        let value = Float::with_val(prec, 1 - &captured);
        if value < 0 {
            if Float::with_val(prec, -&value) > *tol {
                return Err(OpucError::Precision {
                    index: n,
                    detail: format!("β({k}, {n})² = {:e} is negative", value.to_f64()),
                });
            }
            row.push(Float::new(prec));
        } else {
            row.push(value);
        }
    }
    Ok(row)
}

fn orthogonality_defect(moments: &MomentSequence, polys: &[MonicPolynomial]) -> Float {
    let prec = moments.precision();
    polys
        .par_iter()
        .skip(1)
        .map(|phi| {
            let j = phi.degree();
            let mut worst = Float::new(prec);
            for i in 0..j {
                // ⟨Φ_j, z^i⟩ = Σ_l b_{j,l} m_{l-i}
                let mut acc = Complex::zero(prec);
                for (l, b) in phi.coeffs.iter().enumerate() {
                    acc.add_mul(b, &moments.get(l as i64 - i as i64));
                }
                let v = acc.abs();
                if v > worst {
                    worst = v;
                }
            }
            worst / phi.norm()
        })
        .reduce(|| Float::new(prec), |a, b| if a > b { a } else { b })
}

/// `β(k, n)` for a single pair.
pub fn beta(
    measure: &MeasureSpec,
    k: usize,
    n: usize,
    policy: PrecisionPolicy,
) -> Result<BetaResult> {
    BetaEngine::rows(measure, k, k, n, policy)?.beta(k, n)
}

/// Distance of a monomial to the span of a finite set of monomials.
#[derive(Clone, Debug, PartialEq)]
pub struct GapResult {
    pub target: u64,
    pub size: usize,
    pub value: Float,
    pub precision: u32,
    pub residual: f64,
    /// Exponents dropped because they already lie in the span of earlier ones.
    pub dependent: usize,
}

/// `dist(z^target, span{z^s : s ∈ exponents})` from the Gram system
/// `A_{st} = m_{t-s}`, `g_s = m_{target-s}`.
pub fn gap_distance(
    measure: &MeasureSpec,
    target: u64,
    exponents: &[u64],
    policy: PrecisionPolicy,
) -> Result<GapResult> {
    let mut set = exponents.to_vec();
    set.sort_unstable();
    set.dedup();
    let (lo, hi) = match (set.first(), set.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Err(OpucError::domain("exponent set is empty")),
    };
    if set.binary_search(&target).is_ok() {
        return Ok(GapResult {
            target,
            size: set.len(),
            value: Float::new(policy.start),
            precision: policy.start,
            residual: 0.0,
            dependent: 0,
        });
    }
    let order = (hi - lo).max(target.abs_diff(lo)).max(target.abs_diff(hi));
    let order = usize::try_from(order).map_err(|_| OpucError::domain("exponent span too large"))?;
    let finite_rank = measure.rank().is_some();
    policy.run(|bits| {
        let moments = measure.moments(order, bits)?;
        let factor = GramFactor::new(&moments, &set, finite_rank)?;
        Ok(factor.distances(target, &[set.len()])?.remove(0))
    })
}

/// `A = L L^H` for `A_{ij} = ⟨z^{s_j}, z^{s_i}⟩`, lower triangular with a
/// positive real diagonal. A missing diagonal marks a dropped exponent.
struct GramFactor<'a> {
    moments: &'a MomentSequence,
    set: &'a [u64],
    l: Vec<Vec<Complex>>,
    diag: Vec<Option<Float>>,
}

impl<'a> GramFactor<'a> {
    fn new(moments: &'a MomentSequence, set: &'a [u64], finite_rank: bool) -> Result<Self> {
        let prec = moments.precision();
        let size = set.len();
        let floor = conditioning_floor(prec);
        // Pivots this small are treated as exact linear dependence (finite rank).
        let dependent_floor = pow2_neg(prec, prec / 2);
        let mut f = GramFactor {
            moments,
            set,
            l: vec![Vec::new(); size],
            diag: vec![None; size],
        };
        for j in 0..size {
            let mut d = f.gram(j, j).re;
            for c in &f.l[j] {
                d -= c.norm_sqr();
            }
            let usable = if finite_rank {
                d > dependent_floor
            } else if d < floor {
                return Err(OpucError::Precision {
                    index: j,
                    detail: format!(
                        "Gram pivot {:e} for exponent {} below the conditioning floor",
                        d.to_f64(),
                        set[j]
                    ),
                });
            } else {
                true
            };
            let root = usable.then(|| d.sqrt());
            let column: Vec<Complex> = (j + 1..size)
                .into_par_iter()
                .map(|i| match &root {
                    Some(r) => {
                        let mut acc = f.gram(i, j);
                        for (a, b) in f.l[i].iter().zip(&f.l[j]) {
                            // subtract L_{i,t} conj(L_{j,t})
                            let mut t = Complex::zero(prec);
                            t.add_conj_mul(b, a);
                            acc.sub_assign(&t);
                        }
                        acc.div_real(r)
                    }
                    None => Complex::zero(prec),
                })
                .collect();
            for (i, entry) in (j + 1..size).zip(column) {
                f.l[i].push(entry);
            }
            f.diag[j] = root;
        }
        Ok(f)
    }

    fn gram(&self, i: usize, j: usize) -> Complex {
        self.moments.get(self.set[j] as i64 - self.set[i] as i64)
    }

    /// `dist(z^target, span{z^s : s ∈ set[..m]})` for each requested prefix length.
    fn distances(&self, target: u64, prefixes: &[usize]) -> Result<Vec<GapResult>> {
        let prec = self.moments.precision();
        let size = prefixes.iter().copied().max().unwrap_or(0);
        let rhs: Vec<Complex> = self.set[..size]
            .iter()
            .map(|&s| self.moments.get(target as i64 - s as i64))
            .collect();
        // L y = g; the leading block of L factors the leading block of A, so
        // the prefix sums of |y_i|² give every prefix distance at once.
        let mut y: Vec<Complex> = Vec::with_capacity(size);
        for i in 0..size {
            match &self.diag[i] {
                Some(r) => {
                    let mut acc = rhs[i].clone();
                    for (c, yt) in self.l[i].iter().zip(&y) {
                        acc.sub_assign(&c.mul(yt));
                    }
                    y.push(acc.div_real(r));
                }
                None => y.push(Complex::zero(prec)),
            }
        }
        let tol = residual_tolerance(prec);
        prefixes
            .iter()
            .map(|&m| {
                let mut captured = Float::new(prec);
                for v in &y[..m] {
                    captured += v.norm_sqr();
                }
                let mut dist_sq = Float::with_val(prec, 1 - &captured);
                if dist_sq < 0 {
                    if Float::with_val(prec, -&dist_sq) > tol {
                        return Err(OpucError::Precision {
                            index: m,
                            detail: format!("squared distance {:e} is negative", dist_sq.to_f64()),
                        });
                    }
                    dist_sq = Float::new(prec);
                }
                let residual = self.residual(&y[..m], &rhs[..m]);
                if residual > tol {
                    return Err(OpucError::Precision {
                        index: m,
                        detail: format!("Gram residual {:e} at {prec} bits", residual.to_f64()),
                    });
                }
                Ok(GapResult {
                    target,
                    size: m,
                    value: dist_sq.sqrt(),
                    precision: prec,
                    residual: residual.to_f64(),
                    dependent: self.diag[..m].iter().filter(|d| d.is_none()).count(),
                })
            })
            .collect()
    }

    /// Solves `L^H x = y` on a prefix and returns `max |A x - g|` over the
    /// retained equations.
    fn residual(&self, y: &[Complex], rhs: &[Complex]) -> Float {
        let prec = self.moments.precision();
        let m = y.len();
        let mut x = vec![Complex::zero(prec); m];
        for i in (0..m).rev() {
            if let Some(r) = &self.diag[i] {
                let mut acc = y[i].clone();
                for t in i + 1..m {
                    let mut s = Complex::zero(prec);
                    s.add_conj_mul(&self.l[t][i], &x[t]);
                    acc.sub_assign(&s);
                }
                x[i] = acc.div_real(r);
            }
        }
        (0..m)
            .into_par_iter()
            .filter(|&i| self.diag[i].is_some())
            .map(|i| {
                let mut acc = rhs[i].neg();
                for (t, xt) in x.iter().enumerate() {
                    acc.add_mul(&self.gram(i, t), xt);
                }
                acc.abs()
            })
            .reduce(|| Float::new(prec), |a, b| if a > b { a } else { b })
    }
}

/// Distances of several monomials to the spans of nested prefixes of one
/// exponent set, from a single factorization. `exponents` is sorted and
/// deduplicated first; `prefixes` are lengths into the sorted set.
/// Entry `[t][p]` belongs to `targets[t]` and `prefixes[p]`.
pub fn gap_distance_prefixes(
    measure: &MeasureSpec,
    targets: &[u64],
    exponents: &[u64],
    prefixes: &[usize],
    policy: PrecisionPolicy,
) -> Result<Vec<Vec<GapResult>>> {
    let mut set = exponents.to_vec();
    set.sort_unstable();
    set.dedup();
    if let Some(&m) = prefixes.iter().find(|&&m| m == 0 || m > set.len()) {
        return Err(OpucError::domain(format!(
            "prefix length {m} outside 1..={}",
            set.len()
        )));
    }
    let lo = set[0];
    let hi = *set.last().unwrap();
    let mut order = hi - lo;
    for &t in targets {
        order = order.max(t.abs_diff(lo)).max(t.abs_diff(hi));
    }
    let order = usize::try_from(order).map_err(|_| OpucError::domain("exponent span too large"))?;
    let finite_rank = measure.rank().is_some();
    policy.run(|bits| {
        let moments = measure.moments(order, bits)?;
        let factor = GramFactor::new(&moments, &set, finite_rank)?;
        targets
            .iter()
            .map(|&t| factor.distances(t, prefixes))
            .collect()
    })
}

/// `β(k, n)` by the Gram route: `dist(1, span{z^k, …, z^{k+n}})`.
pub fn beta_gram(
    measure: &MeasureSpec,
    k: usize,
    n: usize,
    policy: PrecisionPolicy,
) -> Result<GapResult> {
    let set: Vec<u64> = (k as u64..=(k + n) as u64).collect();
    gap_distance(measure, 0, &set, policy)
}

fn check_bound_args(k: usize, n: usize) -> Result<()> {
    if k == 0 || n == 0 {
        return Err(OpucError::domain(format!(
            "bounds are stated for k, n ≥ 1 (got k = {k}, n = {n})"
        )));
    }
    Ok(())
}

fn growth_factor(prec: u32, k: usize, n: usize) -> Float {
    Float::with_val(prec, 2 * n + 2).pow((k - 1) as u32)
}

/// `Σ_{t<k} F(t)` with `F(0) = 1` and `F(t) = Σ_{j=1}^{min(len,t)} a_j F(t-j)`,
/// i.e. the sum over all tuples `(j_1..j_i)` with entries in `[1, len]` and
/// `Σ j_s ≤ k-1` of `Π a_{j_s}`. `a[0]` holds `a_1`.
pub fn composition_bracket(a: &[Float], k: usize, prec: u32) -> Float {
    let mut f: Vec<Float> = Vec::with_capacity(k);
    let mut total = Float::new(prec);
    for t in 0..k {
        let ft = if t == 0 {
            Float::with_val(prec, 1)
        } else {
            let mut acc = Float::new(prec);
            for (j, aj) in a.iter().enumerate().take(t) {
                acc += Float::with_val(prec, aj * &f[t - j - 1]);
            }
            acc
        };
        total += &ft;
        f.push(ft);
    }
    total
}

fn bound_3_7_from_poly(phi: &MonicPolynomial, k: usize) -> Float {
    let prec = phi.prec();
    let n1 = phi.degree();
    // a_j = |b_{n+1, n+1-j}|
    let a: Vec<Float> = (1..=n1).map(|j| phi.coeffs[n1 - j].abs()).collect();
    phi.norm() * composition_bracket(&a, k, prec)
}

/// Lemma 3.7: `‖Φ_{n+1}‖ (1 + Σ_{i≥1} Σ_{j_1+…+j_i ≤ k-1} Π |b_{n+1,n+1-j_s}|)`.
pub fn bound_lemma_3_7(alphas: &VerblunskySequence, k: usize, n: usize) -> Result<Float> {
    check_bound_args(k, n)?;
    let polys = polynomials_from_alphas(alphas, n + 1)?;
    Ok(bound_3_7_from_poly(&polys[n + 1], k))
}

/// Lemma 3.8: `‖Φ_{n+1}‖ (2n+2)^{k-1}`.
pub fn bound_lemma_3_8(alphas: &VerblunskySequence, k: usize, n: usize) -> Result<Float> {
    check_bound_args(k, n)?;
    let norm = crate::szego::monic_norm_sq(alphas, n + 1)?.sqrt();
    Ok(norm * growth_factor(alphas.precision(), k, n))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxRow {
    pub k: usize,
    pub f_k: usize,
    pub beta: Option<f64>,
    pub precision: Option<u32>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxFunctionReport {
    pub rows: Vec<ApproxRow>,
    pub threshold: f64,
    /// `β(k, f(k)) ≤ threshold` on the top quartile of the range.
    pub verdict: bool,
    /// `β(k, f(k))` is nonincreasing along the table.
    pub monotone: bool,
}

/// Empirical test of `β(k, f(k)) → 0` over a finite range of `k`.
pub fn beta_approximating_check(
    measure: &MeasureSpec,
    f: &dyn Fn(usize) -> usize,
    k_range: &[usize],
    threshold: f64,
    policy: PrecisionPolicy,
) -> Result<ApproxFunctionReport> {
    if k_range.is_empty() {
        return Err(OpucError::domain("empty k range"));
    }
    let pairs: Vec<(usize, usize)> = k_range.iter().map(|&k| (k, f(k))).collect();
    for w in pairs.windows(2) {
        if w[1].0 <= w[0].0 || w[1].1 <= w[0].1 {
            return Err(OpucError::domain(format!(
                "k and f(k) must be strictly increasing: ({}, {}) then ({}, {})",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
    }
    let (k_max, n_max) = *pairs.last().unwrap();
    let shared = BetaEngine::new(measure, k_max, n_max, policy);
    let rows: Vec<ApproxRow> = pairs
        .par_iter()
        .map(|&(k, n)| {
            let res = match &shared {
                Ok(engine) => engine.beta(k, n),
                Err(_) => beta(measure, k, n, policy),
            };
            match res {
                Ok(r) => ApproxRow {
                    k,
                    f_k: n,
                    beta: Some(r.value.to_f64()),
                    precision: Some(r.precision),
                    error: None,
                },
                Err(e) => ApproxRow {
                    k,
                    f_k: n,
                    beta: None,
                    precision: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let top = rows.len() * 3 / 4;
    let verdict = rows[top..]
        .iter()
        .all(|r| r.beta.is_some_and(|b| b <= threshold));
    let monotone = rows.windows(2).all(|w| match (w[0].beta, w[1].beta) {
        (Some(a), Some(b)) => b <= a,
        _ => false,
    });
    Ok(ApproxFunctionReport {
        rows,
        threshold,
        verdict,
        monotone,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum MinDegree {
    Found(BetaResult),
    /// `β(k, n_max)` still exceeds the tolerance.
    Overflow {
        n_max: usize,
        last: BetaResult,
    },
}

/// Smallest `n ≤ n_max` with `β(k, n) ≤ tol`. Engines grow geometrically and
/// the qualifying index is located by binary search over the monotone row.
pub fn find_min_degree(
    measure: &MeasureSpec,
    k: usize,
    tol: f64,
    n_max: usize,
    policy: PrecisionPolicy,
) -> Result<MinDegree> {
    if !(tol > 0.0) {
        return Err(OpucError::domain(format!(
            "tolerance {tol} must be positive"
        )));
    }
    let mut span = 16.min(n_max);
    loop {
        let engine = BetaEngine::rows(measure, k, k, span, policy)?;
        let row = engine.row(k)?;
        let idx = row.partition_point(|r| r.value > tol);
        if idx < row.len() {
            return Ok(MinDegree::Found(row[idx].clone()));
        }
        if span == n_max {
            return Ok(MinDegree::Overflow {
                n_max,
                last: row[n_max].clone(),
            });
        }
        span = (span * 2).min(n_max);
    }
}
