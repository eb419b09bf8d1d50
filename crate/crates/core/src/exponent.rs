//! Exponent sets `Λ(k, ℓ) = ⋃_j [[k_j, k_j + ℓ_j]]` and the block
//! constructions that make `E(Λ)` dense for non-Szegő measures.
//!
//! Every "choose `k_{j+1}` at least X" step takes the minimal integer X.
//! Integers are `u128`; anything larger is a range error naming the last
//! block index that still fits.

use rug::ops::Pow;
use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{OpucError, Result};

/// A sorted list of disjoint, non-adjacent closed integer intervals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentSet {
    intervals: Vec<[u128; 2]>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    pub params: String,
}

impl Provenance {
    pub fn new(construction: &str, params: impl Into<String>) -> Self {
        Provenance {
            construction: construction.into(),
            params: params.into(),
        }
    }
}

impl ExponentSet {
    pub fn empty() -> Self {
        ExponentSet {
            intervals: Vec::new(),
            provenance: Provenance::default(),
        }
    }

    /// Sorts and merges overlapping or touching intervals.
    pub fn from_intervals(raw: impl IntoIterator<Item = (u128, u128)>) -> Result<Self> {
        let mut raw: Vec<(u128, u128)> = raw.into_iter().collect();
        if let Some(&(a, b)) = raw.iter().find(|(a, b)| a > b) {
            return Err(OpucError::domain(format!(
                "interval [{a}, {b}] is reversed"
            )));
        }
        raw.sort_unstable();
        let mut intervals: Vec<[u128; 2]> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match intervals.last_mut() {
                Some(last) if a <= last[1].saturating_add(1) => last[1] = last[1].max(b),
                _ => intervals.push([a, b]),
            }
        }
        Ok(ExponentSet {
            intervals,
            provenance: Provenance::default(),
        })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn intervals(&self) -> &[[u128; 2]] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn max(&self) -> Option<u128> {
        self.intervals.last().map(|i| i[1])
    }

    pub fn min(&self) -> Option<u128> {
        self.intervals.first().map(|i| i[0])
    }

    pub fn normalized(&self) -> Self {
        Self::from_intervals(self.intervals.iter().map(|i| (i[0], i[1])))
            .expect("stored intervals are ordered")
            .with_provenance(self.provenance.clone())
    }

    pub fn contains(&self, x: u128) -> bool {
        let idx = self.intervals.partition_point(|i| i[1] < x);
        self.intervals.get(idx).is_some_and(|i| i[0] <= x)
    }

    /// `|Λ ∩ [[lo, hi]]|`.
    pub fn count_in(&self, lo: u128, hi: u128) -> u128 {
        if lo > hi {
            return 0;
        }
        self.intervals
            .iter()
            .filter(|i| i[1] >= lo && i[0] <= hi)
            .map(|i| i[1].min(hi) - i[0].max(lo) + 1)
            .sum()
    }

    /// `|Λ ∩ [[1, n]]|`.
    pub fn count_upto(&self, n: u128) -> u128 {
        self.count_in(1, n)
    }

    /// Elements of `Λ ∩ [[lo, hi]]` in increasing order.
    pub fn section(&self, lo: u128, hi: u128) -> Result<Vec<u64>> {
        let size = self.count_in(lo, hi);
        if size > 1 << 24 {
            return Err(OpucError::domain(format!(
                "section [{lo}, {hi}] holds {size} exponents"
            )));
        }
        let mut out = Vec::with_capacity(size as usize);
        for i in &self.intervals {
            let (a, b) = (i[0].max(lo), i[1].min(hi));
            for x in a..=b {
                out.push(u64::try_from(x).map_err(|_| {
                    OpucError::domain(format!("exponent {x} exceeds the u64 range"))
                })?);
            }
        }
        Ok(out)
    }

    pub fn intersection(&self, other: &ExponentSet) -> ExponentSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a, b) = (self.intervals[i], other.intervals[j]);
            let lo = a[0].max(b[0]);
            let hi = a[1].min(b[1]);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a[1] < b[1] {
                i += 1;
            } else {
                j += 1;
            }
        }
        ExponentSet::from_intervals(out).expect("intersections are ordered")
    }

    pub fn is_disjoint(&self, other: &ExponentSet) -> bool {
        self.intersection(other).is_empty()
    }
}

/// Block starts and lengths of a construction plus the resulting set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockConstruction {
    pub k: Vec<u128>,
    pub l: Vec<u128>,
    /// Start of the first block not emitted, when the recursion defines it.
    pub next_k: Option<u128>,
    pub set: ExponentSet,
}

impl BlockConstruction {
    /// Checkpoints `N = k_{j+1} - 1` for the emitted blocks.
    pub fn checkpoints(&self) -> Vec<u128> {
        self.k
            .iter()
            .skip(1)
            .copied()
            .chain(self.next_k)
            .map(|k| k - 1)
            .collect()
    }
}

/// Growth functions `f: k ↦ n` used by the constructions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GrowthFn {
    /// `slope · k + offset`.
    Linear { slope: u64, offset: u64 },
    /// `⌊k^t⌋`.
    Power { t: f64 },
    /// `⌊c · k · ln k⌋`.
    KLogK { c: f64 },
}

impl GrowthFn {
    pub fn eval(&self, k: u128) -> Result<u128> {
        match *self {
            GrowthFn::Linear { slope, offset } => (slope as u128)
                .checked_mul(k)
                .and_then(|v| v.checked_add(offset as u128))
                .ok_or_else(|| range(format!("{slope}·{k} + {offset}"), 0)),
            GrowthFn::Power { t } => floor_pow(k, t),
            GrowthFn::KLogK { c } => {
                let prec = 256;
                let kf = Float::with_val(prec, k);
                let v = Float::with_val(prec, c) * kf.clone().ln() * kf;
                floor_to_u128(&v).ok_or_else(|| range(format!("{c}·{k}·ln {k}"), 0))
            }
        }
    }
}

fn range(detail: String, max_feasible: usize) -> OpucError {
    OpucError::Range {
        detail: format!("{detail} exceeds u128"),
        max_feasible,
    }
}

fn floor_to_u128(v: &Float) -> Option<u128> {
    if v.is_sign_negative() && !v.is_zero() {
        return None;
    }
    v.clone().floor().to_integer().and_then(|i| i.to_u128())
}

/// `⌊k^s⌋` computed with enough bits for an exact floor.
pub fn floor_pow(k: u128, s: f64) -> Result<u128> {
    let bits = (128.0 * s.abs().max(1.0)) as u32 + 128;
    let v = Float::with_val(bits, k).pow(Float::with_val(bits, s));
    floor_to_u128(&v).ok_or_else(|| range(format!("⌊{k}^{s}⌋"), 0))
}

/// `⌊c · e^{t^j}⌋`, exact, or `None` beyond `u128`.
fn floor_c_exp_power(c: f64, t: f64, j: u32) -> Option<u128> {
    // e^{t^j} needs about 1.45 t^j bits before the binary point.
    let magnitude = 1.45 * t.powi(j as i32);
    if !magnitude.is_finite() || magnitude > 200.0 {
        return None;
    }
    let bits = magnitude as u32 + 192;
    let x = Float::with_val(bits, t).pow(j);
    let v = Float::with_val(bits, c) * x.exp();
    floor_to_u128(&v)
}

fn check_strictly_increasing(k: &[u128]) -> Result<()> {
    if let Some(w) = k.windows(2).find(|w| w[1] <= w[0]) {
        return Err(OpucError::domain(format!(
            "k must be strictly increasing, got {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// `⋃_{j ≤ count} [[k_j, k_j + ℓ_j]]`, overlaps merged.
pub fn lambda_from_kl(k: &[u128], l: &[u128], count: usize) -> Result<ExponentSet> {
    if count > k.len() || count > l.len() {
        return Err(OpucError::domain(format!(
            "{count} blocks requested from {} starts and {} lengths",
            k.len(),
            l.len()
        )));
    }
    check_strictly_increasing(&k[..count])?;
    let mut raw = Vec::with_capacity(count);
    for j in 0..count {
        let end = k[j]
            .checked_add(l[j])
            .ok_or_else(|| range(format!("k_{0} + ℓ_{0}", j + 1), j))?;
        raw.push((k[j], end));
    }
    Ok(ExponentSet::from_intervals(raw)?
        .with_provenance(Provenance::new("blocks", format!("{count} blocks"))))
}

type Growth<'a> = &'a dyn Fn(u128) -> Result<u128>;

/// `k_1 = 1`, `ℓ_j = f(k_j) + j`, `k_{j+1} = (k_j + f(k_j) + j) j + 1`.
pub fn construct_cor_3_4(f: Growth, count: usize) -> Result<BlockConstruction> {
    let mut k = vec![1u128];
    let mut l = Vec::with_capacity(count);
    let mut next_k = None;
    for j in 1..=count {
        let kj = k[j - 1];
        let fk = f(kj)?;
        let jj = j as u128;
        let lj = fk
            .checked_add(jj)
            .ok_or_else(|| range(format!("ℓ_{j}"), j - 1))?;
        let next = kj
            .checked_add(lj)
            .and_then(|v| v.checked_mul(jj))
            .and_then(|v| v.checked_add(1))
            .ok_or_else(|| range(format!("k_{}", j + 1), j - 1));
        l.push(lj);
        match next {
            Ok(n) if j < count => k.push(n),
            Ok(n) => next_k = Some(n),
            Err(e) if j < count => return Err(e),
            Err(_) => {}
        }
    }
    let set = lambda_from_kl(&k, &l, count)?
        .with_provenance(Provenance::new("cor_3_4", format!("J={count}")));
    Ok(BlockConstruction { k, l, next_k, set })
}

/// Blocks `[[k_j, k_j + ⌊k_j^s⌋]]`. Without explicit starts, `k_1 = 1` and
/// `k_{j+1} = (k_j + ⌊k_j^s⌋) j + 1`.
pub fn construct_thm_1_2(s: f64, k: Option<&[u128]>, count: usize) -> Result<BlockConstruction> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(OpucError::domain(format!("s = {s} must exceed 1")));
    }
    let (k, l, next_k) = match k {
        Some(k) => {
            if k.len() < count {
                return Err(OpucError::domain(format!(
                    "{count} blocks requested from {} starts",
                    k.len()
                )));
            }
            check_strictly_increasing(&k[..count])?;
            let l = k[..count]
                .iter()
                .map(|&kj| floor_pow(kj, s))
                .collect::<Result<Vec<_>>>()?;
            (k[..count].to_vec(), l, k.get(count).copied())
        }
        None => {
            let mut ks = vec![1u128];
            let mut ls = Vec::with_capacity(count);
            let mut next_k = None;
            for j in 1..=count {
                let kj = ks[j - 1];
                let lj = floor_pow(kj, s).map_err(|_| range(format!("⌊k_{j}^s⌋"), j - 1))?;
                ls.push(lj);
                let next = kj
                    .checked_add(lj)
                    .and_then(|v| v.checked_mul(j as u128))
                    .and_then(|v| v.checked_add(1));
                match next {
                    Some(n) if j < count => ks.push(n),
                    Some(n) => next_k = Some(n),
                    None if j < count => return Err(range(format!("k_{}", j + 1), j)),
                    None => {}
                }
            }
            (ks, ls, next_k)
        }
    };
    let set = lambda_from_kl(&k, &l, count)?
        .with_provenance(Provenance::new("thm_1_2", format!("s={s}, J={count}")));
    Ok(BlockConstruction { k, l, next_k, set })
}

/// `C_{ε,ℓ} = -ℓ / ln(1 - ε²)`.
pub fn markoff_constant(epsilon: f64, window: u32, prec: u32) -> Result<Float> {
    if !(epsilon > 0.0 && epsilon < 1.0) || window == 0 {
        return Err(OpucError::domain(format!(
            "need ε ∈ (0, 1) and ℓ ≥ 1, got ε = {epsilon}, ℓ = {window}"
        )));
    }
    let e = Float::with_val(prec, epsilon);
    let inner = Float::with_val(prec, 1 - Float::with_val(prec, e.square_ref()));
    Ok(Float::with_val(prec, -(window as i32)) / inner.ln())
}

/// Blocks of length `⌊t · C_{ε,ℓ} · ln(k_j) · k_j⌋`.
pub fn construct_cor_4_2(
    epsilon: f64,
    window: u32,
    t: f64,
    k: &[u128],
    count: usize,
) -> Result<BlockConstruction> {
    if !(t > 2.0) || !t.is_finite() {
        return Err(OpucError::domain(format!("t = {t} must exceed 2")));
    }
    if k.len() < count {
        return Err(OpucError::domain(format!(
            "{count} blocks requested from {} starts",
            k.len()
        )));
    }
    check_strictly_increasing(&k[..count])?;
    if let Some(j) = k[..count].iter().position(|&kj| kj < 2) {
        return Err(OpucError::domain(format!(
            "k_{} = {} gives ln k_j ≤ 0",
            j + 1,
            k[j]
        )));
    }
    let prec = 256;
    let c = markoff_constant(epsilon, window, prec)?;
    let tc = Float::with_val(prec, t) * c;
    let l = k[..count]
        .iter()
        .enumerate()
        .map(|(j, &kj)| {
            let kf = Float::with_val(prec, kj);
            let v = Float::with_val(prec, &tc * kf.clone().ln()) * kf;
            floor_to_u128(&v).ok_or_else(|| range(format!("ℓ_{}", j + 1), j))
        })
        .collect::<Result<Vec<_>>>()?;
    let set = lambda_from_kl(k, &l, count)?.with_provenance(Provenance::new(
        "cor_4_2",
        format!("epsilon={epsilon}, window={window}, t={t}, J={count}"),
    ));
    Ok(BlockConstruction {
        k: k[..count].to_vec(),
        l,
        next_k: k.get(count).copied(),
        set,
    })
}

/// `Γ`, `Λ` and the first block index of `Λ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapComplement {
    pub gamma: ExponentSet,
    pub lambda: ExponentSet,
    /// First `j` from which `⌊e^{t^{j+1}}⌋ ≥ 2 k_j^s` holds through `J-1`.
    pub n_start: Option<usize>,
    /// `k_j` for `j = 1..=J`.
    pub k: Vec<u128>,
    pub s: f64,
}

/// `Γ = ⋃_{j≤J} [⌊e^{t^j}⌋, ⌊e^{t^j}⌋ + ⌊C e^{t̃^j}⌋]` and
/// `Λ = ⋃_{N ≤ j < J} [[k_j, k_j + ⌊k_j^s⌋]]` with
/// `k_j = ⌊e^{t^j}⌋ + ⌊C e^{t̃^j}⌋ + 1`.
pub fn construct_cor_4_3(
    t: f64,
    t_tilde: f64,
    c: f64,
    count: usize,
    s: Option<f64>,
) -> Result<GapComplement> {
    if !(t_tilde > 1.0 && t >= t_tilde && t.is_finite()) {
        return Err(OpucError::domain(format!(
            "need t ≥ t̃ > 1, got t = {t}, t̃ = {t_tilde}"
        )));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(OpucError::domain(format!("C = {c} must be positive")));
    }
    let s = s.unwrap_or((1.0 + t) / 2.0);
    if !(s > 1.0 && s < t) {
        return Err(OpucError::domain(format!(
            "s = {s} must lie in (1, t = {t})"
        )));
    }
    if count == 0 {
        return Err(OpucError::domain("J must be at least 1"));
    }
    let mut starts = Vec::with_capacity(count);
    let mut gamma_raw = Vec::with_capacity(count);
    let mut k = Vec::with_capacity(count);
    for j in 1..=count as u32 {
        let overflow = || range(format!("Γ block {j}"), j as usize - 1);
        let a = floor_c_exp_power(1.0, t, j).ok_or_else(overflow)?;
        let len = floor_c_exp_power(c, t_tilde, j).ok_or_else(overflow)?;
        let b = a.checked_add(len).ok_or_else(overflow)?;
        let kj = b.checked_add(1).ok_or_else(overflow)?;
        starts.push(a);
        gamma_raw.push((a, b));
        k.push(kj);
    }
    let prec = 256;
    let holds = |j: usize| -> bool {
        // ⌊e^{t^{j+1}}⌋ ≥ 2 k_j^s, j is 1-based
        let rhs = Float::with_val(prec, k[j - 1]).pow(Float::with_val(prec, s)) * 2u32;
        Float::with_val(prec, starts[j]) >= rhs
    };
    let n_start = (1..count).rev().take_while(|&j| holds(j)).last();
    let mut lambda_raw = Vec::new();
    if let Some(n) = n_start {
        for j in n..count {
            let lj = floor_pow(k[j - 1], s)?;
            let end = k[j - 1]
                .checked_add(lj)
                .ok_or_else(|| range(format!("Λ block {j}"), j - 1))?;
            lambda_raw.push((k[j - 1], end));
        }
    }
    let params = format!("t={t}, t_tilde={t_tilde}, C={c}, s={s}, J={count}");
    let gamma = ExponentSet::from_intervals(gamma_raw)?
        .with_provenance(Provenance::new("cor_4_3_gamma", params.clone()));
    let lambda = ExponentSet::from_intervals(lambda_raw)?
        .with_provenance(Provenance::new("cor_4_3_lambda", params));
    if !lambda.is_disjoint(&gamma) {
        return Err(OpucError::domain(
            "constructed Λ meets Γ; the separation inequality failed",
        ));
    }
    Ok(GapComplement {
        gamma,
        lambda,
        n_start,
        k,
        s,
    })
}

/// `k_1 = max Γ + 1` (or 1 for empty Γ), `ℓ_j = f(k_j) + j`,
/// `k_{j+1} = k_j + ℓ_j`.
pub fn construct_cor_3_5(gamma: &[u128], f: Growth, count: usize) -> Result<BlockConstruction> {
    let start = match gamma.iter().max() {
        Some(&m) => m
            .checked_add(1)
            .ok_or_else(|| range("max Γ + 1".into(), 0))?,
        None => 1,
    };
    let mut k = vec![start];
    let mut l = Vec::with_capacity(count);
    let mut next_k = None;
    for j in 1..=count {
        let kj = k[j - 1];
        let lj = f(kj)?
            .checked_add(j as u128)
            .ok_or_else(|| range(format!("ℓ_{j}"), j - 1))?;
        l.push(lj);
        match kj.checked_add(lj) {
            Some(n) if j < count => k.push(n),
            Some(n) => next_k = Some(n),
            None if j < count => return Err(range(format!("k_{}", j + 1), j)),
            None => {}
        }
    }
    let set = lambda_from_kl(&k, &l, count)?.with_provenance(Provenance::new(
        "cor_3_5",
        format!("|Γ|={}, J={count}", gamma.len()),
    ));
    Ok(BlockConstruction { k, l, next_k, set })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityCheckpoint {
    pub n: u128,
    pub count: u128,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    pub checkpoints: Vec<DensityCheckpoint>,
    pub lower_estimate: f64,
    pub upper_estimate: f64,
}

/// Exact `|Λ ∩ [[1, N]]|` at each checkpoint.
pub fn density_report(set: &ExponentSet, checkpoints: &[u128]) -> Result<DensityReport> {
    if checkpoints.is_empty() || checkpoints[0] == 0 {
        return Err(OpucError::domain("checkpoints must be positive"));
    }
    if checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(OpucError::domain("checkpoints must be increasing"));
    }
    let checkpoints: Vec<DensityCheckpoint> = checkpoints
        .iter()
        .map(|&n| {
            let count = set.count_upto(n);
            DensityCheckpoint {
                n,
                count,
                ratio: ratio(count, n),
            }
        })
        .collect();
    let lower_estimate = checkpoints
        .iter()
        .map(|c| c.ratio)
        .fold(f64::INFINITY, f64::min);
    let upper_estimate = checkpoints.iter().map(|c| c.ratio).fold(0.0, f64::max);
    Ok(DensityReport {
        checkpoints,
        lower_estimate,
        upper_estimate,
    })
}

fn ratio(count: u128, n: u128) -> f64 {
    let q = rug::Rational::from((Integer::from(count), Integer::from(n)));
    q.to_f64()
}

/// `count / n ≤ 1 / j`, compared exactly.
pub fn ratio_at_most_inverse(count: u128, n: u128, j: u128) -> bool {
    Integer::from(count) * Integer::from(j) <= Integer::from(n)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceAudit {
    /// `ℓ_j - f(k_j)` for each emitted block.
    pub gaps: Vec<i128>,
    /// Gaps are positive and strictly increasing.
    pub divergent: bool,
}

/// Recomputes `ℓ_j - f(k_j)` and checks that it grows along the blocks.
pub fn audit_divergence(k: &[u128], l: &[u128], f: Growth) -> Result<DivergenceAudit> {
    let gaps = k
        .iter()
        .zip(l)
        .map(|(&kj, &lj)| Ok(lj as i128 - f(kj)? as i128))
        .collect::<Result<Vec<_>>>()?;
    let divergent = gaps.first().is_some_and(|&g| g > 0) && gaps.windows(2).all(|w| w[1] > w[0]);
    Ok(DivergenceAudit { gaps, divergent })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(k: u128) -> Result<u128> {
        Ok(k)
    }

    fn set(raw: &[(u128, u128)]) -> ExponentSet {
        ExponentSet::from_intervals(raw.iter().copied()).unwrap()
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(
            lambda_from_kl(&[1, 5], &[0, 0], 2).unwrap().intervals(),
            &[[1, 1], [5, 5]]
        );
        assert_eq!(
            lambda_from_kl(&[1, 3], &[3, 1], 2).unwrap().intervals(),
            &[[1, 4]]
        );
        assert_eq!(
            lambda_from_kl(&[2, 10, 100], &[1, 4, 9], 3)
                .unwrap()
                .intervals(),
            &[[2, 3], [10, 14], [100, 109]]
        );
        assert!(lambda_from_kl(&[3, 3], &[0, 0], 2).is_err());
    }

    #[test]
    fn membership_and_counting() {
        let s = set(&[(2, 3), (10, 14), (100, 109)]);
        assert!(s.contains(2) && s.contains(14) && !s.contains(15) && !s.contains(0));
        assert_eq!(s.count_upto(12), 5);
        assert_eq!(s.count_upto(1000), 17);
        assert_eq!(s.section(3, 11).unwrap(), vec![3, 10, 11]);
        let t = set(&[(12, 101)]);
        assert_eq!(s.intersection(&t).intervals(), &[[12, 14], [100, 101]]);
    }

    #[test]
    fn cor_3_4_identity() {
        let c = construct_cor_3_4(&identity, 3).unwrap();
        assert_eq!(c.k, vec![1, 4, 21]);
        assert_eq!(c.l, vec![2, 6, 24]);
        assert_eq!(c.next_k, Some((21 + 21 + 3) * 3 + 1));
    }

    #[test]
    fn thm_1_2_examples() {
        let c = construct_thm_1_2(2.0, Some(&[2, 20]), 2).unwrap();
        assert_eq!(c.set.intervals(), &[[2, 6], [20, 420]]);
        assert!(construct_thm_1_2(1.0, None, 2).is_err());
        let auto = construct_thm_1_2(2.0, None, 4).unwrap();
        for (j, n) in auto.checkpoints().into_iter().enumerate() {
            let count = auto.set.count_upto(n);
            assert!(ratio_at_most_inverse(count, n, j as u128 + 1));
        }
    }

    #[test]
    fn cor_4_2_example() {
        let c = markoff_constant(1.0 / 3.0, 1, 128).unwrap();
        assert!((c.to_f64() - 8.490_187).abs() < 1e-6);
        let b = construct_cor_4_2(1.0 / 3.0, 1, 3.0, &[10], 1).unwrap();
        assert_eq!(b.l, vec![586]);
        assert!(construct_cor_4_2(1.0 / 3.0, 1, 3.0, &[1, 4], 2).is_err());
    }

    #[test]
    fn cor_4_3_first_gap() {
        let g = construct_cor_4_3(2.0, 2.0, 1.0, 6, Some(1.5)).unwrap();
        assert_eq!(g.gamma.intervals()[0], [7, 14]);
        assert_eq!(g.n_start, Some(2));
        assert!(g.lambda.is_disjoint(&g.gamma));
        let err = construct_cor_4_3(2.0, 2.0, 1.0, 8, None).unwrap_err();
        assert!(matches!(
            err,
            OpucError::Range {
                max_feasible: 6,
                ..
            }
        ));
    }

    #[test]
    fn cor_3_5_tiles() {
        let c = construct_cor_3_5(&[0, 1, 2], &identity, 2).unwrap();
        assert_eq!(c.k, vec![3, 7]);
        assert_eq!(c.l, vec![4, 9]);
        assert_eq!(c.set.intervals(), &[[3, 16]]);
        assert_eq!(construct_cor_3_5(&[], &identity, 1).unwrap().k, vec![1]);
    }

    #[test]
    fn density_examples() {
        let evens = ExponentSet::from_intervals((1..=500).map(|i| (2 * i, 2 * i))).unwrap();
        let r = density_report(&evens, &[1000]).unwrap();
        assert_eq!(r.checkpoints[0].ratio, 0.5);
        let full = set(&[(1, 50)]);
        assert_eq!(density_report(&full, &[50]).unwrap().upper_estimate, 1.0);
        assert!(density_report(&full, &[5, 5]).is_err());
    }

    #[test]
    fn growth_functions() {
        assert_eq!(GrowthFn::Power { t: 1.5 }.eval(4).unwrap(), 8);
        assert_eq!(
            GrowthFn::Linear {
                slope: 2,
                offset: 1
            }
            .eval(4)
            .unwrap(),
            9
        );
        assert_eq!(GrowthFn::KLogK { c: 1.0 }.eval(10).unwrap(), 23);
        assert_eq!(floor_pow(20, 2.0).unwrap(), 400);
    }
}
