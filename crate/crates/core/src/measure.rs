//! Measure descriptions and trigonometric moments `m_k = ∫ z^k dμ`.
//!
//! Every measure kind compiles to a [`MomentSequence`] before any distance
//! computation; the Szegő recurrence links moments and Verblunsky
//! coefficients in both directions.

use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::complex::{pi, pow2_neg, real, Complex};
use crate::error::{OpucError, Result};
use crate::markoff::GeneratorSpec;
use crate::precision::{conditioning_floor, PrecisionPolicy};
use crate::szego::MonicPolynomial;

/// Atomic weights within this distance of a unit total are renormalized.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Trigonometric moments `m_0..m_N`, with `m_{-k} = conj(m_k)` implied.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence {
    values: Vec<Complex>,
    precision: u32,
}

impl MomentSequence {
    pub fn new(values: Vec<Complex>) -> Result<Self> {
        let first = values
            .first()
            .ok_or_else(|| OpucError::domain("moment sequence is empty"))?;
        if first.re != 1 || !first.im.is_zero() {
            return Err(OpucError::domain(format!(
                "m_0 must be exactly 1, got {first:?}"
            )));
        }
        let precision = first.prec();
        Ok(MomentSequence { values, precision })
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Highest stored index `N`.
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    /// `m_k` for any `|k| <= N`, using Hermitian symmetry for negative `k`.
    pub fn get(&self, k: i64) -> Complex {
        let idx = k.unsigned_abs() as usize;
        if k >= 0 {
            self.values[idx].clone()
        } else {
            self.values[idx].conj()
        }
    }

    pub fn truncate(&self, order: usize) -> MomentSequence {
        MomentSequence {
            values: self.values[..=order.min(self.order())].to_vec(),
            precision: self.precision,
        }
    }

    pub fn to_f64(&self) -> Vec<(f64, f64)> {
        self.values.iter().map(Complex::to_f64).collect()
    }
}

/// Prefix `α_0..α_{N-1}` of Verblunsky coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct VerblunskySequence {
    values: Vec<Complex>,
    generator: Option<GeneratorSpec>,
}

impl VerblunskySequence {
    pub fn new(values: Vec<Complex>, generator: Option<GeneratorSpec>) -> Result<Self> {
        for (j, a) in values.iter().enumerate() {
            if a.norm_sqr() >= 1 {
                return Err(OpucError::domain(format!(
                    "Verblunsky coefficient α_{j} = {a:?} is not inside the unit disk"
                )));
            }
        }
        Ok(VerblunskySequence { values, generator })
    }

    pub fn from_f64(prec: u32, values: &[(f64, f64)]) -> Result<Self> {
        let values = values
            .iter()
            .map(|&(re, im)| Complex::from_f64(prec, re, im))
            .collect();
        Self::new(values, None)
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn generator(&self) -> Option<&GeneratorSpec> {
        self.generator.as_ref()
    }

    pub fn precision(&self) -> u32 {
        self.values
            .first()
            .map(Complex::prec)
            .unwrap_or(crate::DEFAULT_PRECISION)
    }

    /// Regenerates a longer prefix from the generator tag.
    pub fn extended(&self, len: usize) -> Result<Self> {
        if len <= self.len() {
            return Ok(VerblunskySequence {
                values: self.values[..len].to_vec(),
                generator: self.generator.clone(),
            });
        }
        match &self.generator {
            Some(g) => g.alphas(len, self.precision()),
            None => Err(OpucError::domain(format!(
                "cannot extend an untagged coefficient prefix from {} to {len}",
                self.len()
            ))),
        }
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|a| a.abs().to_f64()).collect()
    }
}

/// One point mass `weight · δ_point` with `|point| = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomPoint {
    pub point: Complex,
    pub weight: Float,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AtomSource {
    /// `(angle, weight)` pairs.
    Explicit(Vec<(f64, f64)>),
    /// First `count` atoms of the geometric measure `(1-p) Σ p^n δ_{q^n}`,
    /// renormalized to unit mass.
    TruncatedZhedanov { p: f64, theta0: f64, count: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum WeightSource {
    /// Density samples at `θ_g = 2πg/G`.
    Samples(Vec<f64>),
    /// `w ≡ 1` sampled on `grid` points.
    Lebesgue { grid: usize },
    /// Poisson kernel `(1 - r²)/(1 - 2r cos θ + r²)` sampled on `grid` points.
    Poisson { r: f64, grid: usize },
}

impl WeightSource {
    pub fn samples(&self) -> Vec<f64> {
        match self {
            WeightSource::Samples(s) => s.clone(),
            WeightSource::Lebesgue { grid } => vec![1.0; *grid],
            WeightSource::Poisson { r, grid } => poisson_samples(*r, *grid),
        }
    }
}

pub fn poisson_samples(r: f64, grid: usize) -> Vec<f64> {
    (0..grid)
        .map(|g| {
            let theta = 2.0 * std::f64::consts::PI * g as f64 / grid as f64;
            (1.0 - r * r) / (1.0 - 2.0 * r * theta.cos() + r * r)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeasureKind {
    AlphaDefined(GeneratorSpec),
    Atomic(AtomSource),
    WeightFunction(WeightSource),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSpec {
    pub kind: MeasureKind,
    pub label: String,
}

impl MeasureSpec {
    pub fn alpha_defined(generator: GeneratorSpec) -> Self {
        let label = generator.name().to_string();
        MeasureSpec {
            kind: MeasureKind::AlphaDefined(generator),
            label,
        }
    }

    pub fn atomic(source: AtomSource) -> Self {
        MeasureSpec {
            kind: MeasureKind::Atomic(source),
            label: "atomic".into(),
        }
    }

    pub fn weight(source: WeightSource) -> Self {
        MeasureSpec {
            kind: MeasureKind::WeightFunction(source),
            label: "weight_function".into(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Dimension of `L²(μ)` for atomic measures, `None` when infinite.
    pub fn rank(&self) -> Option<usize> {
        match &self.kind {
            MeasureKind::Atomic(AtomSource::Explicit(atoms)) => {
                let mut angles: Vec<f64> = atoms
                    .iter()
                    .map(|&(a, _)| a.rem_euclid(std::f64::consts::TAU))
                    .collect();
                angles.sort_by(f64::total_cmp);
                angles.dedup();
                Some(angles.len())
            }
            MeasureKind::Atomic(AtomSource::TruncatedZhedanov { count, .. }) => Some(*count),
            _ => None,
        }
    }

    pub fn atoms(&self, prec: u32) -> Option<Result<Vec<AtomPoint>>> {
        match &self.kind {
            MeasureKind::Atomic(AtomSource::Explicit(atoms)) => Some(explicit_atoms(atoms, prec)),
            MeasureKind::Atomic(AtomSource::TruncatedZhedanov { p, theta0, count }) => {
                Some(zhedanov_atoms(*p, *theta0, *count, prec))
            }
            _ => None,
        }
    }

    /// Moments `m_0..m_order` at `prec` bits.
    pub fn moments(&self, order: usize, prec: u32) -> Result<MomentSequence> {
        match &self.kind {
            MeasureKind::AlphaDefined(GeneratorSpec::Zhedanov { p, theta0 }) => {
                zhedanov_moments(*p, *theta0, order, prec)
            }
            MeasureKind::AlphaDefined(g) => moments_from_alphas(&g.alphas(order, prec)?, order),
            MeasureKind::Atomic(_) => {
                let atoms = self.atoms(prec).expect("atomic kind")?;
                moments_from_atoms(&atoms, order)
            }
            MeasureKind::WeightFunction(w) => moments_from_weight(&w.samples(), order, prec),
        }
    }

    /// Verblunsky coefficients `α_0..α_{len-1}`.
    ///
    /// Generators other than Zhedanov produce their coefficients directly;
    /// everything else goes through the moments.
    pub fn alphas(&self, len: usize, prec: u32) -> Result<VerblunskySequence> {
        match &self.kind {
            MeasureKind::AlphaDefined(g @ GeneratorSpec::Zhedanov { .. }) => {
                let m = self.moments(len, prec)?;
                let a = alphas_from_moments(&m)?;
                VerblunskySequence::new(a.values, Some(g.clone()))
            }
            MeasureKind::AlphaDefined(g) => g.alphas(len, prec),
            _ => alphas_from_moments(&self.moments(len, prec)?),
        }
    }

    /// As [`MeasureSpec::alphas`], retrying at higher precision while the
    /// moment recurrence is too ill-conditioned. A numerically degenerate
    /// moment matrix counts as a precision failure unless the measure has
    /// finite rank.
    pub fn alphas_with(&self, len: usize, policy: PrecisionPolicy) -> Result<VerblunskySequence> {
        let finite_rank = self.rank().is_some();
        policy.run(|bits| {
            self.alphas(len, bits).map_err(|e| match e {
                OpucError::Degenerate { order } if !finite_rank => OpucError::Precision {
                    index: order,
                    detail: format!("moment matrix numerically singular at {bits} bits"),
                },
                e => e,
            })
        })
    }
}

/// Moments from Verblunsky coefficients: each new `Φ_{n+1}` must be
/// orthogonal to `1`, which fixes `m_{n+1} = -Σ_{i≤n} b_{n+1,i} m_i`.
pub fn moments_from_alphas(alphas: &VerblunskySequence, order: usize) -> Result<MomentSequence> {
    if alphas.len() < order {
        return Err(OpucError::domain(format!(
            "need {order} coefficients, got {}",
            alphas.len()
        )));
    }
    let prec = alphas.precision();
    let floor = pow2_neg(prec, prec);
    let mut moments = vec![Complex::one(prec)];
    let mut phi = MonicPolynomial::one(prec);
    for (n, alpha) in alphas.values()[..order].iter().enumerate() {
        phi = phi.szego_step(alpha)?;
        if phi.norm_sq <= floor {
            return Err(OpucError::Precision {
                index: n,
                detail: format!(
                    "‖Φ_{}‖² fell below 2^-{prec}; Toeplitz conditioning exceeds the working precision",
                    n + 1
                ),
            });
        }
        let mut next = Complex::zero(prec);
        for (b, m) in phi.coeffs[..=n].iter().zip(&moments) {
            next.add_mul(b, m);
        }
        moments.push(next.neg());
    }
    MomentSequence::new(moments)
}

/// Levinson-type forward recurrence. Returns `α_0..α_{N-1}` for `m_0..m_N`.
pub fn alphas_from_moments(moments: &MomentSequence) -> Result<VerblunskySequence> {
    let (alphas, _) = levinson(moments, moments.order())?;
    VerblunskySequence::new(alphas, None)
}

/// Runs the Szegő recurrence driven by the moments. Produces `count`
/// coefficients and the monic polynomials `Φ_0..Φ_count`.
pub(crate) fn levinson(
    moments: &MomentSequence,
    count: usize,
) -> Result<(Vec<Complex>, Vec<MonicPolynomial>)> {
    let prec = moments.precision();
    let m = moments.values();
    if count > moments.order() {
        return Err(OpucError::domain(format!(
            "{count} coefficients need moments through order {count}, have {}",
            moments.order()
        )));
    }
    // 1 - |α|² at or below this is numerically on the circle.
    let degenerate = pow2_neg(prec, prec / 2);
    let floor = conditioning_floor(prec);
    let mut polys = vec![MonicPolynomial::one(prec)];
    let mut alphas = Vec::with_capacity(count);
    for n in 0..count {
        let phi = &polys[n];
        // δ = ⟨zΦ_n, 1⟩ = Σ b_i m_{i+1}; then conj(α_n) = δ / ‖Φ_n‖².
        let mut delta = Complex::zero(prec);
        for (b, mi) in phi.coeffs.iter().zip(&m[1..]) {
            delta.add_mul(b, mi);
        }
        let alpha = delta.conj().div_real(&phi.norm_sq);
        let factor = Float::with_val(prec, 1 - alpha.norm_sqr());
        if factor <= degenerate {
            return Err(OpucError::Degenerate { order: n });
        }
        let next = phi.szego_step_unchecked(&alpha, factor);
        if next.norm_sq < floor {
            return Err(OpucError::Precision {
                index: n,
                detail: format!(
                    "‖Φ_{}‖² = {:e} exhausts {prec}-bit precision",
                    n + 1,
                    next.norm_sq.to_f64()
                ),
            });
        }
        alphas.push(alpha);
        polys.push(next);
    }
    Ok((alphas, polys))
}

fn explicit_atoms(atoms: &[(f64, f64)], prec: u32) -> Result<Vec<AtomPoint>> {
    if atoms.is_empty() {
        return Err(OpucError::domain("atomic measure needs at least one atom"));
    }
    if let Some(&(a, w)) = atoms.iter().find(|&&(_, w)| !(w > 0.0)) {
        return Err(OpucError::domain(format!(
            "atom at angle {a} has nonpositive weight {w}"
        )));
    }
    let total: Float = atoms.iter().fold(Float::new(prec), |acc, &(_, w)| acc + w);
    check_unit_mass(&total)?;
    Ok(atoms
        .iter()
        .map(|&(angle, w)| AtomPoint {
            point: Complex::cis(&real(prec, angle)),
            weight: Float::with_val(prec, w) / &total,
        })
        .collect())
}

fn check_unit_mass(total: &Float) -> Result<()> {
    let dev = Float::with_val(total.prec(), total - 1u32).abs().to_f64();
    if dev > WEIGHT_SUM_TOLERANCE {
        return Err(OpucError::domain(format!(
            "atom weights sum to {} (must be 1 within {WEIGHT_SUM_TOLERANCE:e})",
            total.to_f64()
        )));
    }
    Ok(())
}

/// Atoms of the geometric measure truncated after `count` points.
pub fn zhedanov_atoms(p: f64, theta0: f64, count: usize, prec: u32) -> Result<Vec<AtomPoint>> {
    check_geometric_ratio(p)?;
    if count == 0 {
        return Err(OpucError::domain("atomic measure needs at least one atom"));
    }
    let p = real(prec, p);
    let q = Complex::cis(&real(prec, theta0));
    let one_minus_p = Float::with_val(prec, 1 - &p);
    let normalizer = Float::with_val(prec, 1 - p.clone().pow(count as u32));
    let mut weight = Float::with_val(prec, &one_minus_p / &normalizer);
    let mut point = Complex::one(prec);
    let mut atoms = Vec::with_capacity(count);
    for _ in 0..count {
        atoms.push(AtomPoint {
            point: point.clone(),
            weight: weight.clone(),
        });
        point = point.mul(&q);
        weight *= &p;
    }
    Ok(atoms)
}

/// Direct evaluation `m_k = Σ_j w_j z_j^k`.
pub fn moments_from_atoms(atoms: &[AtomPoint], order: usize) -> Result<MomentSequence> {
    let first = atoms
        .first()
        .ok_or_else(|| OpucError::domain("atomic measure needs at least one atom"))?;
    let prec = first.weight.prec();
    let mut total = Float::new(prec);
    for a in atoms {
        if a.weight <= 0 {
            return Err(OpucError::domain("atom weights must be positive"));
        }
        total += &a.weight;
    }
    check_unit_mass(&total)?;
    let mut moments = vec![Complex::zero(prec); order + 1];
    for a in atoms {
        let w = Float::with_val(prec, &a.weight / &total);
        let mut power = Complex::from_real(w);
        for m in moments.iter_mut() {
            m.add_assign(&power);
            power = power.mul(&a.point);
        }
    }
    moments[0] = Complex::one(prec);
    MomentSequence::new(moments)
}

/// Uniform-grid quadrature `m_k = (1/G) Σ_g w(θ_g) e^{ikθ_g}`, renormalized to
/// `m_0 = 1`.
pub fn moments_from_weight(samples: &[f64], order: usize, prec: u32) -> Result<MomentSequence> {
    let grid = samples.len();
    if grid < 4 * order.max(1) {
        return Err(OpucError::Resolution(format!(
            "grid of {grid} samples is below 4N = {} for N = {order}",
            4 * order.max(1)
        )));
    }
    if let Some((g, w)) = samples.iter().enumerate().find(|(_, w)| !(**w >= 0.0)) {
        return Err(OpucError::domain(format!(
            "density sample {g} is negative ({w})"
        )));
    }
    let mean = samples.iter().sum::<f64>() / grid as f64;
    if (mean - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(OpucError::domain(format!(
            "density has mean {mean}, expected 1 within {WEIGHT_SUM_TOLERANCE:e}"
        )));
    }
    check_nyquist(samples)?;

    let step = Float::with_val(prec, pi(prec) * 2u32) / grid as u32;
    let mut sums = vec![Complex::zero(prec); order + 1];
    for (g, &w) in samples.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let root = Complex::cis(&Float::with_val(prec, &step * g as u32));
        let mut power = Complex::from_real(real(prec, w));
        for s in sums.iter_mut() {
            s.add_assign(&power);
            power = power.mul(&root);
        }
    }
    let total = sums[0].re.clone();
    let mut moments: Vec<Complex> = sums.iter().map(|s| s.div_real(&total)).collect();
    moments[0] = Complex::one(prec);
    MomentSequence::new(moments)
}

/// Largest Fourier magnitude tolerated in the top half of the resolvable band.
const NYQUIST_TAIL_TOLERANCE: f64 = 1e-6;

/// Flags densities whose spectrum has not decayed by the Nyquist band.
fn check_nyquist(samples: &[f64]) -> Result<()> {
    let grid = samples.len();
    let mean = samples.iter().sum::<f64>() / grid as f64;
    let lo = grid / 4;
    let hi = grid / 2;
    let mut worst = 0.0f64;
    let mut worst_k = lo;
    for k in lo..=hi {
        let (mut re, mut im) = (0.0, 0.0);
        for (g, &w) in samples.iter().enumerate() {
            let t = std::f64::consts::TAU * ((k * g) % grid) as f64 / grid as f64;
            re += w * t.cos();
            im += w * t.sin();
        }
        let mag = (re * re + im * im).sqrt() / grid as f64 / mean;
        if mag > worst {
            worst = mag;
            worst_k = k;
        }
    }
    if worst > NYQUIST_TAIL_TOLERANCE {
        return Err(OpucError::Resolution(format!(
            "|m_{worst_k}| = {worst:e} near Nyquist; density not resolved by {grid} samples"
        )));
    }
    Ok(())
}

fn check_geometric_ratio(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(OpucError::domain(format!("p = {p} must lie in (0, 1)")))
    }
}

/// Closed-form moments `m_k = (1-p)/(1 - p q^k)`, `q = e^{iθ₀}`.
///
/// `q` should not be a root of unity; this is not checked.
pub fn zhedanov_moments(p: f64, theta0: f64, order: usize, prec: u32) -> Result<MomentSequence> {
    check_geometric_ratio(p)?;
    let p = real(prec, p);
    let one = Complex::one(prec);
    let numer = Complex::from_real(Float::with_val(prec, 1 - &p));
    let mut moments = vec![one.clone()];
    for k in 1..=order {
        let angle = Float::with_val(prec, real(prec, theta0) * k as u32);
        let denom = one.sub(&Complex::cis(&angle).scale(&p));
        moments.push(numer.div(&denom));
    }
    MomentSequence::new(moments)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn approx(c: &Complex, re: f64, im: f64, tol: f64) -> bool {
        let (a, b) = c.to_f64();
        (a - re).abs() <= tol && (b - im).abs() <= tol
    }

    #[test]
    fn lebesgue_moments() {
        let a = VerblunskySequence::from_f64(P, &[(0.0, 0.0); 3]).unwrap();
        let m = moments_from_alphas(&a, 3).unwrap();
        assert!(m.values().iter().skip(1).all(Complex::is_zero));
    }

    #[test]
    fn single_coefficient_gives_geometric_moments() {
        let a = VerblunskySequence::from_f64(P, &[(0.5, 0.0), (0.0, 0.0), (0.0, 0.0)]).unwrap();
        let m = moments_from_alphas(&a, 3).unwrap();
        for (k, expect) in [1.0, 0.5, 0.25, 0.125].iter().enumerate() {
            // dyadic values are exact
            assert_eq!(m.values()[k], Complex::from_f64(P, *expect, 0.0));
        }
        let back = alphas_from_moments(&m).unwrap();
        assert_eq!(back.values()[0], Complex::from_f64(P, 0.5, 0.0));
        assert!(back.values()[1].is_zero() && back.values()[2].is_zero());
    }

    #[test]
    fn coefficient_on_circle_rejected() {
        let err = VerblunskySequence::from_f64(P, &[(0.6, 0.8)]).unwrap_err();
        assert!(matches!(err, OpucError::Domain(_)));
    }

    #[test]
    fn tiny_norm_is_a_precision_error() {
        let a = VerblunskySequence::from_f64(64, &[(0.999, 0.0); 20]).unwrap();
        let err = moments_from_alphas(&a, 20).unwrap_err();
        assert!(matches!(err, OpucError::Precision { index, .. } if index < 20));
    }

    #[test]
    fn atom_examples() {
        let dirac = explicit_atoms(&[(0.0, 1.0)], P).unwrap();
        let m = moments_from_atoms(&dirac, 2).unwrap();
        assert!(m.values().iter().all(|c| approx(c, 1.0, 0.0, 0.0)));

        let pair = explicit_atoms(&[(0.0, 0.5), (std::f64::consts::PI, 0.5)], P).unwrap();
        let m = moments_from_atoms(&pair, 2).unwrap();
        assert!(approx(&m.values()[1], 0.0, 0.0, 1e-15));
        assert!(approx(&m.values()[2], 1.0, 0.0, 1e-15));
    }

    #[test]
    fn atom_weight_errors() {
        assert!(explicit_atoms(&[], P).is_err());
        assert!(explicit_atoms(&[(0.0, 0.5), (1.0, 0.0)], P).is_err());
        assert!(explicit_atoms(&[(0.0, 0.5), (1.0, 0.4)], P).is_err());
        // within tolerance: renormalized
        let atoms = explicit_atoms(&[(0.0, 0.5), (1.0, 0.5 + 1e-11)], P).unwrap();
        let total = Float::with_val(P, &atoms[0].weight + &atoms[1].weight);
        assert_eq!(total, 1);
    }

    #[test]
    fn weight_examples() {
        let m = moments_from_weight(&vec![1.0; 16], 3, P).unwrap();
        assert!(m.values()[1..].iter().all(|c| approx(c, 0.0, 0.0, 1e-60)));

        let cosine: Vec<f64> = (0..16)
            .map(|g| 1.0 + (std::f64::consts::TAU * g as f64 / 16.0).cos())
            .collect();
        let m = moments_from_weight(&cosine, 2, P).unwrap();
        assert!(approx(&m.values()[1], 0.5, 0.0, 1e-15));
        assert!(approx(&m.values()[2], 0.0, 0.0, 1e-15));
    }

    #[test]
    fn weight_errors() {
        assert!(matches!(
            moments_from_weight(&[1.0; 8], 3, P),
            Err(OpucError::Resolution(_))
        ));
        let mut neg = vec![1.0; 16];
        neg[3] = -0.1;
        neg[4] = 1.1;
        assert!(matches!(
            moments_from_weight(&neg, 2, P),
            Err(OpucError::Domain(_))
        ));
        // a step function is not resolved at any grid size
        let step: Vec<f64> = (0..64).map(|g| if g < 32 { 2.0 } else { 0.0 }).collect();
        assert!(matches!(
            moments_from_weight(&step, 4, P),
            Err(OpucError::Resolution(_))
        ));
    }

    #[test]
    fn zhedanov_first_moment() {
        assert!(zhedanov_moments(1.0, 1.0, 3, P).is_err());
        let m = zhedanov_moments(0.5, 1.0, 1, P).unwrap();
        let q = Complex::cis(&real(P, 1.0));
        let expect =
            Complex::from_f64(P, 0.5, 0.0).div(&Complex::one(P).sub(&q.scale(&real(P, 0.5))));
        let diff = m.values()[1].sub(&expect).abs();
        assert!(diff < 1e-70);
    }

    #[test]
    fn hermitian_access() {
        let m = zhedanov_moments(0.3, 2.0, 4, P).unwrap();
        assert_eq!(m.get(-3), m.get(3).conj());
    }
}
