//! Markoff-class diagnostics and the named coefficient generators.
//!
//! A measure is in `Mar_{ε,ℓ}` when every window of `ℓ+1` consecutive
//! Verblunsky coefficients holds one of modulus at least `ε`. Only finite
//! prefixes can be inspected, so every verdict here is a prefix verdict.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::complex::{real, Complex};
use crate::error::{OpucError, Result};
use crate::measure::{MeasureSpec, VerblunskySequence};
use crate::precision::PrecisionPolicy;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkoffParams {
    pub epsilon: f64,
    pub window: usize,
}

impl MarkoffParams {
    pub fn new(epsilon: f64, window: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(OpucError::domain(format!(
                "ε = {epsilon} must lie in (0, 1)"
            )));
        }
        Ok(MarkoffParams { epsilon, window })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipVerdict {
    pub member: bool,
    /// Start of the first window without a coefficient of modulus `≥ ε`.
    pub witness: Option<usize>,
    pub windows_checked: usize,
}

/// Checks every window `[n, n+ℓ]` lying inside the prefix.
pub fn markoff_membership_prefix(
    alphas: &VerblunskySequence,
    params: MarkoffParams,
) -> Result<MembershipVerdict> {
    let width = params.window + 1;
    if alphas.len() < width {
        return Err(OpucError::domain(format!(
            "prefix of length {} is shorter than one window ({width})",
            alphas.len()
        )));
    }
    let hits: Vec<bool> = alphas
        .values()
        .iter()
        .map(|a| a.abs() >= params.epsilon)
        .collect();
    let windows_checked = hits.len() - width + 1;
    let witness = hits.windows(width).position(|w| !w.iter().any(|&h| h));
    Ok(MembershipVerdict {
        member: witness.is_none(),
        witness,
        windows_checked,
    })
}

/// `(1 - ε²)^{(n-1)/(ℓ+1) - 1}`, an upper bound for `‖Φ_n‖²` on `Mar_{ε,ℓ}`.
pub fn markoff_norm_bound(params: MarkoffParams, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(OpucError::domain("the norm bound is stated for n ≥ 1"));
    }
    let exponent = (n as f64 - 1.0) / (params.window as f64 + 1.0) - 1.0;
    Ok((1.0 - params.epsilon * params.epsilon).powf(exponent))
}

/// `|α_n|² = (1-p)² / (1 + p² - 2p Re(q^{n+1}))` for the geometric measure.
pub fn zhedanov_alpha_modulus_sq(p: f64, theta0: f64, n: usize, prec: u32) -> Result<Float> {
    if !(p > 0.0 && p < 1.0) {
        return Err(OpucError::domain(format!("p = {p} must lie in (0, 1)")));
    }
    let p = real(prec, p);
    let angle = real(prec, theta0) * (n as u64 + 1);
    let re_q = Float::with_val(prec, angle.cos());
    let numer = Float::with_val(prec, 1 - &p).square();
    let mut denom = Float::with_val(prec, p.square_ref()) + 1u32;
    denom -= Float::with_val(prec, &p * 2u32) * re_q;
    Ok(numer / denom)
}

pub fn zhedanov_alpha_modulus(p: f64, theta0: f64, n: usize, prec: u32) -> Result<Float> {
    Ok(zhedanov_alpha_modulus_sq(p, theta0, n, prec)?.sqrt())
}

/// Named coefficient generators. Serialized with a `name` tag, e.g.
/// `{"name": "zhedanov", "p": 0.5, "theta0": 1.0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Lebesgue,
    Constant {
        a_re: f64,
        #[serde(default)]
        a_im: f64,
    },
    /// Poisson kernel measure: `α_0 = r`, all later coefficients zero.
    Poisson {
        r: f64,
    },
    /// Geometric pure-point measure `(1-p) Σ p^n δ_{q^n}`, `q = e^{iθ₀}`.
    Zhedanov {
        p: f64,
        theta0: f64,
    },
    /// `α_{k!} = 1/√k` for `k ≥ 2`, zero elsewhere.
    Factorial,
    /// `α_n = c ρ^n`, square summable.
    Ell2Szego {
        c: f64,
        rho: f64,
    },
    /// i.i.d. coefficients with uniform phase and modulus drawn from a
    /// histogram profile on `[0, 1)`.
    RandomRotinv {
        profile: Vec<f64>,
        seed: u64,
    },
}

pub const GENERATOR_NAMES: [&str; 7] = [
    "lebesgue",
    "constant",
    "poisson",
    "zhedanov",
    "factorial",
    "ell2_szego",
    "random_rotinv",
];

impl GeneratorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorSpec::Lebesgue => "lebesgue",
            GeneratorSpec::Constant { .. } => "constant",
            GeneratorSpec::Poisson { .. } => "poisson",
            GeneratorSpec::Zhedanov { .. } => "zhedanov",
            GeneratorSpec::Factorial => "factorial",
            GeneratorSpec::Ell2Szego { .. } => "ell2_szego",
            GeneratorSpec::RandomRotinv { .. } => "random_rotinv",
        }
    }

    /// Checks parameter ranges; the error names the offending field.
    pub fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        let open_disk = |v: f64| v.is_finite() && v.abs() < 1.0;
        match self {
            GeneratorSpec::Lebesgue | GeneratorSpec::Factorial => Ok(()),
            GeneratorSpec::Constant { a_re, a_im } => {
                if a_re.hypot(*a_im) < 1.0 {
                    Ok(())
                } else {
                    Err((
                        "a_re",
                        format!("|a| = {} must be below 1", a_re.hypot(*a_im)),
                    ))
                }
            }
            GeneratorSpec::Poisson { r } => {
                if open_disk(*r) {
                    Ok(())
                } else {
                    Err(("r", format!("r = {r} must lie in (-1, 1)")))
                }
            }
            GeneratorSpec::Zhedanov { p, theta0 } => {
                if !(*p > 0.0 && *p < 1.0) {
                    Err(("p", format!("p = {p} must lie in (0, 1)")))
                } else if !theta0.is_finite() {
                    Err(("theta0", "θ₀ must be finite".into()))
                } else {
                    Ok(())
                }
            }
            GeneratorSpec::Ell2Szego { c, rho } => {
                if !open_disk(*c) {
                    Err(("c", format!("c = {c} must lie in (-1, 1)")))
                } else if !open_disk(*rho) {
                    Err(("rho", format!("ρ = {rho} must lie in (-1, 1)")))
                } else {
                    Ok(())
                }
            }
            GeneratorSpec::RandomRotinv { profile, .. } => {
                if profile.is_empty() {
                    Err(("profile", "profile needs at least one bin".into()))
                } else if profile.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
                    Err((
                        "profile",
                        "profile weights must be finite and nonnegative".into(),
                    ))
                } else if profile.iter().sum::<f64>() <= 0.0 {
                    Err(("profile", "profile has zero total mass".into()))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// The first `len` coefficients at `prec` bits.
    pub fn alphas(&self, len: usize, prec: u32) -> Result<VerblunskySequence> {
        self.validate()
            .map_err(|(field, why)| OpucError::domain(format!("{}.{field}: {why}", self.name())))?;
        let values = match self {
            GeneratorSpec::Lebesgue => vec![Complex::zero(prec); len],
            GeneratorSpec::Constant { a_re, a_im } => {
                vec![Complex::from_f64(prec, *a_re, *a_im); len]
            }
            GeneratorSpec::Poisson { r } => {
                let mut v = vec![Complex::zero(prec); len];
                if let Some(first) = v.first_mut() {
                    *first = Complex::from_f64(prec, *r, 0.0);
                }
                v
            }
            GeneratorSpec::Zhedanov { .. } => MeasureSpec::alpha_defined(self.clone())
                .alphas_with(len, PrecisionPolicy::from_start(prec))?
                .values()
                .iter()
                .map(|a| a.with_prec(prec))
                .collect(),
            GeneratorSpec::Factorial => {
                let mut v = vec![Complex::zero(prec); len];
                let mut k = 2u64;
                let mut fact = 2usize;
                while fact < len {
                    let a = Float::with_val(prec, k).recip_sqrt();
                    v[fact] = Complex::from_real(a);
                    k += 1;
                    fact = match fact.checked_mul(k as usize) {
                        Some(f) => f,
                        None => break,
                    };
                }
                v
            }
            GeneratorSpec::Ell2Szego { c, rho } => {
                let rho = real(prec, *rho);
                let mut cur = real(prec, *c);
                let mut v = Vec::with_capacity(len);
                for _ in 0..len {
                    v.push(Complex::from_real(cur.clone()));
                    cur *= &rho;
                }
                v
            }
            GeneratorSpec::RandomRotinv { profile, seed } => {
                random_rotinv(profile, *seed, len, prec)
            }
        };
        VerblunskySequence::new(values, Some(self.clone()))
    }
}

fn random_rotinv(profile: &[f64], seed: u64, len: usize, prec: u32) -> Vec<Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bins = WeightedIndex::new(profile).expect("validated profile");
    let width = profile.len() as f64;
    (0..len)
        .map(|_| {
            let r = loop {
                let r = (bins.sample(&mut rng) as f64 + rng.gen::<f64>()) / width;
                if r < 1.0 {
                    break r;
                }
            };
            let phase = rng.gen::<f64>() * std::f64::consts::TAU;
            let phase = Complex::cis(&real(prec, phase));
            phase.scale(&real(prec, r))
        })
        .collect()
}

/// Compiles a generator into a measure description together with its
/// coefficient prefix of length `len`.
pub fn build_measure(
    spec: &GeneratorSpec,
    len: usize,
    prec: u32,
) -> Result<(MeasureSpec, VerblunskySequence)> {
    let alphas = spec.alphas(len, prec)?;
    Ok((MeasureSpec::alpha_defined(spec.clone()), alphas))
}
