//! Monic orthogonal polynomials and the Szegő recurrence
//! `Φ_{n+1} = zΦ_n - conj(α_n) Φ_n*`.

use rug::Float;

use crate::complex::Complex;
use crate::error::{OpucError, Result};
use crate::measure::{MeasureKind, MeasureSpec, VerblunskySequence};
use crate::precision::PrecisionPolicy;

/// `Φ_n(z) = Σ b_{n,i} z^i` with `b_{n,n} = 1`, together with `‖Φ_n‖²`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonicPolynomial {
    /// `b_{n,0..=n}`, lowest degree first.
    pub coeffs: Vec<Complex>,
    pub norm_sq: Float,
}

impl MonicPolynomial {
    /// `Φ_0 = 1` for a probability measure.
    pub fn one(prec: u32) -> Self {
        MonicPolynomial {
            coeffs: vec![Complex::one(prec)],
            norm_sq: Float::with_val(prec, 1),
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn prec(&self) -> u32 {
        self.norm_sq.prec()
    }

    pub fn norm(&self) -> Float {
        self.norm_sq.clone().sqrt()
    }

    /// One step of the recurrence. The norm is carried as
    /// `‖Φ_{n+1}‖² = ‖Φ_n‖² (1 - |α_n|²)`.
    pub fn szego_step(&self, alpha: &Complex) -> Result<MonicPolynomial> {
        let prec = self.prec();
        let factor = Float::with_val(prec, 1 - alpha.norm_sqr());
        if factor <= 0 {
            return Err(OpucError::domain(format!(
                "|α_{}| = {} is not below 1",
                self.degree(),
                alpha.abs().to_f64()
            )));
        }
        Ok(self.szego_step_unchecked(alpha, factor))
    }

    pub(crate) fn szego_step_unchecked(&self, alpha: &Complex, factor: Float) -> MonicPolynomial {
        let n = self.degree();
        let prec = self.prec();
        let ca = alpha.conj();
        let mut coeffs = Vec::with_capacity(n + 2);
        for i in 0..=n + 1 {
            // z Φ_n contributes b_{i-1}; Φ_n* contributes conj(b_{n-i}).
            let mut c = if i > 0 {
                self.coeffs[i - 1].clone()
            } else {
                Complex::zero(prec)
            };
            if i <= n {
                let star = self.coeffs[n - i].conj();
                c.sub_assign(&ca.mul(&star));
            }
            coeffs.push(c);
        }
        // keep the leading coefficient exactly one
        coeffs[n + 1] = Complex::one(prec);
        MonicPolynomial {
            coeffs,
            norm_sq: Float::with_val(prec, &self.norm_sq * &factor),
        }
    }

    /// Coefficients of `Φ_n*(z) = Σ conj(b_{n,n-i}) z^i`.
    pub fn reversed(&self) -> Vec<Complex> {
        self.coeffs.iter().rev().map(Complex::conj).collect()
    }

    pub fn eval(&self, z: &Complex) -> Complex {
        let mut acc = Complex::zero(self.prec());
        for b in self.coeffs.iter().rev() {
            acc = acc.mul(z).add(b);
        }
        acc
    }

    pub fn coeffs_f64(&self) -> Vec<(f64, f64)> {
        self.coeffs.iter().map(Complex::to_f64).collect()
    }
}

/// `Φ_0..Φ_count` from the first `count` coefficients.
pub fn polynomials_from_alphas(
    alphas: &VerblunskySequence,
    count: usize,
) -> Result<Vec<MonicPolynomial>> {
    if alphas.len() < count {
        return Err(OpucError::domain(format!(
            "need {count} coefficients, got {}",
            alphas.len()
        )));
    }
    let mut polys = vec![MonicPolynomial::one(alphas.precision())];
    for alpha in &alphas.values()[..count] {
        let next = polys.last().unwrap().szego_step(alpha)?;
        polys.push(next);
    }
    Ok(polys)
}

/// `‖Φ_n‖² = Π_{i<n} (1 - |α_i|²)`.
pub fn monic_norm_sq(alphas: &VerblunskySequence, n: usize) -> Result<Float> {
    if alphas.len() < n {
        return Err(OpucError::domain(format!(
            "‖Φ_{n}‖² needs {n} coefficients, got {}",
            alphas.len()
        )));
    }
    let prec = alphas.precision();
    let mut prod = Float::with_val(prec, 1);
    for a in &alphas.values()[..n] {
        prod *= Float::with_val(prec, 1 - a.norm_sqr());
    }
    Ok(prod)
}

/// Partial products of the norm identity plus, for densities, the
/// geometric mean `exp(∫ log w dm)`.
#[derive(Clone, Debug)]
pub struct SzegoConstant {
    /// Entry `n` is `Π_{i=0}^{n} (1 - |α_i|²) = ‖Φ_{n+1}‖²`.
    pub partial_products: Vec<Float>,
    pub quadrature: Option<Float>,
}

pub fn szego_constant(
    measure: &MeasureSpec,
    n_max: usize,
    policy: PrecisionPolicy,
) -> Result<SzegoConstant> {
    let prec = policy.start;
    let quadrature = match &measure.kind {
        MeasureKind::WeightFunction(w) => Some(geometric_mean(&w.samples(), prec)?),
        _ => None,
    };
    // Atomic measures run out of coefficients at their rank; the products are
    // exactly zero from there on.
    let available = match measure.rank() {
        Some(r) => (n_max + 1).min(r.saturating_sub(1)),
        None => n_max + 1,
    };
    let alphas = measure.alphas_with(available, policy)?;
    let mut partial_products = Vec::with_capacity(n_max + 1);
    let mut prod = Float::with_val(prec, 1);
    for n in 0..=n_max {
        match alphas.values().get(n) {
            Some(a) => prod *= Float::with_val(prec, 1 - a.norm_sqr()),
            None => prod = Float::new(prec),
        }
        partial_products.push(prod.clone());
    }
    Ok(SzegoConstant {
        partial_products,
        quadrature,
    })
}

/// `exp((1/G) Σ log w(θ_g))`.
pub fn geometric_mean(samples: &[f64], prec: u32) -> Result<Float> {
    if samples.is_empty() {
        return Err(OpucError::domain("no density samples"));
    }
    let mut acc = Float::new(prec);
    for (g, &w) in samples.iter().enumerate() {
        if !(w > 0.0) {
            return Err(OpucError::domain(format!(
                "density sample {g} is {w}; log w undefined"
            )));
        }
        acc += Float::with_val(prec, w).ln();
    }
    acc /= samples.len() as u32;
    Ok(acc.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markoff::GeneratorSpec;
    use crate::measure::WeightSource;

    const P: u32 = 256;

    fn seq(vals: &[(f64, f64)]) -> VerblunskySequence {
        VerblunskySequence::from_f64(P, vals).unwrap()
    }

    #[test]
    fn first_steps_by_hand() {
        let phi0 = MonicPolynomial::one(P);
        let z = phi0.szego_step(&Complex::zero(P)).unwrap();
        assert!(z.coeffs[0].is_zero());
        assert_eq!(z.coeffs[1], Complex::one(P));

        let phi1 = phi0.szego_step(&Complex::from_f64(P, 0.5, 0.0)).unwrap();
        assert_eq!(phi1.coeffs[0], Complex::from_f64(P, -0.5, 0.0));
        assert_eq!(phi1.norm_sq, 0.75);

        let polys =
            polynomials_from_alphas(&seq(&[(0.5, 0.0), (0.0, 0.0), (0.0, 0.0)]), 3).unwrap();
        let phi3 = &polys[3];
        let expect = [0.0, 0.0, -0.5, 1.0];
        for (c, e) in phi3.coeffs.iter().zip(expect) {
            assert_eq!(*c, Complex::from_f64(P, e, 0.0));
        }
        assert_eq!(phi3.norm_sq, 0.75);
    }

    #[test]
    fn step_rejects_unit_modulus() {
        let phi0 = MonicPolynomial::one(P);
        assert!(phi0.szego_step(&Complex::from_f64(P, 0.0, 1.0)).is_err());
    }

    #[test]
    fn reversal() {
        let phi0 = MonicPolynomial::one(P);
        let z = phi0.szego_step(&Complex::zero(P)).unwrap();
        let r = z.reversed();
        assert_eq!(r[0], Complex::one(P));
        assert!(r[1].is_zero());

        let phi1 = phi0.szego_step(&Complex::from_f64(P, 0.5, 0.25)).unwrap();
        let r = phi1.reversed();
        assert_eq!(r[0], Complex::one(P));
        assert_eq!(r[1], phi1.coeffs[0].conj());
        let back = MonicPolynomial {
            coeffs: r,
            norm_sq: phi1.norm_sq.clone(),
        }
        .reversed();
        assert_eq!(back, phi1.coeffs);
    }

    #[test]
    fn norm_products() {
        assert_eq!(monic_norm_sq(&seq(&[(0.0, 0.0); 5]), 5).unwrap(), 1);
        assert_eq!(
            monic_norm_sq(&seq(&[(0.5, 0.0), (0.0, 0.0), (0.0, 0.0)]), 3).unwrap(),
            0.75
        );
        let v = monic_norm_sq(&seq(&[(0.5, 0.0); 4]), 4).unwrap();
        assert_eq!(v, 81.0 / 256.0);
        assert!(monic_norm_sq(&seq(&[(0.5, 0.0); 2]), 3).is_err());
    }

    #[test]
    fn szego_constant_examples() {
        let leb = MeasureSpec::alpha_defined(GeneratorSpec::Lebesgue);
        let sc = szego_constant(&leb, 10, PrecisionPolicy::fixed(P)).unwrap();
        assert!(sc.partial_products.iter().all(|p| *p == 1));
        let flat = MeasureSpec::weight(WeightSource::Lebesgue { grid: 64 });
        assert_eq!(
            szego_constant(&flat, 4, PrecisionPolicy::fixed(P))
                .unwrap()
                .quadrature
                .unwrap(),
            1
        );

        let zh = MeasureSpec::alpha_defined(GeneratorSpec::Zhedanov {
            p: 0.5,
            theta0: 1.0,
        });
        let sc = szego_constant(&zh, 300, PrecisionPolicy::from_start(P)).unwrap();
        for w in sc.partial_products.windows(2) {
            assert!(w[1] < w[0]);
        }
        assert!(sc.partial_products[300] < 1e-6);
    }

    #[test]
    fn quadrature_rejects_zero_density() {
        let mut s = vec![1.0; 64];
        s[0] = 0.0;
        s[1] = 2.0;
        assert!(geometric_mean(&s, P).is_err());
    }
}
