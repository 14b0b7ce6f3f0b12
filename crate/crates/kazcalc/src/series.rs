//! Exact truncated formal power series over the integers.
//!
//! A `TruncatedSeries` stores coefficients for degrees `0..=N`, where `N` is
//! the truncation degree carried inside the value. Binary operations require
//! both operands to have the same truncation degree and fail otherwise;
//! silent re-truncation is never performed.
//!
//! Rank-valued series produced by the higher layers have non-negative
//! coefficients throughout; intermediate arithmetic may be signed.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// A formal power series with exact integer coefficients, truncated at a
/// fixed degree. The coefficient vector always holds exactly `N + 1` entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<BigInt>,
}

impl TruncatedSeries {
    /// The zero series truncated at `truncation`.
    pub fn zero(truncation: usize) -> Self {
        Self {
            coeffs: vec![BigInt::zero(); truncation + 1],
        }
    }

    /// The constant series 1.
    pub fn one(truncation: usize) -> Self {
        Self::monomial(0, truncation)
    }

    /// The monomial t^degree; zero when `degree` exceeds the truncation.
    pub fn monomial(degree: usize, truncation: usize) -> Self {
        let mut s = Self::zero(truncation);
        if degree <= truncation {
            s.coeffs[degree] = BigInt::one();
        }
        s
    }

    /// Builds a series from explicit coefficients for degrees `0..coeffs.len()`.
    /// The truncation degree is `coeffs.len() - 1`; `coeffs` must be non-empty.
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a series stores at least the degree-0 coefficient"
        );
        Self { coeffs }
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient at `degree`; zero above the truncation degree.
    pub fn coeff(&self, degree: usize) -> BigInt {
        self.coeffs
            .get(degree)
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// True when every coefficient is non-negative (rank semantics).
    pub fn is_nonnegative(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.sign() != num_bigint::Sign::Minus)
    }

    fn check_same_truncation(&self, other: &Self) -> Result<()> {
        if self.truncation() != other.truncation() {
            return Err(Error::TruncationMismatch {
                left: self.truncation(),
                right: other.truncation(),
            });
        }
        Ok(())
    }

    /// Coefficientwise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_truncation(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { coeffs })
    }

    /// Coefficientwise difference.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_truncation(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { coeffs })
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_truncation(other)?;
        let n = self.truncation();
        let mut coeffs = vec![BigInt::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n + 1 - i).enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] += a * b;
            }
        }
        Ok(Self { coeffs })
    }

    /// Multiplication by t^d: the coefficient at degree i of the result is
    /// the input coefficient at i - d; degrees pushed above the truncation
    /// drop.
    pub fn shift(&self, d: usize) -> Self {
        let n = self.truncation();
        let mut coeffs = vec![BigInt::zero(); n + 1];
        if d <= n {
            coeffs[d..].clone_from_slice(&self.coeffs[..=n - d]);
        }
        Self { coeffs }
    }

    /// Integer power by repeated squaring; exponent 0 gives the constant 1.
    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.truncation());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("equal truncations");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("equal truncations");
            }
        }
        acc
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "{c}")?,
                _ if c.is_one() => write!(f, "t^{d}")?,
                _ => write!(f, "{c}*t^{d}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// 1 + t^d + t^{2d} + ... truncated: the series of one polynomial generator
/// of degree d.
pub fn geometric_factor(d: usize, truncation: usize) -> Result<TruncatedSeries> {
    if d == 0 {
        return Err(Error::MustBePositive {
            what: "generator degree",
        });
    }
    let mut s = TruncatedSeries::zero(truncation);
    let mut i = 0;
    while i <= truncation {
        s.coeffs[i] = BigInt::one();
        i += d;
    }
    Ok(s)
}

/// 1 + t^d: the series of one exterior generator of degree d.
pub fn exterior_factor(d: usize, truncation: usize) -> Result<TruncatedSeries> {
    if d == 0 {
        return Err(Error::MustBePositive {
            what: "generator degree",
        });
    }
    let mut s = TruncatedSeries::one(truncation);
    if d <= truncation {
        s.coeffs[d] = BigInt::one();
    }
    Ok(s)
}

/// 1 + t^d + ... + t^{d(s-1)}: the series of a polynomial generator whose
/// s-th power is set to zero.
pub fn finite_geometric(d: usize, s: usize, truncation: usize) -> Result<TruncatedSeries> {
    if d == 0 {
        return Err(Error::MustBePositive {
            what: "generator degree",
        });
    }
    if s == 0 {
        return Err(Error::MustBePositive {
            what: "power count",
        });
    }
    let mut out = TruncatedSeries::zero(truncation);
    for j in 0..s {
        let deg = d * j;
        if deg > truncation {
            break;
        }
        out.coeffs[deg] = BigInt::one();
    }
    Ok(out)
}

/// Whether a generator contributes a geometric factor (unbounded powers) or
/// an exterior factor (squares to zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GeneratorKind {
    Polynomial,
    Exterior,
}

/// A free graded-commutative ring described by the multiset of its generator
/// degrees. Its Poincare series is the product of `1/(1 - t^d)` over the
/// polynomial generators and `(1 + t^d)` over the exterior ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedRingSpec {
    generators: Vec<(usize, GeneratorKind)>,
}

impl GradedRingSpec {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Ring with the given polynomial generator degrees.
    pub fn polynomial(degrees: impl IntoIterator<Item = usize>) -> Self {
        Self {
            generators: degrees
                .into_iter()
                .map(|d| (d, GeneratorKind::Polynomial))
                .collect(),
        }
    }

    pub fn with_generator(mut self, degree: usize, kind: GeneratorKind) -> Self {
        self.generators.push((degree, kind));
        self
    }

    pub fn generators(&self) -> &[(usize, GeneratorKind)] {
        &self.generators
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Tensor product of free rings: the generator multisets concatenate.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let mut generators = self.generators.clone();
        generators.extend(other.generators.iter().cloned());
        Self { generators }
    }

    /// Poincare series of the ring, truncated. A generator of degree 0 is a
    /// usage error.
    pub fn series(&self, truncation: usize) -> Result<TruncatedSeries> {
        let mut out = TruncatedSeries::one(truncation);
        for &(degree, kind) in &self.generators {
            let factor = match kind {
                GeneratorKind::Polynomial => geometric_factor(degree, truncation)?,
                GeneratorKind::Exterior => exterior_factor(degree, truncation)?,
            };
            out = out.mul(&factor)?;
        }
        Ok(out)
    }
}
