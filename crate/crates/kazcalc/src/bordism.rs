//! Left-right bordism generating functions via infinite symmetric powers,
//! framed bordism ranks, the 3-primary fold torsion parameter, and the
//! safe-prime bound.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::kazarian::{kazarian_homology_series, SingularityFamily};
use crate::rings::{space_series, ClassifyingSpace};
use crate::series::{exterior_factor, geometric_factor, TruncatedSeries};
use std::collections::BTreeMap;

/// Finitely supported rational Betti numbers of a space, degree -> rank.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BettiProfile {
    b: BTreeMap<usize, u64>,
}

impl BettiProfile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u64)>) -> Self {
        let mut profile = Self::default();
        for (degree, rank) in pairs {
            profile.set(degree, rank);
        }
        profile
    }

    pub fn set(&mut self, degree: usize, rank: u64) {
        if rank == 0 {
            self.b.remove(&degree);
        } else {
            self.b.insert(degree, rank);
        }
    }

    pub fn get(&self, degree: usize) -> u64 {
        self.b.get(&degree).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&usize, &u64)> {
        self.b.iter()
    }

    /// Profile of a one-point union: positive-degree ranks add.
    pub fn one_point_union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&degree, &rank) in &other.b {
            let total = out.get(degree) + rank;
            out.set(degree, total);
        }
        out
    }
}

/// Rational rank series of the infinite symmetric power of a space with the
/// given reduced Betti profile: the product of `(1/(1-t^i))^{b_i}` over even
/// i and `(1+t^i)^{b_i}` over odd i. The degree-0 entry is ignored (reduced
/// convention).
pub fn sp_series(profile: &BettiProfile, truncation: usize) -> Result<TruncatedSeries> {
    let mut out = TruncatedSeries::one(truncation);
    for (&degree, &rank) in profile.iter() {
        if degree == 0 || rank == 0 {
            continue;
        }
        let factor = if degree % 2 == 0 {
            geometric_factor(degree, truncation)?
        } else {
            exterior_factor(degree, truncation)?
        };
        out = out.mul(&factor.pow(rank))?;
    }
    Ok(out)
}

/// Rank series of the classifying space of the family's left-right theory:
/// the symmetric-power series of the k-fold suspension of the Kazarian space
/// with a disjoint basepoint. The exponent at degree i is the unreduced
/// Kazarian rank in degree i - k, so the degree-k factor carries b_0 = 1.
pub fn f_tau(family: &SingularityFamily, truncation: usize) -> Result<TruncatedSeries> {
    let k = family.codim();
    let kazarian = kazarian_homology_series(family, truncation)?;
    let mut profile = BettiProfile::new();
    for i in k..=truncation {
        let rank = kazarian.coeff(i - k);
        if rank.is_zero() {
            continue;
        }
        let rank: u64 = rank
            .try_into()
            .map_err(|_| Error::Usage("Kazarian rank exceeds u64 in f_tau exponent".into()))?;
        profile.set(i, rank);
    }
    sp_series(&profile, truncation)
}

/// Generating function of the left-right bordism groups: f_tau times the
/// stable BSO series. The rank in source dimension n is the coefficient at
/// t^{n+k}.
pub fn bordism_generating_function(
    family: &SingularityFamily,
    truncation: usize,
) -> Result<TruncatedSeries> {
    let f = f_tau(family, truncation)?;
    let omega = space_series(&ClassifyingSpace::BsoStable, truncation)?;
    f.mul(&omega)
}

/// Rank of the framed bordism group of the family in dimension n: the
/// convolution of the Kazarian series with the stable BSO series.
pub fn framed_bordism_rank(family: &SingularityFamily, n: usize) -> Result<BigInt> {
    let kazarian = kazarian_homology_series(family, n)?;
    let omega = space_series(&ClassifyingSpace::BsoStable, n)?;
    Ok(kazarian.mul(&omega)?.coeff(n))
}

/// Base-3 digit sum.
pub fn alpha3(mut x: u64) -> u64 {
    let mut sum = 0;
    while x > 0 {
        sum += x % 3;
        x /= 3;
    }
    sum
}

/// 3-primary torsion data of the fold cobordism group in dimension 4m - 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldTorsionReport {
    pub m: u64,
    /// t(m) = min { j : alpha3(2m + j) <= 3j }.
    pub t: u64,
    /// Rank of the free part: zero, since stable BSO has no odd-degree classes.
    pub rank_part: u64,
    pub torsion_descriptor: String,
}

/// Computes t(m) by direct search. The torsion is reported as a descriptor
/// parameterised by t(m); the group order itself is not committed to.
pub fn fold_torsion(m: u64) -> Result<FoldTorsionReport> {
    if m == 0 {
        return Err(Error::MustBePositive {
            what: "parameter m",
        });
    }
    let t = (0..)
        .find(|&j| alpha3(2 * m + j) <= 3 * j)
        .expect("alpha3(2m + j) grows slower than 3j");
    Ok(FoldTorsionReport {
        m,
        t,
        rank_part: 0,
        torsion_descriptor: format!("3-primary cyclic of parameter t(m)={t}"),
    })
}

/// Re-checks both minimality clauses of t(m) directly.
pub fn fold_torsion_minimality_holds(m: u64, t: u64) -> bool {
    alpha3(2 * m + t) <= 3 * t && (0..t).all(|j| alpha3(2 * m + j) > 3 * j)
}

fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= x {
        if x % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime strictly greater than n/2 + 1. For every prime at or above
/// this bound the p-component of the cobordism group agrees with that of the
/// Kazarian homology.
pub fn safe_prime_bound(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::TooSmall {
            what: "dimension n",
            min: 2,
        });
    }
    // p > n/2 + 1 over the rationals is p >= floor(n/2) + 2 over the integers.
    let mut p = n / 2 + 2;
    while !is_prime(p) {
        p += 1;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kazarian::StratumSpec;
    use crate::series::GradedRingSpec;
    use num_bigint::BigInt;

    fn point_family(k: usize) -> SingularityFamily {
        let strata = vec![StratumSpec::new(0, 0, GradedRingSpec::empty(), 0, false)];
        SingularityFamily::custom(k, strata).unwrap()
    }

    #[test]
    fn sp_series_examples() {
        let n = 12;
        assert_eq!(
            sp_series(&BettiProfile::from_pairs([(2, 1)]), n).unwrap(),
            geometric_factor(2, n).unwrap()
        );
        assert_eq!(
            sp_series(&BettiProfile::from_pairs([(3, 1)]), n).unwrap(),
            exterior_factor(3, n).unwrap()
        );
        assert_eq!(
            sp_series(&BettiProfile::new(), n).unwrap(),
            TruncatedSeries::one(n)
        );
        // b_0 is excluded by the reduced convention.
        assert_eq!(
            sp_series(&BettiProfile::from_pairs([(0, 5)]), n).unwrap(),
            TruncatedSeries::one(n)
        );
    }

    #[test]
    fn sp_series_multiplicative_over_one_point_union() {
        let n = 16;
        let a = BettiProfile::from_pairs([(2, 1), (3, 2)]);
        let b = BettiProfile::from_pairs([(2, 1), (5, 1)]);
        let lhs = sp_series(&a.one_point_union(&b), n).unwrap();
        let rhs = sp_series(&a, n)
            .unwrap()
            .mul(&sp_series(&b, n).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn f_tau_examples() {
        let n = 12;
        // Kazarian space a point, codimension 1: one odd generator at degree 1.
        assert_eq!(
            f_tau(&point_family(1), n).unwrap(),
            exterior_factor(1, n).unwrap()
        );
        // Codimension 2: one even generator.
        assert_eq!(
            f_tau(&point_family(2), n).unwrap(),
            geometric_factor(2, n).unwrap()
        );
        // Kazarian space BSO(2), codimension 1: shifted profile is all odd.
        let family = SingularityFamily::prim(1).unwrap();
        let mut expected = TruncatedSeries::one(n);
        let mut d = 1;
        while d <= n {
            expected = expected.mul(&exterior_factor(d, n).unwrap()).unwrap();
            d += 2;
        }
        assert_eq!(f_tau(&family, n).unwrap(), expected);
    }

    #[test]
    fn bordism_generating_function_examples() {
        let n = 12;
        // Point Kazarian space, k = 1, source dimension 3: coefficient of t^4.
        let tau = bordism_generating_function(&point_family(1), n).unwrap();
        assert_eq!(tau.coeff(4), BigInt::from(1));
        // Source dimension 0 reads the coefficient at t^k.
        assert_eq!(tau.coeff(1), BigInt::from(1));
        assert!(tau.is_nonnegative());
    }

    #[test]
    fn framed_bordism_examples() {
        assert_eq!(
            framed_bordism_rank(&SingularityFamily::morin(2).unwrap(), 4).unwrap(),
            BigInt::from(2)
        );
        for family in [
            SingularityFamily::prim(1).unwrap(),
            SingularityFamily::morin(3).unwrap(),
        ] {
            assert_eq!(framed_bordism_rank(&family, 0).unwrap(), BigInt::from(1));
        }
        assert_eq!(
            framed_bordism_rank(&SingularityFamily::prim(1).unwrap(), 2).unwrap(),
            BigInt::from(1)
        );
    }

    #[test]
    fn alpha3_examples() {
        assert_eq!(alpha3(0), 0);
        assert_eq!(alpha3(9), 1);
        // 17 = 122 in base 3.
        assert_eq!(alpha3(17), 5);
    }

    #[test]
    fn fold_torsion_examples() {
        let report = fold_torsion(1).unwrap();
        assert_eq!(report.t, 1);
        assert_eq!(report.rank_part, 0);

        let report = fold_torsion(8).unwrap();
        assert_eq!(report.t, 2);
        assert!(fold_torsion_minimality_holds(8, 2));

        assert!(fold_torsion(0).is_err());
    }

    #[test]
    fn safe_prime_examples() {
        // Trial-division oracle doubles as the checker here.
        assert_eq!(safe_prime_bound(2).unwrap(), 3);
        assert_eq!(safe_prime_bound(10).unwrap(), 7);
        assert_eq!(safe_prime_bound(3).unwrap(), 3);
        assert!(safe_prime_bound(1).is_err());
        for n in 2..200u64 {
            let p = safe_prime_bound(n).unwrap();
            assert!(is_prime(p));
            assert!(2 * p > n + 2);
            // No smaller prime satisfies the strict inequality.
            for q in 2..p {
                assert!(!is_prime(q) || 2 * q <= n + 2);
            }
        }
    }
}
