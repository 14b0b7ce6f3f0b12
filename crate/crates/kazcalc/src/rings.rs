//! Poincare series and generator data for the classifying spaces BSO(k),
//! BO(k) and stable BSO, plus the Euler-class vanishing rules used by the
//! rational splitting criterion.
//!
//! Rational cohomology conventions:
//! - H^*(BSO(2l+1); Q) = Q[p_1, ..., p_l], deg p_i = 4i;
//! - H^*(BSO(2l); Q)   = Q[p_1, ..., p_{l-1}, chi], deg chi = 2l, chi^2 = p_l;
//! - H^*(BO(k); Q)     = Q[p_1, ..., p_{floor(k/2)}].

use crate::error::{Error, Result};
use crate::series::{GeneratorKind, GradedRingSpec, TruncatedSeries};

/// A classifying space whose rational cohomology is a free graded ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassifyingSpace {
    /// Oriented Grassmannian BSO(k), k >= 1.
    Bso(usize),
    /// Unoriented Grassmannian BO(k), k >= 1.
    Bo(usize),
    /// Stable BSO: one polynomial generator in every positive degree 4i.
    BsoStable,
    /// An explicitly given free graded-commutative ring.
    Ring(GradedRingSpec),
}

/// Generator degrees of H^*(BSO(k); Q).
pub fn bso_generators(k: usize) -> Result<GradedRingSpec> {
    if k == 0 {
        return Err(Error::MustBePositive { what: "rank k" });
    }
    if k % 2 == 1 {
        let l = (k - 1) / 2;
        Ok(GradedRingSpec::polynomial((1..=l).map(|i| 4 * i)))
    } else {
        let l = k / 2;
        Ok(GradedRingSpec::polynomial((1..l).map(|i| 4 * i))
            .with_generator(2 * l, GeneratorKind::Polynomial))
    }
}

/// Generator degrees of H^*(BO(k); Q): Pontrjagin classes p_1..p_{floor(k/2)}.
pub fn bo_generators(k: usize) -> Result<GradedRingSpec> {
    if k == 0 {
        return Err(Error::MustBePositive { what: "rank k" });
    }
    Ok(GradedRingSpec::polynomial((1..=k / 2).map(|i| 4 * i)))
}

/// Generators of H^*(BSO; Q) up to the truncation degree.
pub fn bso_stable_generators(truncation: usize) -> GradedRingSpec {
    GradedRingSpec::polynomial((1..=truncation / 4).map(|i| 4 * i))
}

/// The coefficient ring A = Q[p_1, ..., p_l] with l = floor(k/2): the ring
/// acting on every singular column of a corank-one family of codimension k.
pub fn morin_base_ring(k: usize) -> Result<GradedRingSpec> {
    if k == 0 {
        return Err(Error::MustBePositive {
            what: "codimension k",
        });
    }
    Ok(GradedRingSpec::polynomial((1..=k / 2).map(|i| 4 * i)))
}

/// Poincare series of a classifying space, truncated.
pub fn space_series(space: &ClassifyingSpace, truncation: usize) -> Result<TruncatedSeries> {
    match space {
        ClassifyingSpace::Bso(k) => bso_generators(*k)?.series(truncation),
        ClassifyingSpace::Bo(k) => bo_generators(*k)?.series(truncation),
        ClassifyingSpace::BsoStable => bso_stable_generators(truncation).series(truncation),
        ClassifyingSpace::Ring(spec) => spec.series(truncation),
    }
}

/// Symbolic descriptor of a direct sum of universal bundles: trivial
/// summands, oriented summands gamma^SO_d, and summands that are not
/// orientable over the stratum base (for instance gamma_1 (x) gamma_k
/// pieces). No bundle arithmetic happens beyond the Euler vanishing rules.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalBundle {
    /// Multiplicity of the trivial line summand.
    pub trivial_rank: usize,
    /// (fiber dimension, multiplicity) of oriented universal summands.
    pub oriented_summands: Vec<(usize, usize)>,
    /// Number of summands without an orientation over the base.
    pub non_orientable_summands: usize,
}

impl FormalBundle {
    /// The rank-zero bundle.
    pub fn empty() -> Self {
        Self::default()
    }

    /// A single oriented summand gamma^SO_d.
    pub fn oriented(d: usize) -> Self {
        Self {
            oriented_summands: vec![(d, 1)],
            ..Self::default()
        }
    }

    pub fn with_trivial(mut self, rank: usize) -> Self {
        self.trivial_rank += rank;
        self
    }

    pub fn with_oriented(mut self, d: usize, multiplicity: usize) -> Self {
        self.oriented_summands.push((d, multiplicity));
        self
    }

    pub fn with_non_orientable(mut self, count: usize) -> Self {
        self.non_orientable_summands += count;
        self
    }
}

/// Outcome of the rational Euler-class test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EulerVerdict {
    /// All summands are even-dimensional oriented bundles: e != 0.
    Nonzero,
    /// A trivial summand, or an odd-rank oriented summand, kills e.
    Zero,
    /// A non-orientable summand is present; the criterion does not apply.
    NotApplicable,
}

/// Decides whether the rational Euler class of the described bundle is
/// non-zero. The Euler class is multiplicative over direct sums, vanishes on
/// trivial summands, and vanishes rationally on odd-rank oriented bundles.
pub fn euler_class_nonzero(bundle: &FormalBundle) -> EulerVerdict {
    if bundle.non_orientable_summands > 0 {
        return EulerVerdict::NotApplicable;
    }
    if bundle.trivial_rank > 0 {
        return EulerVerdict::Zero;
    }
    if bundle
        .oriented_summands
        .iter()
        .any(|&(d, m)| m > 0 && d % 2 == 1)
    {
        return EulerVerdict::Zero;
    }
    EulerVerdict::Nonzero
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::geometric_factor;
    use num_bigint::BigInt;

    #[test]
    fn bso3_series() {
        let s = space_series(&ClassifyingSpace::Bso(3), 8).unwrap();
        let expected: Vec<BigInt> = [1, 0, 0, 0, 1, 0, 0, 0, 1]
            .iter()
            .map(|&c| BigInt::from(c))
            .collect();
        assert_eq!(s.coeffs(), &expected[..]);
    }

    #[test]
    fn bso2_series() {
        let s = space_series(&ClassifyingSpace::Bso(2), 6).unwrap();
        for d in 0..=6 {
            assert_eq!(s.coeff(d), BigInt::from(if d % 2 == 0 { 1 } else { 0 }));
        }
    }

    /// Partition-count oracle for the stable coefficient: multisets of parts
    /// from {4, 8, 12, ...} summing to the degree.
    fn stable_partitions(n: usize, target: usize) -> u64 {
        fn rec(parts: &[usize], target: usize) -> u64 {
            if target == 0 {
                return 1;
            }
            match parts.split_first() {
                None => 0,
                Some((&p, rest)) => {
                    let mut total = rec(rest, target);
                    if p <= target {
                        total += rec(parts, target - p);
                    }
                    total
                }
            }
        }
        let parts: Vec<usize> = (1..=n / 4).map(|i| 4 * i).collect();
        rec(&parts, target)
    }

    #[test]
    fn bso_stable_degree_eight() {
        let s = space_series(&ClassifyingSpace::BsoStable, 16).unwrap();
        assert_eq!(stable_partitions(16, 8), 2); // p1^2 and p2
        assert_eq!(s.coeff(8), BigInt::from(2));
        for d in 0..=16 {
            assert_eq!(s.coeff(d), BigInt::from(stable_partitions(16, d)));
        }
    }

    #[test]
    fn zero_rank_is_rejected() {
        assert!(space_series(&ClassifyingSpace::Bso(0), 4).is_err());
        assert!(space_series(&ClassifyingSpace::Bo(0), 4).is_err());
    }

    #[test]
    fn bso_even_presentations_agree() {
        // Generator-list presentation vs (1 + t^{2l}) * series(Q[p_1..p_l]).
        let n = 60;
        for l in 1..=10 {
            let direct = space_series(&ClassifyingSpace::Bso(2 * l), n).unwrap();
            let a = GradedRingSpec::polynomial((1..=l).map(|i| 4 * i))
                .series(n)
                .unwrap();
            let alt = a.add(&a.shift(2 * l)).unwrap();
            assert_eq!(direct, alt, "l={l}");
        }
    }

    #[test]
    fn bo_equals_odd_bso() {
        let n = 60;
        for k in 1..=12 {
            let bo = space_series(&ClassifyingSpace::Bo(k), n).unwrap();
            let bso_odd = space_series(&ClassifyingSpace::Bso(2 * (k / 2) + 1), n).unwrap();
            assert_eq!(bo, bso_odd, "k={k}");
        }
    }

    #[test]
    fn bso_dominates_bo() {
        let n = 60;
        for k in 1..=12 {
            let bso = space_series(&ClassifyingSpace::Bso(k), n).unwrap();
            let bo = space_series(&ClassifyingSpace::Bo(k), n).unwrap();
            assert!(bso.sub(&bo).unwrap().is_nonnegative(), "k={k}");
        }
    }

    #[test]
    fn morin_base_ring_examples() {
        assert_eq!(morin_base_ring(2).unwrap(), GradedRingSpec::polynomial([4]));
        assert_eq!(morin_base_ring(3).unwrap(), GradedRingSpec::polynomial([4]));
        assert_eq!(morin_base_ring(1).unwrap(), GradedRingSpec::empty());
        assert!(morin_base_ring(0).is_err());
    }

    #[test]
    fn euler_class_rules() {
        assert_eq!(
            euler_class_nonzero(&FormalBundle::oriented(2)),
            EulerVerdict::Nonzero
        );
        // A trivial summand kills the Euler class.
        for k in 1..=5 {
            assert_eq!(
                euler_class_nonzero(&FormalBundle::oriented(k).with_trivial(1)),
                EulerVerdict::Zero
            );
        }
        // r copies of (gamma^SO_2 + trivial line) for r >= 1.
        for r in 1..=4 {
            let bundle = FormalBundle::empty().with_oriented(2, r).with_trivial(r);
            assert_eq!(euler_class_nonzero(&bundle), EulerVerdict::Zero);
        }
        // Odd-rank oriented summand vanishes rationally.
        assert_eq!(
            euler_class_nonzero(&FormalBundle::oriented(3)),
            EulerVerdict::Zero
        );
        assert_eq!(
            euler_class_nonzero(&FormalBundle::oriented(2).with_non_orientable(1)),
            EulerVerdict::NotApplicable
        );
        assert_eq!(
            euler_class_nonzero(&FormalBundle::empty()),
            EulerVerdict::Nonzero
        );
    }

    #[test]
    fn bso_stable_is_partition_series() {
        let s = space_series(&ClassifyingSpace::BsoStable, 12).unwrap();
        let manual = geometric_factor(4, 12)
            .unwrap()
            .mul(&geometric_factor(8, 12).unwrap())
            .unwrap()
            .mul(&geometric_factor(12, 12).unwrap())
            .unwrap();
        assert_eq!(s, manual);
    }
}
