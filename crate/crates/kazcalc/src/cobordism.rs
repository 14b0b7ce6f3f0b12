//! Rank extraction on top of the spectral-sequence engine: cobordism groups
//! over a point and over a target profile, immersion and elimination
//! obstruction ranks, rational splitting verdicts, and tower descriptions.
//!
//! Targets are Betti-number profiles, not manifolds. For a closed oriented
//! target the profile is its ordinary (co)homology ranks; for a Euclidean
//! target the compact-support profile is a single unit in the top degree, so
//! the pairing reduces to the rank over a point.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::kazarian::{
    apply_d1, build_e1, kazarian_homology_series, parity_blocks, FamilyKind, SingularityFamily,
    StratumSpec,
};
use crate::rings::{euler_class_nonzero, space_series, ClassifyingSpace, EulerVerdict};
use crate::series::{finite_geometric, TruncatedSeries};

/// Rational Betti numbers b^0..b^q of a target; the last index is the target
/// dimension. Profiles of finite complexes are allowed, so no duality is
/// enforced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetProfile {
    betti: Vec<u64>,
}

impl TargetProfile {
    pub fn new(betti: Vec<u64>) -> Result<Self> {
        if betti.is_empty() {
            return Err(Error::Usage(
                "a target profile needs at least the degree-0 entry".into(),
            ));
        }
        Ok(Self { betti })
    }

    /// Compact-support profile of Euclidean space of the given dimension:
    /// one unit in the top degree.
    pub fn euclidean(dim: usize) -> Self {
        let mut betti = vec![0; dim + 1];
        betti[dim] = 1;
        Self { betti }
    }

    pub fn dim(&self) -> usize {
        self.betti.len() - 1
    }

    pub fn betti(&self) -> &[u64] {
        &self.betti
    }

    /// Profile of the product with Euclidean j-space (compact supports):
    /// every degree shifts up by j.
    pub fn suspend(&self, j: usize) -> Self {
        let mut betti = vec![0; self.betti.len() + j];
        betti[j..].copy_from_slice(&self.betti);
        Self { betti }
    }

    /// Kunneth profile of a product of two targets.
    pub fn product(&self, other: &Self) -> Self {
        let mut betti = vec![0u64; self.dim() + other.dim() + 1];
        for (i, a) in self.betti.iter().enumerate() {
            for (j, b) in other.betti.iter().enumerate() {
                betti[i + j] += a * b;
            }
        }
        Self { betti }
    }

    /// Sum of betti[j] * coeff_{j - offset}(series) over j >= offset.
    fn pair(&self, series: &TruncatedSeries, offset: usize) -> BigInt {
        let mut total = BigInt::zero();
        for (j, &b) in self.betti.iter().enumerate() {
            if b == 0 || j < offset {
                continue;
            }
            total += BigInt::from(b) * series.coeff(j - offset);
        }
        total
    }
}

/// Rank of the cobordism group of the family in source dimension n, read off
/// the engine's homology series.
pub fn cob_rank(family: &SingularityFamily, n: usize) -> Result<BigInt> {
    Ok(kazarian_homology_series(family, n)?.coeff(n))
}

/// Closed-form rank series of the family's Kazarian homology: the
/// independent oracle for `cob_rank`. Custom families have no closed form.
pub fn closed_form_series(
    family: &SingularityFamily,
    truncation: usize,
) -> Result<TruncatedSeries> {
    let k = family.codim();
    match family.kind() {
        FamilyKind::Prim => space_series(&ClassifyingSpace::Bso(k + 1), truncation),
        FamilyKind::Morin => {
            let space = if k % 2 == 0 {
                ClassifyingSpace::Bo(k)
            } else {
                ClassifyingSpace::Bo(k + 1)
            };
            space_series(&space, truncation)
        }
        FamilyKind::Sigma1r(r) => {
            let a = crate::rings::morin_base_ring(k)?.series(truncation)?;
            if k % 2 == 1 {
                // Quotient of A[p_{l+1}] by the (floor(r/2)+1)-st power of
                // the top generator, which has degree 2(k+1).
                a.mul(&finite_geometric(2 * (k + 1), r / 2 + 1, truncation)?)
            } else if r % 2 == 1 {
                Ok(a)
            } else {
                a.add(&a.shift(r * (k + 1) + k))
            }
        }
        FamilyKind::Custom(_) => Err(Error::ClosedFormUnavailable),
    }
}

/// Same rank as `cob_rank`, computed from the closed-form series.
pub fn cob_rank_closed(family: &SingularityFamily, n: usize) -> Result<BigInt> {
    Ok(closed_form_series(family, n)?.coeff(n))
}

/// Rank of the cobordism group of the family over a target profile:
/// sum over j >= k of the j-th Betti number times the Kazarian rank in
/// degree j - k.
pub fn cob_rank_over_target(family: &SingularityFamily, target: &TargetProfile) -> Result<BigInt> {
    let series = kazarian_homology_series(family, target.dim())?;
    Ok(target.pair(&series, family.codim()))
}

/// Rank series of the Thom space of the stratum's target normal bundle: the
/// column series shifted by the codimension k of the maps.
fn immersion_series(stratum: &StratumSpec, k: usize, truncation: usize) -> Result<TruncatedSeries> {
    Ok(stratum.column_series(truncation)?.shift(k))
}

/// Rank of the cobordism group of immersions into the target with normal
/// bundle induced from the stratum's target universal bundle.
pub fn imm_rank(stratum: &StratumSpec, k: usize, target: &TargetProfile) -> Result<BigInt> {
    let series = immersion_series(stratum, k, target.dim())?;
    Ok(target.pair(&series, 0))
}

fn stratum_at(family: &SingularityFamily, r: usize) -> Result<StratumSpec> {
    if let Some(top) = family.top_index() {
        if r > top {
            return Err(Error::InvalidStratum(format!(
                "stratum {r} is beyond the family's top stratum {top}"
            )));
        }
        if r < top {
            return Err(Error::InvalidStratum(format!(
                "stratum {r} is not the top stratum of the family (top is {top})"
            )));
        }
    }
    let strata = family.strata(r)?;
    strata
        .into_iter()
        .find(|s| s.index == r)
        .ok_or_else(|| Error::InvalidStratum(format!("no stratum with index {r}")))
}

/// Rank of the complete obstruction group to eliminating the top stratum of
/// the family by cobordism: the immersion rank of that stratum over the
/// target.
pub fn elimination_obstruction_rank(
    family: &SingularityFamily,
    r: usize,
    target: &TargetProfile,
) -> Result<BigInt> {
    if r == 0 {
        return Err(Error::InvalidStratum(
            "nothing above the regular stratum to eliminate".into(),
        ));
    }
    let stratum = stratum_at(family, r)?;
    imm_rank(&stratum, family.codim(), target)
}

/// Homotopy rank of the residual factor of the key fibration in dimension m:
/// the coefficient of total degree m - k in column r of the limit page.
pub fn decomposition_b_ranks(family: &SingularityFamily, r: usize, m: usize) -> Result<BigInt> {
    let k = family.codim();
    if m < k {
        return Ok(BigInt::zero());
    }
    let truncation = (m - k).max(r * (k + 1) + k);
    let einf = apply_d1(&build_e1(family, truncation)?, family)?;
    Ok(einf
        .column(r)
        .map(|col| col.series.coeff(m - k))
        .unwrap_or_else(BigInt::zero))
}

/// Verdict of the rational splitting criterion for the top stratum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitVerdict {
    /// A non-zero rational Euler class splits the key fibration.
    Splits,
    /// The criterion is sufficient only; no conclusion.
    Unknown,
}

/// Applies the Euler-class splitting criterion to the top stratum r: splits
/// when either the source or the target universal bundle of the stratum has
/// non-zero rational Euler class; unknown otherwise (including when a bundle
/// descriptor is missing or carries non-orientable summands).
pub fn splitting_verdict(family: &SingularityFamily, r: usize) -> Result<SplitVerdict> {
    let stratum = stratum_at(family, r)?;
    let verdict = |bundle: &Option<crate::rings::FormalBundle>| {
        bundle
            .as_ref()
            .map(euler_class_nonzero)
            .unwrap_or(EulerVerdict::NotApplicable)
    };
    if verdict(&stratum.normal_bundle) == EulerVerdict::Nonzero
        || verdict(&stratum.target_bundle) == EulerVerdict::Nonzero
    {
        Ok(SplitVerdict::Splits)
    } else {
        Ok(SplitVerdict::Unknown)
    }
}

/// One stage of the tower: a parity block of strata and the bottom degrees
/// of the corresponding Thom-space fibers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerStage {
    pub columns: Vec<usize>,
    pub fiber_bottom_degrees: Vec<usize>,
}

/// Tower description of the classifying space of the family truncated at r:
/// stages are the parity blocks, fibers start at c_i + k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerDescription {
    pub stages: Vec<TowerStage>,
}

pub fn postnikov_tower(family: &SingularityFamily, r: usize) -> Result<TowerDescription> {
    let k = family.codim();
    let strata = family.strata(r)?;
    let codim_of = |i: usize| {
        strata
            .iter()
            .find(|s| s.index == i)
            .map(|s| s.source_codim)
            .expect("block indices come from the same strata")
    };
    let stages = parity_blocks(family, r)?
        .into_iter()
        .map(|columns| {
            let fiber_bottom_degrees = columns.iter().map(|&i| codim_of(i) + k).collect();
            TowerStage {
                columns,
                fiber_bottom_degrees,
            }
        })
        .collect();
    Ok(TowerDescription { stages })
}

/// First-page data of the rank spectral sequence attached to the tower:
/// entry (i, j) is the immersion rank of stratum i over the target times
/// Euclidean j-space. Rows run over strata 0..=r, columns over 0..=max_j.
pub fn tower_imm_table(
    family: &SingularityFamily,
    r: usize,
    target: &TargetProfile,
    max_j: usize,
) -> Result<Vec<Vec<BigInt>>> {
    let k = family.codim();
    let strata = family.strata(r)?;
    let mut rows = Vec::with_capacity(strata.len());
    for stratum in &strata {
        let mut row = Vec::with_capacity(max_j + 1);
        for j in 0..=max_j {
            row.push(imm_rank(stratum, k, &target.suspend(j))?);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Cross-oracle for odd codimension: the rank of the cobordism group of the
/// truncated family over a target must equal the sum of the immersion ranks
/// of its even strata. Returns whether the identity holds.
pub fn morin_splitting_identity_check(k: usize, r: usize, target: &TargetProfile) -> Result<bool> {
    if k % 2 == 0 {
        return Err(Error::EvenCodimension(k));
    }
    let family = SingularityFamily::sigma1r(k, r)?;
    let lhs = cob_rank_over_target(&family, target)?;
    let mut rhs = BigInt::zero();
    for stratum in family.strata(r)? {
        if stratum.index % 2 == 0 {
            rhs += imm_rank(&stratum, k, target)?;
        }
    }
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{geometric_factor, GradedRingSpec};

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn cob_rank_examples() {
        assert_eq!(
            cob_rank(&SingularityFamily::morin(1).unwrap(), 4).unwrap(),
            big(1)
        );
        assert_eq!(
            cob_rank(&SingularityFamily::morin(2).unwrap(), 3).unwrap(),
            big(0)
        );
        assert_eq!(
            cob_rank(&SingularityFamily::prim(1).unwrap(), 2).unwrap(),
            big(1)
        );
    }

    #[test]
    fn cob_rank_closed_examples() {
        assert_eq!(
            cob_rank_closed(&SingularityFamily::morin(2).unwrap(), 8).unwrap(),
            big(1)
        );
        assert_eq!(
            cob_rank_closed(&SingularityFamily::sigma1r(3, 2).unwrap(), 8).unwrap(),
            big(2)
        );
        assert_eq!(
            cob_rank_closed(&SingularityFamily::sigma1r(2, 1).unwrap(), 4).unwrap(),
            big(1)
        );
        assert!(matches!(
            cob_rank_closed(&SingularityFamily::custom(2, vec![]).unwrap(), 4),
            Err(Error::ClosedFormUnavailable)
        ));
    }

    #[test]
    fn engine_matches_closed_form_on_sample() {
        for k in 1..=5 {
            for family in [
                SingularityFamily::prim(k).unwrap(),
                SingularityFamily::morin(k).unwrap(),
                SingularityFamily::sigma1r(k, 3).unwrap(),
            ] {
                for n in 0..=30 {
                    assert_eq!(
                        cob_rank(&family, n).unwrap(),
                        cob_rank_closed(&family, n).unwrap(),
                        "family={} k={k} n={n}",
                        family.name()
                    );
                }
            }
        }
    }

    #[test]
    fn engine_matches_closed_form_series_full_range() {
        // Series-level equality covers every rank up to degree 60 at once.
        let n = 60;
        for k in 1..=9 {
            let mut families = vec![
                SingularityFamily::prim(k).unwrap(),
                SingularityFamily::morin(k).unwrap(),
            ];
            for r in 0..=10 {
                families.push(SingularityFamily::sigma1r(k, r).unwrap());
            }
            for family in families {
                assert_eq!(
                    kazarian_homology_series(&family, n).unwrap(),
                    closed_form_series(&family, n).unwrap(),
                    "family={} k={k}",
                    family.name()
                );
            }
        }
    }

    #[test]
    fn target_examples() {
        // Euclidean targets reduce to the rank over a point.
        let family = SingularityFamily::morin(1).unwrap();
        let euclidean = TargetProfile::euclidean(5);
        assert_eq!(cob_rank_over_target(&family, &euclidean).unwrap(), big(1));

        // Sphere profile: direct evaluation of the pairing.
        let s4 = TargetProfile::new(vec![1, 0, 0, 0, 1]).unwrap();
        let series = kazarian_homology_series(&family, 4).unwrap();
        let manual: BigInt = (1..=4)
            .map(|j| BigInt::from(s4.betti()[j]) * series.coeff(j - 1))
            .sum();
        assert_eq!(cob_rank_over_target(&family, &s4).unwrap(), manual);

        // Empty target.
        let empty = TargetProfile::new(vec![0, 0, 0]).unwrap();
        assert_eq!(cob_rank_over_target(&family, &empty).unwrap(), big(0));
    }

    #[test]
    fn imm_rank_examples() {
        // Top corank-one stratum of codimension 3 over Euclidean 11-space.
        let family = SingularityFamily::morin(3).unwrap();
        let strata = family.strata(2).unwrap();
        let target = TargetProfile::euclidean(11);
        assert_eq!(imm_rank(&strata[2], 3, &target).unwrap(), big(1));

        // Regular stratum: the classical immersion rank.
        for k in 1..=4usize {
            for n in 0..=8usize {
                let family = SingularityFamily::morin(k).unwrap();
                let s0 = &family.strata(0).unwrap()[0];
                let target = TargetProfile::euclidean(n + k);
                let expected =
                    crate::rings::space_series(&crate::rings::ClassifyingSpace::Bso(k), n + k)
                        .unwrap()
                        .coeff(n);
                assert_eq!(imm_rank(s0, k, &target).unwrap(), expected, "k={k} n={n}");
            }
        }

        // Empty target.
        let empty = TargetProfile::new(vec![0]).unwrap();
        assert_eq!(imm_rank(&strata[2], 3, &empty).unwrap(), big(0));
    }

    #[test]
    fn elimination_examples() {
        let family = SingularityFamily::morin(3).unwrap();
        let target = TargetProfile::euclidean(11);
        assert_eq!(
            elimination_obstruction_rank(&family, 2, &target).unwrap(),
            big(1)
        );

        // Even codimension, odd stratum: the immersion series lives in odd
        // degrees 5, 9, ..., so even target dimensions pair to zero.
        let family = SingularityFamily::morin(2).unwrap();
        for n in (2..=10usize).step_by(2) {
            let target = TargetProfile::euclidean(n + 2);
            assert_eq!(
                elimination_obstruction_rank(&family, 1, &target).unwrap(),
                big(0),
                "n={n}"
            );
        }

        assert!(elimination_obstruction_rank(&family, 0, &target).is_err());
    }

    #[test]
    fn decomposition_examples() {
        // Last column of the odd-codimension truncated family; the
        // untruncated family carries the same surviving column.
        let family = SingularityFamily::sigma1r(3, 2).unwrap();
        assert_eq!(decomposition_b_ranks(&family, 2, 11).unwrap(), big(1));
        let untruncated = SingularityFamily::morin(3).unwrap();
        assert_eq!(decomposition_b_ranks(&untruncated, 2, 11).unwrap(), big(1));

        // m below the codimension.
        assert_eq!(decomposition_b_ranks(&family, 2, 2).unwrap(), big(0));

        // Odd column of an even-codimension truncation dies.
        let family = SingularityFamily::sigma1r(2, 1).unwrap();
        for m in 0..=20 {
            assert_eq!(decomposition_b_ranks(&family, 1, m).unwrap(), big(0));
        }
    }

    #[test]
    fn splitting_examples() {
        // Trivial summands block the Euler route for prim strata.
        let prim = SingularityFamily::prim(2).unwrap();
        for r in 1..=4 {
            assert_eq!(splitting_verdict(&prim, r).unwrap(), SplitVerdict::Unknown);
        }

        // Custom stratum with target bundle gamma^SO_2 splits.
        let strata = vec![
            StratumSpec::new(0, 0, GradedRingSpec::empty(), 0, false),
            StratumSpec::new(1, 2, GradedRingSpec::empty(), 0, false)
                .with_bundles(None, Some(crate::rings::FormalBundle::oriented(2))),
        ];
        let custom = SingularityFamily::custom(2, strata).unwrap();
        assert_eq!(splitting_verdict(&custom, 1).unwrap(), SplitVerdict::Splits);

        // Non-orientable summands: the criterion does not apply.
        let morin = SingularityFamily::morin(3).unwrap();
        for r in 1..=4 {
            assert_eq!(splitting_verdict(&morin, r).unwrap(), SplitVerdict::Unknown);
        }
    }

    #[test]
    fn tower_examples() {
        // Odd codimension: one stage holding all surviving even strata.
        let family = SingularityFamily::morin(3).unwrap();
        let tower = postnikov_tower(&family, 4).unwrap();
        assert_eq!(tower.stages.len(), 1);
        assert_eq!(tower.stages[0].columns, vec![0, 2, 4]);
        assert_eq!(tower.stages[0].fiber_bottom_degrees, vec![3, 11, 19]);

        // Alternating parity: singleton stages.
        let family = SingularityFamily::prim(2).unwrap();
        let tower = postnikov_tower(&family, 2).unwrap();
        assert_eq!(tower.stages.len(), 3);
        for stage in &tower.stages {
            assert_eq!(stage.columns.len(), 1);
        }

        // Regular stratum only: one stage with fiber bottom degree k.
        let tower = postnikov_tower(&family, 0).unwrap();
        assert_eq!(tower.stages.len(), 1);
        assert_eq!(tower.stages[0].fiber_bottom_degrees, vec![2]);
    }

    #[test]
    fn splitting_identity_examples() {
        // k = 3, r = 2, n = 8 over Euclidean 11-space: 2 == 1 + 1.
        assert!(morin_splitting_identity_check(3, 2, &TargetProfile::euclidean(11)).unwrap());
        // Regular stratum alone.
        assert!(morin_splitting_identity_check(1, 0, &TargetProfile::euclidean(7)).unwrap());
        // Higher stratum count.
        assert!(morin_splitting_identity_check(5, 4, &TargetProfile::euclidean(25)).unwrap());
        assert!(morin_splitting_identity_check(2, 2, &TargetProfile::euclidean(4)).is_err());
    }

    #[test]
    fn tower_table_matches_shifted_pairings() {
        let family = SingularityFamily::morin(3).unwrap();
        let target = TargetProfile::euclidean(11);
        let table = tower_imm_table(&family, 2, &target, 3).unwrap();
        assert_eq!(table.len(), 3);
        assert_eq!(table[2][0], big(1));
        // Suspending the Euclidean profile shifts the pairing degree.
        let strata = family.strata(2).unwrap();
        for (j, cell) in table[2].iter().enumerate() {
            let direct = imm_rank(&strata[2], 3, &TargetProfile::euclidean(11 + j)).unwrap();
            assert_eq!(*cell, direct);
        }
    }

    #[test]
    fn euclidean_profile_reduces_to_point_rank() {
        for k in 1..=4 {
            for n in 0..=16 {
                let family = SingularityFamily::morin(k).unwrap();
                let over_target =
                    cob_rank_over_target(&family, &TargetProfile::euclidean(n + k)).unwrap();
                assert_eq!(over_target, cob_rank(&family, n).unwrap(), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn geometric_factor_sanity_for_morin_two() {
        // BO(2) series is the degree-4 geometric series.
        let series = kazarian_homology_series(&SingularityFamily::morin(2).unwrap(), 20).unwrap();
        assert_eq!(series, geometric_factor(4, 20).unwrap());
    }
}
