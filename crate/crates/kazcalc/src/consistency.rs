//! The cross-oracle suite behind the `consistency` command: every closed
//! form is replayed against the spectral-sequence engine with exact integer
//! equality. Parameters are pinned; the suite either passes completely or
//! reports each mismatch.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::bordism::{
    bordism_generating_function, fold_torsion, fold_torsion_minimality_holds, framed_bordism_rank,
    sp_series, BettiProfile,
};
use crate::cobordism::{decomposition_b_ranks, morin_splitting_identity_check, TargetProfile};
use crate::error::Result;
use crate::kazarian::{
    apply_d1, build_e1, kazarian_homology_series, truncated_homology_series,
    verify_d1_cancellation, SingularityFamily,
};
use crate::rings::{space_series, ClassifyingSpace};
use crate::series::TruncatedSeries;
use crate::thom::{higher_thom_polynomial, thom_polynomial, Generator, MapClass};

const TRUNCATION: usize = 60;

/// Outcome of a single named check.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub name: &'static str,
    pub ok: bool,
    pub detail: Option<String>,
}

impl CheckReport {
    fn pass(name: &'static str) -> Self {
        Self {
            name,
            ok: true,
            detail: None,
        }
    }

    fn from_result(name: &'static str, result: Result<std::result::Result<(), String>>) -> Self {
        match result {
            Ok(Ok(())) => Self::pass(name),
            Ok(Err(detail)) => Self {
                name,
                ok: false,
                detail: Some(detail),
            },
            Err(err) => Self {
                name,
                ok: false,
                detail: Some(format!("error: {err}")),
            },
        }
    }
}

/// Deterministic xorshift generator for the randomised checks.
struct XorShift64 {
    state: u64,
}

impl XorShift64 {
    fn new(seed: u64) -> Self {
        Self { state: seed.max(1) }
    }

    fn next(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.state = x;
        x
    }

    fn below(&mut self, bound: u64) -> u64 {
        self.next() % bound
    }
}

fn prim_odd_identity() -> Result<std::result::Result<(), String>> {
    for k in [1usize, 3, 5, 7, 9] {
        let total = kazarian_homology_series(&SingularityFamily::prim(k)?, TRUNCATION)?;
        let closed = space_series(&ClassifyingSpace::Bso(k + 1), TRUNCATION)?;
        if total != closed {
            return Ok(Err(format!(
                "k={k}: column sum differs from BSO({})",
                k + 1
            )));
        }
        // The column sum itself: shifted copies of the BSO(k) series.
        let bso_k = space_series(&ClassifyingSpace::Bso(k), TRUNCATION)?;
        let mut direct = TruncatedSeries::zero(TRUNCATION);
        let mut r = 0;
        while r * (k + 1) <= TRUNCATION {
            direct = direct.add(&bso_k.shift(r * (k + 1)))?;
            r += 1;
        }
        if direct != closed {
            return Ok(Err(format!("k={k}: shifted-sum identity fails")));
        }
    }
    Ok(Ok(()))
}

fn prim_even_collapse() -> Result<std::result::Result<(), String>> {
    for k in [2usize, 4, 6, 8] {
        let family = SingularityFamily::prim(k)?;
        let pairs = verify_d1_cancellation(&family, TRUNCATION, 20)?;
        if pairs != 21 {
            return Ok(Err(format!(
                "k={k}: expected 21 cancellation pairs, saw {pairs}"
            )));
        }
        let total = kazarian_homology_series(&family, TRUNCATION)?;
        let closed = space_series(&ClassifyingSpace::Bso(k + 1), TRUNCATION)?;
        if total != closed {
            return Ok(Err(format!(
                "k={k}: limit page differs from BSO({})",
                k + 1
            )));
        }
    }
    Ok(Ok(()))
}

fn morin_homology_identity() -> Result<std::result::Result<(), String>> {
    for k in 1..=9usize {
        let total = kazarian_homology_series(&SingularityFamily::morin(k)?, TRUNCATION)?;
        let space = if k % 2 == 0 {
            ClassifyingSpace::Bo(k)
        } else {
            ClassifyingSpace::Bo(k + 1)
        };
        if total != space_series(&space, TRUNCATION)? {
            return Ok(Err(format!("k={k}")));
        }
    }
    Ok(Ok(()))
}

fn sigma1r_cross_oracle() -> Result<std::result::Result<(), String>> {
    for k in 1..=7usize {
        for r in 0..=10usize {
            let family = SingularityFamily::sigma1r(k, r)?;
            let engine = truncated_homology_series(&family, TRUNCATION)?;
            let closed = crate::cobordism::closed_form_series(&family, TRUNCATION)?;
            if engine != closed {
                return Ok(Err(format!("k={k} r={r}")));
            }
        }
    }
    Ok(Ok(()))
}

fn splitting_identity() -> Result<std::result::Result<(), String>> {
    let s2 = TargetProfile::new(vec![1, 0, 1]).expect("non-empty");
    let s4 = TargetProfile::new(vec![1, 0, 0, 0, 1]).expect("non-empty");
    let s2xs2 = s2.product(&s2);
    for k in [1usize, 3, 5, 7] {
        for r in 0..=8usize {
            for n in 0..=40usize {
                if !morin_splitting_identity_check(k, r, &TargetProfile::euclidean(n + k))? {
                    return Ok(Err(format!("k={k} r={r} n={n} euclidean")));
                }
            }
            for (name, target) in [("S2", &s2), ("S4", &s4), ("S2xS2", &s2xs2)] {
                if !morin_splitting_identity_check(k, r, target)? {
                    return Ok(Err(format!("k={k} r={r} target={name}")));
                }
            }
        }
    }
    Ok(Ok(()))
}

fn thom_degree_law() -> Result<std::result::Result<(), String>> {
    for k in 1..=9usize {
        for i in 1..=10usize {
            for class in [MapClass::Prim, MapClass::Morin] {
                let entry = thom_polynomial(class, k, i)?;
                if !entry.polynomial.is_homogeneous() {
                    return Ok(Err(format!("{class} k={k} i={i}: inhomogeneous")));
                }
                if let Some(degree) = entry.polynomial.degree() {
                    if degree != i * (k + 1) {
                        return Ok(Err(format!(
                            "{class} k={k} i={i}: degree {degree} != {}",
                            i * (k + 1)
                        )));
                    }
                }
            }
        }
    }
    let spot = thom_polynomial(MapClass::Morin, 3, 2)?;
    let expected = crate::thom::CharClassPoly::generator_power(Generator::Pontrjagin(2), 1);
    if spot.polynomial != expected {
        return Ok(Err("morin k=3 stratum 2 is not p2".into()));
    }
    // Higher entries stay within the Pontrjagin vanishing bound by degree.
    let higher = higher_thom_polynomial(MapClass::Morin, 3, 4, &[1])?;
    if higher.polynomial.degree() != Some(4 * 4 + 4) {
        return Ok(Err("higher-degree law fails at morin k=3 i=4 I=(1)".into()));
    }
    Ok(Ok(()))
}

fn parity_vanishing() -> Result<std::result::Result<(), String>> {
    let mut families = Vec::new();
    for k in 1..=9usize {
        families.push(SingularityFamily::prim(k)?);
        families.push(SingularityFamily::morin(k)?);
    }
    for k in 1..=7usize {
        for r in 0..=10usize {
            families.push(SingularityFamily::sigma1r(k, r)?);
        }
    }
    for family in &families {
        let e1 = build_e1(family, TRUNCATION)?;
        let einf = apply_d1(&e1, family)?;
        for page in [&e1, &einf] {
            for col in &page.columns {
                for (degree, coeff) in col.series.coeffs().iter().enumerate() {
                    if degree % 2 != col.source_codim % 2 && !coeff.is_zero() {
                        return Ok(Err(format!(
                            "family={} k={} col={} degree={degree}",
                            family.name(),
                            family.codim(),
                            col.index
                        )));
                    }
                }
            }
        }
    }
    Ok(Ok(()))
}

fn fold_torsion_sweep() -> Result<std::result::Result<(), String>> {
    for m in 1..=10_000u64 {
        let report = fold_torsion(m)?;
        if !fold_torsion_minimality_holds(m, report.t) {
            return Ok(Err(format!("m={m}")));
        }
    }
    let t1 = fold_torsion(1)?.t;
    let t8 = fold_torsion(8)?.t;
    if t1 != 1 || t8 != 2 {
        return Ok(Err(format!("spot values t(1)={t1} t(8)={t8}")));
    }
    Ok(Ok(()))
}

fn random_profile(rng: &mut XorShift64) -> BettiProfile {
    let mut profile = BettiProfile::new();
    let entries = rng.below(5);
    for _ in 0..entries {
        let degree = 1 + rng.below(9) as usize;
        let rank = 1 + rng.below(3);
        profile.set(degree, profile.get(degree) + rank);
    }
    profile
}

fn sp_and_framed_randomised() -> Result<std::result::Result<(), String>> {
    let n = 24;
    let mut rng = XorShift64::new(0x6b7a_3d41_9c2e_5f01);
    for case in 0..100 {
        let a = random_profile(&mut rng);
        let b = random_profile(&mut rng);
        let lhs = sp_series(&a.one_point_union(&b), n)?;
        let rhs = sp_series(&a, n)?.mul(&sp_series(&b, n)?)?;
        if lhs != rhs {
            return Ok(Err(format!("sp multiplicativity case {case}")));
        }
    }
    for case in 0..100 {
        let k = 1 + rng.below(6) as usize;
        let dim = rng.below(25) as usize;
        let family = match rng.below(3) {
            0 => SingularityFamily::prim(k)?,
            1 => SingularityFamily::morin(k)?,
            _ => SingularityFamily::sigma1r(k, rng.below(7) as usize)?,
        };
        let fast = framed_bordism_rank(&family, dim)?;
        // Independent double-loop convolution.
        let kazarian = kazarian_homology_series(&family, dim)?;
        let omega = space_series(&ClassifyingSpace::BsoStable, dim)?;
        let mut slow = BigInt::zero();
        for a in 0..=dim {
            slow += kazarian.coeff(a) * omega.coeff(dim - a);
        }
        if fast != slow {
            return Ok(Err(format!(
                "framed rank case {case}: family={} k={k} n={dim}",
                family.name()
            )));
        }
    }
    // Rank-semantics spot check on the generating function.
    for k in 1..=3usize {
        if !bordism_generating_function(&SingularityFamily::morin(k)?, 30)?.is_nonnegative() {
            return Ok(Err(format!("negative bordism coefficient at k={k}")));
        }
    }
    Ok(Ok(()))
}

fn decomposition_ranks() -> Result<std::result::Result<(), String>> {
    // Higher columns of even codimension die.
    for k in [2usize, 4] {
        let family = SingularityFamily::morin(k)?;
        for r in 1..=6usize {
            for m in 0..=40usize {
                if decomposition_b_ranks(&family, r, m)? != BigInt::zero() {
                    return Ok(Err(format!("even k={k} r={r} m={m}")));
                }
            }
        }
    }
    // Odd codimension: the last column of the truncated family survives
    // unchanged from the first page.
    for k in [1usize, 3, 5] {
        for r in 0..=6usize {
            let family = SingularityFamily::sigma1r(k, r)?;
            let truncation = 40.max(r * (k + 1) + k);
            let e1 = build_e1(&family, truncation)?;
            for m in 0..=40usize {
                let rank = decomposition_b_ranks(&family, r, m)?;
                let expected = if m < k {
                    BigInt::zero()
                } else {
                    e1.column(r)
                        .map(|col| col.series.coeff(m - k))
                        .unwrap_or_else(BigInt::zero)
                };
                if rank != expected {
                    return Ok(Err(format!("odd k={k} r={r} m={m}")));
                }
            }
        }
    }
    Ok(Ok(()))
}

/// Runs every check and returns the reports in a fixed order.
pub fn run_all() -> Vec<CheckReport> {
    vec![
        CheckReport::from_result(
            "prim odd-codimension identity (k=1,3,5,7,9; N=60)",
            prim_odd_identity(),
        ),
        CheckReport::from_result(
            "prim even-codimension collapse and cancellation chain (k=2,4,6,8; columns<=20)",
            prim_even_collapse(),
        ),
        CheckReport::from_result(
            "corank-one homology matches BO(k)/BO(k+1) (k<=9; N=60)",
            morin_homology_identity(),
        ),
        CheckReport::from_result(
            "truncated-family engine matches closed form (k<=7, r<=10; N=60)",
            sigma1r_cross_oracle(),
        ),
        CheckReport::from_result(
            "odd-codimension splitting identity (k<=7, r<=8, n<=40; 4 target kinds)",
            splitting_identity(),
        ),
        CheckReport::from_result(
            "Thom polynomial degree law (k<=9, i<=10) and morin k=3 stratum-2 spot value",
            thom_degree_law(),
        ),
        CheckReport::from_result(
            "parity vanishing on all first and limit pages tested",
            parity_vanishing(),
        ),
        CheckReport::from_result(
            "fold torsion minimality (m<=10000) and spot values t(1)=1, t(8)=2",
            fold_torsion_sweep(),
        ),
        CheckReport::from_result(
            "symmetric-power multiplicativity and framed-rank convolution (100 random cases each)",
            sp_and_framed_randomised(),
        ),
        CheckReport::from_result(
            "residual-factor ranks: vanish for even codimension, match the last column for odd",
            decomposition_ranks(),
        ),
    ]
}

/// Renders the reports one line per check plus a summary; the flag is true
/// when every check passed.
pub fn render_report(reports: &[CheckReport]) -> (String, bool) {
    let mut out = String::new();
    let mut passed = 0;
    for report in reports {
        if report.ok {
            passed += 1;
            out.push_str(&format!("ok: {}\n", report.name));
        } else {
            let detail = report.detail.as_deref().unwrap_or("mismatch");
            out.push_str(&format!("MISMATCH: {} ({detail})\n", report.name));
        }
    }
    out.push_str(&format!(
        "consistency: {passed}/{} checks passed\n",
        reports.len()
    ));
    (out, passed == reports.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        let reports = run_all();
        for report in &reports {
            assert!(
                report.ok,
                "{}: {}",
                report.name,
                report.detail.as_deref().unwrap_or("")
            );
        }
        let (text, ok) = render_report(&reports);
        assert!(ok);
        assert!(text.ends_with("10/10 checks passed\n"));
    }
}
