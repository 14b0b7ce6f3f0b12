//! The homological spectral sequence of the singularity filtration of a
//! Kazarian space: first-page construction, the rank-level d_1 cancellation
//! for even codimension, parity blocks, and the resulting homology series.
//!
//! Degree conventions: every column is graded by total (co)homological
//! degree, so the column of a stratum with source codimension c starts at c
//! (its Thom-class degree), plus an extra Euler-class shift where one
//! applies. Identifying the Thom class of column r with the r-th power of
//! the Euler class is module bookkeeping only and is never used for degrees
//! here: the closed-form identities for the column sums hold with true
//! degrees and are asserted exactly by the test suite.
//!
//! Differentials are rank-level cancellations: a source part is removed
//! together with a target part after asserting that the target series equals
//! the source series shifted by one degree, exactly. Any mismatch is a
//! modeling error and is reported, never papered over.

use crate::error::{Error, Result};
use crate::rings::{bso_generators, morin_base_ring, FormalBundle};
use crate::series::{GradedRingSpec, TruncatedSeries};

/// Descriptor of one singularity stratum: its column in the spectral
/// sequence and the bundle data attached to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumSpec {
    /// Position of the stratum in the filtration.
    pub index: usize,
    /// Codimension of the stratum in the source; the Thom degree of the column.
    pub source_codim: usize,
    /// Free ring whose series generates the column over the Thom class.
    pub column_base: GradedRingSpec,
    /// Additional degree shift (an Euler-class cup factor).
    pub extra_shift: usize,
    /// Columns that vanish rationally.
    pub zero_column: bool,
    /// Universal normal bundle of the stratum in the source, when known.
    pub normal_bundle: Option<FormalBundle>,
    /// Universal normal bundle of the stratum image in the target, when known.
    pub target_bundle: Option<FormalBundle>,
}

impl StratumSpec {
    pub fn new(
        index: usize,
        source_codim: usize,
        column_base: GradedRingSpec,
        extra_shift: usize,
        zero_column: bool,
    ) -> Self {
        Self {
            index,
            source_codim,
            column_base,
            extra_shift,
            zero_column,
            normal_bundle: None,
            target_bundle: None,
        }
    }

    pub fn with_bundles(
        mut self,
        normal: Option<FormalBundle>,
        target: Option<FormalBundle>,
    ) -> Self {
        self.normal_bundle = normal;
        self.target_bundle = target;
        self
    }

    /// Bottom degree of the column: Thom degree plus the extra shift.
    pub fn bottom_degree(&self) -> usize {
        self.source_codim + self.extra_shift
    }

    /// Column series in total degree: t^{c + extra_shift} * series(base),
    /// or zero for a vanishing column.
    pub fn column_series(&self, truncation: usize) -> Result<TruncatedSeries> {
        if self.zero_column {
            return Ok(TruncatedSeries::zero(truncation));
        }
        Ok(self
            .column_base
            .series(truncation)?
            .shift(self.bottom_degree()))
    }
}

/// Which family of singularity sets a computation runs over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    /// All corank-one strata, kernel line bundle trivialised.
    Prim,
    /// All corank-one strata.
    Morin,
    /// Corank-one strata up to index r.
    Sigma1r(usize),
    /// Explicit stratum list, in increasing hierarchy order.
    Custom(Vec<StratumSpec>),
}

/// A singularity family together with its codimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularityFamily {
    kind: FamilyKind,
    codim: usize,
}

impl SingularityFamily {
    pub fn prim(codim: usize) -> Result<Self> {
        Self::checked(FamilyKind::Prim, codim)
    }

    pub fn morin(codim: usize) -> Result<Self> {
        Self::checked(FamilyKind::Morin, codim)
    }

    pub fn sigma1r(codim: usize, r: usize) -> Result<Self> {
        Self::checked(FamilyKind::Sigma1r(r), codim)
    }

    /// Custom family; strata must be indexed 0, 1, 2, ... in hierarchy
    /// order, and every column must respect parity vanishing: its support
    /// sits in degrees congruent to the stratum codimension mod 2, which
    /// pins the extra shift and all generator degrees to be even.
    pub fn custom(codim: usize, strata: Vec<StratumSpec>) -> Result<Self> {
        for (pos, stratum) in strata.iter().enumerate() {
            if stratum.index != pos {
                return Err(Error::InvalidStratum(format!(
                    "stratum at position {pos} has index {}; strata must be \
                     listed contiguously from 0 in hierarchy order",
                    stratum.index
                )));
            }
            if stratum.zero_column {
                continue;
            }
            if stratum.extra_shift % 2 == 1 {
                return Err(Error::InvalidStratum(format!(
                    "stratum {pos}: extra shift {} is odd, breaking parity \
                     vanishing for the column",
                    stratum.extra_shift
                )));
            }
            if let Some(&(degree, _)) = stratum
                .column_base
                .generators()
                .iter()
                .find(|&&(degree, _)| degree % 2 == 1)
            {
                return Err(Error::InvalidStratum(format!(
                    "stratum {pos}: generator degree {degree} is odd, \
                     breaking parity vanishing for the column"
                )));
            }
        }
        Self::checked(FamilyKind::Custom(strata), codim)
    }

    fn checked(kind: FamilyKind, codim: usize) -> Result<Self> {
        if codim == 0 {
            return Err(Error::MustBePositive {
                what: "codimension k",
            });
        }
        Ok(Self { kind, codim })
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    /// Top stratum index for families that carry one.
    pub fn top_index(&self) -> Option<usize> {
        match &self.kind {
            FamilyKind::Prim | FamilyKind::Morin => None,
            FamilyKind::Sigma1r(r) => Some(*r),
            FamilyKind::Custom(strata) => strata.len().checked_sub(1),
        }
    }

    /// Short name used in diagnostics and rendered output.
    pub fn name(&self) -> &'static str {
        match &self.kind {
            FamilyKind::Prim => "prim",
            FamilyKind::Morin => "morin",
            FamilyKind::Sigma1r(_) => "sigma1r",
            FamilyKind::Custom(_) => "custom",
        }
    }

    /// Materialises stratum descriptors for columns 0..=max_index, clipped
    /// to the family's own top index when that is finite.
    pub fn strata(&self, max_index: usize) -> Result<Vec<StratumSpec>> {
        match &self.kind {
            FamilyKind::Prim => (0..=max_index)
                .map(|r| prim_stratum(self.codim, r))
                .collect(),
            FamilyKind::Morin => (0..=max_index)
                .map(|r| morin_stratum(self.codim, r))
                .collect(),
            FamilyKind::Sigma1r(top) => (0..=max_index.min(*top))
                .map(|r| morin_stratum(self.codim, r))
                .collect(),
            FamilyKind::Custom(strata) => Ok(strata.iter().take(max_index + 1).cloned().collect()),
        }
    }
}

/// Stratum of the trivialised-kernel family: normal bundle r copies of
/// gamma^SO_k plus r trivial lines, target bundle one more gamma^SO_k.
fn prim_stratum(k: usize, r: usize) -> Result<StratumSpec> {
    let normal = FormalBundle::empty().with_oriented(k, r).with_trivial(r);
    let target = FormalBundle::empty()
        .with_oriented(k, r + 1)
        .with_trivial(r);
    Ok(
        StratumSpec::new(r, r * (k + 1), bso_generators(k)?, 0, false)
            .with_bundles(Some(normal), Some(target)),
    )
}

/// Stratum of the full corank-one family. For even k the even columns carry
/// an Euler-class shift; for odd k the odd columns vanish rationally.
fn morin_stratum(k: usize, r: usize) -> Result<StratumSpec> {
    let base = morin_base_ring(k)?;
    let c = r * (k + 1);
    let spec = if r == 0 {
        StratumSpec::new(0, 0, bso_generators(k)?, 0, false)
            .with_bundles(Some(FormalBundle::empty()), Some(FormalBundle::oriented(k)))
    } else {
        let (normal, target) = morin_bundles(k, r);
        let stratum = if k % 2 == 0 {
            if r % 2 == 1 {
                StratumSpec::new(r, c, base, 0, false)
            } else {
                StratumSpec::new(r, c, base, k, false)
            }
        } else if r % 2 == 1 {
            StratumSpec::new(r, c, GradedRingSpec::empty(), 0, true)
        } else {
            StratumSpec::new(r, c, base, 0, false)
        };
        stratum.with_bundles(Some(normal), Some(target))
    };
    Ok(spec)
}

/// Bundle descriptors of the corank-one stratum r >= 1: the source normal
/// bundle decomposes as ceil((r-1)/2) trivial lines, floor((r+1)/2) twisted
/// lines, ceil(r/2) twisted k-blocks and floor(r/2) oriented k-blocks; the
/// target bundle has one more k-block. Twisted pieces are flagged as
/// non-orientable summands.
fn morin_bundles(k: usize, r: usize) -> (FormalBundle, FormalBundle) {
    debug_assert!(r >= 1);
    let twisted = 2 * r.div_ceil(2);
    let normal = FormalBundle::empty()
        .with_trivial(r / 2)
        .with_oriented(k, r / 2)
        .with_non_orientable(twisted);
    let target = if r % 2 == 0 {
        normal.clone().with_oriented(k, 1)
    } else {
        normal.clone().with_non_orientable(1)
    };
    (normal, target)
}

/// Which page of the spectral sequence a `Page` value represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PageKind {
    E1,
    EInfinity,
}

/// One column of a page: the stratum index, its source codimension and the
/// total-degree rank series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageColumn {
    pub index: usize,
    pub source_codim: usize,
    pub series: TruncatedSeries,
}

/// A spectral-sequence page: columns indexed by filtration position, each a
/// total-degree-graded rank series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Page {
    pub kind: PageKind,
    pub truncation: usize,
    pub columns: Vec<PageColumn>,
}

impl Page {
    pub fn column(&self, index: usize) -> Option<&PageColumn> {
        self.columns.iter().find(|c| c.index == index)
    }

    /// Sum of all column series: the total rank series of the page.
    pub fn total_series(&self) -> TruncatedSeries {
        let mut total = TruncatedSeries::zero(self.truncation);
        for col in &self.columns {
            total = total
                .add(&col.series)
                .expect("columns share the page truncation");
        }
        total
    }
}

/// Largest stratum index whose column is displayed at this truncation:
/// the last index with source codimension <= N (clipped by the family's own
/// top index). Returns None when the family has no strata to display.
fn max_display_index(family: &SingularityFamily, truncation: usize) -> Result<Option<usize>> {
    match family.kind() {
        FamilyKind::Prim | FamilyKind::Morin => Ok(Some(truncation / (family.codim() + 1))),
        FamilyKind::Sigma1r(top) => Ok(Some((truncation / (family.codim() + 1)).min(*top))),
        FamilyKind::Custom(strata) => {
            let mut last = None;
            for s in strata {
                if s.source_codim <= truncation {
                    last = Some(s.index);
                } else {
                    break;
                }
            }
            Ok(last)
        }
    }
}

/// Builds the first page of the spectral sequence for a family.
pub fn build_e1(family: &SingularityFamily, truncation: usize) -> Result<Page> {
    let columns = match max_display_index(family, truncation)? {
        None => Vec::new(),
        Some(max_index) => family
            .strata(max_index)?
            .iter()
            .map(|s| {
                Ok(PageColumn {
                    index: s.index,
                    source_codim: s.source_codim,
                    series: s.column_series(truncation)?,
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(Page {
        kind: PageKind::E1,
        truncation,
        columns,
    })
}

/// Maximal runs of consecutive non-vanishing columns whose source
/// codimensions share one parity. Differentials vanish between columns of
/// the same block.
pub fn parity_blocks(family: &SingularityFamily, max_index: usize) -> Result<Vec<Vec<usize>>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut current_parity = None;
    for stratum in family.strata(max_index)? {
        if stratum.zero_column {
            continue;
        }
        let parity = stratum.source_codim % 2;
        if current_parity == Some(parity) {
            current.push(stratum.index);
        } else {
            if !current.is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
            current.push(stratum.index);
            current_parity = Some(parity);
        }
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    Ok(blocks)
}

/// The split of an even-codimension corank-one column into its base part and
/// its Euler part, in true degrees.
fn even_codim_parts(
    family: &SingularityFamily,
    col: usize,
    truncation: usize,
) -> Result<(TruncatedSeries, TruncatedSeries)> {
    let k = family.codim();
    debug_assert_eq!(k % 2, 0);
    let a = morin_base_ring(k)?.series(truncation)?;
    let c = col * (k + 1);
    match family.kind() {
        FamilyKind::Prim => Ok((a.shift(c), a.shift(c + k))),
        FamilyKind::Morin | FamilyKind::Sigma1r(_) => {
            if col == 0 {
                Ok((a.clone(), a.shift(k)))
            } else if col % 2 == 1 {
                // Odd columns are pure targets: base part only.
                Ok((a.shift(c), TruncatedSeries::zero(truncation)))
            } else {
                // Even columns >= 2 are pure sources: Euler part only.
                Ok((TruncatedSeries::zero(truncation), a.shift(c + k)))
            }
        }
        FamilyKind::Custom(_) => unreachable!("custom families take the degeneracy path"),
    }
}

/// Source columns of the d_1 chain cancellation whose pair must be checked,
/// for sources up to `max_source`. For the trivialised-kernel family every
/// column is a source; for corank-one families the sources are column 0 and
/// the even columns. Sources whose target column lies beyond a finite top
/// index are excluded (their Euler part survives).
fn cancellation_sources(family: &SingularityFamily, max_source: usize) -> Vec<usize> {
    let top = family.top_index();
    let in_range = |i: usize| top.is_none_or(|t| i < t);
    match family.kind() {
        FamilyKind::Prim => (0..=max_source).filter(|&i| in_range(i)).collect(),
        FamilyKind::Morin | FamilyKind::Sigma1r(_) => (0..=max_source)
            .filter(|&i| i == 0 || i % 2 == 0)
            .filter(|&i| in_range(i))
            .collect(),
        FamilyKind::Custom(_) => Vec::new(),
    }
}

/// Replays every d_1 cancellation step at rank level for an even-codimension
/// family: the Euler part of each source column, shifted by one degree, must
/// equal the base part of the next column exactly. Returns the number of
/// pairs checked. Odd codimension has no differentials and checks nothing.
pub fn verify_d1_cancellation(
    family: &SingularityFamily,
    truncation: usize,
    max_source: usize,
) -> Result<usize> {
    if family.codim() % 2 == 1 || matches!(family.kind(), FamilyKind::Custom(_)) {
        return Ok(0);
    }
    let mut checked = 0;
    for source in cancellation_sources(family, max_source) {
        let (_, euler_part) = even_codim_parts(family, source, truncation)?;
        let (target_base, _) = even_codim_parts(family, source + 1, truncation)?;
        if euler_part.shift(1) != target_base {
            return Err(Error::CancellationMismatch { column: source });
        }
        checked += 1;
    }
    Ok(checked)
}

/// Applies the d_1 differential to a first page and returns the limit page.
///
/// Odd codimension: every differential vanishes and the page is returned
/// unchanged. Even codimension: the Euler part of each source column cancels
/// the base part of the next column (checked exactly); only the base part of
/// column 0 survives, plus the whole top column when the family is truncated
/// at an even index. Custom families must be block-degenerate (a single
/// parity block); anything else is rejected rather than silently computed.
pub fn apply_d1(page: &Page, family: &SingularityFamily) -> Result<Page> {
    if page.kind != PageKind::E1 {
        return Err(Error::NotAnE1Page);
    }
    let truncation = page.truncation;
    let rebuilt = build_e1(family, truncation)?;
    if rebuilt.columns.len() != page.columns.len() {
        return Err(Error::PageFamilyMismatch(
            rebuilt.columns.len().min(page.columns.len()),
        ));
    }
    for (given, expected) in page.columns.iter().zip(&rebuilt.columns) {
        if given != expected {
            return Err(Error::PageFamilyMismatch(expected.index));
        }
    }

    if let FamilyKind::Custom(strata) = family.kind() {
        let last = strata.len().saturating_sub(1);
        let blocks = parity_blocks(family, last)?;
        if blocks.len() > 1 {
            return Err(Error::NondegenerateFamily(format!(
                "{} parity blocks {:?}; differentials between blocks are not \
                 determined by parity alone",
                blocks.len(),
                blocks
            )));
        }
        return Ok(Page {
            kind: PageKind::EInfinity,
            truncation,
            columns: page.columns.clone(),
        });
    }

    if family.codim() % 2 == 1 {
        // Columns in odd codimension sit in even total degrees only, so
        // every differential vanishes.
        return Ok(Page {
            kind: PageKind::EInfinity,
            truncation,
            columns: page.columns.clone(),
        });
    }

    let max_display = page.columns.last().map(|c| c.index).unwrap_or(0);
    verify_d1_cancellation(family, truncation, max_display)?;

    let top = family.top_index();
    let columns = page
        .columns
        .iter()
        .map(|col| {
            let (base_part, euler_part) = even_codim_parts(family, col.index, truncation)?;
            // Internal consistency: the two parts reassemble the column.
            let reassembled = base_part.add(&euler_part)?;
            if reassembled != col.series {
                return Err(Error::CancellationMismatch { column: col.index });
            }
            let survivor = match family.kind() {
                FamilyKind::Prim => {
                    if col.index == 0 {
                        base_part
                    } else {
                        TruncatedSeries::zero(truncation)
                    }
                }
                _ => {
                    let is_top = top == Some(col.index);
                    if col.index == 0 {
                        if is_top {
                            col.series.clone()
                        } else {
                            base_part
                        }
                    } else if col.index % 2 == 0 && is_top {
                        col.series.clone()
                    } else {
                        TruncatedSeries::zero(truncation)
                    }
                }
            };
            Ok(PageColumn {
                index: col.index,
                source_codim: col.source_codim,
                series: survivor,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Page {
        kind: PageKind::EInfinity,
        truncation,
        columns,
    })
}

/// Rank series of the homology of the Kazarian space of the family: the
/// column sum of the limit page.
pub fn kazarian_homology_series(
    family: &SingularityFamily,
    truncation: usize,
) -> Result<TruncatedSeries> {
    let e1 = build_e1(family, truncation)?;
    let einf = apply_d1(&e1, family)?;
    Ok(einf.total_series())
}

/// Homology rank series of a family truncated at a top corank-one stratum.
///
/// The surviving top column of an even/even truncation sits at its Thom
/// degree r(k+1) + k; module-generator bookkeeping that would place it at
/// (r+1)k is intentionally not used, since only the true degree is
/// compatible with the first-page column degrees.
pub fn truncated_homology_series(
    family: &SingularityFamily,
    truncation: usize,
) -> Result<TruncatedSeries> {
    match family.kind() {
        FamilyKind::Sigma1r(_) => kazarian_homology_series(family, truncation),
        _ => Err(Error::WrongFamily("truncated corank-one")),
    }
}
