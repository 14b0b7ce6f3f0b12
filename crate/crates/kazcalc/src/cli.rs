//! Command-line front end: deterministic, scriptable queries with table and
//! JSON output. One query per invocation; no interactive mode, no state.
//!
//! JSON output follows a stable schema versioned by a top-level
//! `"schema": 1` field; integers that may exceed 2^53 are encoded as decimal
//! strings. Table output is locale-independent ASCII. All degrees are total
//! cohomological degrees; the chi-power module bookkeeping is available only
//! as an annotation, never as the default grading.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::bordism::{bordism_generating_function, fold_torsion, framed_bordism_rank};
use crate::cobordism::{
    closed_form_series, cob_rank, cob_rank_closed, cob_rank_over_target,
    elimination_obstruction_rank, postnikov_tower, splitting_verdict, tower_imm_table,
    SplitVerdict, TargetProfile,
};
use crate::consistency;
use crate::error::{Error, Result};
use crate::kazarian::{
    apply_d1, build_e1, kazarian_homology_series, parity_blocks, Page, PageKind, SingularityFamily,
    StratumSpec,
};
use crate::series::{GeneratorKind, GradedRingSpec, TruncatedSeries};
use crate::thom::{higher_thom_polynomial, thom_polynomial, MapClass, ThomTableEntry};

pub const DEFAULT_TRUNCATION: usize = 60;
pub const TRUNCATION_ENV: &str = "KAZCALC_TRUNCATION";
pub const SCHEMA_VERSION: u32 = 1;

/// Top-level query: one subcommand plus the shared output controls.
#[derive(Debug, Parser)]
#[command(
    name = "kazcalc",
    about = "Exact calculator for rational cobordism groups of singular maps",
    version
)]
pub struct QuerySpec {
    #[command(subcommand)]
    pub command: Command,

    /// Truncation degree N (default 60; the KAZCALC_TRUNCATION environment
    /// variable overrides the default).
    #[arg(long, global = true)]
    pub truncation: Option<usize>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Prim,
    Morin,
    Sigma1r,
    Custom,
}

impl FamilyArg {
    fn name(self) -> &'static str {
        match self {
            FamilyArg::Prim => "prim",
            FamilyArg::Morin => "morin",
            FamilyArg::Sigma1r => "sigma1r",
            FamilyArg::Custom => "custom",
        }
    }
}

/// Family selector shared by most subcommands.
#[derive(Clone, Debug, Args)]
pub struct FamilyArgs {
    /// Singularity family.
    #[arg(long, value_enum)]
    pub family: FamilyArg,

    /// Codimension k >= 1 of the maps.
    #[arg(long)]
    pub codim: usize,

    /// Top stratum index (the family parameter for sigma1r; the stratum
    /// selector for tower, split-check and obstruction).
    #[arg(long)]
    pub r: Option<usize>,

    /// Strata file for custom families (one stratum per line:
    /// index codim generators shift flag).
    #[arg(long)]
    pub custom_file: Option<PathBuf>,
}

impl FamilyArgs {
    fn build(&self) -> Result<SingularityFamily> {
        match self.family {
            FamilyArg::Prim => SingularityFamily::prim(self.codim),
            FamilyArg::Morin => SingularityFamily::morin(self.codim),
            FamilyArg::Sigma1r => {
                let r = self
                    .r
                    .ok_or_else(|| Error::Usage("sigma1r needs --r".into()))?;
                SingularityFamily::sigma1r(self.codim, r)
            }
            FamilyArg::Custom => {
                let path = self
                    .custom_file
                    .as_ref()
                    .ok_or_else(|| Error::Usage("custom needs --custom-file".into()))?;
                let strata = parse_custom_file(path)?;
                let family = SingularityFamily::custom(self.codim, strata)?;
                validate_block_degeneracy(&family)?;
                Ok(family)
            }
        }
    }

    fn inputs(&self) -> BTreeMap<String, String> {
        let mut inputs = BTreeMap::new();
        inputs.insert("family".into(), self.family.name().into());
        inputs.insert("codim".into(), self.codim.to_string());
        if let Some(r) = self.r {
            inputs.insert("r".into(), r.to_string());
        }
        if let Some(path) = &self.custom_file {
            inputs.insert("custom_file".into(), path.display().to_string());
        }
        inputs
    }

    fn label(&self) -> String {
        let mut label = format!("family={} codim={}", self.family.name(), self.codim);
        if let Some(r) = self.r {
            let _ = write!(label, " r={r}");
        }
        label
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapClassArg {
    Prim,
    Morin,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank of the cobordism group of the family in source dimension n,
    /// over Euclidean space (--dim) or over a Betti profile (--target).
    Rank {
        #[command(flatten)]
        family: FamilyArgs,
        /// Source dimension n.
        #[arg(long)]
        dim: Option<usize>,
        /// Betti profile "b0,b1,..." or @file.
        #[arg(long)]
        target: Option<String>,
        /// Evaluate the closed-form series instead of the engine.
        #[arg(long)]
        closed: bool,
    },
    /// Homology rank series of the family's Kazarian space up to N.
    Series {
        #[command(flatten)]
        family: FamilyArgs,
        /// Print the closed-form series instead of the engine series.
        #[arg(long)]
        closed: bool,
    },
    /// Spectral-sequence page as a column-by-degree rank grid.
    Page {
        #[command(flatten)]
        family: FamilyArgs,
        /// Which page: "1" or "inf".
        #[arg(long, default_value = "1")]
        page: String,
        /// Add the chi-power module-bookkeeping annotation.
        #[arg(long)]
        annotate: bool,
    },
    /// Thom polynomial of a stratum; with --index, the higher polynomial.
    Thom {
        /// Table family (prim or morin).
        #[arg(long, value_enum)]
        family: MapClassArg,
        /// Codimension k >= 1.
        #[arg(long)]
        codim: usize,
        /// Stratum index i >= 1.
        #[arg(long)]
        stratum: usize,
        /// Pontrjagin multi-index, comma separated (e.g. 1,1,2); "-" for empty.
        #[arg(long)]
        index: Option<String>,
    },
    /// Tower stages of the family truncated at the top stratum --r; with
    /// --target, also the immersion-rank table up to --jmax.
    Tower {
        #[command(flatten)]
        family: FamilyArgs,
        /// Betti profile "b0,b1,..." or @file for the immersion-rank table.
        #[arg(long)]
        target: Option<String>,
        /// Largest Euclidean suspension j for the table (default 0).
        #[arg(long)]
        jmax: Option<usize>,
    },
    /// Left-right bordism series; with --dim, the single rank in source
    /// dimension n; with --framed, the framed-bordism rank instead.
    Bordism {
        #[command(flatten)]
        family: FamilyArgs,
        /// Source dimension n.
        #[arg(long)]
        dim: Option<usize>,
        /// Framed-bordism rank (requires --dim).
        #[arg(long)]
        framed: bool,
    },
    /// 3-primary torsion parameter t(m) of fold cobordism in dimension 4m-1.
    FoldTorsion {
        #[arg(long)]
        m: u64,
    },
    /// Rational splitting verdict for the top stratum --r, with the residual
    /// factor's homotopy ranks reported alongside.
    SplitCheck {
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Rank of the complete obstruction to eliminating the top stratum --r
    /// over Euclidean space (--dim) or a Betti profile (--target).
    Obstruction {
        #[command(flatten)]
        family: FamilyArgs,
        /// Source dimension n (Euclidean target of dimension n + k).
        #[arg(long)]
        dim: Option<usize>,
        /// Betti profile "b0,b1,..." or @file.
        #[arg(long)]
        target: Option<String>,
    },
    /// Replay every closed-form identity against the engine; exit 1 on any
    /// mismatch.
    Consistency,
}

/// Rendered output plus the process exit status.
#[derive(Debug)]
pub struct RunOutput {
    pub text: String,
    pub exit_code: u8,
}

impl RunOutput {
    fn ok(text: String) -> Self {
        Self { text, exit_code: 0 }
    }
}

fn resolve_truncation(query: &QuerySpec) -> Result<usize> {
    if let Some(n) = query.truncation {
        return Ok(n);
    }
    match std::env::var(TRUNCATION_ENV) {
        Ok(value) => value.parse().map_err(|_| {
            Error::Usage(format!(
                "{TRUNCATION_ENV} must be a natural number, got {value:?}"
            ))
        }),
        Err(_) => Ok(DEFAULT_TRUNCATION),
    }
}

fn need_truncation(actual: usize, needed: usize) -> Result<()> {
    if actual < needed {
        return Err(Error::TruncationTooSmall { needed, actual });
    }
    Ok(())
}

/// Executes a query and renders its output. Usage problems come back as
/// errors; a failed consistency run is a successful render with exit code 1.
pub fn run(query: &QuerySpec) -> Result<RunOutput> {
    let truncation = resolve_truncation(query)?;
    let format = query.format;
    match &query.command {
        Command::Rank {
            family,
            dim,
            target,
            closed,
        } => run_rank(family, *dim, target.as_deref(), *closed, truncation, format),
        Command::Series { family, closed } => run_series(family, *closed, truncation, format),
        Command::Page {
            family,
            page,
            annotate,
        } => run_page(family, page, *annotate, truncation, format),
        Command::Thom {
            family,
            codim,
            stratum,
            index,
        } => run_thom(*family, *codim, *stratum, index.as_deref(), format),
        Command::Tower {
            family,
            target,
            jmax,
        } => run_tower(family, target.as_deref(), *jmax, truncation, format),
        Command::Bordism {
            family,
            dim,
            framed,
        } => run_bordism(family, *dim, *framed, truncation, format),
        Command::FoldTorsion { m } => run_fold_torsion(*m, format),
        Command::SplitCheck { family } => run_split_check(family, truncation, format),
        Command::Obstruction {
            family,
            dim,
            target,
        } => run_obstruction(family, *dim, target.as_deref(), truncation, format),
        Command::Consistency => run_consistency(format),
    }
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema: u32,
    command: &'static str,
    inputs: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation: Option<usize>,
    #[serde(flatten)]
    body: T,
}

fn to_json<T: Serialize>(
    command: &'static str,
    inputs: BTreeMap<String, String>,
    truncation: Option<usize>,
    body: T,
) -> String {
    let envelope = Envelope {
        schema: SCHEMA_VERSION,
        command,
        inputs,
        truncation,
        body,
    };
    let mut text = serde_json::to_string(&envelope).expect("output types serialize");
    text.push('\n');
    text
}

#[derive(Serialize)]
struct ValueBody {
    value: String,
}

#[derive(Serialize)]
struct SeriesBody {
    coeffs: Vec<String>,
}

#[derive(Serialize)]
struct ColumnBody {
    index: usize,
    codim: usize,
    coeffs: Vec<String>,
}

#[derive(Serialize)]
struct PageBody {
    columns: Vec<ColumnBody>,
}

#[derive(Serialize)]
struct TermBody {
    coefficient: String,
    monomial: Vec<FactorBody>,
}

#[derive(Serialize)]
struct FactorBody {
    generator: String,
    exponent: u32,
}

#[derive(Serialize)]
struct ThomBody {
    polynomial: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree: Option<usize>,
    terms: Vec<TermBody>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

#[derive(Serialize)]
struct StageBody {
    columns: Vec<usize>,
    fiber_bottom_degrees: Vec<usize>,
}

#[derive(Serialize)]
struct TowerBody {
    stages: Vec<StageBody>,
    #[serde(skip_serializing_if = "Option::is_none")]
    imm_table: Option<Vec<Vec<String>>>,
}

#[derive(Serialize)]
struct FoldBody {
    m: u64,
    t: u64,
    rank_part: u64,
    torsion_descriptor: String,
}

#[derive(Serialize)]
struct BRankBody {
    m: usize,
    rank: String,
}

#[derive(Serialize)]
struct SplitBody {
    verdict: &'static str,
    b_ranks: Vec<BRankBody>,
}

#[derive(Serialize)]
struct CheckBody {
    name: String,
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

#[derive(Serialize)]
struct ConsistencyBody {
    checks: Vec<CheckBody>,
    all_ok: bool,
}

fn scalar_output(
    command: &'static str,
    inputs: BTreeMap<String, String>,
    truncation: Option<usize>,
    value: &BigInt,
    format: Format,
) -> RunOutput {
    match format {
        Format::Table => RunOutput::ok(format!("{value}\n")),
        Format::Json => RunOutput::ok(to_json(
            command,
            inputs,
            truncation,
            ValueBody {
                value: value.to_string(),
            },
        )),
    }
}

fn series_text(title: &str, label: &str, truncation: usize, series: &TruncatedSeries) -> String {
    let mut out = format!("# {title}: {label} truncation={truncation}\n");
    for (degree, coeff) in series.coeffs().iter().enumerate() {
        let _ = writeln!(out, "{degree} {coeff}");
    }
    out
}

fn series_output(
    command: &'static str,
    title: &str,
    inputs: BTreeMap<String, String>,
    label: &str,
    truncation: usize,
    series: &TruncatedSeries,
    format: Format,
) -> RunOutput {
    match format {
        Format::Table => RunOutput::ok(series_text(title, label, truncation, series)),
        Format::Json => RunOutput::ok(to_json(
            command,
            inputs,
            Some(truncation),
            SeriesBody {
                coeffs: series.coeffs().iter().map(|c| c.to_string()).collect(),
            },
        )),
    }
}

fn run_rank(
    family_args: &FamilyArgs,
    dim: Option<usize>,
    target: Option<&str>,
    closed: bool,
    truncation: usize,
    format: Format,
) -> Result<RunOutput> {
    let family = family_args.build()?;
    let mut inputs = family_args.inputs();
    if closed {
        inputs.insert("closed".into(), "true".into());
    }
    let value = match target {
        Some(spec) => {
            if closed {
                return Err(Error::Usage(
                    "--closed applies to ranks over a point, not over --target".into(),
                ));
            }
            inputs.insert("target".into(), spec.to_string());
            let profile = parse_target(spec)?;
            need_truncation(truncation, profile.dim())?;
            cob_rank_over_target(&family, &profile)?
        }
        None => {
            let n = dim.ok_or_else(|| Error::Usage("rank needs --dim or --target".into()))?;
            inputs.insert("dim".into(), n.to_string());
            need_truncation(truncation, n)?;
            if closed {
                cob_rank_closed(&family, n)?
            } else {
                cob_rank(&family, n)?
            }
        }
    };
    Ok(scalar_output(
        "rank",
        inputs,
        Some(truncation),
        &value,
        format,
    ))
}

fn run_series(
    family_args: &FamilyArgs,
    closed: bool,
    truncation: usize,
    format: Format,
) -> Result<RunOutput> {
    let family = family_args.build()?;
    let mut inputs = family_args.inputs();
    let (title, series) = if closed {
        inputs.insert("closed".into(), "true".into());
        (
            "closed-form rank series",
            closed_form_series(&family, truncation)?,
        )
    } else {
        (
            "homology rank series",
            kazarian_homology_series(&family, truncation)?,
        )
    };
    Ok(series_output(
        "series",
        title,
        inputs,
        &family_args.label(),
        truncation,
        &series,
        format,
    ))
}

/// Renders a page as a degree-by-column grid (table) or as the stable JSON
/// schema with one coefficient vector per column.
pub fn render_page(
    page: &Page,
    format: Format,
    inputs: BTreeMap<String, String>,
    label: &str,
    annotation: Option<String>,
) -> String {
    match format {
        Format::Json => {
            let columns = page
                .columns
                .iter()
                .map(|col| ColumnBody {
                    index: col.index,
                    codim: col.source_codim,
                    coeffs: col.series.coeffs().iter().map(|c| c.to_string()).collect(),
                })
                .collect();
            to_json("page", inputs, Some(page.truncation), PageBody { columns })
        }
        Format::Table => {
            let kind = match page.kind {
                PageKind::E1 => "E1",
                PageKind::EInfinity => "Einf",
            };
            let mut out = format!("# {kind} page: {label} truncation={}\n", page.truncation);
            if page.columns.is_empty() {
                out.push_str("# (no columns)\n");
                return out;
            }
            let codims: Vec<String> = page
                .columns
                .iter()
                .map(|c| format!("c{}={}", c.index, c.source_codim))
                .collect();
            let _ = writeln!(out, "# codims: {}", codims.join(" "));
            let headers: Vec<String> = page
                .columns
                .iter()
                .map(|c| format!("c{}", c.index))
                .collect();
            let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
            for (j, col) in page.columns.iter().enumerate() {
                for coeff in col.series.coeffs() {
                    widths[j] = widths[j].max(coeff.to_string().len());
                }
            }
            let deg_width = "deg".len().max(page.truncation.to_string().len());
            let mut header = format!("{:>deg_width$} |", "deg");
            for (h, w) in headers.iter().zip(&widths) {
                let _ = write!(header, " {h:>w$}");
            }
            let _ = writeln!(out, "{header}");
            for degree in 0..=page.truncation {
                let mut row = format!("{degree:>deg_width$} |");
                for (col, w) in page.columns.iter().zip(&widths) {
                    let _ = write!(row, " {:>w$}", col.series.coeff(degree).to_string());
                }
                let _ = writeln!(out, "{row}");
            }
            if let Some(note) = annotation {
                let _ = writeln!(out, "# {note}");
            }
            out
        }
    }
}

fn run_page(
    family_args: &FamilyArgs,
    page_arg: &str,
    annotate: bool,
    truncation: usize,
    format: Format,
) -> Result<RunOutput> {
    let family = family_args.build()?;
    let e1 = build_e1(&family, truncation)?;
    let page = match page_arg {
        "1" => e1,
        "inf" | "infinity" => apply_d1(&e1, &family)?,
        other => {
            return Err(Error::Usage(format!(
                "--page must be \"1\" or \"inf\", got {other:?}"
            )))
        }
    };
    let mut inputs = family_args.inputs();
    inputs.insert("page".into(), page_arg.to_string());
    let annotation = annotate.then(|| {
        "module bookkeeping: column r is a free module over the base ring; \
         identifying its Thom class with the r-th Euler power would grade it \
         from r*k instead of the true bottom degree shown"
            .to_string()
    });
    Ok(RunOutput::ok(render_page(
        &page,
        format,
        inputs,
        &family_args.label(),
        annotation,
    )))
}

fn run_thom(
    class_arg: MapClassArg,
    codim: usize,
    stratum: usize,
    index: Option<&str>,
    format: Format,
) -> Result<RunOutput> {
    let class = match class_arg {
        MapClassArg::Prim => MapClass::Prim,
        MapClassArg::Morin => MapClass::Morin,
    };
    let multi_index = match index {
        None => None,
        Some(raw) => Some(parse_multi_index(raw)?),
    };
    let entry = match &multi_index {
        None => thom_polynomial(class, codim, stratum)?,
        Some(idx) => higher_thom_polynomial(class, codim, stratum, idx)?,
    };
    let mut inputs = BTreeMap::new();
    inputs.insert("family".into(), class.to_string());
    inputs.insert("codim".into(), codim.to_string());
    inputs.insert("stratum".into(), stratum.to_string());
    if let Some(idx) = &multi_index {
        inputs.insert(
            "index".into(),
            idx.iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
    }
    match format {
        Format::Table => Ok(RunOutput::ok(thom_text(&entry, multi_index.as_deref()))),
        Format::Json => {
            let terms = entry
                .polynomial
                .terms()
                .map(|(monomial, coefficient)| TermBody {
                    coefficient: coefficient.to_string(),
                    monomial: monomial
                        .exponents()
                        .map(|(generator, &exponent)| FactorBody {
                            generator: generator.to_string(),
                            exponent,
                        })
                        .collect(),
                })
                .collect();
            Ok(RunOutput::ok(to_json(
                "thom",
                inputs,
                None,
                ThomBody {
                    polynomial: entry.polynomial.to_string(),
                    degree: entry.polynomial.degree(),
                    terms,
                    note: entry.note.map(str::to_string),
                },
            )))
        }
    }
}

fn thom_text(entry: &ThomTableEntry, multi_index: Option<&[usize]>) -> String {
    let mut head = format!(
        "Tp({}, k={}, stratum {}",
        entry.class, entry.codim, entry.stratum
    );
    if let Some(idx) = multi_index {
        let joined = if idx.is_empty() {
            "-".to_string()
        } else {
            idx.iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let _ = write!(head, "; I={joined}");
    }
    let mut out = format!("{head}) = {}\n", entry.polynomial);
    match entry.polynomial.degree() {
        Some(degree) => {
            let _ = writeln!(out, "degree: {degree}");
        }
        None => {
            let _ = writeln!(out, "degree: none");
        }
    }
    if let Some(note) = entry.note {
        let _ = writeln!(out, "note: {note}");
    }
    out
}

fn run_tower(
    family_args: &FamilyArgs,
    target: Option<&str>,
    jmax: Option<usize>,
    truncation: usize,
    format: Format,
) -> Result<RunOutput> {
    let family = family_args.build()?;
    let r = top_stratum(family_args, &family)?;
    let tower = postnikov_tower(&family, r)?;
    let mut inputs = family_args.inputs();
    inputs.insert("r".into(), r.to_string());

    let table = match target {
        None => None,
        Some(spec) => {
            inputs.insert("target".into(), spec.to_string());
            let profile = parse_target(spec)?;
            let jmax = jmax.unwrap_or(0);
            inputs.insert("jmax".into(), jmax.to_string());
            need_truncation(truncation, profile.dim() + jmax)?;
            Some(tower_imm_table(&family, r, &profile, jmax)?)
        }
    };

    match format {
        Format::Table => {
            let mut out = format!(
                "# tower: family={} codim={} r={r}\n",
                family_args.family.name(),
                family_args.codim
            );
            for (number, stage) in tower.stages.iter().enumerate() {
                let columns = stage
                    .columns
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                let bottoms = stage
                    .fiber_bottom_degrees
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                let _ = writeln!(
                    out,
                    "stage {}: columns {columns}; fiber bottom degrees {bottoms}",
                    number + 1
                );
            }
            if let Some(rows) = &table {
                let _ = writeln!(
                    out,
                    "# immersion-rank table (rows: strata 0..{r}; columns: j=0..{})",
                    rows.first().map_or(0, |row| row.len().saturating_sub(1))
                );
                for (i, row) in rows.iter().enumerate() {
                    let cells = row
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(" ");
                    let _ = writeln!(out, "stratum {i}: {cells}");
                }
            }
            Ok(RunOutput::ok(out))
        }
        Format::Json => {
            let stages = tower
                .stages
                .iter()
                .map(|stage| StageBody {
                    columns: stage.columns.clone(),
                    fiber_bottom_degrees: stage.fiber_bottom_degrees.clone(),
                })
                .collect();
            let imm_table = table.map(|rows| {
                rows.iter()
                    .map(|row| row.iter().map(|v| v.to_string()).collect())
                    .collect()
            });
            Ok(RunOutput::ok(to_json(
                "tower",
                inputs,
                None,
                TowerBody { stages, imm_table },
            )))
        }
    }
}

fn run_bordism(
    family_args: &FamilyArgs,
    dim: Option<usize>,
    framed: bool,
    truncation: usize,
    format: Format,
) -> Result<RunOutput> {
    let family = family_args.build()?;
    let k = family.codim();
    let mut inputs = family_args.inputs();
    if framed {
        let n = dim.ok_or_else(|| Error::Usage("--framed needs --dim".into()))?;
        inputs.insert("dim".into(), n.to_string());
        inputs.insert("framed".into(), "true".into());
        need_truncation(truncation, n)?;
        let value = framed_bordism_rank(&family, n)?;
        return Ok(scalar_output(
            "bordism",
            inputs,
            Some(truncation),
            &value,
            format,
        ));
    }
    match dim {
        Some(n) => {
            inputs.insert("dim".into(), n.to_string());
            need_truncation(truncation, n + k)?;
            let series = bordism_generating_function(&family, truncation)?;
            let value = series.coeff(n + k);
            Ok(scalar_output(
                "bordism",
                inputs,
                Some(truncation),
                &value,
                format,
            ))
        }
        None => {
            let series = bordism_generating_function(&family, truncation)?;
            Ok(series_output(
                "bordism",
                "left-right bordism series (coefficient at n+k is the rank in source dimension n)",
                inputs,
                &family_args.label(),
                truncation,
                &series,
                format,
            ))
        }
    }
}

fn run_fold_torsion(m: u64, format: Format) -> Result<RunOutput> {
    let report = fold_torsion(m)?;
    let mut inputs = BTreeMap::new();
    inputs.insert("m".into(), m.to_string());
    match format {
        Format::Table => Ok(RunOutput::ok(format!(
            "m={} t={} rank_part={} torsion={}\n",
            report.m, report.t, report.rank_part, report.torsion_descriptor
        ))),
        Format::Json => Ok(RunOutput::ok(to_json(
            "fold-torsion",
            inputs,
            None,
            FoldBody {
                m: report.m,
                t: report.t,
                rank_part: report.rank_part,
                torsion_descriptor: report.torsion_descriptor,
            },
        ))),
    }
}

fn top_stratum(family_args: &FamilyArgs, family: &SingularityFamily) -> Result<usize> {
    match family_args.r {
        Some(r) => Ok(r),
        None => family
            .top_index()
            .ok_or_else(|| Error::Usage("this command needs --r for unbounded families".into())),
    }
}

fn run_split_check(
    family_args: &FamilyArgs,
    truncation: usize,
    format: Format,
) -> Result<RunOutput> {
    let family = family_args.build()?;
    let k = family.codim();
    let r = top_stratum(family_args, &family)?;
    let verdict = splitting_verdict(&family, r)?;
    let verdict_name = match verdict {
        SplitVerdict::Splits => "splits",
        SplitVerdict::Unknown => "unknown",
    };
    // The residual factor's homotopy ranks: the last-column coefficients of
    // the limit page, reported alongside the sufficient-only verdict.
    let einf = apply_d1(&build_e1(&family, truncation)?, &family)?;
    let mut b_ranks = Vec::new();
    if let Some(col) = einf.column(r) {
        for degree in 0..=truncation {
            let rank = col.series.coeff(degree);
            if !rank.is_zero() {
                b_ranks.push((degree + k, rank));
            }
        }
    }
    let mut inputs = family_args.inputs();
    inputs.insert("r".into(), r.to_string());
    match format {
        Format::Table => {
            let mut out = format!("verdict: {verdict_name}\n");
            if b_ranks.is_empty() {
                out.push_str("B-ranks: none\n");
            } else {
                let cells = b_ranks
                    .iter()
                    .map(|(m, rank)| format!("{m}:{rank}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                let _ = writeln!(out, "B-ranks: {cells}");
            }
            Ok(RunOutput::ok(out))
        }
        Format::Json => Ok(RunOutput::ok(to_json(
            "split-check",
            inputs,
            Some(truncation),
            SplitBody {
                verdict: verdict_name,
                b_ranks: b_ranks
                    .into_iter()
                    .map(|(m, rank)| BRankBody {
                        m,
                        rank: rank.to_string(),
                    })
                    .collect(),
            },
        ))),
    }
}

fn run_obstruction(
    family_args: &FamilyArgs,
    dim: Option<usize>,
    target: Option<&str>,
    truncation: usize,
    format: Format,
) -> Result<RunOutput> {
    let family = family_args.build()?;
    let k = family.codim();
    let r = top_stratum(family_args, &family)?;
    let mut inputs = family_args.inputs();
    inputs.insert("r".into(), r.to_string());
    let profile = match (target, dim) {
        (Some(spec), _) => {
            inputs.insert("target".into(), spec.to_string());
            parse_target(spec)?
        }
        (None, Some(n)) => {
            inputs.insert("dim".into(), n.to_string());
            TargetProfile::euclidean(n + k)
        }
        (None, None) => return Err(Error::Usage("obstruction needs --dim or --target".into())),
    };
    need_truncation(truncation, profile.dim())?;
    let value = elimination_obstruction_rank(&family, r, &profile)?;
    Ok(scalar_output(
        "obstruction",
        inputs,
        Some(truncation),
        &value,
        format,
    ))
}

fn run_consistency(format: Format) -> Result<RunOutput> {
    let reports = consistency::run_all();
    let (text, all_ok) = consistency::render_report(&reports);
    let exit_code = u8::from(!all_ok);
    match format {
        Format::Table => Ok(RunOutput { text, exit_code }),
        Format::Json => {
            let body = ConsistencyBody {
                checks: reports
                    .iter()
                    .map(|report| CheckBody {
                        name: report.name.to_string(),
                        ok: report.ok,
                        detail: report.detail.clone(),
                    })
                    .collect(),
                all_ok,
            };
            Ok(RunOutput {
                text: to_json("consistency", BTreeMap::new(), None, body),
                exit_code,
            })
        }
    }
}

fn parse_multi_index(raw: &str) -> Result<Vec<usize>> {
    let raw = raw.trim();
    if raw.is_empty() || raw == "-" {
        return Ok(Vec::new());
    }
    raw.split(',')
        .map(|piece| {
            piece.trim().parse().map_err(|_| {
                Error::Usage(format!(
                    "bad multi-index entry {piece:?} (expected a number)"
                ))
            })
        })
        .collect()
}

/// Parses a Betti profile: an inline comma list "1,0,1" or "@path" to a file
/// holding whitespace/comma separated numbers.
pub fn parse_target(spec: &str) -> Result<TargetProfile> {
    let content;
    let raw = if let Some(path) = spec.strip_prefix('@') {
        content = std::fs::read_to_string(path)
            .map_err(|err| Error::Usage(format!("cannot read target file {path}: {err}")))?;
        content.as_str()
    } else {
        spec
    };
    let betti: Vec<u64> = raw
        .split([',', ' ', '\t', '\n', '\r'])
        .filter(|piece| !piece.is_empty())
        .map(|piece| {
            piece.parse().map_err(|_| {
                Error::Usage(format!("bad Betti number {piece:?} (expected a natural)"))
            })
        })
        .collect::<Result<_>>()?;
    TargetProfile::new(betti)
}

/// Parses a custom strata file. One stratum per line, five whitespace
/// separated fields: index, source codimension, generator list ("-" for
/// none, "4,8" for polynomial degrees, "e3" for an exterior generator),
/// extra shift, and a flag ("-" or "zero"). Lines starting with '#' and
/// blank lines are skipped.
pub fn parse_custom_file(path: &PathBuf) -> Result<Vec<StratumSpec>> {
    let content = std::fs::read_to_string(path).map_err(|err| {
        Error::Usage(format!("cannot read strata file {}: {err}", path.display()))
    })?;
    parse_custom_strata(&content)
}

pub fn parse_custom_strata(content: &str) -> Result<Vec<StratumSpec>> {
    let mut strata = Vec::new();
    for (line_number, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::Usage(format!(
                "strata line {}: expected 5 fields (index codim generators shift flag), got {}",
                line_number + 1,
                fields.len()
            )));
        }
        let parse_number = |field: &str, what: &str| -> Result<usize> {
            field.parse().map_err(|_| {
                Error::Usage(format!(
                    "strata line {}: bad {what} {field:?}",
                    line_number + 1
                ))
            })
        };
        let index = parse_number(fields[0], "index")?;
        let codim = parse_number(fields[1], "codimension")?;
        let mut base = GradedRingSpec::empty();
        if fields[2] != "-" {
            for piece in fields[2].split(',') {
                if let Some(degree) = piece.strip_prefix('e') {
                    base = base.with_generator(
                        parse_number(degree, "exterior generator degree")?,
                        GeneratorKind::Exterior,
                    );
                } else {
                    base = base.with_generator(
                        parse_number(piece, "generator degree")?,
                        GeneratorKind::Polynomial,
                    );
                }
            }
        }
        let shift = parse_number(fields[3], "extra shift")?;
        let zero = match fields[4] {
            "-" => false,
            "zero" => true,
            other => {
                return Err(Error::Usage(format!(
                    "strata line {}: flag must be \"-\" or \"zero\", got {other:?}",
                    line_number + 1
                )))
            }
        };
        strata.push(StratumSpec::new(index, codim, base, shift, zero));
    }
    Ok(strata)
}

/// Rejects custom families whose parity blocks would permit non-zero
/// differentials; run at load time so every later query is meaningful.
fn validate_block_degeneracy(family: &SingularityFamily) -> Result<()> {
    let top = family.top_index().unwrap_or(0);
    let blocks = parity_blocks(family, top)?;
    if blocks.len() > 1 {
        return Err(Error::Usage(format!(
            "custom family has {} parity blocks {:?}; only block-degenerate \
             families (a single parity block) are supported",
            blocks.len(),
            blocks
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query(args: &[&str]) -> QuerySpec {
        QuerySpec::try_parse_from(std::iter::once("kazcalc").chain(args.iter().copied()))
            .expect("valid arguments")
    }

    #[test]
    fn rank_scalar_output() {
        let out = run(&query(&[
            "rank",
            "--family",
            "morin",
            "--codim",
            "1",
            "--dim",
            "4",
            "--truncation",
            "10",
        ]))
        .unwrap();
        assert_eq!(out.text, "1\n");
        assert_eq!(out.exit_code, 0);
    }

    #[test]
    fn rank_requires_dim_or_target() {
        let err = run(&query(&[
            "rank",
            "--family",
            "morin",
            "--codim",
            "1",
            "--truncation",
            "10",
        ]))
        .unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn truncation_too_small_names_the_minimum() {
        let err = run(&query(&[
            "rank",
            "--family",
            "morin",
            "--codim",
            "1",
            "--dim",
            "12",
            "--truncation",
            "10",
        ]))
        .unwrap_err();
        assert_eq!(
            err,
            Error::TruncationTooSmall {
                needed: 12,
                actual: 10
            }
        );
    }

    #[test]
    fn page_json_round_trips_numbers() {
        let out = run(&query(&[
            "page",
            "--family",
            "morin",
            "--codim",
            "2",
            "--page",
            "inf",
            "--truncation",
            "12",
            "--format",
            "json",
        ]))
        .unwrap();
        let value: serde_json::Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(value["schema"], 1);
        assert_eq!(value["command"], "page");
        let coeffs = value["columns"][0]["coeffs"].as_array().unwrap();
        let parsed: Vec<BigInt> = coeffs
            .iter()
            .map(|c| c.as_str().unwrap().parse().unwrap())
            .collect();
        let family = SingularityFamily::morin(2).unwrap();
        let einf = apply_d1(&build_e1(&family, 12).unwrap(), &family).unwrap();
        assert_eq!(parsed, einf.column(0).unwrap().series.coeffs());
    }

    #[test]
    fn custom_family_path() {
        let strata = parse_custom_strata("# demo\n0 0 4 0 -\n1 4 4 0 -\n").unwrap();
        assert_eq!(strata.len(), 2);
        let family = SingularityFamily::custom(3, strata).unwrap();
        assert!(validate_block_degeneracy(&family).is_ok());

        let mixed = parse_custom_strata("0 0 - 0 -\n1 3 - 0 -\n").unwrap();
        let family = SingularityFamily::custom(2, mixed).unwrap();
        assert!(validate_block_degeneracy(&family).is_err());
    }

    #[test]
    fn custom_file_errors_are_diagnosed() {
        assert!(parse_custom_strata("0 0 4 0").is_err());
        assert!(parse_custom_strata("0 0 4 0 maybe").is_err());
        assert!(parse_custom_strata("x 0 4 0 -").is_err());
    }

    #[test]
    fn target_parsing() {
        let profile = parse_target("1,0,1").unwrap();
        assert_eq!(profile.betti(), &[1, 0, 1]);
        assert!(parse_target("1,x").is_err());
        assert!(parse_target("").is_err());
    }

    #[test]
    fn env_variable_overrides_default() {
        // Resolved lazily so in-process queries can pin --truncation instead.
        let q = query(&["fold-torsion", "--m", "1"]);
        assert_eq!(resolve_truncation(&q).unwrap(), DEFAULT_TRUNCATION);
        let q = query(&["fold-torsion", "--m", "1", "--truncation", "7"]);
        assert_eq!(resolve_truncation(&q).unwrap(), 7);
    }

    #[test]
    fn obstruction_matches_module_example() {
        let out = run(&query(&[
            "obstruction",
            "--family",
            "morin",
            "--codim",
            "3",
            "--r",
            "2",
            "--dim",
            "8",
            "--truncation",
            "12",
        ]))
        .unwrap();
        assert_eq!(out.text, "1\n");
    }

    #[test]
    fn bordism_framed_example() {
        let out = run(&query(&[
            "bordism",
            "--family",
            "morin",
            "--codim",
            "2",
            "--dim",
            "4",
            "--framed",
            "--truncation",
            "10",
        ]))
        .unwrap();
        assert_eq!(out.text, "2\n");
    }
}
