//! Command-line surface over the separating-redundancy toolkit: bound
//! tables, verification, the exact oracle, constructions, covering designs,
//! and the affine-plane pipeline.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use sepred_core::bounds::{self, BoundReport, EvalMode};
use sepred_core::code::{presets, CodeParams, LinearCode, DEFAULT_ENUM_LIMIT};
use sepred_core::covering::{
    greedy_covering_lambda, schonheim_lower, Covering, CoveringSizeSource, CoveringSizes,
    CoveringTable, GeneralizedCovering,
};
use sepred_core::construct::{
    construct_covering_based, construct_generic, construct_hybrid, construct_randomized,
    BlockSource, CoveringBuildOptions,
};
use sepred_core::geometry;
use sepred_core::matrix::GFMatrix;
use sepred_core::separation::{
    exact_separating_redundancy, is_l_separating, is_s_separating, OracleOptions,
};

#[derive(Parser)]
#[command(
    name = "sepred",
    about = "Bounds, verification, and construction for the l-separating redundancy of linear codes",
    version
)]
struct Cli {
    /// Worker threads (also honors SEPRED_THREADS; default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every bound for one code over a range of l.
    Bounds(BoundsArgs),
    /// Bound tables for the three built-in parameter sets in one run.
    Tables(TablesArgs),
    /// Check whether a matrix is S- or l-separating for a code.
    Verify(VerifyArgs),
    /// Exact separating redundancy of a tiny code by exhaustive search.
    Exact(ExactArgs),
    /// Build a verified l-separating parity-check matrix.
    Construct(ConstructArgs),
    /// Covering designs: greedy construction, verification, lower bounds.
    Covering(CoveringArgs),
    /// Affine-plane pipeline: certified 5-separating stack over AG(2,8).
    Ag(AgArgs),
}

#[derive(Args)]
struct CodeSource {
    /// Built-in code or parameter preset: hamming7, exthamming8, golay24,
    /// bch41, qr12, repetitionN, mds_N_K_Q.
    #[arg(long, conflicts_with_all = ["params", "code_matrix"])]
    preset: Option<String>,
    /// Explicit parameters n,k,d,ddual,q.
    #[arg(long, value_name = "N,K,D,DDUAL,Q", conflicts_with = "code_matrix")]
    params: Option<String>,
    /// Load a parity-check matrix in GFMAT format as the code.
    #[arg(long, value_name = "FILE")]
    code_matrix: Option<PathBuf>,
    /// Trusted minimum distance when enumeration is infeasible.
    #[arg(long)]
    d: Option<usize>,
    /// Trusted dual distance when enumeration is infeasible.
    #[arg(long)]
    ddual: Option<usize>,
    /// Cap on exhaustive codeword enumeration when deriving distances
    /// from a loaded matrix.
    #[arg(long, default_value_t = DEFAULT_ENUM_LIMIT)]
    enum_limit: u128,
}

impl CodeSource {
    fn resolve_params(&self) -> anyhow::Result<CodeParams> {
        match (&self.preset, &self.params, &self.code_matrix) {
            (Some(name), None, None) => Ok(presets::preset(name)?.params()),
            (None, Some(p), None) => parse_params(p),
            (None, None, Some(path)) => Ok(*self.load_code(path)?.params()),
            _ => bail!("exactly one of --preset, --params, --code-matrix is required"),
        }
    }

    fn resolve_code(&self) -> anyhow::Result<LinearCode> {
        match (&self.preset, &self.params, &self.code_matrix) {
            (Some(name), None, None) => Ok(presets::preset(name)?.full()?),
            (None, None, Some(path)) => self.load_code(path),
            _ => bail!("this command needs a concrete code: --preset or --code-matrix"),
        }
    }

    fn load_code(&self, path: &PathBuf) -> anyhow::Result<LinearCode> {
        let f = File::open(path).with_context(|| format!("open {}", path.display()))?;
        let m = GFMatrix::read_gfmat(BufReader::new(f))?;
        Ok(LinearCode::from_pcm(&m, self.d, self.ddual, self.enum_limit)?)
    }
}

fn parse_params(s: &str) -> anyhow::Result<CodeParams> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        bail!("--params wants five comma-separated values n,k,d,ddual,q");
    }
    let v: Vec<u64> = parts
        .iter()
        .map(|p| p.parse().map_err(|_| anyhow!("bad number `{p}`")))
        .collect::<anyhow::Result<_>>()?;
    Ok(CodeParams::new(
        v[0] as usize,
        v[1] as usize,
        v[2] as usize,
        v[3] as usize,
        v[4],
    )?)
}

fn parse_l_range(s: &str, max: usize) -> anyhow::Result<Vec<usize>> {
    let range = if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.parse().map_err(|_| anyhow!("bad range start `{a}`"))?;
        let b: usize = b.parse().map_err(|_| anyhow!("bad range end `{b}`"))?;
        a..=b
    } else {
        let v: usize = s.parse().map_err(|_| anyhow!("bad l `{s}`"))?;
        v..=v
    };
    let out: Vec<usize> = range.collect();
    if out.is_empty() || out[0] == 0 || *out.last().unwrap() > max {
        bail!("l range must lie within [1, {max}] for this code");
    }
    Ok(out)
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Markdown,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    code: CodeSource,
    /// Single value `3` or inclusive range `1..7`.
    #[arg(long, default_value = "1..1")]
    l: String,
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
    /// Extra best-known covering sizes, lines `n mu l size`.
    #[arg(long, value_name = "FILE")]
    covering_table: Option<PathBuf>,
    /// Drop the built-in best-known covering sizes.
    #[arg(long)]
    no_builtin_coverings: bool,
    /// Skip greedy covering construction for missing sizes.
    #[arg(long)]
    no_greedy: bool,
    /// Evaluate the counting bound in pure exact rationals (slow) instead
    /// of certified intervals with exact fallback.
    #[arg(long)]
    exact: bool,
    /// Seed for the greedy covering sampler.
    #[arg(long, default_value = "0")]
    seed: u64,
}

#[derive(Args)]
struct TablesArgs {
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
    #[arg(long, value_name = "FILE")]
    covering_table: Option<PathBuf>,
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Matrix to verify, GFMAT format.
    #[arg(long, value_name = "FILE")]
    matrix: PathBuf,
    #[command(flatten)]
    code: CodeSource,
    /// Verify l-separation (all erasure patterns of size l).
    #[arg(long, conflicts_with = "s")]
    l: Option<usize>,
    /// Verify one erasure pattern, comma-separated coordinates.
    #[arg(long, value_name = "I,J,...")]
    s: Option<String>,
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    code: CodeSource,
    #[arg(long)]
    l: usize,
    /// Give up above this many rows.
    #[arg(long, default_value = "24")]
    max_rows: usize,
    /// Write the minimum matrix found.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Stack identity + vanishing parts over a greedy covering.
    Covering,
    /// Vanishing parts over all size-l subsets.
    MsOnly,
    /// Random dual rows plus repair.
    Randomized,
    /// Random nonzero dual rows plus repair.
    RandomizedNonzero,
    /// All combinations of at most l+1 parity rows.
    Generic,
    /// Standard form plus restricted sampling and repair.
    Hybrid,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    code: CodeSource,
    #[arg(long)]
    l: usize,
    #[arg(long, value_enum)]
    method: Method,
    /// Covering block size for --method covering.
    #[arg(long)]
    mu: Option<usize>,
    /// Sample count for the randomized and hybrid methods.
    #[arg(long, default_value = "0")]
    t: usize,
    #[arg(long, default_value = "0")]
    seed: u64,
    /// Keep exact duplicate rows in covering stacks.
    #[arg(long)]
    no_dedup: bool,
    /// Write the matrix (with provenance comments) here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CoveringCmd {
    /// Greedy covering construction (verified before output).
    Build {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        mu: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value = "1")]
        lambda: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Verify a COVER or GCOVER file.
    Verify {
        #[arg(long, value_name = "FILE")]
        file: PathBuf,
    },
    /// Schoenheim-type lower bound on the covering number.
    Lower {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        mu: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value = "1")]
        lambda: usize,
    },
}

#[derive(Args)]
struct CoveringArgs {
    #[command(subcommand)]
    cmd: CoveringCmd,
}

#[derive(Args)]
struct AgArgs {
    /// Plane exponent (q = 2^h); the certified stack requires h = 3.
    #[arg(long, default_value = "3")]
    h: u32,
    #[arg(long, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,
    /// Suppress the (large) stacked-matrix GFMAT file.
    #[arg(long)]
    no_matrix: bool,
    #[arg(long, default_value = "1000")]
    spot_checks: usize,
    #[arg(long, default_value = "7")]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("SEPRED_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads {
        let _ = sepred_core::configure_threads(t);
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> anyhow::Result<ExitCode> {
    match cmd {
        Command::Bounds(args) => cmd_bounds(args),
        Command::Tables(args) => cmd_tables(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Exact(args) => cmd_exact(args),
        Command::Construct(args) => cmd_construct(args),
        Command::Covering(args) => cmd_covering(args),
        Command::Ag(args) => cmd_ag(args),
    }
}

fn build_reports(
    params: &CodeParams,
    ls: &[usize],
    table: Option<&CoveringTable>,
    greedy: bool,
    seed: u64,
    mode: EvalMode,
) -> anyhow::Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for &l in ls {
        let sizes = CoveringSizes::resolve(
            params.n,
            l,
            l..=params.max_l(),
            table,
            greedy,
            Some(seed),
        );
        out.extend(bounds::report(params, [l], &sizes, mode)?);
    }
    Ok(out)
}

fn cmd_bounds(args: BoundsArgs) -> anyhow::Result<ExitCode> {
    let params = args.code.resolve_params()?;
    let ls = parse_l_range(&args.l, params.max_l())?;
    let mut table = if args.no_builtin_coverings {
        CoveringTable::new()
    } else {
        CoveringTable::builtin_best_known()
    };
    if let Some(path) = &args.covering_table {
        let extra = CoveringTable::load(path)?;
        merge_tables(&mut table, &extra);
    }
    let mode = if args.exact {
        EvalMode::Exact
    } else {
        EvalMode::Interval
    };
    let reports = build_reports(&params, &ls, Some(&table), !args.no_greedy, args.seed, mode)?;
    let mut stdout = std::io::stdout().lock();
    render_table(&mut stdout, &params, &reports, args.format)?;
    Ok(ExitCode::SUCCESS)
}

fn merge_tables(into: &mut CoveringTable, from: &CoveringTable) {
    // CoveringTable keeps the minimum on duplicate keys
    for ((n, mu, l), size) in from.entries() {
        into.insert(n, mu, l, size).expect("entries were validated on load");
    }
}

fn cmd_tables(args: TablesArgs) -> anyhow::Result<ExitCode> {
    let mut table = CoveringTable::builtin_best_known();
    if let Some(path) = &args.covering_table {
        let extra = CoveringTable::load(path)?;
        merge_tables(&mut table, &extra);
    }
    let mode = if args.exact {
        EvalMode::Exact
    } else {
        EvalMode::Interval
    };
    let mut stdout = std::io::stdout().lock();
    for (name, lmax) in [("golay24", 7usize), ("bch41", 4), ("qr12", 5)] {
        let params = presets::preset(name)?.params();
        let ls: Vec<usize> = (1..=lmax).collect();
        let reports = build_reports(&params, &ls, Some(&table), true, 0, mode)?;
        writeln!(stdout, "# {name}")?;
        render_table(&mut stdout, &params, &reports, args.format)?;
        writeln!(stdout)?;
    }
    Ok(ExitCode::SUCCESS)
}

const BOUND_ROWS: &[(&str, &str)] = &[
    ("schonheim", "lower"),
    ("volume", "lower"),
    ("prob-uniform", "upper"),
    ("prob-nonzero", "upper"),
    ("prob-hybrid", "upper"),
    ("counting", "upper"),
    ("generic", "upper"),
    ("covering", "upper"),
    ("covering-refined", "upper"),
];

fn cell(value: &BigInt, flagged: bool) -> String {
    if flagged {
        "---".to_string()
    } else {
        value.to_string()
    }
}

fn report_cells(r: &BoundReport) -> Vec<String> {
    vec![
        r.lower_schonheim.to_string(),
        r.lower_volume.to_string(),
        cell(&r.upper_prob_basic.value, r.upper_prob_basic.exceeds_trivial),
        cell(
            &r.upper_prob_nonzero.value,
            r.upper_prob_nonzero.exceeds_trivial,
        ),
        cell(
            &r.upper_prob_hybrid.value,
            r.upper_prob_hybrid.exceeds_trivial,
        ),
        cell(&r.upper_prob_known.value, r.upper_prob_known.exceeds_trivial),
        cell(&r.upper_generic, &r.upper_generic >= &r.trivial),
        cell(
            &r.upper_covering_known.value,
            r.upper_covering_known.exceeds_trivial,
        ),
        cell(
            &r.upper_covering_refined.value,
            r.upper_covering_refined.exceeds_trivial,
        ),
    ]
}

fn render_table<W: Write>(
    w: &mut W,
    params: &CodeParams,
    reports: &[BoundReport],
    format: Format,
) -> anyhow::Result<()> {
    let ls: Vec<usize> = reports.iter().map(|r| r.l).collect();
    let cells: Vec<Vec<String>> = reports.iter().map(report_cells).collect();
    match format {
        Format::Tsv => {
            writeln!(
                w,
                "# code [{},{},{}]_{} ddual={} trivial={}",
                params.n,
                params.k,
                params.d,
                params.q,
                params.ddual,
                reports
                    .first()
                    .map(|r| r.trivial.to_string())
                    .unwrap_or_default()
            )?;
            write!(w, "bound\ttype")?;
            for l in &ls {
                write!(w, "\tl={l}")?;
            }
            writeln!(w)?;
            for (ri, (name, kind)) in BOUND_ROWS.iter().enumerate() {
                write!(w, "{name}\t{kind}")?;
                for row in &cells {
                    write!(w, "\t{}", row[ri])?;
                }
                writeln!(w)?;
            }
        }
        Format::Markdown => {
            write!(w, "| bound | type |")?;
            for l in &ls {
                write!(w, " l={l} |")?;
            }
            writeln!(w)?;
            write!(w, "|---|---|")?;
            for _ in &ls {
                write!(w, "---|")?;
            }
            writeln!(w)?;
            for (ri, (name, kind)) in BOUND_ROWS.iter().enumerate() {
                write!(w, "| {name} | {kind} |")?;
                for row in &cells {
                    write!(w, " {} |", row[ri])?;
                }
                writeln!(w)?;
            }
        }
    }
    // provenance footer: which covering sizes fed the covering bounds
    for r in reports {
        for (label, b) in [
            ("covering", &r.upper_covering_known),
            ("covering-refined", &r.upper_covering_refined),
        ] {
            let src = match (b.mu, b.source) {
                (Some(mu), Some(src)) => format!(
                    "mu={mu} C1 source : {}",
                    match src {
                        CoveringSizeSource::Exact => "exact",
                        CoveringSizeSource::Supplied => "supplied table",
                        CoveringSizeSource::Greedy => "greedy",
                        CoveringSizeSource::TrivialPad => "trivial padded covering",
                    }
                ),
                _ => "block-size-free branch".to_string(),
            };
            writeln!(w, "# l={} {label}: {src}", r.l)?;
        }
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let code = args.code.resolve_code()?;
    let f = File::open(&args.matrix).with_context(|| format!("open {}", args.matrix.display()))?;
    let h = GFMatrix::read_gfmat(BufReader::new(f))?;
    let verdict = match (&args.l, &args.s) {
        (Some(l), None) => is_l_separating(&code, &h, *l)?,
        (None, Some(s)) => {
            let set: Vec<usize> = s
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| anyhow!("bad coordinate `{t}`")))
                .collect::<anyhow::Result<_>>()?;
            is_s_separating(&code, &h, &set)?
        }
        _ => bail!("exactly one of --l or --s is required"),
    };
    if verdict.separating {
        println!(
            "separating (rank {} of {})",
            verdict.achieved_rank, verdict.required_rank
        );
        if let Some(note) = &verdict.note {
            println!("note: {note}");
        }
        Ok(ExitCode::SUCCESS)
    } else {
        println!(
            "not separating: witness {:?} achieves rank {} of {}",
            verdict.witness.as_deref().unwrap_or(&[]),
            verdict.achieved_rank,
            verdict.required_rank
        );
        Ok(ExitCode::from(1))
    }
}

fn cmd_exact(args: ExactArgs) -> anyhow::Result<ExitCode> {
    let code = args.code.resolve_code()?;
    let opts = OracleOptions {
        max_rows: args.max_rows,
        ..OracleOptions::default()
    };
    let out = exact_separating_redundancy(&code, args.l, &opts)?;
    println!("{}", out.value);
    if let Some(path) = &args.out {
        let mut w = BufWriter::new(File::create(path)?);
        out.matrix.write_gfmat(&mut w)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_construct(args: ConstructArgs) -> anyhow::Result<ExitCode> {
    let code = args.code.resolve_code()?;
    let l = args.l;
    let result = match args.method {
        Method::Covering => {
            let mu = args.mu.ok_or_else(|| anyhow!("--method covering needs --mu"))?;
            let cov = sepred_core::covering::greedy_covering(
                code.params().n,
                mu,
                l,
                Some(args.seed),
            )?;
            construct_covering_based(
                &code,
                l,
                BlockSource::Uniform(&cov),
                CoveringBuildOptions {
                    ms_only: false,
                    dedup: !args.no_dedup,
                },
            )?
        }
        Method::MsOnly => {
            let n = code.params().n;
            let blocks: Vec<Vec<usize>> =
                sepred_core::subsets::colex_subsets(n, l).collect();
            let cov = Covering {
                n,
                mu: l,
                l,
                lambda: 1,
                blocks,
            };
            construct_covering_based(
                &code,
                l,
                BlockSource::Uniform(&cov),
                CoveringBuildOptions {
                    ms_only: true,
                    dedup: !args.no_dedup,
                },
            )?
        }
        Method::Randomized => construct_randomized(&code, l, args.t, args.seed, false)?,
        Method::RandomizedNonzero => construct_randomized(&code, l, args.t, args.seed, true)?,
        Method::Generic => construct_generic(&code, l)?,
        Method::Hybrid => construct_hybrid(&code, l, args.t, args.seed)?,
    };
    println!(
        "method {} rows {} verified {}{}",
        result.method,
        result.rows,
        result.verified,
        match &result.bound_value {
            Some(b) => format!(" bound {b}"),
            None => String::new(),
        }
    );
    if let Some(path) = &args.out {
        let mut w = BufWriter::new(File::create(path)?);
        result.write_gfmat(&mut w)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_covering(args: CoveringArgs) -> anyhow::Result<ExitCode> {
    match args.cmd {
        CoveringCmd::Build {
            n,
            mu,
            l,
            lambda,
            seed,
            out,
        } => {
            let cov = greedy_covering_lambda(n, mu, l, lambda, seed)?;
            println!(
                "covering {} blocks (lower bound {})",
                cov.blocks.len(),
                schonheim_lower(n, mu, l, lambda)?
            );
            if let Some(path) = out {
                let mut w = BufWriter::new(File::create(path)?);
                cov.write_cover(&mut w)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        CoveringCmd::Verify { file } => {
            let content = std::fs::read_to_string(&file)?;
            let witness = if content.starts_with("GCOVER") {
                GeneralizedCovering::read_gcover(content.as_bytes())?.verify()
            } else {
                Covering::read_cover(content.as_bytes())?.verify()
            };
            match witness {
                None => {
                    println!("covering verifies");
                    Ok(ExitCode::SUCCESS)
                }
                Some(w) => {
                    println!("not a covering: {w:?} uncovered or malformed");
                    Ok(ExitCode::from(1))
                }
            }
        }
        CoveringCmd::Lower { n, mu, l, lambda } => {
            println!("{}", schonheim_lower(n, mu, l, lambda)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_ag(args: AgArgs) -> anyhow::Result<ExitCode> {
    let plane = geometry::build_plane(args.h)?;
    if args.h != 3 {
        let ic = geometry::incidence_code(&plane)?;
        println!(
            "AG(2,{}): {} lines, incidence rank {}, code [{},{},{}]_2 ddual {}",
            plane.q,
            plane.lines.len(),
            plane.q * plane.q - ic.code.params().k,
            ic.code.params().n,
            ic.code.params().k,
            ic.code.params().d,
            ic.code.params().ddual,
        );
        println!("the certified 5-separating stack requires --h 3");
        return Ok(ExitCode::SUCCESS);
    }
    let build = geometry::build_5separating(&plane, args.spot_checks, args.seed)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let report_path = args.out_dir.join("ag-h3-report.txt");
    std::fs::write(&report_path, build.report.render())?;
    let gcover_path = args.out_dir.join("ag-h3-blocks.gcover");
    {
        let mut w = BufWriter::new(File::create(&gcover_path)?);
        build
            .covering
            .to_generalized(plane.q * plane.q, 5)
            .write_gcover(&mut w)?;
    }
    print!("{}", build.report.render());
    println!("wrote {}", report_path.display());
    println!("wrote {}", gcover_path.display());
    if !args.no_matrix {
        let stack_path = args.out_dir.join("ag-h3-stack.gfmat");
        let mut w = BufWriter::new(File::create(&stack_path)?);
        build.write_stack_gfmat(&mut w)?;
        println!("wrote {}", stack_path.display());
    }
    if build.report.spot_failures > 0 || build.report.blocks_certified != build.report.total_blocks
    {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}
