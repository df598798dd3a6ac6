use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde_json::{json, Value};

use fibdens::density::{self, DensityOptions, DensityReport};
use fibdens::padic::{Interpolation, Interpolation2, PAdic};
use fibdens::scan::{self, FileSink, MemorySink, OutputFormat, RecordSink, ScanOptions, StreamSink};
use fibdens::tree::{self, AttainedSet, Form};
use fibdens::{fraction, modfib, Error, Result};

/// Densities of Fibonacci residues modulo prime powers.
#[derive(Parser)]
#[command(name = "fibdens", version)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Add a 15-significant-digit decimal next to every exact density.
    #[arg(long, global = true)]
    float: bool,
    /// Seed for sampled verification.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Fail with an internal-inconsistency error (for testing exit codes).
    #[arg(long, global = true, hide = true)]
    inject_fault: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full density report for a prime.
    Dens { p: u64 },
    /// Densities of all primes up to a bound.
    Table {
        #[arg(long)]
        upto: u64,
    },
    /// Attained residues modulo p^level.
    Tree(TreeArgs),
    /// Compare the fast tree builder with enumeration.
    Verify {
        p: u64,
        #[arg(long)]
        level: u32,
    },
    /// Evaluate the p-adic interpolation at n and compare with F(n).
    Interp {
        p: u64,
        n: u64,
        #[arg(long, default_value_t = 8)]
        prec: u32,
    },
    /// Digits of 2ω(φ)^i/√5, least significant first.
    Digits {
        p: u64,
        i: u64,
        #[arg(long, default_value_t = 8)]
        depth: u32,
    },
    /// Densities over a prime range, with checkpoints.
    Scan(ScanArgs),
    /// Search a range for primes with Wall exponent at least 2.
    Wss { lo: u64, hi: u64 },
    /// Compare the squares tree with enumeration and p/(2(p+1)).
    SquareCal {
        p: u64,
        #[arg(long)]
        level: u32,
    },
}

#[derive(Args)]
struct TreeArgs {
    p: u64,
    #[arg(long)]
    level: u32,
    #[arg(long, conflicts_with = "brute")]
    fast: bool,
    #[arg(long)]
    brute: bool,
    /// Graphviz output; takes precedence over --json.
    #[arg(long)]
    dot: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Args)]
struct ScanArgs {
    lo: u64,
    hi: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write checkpoints to this file.
    #[arg(long, conflicts_with = "resume")]
    checkpoint: Option<PathBuf>,
    /// Continue from this checkpoint file.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Primes per checkpoint.
    #[arg(long, default_value_t = 256)]
    every: usize,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, default_value_t = 8)]
    max_e: u32,
    /// Record per-prime wall-clock time (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

struct Ctx {
    json: bool,
    float: bool,
    seed: u64,
}

impl Ctx {
    fn fraction(&self, q: &BigRational) -> String {
        if self.float {
            format!("{} ({})", fraction::display(q), fraction::to_decimal(q, 15))
        } else {
            fraction::display(q)
        }
    }

    fn fraction_json(&self, q: &BigRational) -> Value {
        let mut v = json!({ "num": q.numer().to_string(), "den": q.denom().to_string() });
        if self.float {
            v["float"] = json!(fraction::to_decimal(q, 15));
        }
        v
    }
}

fn print_json(value: &Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn report_json(ctx: &Ctx, report: &DensityReport) -> Result<Value> {
    let mut v = serde_json::to_value(report)?;
    v["dens"] = ctx.fraction_json(&report.dens);
    Ok(v)
}

fn cmd_dens(ctx: &Ctx, p: u64) -> Result<()> {
    let opts = DensityOptions { seed: ctx.seed, ..Default::default() };
    let r = density::dens_with(p, &opts)?;
    if ctx.json {
        return print_json(&report_json(ctx, &r)?);
    }
    let zeros: Vec<String> = r.lucas_zeros.zeros.iter().map(u64::to_string).collect();
    println!("p        {}", r.p);
    println!("epsilon  {}", r.epsilon);
    println!("alpha    {}", r.alpha);
    println!("pi       {}", r.pi);
    println!("e        {}", r.e);
    println!("zeros    {}", if zeros.is_empty() { "-".into() } else { zeros.join(" ") });
    println!("N        {}", r.n);
    println!("Z        {}", r.z);
    println!("dens     {}", ctx.fraction(&r.dens));
    if let Some(w) = &r.wall {
        let show = |v: Option<u32>| v.map_or("-".to_string(), |v| v.to_string());
        println!("wall     fib {} lucas {} p-adic {}", w.via_fib, show(w.via_lucas), show(w.via_padic));
    }
    Ok(())
}

fn cmd_table(ctx: &Ctx, upto: u64) -> Result<()> {
    let mut sink = MemorySink::default();
    let summary = scan::scan_range(1, upto.max(1), &mut sink, &ScanOptions::default())?;
    if ctx.json {
        let rows: Vec<Value> = sink
            .records
            .iter()
            .map(|r| {
                json!({ "p": r.p, "dens": ctx.fraction_json(&r.dens), "e": r.e, "N": r.n, "Z": r.z,
                        "alpha": r.alpha, "pi": r.pi })
            })
            .collect();
        return print_json(&json!({ "records": rows, "summary": serde_json::to_value(&summary)? }));
    }
    for r in &sink.records {
        println!("{:>8}  {}", r.p, ctx.fraction(&r.dens));
    }
    Ok(())
}

fn build_tree(args: &TreeArgs) -> Result<AttainedSet> {
    let brute = args.brute || (!args.fast && matches!(args.p, 2 | 5));
    if brute {
        tree::brute_attained(args.p, args.level)
    } else {
        tree::fast_attained(args.p, args.level)
    }
}

fn cmd_tree(ctx: &Ctx, args: &TreeArgs) -> Result<()> {
    let set = build_tree(args)?;
    if args.dot {
        print!("{}", tree::to_dot(&set)?);
        return Ok(());
    }
    if ctx.json {
        println!("{}", tree::to_json(&set)?);
        return Ok(());
    }
    let density = set.density()?;
    println!("p        {}", set.p);
    println!("level    {}", set.lambda);
    println!("count    {}", set.count()?);
    println!("density  {}", ctx.fraction(&density));
    match &set.form {
        Form::Explicit(r) if r.len() <= 64 => {
            let list: Vec<String> = r.iter().map(u64::to_string).collect();
            println!("residues {}", list.join(" "));
        }
        Form::Explicit(_) => {}
        Form::Compressed(c) => {
            let cyl: Vec<String> = c.cylinders.iter().map(u64::to_string).collect();
            println!("cylinders mod {}^{}: {}", set.p, c.e, cyl.join(" "));
            for b in &c.zeros {
                let path: Vec<String> = b.path.iter().map(u64::to_string).collect();
                println!("zero {}: path {} ({} subtrees)", b.i, path.join(" "), b.subtrees.len());
            }
        }
    }
    Ok(())
}

fn cmd_verify(ctx: &Ctx, p: u64, level: u32) -> Result<()> {
    let fast = tree::fast_attained(p, level)?;
    let brute = tree::brute_attained(p, level)?;
    let (fast_r, brute_r) = (fast.expand()?, brute.expand()?);
    let equal = fast_r == brute_r;
    let density = brute.density()?;
    if ctx.json {
        print_json(&json!({
            "p": p, "lambda": level, "equal": equal,
            "fast_count": fast_r.len(), "brute_count": brute_r.len(),
            "density": ctx.fraction_json(&density),
        }))?;
    } else if equal {
        println!("EQUAL, density {}", ctx.fraction(&density));
    } else {
        println!("DIFFERENT: fast {} residues, brute {}", fast_r.len(), brute_r.len());
    }
    if !equal {
        return Err(Error::Inconsistency(format!("fast and brute trees differ at p = {p}, level {level}")));
    }
    Ok(())
}

fn digits_string(digits: &[u64]) -> String {
    digits.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

fn cmd_interp(ctx: &Ctx, p: u64, n: u64, prec: u32) -> Result<()> {
    modfib::require_prime(p)?;
    let (value, index) = if p == 2 {
        let interp = Interpolation2::new(prec)?;
        (interp.eval_index(n)?, format!("({}, {})", n % 3, n % 2))
    } else {
        let pi = modfib::period_info(p)?.pi;
        let interp = Interpolation::new(p, prec)?;
        (interp.eval(n % pi, &PAdic::from_biguint(p, &BigUint::from(n), prec))?, (n % pi).to_string())
    };
    let modulus = BigUint::from(p).pow(prec);
    let (exact, _) = modfib::fib_pair_mod_big(&BigUint::from(n), &modulus)?;
    let exact = PAdic::from_biguint(p, &exact, prec);
    let agree = exact == value;
    if ctx.json {
        print_json(&json!({
            "p": p, "n": n, "prec": prec, "index": index,
            "interpolated": value.digits_a(), "exact": exact.digits_a(), "agree": agree,
        }))?;
    } else {
        println!("index        {index}");
        println!("interpolated {}", digits_string(&value.digits_a()));
        println!("exact        {}", digits_string(&exact.digits_a()));
        println!("agree        {}", if agree { "yes" } else { "no" });
    }
    if !agree {
        return Err(Error::Inconsistency(format!("interpolation disagrees with F({n}) mod {p}^{prec}")));
    }
    Ok(())
}

fn cmd_digits(ctx: &Ctx, p: u64, i: u64, depth: u32) -> Result<()> {
    let c = tree::branch_point(p, i, depth)?;
    let a = c.digits_a();
    let b = (!c.in_base_ring()).then(|| c.digits_b());
    if ctx.json {
        return print_json(&json!({ "p": p, "i": i, "depth": depth, "digits": a, "sqrt5_digits": b }));
    }
    match b {
        None => println!("{}", digits_string(&a)),
        Some(b) => {
            println!("rational {}", digits_string(&a));
            println!("sqrt5    {}", digits_string(&b));
        }
    }
    Ok(())
}

fn cmd_scan(ctx: &Ctx, args: &ScanArgs) -> Result<()> {
    let format = match args.format {
        Some(Format::Csv) => OutputFormat::Csv,
        Some(Format::Jsonl) => OutputFormat::Jsonl,
        None if ctx.json => OutputFormat::Jsonl,
        None => OutputFormat::Csv,
    };
    let opts = ScanOptions {
        workers: args.workers,
        checkpoint_every: args.every,
        max_e: args.max_e,
        record_timing: args.timing,
        checkpoint: args.resume.clone().or_else(|| args.checkpoint.clone()),
        resume: args.resume.is_some(),
        ..Default::default()
    };
    let mut sink: Box<dyn RecordSink> = match (&args.out, opts.resume) {
        (Some(path), true) => Box::new(FileSink::reopen(path, format)?),
        (Some(path), false) => Box::new(FileSink::create(path, format)?),
        (None, true) => return Err(Error::InvalidArgument("--resume needs --out".into())),
        (None, false) => Box::new(StreamSink::new(io::stdout().lock(), format)?),
    };
    let summary = scan::scan_range(args.lo, args.hi, sink.as_mut(), &opts)?;
    drop(sink);
    if ctx.json {
        eprintln!("{}", serde_json::to_string(&summary)?);
    } else {
        eprintln!("{} primes in [{}, {}]", summary.record_count, args.lo, args.hi);
        if let Some(m) = &summary.min {
            eprintln!("min dens({}) = {}", m.p, ctx.fraction(&m.dens));
        }
        if !summary.wss_hits.is_empty() {
            eprintln!("primes with e >= 2: {:?}", summary.wss_hits);
        }
        if !summary.cap_errors.is_empty() {
            eprintln!("Wall exponent above the cap at: {:?}", summary.cap_errors);
        }
    }
    Ok(())
}

fn cmd_wss(ctx: &Ctx, lo: u64, hi: u64) -> Result<()> {
    let hits = scan::wss_sweep(lo, hi)?;
    if ctx.json {
        return print_json(&json!({ "lo": lo, "hi": hi, "hits": serde_json::to_value(&hits)? }));
    }
    if hits.is_empty() {
        println!("no primes with e >= 2 in [{lo}, {hi}]");
    }
    for h in &hits {
        println!("p = {} has e = {}", h.p, h.e);
    }
    Ok(())
}

fn cmd_square_cal(ctx: &Ctx, p: u64, level: u32) -> Result<()> {
    let limit = density::square_density(p)?;
    let mut rows = Vec::new();
    let mut ok = true;
    for lambda in 0..=level {
        let brute = tree::brute_squares(p, lambda)?;
        let tree = tree::square_tree(p, lambda)?;
        let density = BigRational::new(BigInt::from(brute.len()), BigInt::from(p).pow(lambda));
        let matches = tree.expand()? == brute;
        ok &= matches && density >= limit;
        rows.push((lambda, brute.len(), density, matches));
    }
    if ctx.json {
        let rows: Vec<Value> = rows
            .iter()
            .map(|(l, c, d, m)| json!({ "lambda": l, "count": c, "density": ctx.fraction_json(d), "tree_matches": m }))
            .collect();
        print_json(&json!({ "p": p, "limit": ctx.fraction_json(&limit), "levels": rows, "ok": ok }))?;
    } else {
        for (l, c, d, m) in &rows {
            println!("{l:>3}  {c:>8}  {}  {}", ctx.fraction(d), if *m { "match" } else { "MISMATCH" });
        }
        println!("limit {}", ctx.fraction(&limit));
    }
    if !ok {
        return Err(Error::Inconsistency(format!("squares calibration failed at p = {p}")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if cli.inject_fault {
        return Err(Error::Inconsistency("injected fault".into()));
    }
    let ctx = Ctx { json: cli.json, float: cli.float, seed: cli.seed };
    match &cli.command {
        Command::Dens { p } => cmd_dens(&ctx, *p),
        Command::Table { upto } => cmd_table(&ctx, *upto),
        Command::Tree(args) => cmd_tree(&ctx, args),
        Command::Verify { p, level } => cmd_verify(&ctx, *p, *level),
        Command::Interp { p, n, prec } => cmd_interp(&ctx, *p, *n, *prec),
        Command::Digits { p, i, depth } => cmd_digits(&ctx, *p, *i, *depth),
        Command::Scan(args) => cmd_scan(&ctx, args),
        Command::Wss { lo, hi } => cmd_wss(&ctx, *lo, *hi),
        Command::SquareCal { p, level } => cmd_square_cal(&ctx, *p, *level),
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidArgument(_)
        | Error::Unsupported(_)
        | Error::Domain(_)
        | Error::Precision { .. }
        | Error::NoConvergence { .. } => 1,
        Error::ExponentCap { .. } | Error::Resource(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => 2,
        Error::Inconsistency(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
