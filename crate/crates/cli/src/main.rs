//! Command-line front end: m-function tables, algebra reports, criteria,
//! and the database scan.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use loewy::algebra::{Algebra, AlgebraParams, OrbitRow, Witness};
use loewy::arith::{self, Nat, Word};
use loewy::criteria::{self, CriterionVerdict, ReductionTargets};
use loewy::database::{self, ScanConfig};
use loewy::invariants;
use loewy::mfunc::{self, MResult};
use loewy::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "loewy", version, about = "Loewy lengths of the algebras A(q,n,e)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The minimal digit sum m(q,e)
    M(MArgs),
    /// Table of m(q,e), or the residues modulo one e grouped by m
    Mtable(MtableArgs),
    /// Loewy data of A[q,n,z]
    Algebra(AlgebraArgs),
    /// Closed-form criteria that apply to A(q,n,e)
    Criteria(CriteriaArgs),
    /// Compute all classes A[q,n,z] for z in a range into a JSONL file
    Scan(ScanArgs),
    /// Summary counts of a scan file
    Stats(StatsArgs),
    /// Group the classes of one z by Loewy vector and compare invariants
    Screen(ScreenArgs),
    /// Recompute a random sample of a scan file
    Verify(VerifyArgs),
}

/// A(q,n,e) given by e or by z = (q^n − 1)/e.
#[derive(Args, Debug)]
struct Target {
    /// Base q, at least 2
    #[arg(long)]
    q: Word,
    /// Number of variables; defaults to the order of q
    #[arg(long)]
    n: Option<Word>,
    /// Modulus e as a decimal integer of any length
    #[arg(long)]
    e: Option<Nat>,
    /// Codimension parameter z = (q^n - 1)/e
    #[arg(long)]
    z: Option<Word>,
}

#[derive(Args, Debug)]
struct MArgs {
    #[command(flatten)]
    target: Target,
    /// Print the value of the first applicable closed form as well
    #[arg(long)]
    closed_form: bool,
    /// Print one JSON object instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct MtableArgs {
    /// Smallest base
    #[arg(long, default_value_t = 2)]
    qmin: Word,
    /// Largest base
    #[arg(long, default_value_t = 30)]
    qmax: Word,
    /// Smallest modulus
    #[arg(long, default_value_t = 2)]
    emin: Word,
    /// Largest modulus
    #[arg(long, default_value_t = 30)]
    emax: Word,
    /// Group the residues modulo this e by m instead
    #[arg(long)]
    e: Option<Word>,
    /// With --e, keep one generator per cyclic subgroup
    #[arg(long)]
    generators: bool,
    /// Print the table as CSV
    #[arg(long)]
    csv: bool,
}

#[derive(Args, Debug)]
struct AlgebraArgs {
    #[command(flatten)]
    target: Target,
    /// Orbit table and degree histogram
    #[arg(long)]
    report: bool,
    /// Factorization of b_z into a longest product of basis elements
    #[arg(long)]
    witness: bool,
    /// Isomorphism invariants over the given primes
    #[arg(long, value_delimiter = ',')]
    invariants: Option<Vec<Word>>,
    /// Print one JSON object instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct CriteriaArgs {
    #[command(flatten)]
    target: Target,
    /// Also print the finite reduction for the pair (q,e)
    #[arg(long)]
    targets: bool,
    /// Print one JSON object instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Smallest z
    #[arg(long)]
    zmin: Word,
    /// Largest z
    #[arg(long)]
    zmax: Word,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// JSONL output; an existing partial file is extended
    #[arg(long)]
    out: PathBuf,
    /// Also write the CSV projection to this path
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Record wall-clock times in runtime_ms
    #[arg(long)]
    timing: bool,
    /// Largest residue table in entries
    #[arg(long, default_value_t = loewy::algebra::DEFAULT_TABLE_CAP)]
    table_cap: Word,
}

#[derive(Args, Debug)]
struct StatsArgs {
    /// JSONL file written by scan
    #[arg(long = "in")]
    input: PathBuf,
    /// Smallest z
    #[arg(long, requires = "zmax")]
    zmin: Option<Word>,
    /// Largest z
    #[arg(long, requires = "zmin")]
    zmax: Option<Word>,
}

#[derive(Args, Debug)]
struct ScreenArgs {
    /// JSONL file written by scan
    #[arg(long = "in")]
    input: PathBuf,
    /// The z whose classes are screened
    #[arg(long)]
    z: Word,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// JSONL file written by scan
    #[arg(long = "in")]
    input: PathBuf,
    /// Number of records to recompute
    #[arg(long, default_value_t = 100)]
    sample: usize,
    /// Seed of the sampling generator
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

struct Resolved {
    q: Word,
    n: Word,
    e: Nat,
    z: Option<Word>,
}

impl Target {
    fn echo(&self) -> String {
        let mut s = format!("q={}", self.q);
        if let Some(n) = self.n {
            s += &format!(" n={n}");
        }
        if let Some(e) = &self.e {
            s += &format!(" e={e}");
        }
        if let Some(z) = self.z {
            s += &format!(" z={z}");
        }
        s
    }

    fn resolve(&self) -> Result<Resolved> {
        let q = self.q;
        if q < 2 {
            return Err(Error::InvalidBase(q));
        }
        match (&self.e, self.z) {
            (None, None) => Err(Error::InvalidArgument("one of --e and --z is required".into())),
            (Some(e), z) => {
                let n = match self.n {
                    Some(n) => n,
                    None => {
                        let ew = arith::to_word(e)
                            .ok_or_else(|| Error::InvalidArgument("--n is required for this e".into()))?;
                        arith::mult_order(q, ew)?
                    }
                };
                let z_calc = match arith::z_from_e(q, n, e) {
                    Ok(x) => Some(x),
                    Err(err) if err.is_capacity() => None,
                    Err(err) => return Err(err),
                };
                if let Some(z) = z {
                    if z_calc != Some(z) {
                        return Err(Error::InvalidArgument(format!("--z {z} is inconsistent with --e {e}")));
                    }
                }
                Ok(Resolved { q, n, e: e.clone(), z: z_calc })
            }
            (None, Some(z)) => {
                let n = match self.n {
                    Some(n) => n,
                    None => arith::mult_order(q, z)?,
                };
                Ok(Resolved { q, n, e: arith::e_from_z(q, n, z)?, z: Some(z) })
            }
        }
    }

    fn params(&self) -> Result<AlgebraParams> {
        let r = self.resolve()?;
        let z = r.z.ok_or_else(|| Error::Capacity(format!("z = (q^n - 1)/{} exceeds a word", r.e)))?;
        AlgebraParams::new(r.q, r.n, z)
    }
}

fn echo(cmd: &Command) -> String {
    let rest = match cmd {
        Command::M(a) => format!("m {}", a.target.echo()),
        Command::Mtable(a) => match a.e {
            Some(e) => format!("mtable e={e} generators={}", a.generators),
            None => format!("mtable q={}..{} e={}..{}", a.qmin, a.qmax, a.emin, a.emax),
        },
        Command::Algebra(a) => format!("algebra {}", a.target.echo()),
        Command::Criteria(a) => format!("criteria {}", a.target.echo()),
        Command::Scan(a) => format!("scan z={}..{} jobs={} out={}", a.zmin, a.zmax, a.jobs, a.out.display()),
        Command::Stats(a) => format!("stats in={}", a.input.display()),
        Command::Screen(a) => format!("screen in={} z={}", a.input.display(), a.z),
        Command::Verify(a) => format!("verify in={} sample={} seed={}", a.input.display(), a.sample, a.seed),
    };
    format!("# loewy {rest}")
}

fn print_json<T: Serialize>(x: &T) {
    println!("{}", serde_json::to_string(x).expect("serializable"));
}

fn witness_text(w: &[(Word, Word)]) -> String {
    let parts: Vec<String> = w.iter().map(|(i, c)| format!("{c}*q^{i}")).collect();
    parts.join(" + ")
}

fn run_m(a: &MArgs) -> Result<()> {
    let r = a.target.resolve()?;
    let res: MResult = match (a.target.e.is_some(), r.z) {
        (false, Some(z)) => mfunc::m_via_z(r.q, r.n, z)?,
        _ => mfunc::m_auto(r.q, Some(r.n), &r.e)?,
    };
    let closed = match (a.closed_form, arith::to_word(&r.e)) {
        (true, Some(ew)) => mfunc::m_closed_form(r.q, ew)?,
        _ => None,
    };
    if a.json {
        #[derive(Serialize)]
        struct Out<'a> {
            q: Word,
            e: String,
            result: &'a MResult,
            closed_form: Option<&'a MResult>,
        }
        print_json(&Out { q: r.q, e: r.e.to_string(), result: &res, closed_form: closed.as_ref() });
        return Ok(());
    }
    println!("m = {}", res.m);
    println!("method = {}", serde_json::to_string(&res.method).expect("serializable").trim_matches('"'));
    if let Some(k) = res.k {
        println!("k = {k}");
    }
    if let Some(w) = &res.witness {
        println!("witness = {}", witness_text(w));
    }
    if let Some(c) = closed {
        println!("closed_form = {} ({:?})", c.m, c.method);
    }
    Ok(())
}

fn run_mtable(a: &MtableArgs) -> Result<()> {
    if let Some(e) = a.e {
        println!("{}", mfunc::group_by_m(e, a.generators)?);
        return Ok(());
    }
    let t = mfunc::emit_m_table(a.qmin..=a.qmax, a.emin..=a.emax)?;
    if a.csv {
        print!("{}", t.to_csv());
        return Ok(());
    }
    let head: Vec<String> = t.es.iter().map(|e| format!("{e:>3}")).collect();
    println!("q\\e {}", head.join(""));
    for (q, row) in t.qs.iter().zip(&t.cells) {
        let cells: Vec<String> = row.iter().map(|c| c.map_or("  .".into(), |m| format!("{m:>3}"))).collect();
        println!("{q:>3} {}", cells.join(""));
    }
    Ok(())
}

#[derive(Serialize)]
struct AlgebraOut {
    q: Word,
    n: Word,
    z: Word,
    e: String,
    dim: Word,
    m: Word,
    ll: Word,
    bound: Word,
    gap: Word,
    loewy_vector: Vec<Word>,
    #[serde(skip_serializing_if = "Option::is_none")]
    orbits: Option<Vec<OrbitRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree_histogram: Option<Vec<(Word, Word)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    invariants: Option<std::collections::BTreeMap<String, String>>,
}

fn run_algebra(a: &AlgebraArgs) -> Result<()> {
    let alg = Algebra::with_params(a.target.params()?, loewy::algebra::DEFAULT_TABLE_CAP)?;
    let profile = alg.loewy_profile();
    let b = alg.bound_report(&profile);
    let mut out = AlgebraOut {
        q: alg.q(),
        n: alg.n(),
        z: alg.z(),
        e: alg.e().to_string(),
        dim: alg.z() + 1,
        m: b.m,
        ll: b.ll,
        bound: b.bound,
        gap: b.gap,
        loewy_vector: profile.loewy_vector.clone(),
        orbits: None,
        degree_histogram: None,
        witness: None,
        invariants: None,
    };
    if a.report {
        out.orbits = Some(alg.orbit_report());
        out.degree_histogram = Some(alg.degree_histogram().into_iter().collect());
    }
    if a.witness {
        out.witness = Some(alg.witness(&profile, alg.z())?);
    }
    if let Some(primes) = &a.invariants {
        out.invariants = Some(invariants::invariant_report(&alg, &profile, primes)?.entries);
    }
    if a.json {
        print_json(&out);
        return Ok(());
    }
    let lv: Vec<String> = out.loewy_vector.iter().map(|c| c.to_string()).collect();
    println!("e = {}", out.e);
    println!("dim = {}", out.dim);
    println!("m = {}", out.m);
    println!("LL = {}", out.ll);
    println!("bound = {}", out.bound);
    println!("gap = {}", out.gap);
    println!("loewy_vector = ({})", lv.join(","));
    if let Some(orbits) = &out.orbits {
        println!("orbits:");
        println!("{:>8} {:>6} {:>6}  exponents", "k", "length", "degree");
        for o in orbits {
            let ex: Vec<String> = o.exponents.iter().map(|x| x.to_string()).collect();
            println!("{:>8} {:>6} {:>6}  ({})", o.k, o.length, o.degree, ex.join(","));
        }
    }
    if let Some(h) = &out.degree_histogram {
        let parts: Vec<String> = h.iter().map(|(d, c)| format!("{d}:{c}")).collect();
        println!("degree_histogram = {}", parts.join(" "));
    }
    if let Some(w) = &out.witness {
        println!("witness for b_{} ({} factors):", w.target, w.len());
        print!("{w}");
    }
    if let Some(inv) = &out.invariants {
        for (k, v) in inv {
            println!("{k}={v}");
        }
    }
    Ok(())
}

fn run_criteria(a: &CriteriaArgs) -> Result<()> {
    let r = a.target.resolve()?;
    let verdicts: Vec<CriterionVerdict> = criteria::evaluate_criteria(r.q, r.n, &r.e)?;
    let targets: Option<ReductionTargets> = match (a.targets, arith::to_word(&r.e)) {
        (true, Some(ew)) => Some(criteria::reduction_targets(r.q, ew)?),
        (true, None) => return Err(Error::Capacity("reduction targets need e to fit a word".into())),
        _ => None,
    };
    if a.json {
        #[derive(Serialize)]
        struct Out<'a> {
            verdicts: &'a [CriterionVerdict],
            targets: Option<&'a ReductionTargets>,
        }
        print_json(&Out { verdicts: &verdicts, targets: targets.as_ref() });
        return Ok(());
    }
    if verdicts.is_empty() {
        println!("no criterion applies");
    }
    for v in &verdicts {
        println!("{v}");
    }
    if let Some(t) = targets {
        println!("reduction: m={} ord={} n_max={} q_cap={} check_n={:?}", t.m, t.ord, t.n_max, t.q_cap, t.check_n);
    }
    Ok(())
}

fn run_scan(a: &ScanArgs) -> Result<()> {
    let cfg = ScanConfig { jobs: a.jobs, timing: a.timing, table_cap: a.table_cap, ..ScanConfig::new(a.zmin, a.zmax, &a.out) };
    let o = database::scan(&cfg)?;
    println!("resumed = {}", o.resumed);
    println!("written = {}", o.written);
    println!("error_rows = {}", o.errors);
    if let Some(csv) = &a.csv {
        println!("csv_rows = {}", database::write_csv(&a.out, csv)?);
    }
    Ok(())
}

fn run_stats(a: &StatsArgs) -> Result<()> {
    let rows = database::read_rows(&a.input)?;
    let range = a.zmin.zip(a.zmax);
    print!("{}", database::stats(&rows, range)?);
    Ok(())
}

fn run_screen(a: &ScreenArgs) -> Result<()> {
    let rows = database::read_rows(&a.input)?;
    print!("{}", database::isomorphism_screen(&rows, a.z)?);
    Ok(())
}

fn run_verify(a: &VerifyArgs) -> Result<bool> {
    let rows = database::read_rows(&a.input)?;
    let rep = database::verify(&rows, a.sample, a.seed)?;
    println!("checked = {}", rep.checked);
    println!("mismatches = {}", rep.mismatches.len());
    for m in &rep.mismatches {
        println!("{m}");
    }
    Ok(rep.mismatches.is_empty())
}

fn run(cmd: &Command) -> Result<bool> {
    match cmd {
        Command::M(a) => run_m(a)?,
        Command::Mtable(a) => run_mtable(a)?,
        Command::Algebra(a) => run_algebra(a)?,
        Command::Criteria(a) => run_criteria(a)?,
        Command::Scan(a) => run_scan(a)?,
        Command::Stats(a) => run_stats(a)?,
        Command::Screen(a) => run_screen(a)?,
        Command::Verify(a) => return run_verify(a),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    println!("{}", echo(&cli.command));
    match run(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_capacity() { 2 } else { 1 })
        }
    }
}
