use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use primegaps::admissible::{
    h_exact_small, is_admissible, read_tuple_file, sieve, write_residue_file, write_tuple_file, Shift, SieveConfig,
    SieveMethod,
};
use primegaps::bounds::{asymptotic_lower, bessel_lower, m2_eps, m2_exact, m4eps_check, AsymptoticParams, Tau};
use primegaps::cutoff3d::{polytope, verify_cutoff, verify_theorem_piece, Label, PiecewiseF};
use primegaps::pipeline::{
    audit_report, dhl_from_eps, dhl_from_marginal, dhl_from_mk, dhl_from_trunc, emit_report, full_theta, hm_from_dhl,
    read_bound_file, trunc_parameters, Claim, DhlRule, Hypothesis, Quantity,
};
use primegaps::rational::{fmt_rational, parse_rational, to_decimal};
use primegaps::varprob::{
    assemble_eps, assemble_plain_with, krylov_lower_bound, lower_bound, parse_certificate, verify_certificate,
    BoundCertificate,
};
use primegaps::{Rational, Real, DD};

const TOL: f64 = 1e-10;

#[derive(Parser)]
#[command(name = "primegaps", version, about = "Admissible tuples, certified sieve bounds and claim chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Admissible tuples
    #[command(subcommand)]
    Tuple(TupleCmd),
    /// Certified lower bounds for M_k
    #[command(subcommand)]
    Mk(MkCmd),
    /// Certified lower bounds for M_{k,eps}
    #[command(subcommand)]
    Mkeps(MkepsCmd),
    /// Re-check a certificate file exactly
    VerifyCert { file: PathBuf },
    /// Explicit lower bound for large k
    Asympt {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        theta: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        tau: Option<String>,
    },
    /// Closed form of M_2
    M2exact,
    /// M_{2,eps} from its defining equation
    M2eps {
        #[arg(long)]
        eps: String,
    },
    /// Four-dimensional linear cutoff, exactly
    M4eps {
        #[arg(long)]
        eps: String,
        #[arg(long)]
        alpha: String,
    },
    /// Bessel-zero lower bound for M_k
    Bessel {
        #[arg(long)]
        k: u64,
    },
    /// The three-dimensional piecewise cutoff
    #[command(subcommand)]
    Cutoff3d(CutoffCmd),
    /// Derive claims
    #[command(subcommand)]
    Chain(ChainCmd),
    /// Audit report files; fails unless every claim re-validates
    Report {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Subcommand)]
enum TupleCmd {
    /// Build a narrow admissible tuple
    Find {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "shifted-greedy")]
        method: String,
        /// A fixed shift, or `search`
        #[arg(long, default_value = "search")]
        shift: String,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value_t = 1)]
        batch: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Residue-class file, for the interval sieves
        #[arg(long)]
        residues: Option<PathBuf>,
    },
    Verify { file: PathBuf },
    /// Exact H(k) by exhaustive search
    Hsmall {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        dmax: i64,
    },
}

#[derive(Subcommand)]
enum MkCmd {
    Krylov {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Basis {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        full_signatures: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MkepsCmd {
    Basis {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CutoffCmd {
    /// Integrals, ratio and marginal identities of the built-in cutoff
    Verify,
    Eval {
        /// Piece label such as `A_xyz` or `G_zxy`
        #[arg(long)]
        piece: String,
        #[arg(long)]
        at: String,
    },
}

#[derive(Subcommand)]
enum ChainCmd {
    /// DHL[k, m+1] from a bound, then H_m from a tuple
    Hm(HmArgs),
}

#[derive(Args)]
struct HmArgs {
    #[arg(long)]
    dhl_rule: String,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    eps: Option<String>,
    /// `bv`, `eh` or `geh`; defaults to `eh`, or `geh` for the marginal rule
    #[arg(long)]
    hyp: Option<String>,
    /// Level for EH/GEH; defaults to just below 1
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    varpi: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    /// Relax the side condition of the eps rule to a non-strict inequality
    #[arg(long)]
    nonstrict: bool,
    #[arg(long)]
    cert: PathBuf,
    #[arg(long)]
    tuple: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn rat(s: &str) -> Result<Rational> {
    parse_rational(s).with_context(|| format!("bad number {s:?}"))
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_cert(cert: &BoundCertificate, out: &Option<PathBuf>) -> Result<ExitCode> {
    if let Some(p) = out {
        fs::write(p, cert.to_text())?;
    }
    println!("k = {}", cert.variant.k());
    println!("C = {}", fmt_rational(&cert.c));
    println!("C ~ {}", to_decimal(&cert.c, 9));
    println!("upper = {:.9}", cert.variant.upper_bound());
    println!("dim = {}", cert.a.len());
    println!("verified = {}", cert.verified);
    Ok(if cert.verified { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn tuple_cmd(cmd: TupleCmd) -> Result<ExitCode> {
    match cmd {
        TupleCmd::Find { k, method, shift, threads, batch, out, residues } => {
            let mut cfg = SieveConfig::new(method.parse()?);
            cfg.threads = threads;
            cfg.batch = batch;
            if matches!(cfg.method, SieveMethod::ShiftedSchinzel | SieveMethod::ShiftedGreedy) {
                cfg.shift = match shift.as_str() {
                    "search" => Shift::Search { range: None, stride: None },
                    s => Shift::Fixed(s.parse().with_context(|| format!("bad shift {s:?}"))?),
                };
            }
            let found = sieve(k, &cfg)?;
            println!("k = {k}");
            println!("diameter = {}", found.tuple.diameter());
            println!("admissible = {}", is_admissible(&found.tuple));
            if let Some(p) = out {
                write_tuple_file(p, &found.tuple)?;
            }
            if let Some(p) = residues {
                match &found.residues {
                    Some(r) => write_residue_file(p, r)?,
                    None => bail!("method {method} does not produce residue classes"),
                }
            }
        }
        TupleCmd::Verify { file } => {
            let t = read_tuple_file(&file)?;
            let ok = is_admissible(&t);
            println!("k = {}", t.k());
            println!("diameter = {}", t.diameter());
            println!("admissible = {ok}");
            if !ok {
                return Ok(ExitCode::FAILURE);
            }
        }
        TupleCmd::Hsmall { k, dmax } => println!("H({k}) = {}", h_exact_small(k, dmax)?),
    }
    Ok(ExitCode::SUCCESS)
}

fn cutoff_cmd(cmd: CutoffCmd) -> Result<ExitCode> {
    match cmd {
        CutoffCmd::Verify => {
            let r = verify_cutoff(&PiecewiseF::paper())?;
            println!("{r}");
            println!("J/I ~ {}", to_decimal(&(&r.j / &r.i), 15));
            let published = verify_theorem_piece().is_ok();
            println!("published = {}", if published { "match" } else { "MISMATCH" });
            Ok(if r.passed() && published { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        CutoffCmd::Eval { piece, at } => {
            let label = Label::parse(&piece)?;
            let coords: Vec<Rational> = at.split(',').map(|c| rat(c.trim())).collect::<Result<_>>()?;
            let [x, y, z]: [Rational; 3] = coords.try_into().map_err(|_| anyhow::anyhow!("--at needs x,y,z"))?;
            let v = [x, y, z];
            let f = PiecewiseF::paper();
            let value = f.on(label).eval(&v);
            println!("piece = {label}");
            println!("inside = {}", polytope(label, &f.eps).contains(&v));
            println!("F = {}", fmt_rational(&value));
            println!("F ~ {}", to_decimal(&value, 12));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn hypothesis(a: &HmArgs, rule: DhlRule) -> Result<Hypothesis> {
    let theta = a.theta.as_deref().map(rat).transpose()?.unwrap_or_else(full_theta);
    let default = if rule == DhlRule::Marginal { "geh" } else { "eh" };
    Ok(match a.hyp.as_deref().unwrap_or(default) {
        "bv" => Hypothesis::Bv,
        "eh" => Hypothesis::eh(theta)?,
        "geh" => Hypothesis::geh(theta)?,
        other => bail!("unknown hypothesis {other:?}"),
    })
}

fn chain_hm(a: HmArgs) -> Result<ExitCode> {
    let rule = DhlRule::parse(&a.dhl_rule)?;
    let bound = read_bound_file(&a.cert).with_context(|| format!("bound file {}", a.cert.display()))?;
    let tuple = read_tuple_file(&a.tuple).with_context(|| format!("tuple file {}", a.tuple.display()))?;
    let eps = || -> Result<Rational> { rat(a.eps.as_deref().context("--eps is required for this rule")?) };
    let dhl = match rule {
        DhlRule::Mk => dhl_from_mk(a.k, &bound, &hypothesis(&a, rule)?, a.m)?,
        DhlRule::Eps => dhl_from_eps(a.k, &eps()?, &bound, &hypothesis(&a, rule)?, a.m, a.nonstrict)?,
        DhlRule::Marginal => dhl_from_marginal(a.k, &eps()?, &bound, &hypothesis(&a, rule)?, a.m)?,
        DhlRule::Trunc => {
            let (varpi, delta) = match (&a.varpi, &a.delta) {
                (Some(w), Some(d)) => (rat(w)?, rat(d)?),
                (None, None) => match bound.quantity() {
                    Quantity::MkTrunc { t, .. } => trunc_parameters(a.m, bound.value(), t)?,
                    _ => bail!("rule trunc needs a bound on M_k^[T]"),
                },
                _ => bail!("give both --varpi and --delta, or neither"),
            };
            dhl_from_trunc(a.k, &bound, &varpi, &delta, a.m)?
        }
    };
    let claim = hm_from_dhl(&dhl, &tuple)?;
    eprintln!("{}", claim.statement());
    emit(&emit_report(&[Claim::Hm(claim)]), &a.out)?;
    Ok(ExitCode::SUCCESS)
}

fn report(files: Vec<PathBuf>) -> Result<ExitCode> {
    let mut ok = true;
    for f in files {
        let checked = fs::read_to_string(&f).map_err(anyhow::Error::from).and_then(|t| Ok(audit_report(&t)?));
        match checked {
            Ok(statements) => {
                println!("{}: ok, {} claims", f.display(), statements.len());
                for s in statements {
                    println!("  {s}");
                }
            }
            Err(e) => {
                println!("{}: FAILED: {e:#}", f.display());
                ok = false;
            }
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Tuple(c) => tuple_cmd(c),
        Command::Mk(MkCmd::Krylov { k, n, out }) => print_cert(&krylov_lower_bound(k, n, TOL)?, &out),
        Command::Mk(MkCmd::Basis { k, d, full_signatures, out }) => {
            print_cert(&lower_bound(&assemble_plain_with(k, d, full_signatures)?, TOL)?, &out)
        }
        Command::Mkeps(MkepsCmd::Basis { k, d, eps, out }) => {
            print_cert(&lower_bound(&assemble_eps(k, d, &rat(&eps)?)?, TOL)?, &out)
        }
        Command::VerifyCert { file } => {
            let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            print_cert(&verify_certificate(&parse_certificate(&text)?)?, &None)
        }
        Command::Asympt { k, theta, beta, tau } => {
            let dd = |s: &str| -> Result<DD> { Ok(DD::from_rational(&rat(s)?)) };
            let tau = match tau {
                Some(t) => Tau::Explicit(dd(&t)?),
                None => Tau::Derived,
            };
            let p = AsymptoticParams::from_theta_beta(k, dd(&theta)?, dd(&beta)?, tau);
            let r = asymptotic_lower(&p, DD::lit(1e-22))?;
            println!("k = {}", r.k);
            for (name, v) in [
                ("c", r.c),
                ("T", r.t),
                ("tau", r.tau),
                ("m2", r.m2),
                ("mu", r.mu),
                ("sigma2", r.sigma2),
                ("Z", r.z.value),
                ("Z3", r.z3.value),
                ("W", r.w.value),
                ("X", r.x),
                ("V", r.v.value),
                ("U", r.u),
                ("central", r.central),
                ("budget", r.budget),
                ("lower_bound", r.lower_bound),
            ] {
                println!("{name} = {v}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::M2exact => {
            println!("M2 = {}", m2_exact::<DD>());
            Ok(ExitCode::SUCCESS)
        }
        Command::M2eps { eps } => {
            println!("M2eps = {}", m2_eps(DD::from_rational(&rat(&eps)?))?);
            Ok(ExitCode::SUCCESS)
        }
        Command::M4eps { eps, alpha } => {
            let r = m4eps_check(&rat(&eps)?, &rat(&alpha)?)?;
            println!("I = {}", fmt_rational(&r.i));
            println!("I ~ {}", to_decimal(&r.i, 12));
            println!("J = {}", fmt_rational(&r.j));
            println!("J ~ {}", to_decimal(&r.j, 12));
            let four = Rational::from_integer(4.into()) * &r.j / &r.i;
            println!("4J/I ~ {}", to_decimal(&four, 12));
            println!("4J/I > 2.00558 = {}", r.ratio_ok);
            Ok(ExitCode::SUCCESS)
        }
        Command::Bessel { k } => {
            println!("bessel_lower = {}", bessel_lower::<DD>(k));
            Ok(ExitCode::SUCCESS)
        }
        Command::Cutoff3d(c) => cutoff_cmd(c),
        Command::Chain(ChainCmd::Hm(a)) => chain_hm(a),
        Command::Report { files } => report(files),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
