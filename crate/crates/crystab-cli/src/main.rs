//! `crystab`: JSON front end to the crystab library.
//!
//! Exit codes: 0 on success, 2 on domain or hypothesis errors, 3 on
//! precision errors, 64 on usage errors.

mod encode;
mod parse;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crystab::characters::{gauss_sum, CharacterPair, ContinuousCharacter};
use crystab::distributions::{amice, LocalDistribution};
use crystab::intertwine::{fil_condition_check, intertwine_closed, intertwine_oracle, transferred_distribution, ElementaryFunction};
use crystab::modcris::{build_D, classify_uw, dual_twist, module_level, weakly_admissible_irreducible, FilteredPhiModule, LineCheck};
use crystab::padic_core::scalar::is_odd_prime;
use crystab::padic_core::{parse_q, RootOfUnity};
use crystab::refinements::{emerton_sweep, jacquet_exponents, refinements_of, sigma, EmertonTables, TorusCharacter};
use crystab::series::{partial_fraction_residue, psi, psi_to_order};
use num_bigint::BigInt;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "crystab", version, about = "p-adic computations for crystabelian representations, with JSON output")]
struct Cli {
    /// The prime p (odd).
    #[arg(long, global = true, default_value_t = 3)]
    p: u32,
    /// Absolute p-adic precision of inputs.
    #[arg(long, global = true, env = "CRYSTAB_PREC", default_value_t = 20)]
    prec: i64,
    /// Worker threads for the library's parallel loops; never changes output.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct PairArgs {
    /// α as a smooth character, e.g. `ur(1/9)`.
    #[arg(long)]
    alpha: String,
    /// β as a smooth character.
    #[arg(long)]
    beta: String,
    /// The weight k ≥ 2.
    #[arg(long)]
    k: u32,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    /// A distribution as `{"level": h, "entries": [[...], ...]}`.
    #[arg(long, conflicts_with = "dirac")]
    dist: Option<String>,
    /// A Dirac mass at this rational point of Z_p.
    #[arg(long)]
    dirac: Option<String>,
    /// Level h for `--dirac`.
    #[arg(long, default_value_t = 1)]
    level: u32,
    /// Number of tracked moments for `--dirac`.
    #[arg(long, default_value_t = 4)]
    degree: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// G(τ, η) in L[X]/Φ_{p^n}.
    GaussSum {
        #[arg(long)]
        conductor: u32,
        /// τ as a smooth character, or `quadratic`.
        #[arg(long = "char")]
        character: String,
        /// Use η = ζ^j for the fixed primitive root ζ of order p^n (default j = 1).
        #[arg(long, default_value = "1")]
        root: String,
    },
    /// The smooth intertwining integral of 1_{c+p^nZ_p}·z^j·e^{2πizy}.
    Intertwine {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        center: String,
        #[arg(long, default_value_t = 0)]
        j: u32,
        /// Also evaluate the shell-by-shell sum and compare.
        #[arg(long)]
        oracle: bool,
    },
    /// The Amice transform of a distribution.
    Amice {
        #[command(flatten)]
        measure: MeasureArgs,
        /// Number of coefficients.
        #[arg(long, default_value_t = 8)]
        order: usize,
    },
    /// ψ of a power series.
    Psi {
        #[arg(long)]
        series: String,
        /// Number of output coefficients (default: all that are determined).
        #[arg(long)]
        order: Option<i64>,
    },
    /// Total residue of g(T)/∏(T − a_i)^{k_i}.
    Residue {
        #[arg(long)]
        g: String,
        /// A pole `a:k`; repeat for several.
        #[arg(long = "pole", required = true)]
        poles: Vec<String>,
    },
    /// Trianguline class from the invariants u and w.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        /// `inf` or a finite value.
        #[arg(long, default_value = "inf")]
        hbar: String,
    },
    /// Weak admissibility and irreducibility of D(α, β).
    CheckAdmissible {
        #[command(flatten)]
        pair: PairArgs,
        /// Level n of the coefficients (default: the conductor).
        #[arg(long)]
        n: Option<u32>,
    },
    /// The dual of D(α, β) and its comparison with D of the dual pair.
    Dual {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        n: Option<u32>,
    },
    /// The refinements R_α, R_β, their torus characters and the Jacquet exponents.
    Refinements {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, requires = "psi")]
        eta: Option<String>,
        #[arg(long, requires = "eta")]
        psi: Option<String>,
    },
    /// Compare dim Ref^{η⊗ψ}(V) with dim Exp^{η|x|⊗xψ}(B(V)_an ⊗ (x|x|∘det)).
    VerifyEmerton {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, required_unless_present = "sweep", requires = "psi")]
        eta: Option<String>,
        #[arg(long, required_unless_present = "sweep")]
        psi: Option<String>,
        /// Check every η ⊗ ψ from the standard test set instead.
        #[arg(long)]
        sweep: bool,
    },
    /// The filtration condition relating μ_α and μ_β at level m.
    FilCheck {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        measure: MeasureArgs,
        /// μ_β; defaults to the distribution transferred from μ_α.
        #[arg(long)]
        mu_beta: Option<String>,
        #[arg(long)]
        m: Option<u32>,
    },
}

enum Failure {
    Usage(String),
    Lib(crystab::Error),
}

impl From<crystab::Error> for Failure {
    fn from(e: crystab::Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Usage(e)
    }
}

type Outcome = std::result::Result<Value, Failure>;

fn exit_code(e: &crystab::Error) -> u8 {
    match e {
        crystab::Error::Precision(_) => 3,
        _ => 2,
    }
}

struct Ctx {
    p: u32,
    prec: i64,
}

impl Ctx {
    fn pair(&self, a: &PairArgs) -> std::result::Result<CharacterPair, Failure> {
        let alpha = parse::smooth_character(&a.alpha, self.p, self.prec)?;
        let beta = parse::smooth_character(&a.beta, self.p, self.prec)?;
        Ok(CharacterPair::new(alpha, beta, a.k)?)
    }

    fn measure(&self, m: &MeasureArgs, field: crystab::padic_core::Field) -> std::result::Result<LocalDistribution, Failure> {
        match (&m.dist, &m.dirac) {
            (Some(d), _) => Ok(parse::distribution(d, self.p, self.prec)?),
            (None, Some(c)) => Ok(LocalDistribution::dirac(field, &parse::rational(c)?, m.level, m.degree, self.prec)?),
            (None, None) => Err(Failure::Usage("give --dist or --dirac".into())),
        }
    }

    fn continuous(&self, s: &str) -> std::result::Result<ContinuousCharacter, Failure> {
        Ok(parse::continuous_character(s, self.p, self.prec)?)
    }
}

fn line_check(l: &LineCheck) -> Value {
    json!({
        "vector": l.vector.iter().map(encode::scalar).collect::<Vec<_>>(),
        "t_newton": encode::q(l.t_newton),
        "t_hodge": encode::q(l.t_hodge),
    })
}

fn module(d: &FilteredPhiModule) -> Value {
    let fil = d.filtration();
    let (lo, hi) = fil.jumps();
    json!({
        "level": d.level(),
        "phi": d.phi().iter().map(|r| r.iter().map(encode::scalar).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "jumps": [lo, hi],
        "line": fil.line.iter().map(encode::cyclo).collect::<Vec<_>>(),
    })
}

fn run(cli: &Cli) -> Outcome {
    let ctx = Ctx { p: cli.p, prec: cli.prec };
    let p = cli.p;
    match &cli.command {
        Command::GaussSum { conductor, character, root } => {
            let tau = parse::smooth_character(character, p, cli.prec)?;
            if tau.conductor() != *conductor {
                return Err(Failure::Usage(format!("character has conductor {}, not {conductor}", tau.conductor())));
            }
            let j: BigInt = root.parse().map_err(|_| format!("bad root exponent {root:?}"))?;
            let eta = RootOfUnity::new(p, *conductor, &j);
            let g = gauss_sum(&tau, &eta, cli.prec)?;
            Ok(json!({
                "value": encode::cyclo(&g),
                "square": encode::cyclo(&g.mul(&g)),
                "valuation": encode::q(g.val().lower_bound()),
            }))
        }
        Command::Intertwine { pair, n, y, center, j, oracle } => {
            let pair = ctx.pair(pair)?;
            let center: BigInt = center.parse().map_err(|_| format!("bad center {center:?}"))?;
            let h = ElementaryFunction::new(center, *n, *j, parse::rational(y)?)?;
            let (factor, f) = intertwine_closed(&h, &pair)?;
            let function = json!({
                "center": f.center().to_string(),
                "n": f.n(),
                "j": f.j(),
                "y": encode::rational(f.y()),
            });
            let mut out = json!({ "factor": encode::cyclo(&factor), "function": function });
            if *oracle {
                let (o, _) = intertwine_oracle(&h, &pair)?;
                out["agree"] = json!(o.eq_at_prec(&factor));
                out["oracle"] = encode::cyclo(&o);
            }
            Ok(out)
        }
        Command::Amice { measure, order } => {
            let mu = ctx.measure(measure, crystab::padic_core::Field::qp(p))?;
            Ok(encode::series(&amice(&mu, *order)?))
        }
        Command::Psi { series, order } => {
            let f = parse::series(series, p, cli.prec)?;
            let out = match order {
                Some(o) => psi_to_order(&f, *o)?,
                None => psi(&f)?,
            };
            Ok(encode::series(&out))
        }
        Command::Residue { g, poles } => {
            let g = parse::series(g, p, cli.prec)?;
            let poles = poles.iter().map(|s| parse::pole(s, p, cli.prec)).collect::<std::result::Result<Vec<_>, _>>()?;
            let r = partial_fraction_residue(&g, &poles)?;
            Ok(json!({ "residue": encode::scalar(&r), "prec": encode::q(r.abs_prec()) }))
        }
        Command::Classify { u, w, hbar } => {
            let u = parse_q(u).ok_or_else(|| format!("bad rational {u:?}"))?;
            let w = parse_q(w).ok_or_else(|| format!("bad rational {w:?}"))?;
            let infinite = match hbar.as_str() {
                "inf" | "infinity" | "∞" => true,
                other => {
                    parse::scalar(other, p, cli.prec)?;
                    false
                }
            };
            Ok(json!({ "class": classify_uw(u, w, infinite).to_string() }))
        }
        Command::CheckAdmissible { pair, n } => {
            let pair = ctx.pair(pair)?;
            let d = build_D(&pair, n.unwrap_or_else(|| module_level(&pair)))?;
            let r = weakly_admissible_irreducible(&d)?;
            Ok(json!({
                "admissible": r.admissible,
                "irreducible": r.irreducible,
                "convention_dependent": r.convention_dependent,
                "t_newton": encode::q(r.t_newton),
                "t_hodge": encode::q(r.t_hodge),
                "lines": r.lines.iter().map(line_check).collect::<Vec<_>>(),
                "witnesses": r.witnesses.iter().map(line_check).collect::<Vec<_>>(),
                "module": module(&d),
            }))
        }
        Command::Dual { pair, n } => {
            let pair = ctx.pair(pair)?;
            let r = dual_twist(&pair, n.unwrap_or_else(|| module_level(&pair)))?;
            Ok(json!({
                "dual": module(&r.dual),
                "twisted": module(&r.twisted),
                "dual_pair": {
                    "alpha": encode::smooth_character(r.dual_pair.alpha()),
                    "beta": encode::smooth_character(r.dual_pair.beta()),
                    "k": r.dual_pair.k(),
                },
                "mismatches": r.mismatches,
            }))
        }
        Command::Refinements { pair, eta, psi } => {
            let pair = ctx.pair(pair)?;
            let mut refs = Vec::new();
            for r in refinements_of(&pair)? {
                refs.push(json!({
                    "eta": encode::continuous_character(r.eta()),
                    "c": encode::scalar(r.c()),
                    "tag": r.tag().to_string(),
                    "sigma": encode::torus(&sigma(&r, &pair)?),
                }));
            }
            let exps = jacquet_exponents(&pair)?;
            let mut out = json!({
                "refinements": refs,
                "jacquet_exponents": exps.iter().map(encode::torus).collect::<Vec<_>>(),
            });
            if let (Some(e), Some(s)) = (eta, psi) {
                let target = TorusCharacter::new(ctx.continuous(e)?, ctx.continuous(s)?);
                out["dim_ref"] = json!(EmertonTables::new(&pair)?.dim_ref(&target));
            }
            Ok(out)
        }
        Command::VerifyEmerton { pair, eta, psi, sweep } => {
            let pair = ctx.pair(pair)?;
            if *sweep {
                let (checks, failures) = emerton_sweep(&pair)?;
                return Ok(json!({
                    "checks": checks,
                    "failures": failures
                        .iter()
                        .map(|(e, s, c)| json!({
                            "eta": encode::continuous_character(e),
                            "psi": encode::continuous_character(s),
                            "lhs": c.lhs,
                            "rhs": c.rhs,
                        }))
                        .collect::<Vec<_>>(),
                }));
            }
            let (Some(e), Some(s)) = (eta, psi) else {
                return Err(Failure::Usage("give --eta and --psi, or --sweep".into()));
            };
            let c = EmertonTables::new(&pair)?.check(&ctx.continuous(e)?, &ctx.continuous(s)?);
            Ok(json!({ "lhs": c.lhs, "rhs": c.rhs, "equal": c.equal }))
        }
        Command::FilCheck { pair, measure, mu_beta, m } => {
            let pair = ctx.pair(pair)?;
            let mu_a = ctx.measure(measure, pair.field())?;
            let mu_b = match mu_beta {
                Some(s) => parse::distribution(s, p, cli.prec)?,
                None => transferred_distribution(&mu_a, &pair)?,
            };
            let level = m.unwrap_or(mu_a.level());
            let r = fil_condition_check(&mu_a, &mu_b, &pair, level)?;
            Ok(json!({
                "holds": r.holds,
                "witnesses": r.witnesses,
                "mu_beta": encode::distribution(&mu_b),
            }))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if !is_odd_prime(cli.p) {
        eprintln!("error: p must be an odd prime, got {}", cli.p);
        return ExitCode::from(64);
    }
    if cli.prec < 1 {
        eprintln!("error: precision must be at least 1");
        return ExitCode::from(64);
    }
    if let Some(j) = cli.jobs {
        crystab::par::set_threads(j.max(1));
    }
    match run(&cli) {
        Ok(v) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(64)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
