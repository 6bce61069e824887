use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kfc_core::bicomplex::staircase_torus_knot;
use kfc_core::bounds::{
    crossing_change_bounds, m_t_charvec, m_t_class, tau_upper_bound, torus_upsilon, upsilon_lower_bound,
    HomologyClass,
};
use kfc_core::cobordism::{compose, grt_change, parse_pieces, closed_delta};
use kfc_core::t_modified::{upsilon_at, upsilon_at_lenient, upsilon_pl};
use kfc_core::verify::{self, Suite};
use kfc_core::{fmt_rational, parse_rational, tau, ChainComplexUV, CobordismTopology, Error, PlFunction, Rational, TParameter};

/// Knot Floer complexes: Upsilon, tau, and bounds from cobordisms.
#[derive(Parser)]
#[command(name = "kfc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Upsilon at one t, or as a piecewise-linear function.
    Upsilon {
        #[command(flatten)]
        input: KnotInput,
        /// Evaluate at this t (p/q in [0,2]).
        #[arg(long, conflicts_with_all = ["pl", "csv"], value_parser = rational)]
        at: Option<Rational>,
        /// Print the whole function (default).
        #[arg(long)]
        pl: bool,
        /// Denominator bound for the evaluation grid.
        #[arg(long = "Q", value_name = "N")]
        grid: Option<u64>,
        /// Sample the function at this step instead, as CSV.
        #[arg(long, value_name = "STEP", value_parser = rational)]
        csv: Option<Rational>,
        /// Accept complexes whose free rank is not one (reports the maximal grading).
        #[arg(long)]
        lenient: bool,
    },
    /// The tau invariant.
    Tau {
        #[command(flatten)]
        input: KnotInput,
    },
    /// M_t of a homology class.
    Mt {
        /// Coordinates s1,s2,... in an orthonormal basis.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "scalar", required_unless_present = "scalar")]
        class: Option<Vec<i64>>,
        #[arg(long, allow_hyphen_values = true)]
        scalar: Option<i64>,
        /// Maximize over characteristic vectors instead of summing coordinates.
        #[arg(long)]
        charvec: bool,
        #[arg(long, value_name = "STEP", value_parser = rational)]
        csv: Option<Rational>,
    },
    /// Lower bound for Upsilon of K2 from a surface in a negative-definite cobordism from K1.
    Bound {
        /// Upsilon of K1, as written by `upsilon --pl`.
        #[arg(long)]
        upsilon1: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "")]
        class: Vec<String>,
        #[arg(long, default_value_t = 0)]
        genus: u64,
        /// Also print the upper bound for tau(K2) given tau(K1).
        #[arg(long, value_parser = rational)]
        tau1: Option<Rational>,
        #[arg(long, value_name = "STEP", value_parser = rational)]
        csv: Option<Rational>,
    },
    /// Bounds for Upsilon of K- from Upsilon of K+ across a crossing change.
    Crossing {
        #[arg(long)]
        upsilon_plus: PathBuf,
    },
    /// Upsilon of a positive torus knot from the closed formulas.
    Torus { p: u64, q: u64 },
    /// Grading changes for a decorated link cobordism.
    Grading {
        #[arg(long, conflicts_with = "topology", required_unless_present = "topology")]
        pieces: Option<PathBuf>,
        #[arg(long)]
        topology: Option<PathBuf>,
        #[arg(long, value_parser = rational)]
        t: Option<Rational>,
    },
    /// Run a self-check suite.
    Verify {
        /// sharpness, mt, additivity, conjugation or all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Report every violated axiom of a complex.
    Validate { file: PathBuf },
    /// The conjugate complex (gradings and U, V exchanged).
    Conjugate { file: PathBuf },
    /// The staircase complex of T(p,q).
    Staircase { p: u32, q: u32 },
}

#[derive(Args)]
struct KnotInput {
    /// A kfc v1 file.
    #[arg(required_unless_present = "torus", conflicts_with = "torus")]
    file: Option<PathBuf>,
    /// Use the staircase complex of T(p,q).
    #[arg(long, num_args = 2, value_names = ["P", "Q"])]
    torus: Option<Vec<u32>>,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("`{s}` is not a rational p/q"))
}

enum Failure {
    Input(String),
    Domain(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Invalid(_) => Failure::Input(e.to_string()),
            Error::Verification(_) => Failure::Verification(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path, e: Error) -> Failure {
    match e {
        Error::Parse { line, msg } => Failure::Input(format!("{}:{line}: {msg}", path.display())),
        other => other.into(),
    }
}

fn load_complex(path: &Path) -> Result<ChainComplexUV, Failure> {
    ChainComplexUV::parse(&read(path)?).map_err(|e| in_file(path, e))
}

fn load_pl(path: &Path) -> Result<PlFunction, Failure> {
    read(path)?.parse().map_err(|e| in_file(path, e))
}

impl KnotInput {
    fn load(&self) -> Result<ChainComplexUV, Failure> {
        match (&self.file, &self.torus) {
            (_, Some(pq)) => Ok(staircase_torus_knot(pq[0], pq[1])?),
            (Some(f), None) => load_complex(f),
            (None, None) => unreachable!("clap requires one input"),
        }
    }
}

fn pl_output(f: &PlFunction, csv: Option<&Rational>) -> Result<String, Failure> {
    match csv {
        None => Ok(f.to_string()),
        Some(step) => {
            let mut out = String::from("t,value\n");
            for (t, v) in f.sample(step)? {
                out.push_str(&format!("{},{}\n", fmt_rational(&t), fmt_rational(&v)));
            }
            Ok(out)
        }
    }
}

fn class_arg(words: &[String]) -> Result<HomologyClass, Failure> {
    let coeffs = words
        .iter()
        .filter(|w| !w.is_empty())
        .map(|w| w.trim().parse().map_err(|_| Failure::Input(format!("`{w}` is not an integer"))))
        .collect::<Result<Vec<i64>, _>>()?;
    Ok(HomologyClass::new(coeffs))
}

fn run(cmd: Command) -> Result<String, Failure> {
    match cmd {
        Command::Upsilon { input, at, pl: _, grid, csv, lenient } => {
            let cx = input.load()?;
            match at {
                Some(t) => {
                    let t = TParameter::from_rational(&t)?;
                    if lenient {
                        let (v, knot_like) = upsilon_at_lenient(&cx, t)?;
                        if !knot_like {
                            eprintln!("warning: free rank is not one; reporting the maximal grading");
                        }
                        Ok(format!("{}\n", fmt_rational(&v)))
                    } else {
                        Ok(format!("{}\n", fmt_rational(&upsilon_at(&cx, t)?)))
                    }
                }
                None => pl_output(&upsilon_pl(&cx, grid)?, csv.as_ref()),
            }
        }
        Command::Tau { input } => Ok(format!("{}\n", fmt_rational(&tau(&input.load()?)?))),
        Command::Mt { class, scalar, charvec, csv } => {
            let s = HomologyClass::new(class.unwrap_or_else(|| vec![scalar.expect("clap requires one")]));
            let f = if charvec { m_t_charvec(&s) } else { m_t_class(&s) };
            pl_output(&f, csv.as_ref())
        }
        Command::Bound { upsilon1, class, genus, tau1, csv } => {
            let u1 = load_pl(&upsilon1)?;
            let s = class_arg(&class)?;
            let mut out = String::new();
            if let Some(t1) = tau1 {
                out.push_str(&format!("# tau <= {}\n", fmt_rational(&tau_upper_bound(&t1, &s, genus))));
            }
            out.push_str(&pl_output(&upsilon_lower_bound(&u1, &s, genus), csv.as_ref())?);
            Ok(out)
        }
        Command::Crossing { upsilon_plus } => {
            let (lo, hi) = crossing_change_bounds(&load_pl(&upsilon_plus)?);
            Ok(format!("# lower\n{lo}# upper\n{hi}"))
        }
        Command::Torus { p, q } => Ok(torus_upsilon(p, q)?.to_string()),
        Command::Grading { pieces, topology, t } => {
            let t = t.map(|t| TParameter::from_rational(&t)).transpose()?;
            let (delta, top) = match (pieces, topology) {
                (Some(path), _) => {
                    let list = parse_pieces(&read(&path)?).map_err(|e| in_file(&path, e))?;
                    compose(&list)?
                }
                (None, Some(path)) => {
                    let top = CobordismTopology::parse(&read(&path)?).map_err(|e| in_file(&path, e))?;
                    (closed_delta(&top), top)
                }
                (None, None) => unreachable!("clap requires one input"),
            };
            let mut out = format!("{delta}\n");
            if let Some(t) = t {
                let v = match grt_change(&top, t) {
                    Ok(v) => fmt_rational(&v),
                    Err(Error::Undefined(_)) => "undefined".into(),
                    Err(e) => return Err(e.into()),
                };
                out.push_str(&format!("dgr_t\t{v}\n"));
            }
            Ok(out)
        }
        Command::Verify { suite } => {
            let suites: Vec<Suite> = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![Suite::from_name(&suite).ok_or_else(|| Failure::Input(format!("unknown suite `{suite}`")))?]
            };
            let mut out = String::new();
            let mut ok = true;
            for s in suites {
                let r = verify::run(s);
                ok &= r.passed();
                out.push_str(&format!("{r}\n"));
            }
            if ok {
                Ok(out)
            } else {
                print!("{out}");
                Err(Failure::Verification("some checks failed".into()))
            }
        }
        Command::Validate { file } => {
            let text = read(&file)?;
            // structural errors surface here; axiom violations are listed
            let cx = ChainComplexUV::parse_unchecked(&text).map_err(|e| in_file(&file, e))?;
            let violations = cx.validate();
            if violations.is_empty() {
                Ok("valid\n".into())
            } else {
                let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                Err(Failure::Input(list.join("\n")))
            }
        }
        Command::Conjugate { file } => Ok(load_complex(&file)?.conjugate()?.to_kfc()),
        Command::Staircase { p, q } => Ok(staircase_torus_knot(p, q)?.to_kfc()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            let (code, msg) = match f {
                Failure::Input(m) => (2, m),
                Failure::Domain(m) => (3, m),
                Failure::Verification(m) => (4, m),
            };
            eprintln!("kfc: {msg}");
            ExitCode::from(code)
        }
    }
}
