//! Command-line front end.

pub mod expr;
pub mod json;

use std::io::BufRead;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use crate::canonicalize::{canonical_form, independence_rank};
use crate::cocycles::{
    admissible_tau, b3_to_sl2, slash_poly, B3Word, E2Cocycle, ModularForm, SL2Mat, XYPoly,
    DEFAULT_TERMS,
};
use crate::error::{Error, Result};
use crate::iterint::{bar_word, expand_combo, BarWord};
use crate::qseries::LogQSeries;
use crate::quasimodular::{basis_b, decompose, expand, BasisLetter, QMPoly};
use crate::shuffle_lyndon::{lyndon_words_weighted, Word};

use expr::{parse_form, parse_value, Value};

#[derive(Debug, Parser)]
#[command(
    name = "iterqm",
    version,
    about = "Iterated integrals of quasimodular forms"
)]
struct Cli {
    /// q-expansion truncation order
    #[arg(
        short = 'N',
        global = true,
        env = "ITERQM_DEFAULT_N",
        default_value_t = 50
    )]
    n: usize,
    /// JSON output
    #[arg(long, global = true, overrides_with = "text")]
    json: bool,
    /// plain-text output (default)
    #[arg(long, global = true, overrides_with = "json")]
    text: bool,
    /// tolerance used when reporting numerical checks
    #[arg(long, global = true, default_value_t = 1e-8)]
    precision: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// q-expansion of a quasimodular form
    Expand { expr: String },
    /// D = q d/dq of a form or of a combination of integrals
    Derive { expr: String },
    /// split a homogeneous form as c*E2 + modular + D(primitive)
    Decompose { expr: String },
    /// q/log q expansion of a combination of iterated integrals
    Integral { expr: String },
    /// rewrite in the Lyndon basis
    Canonical {
        expr: String,
        /// letters in E4, E6 only, with modular coefficients
        #[arg(long)]
        modular: bool,
    },
    /// Lyndon words over the Eisenstein basis
    Lyndon {
        #[arg(long)]
        max_weight: u32,
        #[arg(long)]
        max_len: usize,
        #[arg(long)]
        modular: bool,
    },
    /// rank of {m * I(w)} for words read from standard input, one per line
    Rank {
        /// multiplier forms (default 1); repeatable
        #[arg(long = "multiplier")]
        multipliers: Vec<String>,
    },
    /// numerical cocycle checks
    #[command(subcommand)]
    Cocycle(CocycleCommand),
}

#[derive(Debug, Subcommand)]
enum CocycleCommand {
    /// r_f(g1 g2) - r_f(g1)|g2 - r_f(g2) for words in S, T
    Check(CheckArgs),
    /// the period polynomial r_f(g)
    R(RArgs),
    /// the braid-group cocycle of E2
    E2(E2Args),
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// modular form of weight >= 4
    #[arg(long)]
    form: String,
    /// first word, e.g. "S T T"
    #[arg(long)]
    g1: String,
    /// second word
    #[arg(long)]
    g2: String,
}

#[derive(Debug, Args)]
struct RArgs {
    #[arg(long)]
    form: String,
    #[arg(long)]
    gamma: String,
    /// base point as re,im (chosen automatically if absent)
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
}

#[derive(Debug, Args)]
struct E2Args {
    /// braid word, e.g. "s1 s2^-1"
    word: String,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
}

fn parse_tau(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Error::Usage(format!("tau must be given as re,im; got {s:?}"));
    match parts.as_slice() {
        [re, im] => Ok(Complex64::new(
            re.parse().map_err(|_| bad())?,
            im.parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

fn split_letters(line: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in line.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&line[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&line[start..]);
    out
}

struct Ctx {
    n: usize,
    json: bool,
    precision: f64,
}

impl Ctx {
    fn series(&self, s: &LogQSeries) -> String {
        if self.json {
            json::series_to_json(s)
        } else {
            s.to_string()
        }
    }

    fn verdict(&self, err: f64) -> &'static str {
        if err <= self.precision {
            "ok"
        } else {
            "exceeds tolerance"
        }
    }
}

fn complex_json(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn poly_json(p: &XYPoly) -> serde_json::Value {
    p.coeffs.iter().map(|&z| complex_json(z)).collect()
}

fn pick_tau(g: &SL2Mat, given: Option<&str>) -> Result<Complex64> {
    match given {
        Some(s) => parse_tau(s),
        None => admissible_tau(g).ok_or_else(|| {
            Error::Precondition(format!("no base point with imaginary parts >= 0.2 for {g}"))
        }),
    }
}

fn cocycle(ctx: &Ctx, cmd: &CocycleCommand) -> Result<String> {
    match cmd {
        CocycleCommand::Check(a) => {
            let f = ModularForm::new(&parse_form(&a.form)?, DEFAULT_TERMS)?;
            let g1 = SL2Mat::from_st_word(&a.g1)?;
            let g2 = SL2Mat::from_st_word(&a.g2)?;
            let g = g1.mul(&g2);
            let r = |m: &SL2Mat| f.cocycle(m, pick_tau(m, None)?);
            let lhs = r(&g)?;
            let rhs = slash_poly(&r(&g1)?, &g2).add(&r(&g2)?);
            let err = lhs.sub(&rhs).max_norm();
            Ok(if ctx.json {
                json!({
                    "gamma": g.to_string(),
                    "error": err,
                    "tolerance": ctx.precision,
                    "ok": err <= ctx.precision,
                })
                .to_string()
            } else {
                format!(
                    "gamma = {g}\nerror {err:.3e} (tolerance {:e}): {}",
                    ctx.precision,
                    ctx.verdict(err)
                )
            })
        }
        CocycleCommand::R(a) => {
            let f = ModularForm::new(&parse_form(&a.form)?, DEFAULT_TERMS)?;
            let g = SL2Mat::from_st_word(&a.gamma)?;
            let tau = pick_tau(&g, a.tau.as_deref())?;
            let p = f.cocycle(&g, tau)?;
            Ok(if ctx.json {
                json!({"gamma": g.to_string(), "tau": complex_json(tau), "coeffs": poly_json(&p)})
                    .to_string()
            } else {
                p.to_string()
            })
        }
        CocycleCommand::E2(a) => {
            let w: B3Word = a.word.parse()?;
            let g = b3_to_sl2(&w);
            let tau = pick_tau(&g, a.tau.as_deref())?;
            let v = E2Cocycle::new(DEFAULT_TERMS).value(&w, tau)?;
            let k = v.im / (2.0 * std::f64::consts::PI);
            let dist = (v - Complex64::new(0.0, 2.0 * std::f64::consts::PI * k.round())).norm();
            Ok(if ctx.json {
                json!({
                    "value": complex_json(v),
                    "multiple_of_2pi_i": k.round(),
                    "distance": dist,
                    "tolerance": ctx.precision,
                    "ok": dist <= ctx.precision,
                })
                .to_string()
            } else {
                format!(
                    "{:.12}{:+.12}i = {}*2*pi*i (distance {dist:.3e}, tolerance {:e}): {}",
                    v.re,
                    v.im,
                    k.round(),
                    ctx.precision,
                    ctx.verdict(dist)
                )
            })
        }
    }
}

fn lyndon_table(max_weight: u32, max_len: usize, modular: bool) -> Vec<Word<BasisLetter>> {
    let basis = basis_b(max_weight, modular);
    let mut words = lyndon_words_weighted(&basis.letters, max_len, |l| l.weight(), max_weight);
    words.sort_by_key(|w| {
        (
            w.0.iter().map(BasisLetter::weight).sum::<u32>(),
            w.len(),
            w.clone(),
        )
    });
    words
}

fn execute(cli: Cli, stdin: &mut dyn BufRead) -> Result<String> {
    let ctx = Ctx {
        n: cli.n,
        json: cli.json,
        precision: cli.precision,
    };
    match cli.command {
        Command::Expand { expr } => {
            let p = parse_form(&expr)?;
            Ok(ctx.series(&LogQSeries::from_qseries(expand(&p, ctx.n))))
        }
        Command::Derive { expr } => Ok(match parse_value(&expr)? {
            Value::Form(p) => {
                let d = p.derive();
                if ctx.json {
                    json!({ "form": d.to_string() }).to_string()
                } else {
                    d.to_string()
                }
            }
            Value::Combo(c) => {
                let d = c.derive();
                if ctx.json {
                    json!({ "combination": d.to_string() }).to_string()
                } else {
                    d.to_string()
                }
            }
        }),
        Command::Decompose { expr } => {
            let d = decompose(&parse_form(&expr)?)?;
            Ok(if ctx.json {
                json!({
                    "e2_coeff": d.e2_coeff.to_string(),
                    "modular": d.modular.to_string(),
                    "primitive": d.primitive.to_string(),
                })
                .to_string()
            } else {
                format!(
                    "E2 coefficient: {}\nmodular: {}\nprimitive: {}",
                    d.e2_coeff, d.modular, d.primitive
                )
            })
        }
        Command::Integral { expr } => {
            let c = parse_value(&expr)?.into_combo();
            Ok(ctx.series(&expand_combo(&c, ctx.n)))
        }
        Command::Canonical { expr, modular } => {
            let c = canonical_form(&parse_value(&expr)?.into_combo(), modular)?;
            Ok(if ctx.json {
                json::canonical_to_json(&c)
            } else {
                c.to_string()
            })
        }
        Command::Lyndon {
            max_weight,
            max_len,
            modular,
        } => {
            let words = lyndon_table(max_weight, max_len, modular);
            Ok(if ctx.json {
                let list: Vec<Vec<String>> = words
                    .iter()
                    .map(|w| w.0.iter().map(|l| l.to_string()).collect())
                    .collect();
                serde_json::to_string(&list).expect("serializable")
            } else {
                words
                    .iter()
                    .map(|w| crate::iterint::format_integral(w.0.iter().map(|l| l.to_string())))
                    .collect::<Vec<_>>()
                    .join("\n")
            })
        }
        Command::Rank { multipliers } => {
            let multipliers = if multipliers.is_empty() {
                vec![QMPoly::constant(crate::qseries::int(1))]
            } else {
                multipliers
                    .iter()
                    .map(|m| parse_form(m))
                    .collect::<Result<Vec<_>>>()?
            };
            let mut words: Vec<BarWord> = Vec::new();
            for line in stdin.lines() {
                let line =
                    line.map_err(|e| Error::Usage(format!("reading standard input: {e}")))?;
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                let letters = split_letters(line)
                    .into_iter()
                    .map(parse_form)
                    .collect::<Result<Vec<_>>>()?;
                words.push(bar_word(letters));
            }
            let size = words.len() * multipliers.len();
            let rank = independence_rank(&words, &multipliers, ctx.n)?;
            Ok(if ctx.json {
                json!({ "rank": rank, "size": size }).to_string()
            } else {
                format!("rank {rank} of {size}")
            })
        }
        Command::Cocycle(cmd) => cocycle(&ctx, &cmd),
    }
}

/// Runs one command; `args` includes the program name. Returns the text to print.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead) -> Result<String>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Ok(e.render().to_string().trim_end().to_string())
                }
                _ => Err(Error::Usage(e.render().to_string().trim_end().to_string())),
            };
        }
    };
    execute(cli, stdin)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_ok(args: &[&str]) -> String {
        let mut input: &[u8] = b"";
        run(
            std::iter::once("iterqm").chain(args.iter().copied()),
            &mut input,
        )
        .unwrap()
    }

    #[test]
    fn documented_outputs() {
        assert_eq!(
            run_ok(&["expand", "E4^3-E6^2", "-N", "2"]),
            "1728*q - 41472*q^2"
        );
        assert_eq!(run_ok(&["integral", "I(1)", "-N", "1"]), "-L");
    }

    #[test]
    fn lyndon_listing() {
        let out = run_ok(&["lyndon", "--max-weight", "6", "--max-len", "2"]);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(
            lines,
            ["I(1)", "I(E2)", "I(1,E2)", "I(E4)", "I(1,E4)", "I(E6)", "I(1,E6)", "I(E2,E4)"]
        );
        let out = run_ok(&["lyndon", "--max-weight", "8", "--max-len", "1", "--modular"]);
        assert_eq!(out, "I(1)\nI(E4)\nI(E6)\nI(E4^2)");
    }

    #[test]
    fn other_commands() {
        assert_eq!(run_ok(&["derive", "E4"]), "1/3*E2*E4 - 1/3*E6");
        assert_eq!(
            run_ok(&["decompose", "E2^2"]),
            "E2 coefficient: 0\nmodular: E4\nprimitive: 12*E2"
        );
        assert_eq!(run_ok(&["canonical", "I(E4,1)"]), "-I(1,E4) + I(1)*I(E4)");
        assert_eq!(run_ok(&["derive", "I(E4,1)"]), "(-E4)*I(1)");
        assert_eq!(
            run_ok(&["--json", "integral", "I(1,1)", "-N", "1"]),
            r#"{"truncation":1,"terms":[{"q":0,"logq":2,"coeff":"1/2"}]}"#
        );
        assert!(run_ok(&["--help"]).contains("Usage"));
    }

    #[test]
    fn rank_from_stdin() {
        let mut input: &[u8] = b"E4\n1,E4\n\nE4,1\n";
        let out = run(["iterqm", "rank", "-N", "10"], &mut input).unwrap();
        assert_eq!(out, "rank 3 of 3");
        let mut input: &[u8] = b"E4\n";
        let out = run(
            [
                "iterqm",
                "rank",
                "--multiplier",
                "1",
                "--multiplier",
                "E4",
                "--json",
            ],
            &mut input,
        )
        .unwrap();
        assert_eq!(out, r#"{"rank":2,"size":2}"#);
    }

    #[test]
    fn cocycle_commands() {
        let out = run_ok(&["cocycle", "e2", "s1", "--tau", "0.1,1.0"]);
        assert!(out.contains("= -1*2*pi*i") && out.ends_with("ok"), "{out}");
        let out = run_ok(&[
            "cocycle", "check", "--form", "E4", "--g1", "S T", "--g2", "T S",
        ]);
        assert!(out.ends_with("ok"), "{out}");
        let out = run_ok(&[
            "--json", "cocycle", "r", "--form", "E4", "--gamma", "S", "--tau", "0,1",
        ]);
        assert!(out.contains("\"coeffs\""), "{out}");
    }

    #[test]
    fn errors() {
        let mut input: &[u8] = b"";
        for args in [
            vec!["iterqm", "expand", "I(E4)"],
            vec!["iterqm", "expand", "E4 +"],
            vec!["iterqm", "canonical", "I(E2)", "--modular"],
            vec!["iterqm", "frobnicate"],
            vec!["iterqm", "cocycle", "r", "--form", "E2", "--gamma", "S"],
            vec!["iterqm", "cocycle", "e2", "s1", "--tau", "0,0.1"],
        ] {
            assert!(run(args.clone(), &mut input).is_err(), "{args:?}");
        }
    }
}
