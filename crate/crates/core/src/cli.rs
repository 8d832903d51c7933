//! Command-line surface. Every command prints one JSON document with sorted
//! keys and `"schema": 1`; exit codes are 0 (pass), 1 (a check failed) and
//! 2 (usage or configuration error).

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::burnside::law_sweep;
use crate::phi::{khovanov_f2, verify_multifunctor, VerifyBounds};
use crate::planar::{circles, enumerate_matchings, parse_diagram, Matching};
use crate::qgroup::{check_all, solve_all, FAMILIES};
use crate::ring::{Ring, F2};
use crate::signed::{verify_signed_multifunctor, SignOracle, WeightSeq};
use crate::tqft::{multiply_n, Cob, DiskElement};

#[derive(Parser, Debug)]
#[command(name = "arcalg", version, about = "Arc algebras, Burnside multifunctors and foam shadows")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
    /// also write the report here
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// seed for randomized sweeps
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum RingArg {
    Z,
    F2,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// crossingless matchings of 2n points
    Enum {
        #[arg(long)]
        n: usize,
    },
    /// product of basis elements `a/b/dots`, e.g. `2,1/2,1/1`
    Multiply {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = RingArg::Z)]
        ring: RingArg,
        #[arg(required = true)]
        elements: Vec<String>,
    },
    Verify {
        #[command(subcommand)]
        kind: VerifyKind,
    },
    /// total F2 Khovanov homology of a closed diagram file
    Kh { diagram: PathBuf },
    /// catalog relations over F2 at every in-range weight
    QgroupCheck {
        #[arg(long)]
        n: usize,
        /// `all` or a comma list of families
        #[arg(long, default_value = "all")]
        relations: String,
        #[arg(long, value_enum, default_value_t = RingArg::F2)]
        ring: RingArg,
    },
    /// up-to-sign search over Z at every in-range weight
    QgroupSigns {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "all")]
        relations: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyKind {
    Phi {
        #[arg(long)]
        n: usize,
        /// `max_inputs,max_vertices`
        #[arg(long, default_value = "3,3")]
        bounds: String,
    },
    Signed {
        /// e.g. `1111` or `2,1,1,0`
        #[arg(long)]
        weight: String,
        /// sign table (JSON object); trivial signs when absent
        #[arg(long)]
        signs: Option<PathBuf>,
        #[arg(long, default_value = "3,3")]
        bounds: String,
    },
    Qgroup {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = RingArg::F2)]
        ring: RingArg,
    },
    Burnside {
        /// random instances per law
        #[arg(long, default_value_t = 500)]
        instances: usize,
    },
}

struct Outcome {
    pass: bool,
    body: Value,
}

fn config(msg: impl std::fmt::Display) -> String {
    msg.to_string()
}

fn parse_bounds(s: &str) -> Result<(usize, usize), String> {
    let v: Vec<&str> = s.split(',').collect();
    match v.as_slice() {
        [a, b] => Ok((a.trim().parse().map_err(config)?, b.trim().parse().map_err(config)?)),
        _ => Err(format!("bounds must be `inputs,vertices`, got {s}")),
    }
}

fn parse_element(s: &str, n: usize) -> Result<DiskElement, String> {
    let parts: Vec<&str> = s.split('/').collect();
    let [a, b, d] = parts.as_slice() else { return Err(format!("element {s}: expected a/b/dots")) };
    let m = |t: &str| -> Result<Matching, String> {
        let pair = t.split(',').map(|x| x.trim().parse::<usize>()).collect::<Result<Vec<_>, _>>().map_err(config)?;
        let m = Matching::new(pair).map_err(config)?;
        if m.n() != n {
            return Err(format!("matching {t} is not on {} points", 2 * n));
        }
        Ok(m)
    };
    let (a, b) = (m(a)?, m(b)?);
    let dots: Vec<bool> = d
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(format!("dot label {c}")),
        })
        .collect::<Result<_, _>>()?;
    if dots.len() != circles(&a, &b).len() {
        return Err(format!("element {s}: {} circles need as many labels", circles(&a, &b).len()));
    }
    Ok(DiskElement::new(a, b, dots))
}

fn cob_json<R: Ring>(c: &Cob<R>) -> Value {
    let terms: Vec<Value> = c
        .terms
        .iter()
        .map(|(e, r)| {
            let dots: String = e.dots.iter().map(|&d| if d { '1' } else { '0' }).collect();
            json!({ "a": e.a, "b": e.b, "dots": dots, "coeff": r.to_i64() })
        })
        .collect();
    json!({ "ring": R::NAME, "terms": terms })
}

fn families(list: &str) -> Result<Vec<&'static str>, String> {
    if list == "all" {
        return Ok(FAMILIES.to_vec());
    }
    list.split(',')
        .map(|f| FAMILIES.iter().copied().find(|x| *x == f.trim()).ok_or_else(|| format!("unknown relation {f}")))
        .collect()
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

fn qgroup_signs(n: usize, fams: &[&str]) -> Result<Outcome, String> {
    let sols = solve_all(n, fams).map_err(config)?;
    let pass = sols.iter().all(|s| s.signs.is_some() && s.f2);
    Ok(Outcome { pass, body: json!({ "n": n, "solutions": to_value(&sols) }) })
}

fn dispatch(cli: &Cli) -> Result<Outcome, String> {
    let ok = |body: Value| Ok(Outcome { pass: true, body });
    match &cli.cmd {
        Cmd::Enum { n } => {
            if *n > 10 {
                return Err(format!("n = {n} is too large to list"));
            }
            ok(json!({ "n": n, "matchings": enumerate_matchings(*n) }))
        }
        Cmd::Multiply { n, ring, elements } => {
            let xs = elements.iter().map(|e| parse_element(e, *n)).collect::<Result<Vec<_>, _>>()?;
            let product = match ring {
                RingArg::Z => cob_json(&multiply_n::<i64>(&xs)),
                RingArg::F2 => cob_json(&multiply_n::<F2>(&xs)),
            };
            ok(json!({ "n": n, "product": product }))
        }
        Cmd::Verify { kind } => match kind {
            VerifyKind::Phi { n, bounds } => {
                let (max_inputs, max_vertices) = parse_bounds(bounds)?;
                let r = verify_multifunctor(*n, &VerifyBounds { max_inputs, max_vertices, tangles: true });
                Ok(Outcome { pass: r.pass, body: json!({ "kind": "phi", "n": n, "report": to_value(&r) }) })
            }
            VerifyKind::Signed { weight, signs, bounds } => {
                let (max_inputs, max_vertices) = parse_bounds(bounds)?;
                let k = WeightSeq::parse(weight).map_err(config)?;
                let oracle = match signs {
                    Some(p) => SignOracle::load(p).map_err(config)?,
                    None => SignOracle::Trivial,
                };
                let r = verify_signed_multifunctor(&k, &oracle, &VerifyBounds { max_inputs, max_vertices, tangles: false })
                    .map_err(config)?;
                Ok(Outcome { pass: r.pass, body: json!({ "kind": "signed", "weight": k.to_string(), "report": to_value(&r) }) })
            }
            VerifyKind::Qgroup { n, ring } => match ring {
                RingArg::F2 => {
                    let r = check_all(*n, FAMILIES).map_err(config)?;
                    Ok(Outcome { pass: r.pass, body: json!({ "kind": "qgroup", "ring": "f2", "report": to_value(&r) }) })
                }
                RingArg::Z => qgroup_signs(*n, FAMILIES),
            },
            VerifyKind::Burnside { instances } => {
                let r = law_sweep(cli.seed, *instances);
                Ok(Outcome { pass: r.pass, body: json!({ "kind": "burnside", "report": to_value(&r) }) })
            }
        },
        Cmd::Kh { diagram } => {
            let text = std::fs::read_to_string(diagram).map_err(|e| format!("{}: {e}", diagram.display()))?;
            let t = parse_diagram(&text).map_err(config)?;
            if t.left != 0 || t.right != 0 {
                return Err("the diagram must be closed".into());
            }
            let c = khovanov_f2(&t).map_err(config)?;
            Ok(Outcome {
                pass: c.d_squared_zero,
                body: json!({
                    "crossings": c.crossings,
                    "homology_dim": c.homology_dim,
                    "by_degree": c.by_degree,
                    "chain_dim": c.total_dim,
                    "d_squared_zero": c.d_squared_zero,
                }),
            })
        }
        Cmd::QgroupCheck { n, relations, ring } => {
            let fams = families(relations)?;
            match ring {
                RingArg::F2 => {
                    let r = check_all(*n, &fams).map_err(config)?;
                    Ok(Outcome { pass: r.pass, body: json!({ "ring": "f2", "report": to_value(&r) }) })
                }
                RingArg::Z => qgroup_signs(*n, &fams),
            }
        }
        Cmd::QgroupSigns { n, relations } => qgroup_signs(*n, &families(relations)?),
    }
}

fn command_name(c: &Cmd) -> &'static str {
    match c {
        Cmd::Enum { .. } => "enum",
        Cmd::Multiply { .. } => "multiply",
        Cmd::Verify { .. } => "verify",
        Cmd::Kh { .. } => "kh",
        Cmd::QgroupCheck { .. } => "qgroup-check",
        Cmd::QgroupSigns { .. } => "qgroup-signs",
    }
}

/// Runs a command line; returns the exit code and the text for stdout.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.to_string());
        }
    };
    let (code, doc) = match dispatch(&cli) {
        Ok(o) => {
            let mut doc = json!({ "schema": 1, "command": command_name(&cli.cmd), "seed": cli.seed, "pass": o.pass });
            if let (Value::Object(d), Value::Object(b)) = (&mut doc, o.body) {
                d.extend(b);
            }
            (if o.pass { 0 } else { 1 }, doc)
        }
        Err(msg) => (2, json!({ "schema": 1, "command": command_name(&cli.cmd), "error": msg })),
    };
    let text = serde_json::to_string_pretty(&doc).expect("json") + "\n";
    if let Some(p) = &cli.out {
        if let Err(e) = std::fs::write(p, &text) {
            return (2, format!("cannot write {}: {e}\n", p.display()));
        }
    }
    (code, text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> (i32, Value) {
        let (code, text) = run(std::iter::once("arcalg").chain(args.iter().copied()));
        (code, serde_json::from_str(&text).unwrap_or(Value::Null))
    }

    #[test]
    fn enum_counts() {
        for (n, c) in [(0, 1), (1, 1), (2, 2), (3, 5)] {
            let (code, v) = go(&["enum", "--n", &n.to_string()]);
            assert_eq!(code, 0);
            assert_eq!(v["matchings"].as_array().unwrap().len(), c);
            assert_eq!(v["schema"], 1);
        }
    }

    #[test]
    fn multiply_examples() {
        // unit times x is x
        let (code, v) = go(&["multiply", "--n", "1", "2,1/2,1/0", "2,1/2,1/1"]);
        assert_eq!(code, 0);
        assert_eq!(v["product"]["terms"], json!([{ "a": [2, 1], "b": [2, 1], "dots": "1", "coeff": 1 }]));
        let (_, v) = go(&["multiply", "--n", "1", "2,1/2,1/1", "2,1/2,1/1"]);
        assert_eq!(v["product"]["terms"], json!([]));
        let (code, _) = go(&["multiply", "--n", "1", "2,1/2,1/11"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(go(&["frobnicate"]).0, 2);
        assert_eq!(go(&["verify", "signed", "--weight", "1"]).0, 2);
        assert_eq!(go(&["qgroup-check", "--n", "2", "--relations", "nope"]).0, 2);
    }

    #[test]
    fn output_is_deterministic() {
        let a = run(["arcalg", "qgroup-check", "--n", "2"]);
        let b = run(["arcalg", "qgroup-check", "--n", "2"]);
        assert_eq!(a, b);
        assert_eq!(a.0, 0);
    }
}
