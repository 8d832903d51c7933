//! The ten acceptance criteria; one line per criterion, non-zero exit on
//! any failure. Wall-clock budgets are part of each criterion.

mod common;

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use arcalg::burnside::{law_sweep, linearize, linearize_signed};
use arcalg::frames::build_arc_frame;
use arcalg::phi::{cardinality_law, khovanov_f2, phi_basic, structure_matrix, verify_multifunctor, PhiContext, VerifyBounds};
use arcalg::planar::{catalan, circles, enumerate_matchings, parse_diagram, Matching};
use arcalg::qgroup::{check_relation, instances, solve_all, solve_signs, GLWeight, FAMILIES};
use arcalg::shapes::{arc_morphism, enumerate_arc_morphisms};
use arcalg::signed::{linearizes_to_unsigned, phi_signed_basic, verify_signed_multifunctor, SignOracle, WeightSeq};
use arcalg::tqft::{bimodule_generators, multiply, Cob, DiskElement};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Every chain of `k + 1` matchings on `n` arcs.
fn chains(n: usize, k: usize) -> Vec<Vec<Matching>> {
    let all = enumerate_matchings(n);
    let mut out: Vec<Vec<Matching>> = vec![vec![]];
    for _ in 0..=k {
        out = out.into_iter().flat_map(|c| all.iter().map(move |m| [c.clone(), vec![m.clone()]].concat())).collect();
    }
    out
}

fn c1_enumeration() -> Outcome {
    for n in 0..=7 {
        let got = enumerate_matchings(n).len();
        let brute = common::brute_matchings(n);
        ensure(got as u64 == catalan(n) && got == brute, || format!("n={n}: {got} listed, {brute} brute force, Catalan {}", catalan(n)))?;
    }
    Ok("|B_n| = Catalan(n) = brute force for n <= 7".into())
}

fn c2_arc_algebra() -> Outcome {
    let mut triples = 0usize;
    for m in 0..=3 {
        let basis = enumerate_matchings(m);
        let mut memo: HashMap<(DiskElement, DiskElement), Cob<i64>> = HashMap::new();
        let mut mul = |x: &DiskElement, y: &DiskElement| {
            memo.entry((x.clone(), y.clone())).or_insert_with(|| multiply::<i64>(x, y)).clone()
        };
        let mut mul_cob = |x: &Cob<i64>, y: &Cob<i64>| {
            let mut out = Cob::zero();
            for (a, ca) in &x.terms {
                for (b, cb) in &y.terms {
                    out = out.add(&mul(a, b).scale(ca * cb));
                }
            }
            out
        };
        let gens = |a: &Matching, b: &Matching| bimodule_generators(a, b);
        for a in &basis {
            for b in &basis {
                for x in gens(a, b) {
                    let bx = Cob::basis(x.clone());
                    let left = mul_cob(&Cob::basis(DiskElement::unit(a)), &bx);
                    let right = mul_cob(&bx, &Cob::basis(DiskElement::unit(b)));
                    ensure(left == bx && right == bx, || format!("unit law fails on {x:?}"))?;
                    for c in &basis {
                        // a non-composable product vanishes
                        if c != a {
                            ensure(mul_cob(&Cob::basis(DiskElement::unit(c)), &bx).is_zero(), || format!("1_c x != 0 for {x:?}"))?;
                        }
                        for y in gens(b, c) {
                            let xy = mul_cob(&bx, &Cob::basis(y.clone()));
                            for d in &basis {
                                for z in gens(c, d) {
                                    let bz = Cob::basis(z.clone());
                                    let l = mul_cob(&xy, &bz);
                                    let yz = mul_cob(&Cob::basis(y.clone()), &bz);
                                    let r = mul_cob(&bx, &yz);
                                    ensure(l == r, || format!("(xy)z != x(yz) at {x:?}, {y:?}, {z:?}"))?;
                                    triples += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let b2 = enumerate_matchings(2);
    let dim: usize = b2.iter().flat_map(|a| b2.iter().map(move |b| 1usize << circles(a, b).len())).sum();
    ensure(dim == 12, || format!("dim H^2 = {dim}"))?;
    Ok(format!("{triples} basis triples associative for m <= 3, unit laws, dim H^2 = 12"))
}

fn c3_frames() -> Outcome {
    for m in 0..=3 {
        for a in enumerate_matchings(m) {
            for b in enumerate_matchings(m) {
                let f = build_arc_frame(&[a.clone(), b.clone()]).map_err(|e| e.to_string())?;
                let k = circles(&a, &b).len();
                let annuli = f.components.iter().all(|c| c.genus == 0 && c.euler_char == 0 && c.inputs.len() == 1 && c.outputs.len() == 1);
                ensure(f.components.len() == k && annuli, || format!("identity frame on ({a:?}, {b:?})"))?;
            }
        }
    }
    let (a, b) = (Matching::new(vec![2, 1, 4, 3]).unwrap(), Matching::new(vec![4, 3, 2, 1]).unwrap());
    let f = build_arc_frame(&[a.clone(), b.clone(), a, b]).map_err(|e| e.to_string())?;
    let c = &f.components;
    ensure(
        c.len() == 1 && c[0].genus == 1 && f.euler_char == -4 && c[0].inputs.len() + c[0].outputs.len() == 4,
        || format!("(a,b,a,b) frame: {:?}, chi {}", c, f.euler_char),
    )?;
    // every split of every chain: glue the child frame into the parent
    let mut glued = 0usize;
    for (n, max_k) in [(1, 5), (2, 4), (3, 3)] {
        for k in 1..=max_k {
            for seq in chains(n, k) {
                let direct = build_arc_frame(&seq).map_err(|e| e.to_string())?.report();
                for lo in 0..seq.len() {
                    for hi in lo..seq.len() {
                        let child = build_arc_frame(&seq[lo..=hi]).map_err(|e| e.to_string())?;
                        let mut parent_seq = seq[..=lo].to_vec();
                        parent_seq.extend_from_slice(&seq[hi..]);
                        let parent = build_arc_frame(&parent_seq).map_err(|e| e.to_string())?;
                        ensure(parent.report().glue(lo, &child.report()) == direct, || format!("gluing {seq:?} at [{lo}, {hi}]"))?;
                        glued += 1;
                    }
                }
            }
        }
    }
    Ok(format!("identity frames are annuli for m <= 3, torus frame chi -4, {glued} gluings agree"))
}

fn c4_structure_constants() -> Outcome {
    let mut chains_checked = 0usize;
    for n in 0..=3 {
        for k in 0..=4 {
            for seq in chains(n, k) {
                ensure(cardinality_law(&seq).map_err(|e| e.to_string())?, || format!("|phi_basic| differs on {seq:?}"))?;
                chains_checked += 1;
            }
        }
    }
    let (a, b) = (Matching::new(vec![2, 1, 4, 3]).unwrap(), Matching::new(vec![4, 3, 2, 1]).unwrap());
    let seq = [a.clone(), b.clone(), a, b];
    let c = phi_basic(&PhiContext::arcs(), &arc_morphism(&seq)).map_err(|e| e.to_string())?;
    let m = structure_matrix(&seq);
    let lin = linearize::<i64>(&c);
    let pair = c.entries.keys().find(|key| c.cardinality(key) == 2);
    let Some(key) = pair else { return Err("no cardinality-2 entry on (a,b,a,b)".into()) };
    let col = arcalg::burnside::column_index(&c.sources, &key.1);
    ensure(m.get(key.0, col) == 2 && lin.get(key.0, col) == 2, || format!("entry {key:?}: constant {}", m.get(key.0, col)))?;
    Ok(format!("{chains_checked} chains (n <= 3, <= 4 inputs) match; genus-1 entry {key:?} has 2 elements and constant 2"))
}

fn c5_multifunctor() -> Outcome {
    let bounds = VerifyBounds { max_inputs: 3, max_vertices: 3, tangles: true };
    let mut summary = Vec::new();
    for n in 1..=2 {
        let r = verify_multifunctor(n, &bounds);
        if !r.pass {
            let first = r.counterexamples.first().map(|c| format!("{} {}: {}", c.check, c.instance, c.detail)).unwrap_or_default();
            return Err(format!("n={n}: {:?}; first counterexample {first}", r.checks));
        }
        let total: usize = r.checks.values().map(|s| s.instances).sum();
        summary.push(format!("n={n}: {total} checks"));
    }
    Ok(summary.join(", "))
}

fn c6_burnside(seed: u64) -> Outcome {
    let r = law_sweep(seed, 500);
    ensure(r.pass && r.laws.len() == 6 && r.laws.values().all(|&(n, f)| n >= 500 && f == 0), || format!("{:?}", r.laws))?;
    Ok(format!("6 laws x 500 instances, seed {seed}"))
}

fn c7_signed() -> Outcome {
    let bounds = VerifyBounds::default();
    let mut out = Vec::new();
    for w in ["11", "1111", "2110"] {
        let k = WeightSeq::parse(w).map_err(|e| e.to_string())?;
        let r = verify_signed_multifunctor(&k, &SignOracle::Trivial, &bounds).map_err(|e| e.to_string())?;
        ensure(r.pass, || format!("{w}: {:?} {:?}", r.signed.checks, r.signed.counterexamples.first()))?;
        let p = k.ones() / 2;
        for n_in in 0..=3 {
            for mor in enumerate_arc_morphisms(p, n_in) {
                let s = phi_signed_basic(&k, &mor, &SignOracle::Trivial).map_err(|e| e.to_string())?;
                ensure(
                    linearize_signed::<i64>(&s) == structure_matrix(&mor.arc_chain())
                        && linearizes_to_unsigned(&k, &mor, &SignOracle::Trivial).map_err(|e| e.to_string())?,
                    || format!("{w}: signed linearization differs on {mor:?}"),
                )?;
            }
        }
        out.push(format!("{w} ok"));
    }
    let corrupted = SignOracle::load(&fixture("signs_corrupted_1111.json")).map_err(|e| e.to_string())?;
    let r = verify_signed_multifunctor(&WeightSeq::parse("1111").unwrap(), &corrupted, &bounds).map_err(|e| e.to_string())?;
    let named = r.signed.counterexamples.iter().find(|c| c.check == "associativity" && c.instance.starts_with("triple ("));
    match (r.pass, named) {
        (false, Some(c)) => out.push(format!("corrupted oracle rejected at {}", c.instance)),
        _ => return Err(format!("corrupted oracle not rejected with a named triple: {:?}", r.signed.checks)),
    }
    Ok(out.join("; "))
}

fn c8_qgroup_f2() -> Outcome {
    let mut checked = 0usize;
    let mut families_hit = std::collections::BTreeSet::new();
    for (n, fams) in [(2, FAMILIES), (3, FAMILIES), (4, &["distant-commute"][..])] {
        for k in GLWeight::all_in_range(n) {
            for fam in fams {
                for v in check_relation(fam, &k).map_err(|e| e.to_string())? {
                    if v.vacuous {
                        continue;
                    }
                    ensure(v.direct && v.barnatan, || format!("{} {} at {}: direct {}, Bar-Natan {}", v.family, v.label, v.weight, v.direct, v.barnatan))?;
                    families_hit.insert(v.family);
                    checked += 1;
                }
            }
        }
    }
    ensure(families_hit.len() == FAMILIES.len(), || format!("families never instantiated: {families_hit:?}"))?;
    Ok(format!("{checked} non-vacuous instances over {} families hold by both routes", families_hit.len()))
}

fn c9_qgroup_signs() -> Outcome {
    let sols = solve_all(2, FAMILIES).map_err(|e| e.to_string())?;
    for s in &sols {
        ensure(s.signs.is_some() && s.f2, || format!("{} {} at {}: signs {:?}, F2 {}", s.family, s.label, s.weight, s.signs, s.f2))?;
    }
    // a relation with a term dropped has no sign vector
    let k = GLWeight::parse("02").map_err(|e| e.to_string())?;
    let mut rel = instances("nilhecke-dot-slide", &k).map_err(|e| e.to_string())?.into_iter().find(|r| !r.source.is_zero()).ok_or("no dot-slide")?;
    rel.terms.pop();
    ensure(solve_signs(&rel).map_err(|e| e.to_string())?.is_none(), || "corrupted relation solved".into())?;
    Ok(format!("{} instances at n = 2 have sign vectors consistent with F2", sols.len()))
}

fn c10_khovanov() -> Outcome {
    let mut out = Vec::new();
    for (name, want) in [("unknot", 2), ("hopf", 4), ("trefoil", 6)] {
        let text = std::fs::read_to_string(fixture(&format!("diagrams/{name}.kd"))).map_err(|e| e.to_string())?;
        let t = parse_diagram(&text).map_err(|e| e.to_string())?;
        let got = khovanov_f2(&t).map_err(|e| e.to_string())?;
        let oracle = common::kh_oracle(&t);
        ensure(
            got.homology_dim == want && oracle.homology_dim == want && got.total_dim == oracle.chain_dim,
            || format!("{name}: library {} (chains {}), oracle {} (chains {})", got.homology_dim, got.total_dim, oracle.homology_dim, oracle.chain_dim),
        )?;
        ensure(got.d_squared_zero && oracle.d_squared_zero, || format!("{name}: d^2 != 0"))?;
        out.push(format!("{name} {want}"));
    }
    Ok(out.join(", "))
}

fn main() {
    let seed = std::env::var("ARCALG_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0);
    let criteria: Vec<(&str, u64, Box<dyn Fn() -> Outcome>)> = vec![
        ("enumeration", 5, Box::new(c1_enumeration)),
        ("arc algebra", 60, Box::new(c2_arc_algebra)),
        ("frames", 30, Box::new(c3_frames)),
        ("structure constants", 300, Box::new(c4_structure_constants)),
        ("multifunctor coherence", 600, Box::new(c5_multifunctor)),
        ("burnside laws", 30, Box::new(move || c6_burnside(seed))),
        ("signed lift", 120, Box::new(c7_signed)),
        ("qgroup relations over F2", 600, Box::new(c8_qgroup_f2)),
        ("qgroup signs over Z", 300, Box::new(c9_qgroup_signs)),
        ("khovanov shadow", 60, Box::new(c10_khovanov)),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or("panic".into()))
        });
        let dt = t0.elapsed();
        let over = dt > Duration::from_secs(*budget);
        let (verdict, detail) = match (&r, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over the {budget} s budget; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {:<26} {verdict} {:>8.2}s / {budget}s  {detail}", i + 1, name, dt.as_secs_f64());
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
