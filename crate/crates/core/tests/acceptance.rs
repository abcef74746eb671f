//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test -p spc-core --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spc_core::engine::{count, RunOptions};
use spc_core::finite::{circuit_formula, count_formula};
use spc_core::lang::parse;
use spc_core::logic::DEFAULT_CAP;
use spc_core::measure::factorize_demo;
use spc_core::measure::Problem;
use spc_core::result::{Backend, CountResult};
use spc_core::scalar::rat;
use spc_core::semiring::{check_axioms, SemiringSpec, Value};

use common::{corpus, direct_count, grounded_count, random_fol_program, random_prop_program};

type Outcome = Result<(bool, String), String>;

fn run(file: &str, backend: Backend, samples: u64) -> Result<(CountResult, Duration), String> {
    let p = corpus(file);
    let opts = RunOptions { backend, samples, ..RunOptions::default() };
    let t = Instant::now();
    let r = count(&p, &opts).map_err(|e| format!("{file}: {e}"))?;
    Ok((r, t.elapsed()))
}

fn value(file: &str) -> Result<CountResult, String> {
    run(file, Backend::Auto, 100_000).map(|(r, _)| r)
}

fn witness(r: &CountResult) -> String {
    r.witness.as_ref().map(|w| w.to_string()).unwrap_or_else(|| "none".into())
}

fn ac1() -> Outcome {
    let (mpe, t1) = run("mpe.sp", Backend::Auto, 0)?;
    let (wmc, t2) = run("wmc.sp", Backend::Auto, 0)?;
    let ok_values = mpe.value == Value::int(6) && wmc.value == Value::int(13);
    let ok_witness = witness(&mpe) == "{p, not q}";
    let fast = t1 + t2 < Duration::from_secs(1);
    Ok((
        ok_values && ok_witness && fast,
        format!(
            "max={} witness={} (required {{p, not q}}) sum={} time={:?}",
            mpe.value,
            witness(&mpe),
            wmc.value,
            t1 + t2
        ),
    ))
}

fn ac2() -> Outcome {
    let sat = value("sat_or.sp")?;
    let sharp = value("sharp_sat.sp")?;
    let ok = sat.value == Value::Bool(true) || sat.value == Value::int(1);
    Ok((ok && sharp.value == Value::int(3), format!("sat={} #sat={}", sat.value, sharp.value)))
}

fn ac3() -> Outcome {
    let r = value("lia_weights.sp")?;
    let w = witness(&r);
    let ok = r.value == Value::int(2) && w.contains("x1=1") && w.contains("x2=2");
    Ok((ok, format!("value={} witness={w}", r.value)))
}

fn ac4() -> Outcome {
    let r = value("coloring.sp")?;
    Ok((r.value == Value::int(6), format!("value={}", r.value)))
}

fn ac5() -> Outcome {
    let exact = value("volume_box.sp")?;
    let (mc, t) = run("volume_box.sp", Backend::Mc, 1_000_000)?;
    let est = mc.value.as_f64().ok_or("mc value is not numeric")?;
    let rel = (est - 3.0).abs() / 3.0;
    let ok = exact.value == Value::int(3) && rel <= 0.02 && t < Duration::from_secs(5);
    Ok((ok, format!("exact={} mc={est:.5} rel.err={rel:.2e} time={t:?}", exact.value)))
}

fn ac6() -> Outcome {
    let mu = value("hybrid_done.sp")?;
    let pr = value("hybrid_done_prob.sp")?;
    let ok = mu.value == Value::rational(rat(2, 5)) && pr.value == Value::rational(rat(1, 5));
    Ok((ok, format!("measure={} conditional={}", mu.value, pr.value)))
}

fn ac7() -> Outcome {
    let pair = |a: i64, b: BigRational| Value::pair(Value::int(a), Value::rational(b));
    let cases = [
        ("robot_repair.sp", pair(0, rat(0, 1))),
        ("robot_not_repair.sp", pair(0, rat(3, 10))),
        ("robot_phi.sp", pair(0, rat(3, 10))),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (file, want) in cases {
        let r = value(file)?;
        ok &= r.value == want;
        detail.push(format!("{file}={}", r.value));
    }
    let c = value("robot_conditional.sp")?;
    ok &= c.value == Value::int(1);
    detail.push(format!("robot_conditional.sp={}", c.value));
    Ok((ok, detail.join(" ")))
}

fn ac8() -> Outcome {
    let algebras = ["[NAT,+,*,0,1]", "[NAT,max,*,0,1]", "[BOOL,or,and,0,1]"];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let t = Instant::now();
    let mut mismatches = Vec::new();
    for i in 0..200 {
        let alg = algebras[i % algebras.len()];
        let src = random_prop_program(&mut rng, alg, 12);
        let p = parse(&src).map_err(|d| format!("{d}\n{src}"))?;
        let q = p.query_formula();
        let a = count_formula(&p, &q, DEFAULT_CAP).map_err(|e| e.to_string())?;
        let b = circuit_formula(&p, &q).map_err(|e| e.to_string())?;
        if a.value != b.value {
            mismatches.push(format!("#{i} {alg}: {} vs {}", a.value, b.value));
        }
    }
    let elapsed = t.elapsed();
    let ok = mismatches.is_empty() && elapsed < Duration::from_secs(30);
    Ok((ok, format!("200 programs, {} mismatches, time={elapsed:?} {}", mismatches.len(), mismatches.join("; "))))
}

fn ac9() -> Outcome {
    let mut failed = Vec::new();
    let catalog = SemiringSpec::catalog();
    for (i, s) in catalog.iter().enumerate() {
        if !check_axioms(s, 1000, i as u64).passes() {
            failed.push(s.to_string());
        }
    }
    Ok((
        failed.is_empty(),
        format!("{} semirings x 1000 samples, failing: [{}]", catalog.len(), failed.join(", ")),
    ))
}

fn ac10() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for file in ["convex_min.sp", "convex_max.sp"] {
        let problem = Problem::from_program(&corpus(file)).map_err(|e| e.to_string())?;
        let exact = problem.vertex_enum().map_err(|e| e.to_string())?;
        let grid = problem.grid_refine().map_err(|e| e.to_string())?;
        let (Some(v), Some(g)) = (exact.value, grid.value) else {
            return Ok((false, format!("{file}: no optimum")));
        };
        let vf = spc_core::scalar::Scalar::to_f64(&v);
        ok &= (vf - g).abs() <= 1e-3 && exact.flags.is_empty();
        detail.push(format!("{file}: vertex={v} grid={g:.6}"));
    }
    let m = |rows: &[[i64; 2]; 2]| -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect()
    };
    let rate = rat(1, 100);
    let rank1 = factorize_demo(&m(&[[1, 2], [2, 4]]), 1, 5000, &rate, 0).map_err(|e| e.to_string())?;
    let ident = factorize_demo(&m(&[[1, 0], [0, 1]]), 1, 5000, &rate, 0).map_err(|e| e.to_string())?;
    ok &= rank1.err <= 1e-3 && ident.err >= 1.0;
    detail.push(format!("rank1 err={:.3e} identity err={:.4}", rank1.err, ident.err));
    Ok((ok, detail.join("; ")))
}

fn ac11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut bad = Vec::new();
    let mut distinct = std::collections::BTreeSet::new();
    for i in 0..50 {
        let src = random_fol_program(&mut rng);
        let p = parse(&src).map_err(|d| format!("{d}\n{src}"))?;
        let (g, d) = (grounded_count(&p), direct_count(&p));
        distinct.insert(d);
        if g != d {
            bad.push(format!("#{i}: {g} vs {d}"));
        }
    }
    Ok((
        bad.is_empty(),
        format!("50 instances, {} distinct counts, {} mismatches {}", distinct.len(), bad.len(), bad.join("; ")),
    ))
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Outcome); 11] = [
        ("AC1", ac1),
        ("AC2", ac2),
        ("AC3", ac3),
        ("AC4", ac4),
        ("AC5", ac5),
        ("AC6", ac6),
        ("AC7", ac7),
        ("AC8", ac8),
        ("AC9", ac9),
        ("AC10", ac10),
        ("AC11", ac11),
    ];
    let mut failures = 0;
    for (name, check) in checks {
        let (ok, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!ok);
        println!("{name} {} {detail}", if ok { "PASS" } else { "FAIL" });
    }
    println!("{} passed, {failures} failed", checks.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
