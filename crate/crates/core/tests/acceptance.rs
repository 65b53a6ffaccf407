//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

mod common;

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use rand::Rng;
use termsat::analysis::{analyze, extract, sign_of, term_cost, AstSize, SignAnalysis, SignValue};
use termsat::egraph::{EGraph, Id};
use termsat::ematch::ematch;
use termsat::rules::{parse_theory, Theory};
use termsat::saturation::{
    partition, prove_equal, saturate, simplify, BackoffScheduler, BackoffState, Report, SaturationParams,
    Scheduler, StopReason,
};
use termsat::theories::{arithmetic, bundled, stream_optimize};
use termsat::Term;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

const ARITH_EXPR: &str = "(/ (* a (* 2 3)) 6)";
const STREAM_MAP: &str = "(map (lambda x (* 7 x)) (fill 3 4))";
const STREAM_INDEX: &str = "(getindex (map (lambda x (* 7 x)) (fill 3 4)) 1)";
const COMM_ASSOC: &str = "@vars a b c\n(+ a b) == (+ b a)\n(+ a (+ b c)) == (+ (+ a b) c)\n";

fn pipeline(threaded: bool) -> (Term, Report, Vec<Vec<Id>>) {
    let th = arithmetic();
    let mut g = EGraph::from_term(&t(ARITH_EXPR)).unwrap();
    analyze(&mut g, SignAnalysis::default()).unwrap();
    let params = SaturationParams {
        threaded,
        ..Default::default()
    };
    let report = saturate(&mut g, &th, &params);
    let best = extract(&g, &AstSize, g.root().unwrap()).unwrap();
    (best, report, partition(&g))
}

fn arithmetic_pipeline() -> Check {
    let start = Instant::now();
    let (out, r) = simplify(&t(ARITH_EXPR), &arithmetic(), &SaturationParams::default(), &AstSize)
        .map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure!(out == t("a"), "extracted {out}");
    ensure!(took < Duration::from_secs(1), "took {took:?}");
    Ok(format!("{ARITH_EXPR} -> {out}, {} iterations, {} ({took:.2?})", r.iterations, r.stop_reason))
}

fn sign_outcomes() -> Check {
    let cases = [
        ("(* 3 x)", SignValue::Pos),
        ("(* 3 (* (+ 2 a) 2))", SignValue::Unknown),
        ("(* 3 (+ 2 a) 2)", SignValue::Unknown),
        ("(* (* -3 y) (* (* 2 x) y))", SignValue::Neg),
        ("(/ k k)", SignValue::NaN),
    ];
    let mut a = SignAnalysis::without_assumptions();
    for spec in ["x=+", "y=-", "z=0", "k=inf"] {
        a.assume_spec(spec)?;
    }
    for (src, want) in cases {
        let got = sign_of(&t(src), a.clone()).map_err(|e| e.to_string())?;
        ensure!(got == want, "sign{src} = {got}, expected {want}");
    }
    Ok("+1, unknown, -1, NaN".into())
}

fn stream_fusion() -> Check {
    let mut lines = Vec::new();
    for (src, want) in [(STREAM_MAP, "(fill 21 4)"), (STREAM_INDEX, "21")] {
        let start = Instant::now();
        let out = stream_optimize(&t(src), &SaturationParams::default()).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        ensure!(out == t(want), "{src} -> {out}, expected {want}");
        ensure!(took < Duration::from_secs(2), "{src} took {took:?}");
        lines.push(format!("{out} ({took:.2?})"));
    }
    Ok(lines.join(", "))
}

fn congruence_oracle() -> Check {
    for trial in 0..500u64 {
        let mut r = rng(trial);
        let roots: Vec<Term> = (0..r.gen_range(1..=4)).map(|_| random_fg_term(&mut r, 4)).collect();
        let mut terms = subterms(&roots);
        terms.truncate(8);
        let mut g = EGraph::new();
        let ids: Vec<Id> = terms.iter().map(|x| g.add_term(x).unwrap()).collect();
        let merges: Vec<(usize, usize)> = (0..r.gen_range(0..=5))
            .map(|_| (r.gen_range(0..terms.len()), r.gen_range(0..terms.len())))
            .collect();
        for &(a, b) in &merges {
            g.merge(ids[a], ids[b]).unwrap();
        }
        g.rebuild();
        let label = naive_congruence(&terms, &merges);
        for i in 0..terms.len() {
            for j in 0..terms.len() {
                let (want, got) = (label[i] == label[j], g.find(ids[i]) == g.find(ids[j]));
                ensure!(want == got, "trial {trial}: {} ~ {}: oracle {want}, egraph {got}", terms[i], terms[j]);
            }
        }
        g.check_invariants().map_err(|e| format!("trial {trial}: {e}"))?;
    }
    Ok("500/500 partitions agree".into())
}

fn ematch_oracle() -> Check {
    let mut total = 0;
    for trial in 0..200u64 {
        let mut r = rng(1000 + trial);
        let mut g = EGraph::new();
        loop {
            let before = g.clone();
            g.add_term(&random_fg_term(&mut r, 4)).unwrap();
            if g.n_enodes() > 30 {
                g = before;
                break;
            }
            if g.n_enodes() >= 24 {
                break;
            }
        }
        let ids = g.class_ids();
        for _ in 0..r.gen_range(0..=4) {
            let (a, b) = (ids[r.gen_range(0..ids.len())], ids[r.gen_range(0..ids.len())]);
            g.merge(a, b).unwrap();
        }
        g.rebuild();
        ensure!(g.n_enodes() <= 30, "trial {trial}: graph has {} nodes", g.n_enodes());
        let src = random_fg_pattern(&mut r, 4);
        let p = pat(&src);
        let vm: HashSet<(Id, Subst)> = ematch(&g, &p)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|m| (m.class, m.bindings))
            .collect();
        let naive = naive_ematch(&g, &p);
        ensure!(vm == naive, "trial {trial}: pattern {src}: vm {} matches, oracle {}", vm.len(), naive.len());
        total += vm.len();
    }
    Ok(format!("200/200 match sets agree ({total} matches)"))
}

fn prove_vs_bfs() -> Check {
    let th = parse_theory("ac", COMM_ASSOC).unwrap();
    let mut r = rng(7);
    let pool: Vec<Term> = (0..40)
        .map(|_| {
            let leaves = r.gen_range(1..=5);
            random_sum(&mut r, leaves)
        })
        .collect();
    let reach: Vec<HashSet<Term>> = pool.iter().map(|x| bfs_reachable(x, 12)).collect();
    let params = SaturationParams {
        timeout: 64,
        ..Default::default()
    };
    let (mut equal, mut pairs) = (0, 0);
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            let (proved, report) = prove_equal(&pool[i], &pool[j], &th, &params).map_err(|e| e.to_string())?;
            let bfs = reach[i].contains(&pool[j]);
            ensure!(
                proved == bfs,
                "{} vs {}: prove {proved} ({}), bfs {bfs}",
                pool[i],
                pool[j],
                report.stop_reason
            );
            ensure!(
                proved || report.stop_reason == StopReason::Saturated,
                "{} vs {}: stopped with {}",
                pool[i],
                pool[j],
                report.stop_reason
            );
            equal += proved as usize;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs agree ({equal} equal)"))
}

fn extraction_optimality() -> Check {
    let parts = [bundled("comm_monoid").unwrap(), bundled("comm_group").unwrap(), bundled("folder").unwrap()];
    let th = Theory::concat("arith", &parts).unwrap();
    let params = SaturationParams {
        timeout: 4,
        ..Default::default()
    };
    let mut improved = 0;
    for trial in 0..100u64 {
        let mut r = rng(5000 + trial);
        let src = random_arith(&mut r, 3);
        let mut g = EGraph::from_term(&src).unwrap();
        saturate(&mut g, &th, &params);
        let root = g.root().unwrap();
        let best = extract(&g, &AstSize, root).map_err(|e| e.to_string())?;
        ensure!(g.lookup_term(&best) == Some(root), "trial {trial}: {best} is not in the root class");
        let size = term_cost(&AstSize, &best) as usize;
        let brute = min_size_to_depth(&g, 6)[&root];
        ensure!(size == brute, "trial {trial}: {src}: extracted {best} (size {size}), brute force {brute}");
        improved += (size < src.size()) as usize;
    }
    Ok(format!("100/100 optimal ({improved} smaller than the input)"))
}

fn random_arith(r: &mut rand_chacha::ChaCha8Rng, depth: usize) -> Term {
    use rand::seq::SliceRandom;
    if depth <= 1 || r.gen_bool(0.3) {
        return t(["a", "b", "0", "1", "2"].choose(r).unwrap());
    }
    let op = if r.gen_bool(0.5) { "+" } else { "*" };
    Term::app(op, vec![random_arith(r, depth - 1), random_arith(r, depth - 1)])
}

fn backoff() -> Check {
    let mut s = BackoffScheduler::new(10, 5);
    ensure!(!s.inform(0, 11, 0), "11 matches over a limit of 10 did not ban");
    for iter in 1..=5 {
        ensure!(!s.can_search(0, iter), "searchable at iteration {iter}");
    }
    ensure!(s.can_search(0, 6), "still banned at iteration 6");
    let want = BackoffState {
        match_limit: 20,
        ban_length: 10,
        banned_until: 6,
        times_banned: 1,
    };
    ensure!(*s.state(0) == want, "state {:?}", s.state(0));

    let th = parse_theory("ac", COMM_ASSOC).unwrap();
    let leaves: Vec<String> = (1..=12).map(|i| format!("x{i}")).collect();
    let sum = leaves[..11]
        .iter()
        .rev()
        .fold(t(&leaves[11]), |acc, x| Term::app("+", vec![t(x), acc]));
    let params = SaturationParams::default();
    let start = Instant::now();
    let mut g = EGraph::from_term(&sum).unwrap();
    let r = saturate(&mut g, &th, &params);
    let took = start.elapsed();
    ensure!(g.n_enodes() <= params.enodelimit, "{} enodes", g.n_enodes());
    ensure!(took < Duration::from_secs(10), "took {took:?}");
    Ok(format!(
        "trace ok; 12-leaf sum: {} after {} iterations, {} enodes ({took:.2?})",
        r.stop_reason,
        r.iterations,
        g.n_enodes()
    ))
}

fn determinism() -> Check {
    let run = || -> Result<Vec<String>, String> {
        let (best, report, _) = pipeline(false);
        let mut out = vec![best.to_string(), format!("{:?}", report.without_timings())];
        for src in [STREAM_MAP, STREAM_INDEX] {
            let o = stream_optimize(&t(src), &SaturationParams::default()).map_err(|e| e.to_string())?;
            out.push(o.to_string());
            let (_, r) = simplify(&t(src), &bundled("stream").unwrap(), &SaturationParams::default(), &AstSize)
                .map_err(|e| e.to_string())?;
            out.push(format!("{:?}", r.without_timings()));
        }
        Ok(out)
    };
    let (a, b) = (run()?, run()?);
    ensure!(a == b, "runs differ:\n{a:?}\n{b:?}");
    let (serial, threaded) = (pipeline(false), pipeline(true));
    ensure!(serial.2 == threaded.2, "threaded partition differs");
    ensure!(serial.0 == threaded.0, "threaded extraction differs: {} vs {}", serial.0, threaded.0);
    Ok("serial runs identical; threaded partition identical".into())
}

fn near_zero() -> Check {
    let th = bundled("near_zero_opt").unwrap();
    let mut g = EGraph::from_term(&t("(* 1e-20 (cos b))")).unwrap();
    saturate(&mut g, &th, &SaturationParams::default());
    let out = extract(&g, &AstSize, g.root().unwrap()).map_err(|e| e.to_string())?;
    ensure!(out == t("0"), "(* 1e-20 (cos b)) -> {out}");
    let mut g = EGraph::from_term(&t("(* 1e-12 (cos b))")).unwrap();
    saturate(&mut g, &th, &SaturationParams::default());
    let out = extract(&g, &AstSize, g.root().unwrap()).map_err(|e| e.to_string())?;
    ensure!(out != t("0"), "1e-12 is outside the tolerance but was pruned");
    Ok("(* 1e-20 (cos b)) -> 0; 1e-12 kept".into())
}

fn main() {
    let checks: [Criterion; 10] = [
        ("1 arithmetic pipeline", arithmetic_pipeline),
        ("2 sign analysis", sign_outcomes),
        ("3 stream fusion", stream_fusion),
        ("4 congruence oracle", congruence_oracle),
        ("5 e-matcher oracle", ematch_oracle),
        ("6 prove vs bfs", prove_vs_bfs),
        ("7 extraction optimality", extraction_optimality),
        ("8 backoff scheduler", backoff),
        ("9 determinism", determinism),
        ("near_zero", near_zero),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{took:.2?}]"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why} [{took:.2?}]");
            }
        }
    }
    println!("{} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
