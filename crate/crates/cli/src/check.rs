//! Property suites behind `gcoalg check`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use graded_coalg::ctmc::{
    check_homomorphism, eigen_solution, expm::expm_time, lumpability_quotient, probe_times, repairable_3state,
    repairable_4state, repairable_homomorphism, LabelledModel,
};
use graded_coalg::findist::distlaw::{check_distributive_law, check_monad_laws, BindVariant, Enumeration, LawReport, LawVariant};
use graded_coalg::findist::Dist;
use graded_coalg::gcoalg::{
    check_graded_axioms, labelled_roundtrip_check, random_walk, trace_equivalent, TraceConfig, TraceVerdict,
    WordGradedKernel,
};
use graded_coalg::glogic::{
    find_distinguishing_formula, invariance_suite, logical_quotient, quantitative_formulas, trace_logic_axiom_check,
    trace_semantics, uniform_depth, AxiomInstance, Evaluator, FormulaBudget, Instance,
};
use graded_coalg::numeric::{format_f64, ratio, to_f64, Rational};
use graded_coalg::timealg::{SamplingWord, TimeValue};

use crate::models::rates;
use crate::output::{csv, json};
use crate::{Failure, Format, Global, Mutation};

pub const SUITES: [&str; 16] = [
    "samp",
    "distlaw",
    "monad",
    "chapman",
    "eigen",
    "closedform",
    "homomorphism",
    "lumping",
    "graded",
    "roundtrip",
    "trace",
    "factorization",
    "invariance",
    "expressivity",
    "axioms",
    "randomwalk",
];

struct Outcome {
    name: &'static str,
    passed: bool,
    summary: String,
    /// Extra lines shown when the suite is selected explicitly or fails.
    details: Vec<String>,
}

struct Ctx {
    m4: LabelledModel,
    m3: LabelledModel,
    lambda: Rational,
    mu: Rational,
    mutate: Option<Mutation>,
    seed: u64,
}

fn law_outcome(name: &'static str, r: &LawReport) -> Outcome {
    let details = r.checked.iter().map(|(law, n)| format!("{law}: {n} instances")).collect();
    match &r.counterexample {
        None => Outcome { name, passed: true, summary: format!("{} instances exact", r.total()), details },
        Some(c) => Outcome { name, passed: false, summary: format!("counterexample: {c}"), details },
    }
}

fn random_time(rng: &mut ChaCha8Rng, max_hundredths: i64) -> TimeValue {
    TimeValue::from_ratio(rng.random_range(0..=max_hundredths), 100).expect("nonnegative")
}

fn random_word(rng: &mut ChaCha8Rng) -> SamplingWord {
    let n = rng.random_range(1..=3);
    SamplingWord::normalize(
        (0..n).map(|_| (TimeValue::from_ratio(rng.random_range(0..=8), rng.random_range(1..=4)).expect("valid"), rng.random_range(0..=2))),
    )
}

fn samp(ctx: &Ctx) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut failures = Vec::new();
    let e = SamplingWord::unit();
    for _ in 0..1000 {
        let (u, v, w) = (random_word(&mut rng), random_word(&mut rng), random_word(&mut rng));
        if u.mul(&v).mul(&w) != u.mul(&v.mul(&w)) {
            failures.push(format!("associativity at ({u}), ({v}), ({w})"));
        }
        if e.mul(&u) != u || u.mul(&e) != u {
            failures.push(format!("unit at ({u})"));
        }
        let uv = u.mul(&v);
        if uv.length() != u.length() + v.length() || uv.count() != u.count() + v.count() {
            failures.push(format!("morphism at ({u}), ({v})"));
        }
    }
    Outcome {
        name: "samp",
        passed: failures.is_empty(),
        summary: format!("1000 random triples, {} failures", failures.len()),
        details: failures.into_iter().take(5).collect(),
    }
}

fn chapman(ctx: &Ctx) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut details = vec!["model  s  t  residual".to_string()];
    let mut worst: f64 = 0.0;
    let mut identity = true;
    for (name, m) in [("repairable4", &ctx.m4), ("repairable3", &ctx.m3)] {
        let k0 = m.kernel_at(&TimeValue::zero()).matrix;
        identity &= k0 == nalgebra::DMatrix::identity(m.n_states(), m.n_states());
        for i in 0..100 {
            let (s, t) = (random_time(&mut rng, 500), random_time(&mut rng, 500));
            let lhs = m.kernel_at(&t).matrix * m.kernel_at(&s).matrix;
            let rhs = m.kernel_at(&(s.clone() + t.clone())).matrix;
            let r = (lhs - rhs).amax();
            worst = worst.max(r);
            if i < 5 {
                details.push(format!("{name}  {s}  {t}  {}", format_f64(r)));
            }
        }
    }
    Outcome {
        name: "chapman",
        passed: identity && worst <= 1e-8,
        summary: format!("200 pairs, max residual {}, γ_0 identity: {identity}", format_f64(worst)),
        details,
    }
}

fn eigen(ctx: &Ctx) -> Outcome {
    let s = to_f64(&(&ctx.lambda + &ctx.mu));
    let cases = [(&ctx.m4, vec![0.0, -s, -s, -2.0 * s]), (&ctx.m3, vec![0.0, -s, -2.0 * s])];
    let mut worst: f64 = 0.0;
    let mut details = Vec::new();
    for (m, expected) in cases {
        match eigen_solution(m.generator()) {
            Some(e) => {
                let gap = e.eigenvalues.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                worst = worst.max(gap);
                details.push(format!("{:?} vs {:?}", e.eigenvalues, expected));
            }
            None => worst = f64::INFINITY,
        }
    }
    Outcome { name: "eigen", passed: worst <= 1e-9, summary: format!("max eigenvalue error {}", format_f64(worst)), details }
}

fn closedform(ctx: &Ctx) -> Outcome {
    let (l, m) = (to_f64(&ctx.lambda), to_f64(&ctx.mu));
    // each component is independently up after one time unit with probability p
    let p = m / (l + m) + l / (l + m) * (-(l + m)).exp();
    let expected = p * p;
    let t = TimeValue::from_int(1);
    let unif = ctx.m4.kernel_at(&t).entry(3, 3);
    let pade = expm_time(ctx.m4.generator().matrix(), 1.0)[(3, 3)];
    let spectral = eigen_solution(ctx.m4.generator()).map(|e| e.kernel_at(1.0)[(3, 3)]).unwrap_or(f64::NAN);
    let worst = [unif, pade, spectral].iter().map(|v| (v - expected).abs()).fold(0.0, f64::max);
    Outcome {
        name: "closedform",
        passed: worst <= 1e-9,
        summary: format!("γ_1(2|2) = {} (max deviation {})", format_f64(unif), format_f64(worst)),
        details: vec![
            format!("closed form      {}", format_f64(expected)),
            format!("uniformization   {}", format_f64(unif)),
            format!("scaling-squaring {}", format_f64(pade)),
            format!("eigenformula     {}", format_f64(spectral)),
        ],
    }
}

fn homomorphism(ctx: &Ctx) -> graded_coalg::Result<Outcome> {
    let r = check_homomorphism(&repairable_homomorphism(), &ctx.m4, &ctx.m3, &probe_times(), 1e-8)?;
    Ok(Outcome {
        name: "homomorphism",
        passed: r.passed(),
        summary: format!("max residual {}", format_f64(r.max_residual())),
        details: r.residuals.iter().map(|(t, v)| format!("t = {t}: {}", format_f64(*v))).collect(),
    })
}

fn lumping(ctx: &Ctx) -> graded_coalg::Result<Outcome> {
    let l = lumpability_quotient(&ctx.m4)?;
    let blocks_ok = l.blocks == vec![vec![0], vec![1, 2], vec![3]];
    let rates_ok = l.quotient.generator().rates() == ctx.m3.generator().rates();
    Ok(Outcome {
        name: "lumping",
        passed: blocks_ok && rates_ok && l.report.passed(),
        summary: format!("blocks {:?}, quotient generator equals 3-state generator: {rates_ok}", l.blocks),
        details: vec![],
    })
}

fn graded(ctx: &Ctx) -> graded_coalg::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for m in [&ctx.m4, &ctx.m3] {
        let pairs: Vec<_> = (0..50).map(|_| (random_word(&mut rng), random_word(&mut rng))).collect();
        let r = check_graded_axioms(&WordGradedKernel::<_, f64>::new(m), &pairs, 1e-8)?;
        worst = worst.max(r.worst());
        ok &= r.passed();
    }
    Ok(Outcome { name: "graded", passed: ok, summary: format!("100 word pairs, max residual {}", format_f64(worst)), details: vec![] })
}

fn roundtrip(ctx: &Ctx) -> graded_coalg::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let words: Vec<_> = (0..20).map(|_| random_word(&mut rng)).collect();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for m in [&ctx.m4, &ctx.m3] {
        let r = labelled_roundtrip_check(&WordGradedKernel::<_, f64>::new(m), &probe_times(), &words, 1e-8)?;
        ok &= r.passed();
        worst = worst.max(r.worst());
    }
    Ok(Outcome { name: "roundtrip", passed: ok, summary: format!("max residual {}", format_f64(worst)), details: vec![] })
}

fn trace(ctx: &Ctx) -> graded_coalg::Result<Outcome> {
    let config = TraceConfig::default();
    let lr = trace_equivalent(&ctx.m4, 1, &ctx.m4, 2, &config)?;
    let zt = trace_equivalent(&ctx.m4, 0, &ctx.m4, 3, &config)?;
    let cross = trace_equivalent(&ctx.m4, 1, &ctx.m3, 1, &config)?;
    let witness_ok = match &zt {
        TraceVerdict::Distinguished { word, gap, .. } => word.to_string() == "0:1" && (gap - 1.0).abs() < 1e-12,
        _ => false,
    };
    let passed = !lr.is_distinguished() && witness_ok && !cross.is_distinguished();
    Ok(Outcome {
        name: "trace",
        passed,
        summary: "L~R, 0 vs 2 separated at 0:1, L~1 across models".to_string(),
        details: vec![lr.to_json().to_string(), zt.to_json().to_string(), cross.to_json().to_string()],
    })
}

fn factorization(ctx: &Ctx) -> graded_coalg::Result<Outcome> {
    let budget = FormulaBudget::default();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for m in [&ctx.m4, &ctx.m3] {
        let ev = Evaluator::new(m);
        let k = WordGradedKernel::<_, f64>::new(m);
        for phi in quantitative_formulas(m.labels(), &budget) {
            let depth = uniform_depth(&phi)?;
            let direct = ev.quantitative(&phi)?;
            for (x, value) in direct.iter().enumerate() {
                let via = trace_semantics(&phi, m.labels(), &k.trace_vector(x, &depth)?)?;
                worst = worst.max((value.to_f64() - via.to_f64()).abs());
            }
            count += 1;
        }
    }
    Ok(Outcome {
        name: "factorization",
        passed: worst <= 1e-9,
        summary: format!("{count} formulas, max |⟦φ⟧ − ⟨φ⟩∘trace| = {}", format_f64(worst)),
        details: vec![],
    })
}

fn invariance(ctx: &Ctx) -> graded_coalg::Result<Outcome> {
    let budget = FormulaBudget { tol: 1e-8, ..FormulaBudget::default() };
    let mut details = Vec::new();
    let mut ok = true;
    for instance in [Instance::Boolean, Instance::Quantitative] {
        let within = invariance_suite(&ctx.m4, &ctx.m4, &[(1, 2)], instance, &budget)?;
        let across = invariance_suite(&ctx.m4, &ctx.m3, &[(1, 1)], instance, &budget)?;
        ok &= within.passed() && across.passed();
        details.push(format!(
            "{instance}: {} formulas ({} distinct), {} disagreements",
            within.examined.max(across.examined),
            within.formulas.max(across.formulas),
            within.disagreements.len() + across.disagreements.len()
        ));
    }
    Ok(Outcome { name: "invariance", passed: ok, summary: details.join("; "), details: vec![] })
}

fn expressivity(ctx: &Ctx) -> graded_coalg::Result<Outcome> {
    let budget = FormulaBudget::default();
    let q = logical_quotient(&ctx.m4, Instance::Boolean, &budget)?;
    let l = lumpability_quotient(&ctx.m4)?;
    let d = find_distinguishing_formula(&ctx.m4, 0, &ctx.m4, 3, Instance::Boolean, &budget)?;
    let shallow = d.as_ref().is_some_and(|d| d.formula.modal_depth() <= 1);
    Ok(Outcome {
        name: "expressivity",
        passed: q.blocks == l.blocks && shallow,
        summary: format!(
            "logical partition {:?}, witness for 0 vs 2: {}",
            q.blocks,
            d.map(|d| d.formula.to_string()).unwrap_or_else(|| "none".into())
        ),
        details: vec![],
    })
}

fn axioms() -> Outcome {
    let quant = trace_logic_axiom_check(AxiomInstance::Quantitative);
    let boolean = trace_logic_axiom_check(AxiomInstance::BooleanWithExpectation);
    let refuted = boolean.counterexample.as_ref().map(|c| c.to_string()).unwrap_or_else(|| "none".into());
    Outcome {
        name: "axioms",
        passed: quant.passed() && !boolean.passed(),
        summary: format!("quantitative: {} instances; Boolean with expectation refuted by {refuted}", quant.total()),
        details: quant.checked.iter().map(|(n, k)| format!("{n}: {k}")).collect(),
    }
}

fn randomwalk() -> graded_coalg::Result<Outcome> {
    let w = random_walk(6)?;
    let two = w.iterate(2, &0)?;
    let expected = Dist::full([(-2, ratio(1, 4)), (0, ratio(1, 2)), (2, ratio(1, 4))])?;
    let mut ok = two == expected;
    for x in -6..=6 {
        for m in 0..=6 {
            for n in 0..=(6 - m) {
                let composed = w.iterate(m, &x)?.bind(|y| w.iterate(n, y).expect("in carrier"));
                ok &= composed == w.iterate(m + n, &x)?;
            }
        }
    }
    Ok(Outcome { name: "randomwalk", passed: ok, summary: format!("γ_2(0) = {}; γ_(m+n) = γ_m;γ_n for m+n ≤ 6", two.to_ket(|x| x.to_string())), details: vec![] })
}

fn run_suite(name: &str, ctx: &Ctx) -> graded_coalg::Result<Outcome> {
    Ok(match name {
        "samp" => samp(ctx),
        "distlaw" => {
            let law = if ctx.mutate == Some(Mutation::SwapLabel) { LawVariant::SwapLabel } else { LawVariant::Strength };
            law_outcome("distlaw", &check_distributive_law(law, &Enumeration::default()))
        }
        "monad" => {
            let bind = if ctx.mutate == Some(Mutation::FirstAtom) { BindVariant::FirstAtom } else { BindVariant::Standard };
            law_outcome("monad", &check_monad_laws(bind, 3, 2, 4))
        }
        "chapman" => chapman(ctx),
        "eigen" => eigen(ctx),
        "closedform" => closedform(ctx),
        "homomorphism" => homomorphism(ctx)?,
        "lumping" => lumping(ctx)?,
        "graded" => graded(ctx)?,
        "roundtrip" => roundtrip(ctx)?,
        "trace" => trace(ctx)?,
        "factorization" => factorization(ctx)?,
        "invariance" => invariance(ctx)?,
        "expressivity" => expressivity(ctx)?,
        "axioms" => axioms(),
        "randomwalk" => randomwalk()?,
        _ => unreachable!("suite names are validated"),
    })
}

pub fn run(g: &Global, suites: &[String], mutate: Option<Mutation>, seed: u64, list: bool) -> Result<(), Failure> {
    if list {
        for s in SUITES {
            println!("{s}");
        }
        return Ok(());
    }
    if let Some(bad) = suites.iter().find(|s| !SUITES.contains(&s.as_str())) {
        return Err(Failure::Usage(format!("unknown suite `{bad}` (try --list)")));
    }
    let (lambda, mu) = rates(g)?;
    let ctx = Ctx {
        m4: repairable_4state(&lambda, &mu)?,
        m3: repairable_3state(&lambda, &mu)?,
        lambda,
        mu,
        mutate,
        seed,
    };
    let selected: Vec<&str> =
        if suites.is_empty() { SUITES.to_vec() } else { SUITES.iter().copied().filter(|s| suites.iter().any(|t| t == s)).collect() };
    let explicit = !suites.is_empty();
    let mut outcomes = Vec::new();
    for name in selected {
        outcomes.push(run_suite(name, &ctx)?);
    }
    let header: Vec<String> = ["suite", "result", "summary"].iter().map(|s| s.to_string()).collect();
    let verdict = |o: &Outcome| if o.passed { "PASS" } else { "FAIL" }.to_string();
    let rows: Vec<Vec<String>> = outcomes.iter().map(|o| vec![o.name.to_string(), verdict(o), o.summary.clone()]).collect();
    let out = match g.format {
        Format::Table => {
            let mut s = String::new();
            for o in &outcomes {
                s.push_str(&format!("{} {}: {}\n", verdict(o), o.name, o.summary));
                if explicit || !o.passed {
                    for d in &o.details {
                        s.push_str(&format!("    {d}\n"));
                    }
                }
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            s.push_str(&format!("{} suites, {} passed, {} failed\n", outcomes.len(), outcomes.len() - failed, failed));
            s
        }
        Format::Csv => csv(&header, &rows),
        Format::Json => json(&json!({
            "suites": outcomes.iter().map(|o| json!({
                "name": o.name,
                "passed": o.passed,
                "summary": o.summary,
                "details": o.details,
            })).collect::<Vec<_>>(),
        })),
    };
    print!("{out}");
    if outcomes.iter().all(|o| o.passed) {
        Ok(())
    } else {
        Err(Failure::Property)
    }
}
