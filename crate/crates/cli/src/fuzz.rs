//! Seeded property campaigns. Case `i` uses seed `seed + i`; results are
//! reported in case order.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use capkit_core::classify::{k_alternating_violation, k_monotone_violation};
use capkit_core::generators::{generate, random_monotone_table, sandwich_pair, Family, PairMode};
use capkit_core::rational::one;
use capkit_core::rng::task_rng;
use capkit_core::transforms::is_invariant;
use capkit_core::{
    chain_infimum, choquet_integral, comonotone_permutation, extract_chain_probability, find_strict_reduction,
    invariant_subfield, is_infinity_alternating, is_infinity_monotone, is_two_alternating, permutation_measure,
    sandwich_probability, subadditivity_search, transform, AtomPermutation, Budget, Capacity, Chain, Error, GroundSet,
    MeasurableFunction, PivotOrder, Subset,
};
use clap::{Args, ValueEnum};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::files::{write_json, CapacityFile, Layout};
use crate::output::{Context, Failure, Outcome, EXIT_BREACH, EXIT_OK, EXIT_VIOLATED};
use crate::shrink::shrink;

#[derive(Debug, Clone, Args)]
pub struct FuzzArgs {
    #[arg(long)]
    pub atoms: usize,
    #[arg(long, default_value_t = 100)]
    pub cases: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Check::All)]
    pub check: Check,
    /// Lower capacities for the sandwich check.
    #[arg(long, value_enum, default_value_t = PairArg::Conjugate)]
    pub pair_mode: PairArg,
    /// Random functions per case (lemma2) or random pairs per case (lemma1).
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// Where minimized witnesses are written.
    #[arg(long, default_value = "fuzz-witnesses")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    All,
    Lemma2,
    Lemma1,
    Props,
    Main,
    Exist,
    Sandwich,
    Inf,
    Classify,
}

impl Check {
    const EACH: [Check; 8] = [
        Check::Lemma2,
        Check::Lemma1,
        Check::Props,
        Check::Main,
        Check::Exist,
        Check::Sandwich,
        Check::Inf,
        Check::Classify,
    ];

    fn name(self) -> &'static str {
        match self {
            Check::All => "all",
            Check::Lemma2 => "lemma2",
            Check::Lemma1 => "lemma1",
            Check::Props => "props",
            Check::Main => "main",
            Check::Exist => "exist",
            Check::Sandwich => "sandwich",
            Check::Inf => "inf",
            Check::Classify => "classify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairArg {
    Conjugate,
    Independent,
}

impl From<PairArg> for PairMode {
    fn from(p: PairArg) -> Self {
        match p {
            PairArg::Conjugate => PairMode::Conjugate,
            PairArg::Independent => PairMode::IndependentBelief,
        }
    }
}

/// What one case established.
#[derive(Debug, Default)]
struct Verdict {
    violation: Option<String>,
    backtracks: usize,
}

impl Verdict {
    fn fail(msg: String) -> Self {
        Verdict { violation: Some(msg), backtracks: 0 }
    }
}

struct Settings {
    samples: usize,
    budget: Budget,
}

#[derive(Debug, Serialize)]
struct CaseFailure {
    case: usize,
    seed: u64,
    kind: &'static str,
    message: String,
    witnesses: Vec<PathBuf>,
}

#[derive(Debug, Serialize)]
struct CheckReport {
    check: Check,
    cases: usize,
    violations: usize,
    breaches: usize,
    backtracks: usize,
    failures: Vec<CaseFailure>,
}

pub fn run(args: &FuzzArgs, ctx: &mut Context) -> Result<Outcome, Failure> {
    if !(2..=5).contains(&args.atoms) {
        return Err(Failure::usage(format!("--atoms must be between 2 and 5, got {}", args.atoms)));
    }
    ctx.provenance.seed = Some(args.seed);
    let ground = GroundSet::numbered(args.atoms)?;
    let settings = Settings { samples: args.samples, budget: ctx.budget };
    let checks: Vec<Check> = match args.check {
        Check::All => Check::EACH.to_vec(),
        one => vec![one],
    };
    let start = Instant::now();
    let mut reports = Vec::new();
    for check in checks {
        reports.push(run_check(check, &ground, args, &settings)?);
    }
    let runtime = start.elapsed();

    let violations: usize = reports.iter().map(|r| r.violations).sum();
    let breaches: usize = reports.iter().map(|r| r.breaches).sum();
    let backtracks: usize = reports.iter().map(|r| r.backtracks).sum();
    let mut text = format!("fuzz atoms={} cases={} seed={}\n", args.atoms, args.cases, args.seed);
    let _ = writeln!(text, "{:<9} {:>6} {:>11} {:>9} {:>11}", "check", "cases", "violations", "breaches", "backtracks");
    for r in &reports {
        let _ = writeln!(
            text,
            "{:<9} {:>6} {:>11} {:>9} {:>11}",
            r.check.name(),
            r.cases,
            r.violations,
            r.breaches,
            r.backtracks
        );
    }
    for r in &reports {
        for f in &r.failures {
            let _ = writeln!(text, "{} case {} (seed {}) {}: {}", r.check.name(), f.case, f.seed, f.kind, f.message);
            for w in &f.witnesses {
                let _ = writeln!(text, "  wrote {}", w.display());
            }
        }
    }
    let _ = writeln!(
        text,
        "violations={violations} breaches={breaches} backtracks={backtracks} runtime={:.3}s",
        runtime.as_secs_f64()
    );
    let result = json!({
        "atoms": args.atoms,
        "cases": args.cases,
        "seed": args.seed,
        "pair_mode": format!("{:?}", args.pair_mode).to_lowercase(),
        "checks": reports,
        "violations": violations,
        "breaches": breaches,
        "backtracks": backtracks,
        "runtime_ms": runtime.as_millis() as u64,
    });
    let code = if breaches > 0 {
        EXIT_BREACH
    } else if violations > 0 {
        EXIT_VIOLATED
    } else {
        EXIT_OK
    };
    Ok(Outcome { code, text, result })
}

fn run_check(check: Check, ground: &GroundSet, args: &FuzzArgs, settings: &Settings) -> Result<CheckReport, Failure> {
    let mut report = CheckReport { check, cases: 0, violations: 0, breaches: 0, backtracks: 0, failures: Vec::new() };
    for case in 0..args.cases {
        let seed = args.seed.wrapping_add(case as u64);
        let inputs = match inputs(check, ground, case, seed, args.pair_mode.into()) {
            Ok(inputs) => inputs,
            Err(e) => {
                report.cases += 1;
                report.breaches += 1;
                report.failures.push(CaseFailure {
                    case,
                    seed,
                    kind: "generator",
                    message: e.to_string(),
                    witnesses: Vec::new(),
                });
                continue;
            }
        };
        report.cases += 1;
        let (kind, message) = match verify(check, &inputs, seed, settings) {
            Ok(v) => {
                report.backtracks += v.backtracks;
                match v.violation {
                    None => continue,
                    Some(msg) => ("violation", msg),
                }
            }
            Err(Error::NoValidPivot(f)) => {
                report.backtracks += f.trace.backtracks.len();
                ("violation", "no valid pivot: every candidate transform drops below the lower capacity".into())
            }
            Err(e @ Error::TheoremViolation { .. }) => ("breach", e.to_string()),
            Err(e) => ("breach", format!("generated input rejected: {e}")),
        };
        if kind == "breach" {
            report.breaches += 1;
        } else {
            report.violations += 1;
        }
        let minimized = shrink(inputs, |trial| failing(check, trial, seed, settings));
        let witnesses = write_witnesses(&args.out_dir, check, case, &minimized)?;
        report.failures.push(CaseFailure { case, seed, kind, message, witnesses });
    }
    Ok(report)
}

fn failing(check: Check, inputs: &[Capacity], seed: u64, settings: &Settings) -> bool {
    match verify(check, inputs, seed, settings) {
        Ok(v) => v.violation.is_some(),
        Err(Error::NoValidPivot(_) | Error::TheoremViolation { .. }) => true,
        Err(_) => false,
    }
}

fn write_witnesses(dir: &Path, check: Check, case: usize, inputs: &[Capacity]) -> Result<Vec<PathBuf>, Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))?;
    let mut paths = Vec::new();
    for (k, c) in inputs.iter().enumerate() {
        let name = match (check, inputs.len()) {
            (_, 1) => format!("{}-case{case}.json", check.name()),
            (Check::Sandwich, _) => format!("{}-case{case}.{}.json", check.name(), ["upper", "lower"][k.min(1)]),
            _ => format!("{}-case{case}-{k}.json", check.name()),
        };
        let path = dir.join(name);
        write_json(&path, &CapacityFile::from_capacity(c, Layout::Map))?;
        paths.push(path);
    }
    Ok(paths)
}

fn pick_family(families: &[Family], atoms: usize, case: usize) -> Family {
    let usable: Vec<Family> = families.iter().copied().filter(|f| f.supports(atoms)).collect();
    usable[case % usable.len()]
}

fn inputs(check: Check, ground: &GroundSet, case: usize, seed: u64, mode: PairMode) -> Result<Vec<Capacity>, Error> {
    let two_alt = || generate(ground, pick_family(&Family::TWO_ALTERNATING, ground.len(), case), seed);
    match check {
        Check::Lemma1 if case % 2 == 1 => {
            let mut rng = task_rng(seed, 22);
            let denom = rng.gen_range(2..=10);
            Ok(vec![random_monotone_table(ground, &mut rng, denom, true)])
        }
        Check::Classify => Ok(vec![generate(ground, pick_family(&Family::ALL, ground.len(), case), seed)?]),
        Check::Sandwich => {
            let (mu, nu) = sandwich_pair(ground, seed, mode)?;
            Ok(vec![mu, nu])
        }
        Check::Inf => {
            let mut rng = task_rng(seed, 23);
            let size = rng.gen_range(2..=4);
            let mut family = vec![two_alt()?];
            while family.len() < size {
                let f = Subset(rng.gen_range(0..ground.subset_count() as u32));
                family.push(transform(family.last().expect("non-empty"), f)?);
            }
            family.shuffle(&mut rng);
            Ok(family)
        }
        _ => Ok(vec![two_alt()?]),
    }
}

fn require_two_alternating(c: &Capacity) -> Result<(), Error> {
    if is_two_alternating(c) {
        Ok(())
    } else {
        Err(Error::Precondition("input is not 2-alternating".into()))
    }
}

fn verify(check: Check, inputs: &[Capacity], seed: u64, s: &Settings) -> Result<Verdict, Error> {
    let c = &inputs[0];
    let g = c.ground();
    match check {
        Check::All => unreachable!("expanded before dispatch"),
        Check::Lemma2 => {
            require_two_alternating(c)?;
            let measures = AtomPermutation::all(c.atoms())
                .map(|pi| permutation_measure(c, &pi).map(|p| (pi, p)))
                .collect::<Result<Vec<_>, _>>()?;
            let mut rng = task_rng(seed, 21);
            for _ in 0..s.samples {
                let x = MeasurableFunction::random(g.clone(), &mut rng);
                let upper = choquet_integral(c, &x)?;
                let sorted = comonotone_permutation(&x);
                for (pi, p) in &measures {
                    let lower = choquet_integral(p, &x)?;
                    if upper < lower || (*pi == sorted && upper != lower) {
                        return Ok(Verdict::fail(format!("∫X dc = {upper}, ∫X dP^π = {lower} for π = {pi}")));
                    }
                }
            }
            Ok(Verdict::default())
        }
        Check::Lemma1 => {
            let report = subadditivity_search(c, s.samples, seed)?;
            let alternating = is_two_alternating(c);
            Ok(match (alternating, report.counterexample.is_some()) {
                (true, true) => Verdict::fail("subadditivity fails for a 2-alternating capacity".into()),
                (false, false) => Verdict::fail("not 2-alternating, yet no indicator pair breaks subadditivity".into()),
                _ => Verdict::default(),
            })
        }
        Check::Props => {
            let sub = invariant_subfield(c);
            for f in g.subsets() {
                let cf = transform(c, f)?;
                let subf = invariant_subfield(&cf);
                let at = |what: &str| Ok(Verdict::fail(format!("{what} fails for F = {}", g.display_subset(f))));
                if !c.dominates(&cf)? {
                    return at("(i) c^F ≤ c");
                }
                if g.subsets().any(|a| (a.is_subset_of(f) || f.is_subset_of(a)) && cf[a] != c[a]) {
                    return at("(ii) agreement on sets nested with F");
                }
                if sub.members.iter().any(|&a| cf[a] != c[a]) {
                    return at("(iii) agreement on the invariant subfield");
                }
                if !is_invariant(&cf, f) {
                    return at("(iv) F invariant for c^F");
                }
                if !sub.is_subset_of(&subf) {
                    return at("(v) subfield growth");
                }
                if sub.contains(f) && cf != *c {
                    return at("(vi) invariant F leaves c unchanged");
                }
                if !is_two_alternating(&cf) {
                    return at("closure of 2-alternation");
                }
                if transform(&cf, f)? != cf {
                    return at("idempotence");
                }
            }
            Ok(Verdict::default())
        }
        Check::Main => {
            let reduction = find_strict_reduction(c)?;
            Ok(match reduction {
                None if !c.is_additive() => Verdict::fail("no strict reduction, yet not additive".into()),
                Some(_) if c.is_additive() => Verdict::fail("a probability measure has a strict reduction".into()),
                Some(r) if !c.dominates(&r.capacity)? || r.capacity == *c => {
                    Verdict::fail("reported reduction is not strictly below".into())
                }
                _ => Verdict::default(),
            })
        }
        Check::Exist => {
            let chain = fuzz_chain(g, seed);
            let pivot = match seed % 3 {
                0 => PivotOrder::Lowest,
                1 => PivotOrder::Highest,
                _ => PivotOrder::Random { seed },
            };
            let (p, trace) = extract_chain_probability(c, &chain, pivot)?;
            let verdict = if !p.is_additive() || !c.dominates(&p)? {
                Verdict::fail("extracted measure is not a probability below c".into())
            } else if let Some(&f) = chain.sets().iter().find(|&&f| p[f] != c[f]) {
                Verdict::fail(format!("P ≠ c on chain set {}", g.display_subset(f)))
            } else if trace.steps.len() > g.subset_count() {
                Verdict::fail("more than 2^n steps".into())
            } else {
                Verdict::default()
            };
            Ok(verdict)
        }
        Check::Sandwich => {
            let (mu, nu) = (&inputs[0], &inputs[1]);
            let (p, trace) = sandwich_probability(mu, nu)?;
            let mut v = Verdict { violation: None, backtracks: trace.backtracks.len() };
            if !p.is_additive() || !mu.dominates(&p)? || !p.dominates(nu)? {
                v.violation = Some("P is not a probability between the bounds".into());
            }
            Ok(v)
        }
        Check::Inf => {
            let inf = chain_infimum(inputs)?;
            Ok(if !is_two_alternating(&inf.infimum) {
                Verdict::fail("infimum is not 2-alternating".into())
            } else if inputs.iter().any(|m| !m.dominates(&inf.infimum).unwrap_or(false)) {
                Verdict::fail("infimum is not below every member".into())
            } else if inputs[inf.minimum_index] != inf.infimum {
                Verdict::fail("infimum is not the least member".into())
            } else {
                Verdict::default()
            })
        }
        Check::Classify => classification(c, s.budget),
    }
}

fn classification(c: &Capacity, budget: Budget) -> Result<Verdict, Error> {
    let bar = c.conjugate();
    let fail = |m: String| Ok(Verdict::fail(m));
    if c.mobius().to_capacity().ok().as_ref() != Some(c) {
        return fail("Möbius roundtrip".into());
    }
    let (inf_alt, inf_mon) = (is_infinity_alternating(c), is_infinity_monotone(c));
    let mut prev = (true, true);
    let top = c.atoms().clamp(2, 4);
    for k in 2..=top {
        let within = |r: Result<Option<_>, Error>| match r {
            Ok(w) => Ok(Some(w.is_none())),
            Err(Error::BudgetExceeded { .. }) => Ok(None),
            Err(e) => Err(e),
        };
        let (Some(alt), Some(mon)) =
            (within(k_alternating_violation(c, k, budget))?, within(k_monotone_violation(c, k, budget))?)
        else {
            break;
        };
        let (Some(bar_mon), Some(bar_alt)) =
            (within(k_monotone_violation(&bar, k, budget))?, within(k_alternating_violation(&bar, k, budget))?)
        else {
            break;
        };
        if alt != bar_mon || mon != bar_alt {
            return fail(format!("conjugation duality at order {k}"));
        }
        if (alt && !prev.0) || (mon && !prev.1) {
            return fail(format!("nesting at order {k}"));
        }
        if (inf_alt && !alt) || (inf_mon && !mon) {
            return fail(format!("∞-criterion disagrees with the order-{k} scan"));
        }
        if k == 2 && (alt && mon) != c.is_additive() {
            return fail("2-alternating and 2-monotone disagrees with additivity".into());
        }
        prev = (alt, mon);
    }
    if c.is_additive() != c.mobius().is_supported_on_singletons() {
        return fail("additivity disagrees with Möbius support".into());
    }
    if is_two_alternating(c) {
        let g = c.ground();
        if g.subsets().any(|a| &c[a] + &c[g.complement(a)] < one()) {
            return fail("c(A) + c(Aᶜ) < 1 for a 2-alternating capacity".into());
        }
    }
    Ok(Verdict::default())
}

/// A random sub-chain of a random permutation's prefix chain.
fn fuzz_chain(ground: &GroundSet, seed: u64) -> Chain {
    let mut rng = task_rng(seed, 24);
    let mut order: Vec<usize> = (0..ground.len()).collect();
    order.shuffle(&mut rng);
    let prefixes = AtomPermutation::new(order).expect("shuffled indices").prefix_chain();
    let sets: Vec<Subset> = prefixes.into_iter().skip(1).filter(|_| rng.gen_bool(0.5)).collect();
    Chain::new(sets).expect("prefixes are nested")
}
