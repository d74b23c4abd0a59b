use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use capkit_core::classify::{Direction, Ladder, Verdict, Witness};
use capkit_core::generators::{corpus, generate, random_probability, random_two_alternating, sandwich_pair, Family};
use capkit_core::rational::format_rational;
use capkit_core::transforms::{ExtractionTrace, StepPhase};
use capkit_core::{
    chain_infimum, choquet_integral, classify, dominated_extreme_points, extract_chain_probability,
    find_strict_reduction, invariant_subfield, sandwich_probability, transform, Capacity, Chain, Error, GroundSet,
    PivotOrder,
};
use serde_json::{json, Value};

use crate::files::{write_json, CapacityFile, Layout};
use crate::output::{capacity_json, subset_json, table, weights_json, weights_line, Context, Failure, Outcome};
use crate::{fuzz, Command, GenClass, PivotArg};

pub fn dispatch(command: &Command, ctx: &mut Context) -> Result<Outcome, Failure> {
    match command {
        Command::Validate { capacity } => validate(ctx, capacity),
        Command::Classify { capacity, max_order } => {
            let c = ctx.capacity(capacity)?;
            let report = classify(&c, *max_order, ctx.budget)?;
            let mut text = format!("capacity on {} atoms: {}\n", c.atoms(), c.ground().atom_names().join(", "));
            let _ = writeln!(text, "probability measure: {}", report.is_probability);
            ladder_text(&mut text, c.ground(), &report.alternating);
            ladder_text(&mut text, c.ground(), &report.monotone);
            Ok(Outcome::ok(text, json!({ "budget": ctx.budget, "report": report })))
        }
        Command::Integrate { capacity, function } => {
            let c = ctx.capacity(capacity)?;
            let x = ctx.function(function, c.ground())?;
            let value = choquet_integral(&c, &x)?;
            Ok(Outcome::ok(format!("{}\n", format_rational(&value)), json!({ "value": format_rational(&value) })))
        }
        Command::Transform { capacity, set, output } => {
            let c = ctx.capacity(capacity)?;
            let g = c.ground();
            let f = g.parse_subset(set)?;
            let cf = transform(&c, f)?;
            let (before, after) = (invariant_subfield(&c).len(), invariant_subfield(&cf).len());
            let mut text = format!("c^{}:\n{}", g.display_subset(f), table(&cf));
            let _ = writeln!(text, "invariant subfield: {before} → {after} sets");
            if let Some(path) = output {
                write_json(path, &CapacityFile::from_capacity(&cf, Layout::Map))?;
                let _ = writeln!(text, "wrote {}", path.display());
            }
            Ok(Outcome::ok(
                text,
                json!({
                    "set": subset_json(g, f),
                    "capacity": capacity_json(&cf),
                    "subfield_before": before,
                    "subfield_after": after,
                }),
            ))
        }
        Command::Subfield { capacity } => {
            let c = ctx.capacity(capacity)?;
            let g = c.ground();
            let sub = invariant_subfield(&c);
            let names: Vec<String> = sub.members.iter().map(|&a| g.display_subset(a)).collect();
            let text = format!(
                "{} of {} sets invariant{}\n{}\n",
                sub.len(),
                g.subset_count(),
                if sub.is_closed_algebra { "" } else { " (not closed under complement and union)" },
                names.join(" ")
            );
            let members: Vec<Value> = sub.members.iter().map(|&a| subset_json(g, a)).collect();
            Ok(Outcome::ok(text, json!({ "members": members, "is_closed_algebra": sub.is_closed_algebra })))
        }
        Command::Reduce { capacity } => {
            let c = ctx.capacity(capacity)?;
            let g = c.ground();
            match find_strict_reduction(&c)? {
                None => Ok(Outcome::ok(
                    "minimal: capacity is a probability measure\n".into(),
                    json!({ "minimal": true, "reduction": null }),
                )),
                Some(r) => {
                    let text = format!(
                        "not minimal: c^{} is 2-alternating and strictly below c\n{}",
                        g.display_subset(r.set),
                        table(&r.capacity)
                    );
                    Ok(Outcome::violated(
                        text,
                        json!({
                            "minimal": false,
                            "reduction": { "set": subset_json(g, r.set), "capacity": capacity_json(&r.capacity) },
                        }),
                    ))
                }
            }
        }
        Command::Extract { capacity, chain, pivot_order, seed } => {
            let c = ctx.capacity(capacity)?;
            let chain = Chain::parse(c.ground(), chain)?;
            ctx.provenance.seed = *seed;
            let pivot = match pivot_order {
                PivotArg::Lowest => PivotOrder::Lowest,
                PivotArg::Highest => PivotOrder::Highest,
                PivotArg::Random => PivotOrder::Random { seed: seed.unwrap_or_default() },
            };
            let (p, trace) = extract_chain_probability(&c, &chain, pivot)?;
            let mut text = format!("P: {}\n", weights_line(&p));
            trace_text(&mut text, c.ground(), &trace);
            Ok(Outcome::ok(
                text,
                json!({ "pivot": pivot, "measure": weights_json(&p), "trace": trace_json(c.ground(), &trace) }),
            ))
        }
        Command::Sandwich { upper, lower } => {
            let mu = ctx.capacity(upper)?;
            let nu = ctx.capacity(lower)?;
            let (p, trace) = sandwich_probability(&mu, &nu)?;
            let mut text = format!("P: {}\n", weights_line(&p));
            trace_text(&mut text, mu.ground(), &trace);
            let _ = writeln!(text, "backtracks: {}", trace.backtracks.len());
            Ok(Outcome::ok(
                text,
                json!({
                    "measure": weights_json(&p),
                    "backtracks": trace.backtracks.len(),
                    "trace": trace_json(mu.ground(), &trace),
                }),
            ))
        }
        Command::Extreme { capacity, max_permutations } => {
            let c = ctx.capacity(capacity)?;
            let set = dominated_extreme_points(&c, *max_permutations)?;
            let mut text = format!("{} distinct permutation measures\n", set.len());
            let mut items = Vec::new();
            for m in &set.measures {
                let perms: Vec<String> = m.permutations.iter().map(|p| p.to_string()).collect();
                let _ = writeln!(text, "{}  from {}", weights_line(&m.measure), perms.join(" "));
                items.push(json!({ "measure": weights_json(&m.measure), "permutations": perms }));
            }
            Ok(Outcome::ok(text, json!({ "measures": items })))
        }
        Command::Inf { capacities } => {
            let family = capacities.iter().map(|p| ctx.capacity(p)).collect::<Result<Vec<_>, _>>()?;
            let inf = chain_infimum(&family)?;
            let text = format!(
                "infimum is input #{} ({})\n{}",
                inf.minimum_index + 1,
                capacities[inf.minimum_index].display(),
                table(&inf.infimum)
            );
            Ok(Outcome::ok(text, json!({ "minimum_index": inf.minimum_index, "infimum": capacity_json(&inf.infimum) })))
        }
        Command::Fuzz(args) => fuzz::run(args, ctx),
        Command::Gen { class, atoms, seed, output, pair_mode, dense, count } => {
            ctx.provenance.seed = Some(*seed);
            let layout = if *dense { Layout::Dense } else { Layout::Map };
            if *class == GenClass::Corpus {
                let dir = output.as_deref().ok_or_else(|| Failure::usage("gen --class corpus needs -o <directory>"))?;
                return export_corpus(*atoms, *count, *seed, dir, layout);
            }
            gen(*class, *atoms, *seed, output.as_deref(), *pair_mode, layout)
        }
    }
}

fn validate(ctx: &mut Context, path: &Path) -> Result<Outcome, Failure> {
    let file = ctx.capacity_file(path)?;
    let (ground, values) = file.table()?;
    match Capacity::new(ground, values) {
        Ok(c) => Ok(Outcome::ok(
            format!("valid capacity on {} atoms (additive: {})\n", c.atoms(), c.is_additive()),
            json!({ "valid": true, "additive": c.is_additive() }),
        )),
        Err(v) => Ok(Outcome::violated(
            format!("not a capacity: {v}\n"),
            json!({ "valid": false, "violation": v.to_string() }),
        )),
    }
}

/// Ladder witnesses use the order-k form, including k = 2.
fn witness_text(g: &GroundSet, dir: Direction, w: &Witness) -> String {
    let sets: Vec<String> = w.sets.iter().map(|&s| g.display_subset(s)).collect();
    let (lhs, rhs) = (format_rational(&w.lhs), format_rational(&w.rhs));
    match dir {
        Direction::Alternating => {
            format!("sets {}: c(∩) = {lhs} > inclusion-exclusion over unions = {rhs}", sets.join(", "))
        }
        Direction::Monotone => {
            format!("sets {}: c(∪) = {lhs} < inclusion-exclusion over intersections = {rhs}", sets.join(", "))
        }
    }
}

fn ladder_text(out: &mut String, g: &GroundSet, ladder: &Ladder) {
    let name = match ladder.direction {
        Direction::Alternating => "alternating",
        Direction::Monotone => "monotone",
    };
    for r in &ladder.orders {
        let line = match &r.verdict {
            Verdict::Holds => "true".to_string(),
            Verdict::Fails { witness } => format!("false ({})", witness_text(g, ladder.direction, witness)),
            Verdict::ImpliedFails { by_order } => format!("false (order {by_order} fails)"),
            Verdict::ImpliedHolds => "true (by the Möbius criterion)".to_string(),
            Verdict::Unchecked { tuples, budget } => {
                format!("unchecked ({tuples} tuples exceed the budget of {budget})")
            }
        };
        let _ = writeln!(out, "{}-{name}: {line}", r.order);
    }
    let inf = match ladder.infinity_witness {
        None => "true".to_string(),
        Some(s) => {
            let whose = if ladder.direction == Direction::Alternating { "conjugate's " } else { "" };
            format!("false ({whose}Möbius mass negative at {})", g.display_subset(s))
        }
    };
    let _ = writeln!(out, "∞-{name}: {inf}");
}

fn trace_text(out: &mut String, g: &GroundSet, trace: &ExtractionTrace) {
    for (i, s) in trace.steps.iter().enumerate() {
        let phase = match s.phase {
            StepPhase::Chain => "chain",
            StepPhase::Completion => "completion",
            StepPhase::Sandwich => "sandwich",
        };
        let _ = writeln!(
            out,
            "step {}: {phase} F = {}, subfield {} → {}",
            i + 1,
            g.display_subset(s.set),
            s.subfield_before,
            s.subfield_after
        );
    }
    for b in &trace.backtracks {
        let _ = writeln!(
            out,
            "rejected pivot {} (gap {}) at step {}: below the lower capacity at {}",
            g.display_subset(b.candidate),
            format_rational(&b.gap),
            b.step + 1,
            g.display_subset(b.violated_at)
        );
    }
}

fn trace_json(g: &GroundSet, trace: &ExtractionTrace) -> Value {
    let steps: Vec<Value> = trace
        .steps
        .iter()
        .map(|s| {
            json!({
                "phase": s.phase,
                "set": subset_json(g, s.set),
                "after": capacity_json(&s.after),
                "subfield_before": s.subfield_before,
                "subfield_after": s.subfield_after,
            })
        })
        .collect();
    let backtracks: Vec<Value> = trace
        .backtracks
        .iter()
        .map(|b| {
            json!({
                "step": b.step,
                "candidate": subset_json(g, b.candidate),
                "gap": format_rational(&b.gap),
                "violated_at": subset_json(g, b.violated_at),
            })
        })
        .collect();
    json!({ "steps": steps, "backtracks": backtracks })
}

fn gen(
    class: GenClass,
    atoms: usize,
    seed: u64,
    output: Option<&Path>,
    pair_mode: fuzz::PairArg,
    layout: Layout,
) -> Result<Outcome, Failure> {
    let ground = GroundSet::numbered(atoms)?;
    let file = |c: &Capacity| CapacityFile::from_capacity(c, layout);
    let single = match class {
        GenClass::Prob => Some(random_probability(&ground, seed).into_capacity()),
        GenClass::TwoAlt => Some(random_two_alternating(&ground, seed)?),
        GenClass::Belief => Some(generate(&ground, Family::Belief, seed)?),
        GenClass::Plaus => Some(generate(&ground, Family::Plausibility, seed)?),
        GenClass::Pair | GenClass::Corpus => None,
    };
    if let Some(c) = single {
        let doc = file(&c);
        let value = serde_json::to_value(&doc).map_err(|e| Error::InvalidInput(e.to_string()))?;
        return Ok(match output {
            Some(path) => {
                write_json(path, &doc)?;
                Outcome::ok(format!("wrote {}\n", path.display()), json!({ "files": [path], "capacity": value }))
            }
            None => Outcome::ok(
                format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")),
                json!({ "capacity": value }),
            ),
        });
    }
    let (upper, lower) = sandwich_pair(&ground, seed, pair_mode.into())?;
    let (u, l) = (file(&upper), file(&lower));
    let body = json!({ "upper": u, "lower": l });
    Ok(match output {
        Some(path) => {
            let (up, low) = pair_paths(path);
            write_json(&up, &u)?;
            write_json(&low, &l)?;
            Outcome::ok(
                format!("wrote {} and {}\n", up.display(), low.display()),
                json!({ "files": [up, low], "upper": body["upper"], "lower": body["lower"] }),
            )
        }
        None => Outcome::ok(format!("{}\n", serde_json::to_string_pretty(&body).expect("json")), body),
    })
}

/// `dir/name.json` → `dir/name.upper.json`, `dir/name.lower.json`.
pub fn pair_paths(path: &Path) -> (PathBuf, PathBuf) {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "pair".into());
    (path.with_file_name(format!("{stem}.upper.json")), path.with_file_name(format!("{stem}.lower.json")))
}

/// One file per entry, named `<index>-<family>.json`.
fn export_corpus(atoms: usize, count: usize, seed: u64, dir: &Path, layout: Layout) -> Result<Outcome, Failure> {
    let entries = corpus(atoms, &Family::ALL, count, seed)?;
    std::fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for (i, e) in entries.iter().enumerate() {
        let family = serde_json::to_value(e.family).expect("family serializes");
        let path = dir.join(format!("{i:04}-{}.json", family.as_str().unwrap_or("capacity")));
        write_json(&path, &CapacityFile::from_capacity(&e.capacity, layout))?;
        files.push(json!({ "path": path, "family": family, "seed": e.seed }));
    }
    Ok(Outcome::ok(format!("wrote {} capacities to {}\n", files.len(), dir.display()), json!({ "files": files })))
}
