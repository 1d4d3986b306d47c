//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use memevo_core::engine::{self, evaluate_fitnesses, next_generation, EvolutionParams, PlateauRule};
use memevo_core::generation::{initialize_population, random_network, GenerationBudget};
use memevo_core::graph::{Concept, Relation, RelationType, SemanticNetwork};
use memevo_core::seed::{self, rng_from_seed};
use memevo_core::sme::{best_mapping, SmeWeights};
use memevo_core::store::KnowledgeStore;
use memevo_core::variation::{apply_mutation, crossover, crossover_type1, crossover_type2, MutationKind, Operator};
use memevo_core::fixtures;
use rand::Rng;

// Pinned thresholds.
const AC3_APPLICATIONS: usize = 10_000;
const AC3_MAX_ATTEMPTS: usize = 400_000;
const AC4_PAIRS: usize = 200;
const AC4_MAX_RELATIONS: usize = 5;
const AC6_GENERATIONS: usize = 30;
const AC6_POPULATION: usize = 50;
const AC7_RUNS: u64 = 20;
const AC7_POPULATION: usize = 100;
const AC7_SIZE_NETWORK: usize = 3;
const AC7_CHECK_GENERATION: usize = 30;
const AC7_HORIZON: usize = 50;
const AC7_MIN_RATIO: f64 = 3.0;
const AC7_MIN_PLATEAU_SHARE: f64 = 0.8;

type Check = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, Duration, Check); 8] = [
        ("AC1 type I crossover reproduces the bird/airplane offspring", Duration::from_secs(1), ac1),
        ("AC2 type II crossover joins only through stored relations", Duration::from_secs(1), ac2),
        ("AC3 variation never leaves the store", Duration::from_secs(60), ac3),
        ("AC4 matcher equals exhaustive enumeration", Duration::from_secs(120), ac4),
        ("AC5 earth/apple correspondence table", Duration::from_secs(1), ac5),
        ("AC6 elitism and determinism across worker counts", Duration::from_secs(60), ac6),
        ("AC7 convergence on the toy store", Duration::from_secs(15 * 60), ac7),
        ("AC8 generation composition", Duration::from_secs(1), ac8),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let (pass, detail) = match result {
            Ok(d) if took <= limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow")),
            Err(e) => (false, e),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} {name}: {detail} [{:.2}s of {}s]",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn concept(s: &str) -> Concept {
    Concept::new(s).unwrap()
}

fn triples(net: &SemanticNetwork) -> BTreeSet<String> {
    net.relations().iter().map(|r| r.to_string()).collect()
}

fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn ac1() -> Result<String, String> {
    let store = fixtures::store(fixtures::FIG4_STORE);
    let p1 = fixtures::network(fixtures::FIG4_PARENT1);
    let p2 = fixtures::network(fixtures::FIG4_PARENT2);
    let (o1, o2) = crossover_type1(&store, &p1, &p2, (&concept("bird"), &concept("airplane")), 2)
        .map_err(|e| e.to_string())?;
    let want1 = fixtures::network(fixtures::FIG4_OFFSPRING1);
    let want2 = fixtures::network(fixtures::FIG4_OFFSPRING2);
    ensure(triples(&o1) == triples(&want1), || format!("offspring 1 is {:?}", triples(&o1)))?;
    ensure(triples(&o2) == triples(&want2), || format!("offspring 2 is {:?}", triples(&o2)))?;
    let severed = "UsedFor(wing, fly)";
    ensure(!triples(&o1).contains(severed) && !triples(&o2).contains(severed), || "severed relation survived".into())?;
    Ok(format!("{} + {} relations, {severed} severed", o1.relation_count(), o2.relation_count()))
}

fn ac2() -> Result<String, String> {
    let store = fixtures::store(fixtures::FIG5_STORE);
    let p1 = fixtures::network(fixtures::FIG5_PARENT1);
    let p2 = fixtures::network(fixtures::FIG5_PARENT2);
    let support: BTreeSet<String> =
        store.cross_attachments(&p1, &p2, 2).iter().map(|a| a.relation().to_string()).collect();
    let expected: BTreeSet<String> = ["CreatedBy(art, human)", "Desires(human, joy)"].map(String::from).into();
    ensure(support == expected, || format!("attachment support is {support:?}"))?;
    ensure(store.interchangeable_pairs(&p1, &p2, 2).is_empty(), || "parents unexpectedly share a signature".into())?;

    let union = triples(&p1.merge(&p2));
    let mut seen = BTreeSet::new();
    for s in 0..500 {
        let mut rng = rng_from_seed(s);
        let (child, joint) = crossover_type2(&store, &p1, &p2, 2, &mut rng);
        let joint = joint.ok_or("no joining relation")?.relation().to_string();
        let mut want = union.clone();
        want.insert(joint.clone());
        ensure(triples(&child) == want, || format!("seed {s}: {:?}", triples(&child)))?;
        seen.insert(joint);
        let out = crossover(&store, &p1, &p2, 2, &mut rng);
        ensure(out.operator == Operator::CrossoverII, || format!("seed {s}: fell back to {}", out.operator))?;
    }
    ensure(seen == expected, || format!("only saw {seen:?}"))?;
    Ok("500 seeds, both joining relations drawn, nothing else added".into())
}

fn check_offspring(store: &KnowledgeStore, net: &SemanticNetwork, score_min: i8) -> Result<(), String> {
    for r in net.relations() {
        ensure(store.contains_relation(r, score_min), || format!("{r} is not in the store at >= {score_min}"))?;
        ensure(net.contains_concept(r.source()) && net.contains_concept(r.target()), || format!("{r} dangles"))?;
    }
    Ok(())
}

fn ac3() -> Result<String, String> {
    let stores: Vec<(KnowledgeStore, i8)> = vec![
        (fixtures::store(fixtures::FIG1_STORE), 1),
        (fixtures::store(fixtures::FIG3_STORE), 2),
        (fixtures::store(fixtures::FIG4_STORE), 2),
        (fixtures::store(fixtures::FIG5_STORE), 2),
        (fixtures::store(fixtures::TOY_STORE), 2),
    ];
    let mut operators: Vec<String> = vec!["xover1".into(), "xover2".into()];
    operators.extend(MutationKind::ALL.iter().map(|k| Operator::Mutation(*k).to_string()));
    let mut report = Vec::new();
    for (op_index, name) in operators.iter().enumerate() {
        let mut rng = rng_from_seed(seed::derive(3, op_index as u64));
        let mut applied = 0;
        let mut attempts = 0;
        while applied < AC3_APPLICATIONS {
            attempts += 1;
            ensure(attempts <= AC3_MAX_ATTEMPTS, || format!("{name}: only {applied} applications were feasible"))?;
            let (store, score_min) = &stores[attempts % stores.len()];
            let budget = GenerationBudget::new(rng.random_range(1..=6), 10).unwrap();
            let p1 = random_network(store, budget, *score_min, &mut rng, None).map_err(|e| e.to_string())?;
            let p2 = random_network(store, budget, *score_min, &mut rng, None).map_err(|e| e.to_string())?;
            let offspring = match op_index {
                0 => {
                    let pairs = store.interchangeable_pairs(&p1, &p2, *score_min);
                    if pairs.is_empty() {
                        continue;
                    }
                    let (a, b) = &pairs[rng.random_range(0..pairs.len())];
                    let (o1, o2) = crossover_type1(store, &p1, &p2, (a, b), *score_min).map_err(|e| e.to_string())?;
                    vec![o1, o2]
                }
                1 => vec![crossover_type2(store, &p1, &p2, *score_min, &mut rng).0],
                k => match apply_mutation(MutationKind::ALL[k - 2], store, &p1, *score_min, &mut rng) {
                    Ok(child) => vec![child],
                    Err(_) => continue,
                },
            };
            for child in &offspring {
                check_offspring(store, child, *score_min).map_err(|e| format!("{name}: {e}"))?;
            }
            applied += 1;
        }
        report.push(format!("{name} {applied}/{attempts}"));
    }
    Ok(format!("0 invalid offspring ({})", report.join(", ")))
}

/// Best score over all injective partial concept maps, written independently
/// of the matcher.
fn sme_oracle(base: &SemanticNetwork, target: &SemanticNetwork, w: &SmeWeights) -> f64 {
    let bc: Vec<Concept> = base.concepts().iter().cloned().collect();
    let tc: Vec<Concept> = target.concepts().iter().cloned().collect();
    let held: BTreeSet<(RelationType, Concept, Concept)> =
        target.relations().iter().map(|r| (r.rel_type(), r.source().clone(), r.target().clone())).collect();
    let mut best = 0.0f64;
    let mut image: HashMap<Concept, Concept> = HashMap::new();
    let mut used = vec![false; tc.len()];
    fn walk(
        i: usize,
        bc: &[Concept],
        tc: &[Concept],
        used: &mut [bool],
        image: &mut HashMap<Concept, Concept>,
        score: &dyn Fn(&HashMap<Concept, Concept>) -> f64,
        best: &mut f64,
    ) {
        if i == bc.len() {
            *best = best.max(score(image));
            return;
        }
        walk(i + 1, bc, tc, used, image, score, best);
        for j in 0..tc.len() {
            if !used[j] {
                used[j] = true;
                image.insert(bc[i].clone(), tc[j].clone());
                walk(i + 1, bc, tc, used, image, score, best);
                image.remove(&bc[i]);
                used[j] = false;
            }
        }
    }
    let score = |image: &HashMap<Concept, Concept>| {
        let matched: Vec<&Relation> = base
            .relations()
            .iter()
            .filter(|r| match (image.get(r.source()), image.get(r.target())) {
                (Some(s), Some(t)) => held.contains(&(r.rel_type(), s.clone(), t.clone())),
                _ => false,
            })
            .collect();
        let mut touching: BTreeMap<&Concept, usize> = BTreeMap::new();
        for r in &matched {
            *touching.entry(r.source()).or_default() += 1;
            *touching.entry(r.target()).or_default() += 1;
        }
        let connected = matched.iter().filter(|r| touching[r.source()] > 1 || touching[r.target()] > 1).count();
        w.base_weight * matched.len() as f64 + w.trickle_factor * connected as f64
    };
    walk(0, &bc, &tc, &mut used, &mut image, &score, &mut best);
    best
}

fn random_small_network<R: Rng>(rng: &mut R, prefix: &str) -> SemanticNetwork {
    const TYPES: [RelationType; 4] = [RelationType::IsA, RelationType::HasA, RelationType::AtLocation, RelationType::PartOf];
    let n = rng.random_range(0..=AC4_MAX_RELATIONS);
    let mut net = SemanticNetwork::new();
    while net.relation_count() < n {
        let s = rng.random_range(0..5);
        let t = rng.random_range(0..5);
        if s == t {
            continue;
        }
        let ty = TYPES[rng.random_range(0..TYPES.len())];
        net.add_relation(Relation::new(ty, concept(&format!("{prefix}{s}")), concept(&format!("{prefix}{t}")), 1).unwrap());
    }
    net
}

fn ac4() -> Result<String, String> {
    let w = SmeWeights::default();
    let mut rng = rng_from_seed(44);
    let mut nonzero = 0;
    for i in 0..AC4_PAIRS {
        let base = random_small_network(&mut rng, "b");
        let target = random_small_network(&mut rng, "t");
        let got = best_mapping(&base, &target, &w);
        let want = sme_oracle(&base, &target, &w);
        ensure(got.score == want, || format!("pair {i}: matcher {} vs oracle {want}", got.score))?;
        ensure(got.is_consistent(), || format!("pair {i}: mapping is not one-to-one"))?;
        if want > 0.0 {
            nonzero += 1;
        }
    }
    Ok(format!("{AC4_PAIRS} pairs equal, {nonzero} with a non-empty mapping"))
}

fn memevo(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_memevo")).args(args).output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("memevo {args:?} failed: {}", String::from_utf8_lossy(&out.stderr)))?;
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn ac5() -> Result<String, String> {
    let base_path = fixture_path("fig9_base.json");
    let target_path = fixture_path("fig10_target.json");
    let text = memevo(&["score", base_path.to_str().unwrap(), target_path.to_str().unwrap()])?;

    let mut section = "";
    let mut concepts = BTreeMap::new();
    let mut relations = BTreeMap::new();
    let mut printed_score = None;
    for line in text.lines() {
        match line {
            "Concepts" | "Relations" => section = line,
            l if l.starts_with("score: ") => printed_score = l["score: ".len()..].parse::<f64>().ok(),
            l if l.starts_with("Base") => {}
            l => {
                let cols: Vec<&str> = l.split("  ").map(str::trim).filter(|c| !c.is_empty()).collect();
                ensure(cols.len() == 2, || format!("unreadable row {l:?}"))?;
                let map = if section == "Concepts" { &mut concepts } else { &mut relations };
                map.insert(cols[0].to_string(), cols[1].to_string());
            }
        }
    }
    let want_concepts: BTreeMap<String, String> = [
        ("earth", "apple"),
        ("moon", "leave"),
        ("planet", "fruit"),
        ("solar system", "tree"),
        ("galaxy", "mountain"),
        ("universe", "forest"),
        ("spherical", "green"),
        ("matter", "\u{2014}"),
        ("mass", "seed"),
        ("large object", "source of vitamin"),
    ]
    .into_iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    let want_relations: BTreeMap<String, String> = [
        ("HasA(earth, moon)", "HasA(apple, leave)"),
        ("HasProperty(earth, spherical)", "HasProperty(apple, green)"),
        ("HasProperty(moon, spherical)", "HasProperty(leave, green)"),
        ("IsA(earth, planet)", "IsA(apple, fruit)"),
        ("IsA(planet, large object)", "IsA(fruit, source of vitamin)"),
        ("AtLocation(planet, solar system)", "AtLocation(fruit, tree)"),
        ("AtLocation(solar system, galaxy)", "AtLocation(tree, mountain)"),
        ("PartOf(solar system, universe)", "PartOf(tree, forest)"),
        ("MadeOf(planet, matter)", "\u{2014}"),
        ("HasA(planet, mass)", "HasA(fruit, seed)"),
        ("HasProperty(matter, mass)", "\u{2014}"),
    ]
    .into_iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    ensure(concepts == want_concepts, || format!("concept rows {concepts:?}"))?;
    ensure(relations == want_relations, || format!("relation rows {relations:?}"))?;

    // Maximality: at most min(base, target) relations of each type can match,
    // and each matched relation earns at most base weight plus trickle.
    let base = memevo_core::format::read_network(&base_path).map_err(|e| e.to_string())?;
    let target = memevo_core::format::read_network(&target_path).map_err(|e| e.to_string())?;
    let count = |n: &SemanticNetwork| {
        let mut m: BTreeMap<RelationType, usize> = BTreeMap::new();
        for r in n.relations() {
            *m.entry(r.rel_type()).or_default() += 1;
        }
        m
    };
    let (cb, ct) = (count(&base), count(&target));
    let cap: usize = cb.iter().map(|(t, n)| (*n).min(*ct.get(t).unwrap_or(&0))).sum();
    let w = SmeWeights::default();
    let bound = w.ses(cap, cap);
    let score = printed_score.ok_or("no score line")?;
    ensure((score - bound).abs() < 1e-9, || format!("score {score} below the bound {bound}"))?;
    Ok(format!("10 concept rows and 11 relation rows match, score {score} = upper bound"))
}

fn ac6() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = format!(
        "dumps = [{:?}]\nbase = {:?}\nout_dir = \"out\"\n\n[evolution]\nsize_pop = {AC6_POPULATION}\nmax_generations = {AC6_GENERATIONS}\n\n[plateau]\nwindow = 0\n",
        fixture_path("toy_store.tsv"),
        fixture_path("toy_reference.json"),
    );
    let config_path = dir.path().join("run.toml");
    std::fs::write(&config_path, config).map_err(|e| e.to_string())?;
    let cfg = config_path.to_str().unwrap();
    let mut csvs = Vec::new();
    for (i, workers) in ["1", "4", "1"].iter().enumerate() {
        let out = dir.path().join(format!("out{i}"));
        memevo(&["--workers", workers, "evolve", "--config", cfg, "--seed", "42", "--out-dir", out.to_str().unwrap()])?;
        csvs.push(std::fs::read(out.join("stats.csv")).map_err(|e| e.to_string())?);
    }
    ensure(csvs[0] == csvs[1], || "--workers 4 changed the stats".into())?;
    ensure(csvs[0] == csvs[2], || "a repeated run changed the stats".into())?;
    let text = String::from_utf8(csvs[0].clone()).unwrap();
    let best: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    ensure(best.len() == AC6_GENERATIONS + 1, || format!("{} generations recorded", best.len()))?;
    ensure(best.windows(2).all(|w| w[1] >= w[0]), || format!("best fitness decreased: {best:?}"))?;
    Ok(format!("{} rows identical across 3 runs, best {} -> {}", best.len(), best[0], best[best.len() - 1]))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn ac7() -> Result<String, String> {
    let store = fixtures::store(fixtures::TOY_STORE);
    let base = fixtures::network(fixtures::TOY_REFERENCE);
    ensure(base.relation_count() == 10, || "reference network must hold 10 relations".into())?;
    ensure(store.len() >= base.relation_count() + 200, || "too few distractors".into())?;
    let rule = PlateauRule::default();
    let (mut first, mut later, mut plateaued) = (Vec::new(), Vec::new(), 0);
    for s in 0..AC7_RUNS {
        let params = EvolutionParams {
            size_pop: AC7_POPULATION,
            size_network: AC7_SIZE_NETWORK,
            max_generations: AC7_HORIZON,
            master_seed: s,
            ..EvolutionParams::default()
        };
        // Run the full horizon; the plateau rule is applied to the series afterwards.
        let never = PlateauRule { window: 0, ..rule };
        let r = engine::run(&store, &base, params, SmeWeights::default(), never, |_| {}).map_err(|e| e.to_string())?;
        let best: Vec<f64> = r.stats.iter().map(|s| s.best_fitness).collect();
        first.push(best[0]);
        later.push(best[AC7_CHECK_GENERATION]);
        if rule.first_reached(&best).is_some_and(|t| t <= AC7_HORIZON) {
            plateaued += 1;
        }
    }
    let (m0, m30) = (median(first), median(later));
    let share = plateaued as f64 / AC7_RUNS as f64;
    let detail = format!("median {m0} -> {m30} ({:.2}x), {plateaued}/{AC7_RUNS} plateaued", m30 / m0);
    ensure(m30 >= AC7_MIN_RATIO * m0, || detail.clone())?;
    ensure(share >= AC7_MIN_PLATEAU_SHARE, || detail.clone())?;
    Ok(detail)
}

fn ac8() -> Result<String, String> {
    let store = fixtures::store(fixtures::TOY_STORE);
    let base = fixtures::network(fixtures::TOY_REFERENCE);
    let cases = [(200, 0.85, (170, 29, 1)), (10, 0.0, (0, 9, 1)), (7, 1.0, (6, 0, 1))];
    let mut seen = Vec::new();
    for (size_pop, prob_rec, want) in cases {
        let params = EvolutionParams { size_pop, prob_rec, size_tourn: size_pop.min(8), ..EvolutionParams::default() };
        let c = params.composition();
        ensure((c.crossover_offspring, c.reproductions, c.elite) == want, || format!("({size_pop}, {prob_rec}) planned {c:?}"))?;
        let budget = params.budget().map_err(|e| e.to_string())?;
        let pop = initialize_population(&store, size_pop, budget, params.score_min, 1).map_err(|e| e.to_string())?;
        let fit = evaluate_fitnesses(&base, &pop, &SmeWeights::default());
        let (next, report) = next_generation(&store, &pop, &fit, &params, seed::generation_seed(1, 0));
        let got = (report.crossover_offspring, report.reproductions, report.elite);
        ensure(got == want, || format!("({size_pop}, {prob_rec}) produced {got:?}"))?;
        ensure(next.len() == size_pop, || format!("({size_pop}, {prob_rec}) population of {}", next.len()))?;
        seen.push(format!("{}+{}+{}", got.0, got.1, got.2));
    }
    Ok(seen.join(", "))
}
