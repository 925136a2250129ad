//! Acceptance criteria. Prints one PASS or FAIL line per criterion and
//! exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{check_hungarian, check_kendall, check_levenshtein, check_tree_edit_distance};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scratch_creativity::concept::{
    check_metric_axioms, Concept, CosineMetric, DiscreteMetric, DistanceMetric, EuclideanMetric, Product,
    SemanticNetwork,
};
use scratch_creativity::measures::{flexibility, fluency, originality, MeasureConfig, ProductDistance};
use scratch_creativity::media::FeatureStore;
use scratch_creativity::rank::{
    evaluate, kendall_tau, restricted_tau, synthetic_labels, Mode, Protocol, ScoredCorpus, TauVariant, Target,
    DEFAULT_SEED,
};
use scratch_creativity::scratch::{block_distance, block_network, block_node_id, parse_sb3, BlockConcept};
use scratch_creativity::synth::{expert_assignment, write_synthetic_corpus};

const EXACT_TOL: f64 = 1e-12;
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const TAU_THRESHOLD: f64 = 0.9;
const EXPERIMENT_BUDGET: Duration = Duration::from_secs(300);

type Outcome = Result<String, String>;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= EXACT_TOL
}

fn worked_example() -> Outcome {
    let net = SemanticNetwork::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/shapes.net")).map_err(|e| e.to_string())?;
    let cfg = MeasureConfig::new(false, false, ProductDistance::Alignment);
    let figure = Product::from_symbols(["circ", "sq", "tri", "tri", "tri", "tri"]);
    let house = Product::from_symbols(["tri", "sq"]);
    let got = (
        fluency(&figure, &net, &cfg).map_err(|e| e.to_string())?,
        flexibility(&figure, &net, &cfg).map_err(|e| e.to_string())?,
        originality(&figure, &[house], &net, &cfg).map_err(|e| e.to_string())?,
    );
    // circ and sq sit one step from the null, every tri too; the ordered
    // pair sum is 2 * (circ-sq 2 + circ-tri 4 * 2 + sq-tri 4 * 1) = 28;
    // the house absorbs one tri and the sq, leaving circ and three tri
    let want = (6.0, 28.0 / 5.0, 4.0);
    let detail = format!("fluency {} flexibility {} originality {}", got.0, got.1, got.2);
    if close(got.0, want.0) && close(got.1, want.1) && close(got.2, want.2) {
        Ok(detail)
    } else {
        Err(format!("{detail}, want {want:?}"))
    }
}

fn block_distance_table() -> Outcome {
    let b = BlockConcept::new;
    let c = |p: &str| BlockConcept::custom("procedures_call", p);
    let classes: [(&str, BlockConcept, Option<BlockConcept>, f64); 11] = [
        ("same block", b("motion_movesteps"), Some(b("motion_movesteps")), 0.0),
        ("same category", b("motion_movesteps"), Some(b("motion_turnright")), 1.0),
        ("other category", b("motion_movesteps"), Some(b("looks_say")), 2.0),
        ("same package", b("pen_penDown"), Some(b("pen_clear")), 1.0),
        ("other package", b("pen_penDown"), Some(b("music_playDrumForBeats")), 2.0),
        ("two custom", c("jump"), Some(c("spin")), 2.0),
        ("predefined-extension", b("motion_movesteps"), Some(b("pen_penDown")), 3.0),
        ("extension-custom", b("pen_clear"), Some(c("jump")), 3.0),
        ("predefined-custom", b("looks_show"), Some(c("jump")), 4.0),
        ("predefined-null", b("control_repeat"), None, 3.0),
        ("extension-null", b("music_playDrumForBeats"), None, 4.0),
    ];
    let custom_null = (c("jump"), 5.0);
    let named = [
        ("move/when key pressed", b("motion_movesteps"), b("event_whenkeypressed"), 2.0),
        ("move/pen down", b("motion_movesteps"), b("pen_penDown"), 3.0),
    ];
    let mut all: Vec<&BlockConcept> = classes.iter().flat_map(|(_, a, b, _)| [Some(a), b.as_ref()]).flatten().collect();
    all.push(&custom_null.0);
    all.extend(named.iter().flat_map(|(_, a, b, _)| [a, b]));
    let net = block_network(all.iter().copied()).map_err(|e| e.to_string())?;
    let path = |a: &BlockConcept, b: Option<&BlockConcept>| {
        let to = b.map(block_node_id).unwrap_or_else(|| "0".to_string());
        net.network_distance(&block_node_id(a), &to).map_err(|e| e.to_string())
    };
    let mut rows: Vec<(&str, &BlockConcept, Option<&BlockConcept>, f64)> =
        classes.iter().map(|(n, a, b, d)| (*n, a, b.as_ref(), *d)).collect();
    rows.push(("custom-null", &custom_null.0, None, custom_null.1));
    rows.extend(named.iter().map(|(n, a, b, d)| (*n, a, Some(b), *d)));
    for (name, a, b, want) in &rows {
        let closed = block_distance(Some(a), *b);
        let walked = path(a, *b)?;
        if closed != *want || walked != *want {
            return Err(format!("{name}: closed form {closed}, network {walked}, want {want}"));
        }
    }
    Ok(format!("{} class pairs, closed form equals network path", rows.len()))
}

fn torrance_reductions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let alphabet: Vec<String> = (0..10).map(|i| format!("c{i}")).collect();
    let fl_cfg = MeasureConfig::new(false, false, ProductDistance::Alignment);
    let fx_cfg = MeasureConfig::new(false, true, ProductDistance::Alignment);
    for trial in 0..100 {
        let distinct = rng.gen_range(2..=alphabet.len());
        let pool: Vec<&String> = alphabet.choose_multiple(&mut rng, distinct).collect();
        let mut ids: Vec<&String> = pool.clone();
        let extra = rng.gen_range(0..15);
        ids.extend((0..extra).map(|_| pool[rng.gen_range(0..pool.len())]));
        ids.shuffle(&mut rng);
        let p = Product::from_symbols(ids.iter().map(|s| s.as_str()));
        let flu = fluency(&p, &DiscreteMetric, &fl_cfg).map_err(|e| e.to_string())?;
        let flex = flexibility(&p, &DiscreteMetric, &fx_cfg).map_err(|e| e.to_string())?;
        if flu != ids.len() as f64 || flex != distinct as f64 {
            return Err(format!("trial {trial}: fluency {flu} for {}, flexibility {flex} for {distinct}", ids.len()));
        }
    }
    Ok("100 products, fluency = |V|, deduplicated flexibility = distinct count".into())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    check_hungarian(200, 7)?;
    let trees = check_tree_edit_distance(5)?;
    check_levenshtein(200, 11)?;
    let took = start.elapsed();
    let detail = format!(
        "hungarian 200 trials up to 7x7, tree edit distance {trees} pairs up to 5 nodes, levenshtein 200 pairs in {:.1}s (limit {}s)",
        took.as_secs_f64(),
        ORACLE_BUDGET.as_secs()
    );
    if took < ORACLE_BUDGET {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn triangle_violations<M: DistanceMetric>(metric: &M, sample: &[Concept], rng: &mut ChaCha8Rng, n: usize) -> Result<usize, String> {
    let mut bad = 0;
    for _ in 0..n {
        let pick = |rng: &mut ChaCha8Rng| &sample[rng.gen_range(0..sample.len())];
        let (a, b, c) = (pick(rng), pick(rng), pick(rng));
        let d = |x: &Concept, y: &Concept| metric.distance(x, y).map_err(|e| e.to_string());
        if d(a, c)? > d(a, b)? + d(b, c)? + EXACT_TOL {
            bad += 1;
        }
    }
    Ok(bad)
}

fn metric_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // 44 blocks and the null give 45 * 46 / 2 = 1035 pairs
    let groups = ["motion", "looks", "event", "control", "data", "pen", "music", "videoSensing"];
    let mut blocks: Vec<BlockConcept> = (0..40)
        .map(|i| BlockConcept::new(&format!("{}_op{i}", groups[i % groups.len()])))
        .collect();
    blocks.extend(["jump", "spin", "draw", "wait"].map(|p| BlockConcept::custom("procedures_call", p)));
    let net = block_network(&blocks).map_err(|e| e.to_string())?;
    let mut block_sample: Vec<Concept> = blocks.iter().map(|b| Concept::symbol(block_node_id(b))).collect();
    block_sample.push(Concept::null());

    let mut raw: Vec<Vec<f64>> = (0..44).map(|_| (0..4).map(|_| rng.gen_range(-5.0..5.0)).collect()).collect();
    raw.push(raw[0].iter().map(|x| x * 2.0).collect());
    let vectors: Vec<Concept> = raw
        .into_iter()
        .enumerate()
        .map(|(i, v)| Concept::vector(format!("v{i}"), v).unwrap())
        .collect();

    let mut notes = Vec::new();
    for (name, report, triangle) in [
        ("block network", check_metric_axioms(&net, &block_sample), triangle_violations(&net, &block_sample, &mut rng, 1000)?),
        ("euclidean", check_metric_axioms(&EuclideanMetric, &vectors), triangle_violations(&EuclideanMetric, &vectors, &mut rng, 1000)?),
    ] {
        if !report.is_clean() || triangle > 0 {
            return Err(format!("{name}: {:?}, {triangle} triangle violations", report.violations));
        }
        notes.push(format!("{name} {} pairs", report.pairs_checked));
    }
    let cosine = check_metric_axioms(&CosineMetric, &vectors);
    if !CosineMetric.is_pseudo() || !cosine.is_clean() {
        return Err(format!("cosine pseudo {} {:?}", CosineMetric.is_pseudo(), cosine.violations));
    }
    let parallel = CosineMetric.distance(&vectors[0], &vectors[44]).map_err(|e| e.to_string())?;
    notes.push(format!("cosine {} pairs, pseudo, parallel pair at {parallel:.1e}", cosine.pairs_checked));
    Ok(notes.join("; "))
}

fn kendall() -> Outcome {
    let worst = check_kendall(500, 13)?;
    if worst > EXACT_TOL {
        return Err(format!("largest deviation {worst:e}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let n = rng.gen_range(2..=30);
        let ids: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let truth: Vec<f64> = (0..n).map(|_| rng.gen_range(0..6) as f64).collect();
        let pred: Vec<f64> = (0..n).map(|_| rng.gen_range(0..6) as f64).collect();
        let tmap = ids.iter().cloned().zip(truth.iter().copied()).collect();
        let pmap = ids.iter().cloned().zip(pred.iter().copied()).collect();
        match (kendall_tau(&pred, &truth, TauVariant::B), restricted_tau(&tmap, &pmap, &[], &ids, TauVariant::B)) {
            (Ok(x), Ok(y)) if close(x, y) => {}
            (Err(_), Err(_)) => {}
            other => return Err(format!("restricted with all items in test: {other:?}")),
        }
    }
    Ok(format!("500 lists with ties, largest deviation {worst:.1e}; restricted = full on 100 lists"))
}

struct Experiment {
    corpus: ScoredCorpus,
    labels: scratch_creativity::rank::ExpertLabels,
}

fn synthetic_experiment(dir: &std::path::Path) -> Result<Experiment, String> {
    let seed = DEFAULT_SEED;
    let projects = write_synthetic_corpus(dir, 45, seed)
        .and_then(|paths| paths.iter().map(parse_sb3).collect::<scratch_creativity::Result<Vec<_>>>())
        .map_err(|e| e.to_string())?;
    let corpus = ScoredCorpus::build(&projects, &FeatureStore::baseline(), &MeasureConfig::code()).map_err(|e| e.to_string())?;
    let labels = expert_assignment(45, seed)
        .and_then(|a| synthetic_labels(&corpus, &a, seed))
        .map_err(|e| e.to_string())?;
    Ok(Experiment { corpus, labels })
}

fn run_protocol(x: &Experiment) -> Result<scratch_creativity::rank::EvalReport, String> {
    evaluate(
        &x.corpus,
        &x.labels,
        &[Mode::PerExpert, Mode::Combined],
        &Target::ALL,
        &Protocol::default(),
        DEFAULT_SEED,
    )
    .map_err(|e| e.to_string())
}

fn rank_recovery(x: &Experiment, start: Instant) -> Outcome {
    let report = run_protocol(x)?;
    let took = start.elapsed();
    if let Some(e) = report.entries.iter().find(|e| e.error.is_some()) {
        return Err(format!("{} {}: {:?}", e.mode.as_str(), e.target.as_str(), e.error));
    }
    let mean = report.mean_tau().ok_or("no tau")?;
    let per = |m| report.mode_mean_tau(m).map_or("none".into(), |t| format!("{t:.4}"));
    let detail = format!(
        "mean tau {mean:.4} (threshold {TAU_THRESHOLD}; per-expert {}, combined {}) in {:.1}s (limit {}s)",
        per(Mode::PerExpert),
        per(Mode::Combined),
        took.as_secs_f64(),
        EXPERIMENT_BUDGET.as_secs()
    );
    if mean >= TAU_THRESHOLD && took < EXPERIMENT_BUDGET {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn determinism(x: &Experiment) -> Outcome {
    let a = run_protocol(x)?.to_json().map_err(|e| e.to_string())?;
    let b = run_protocol(x)?.to_json().map_err(|e| e.to_string())?;
    if a == b {
        Ok(format!("two runs, {} identical bytes", a.len()))
    } else {
        Err("reports differ".into())
    }
}

fn main() -> ExitCode {
    let mut results: Vec<(&str, Outcome)> = vec![
        ("worked example", worked_example()),
        ("block distance table", block_distance_table()),
        ("torrance reductions", torrance_reductions()),
        ("oracle equivalence", oracle_equivalence()),
        ("metric axioms", metric_axioms()),
        ("kendall tau", kendall()),
    ];
    let dir = tempfile::tempdir().expect("temp dir");
    let start = Instant::now();
    match synthetic_experiment(dir.path()) {
        Ok(x) => {
            results.push(("synthetic rank recovery", rank_recovery(&x, start)));
            results.push(("determinism", determinism(&x)));
        }
        Err(e) => {
            results.push(("synthetic rank recovery", Err(e.clone())));
            results.push(("determinism", Err(e)));
        }
    }
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
