use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use onestreet::dataset::{build_dataset, extract_all, BuildOptions};
use onestreet::equilibrium::solve as solve_game;
use onestreet::learners::{depth_sweep, evaluate, tree_fit, EvalReport, EvalRow, TreeParams};
use onestreet::rules::{
    check_80_20, check_all_in, extract_rules, render_rules, BetPolicy, EquilibriumPolicy,
    ModelPolicy, RuleThresholds,
};
use onestreet::{Dataset, KnnModel, Model, RepresentationId};
use rayon::prelude::*;
use serde_json::json;

use crate::manifest::RunManifest;
use crate::svg::{line_chart, Series};
use crate::{
    dealspec, CheckArgs, CmdResult, EvalArgs, Failure, GenArgs, ModelKind, RulesArgs, SolveArgs,
    SweepArgs, TrainArgs,
};

fn load_data(path: &Path) -> Result<Dataset, Failure> {
    Dataset::load(path).map_err(|e| Failure {
        code: 2,
        message: format!("cannot load dataset {}: {e}", path.display()),
    })
}

fn load_model(path: &Path) -> Result<Model, Failure> {
    let file = File::open(path).map_err(|e| Failure {
        code: 2,
        message: format!("cannot open model {}: {e}", path.display()),
    })?;
    serde_json::from_reader(std::io::BufReader::new(file)).map_err(|e| Failure {
        code: 2,
        message: format!("{} is not a model file: {e}", path.display()),
    })
}

fn same_config(model: &Model, data: &Dataset) -> CmdResult {
    if model.config() != data.config() {
        return Err(onestreet::Error::ConfigMismatch("model and dataset were built for different games".into()).into());
    }
    Ok(())
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> CmdResult {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn announce(manifest: RunManifest, anchor: &Path) -> CmdResult {
    let path = manifest.finish(anchor)?;
    eprintln!("manifest: {}", path.display());
    Ok(())
}

pub fn solve(a: SolveArgs) -> CmdResult {
    let cfg = a.game.load()?;
    let deal = match (&a.deal, a.preset, &a.p1, &a.p2) {
        (Some(path), _, _, _) => dealspec::parse(
            &fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?,
            &cfg,
        )?,
        (_, Some(p), _, _) => dealspec::preset(p, &cfg)?,
        (_, _, Some(p1), Some(p2)) => dealspec::from_pdfs(p1, p2, &cfg)?,
        _ => return Err(Failure::usage("give a deal with --deal, --preset, or --p1 and --p2")),
    };
    let r = solve_game(&deal, &cfg, a.epsilon, a.max_iterations)?;
    let reach = deal.marginal_p1();
    for h in 0..cfg.deck_size {
        if reach[h] == 0.0 {
            println!("Card {}: unreachable", h + 1);
            continue;
        }
        let bets: Vec<String> = (0..cfg.bet_steps)
            .filter(|&b| r.s1.prob(h, b) >= 0.0005)
            .map(|b| format!("Bet {:.1} pr {:.3}", cfg.bet_amount(b), r.s1.prob(h, b)))
            .collect();
        println!("Card {}: {}", h + 1, bets.join(", "));
    }
    println!("Value: {:.6}", r.value);
    println!("NashConv: {:.3e} (epsilon {:e})", r.nash_conv, a.epsilon);
    println!("Iterations: {}", r.iterations);
    if let Some(out) = &a.out {
        write_json(out, &json!({ "deal": deal, "result": r }))?;
        let mut m = RunManifest::start("solve", cfg);
        if let Some(p) = &a.deal {
            m = m.input(p);
        }
        m.output(out);
        announce(m, out)?;
    }
    Ok(())
}

pub fn gen(a: GenArgs) -> CmdResult {
    let cfg = a.game.load()?;
    let options = BuildOptions {
        max_iterations: a.max_iterations,
        jobs: a.jobs,
    };
    let data = build_dataset(a.count, a.seed, a.epsilon, &cfg, options)?;
    data.save(&a.out)?;
    let mut m = RunManifest::start("gen", cfg).seed("master", a.seed);
    m.output(&a.out);
    eprintln!(
        "wrote {} games to {} ({} degenerate deals resampled, {} games retried)",
        data.records.len(),
        a.out.display(),
        data.manifest.discarded_degenerate,
        data.manifest.retried
    );
    announce(m, &a.out)
}

pub fn train(a: TrainArgs) -> CmdResult {
    let data = load_data(&a.data)?;
    let cfg = *data.config();
    let (train, _) = data.split(a.split.train_frac, a.split.seed)?;
    let examples = extract_all(train.iter().copied(), a.rep, &cfg, a.split.seed)?;
    let model = match a.model {
        ModelKind::Tree => Model::Tree(tree_fit(
            &examples,
            a.rep,
            &cfg,
            TreeParams {
                max_depth: a.depth,
                min_leaf: a.min_leaf,
            },
        )?),
        ModelKind::Knn => Model::Knn(KnnModel::new(a.rep, a.k, cfg, examples.clone())?),
    };
    let train_error = evaluate(&model, &examples, &cfg)?;
    write_json(&a.out, &model)?;
    match &model {
        Model::Tree(t) => eprintln!(
            "{} tree: {} nodes, depth {}, training error {train_error:.4}",
            a.rep,
            t.node_count(),
            t.depth()
        ),
        Model::Knn(k) => eprintln!("{} {}-NN over {} examples, training error {train_error:.4}", a.rep, k.k, k.examples.len()),
    }
    let mut m = RunManifest::start("train", cfg).seed("split", a.split.seed).input(&a.data);
    m.output(&a.out);
    announce(m, &a.out)
}

fn model_param(model: &Model) -> (usize, usize) {
    match model {
        Model::Tree(t) => (t.params.max_depth, t.node_count()),
        Model::Knn(k) => (k.k, 0),
    }
}

pub fn eval(a: EvalArgs) -> CmdResult {
    let model = load_model(&a.model)?;
    let data = load_data(&a.data)?;
    same_config(&model, &data)?;
    let cfg = *data.config();
    let rep = onestreet::Predictor::rep(&model);
    let (train, test) = data.split(a.split.train_frac, a.split.seed)?;
    let tr = extract_all(train.iter().copied(), rep, &cfg, a.split.seed)?;
    let te = extract_all(test.iter().copied(), rep, &cfg, a.split.seed)?;
    let (param, node_count) = model_param(&model);
    let row = EvalRow {
        rep,
        model: model.kind_name().into(),
        param,
        train_error: evaluate(&model, &tr, &cfg)?,
        test_error: evaluate(&model, &te, &cfg)?,
        node_count,
    };
    println!("train error {:.6}", row.train_error);
    println!("test error {:.6}", row.test_error);
    if let Some(out) = &a.out {
        EvalReport { rows: vec![row] }.write_csv(File::create(out)?)?;
        let mut m = RunManifest::start("eval", cfg)
            .seed("split", a.split.seed)
            .input(&a.model)
            .input(&a.data);
        m.output(out);
        announce(m, out)?;
    }
    Ok(())
}

fn parse_depths(text: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::usage(format!("depths must look like 3-12 or 2,4,8, got {text:?}"));
    let depths: Vec<usize> = if let Some((lo, hi)) = text.split_once('-') {
        let (lo, hi) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
        if lo > hi {
            return Err(bad());
        }
        (lo..=hi).collect()
    } else {
        text.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if depths.is_empty() {
        return Err(bad());
    }
    Ok(depths)
}

fn chart(report: &EvalReport, reps: &[RepresentationId], x: impl Fn(&EvalRow) -> f64, y: impl Fn(&EvalRow) -> f64) -> Vec<Series> {
    reps.iter()
        .map(|&rep| Series {
            name: rep.to_string().to_uppercase(),
            points: report.rows_for(rep).map(|r| (x(r), y(r))).collect(),
            dashed: rep.number() > 6,
        })
        .collect()
}

pub fn sweep(a: SweepArgs) -> CmdResult {
    let depths = parse_depths(&a.depths)?;
    let reps: Vec<RepresentationId> = if a.rep.is_empty() { RepresentationId::ALL.to_vec() } else { a.rep.clone() };
    let data = load_data(&a.data)?;
    let cfg = *data.config();
    let (train, test) = data.split(a.split.train_frac, a.split.seed)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(|e| Failure::usage(format!("thread pool: {e}")))?;
    let seed = a.split.seed;
    let min_leaf = a.min_leaf;
    let reports: Vec<Result<EvalReport, onestreet::Error>> = pool.install(|| {
        reps.par_iter()
            .map(|&rep| {
                let tr = extract_all(train.iter().copied(), rep, &cfg, seed)?;
                let te = extract_all(test.iter().copied(), rep, &cfg, seed)?;
                depth_sweep(&tr, &te, rep, &cfg, &depths, min_leaf).map(|(r, _)| r)
            })
            .collect()
    });
    let mut report = EvalReport::default();
    for r in reports {
        report.extend(r?);
    }

    fs::create_dir_all(&a.out)?;
    let csv_path = a.out.join("sweep.csv");
    report.write_csv(File::create(&csv_path)?)?;
    let charts = [
        ("test_error_vs_depth.svg", "Test error by depth", "depth", chart(&report, &reps, |r| r.param as f64, |r| r.test_error)),
        ("train_error_vs_depth.svg", "Training error by depth", "depth", chart(&report, &reps, |r| r.param as f64, |r| r.train_error)),
        (
            "test_error_vs_log_nodes.svg",
            "Test error by tree size",
            "log10(node count)",
            chart(&report, &reps, |r| (r.node_count as f64).log10(), |r| r.test_error),
        ),
    ];
    let mut m = RunManifest::start("sweep", cfg).seed("split", seed).input(&a.data);
    m.output(&csv_path);
    for (file, title, xl, series) in charts {
        let path = a.out.join(file);
        fs::write(&path, line_chart(title, xl, "mean normalized error", &series))?;
        m.output(&path);
    }
    println!("rep,depth,train_error,test_error,node_count");
    for r in &report.rows {
        println!("{},{},{:.6},{:.6},{}", r.rep, r.param, r.train_error, r.test_error, r.node_count);
    }
    announce(m, &a.out)
}

pub fn rules(a: RulesArgs) -> CmdResult {
    let Model::Tree(tree) = load_model(&a.model)? else {
        return Err(Failure {
            code: 2,
            message: "rules need a tree model; k-NN models have no rules".into(),
        });
    };
    let rules = extract_rules(&tree);
    let text = if a.json {
        serde_json::to_string_pretty(&rules)? + "\n"
    } else {
        render_rules(&rules, "\n") + "\n"
    };
    print!("{text}");
    if let Some(out) = &a.out {
        fs::write(out, &text)?;
        let mut m = RunManifest::start("rules", tree.config).input(&a.model);
        m.output(out);
        announce(m, out)?;
    }
    Ok(())
}

fn compliance_of<P: BetPolicy + ?Sized>(name: &str, policy: &P, data: &Dataset) -> Result<serde_json::Value, Failure> {
    let cfg = data.config();
    let t = RuleThresholds::default();
    let small = check_80_20(policy, &data.records, cfg, &t)?;
    let all_in = check_all_in(policy, &data.records, cfg, &t)?;
    println!("{name}: 80-20 rule followed on {:.3} of {} probes", small.compliance, small.probes);
    for (label, c) in [("conditional", all_in.conditional), ("unconditional", all_in.unconditional)] {
        match c {
            Some(c) => println!("{name}: all-in rule ({label}) followed on {:.3} of {} probes", c.compliance, c.probes),
            None => println!("{name}: all-in rule ({label}) has no probes"),
        }
    }
    Ok(json!({ "policy": name, "eighty_twenty": small, "all_in": all_in }))
}

pub fn check(a: CheckArgs) -> CmdResult {
    let data = load_data(&a.probes)?;
    let mut results = vec![compliance_of("equilibrium", &EquilibriumPolicy, &data)?];
    if let Some(path) = &a.model {
        let model = load_model(path)?;
        same_config(&model, &data)?;
        let name = format!("{} {}", model.kind_name(), onestreet::Predictor::rep(&model));
        results.push(compliance_of(&name, &ModelPolicy(&model), &data)?);
    }
    if let Some(out) = &a.out {
        write_json(out, &json!({ "thresholds": RuleThresholds::default(), "results": results }))?;
        let mut m = RunManifest::start("check", *data.config()).input(&a.probes);
        if let Some(p) = &a.model {
            m = m.input(p);
        }
        m.output(out);
        announce(m, out)?;
    }
    Ok(())
}
