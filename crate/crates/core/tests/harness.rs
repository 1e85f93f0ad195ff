use std::process::Command;

use bscp::config::{ExperimentConfig, Protocol};
use bscp::dataset::Dataset;
use bscp::experiment::{
    extract_bags, fit_codebook, run_half_split, run_leave_one_out, stratified_half_split, sweep, train_model,
    EvaluationReport, SweepParam,
};
use bscp::model_io::load_model;
use bscp::pipeline::PartBag;
use bscp::synth::{class_polygon, four_class_dataset, rasterize, ShapeClass};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::synthetic();
    cfg.k = 30;
    cfg.seeds = 3;
    cfg.epochs = 40;
    cfg.per_shape_cap = 10;
    cfg
}

#[test]
fn half_split_codebooks_only_see_training_shapes() {
    let data = four_class_dataset(4, 3).unwrap();
    let cfg = small_config();
    let report = run_half_split(&data, &cfg).unwrap();
    let bags = extract_bags(&data, &cfg.features).unwrap();
    assert_eq!(report.runs.len(), 3);
    for run in &report.runs {
        let (train, test) = stratified_half_split(&data.labels, data.class_count(), run.seed).unwrap();
        assert_eq!((run.train, run.test), (train.len(), test.len()));
        let train_bags: Vec<&PartBag> = train.iter().map(|&i| &bags[i]).collect();
        let (_, digest) = fit_codebook(&train_bags, &cfg, run.seed).unwrap();
        assert_eq!(digest, run.codebook_digest);
        let mut leaky = train_bags.clone();
        leaky.push(&bags[test[0]]);
        assert_ne!(fit_codebook(&leaky, &cfg, run.seed).unwrap().1, run.codebook_digest);
        let tested: Vec<usize> = report
            .predictions
            .iter()
            .filter(|p| report.runs[p.run].seed == run.seed)
            .map(|p| p.shape)
            .collect();
        assert_eq!(tested, test);
    }
    assert!(report.std.is_some());
}

#[test]
fn reports_are_deterministic_and_reparse() {
    let data = four_class_dataset(4, 8).unwrap();
    let cfg = small_config();
    let a = run_half_split(&data, &cfg).unwrap();
    let b = run_half_split(&data, &cfg).unwrap();
    assert_eq!(a.without_timings(), b.without_timings());
    let text = a.to_text();
    assert!(text.contains("[report]"));
    assert_eq!(EvaluationReport::parse(&text).unwrap(), a);
    let total: u64 = a.confusion.iter().flatten().sum();
    assert_eq!(total as usize, a.predictions.len());
}

#[test]
fn leave_one_out_separates_distinct_shapes() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut data = Dataset::new(vec!["ribbon".into(), "star".into()]);
    for (label, class) in [ShapeClass::Ribbon, ShapeClass::Star].into_iter().enumerate() {
        for i in 0..2 {
            data.push(
                rasterize(&class_polygon(class, &mut rng)).unwrap(),
                label,
                format!("{i}.png"),
            );
        }
    }
    let mut cfg = small_config();
    cfg.k = 20;
    let report = run_leave_one_out(&data, &cfg).unwrap();
    assert_eq!(report.protocol, Protocol::LeaveOneOut);
    assert_eq!(report.predictions.len(), 4);
    assert_eq!(report.mean, 1.0);
    assert_eq!(report.std, None);
    assert_eq!(EvaluationReport::parse(&report.to_text()).unwrap(), report);
}

#[test]
fn sweep_reports_one_row_per_value() {
    let data = four_class_dataset(3, 1).unwrap();
    let mut cfg = small_config();
    cfg.seeds = 2;
    let table = sweep(&data, &cfg, SweepParam::ThicknessBins, &[1, 3, 5, 7]).unwrap();
    let values: Vec<usize> = table.rows.iter().map(|r| r.value).collect();
    assert_eq!(values, vec![1, 3, 5, 7]);
    assert_eq!(table.to_text().lines().count(), 5);
    for row in &table.rows {
        assert!((0.0..=1.0).contains(&row.mean));
        assert_eq!(row.report.runs.len(), 2);
    }
    assert!(sweep(&data, &cfg, SweepParam::ThicknessBins, &[4]).is_err());
}

#[test]
fn saved_dataset_loads_back_in_lexicographic_order() {
    let data = four_class_dataset(2, 5).unwrap();
    let dir = tempfile::tempdir().unwrap();
    data.save(dir.path()).unwrap();
    let back = Dataset::load(dir.path()).unwrap();
    assert_eq!(back.classes, vec!["notched_ellipse", "ribbon", "star", "wedge"]);
    assert_eq!(back.len(), 8);
    for (i, name) in back.names.iter().enumerate() {
        let original = data.names.iter().position(|n| n == name).unwrap();
        assert_eq!(back.masks[i].bits(), data.masks[original].bits());
        assert_eq!(back.classes[back.labels[i]], data.classes[data.labels[original]]);
    }
}

fn bscp(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_bscp")).args(args).output().unwrap()
}

#[test]
fn command_line_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let data = root.join("data");
    let config = root.join("small.cfg");
    std::fs::write(&config, "k = 20\nseeds = 2\nepochs = 30\nper_shape_cap = 8\n").unwrap();
    let s = |p: &std::path::Path| p.to_str().unwrap().to_string();

    let out = bscp(&["synth", "--per-class", "3", "--seed", "4", "--out", &s(&data)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let model = root.join("model.bscp");
    let out = bscp(&[
        "train",
        "--data",
        &s(&data),
        "--config",
        &s(&config),
        "--out",
        &s(&model),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let preds = root.join("preds.txt");
    let out = bscp(&[
        "predict",
        "--model",
        &s(&model),
        "--data",
        &s(&data),
        "--out",
        &s(&preds),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines = std::fs::read_to_string(&preds).unwrap();
    assert_eq!(lines.lines().count(), 12);

    let loaded = load_model(&model).unwrap();
    let dataset = Dataset::load(&data).unwrap();
    let cfg = {
        let mut c = ExperimentConfig::load(&config).unwrap();
        c.seed = 0;
        c
    };
    let trained = train_model(&dataset, &cfg).unwrap();
    assert_eq!(
        bscp::model_io::to_bytes(&trained).unwrap(),
        std::fs::read(&model).unwrap()
    );
    for (line, mask) in lines.lines().zip(&dataset.masks) {
        let label = line.split_whitespace().last().unwrap();
        assert_eq!(label, loaded.predict(mask).unwrap().1);
    }

    let report = root.join("report.txt");
    let out = bscp(&[
        "eval",
        "--data",
        &s(&data),
        "--config",
        &s(&config),
        "--protocol",
        "loo",
        "--out",
        &s(&report),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed = EvaluationReport::parse(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(parsed.protocol, Protocol::LeaveOneOut);

    let bad = root.join("bad.cfg");
    std::fs::write(&bad, "k = 20\nkay = 3\n").unwrap();
    let out = bscp(&["eval", "--data", &s(&data), "--config", &s(&bad)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("kay"));
}
