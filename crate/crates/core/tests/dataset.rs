use std::collections::BTreeMap;
use std::fs;

use corruptscm::dataset::{
    generate_dataset, mix_longtail, read_rgb_png, verify_dataset, write_scenes, DatasetError,
    DatasetManifest, LongtailPick, Regime, RegimeConfig, SceneSource,
};
use corruptscm::dsl::shipped;
use corruptscm::eval::severity_curve;
use corruptscm::ops::{severity_normalize, ObservedRange};
use corruptscm::scene::SceneConfig;
use corruptscm::scm::sample_traces;
use corruptscm::{parse_spec, OperatorId, OperatorParams, Workers};

fn small() -> SceneConfig {
    SceneConfig {
        width: 48,
        height: 40,
        size: (4.0, 9.0),
        ..SceneConfig::default()
    }
}

#[test]
fn external_scenes_are_ingested_verbatim() {
    let tmp = tempfile::tempdir().unwrap();
    let scenes = tmp.path().join("scenes");
    write_scenes(&small(), 6, 4, &scenes, Workers::Auto).unwrap();
    let doc = parse_spec(shipped::CHAIN_UNIFORM).unwrap();
    let out = tmp.path().join("data");
    let m = generate_dataset(
        &doc,
        &SceneSource::Directory(scenes.clone()),
        6,
        4,
        &RegimeConfig::new(Regime::OodChain),
        &out,
        Workers::Auto,
    )
    .unwrap();
    assert_eq!(m.scene_count, 6);
    for rec in &m.scenes {
        let src = scenes.join(format!("{:06}", rec.scene_id));
        assert_eq!(
            fs::read(src.join("clean.png")).unwrap(),
            fs::read(out.join(&rec.clean.path)).unwrap()
        );
        assert_eq!(rec.corrupted.len(), 7);
    }
    let report = verify_dataset(&out, true, Workers::Auto).unwrap();
    assert!(report.ok(), "{:?}", report.problems);
    assert_eq!(report.renders_checked, 42);
}

#[test]
fn mismatched_or_missing_masks_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let scenes = tmp.path().join("scenes");
    write_scenes(&small(), 2, 1, &scenes, Workers::Sequential).unwrap();
    let other = tmp.path().join("other");
    write_scenes(
        &SceneConfig {
            width: 32,
            height: 32,
            size: (4.0, 8.0),
            ..SceneConfig::default()
        },
        1,
        1,
        &other,
        Workers::Sequential,
    )
    .unwrap();
    fs::copy(
        other.join("000000/masks.png"),
        scenes.join("000000/masks.png"),
    )
    .unwrap();
    let doc = parse_spec(shipped::IID_UNIFORM).unwrap();
    let run = |n| {
        generate_dataset(
            &doc,
            &SceneSource::Directory(scenes.clone()),
            n,
            1,
            &RegimeConfig::new(Regime::OodIid),
            &tmp.path().join("out"),
            Workers::Sequential,
        )
    };
    assert!(matches!(run(2), Err(DatasetError::SceneSource(_))));
    fs::remove_file(scenes.join("000000/masks.png")).unwrap();
    assert!(matches!(run(2), Err(DatasetError::SceneSource(_))));
    assert!(matches!(run(5), Err(DatasetError::SceneSource(_))));
    assert!(!tmp.path().join("out/manifest.json").exists());
}

#[test]
fn verify_detects_tampering() {
    let tmp = tempfile::tempdir().unwrap();
    let doc = parse_spec(shipped::IID_UNIFORM).unwrap();
    let out = tmp.path().join("data");
    let m = generate_dataset(
        &doc,
        &SceneSource::Synth(small()),
        3,
        2,
        &RegimeConfig::new(Regime::OodIid),
        &out,
        Workers::Auto,
    )
    .unwrap();
    assert!(verify_dataset(&out, true, Workers::Auto).unwrap().ok());
    let victim = out.join(&m.scenes[1].corrupted[0].file.path);
    let mut img = read_rgb_png(&victim).unwrap().to_rgb8();
    img[0] ^= 1;
    let (w, h) = (48, 40);
    let buf = image::RgbImage::from_raw(w, h, img).unwrap();
    buf.save(&victim).unwrap();
    let report = verify_dataset(&out, false, Workers::Auto).unwrap();
    assert!(!report.ok());
    assert!(
        report
            .problems
            .iter()
            .any(|p| p.contains(&m.scenes[1].corrupted[0].file.path)),
        "{:?}",
        report.problems
    );
}

#[test]
fn longtail_dataset_lists_one_variant_per_scene() {
    let tmp = tempfile::tempdir().unwrap();
    let doc = parse_spec(shipped::LONGTAIL).unwrap();
    let out = tmp.path().join("lt");
    let regime = RegimeConfig::longtail_uniform(&doc.graph, 0.1);
    let m = generate_dataset(
        &doc,
        &SceneSource::Synth(small()),
        30,
        6,
        &regime,
        &out,
        Workers::Auto,
    )
    .unwrap();
    let listing = fs::read_to_string(out.join("longtail.csv")).unwrap();
    let rows: Vec<&str> = listing.lines().skip(1).collect();
    assert_eq!(rows.len(), 30);
    let nodes = m.corruption_nodes();
    for row in rows {
        let variant = row.split(',').nth(1).unwrap();
        assert!(
            variant == "clean" || nodes.iter().any(|n| n == variant),
            "{row}"
        );
    }
    let manifest = DatasetManifest::load(&out).unwrap();
    let none: BTreeMap<String, f64> = nodes.iter().map(|n| (n.clone(), 0.0)).collect();
    let picks = mix_longtail(&manifest, &none, 1).unwrap();
    assert!(picks.iter().all(|p: &LongtailPick| p.variant == "clean"));
    let bad: BTreeMap<String, f64> = [("sepia".to_string(), 0.1)].into();
    assert!(mix_longtail(&manifest, &bad, 1).is_err());
}

#[test]
fn chain_blur_bins_match_histogram_oracle() {
    let graph = parse_spec(shipped::CHAIN_UNIFORM).unwrap().graph;
    let traces = sample_traces(&graph, 20_000, 12, Workers::Auto).unwrap();
    let params: Vec<OperatorParams> = traces
        .iter()
        .map(|t| {
            OperatorParams::new(OperatorId::Blur, &[t.value("blur", "sigma").unwrap()]).unwrap()
        })
        .collect();
    let observed = ObservedRange::from_samples(OperatorId::Blur, &params);
    let records: Vec<(f64, f64)> = params
        .iter()
        .map(|p| (severity_normalize(p, &observed).normalized, 1.0))
        .collect();
    let curve = severity_curve(&records, 10);
    // sigma is an integer in 1..=9: bin = floor(10 (sigma - 1) / 8) in exact integer arithmetic.
    let mut oracle = [0usize; 10];
    for t in &traces {
        let k = t.value("blur", "sigma").unwrap() as usize;
        oracle[((10 * (k - 1)) / 8).min(9)] += 1;
    }
    let counts: Vec<usize> = curve.bins.iter().map(|b| b.count).collect();
    assert_eq!(counts, oracle);
    assert_eq!(curve.total_count(), 20_000);
}
