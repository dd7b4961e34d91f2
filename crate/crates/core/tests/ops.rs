use corruptscm::ops::{mse_unit, severity_normalize, similarity, ObservedRange};
use corruptscm::scene::{generate_scene, SceneConfig};
use corruptscm::{apply, Image, OperatorId, OperatorParams};
use proptest::prelude::*;

fn scenes(n: u64) -> Vec<Image> {
    let cfg = SceneConfig::default();
    (0..n)
        .map(|i| generate_scene(&cfg, i, 11).unwrap().0.quantized())
        .collect()
}

fn ladder(op: OperatorId) -> Vec<OperatorParams> {
    (0..10)
        .map(|k| {
            let t = k as f64 / 9.0;
            let values: Vec<f64> = op
                .params()
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let far = if s.identity >= s.max { s.min } else { s.max };
                    if i == 0 {
                        s.identity + t * (far - s.identity)
                    } else {
                        s.identity
                    }
                })
                .collect();
            OperatorParams::new(op, &values).unwrap()
        })
        .collect()
}

#[test]
fn negative_mse_ladders_are_monotone() {
    // 0.1 dB of PSNR slack expressed as a factor on MSE.
    let slack = 10f64.powf(-0.01);
    let mut disagreements = 0;
    for op in OperatorId::CORRUPTIONS {
        for (i, img) in scenes(20).iter().enumerate() {
            let mut prev: Option<(f64, f64)> = None;
            for p in ladder(op) {
                let out = apply(img, &p, 77).unwrap();
                let mse = mse_unit(&out, img).unwrap();
                let psnr = similarity(&out, img).unwrap();
                if let Some((pm, pp)) = prev {
                    assert!(
                        mse >= pm * slack,
                        "{op} scene {i}: MSE fell {pm} -> {mse} at {:?}",
                        p.values()
                    );
                    if (mse > pm) != (psnr < pp) && mse != pm {
                        disagreements += 1;
                    }
                }
                prev = Some((mse, psnr));
            }
        }
    }
    assert_eq!(
        disagreements, 0,
        "PSNR and negative MSE order the ladders differently"
    );
}

#[test]
fn severity_examples() {
    let observed = ObservedRange::new(OperatorId::Blur, vec![(1.0, 11.0)]);
    let s = severity_normalize(
        &OperatorParams::new(OperatorId::Blur, &[6.0]).unwrap(),
        &observed,
    );
    assert_eq!(s.normalized, 0.5);
    let lo = severity_normalize(
        &OperatorParams::new(OperatorId::Blur, &[1.0]).unwrap(),
        &observed,
    );
    let hi = severity_normalize(
        &OperatorParams::new(OperatorId::Blur, &[11.0]).unwrap(),
        &observed,
    );
    assert_eq!((lo.normalized, hi.normalized), (0.0, 1.0));
    let flat = ObservedRange::new(OperatorId::Blur, vec![(3.0, 3.0)]);
    assert_eq!(
        severity_normalize(
            &OperatorParams::new(OperatorId::Blur, &[3.0]).unwrap(),
            &flat
        )
        .normalized,
        0.0
    );
}

#[test]
fn similarity_examples() {
    let zeros = Image::filled(8, 8, [0.0; 3]);
    let ones = Image::filled(8, 8, [1.0; 3]);
    assert_eq!(similarity(&zeros, &zeros).unwrap(), 100.0);
    assert_eq!(similarity(&zeros, &ones).unwrap(), 0.0);
    let tenth = Image::filled(8, 8, [0.1; 3]);
    assert!((similarity(&zeros, &tenth).unwrap() - 20.0).abs() < 1e-9);
    assert!(similarity(&zeros, &Image::filled(4, 8, [0.0; 3])).is_err());
}

fn params_strategy() -> impl Strategy<Value = OperatorParams> {
    (
        0..OperatorId::CORRUPTIONS.len(),
        prop::collection::vec(0.0f64..=1.0, 2),
    )
        .prop_map(|(k, ts)| {
            let op = OperatorId::CORRUPTIONS[k];
            let values: Vec<f64> = op
                .params()
                .iter()
                .zip(&ts)
                .map(|(s, t)| s.min + t * (s.max - s.min))
                .collect();
            OperatorParams::new(op, &values).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn outputs_stay_in_unit_range(p in params_strategy(), scene in 0u64..50, seed in any::<u64>()) {
        let cfg = SceneConfig { width: 40, height: 32, size: (3.0, 8.0), ..SceneConfig::default() };
        let img = generate_scene(&cfg, scene, 5).unwrap().0;
        let out = apply(&img, &p, seed).unwrap();
        prop_assert_eq!(out.dims(), img.dims());
        prop_assert!(out.data().iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v)));
    }

    #[test]
    fn apply_is_pure(p in params_strategy(), seed in any::<u64>()) {
        let cfg = SceneConfig { width: 32, height: 32, size: (3.0, 8.0), ..SceneConfig::default() };
        let img = generate_scene(&cfg, 0, 6).unwrap().0;
        prop_assert_eq!(apply(&img, &p, seed).unwrap(), apply(&img, &p, seed).unwrap());
    }
}
