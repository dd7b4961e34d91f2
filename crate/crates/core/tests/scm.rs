use std::collections::BTreeSet;

use corruptscm::dsl::shipped;
use corruptscm::rng::rng_from;
use corruptscm::scm::{sample_traces, Distribution, ScmError};
use corruptscm::{
    apply_intervention, parse_spec, CausalGraph, Intervention, SampledTrace, Workers,
};

const N: usize = 100_000;

fn chain() -> CausalGraph {
    parse_spec(shipped::CHAIN_UNIFORM).unwrap().graph
}

fn values(traces: &[SampledTrace], node: &str, param: &str) -> Vec<f64> {
    traces
        .iter()
        .map(|t| t.value(node, param).unwrap())
        .collect()
}

fn total_variation(a: &[f64], b: &[f64], bins: usize) -> f64 {
    let lo = a.iter().chain(b).copied().fold(f64::INFINITY, f64::min);
    let hi = a.iter().chain(b).copied().fold(f64::NEG_INFINITY, f64::max);
    let hist = |xs: &[f64]| {
        let mut h = vec![0.0; bins];
        for &x in xs {
            let k = if hi > lo {
                (((x - lo) / (hi - lo)) * bins as f64) as usize
            } else {
                0
            };
            h[k.min(bins - 1)] += 1.0 / xs.len() as f64;
        }
        h
    };
    let (ha, hb) = (hist(a), hist(b));
    0.5 * ha.iter().zip(&hb).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

#[test]
fn sample_dist_moments() {
    let mut r = rng_from(3);
    let p = Distribution::point(0.0);
    assert!((0..1000).all(|_| p.sample(&mut r) == 0.0));
    let u = Distribution::uniform(1.0, 3.0).unwrap();
    let mean = (0..N).map(|_| u.sample(&mut r)).sum::<f64>() / N as f64;
    assert!((mean - 2.0).abs() <= 0.02, "{mean}");
    let h = Distribution::half_normal(0.3).unwrap();
    // Monte-Carlo oracle: |z| with z from an independent Box-Muller stream.
    let mut r2 = rng_from(4);
    let oracle = (0..N)
        .map(|_| {
            let (u1, u2): (f64, f64) = (rand::Rng::random(&mut r2), rand::Rng::random(&mut r2));
            0.3 * ((-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()).abs()
        })
        .sum::<f64>()
        / N as f64;
    let mean = (0..N).map(|_| h.sample(&mut r)).sum::<f64>() / N as f64;
    let analytic = 0.3 * (2.0 / std::f64::consts::PI).sqrt();
    assert!((mean - analytic).abs() <= 0.01, "{mean}");
    assert!((oracle - analytic).abs() <= 0.01, "{oracle}");
}

#[test]
fn root_marginal_matches_declared_distribution() {
    let graph = parse_spec(shipped::IID_UNIFORM).unwrap().graph;
    let traces = sample_traces(&graph, N, 8, Workers::Auto).unwrap();
    let mut xs = values(&traces, "blur", "sigma");
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let ks = xs
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let f = (x - 1.0) / 10.0;
            ((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max);
    assert!(ks < 0.01, "KS {ks}");
}

#[test]
fn chain_structural_equations() {
    let traces = sample_traces(&chain(), N, 5, Workers::Auto).unwrap();
    let zero = traces
        .iter()
        .filter(|t| t.value("clouds", "factor") == Some(0.0))
        .count() as f64
        / N as f64;
    assert!((zero - 0.75).abs() <= 0.01, "{zero}");
    for t in &traces {
        let e = t.exogenous["clouds"]["e"];
        let factor = t.value("clouds", "factor").unwrap();
        if e < 0.75 {
            assert_eq!(factor, 0.0);
        }
        let sigma = t.value("blur", "sigma").unwrap();
        if factor > 0.2 {
            assert_eq!(sigma, 1.0);
        }
        let eg = t.exogenous["gamma"]["e"];
        let gamma = t.value("gamma", "gamma").unwrap();
        let expected = if sigma <= 3.0 {
            0.1 * eg + 1.0
        } else {
            eg + 1.0
        };
        assert_eq!(gamma, expected);
        let el = t.exogenous["lens"]["e"];
        let distort = t.value("lens", "distort").unwrap();
        assert_eq!(distort, if gamma > 1.2 { 0.05 * el } else { 0.5 * el });
        let moving =
            t.value("motion", "zoom") != Some(0.0) && t.value("motion", "distance") != Some(0.0);
        if moving {
            assert_eq!(t.value("defocus", "f_stop"), Some(128.0));
            assert_eq!(t.value("defocus", "z"), Some(1.0));
        }
    }
    // The discrete f_stop branch needs a still camera.
    let still = apply_intervention(&chain(), &Intervention::hard("motion", "zoom", 0.0)).unwrap();
    let traces = sample_traces(&still, 20_000, 6, Workers::Auto).unwrap();
    assert!(traces
        .iter()
        .all(|t| t.value("defocus", "f_stop").unwrap().fract() == 0.0));
    let seen: BTreeSet<u64> = traces
        .iter()
        .map(|t| t.value("defocus", "f_stop").unwrap() as u64)
        .collect();
    assert_eq!(seen.len(), 65);
}

#[test]
fn hard_intervention_is_a_point_mass() {
    let g = apply_intervention(&chain(), &Intervention::hard("clouds", "factor", 0.25)).unwrap();
    let traces = sample_traces(&g, 10_000, 1, Workers::Auto).unwrap();
    assert!(traces
        .iter()
        .all(|t| t.value("clouds", "factor") == Some(0.25)));
    assert!(traces.iter().all(|t| t.value("blur", "sigma") == Some(1.0)));
}

#[test]
fn descendants_read_the_intervened_value() {
    let g = apply_intervention(&chain(), &Intervention::hard("blur", "sigma", 8.0)).unwrap();
    for t in sample_traces(&g, 10_000, 2, Workers::Auto).unwrap() {
        assert_eq!(t.value("blur", "sigma"), Some(8.0));
        assert_eq!(
            t.value("gamma", "gamma").unwrap(),
            t.exogenous["gamma"]["e"] + 1.0
        );
    }
}

#[test]
fn soft_intervention_respects_support() {
    let d = Distribution::uniform(0.0, 0.1).unwrap();
    let g = apply_intervention(&chain(), &Intervention::soft("noise", "scale", d)).unwrap();
    let traces = sample_traces(&g, N, 3, Workers::Auto).unwrap();
    assert!(values(&traces, "noise", "scale")
        .iter()
        .all(|s| (0.0..=0.1).contains(s)));
}

#[test]
fn intervention_errors() {
    let g = chain();
    assert!(matches!(
        apply_intervention(&g, &Intervention::hard("nope", "x", 1.0)),
        Err(ScmError::UnknownNode(_))
    ));
    assert!(apply_intervention(&g, &Intervention::hard("blur", "nope", 1.0)).is_err());
}

#[test]
fn intervention_matches_mutilated_graph() {
    let intervened =
        apply_intervention(&chain(), &Intervention::hard("blur", "sigma", 8.0)).unwrap();
    let text = shipped::CHAIN_UNIFORM.replace(
        "sigma = if clouds.factor > 0.2 then 1 else ~ discrete(1..9);",
        "sigma = 8;",
    );
    assert_ne!(text, shipped::CHAIN_UNIFORM);
    let mutilated = parse_spec(&text).unwrap().graph;
    let a = sample_traces(&intervened, N, 31, Workers::Auto).unwrap();
    let b = sample_traces(&mutilated, N, 32, Workers::Auto).unwrap();
    for node in mutilated.descendants("blur") {
        for spec in mutilated.node(&node).unwrap().operator.params() {
            let tv = total_variation(
                &values(&a, &node, spec.name),
                &values(&b, &node, spec.name),
                20,
            );
            assert!(tv < 0.02, "{node}.{}: TV {tv}", spec.name);
        }
    }
}

#[test]
fn sampling_is_plan_independent() {
    let g = chain();
    let seq = sample_traces(&g, 2000, 9, Workers::Sequential).unwrap();
    let par = sample_traces(&g, 2000, 9, Workers::Threads(4)).unwrap();
    assert_eq!(seq, par);
    let again = sample_traces(&g, 2000, 9, Workers::Sequential).unwrap();
    assert_eq!(seq, again);
}
