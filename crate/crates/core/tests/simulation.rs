mod support;

use std::collections::HashMap;

use fcfs_match_core::analytic::{analyze, pi_y_perm, EnumerationOptions};
use fcfs_match_core::delays::geometric_stage;
use fcfs_match_core::simulator::{
    is_admissible, run, verify_reversibility, DetailedTracker, Mark, SimConfig, Simulation, UItem,
};
use support::*;

/// Ratio estimate with batch-means standard error from per-batch sums.
fn batch_ratio(num: &[f64], den: &[f64]) -> (f64, f64) {
    let value = num.iter().sum::<f64>() / den.iter().sum::<f64>();
    let per: Vec<f64> = num
        .iter()
        .zip(den)
        .filter(|(_, d)| **d > 0.0)
        .map(|(n, d)| n / d)
        .collect();
    let k = per.len() as f64;
    let mean = per.iter().sum::<f64>() / k;
    let var = per.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0);
    (value, (var / k).sqrt())
}

#[test]
fn estimates_agree_with_analytic_values() {
    let m = three_by_three();
    let a = analyze(&m, &EnumerationOptions::default()).unwrap();
    let stats = run(&m, &SimConfig::new(2_000_000, 42)).unwrap();
    let e = stats.estimates(&m);
    let within = |z: f64, what: &str| assert!(z.abs() < 4.0, "{what}: z = {z}");
    within(e.b.z_score(a.rates.b), "B");
    within(e.total_loss.z_score(0.3), "total loss");
    for (g, i, r) in a.rates.rates.iter() {
        within(e.rates.get(g, i).unwrap().z_score(*r), "rate");
        let d = a.delays.pair.get(g, i).unwrap();
        within(
            e.delay_mean.get(g, i).unwrap().z_score(d.mean),
            "delay mean",
        );
        within(
            e.delay_var.get(g, i).unwrap().z_score(d.variance),
            "delay variance",
        );
        let w = a.delays.wait_pair.get(g, i).unwrap();
        within(e.wait_mean.get(g, i).unwrap().z_score(w.mean), "wait mean");
    }
    for (g, l) in a.rates.loss.iter().enumerate() {
        within(e.loss[g].z_score(*l), "loss");
    }
    for (order, est) in &e.occupancy {
        let p = pi_y_perm(&m, order).unwrap();
        if p > 1e-4 {
            within(est.z_score(p), "occupancy");
        }
    }
}

#[test]
fn detailed_states_are_admissible_and_multi_bernoulli() {
    let m = three_by_three();
    let mut sim = Simulation::new(&m, 9);
    let mut tracker = DetailedTracker::new();
    let burn_in = 10_000;
    let steps = 3_000_000u64;
    let batches = 50usize;
    let c1 = UItem::new(Mark::Agent, 0);
    let s3 = UItem::new(Mark::ExchangedGood, 2);
    let targets = [vec![c1, s3, c1], vec![c1, c1, s3]];
    let mut counts = vec![vec![0.0; batches]; 2];
    let mut events = vec![0.0; batches];
    for k in 0..steps {
        let (index, _, event) = sim.step();
        tracker.observe(index, &event);
        // tracker agrees with the unmatched list
        assert_eq!(
            tracker.iter().filter(|u| u.mark == Mark::Agent).count(),
            sim.queue().len()
        );
        if k < burn_in {
            continue;
        }
        let state = tracker.state();
        assert!(is_admissible(&m, &state), "{state:?}");
        let b = ((k - burn_in) as usize * batches) / (steps - burn_in) as usize;
        events[b] += 1.0;
        for (t, target) in targets.iter().enumerate() {
            if state == *target {
                counts[t][b] += 1.0;
            }
        }
    }
    let b = fcfs_match_core::normalizing_constant(&m).unwrap();
    let (pa, pg): (f64, f64) = (0.7 / 1.7, 1.0 / 1.7);
    let expected = b * (pa * 0.3).powi(2) * (pg * 0.4);
    let (x, sx) = batch_ratio(&counts[0], &events);
    let (y, sy) = batch_ratio(&counts[1], &events);
    assert!(
        ((x - y) / (sx * sx + sy * sy).sqrt()).abs() < 4.0,
        "{x} vs {y}"
    );
    assert!(((x - expected) / sx).abs() < 4.0, "{x} vs {expected}");
}

#[test]
fn stage_lengths_are_geometric() {
    let m = three_by_three();
    let mut sim = Simulation::new(&m, 4);
    let batches = 50;
    let steps = 2_000_000u64;
    // (c2, c1) is the most likely two-type order
    let order = [1usize, 0];
    let mut sums = vec![vec![0.0; batches]; 2];
    let mut hits = vec![0.0; batches];
    for k in 0..steps {
        sim.step();
        if k < 10_000 {
            continue;
        }
        let y = sim.queue().y_state(sim.index());
        if y.order != order {
            continue;
        }
        let b = ((k - 10_000) as usize * batches) / (steps - 10_000) as usize;
        hits[b] += 1.0;
        for (sum, stage) in sums.iter_mut().zip(&y.stages) {
            sum[b] += *stage as f64;
        }
    }
    for l in 0..2 {
        let p = geometric_stage(&m, &order[..=l]).unwrap().p;
        let (mean, se) = batch_ratio(&sums[l], &hits);
        assert!(
            ((mean - 1.0 / p) / se).abs() < 4.0,
            "stage {l}: {mean} vs {}",
            1.0 / p
        );
    }
}

#[test]
fn reversibility_over_seeds() {
    let m = three_by_three();
    for seed in 0..5 {
        let r = verify_reversibility(&m, 50_000, seed);
        assert!(r.all_reproduced());
        assert!(r.pairs_checked > 10_000);
    }
}

#[test]
fn lost_fraction_tracks_spare_capacity() {
    let mut r = rng(3);
    let m = random_stable_model(&mut r, 4, 4);
    let stats = run(&m, &SimConfig::new(1_000_000, 8)).unwrap();
    let e = stats.estimates(&m);
    let expected = (m.mu_bar() - m.lambda_bar()) / m.mu_bar();
    assert!(e.total_loss.z_score(expected).abs() < 4.0);
    let mut occupancy: HashMap<Vec<usize>, f64> = HashMap::new();
    for (o, est) in e.occupancy {
        occupancy.insert(o, est.value);
    }
    let total: f64 = occupancy.values().sum::<f64>() + e.b.value;
    assert!((total - 1.0).abs() < 1e-12);
}
