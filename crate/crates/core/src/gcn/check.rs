//! Random small instances and a central-difference check of the analytic
//! gradient.

use std::collections::BTreeSet;

use ndarray::Array2;
use rand::Rng as _;

use super::forward::decay_term;
use super::{forward, gradients, GcnModel, Supervision, Topology};
use crate::error::Result;
use crate::graph::BipartiteGraph;
use crate::rng::{seeded, Rng};

/// Random bipartite topology where every node has at least one neighbor.
pub fn random_topology(n_occ: usize, n_skill: usize, rng: &mut Rng) -> Topology {
    let mut edges = BTreeSet::new();
    for o in 0..n_occ {
        edges.insert((o, rng.gen_range(0..n_skill)));
    }
    for s in 0..n_skill {
        edges.insert((rng.gen_range(0..n_occ), s));
    }
    for o in 0..n_occ {
        for s in 0..n_skill {
            if rng.gen::<f64>() < 0.3 {
                edges.insert((o, s));
            }
        }
    }
    let g = BipartiteGraph::from_parts(
        (0..n_occ).map(|i| format!("o{i:02}")).collect(),
        (0..n_skill).map(|i| format!("s{i:02}")).collect(),
        edges.into_iter().collect(),
        Array2::zeros((n_occ, 1)),
        Array2::zeros((n_skill, 1)),
    )
    .expect("every node has a neighbor");
    Topology::from_graph(&g)
}

/// Model with random features and no exactly-zero parameters, so bias
/// gradients are exercised too.
pub fn random_model(plan: &[usize], nodes: usize, seed: u64) -> GcnModel {
    let mut rng = seeded(seed ^ 0xFEED);
    let features = Array2::from_shape_simple_fn((nodes, plan[0]), || rng.gen_range(-1.0..1.0));
    let mut model = GcnModel::init(plan, features, true, seed).expect("valid plan");
    for p in model.params_mut() {
        for v in p.data.iter_mut() {
            if *v == 0.0 {
                *v = rng.gen_range(-0.5..0.5);
            }
        }
    }
    model
}

/// At most ten nodes, one or two layers, a random labeled subset.
pub fn random_instance(seed: u64) -> (GcnModel, Topology, Supervision) {
    let mut rng = seeded(seed);
    let n_occ = rng.gen_range(2..=6);
    let n_skill = rng.gen_range(1..=10 - n_occ);
    let topo = random_topology(n_occ, n_skill, &mut rng);
    let d0 = rng.gen_range(1..=4);
    let layers = rng.gen_range(1..=2);
    let mut plan = vec![d0];
    for _ in 0..layers {
        plan.push(2 * rng.gen_range(1..=2));
    }
    let model = random_model(&plan, topo.num_nodes(), seed);
    let rows: Vec<usize> = (0..n_occ).filter(|_| rng.gen_bool(0.7)).collect();
    let rows = if rows.is_empty() { vec![0] } else { rows };
    let classes = rows.iter().map(|_| rng.gen_range(0..2)).collect();
    let sup = Supervision::new(rows, classes).expect("binary classes");
    (model, topo, sup)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCheck {
    pub max_relative_error: f64,
    pub checked: usize,
    /// Entries whose perturbation changed some relu's sign.
    pub skipped: usize,
}

fn probe(model: &GcnModel, topo: &Topology, sup: &Supervision, wd: f64) -> Result<(f64, Vec<bool>)> {
    let cache = forward(model, topo)?;
    let loss = cache.data_loss(sup)? + decay_term(model, wd);
    let pattern = cache
        .pre_activations
        .iter()
        .flat_map(|p| p.iter().map(|&x| x > 0.0).collect::<Vec<_>>())
        .collect();
    Ok((loss, pattern))
}

/// Compares every analytic gradient entry with `(L(θ+ε) - L(θ-ε)) / 2ε`.
/// Relative error uses `max(|a|, |n|, 1e-6)` as denominator.
pub fn central_difference(
    model: &GcnModel,
    topo: &Topology,
    sup: &Supervision,
    weight_decay: f64,
    eps: f64,
) -> Result<GradientCheck> {
    let (_, analytic) = gradients(model, topo, sup, weight_decay)?;
    let analytic: Vec<Vec<f64>> = analytic.params().iter().map(|p| p.data.to_vec()).collect();
    let mut out = GradientCheck {
        max_relative_error: 0.0,
        checked: 0,
        skipped: 0,
    };
    for (t, grad) in analytic.iter().enumerate() {
        for (i, &a) in grad.iter().enumerate() {
            let mut plus = model.clone();
            plus.params_mut()[t].data[i] += eps;
            let mut minus = model.clone();
            minus.params_mut()[t].data[i] -= eps;
            let (lp, pp) = probe(&plus, topo, sup, weight_decay)?;
            let (lm, pm) = probe(&minus, topo, sup, weight_decay)?;
            if pp != pm {
                out.skipped += 1;
                continue;
            }
            let numeric = (lp - lm) / (2.0 * eps);
            let denom = a.abs().max(numeric.abs()).max(1e-6);
            out.max_relative_error = out.max_relative_error.max((a - numeric).abs() / denom);
            out.checked += 1;
        }
    }
    Ok(out)
}
