use ndarray::{s, Array2, Axis};

use super::forward::{aggregate_transpose, decay_term, forward};
use super::{GcnModel, Supervision, Topology};
use crate::error::{Error, Result};

/// Total loss and its analytic gradient with respect to every parameter,
/// including the node features. The gradient has the model's shapes.
pub fn gradients(
    model: &GcnModel,
    topo: &Topology,
    sup: &Supervision,
    weight_decay: f64,
) -> Result<(f64, GcnModel)> {
    if sup.is_empty() {
        return Err(Error::EmptyMask);
    }
    let cache = forward(model, topo)?;
    let loss = cache.data_loss(sup)? + decay_term(model, weight_decay);
    let mut grad = model.zeros_like();

    // Softmax cross-entropy: dL/dlogits = (p - onehot) / m on supervised rows.
    let m = sup.len() as f64;
    let mut d_logits = Array2::<f64>::zeros(cache.logits.raw_dim());
    for (&r, &c) in sup.rows.iter().zip(&sup.classes) {
        let mut row = d_logits.row_mut(r);
        row += &(&cache.probs.row(r) / m);
        row[c] -= 1.0 / m;
    }
    grad.head = cache.readout.t().dot(&d_logits) + &(&model.head * weight_decay);
    grad.head_bias = d_logits.sum_axis(Axis(0));
    let d_readout = d_logits.dot(&model.head.t());

    // Readout: own embedding plus neighbor mean.
    let d = cache.last.ncols();
    let mut d_hidden = Array2::<f64>::zeros(cache.last.raw_dim());
    for (row, &o) in topo.occupations.iter().enumerate() {
        {
            let mut own = d_hidden.row_mut(o);
            own += &d_readout.slice(s![row, ..d]);
        }
        let nbrs = topo.csr.neighbors(o);
        if nbrs.is_empty() {
            continue;
        }
        let tail = &d_readout.slice(s![row, d..]) / nbrs.len() as f64;
        for &u in nbrs {
            let mut r = d_hidden.row_mut(u);
            r += &tail;
        }
    }

    for l in (0..model.layers.len()).rev() {
        let layer = &model.layers[l];
        let half = layer.self_weight.ncols();
        let g_self = d_hidden.slice(s![.., ..half]);
        let mut g_pre = d_hidden.slice(s![.., half..]).to_owned();
        g_pre.zip_mut_with(&cache.pre_activations[l], |g, &p| {
            if p <= 0.0 {
                *g = 0.0;
            }
        });
        let input = &cache.inputs[l];
        let gl = &mut grad.layers[l];
        gl.neighbor = cache.aggregates[l].t().dot(&g_pre) + &(&layer.neighbor * weight_decay);
        if let Some(b) = &mut gl.neighbor_bias {
            *b = g_pre.sum_axis(Axis(0));
        }
        gl.self_weight = input.t().dot(&g_self) + &(&layer.self_weight * weight_decay);
        if let Some(b) = &mut gl.self_bias {
            *b = g_self.sum_axis(Axis(0));
        }
        let d_agg = g_pre.dot(&layer.neighbor.t());
        d_hidden = g_self.dot(&layer.self_weight.t()) + aggregate_transpose(&d_agg, topo);
    }
    grad.features = d_hidden;
    Ok((loss, grad))
}
