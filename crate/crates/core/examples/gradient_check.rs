//! Compares analytic gradients of the graph model with central finite
//! differences on random small graphs.
//!
//! ```text
//! cargo run --release --example gradient_check -- [INSTANCES]
//! ```

use occrisk::gcn::check::{central_difference, random_instance};

fn main() -> occrisk::Result<()> {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for seed in 0..n {
        let (model, topo, sup) = random_instance(seed);
        let c = central_difference(&model, &topo, &sup, 5e-4, 1e-4)?;
        if c.max_relative_error > worst {
            worst = c.max_relative_error;
            println!(
                "instance {seed}: {} nodes, plan {:?}, relative error {:.2e}",
                topo.num_nodes(),
                model.layer_plan,
                worst
            );
        }
        checked += c.checked;
    }
    println!("{n} instances, {checked} gradient entries, max relative error {worst:.2e}");
    Ok(())
}
