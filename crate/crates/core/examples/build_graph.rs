//! Builds the occupation-skill graph and prints its structure report.
//!
//! ```text
//! cargo run --release --example build_graph
//! ```

use occrisk::config::RunConfig;
use occrisk::graph::NodeRef;
use occrisk::pipeline::Run;

fn main() -> occrisk::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.paths.data_dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fixture").into();
    cfg.paths.out_dir = std::env::temp_dir().join("occrisk-examples");
    let run = Run::new(cfg)?;
    let (graph, report) = run.build_graph()?;
    println!(
        "{} occupations, {} skills, {} edges, feature dimension {}",
        report.occupations,
        report.skills,
        report.edges,
        graph.feature_dim()
    );
    println!("bipartite {}, degree sums match {}", report.bipartite, report.degree_sums_match);

    let degrees: Vec<usize> = (0..graph.num_occupations()).map(|o| graph.occupation_skills(o).len()).collect();
    let mean = degrees.iter().sum::<usize>() as f64 / degrees.len() as f64;
    println!(
        "occupation degree min {} mean {mean:.1} max {}",
        degrees.iter().min().unwrap_or(&0),
        degrees.iter().max().unwrap_or(&0)
    );
    let mut skills: Vec<(usize, &str)> = (0..graph.num_skills())
        .map(|s| (graph.skill_occupations(s).len(), graph.skill_ids()[s].as_str()))
        .collect();
    skills.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(b.1)));
    println!("most shared skills:");
    for (d, id) in skills.iter().take(5) {
        println!("  {id} linked to {d} occupations");
    }
    let first = NodeRef::occupation(0);
    println!("{} has {} neighbors", graph.occupation_ids()[0], graph.degree(first)?);
    println!("artifacts in {}", run.cfg.paths.out_dir.display());
    Ok(())
}
