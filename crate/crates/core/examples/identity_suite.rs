//! Runs every lemma and theorem check on one model and prints the table.
//!
//! `cargo run --example identity_suite -- cyclic` picks the model; the default is the cosine clock.

use iqc::models::{ModelConfig, ModelKind};
use iqc::numerics::QuadratureRule;
use iqc::theorems::{default_probes, render_table, Suite, DEFAULT_SEED};
use iqc::Tolerances;

fn main() -> iqc::Result<()> {
    let kind: ModelKind = std::env::args().nth(1).unwrap_or_else(|| "two-component-cos".into()).parse()?;
    let cfg = ModelConfig { model: kind, ..ModelConfig::default() };
    let model = cfg.build()?;
    let grid = *model.grid();
    let suite = Suite::with_defaults(model, &QuadratureRule::clock_default(grid.tau()), Tolerances::default())?;
    let reports = suite.run(&default_probes(grid, DEFAULT_SEED)?)?;
    print!("{}", render_table(&reports));
    println!("consistency defect {:.3e}", suite.consistency_defect());
    Ok(())
}
