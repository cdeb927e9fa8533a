//! Writes `H`, `P_C` and `T_C` of a small cyclic clock as CSV with JSON envelopes.

use std::fs;

use iqc::models::{make_cyclic, CyclicClockSpec};
use iqc::numerics::QuadratureRule;
use iqc::operators::{build_hamiltonian, build_pc_for, build_tc};
use iqc::output::to_json_text;

fn main() -> iqc::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "out/export".into());
    fs::create_dir_all(&dir)?;
    let spec = CyclicClockSpec::new(8, 1.0);
    let model = make_cyclic(spec, spec.full_grid()?)?;
    let ops = [
        ("H", build_hamiltonian(&model)),
        ("PC", build_pc_for(&model)),
        ("TC", build_tc(&model, &QuadratureRule::clock_default(1.0))?),
    ];
    for (stem, op) in ops {
        let csv = format!("{stem}.csv");
        fs::write(format!("{dir}/{csv}"), op.to_csv())?;
        fs::write(format!("{dir}/{stem}.json"), to_json_text(&op.envelope("cyclic-D8", &csv))?)?;
        println!("{stem}: hermitian defect {:.2e}", op.hermitian_defect());
    }
    println!("written to {dir}");
    Ok(())
}
