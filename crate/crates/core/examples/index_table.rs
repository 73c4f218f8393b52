//! Build a small standardized table, save it, reload it and interpolate.

use gittins_lab::solver::{build_table, gittins_index_standard, IndexTable, SolverConfig};

fn main() -> gittins_lab::Result<()> {
    let gamma = 0.9;
    let config = SolverConfig::for_discount(gamma);
    let ratios = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
    let table = build_table(gamma, &ratios, &config)?;

    let dir = tempfile::tempdir()?;
    let path = dir.path().join("gamma_0.9.json");
    table.save(&path)?;
    let table = IndexTable::load(&path)?;

    for (r, v) in table.ratios().iter().zip(table.indices()) {
        println!("ratio {r:>6}: {v:.6}");
    }
    for r in [0.7, 3.0, 11.0] {
        let direct = gittins_index_standard(gamma, r, &config)?.index;
        println!("ratio {r:>6}: table {:.6}, direct {direct:.6}", table.lookup(r)?);
    }
    match table.lookup(40.0) {
        Err(e) => println!("ratio 40: {e}"),
        Ok(v) => println!("ratio 40: {v}"),
    }
    Ok(())
}
