//! Regenerate the five figure data sets into a directory.
//!
//!     cargo run --example figure_data -- [out_dir]

use std::path::PathBuf;

use qphase::{figure_preset, run_sweep, validate_csv};

fn main() -> qphase::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    std::fs::create_dir_all(&dir)?;
    for id in 1..=5 {
        let config = figure_preset(id)?;
        let table = run_sweep(&config)?;
        let path = dir.join(format!("figure{id}.csv"));
        table.write_csv(std::fs::File::create(&path)?)?;
        let check = validate_csv(std::fs::File::open(&path)?)?;
        let axes: Vec<&str> = config.axes.iter().map(|a| a.name.as_str()).collect();
        println!(
            "{}: {} over {axes:?}, {}/{} rows ok",
            path.display(),
            config.family,
            check.ok_rows,
            check.rows
        );
    }
    Ok(())
}
