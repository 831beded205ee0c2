//! Sweep a hypergeometric state over p, write CSV, and re-validate the file.
//!
//!     cargo run --example parameter_sweep

use qphase::{run_sweep, validate_csv, Family, SweepConfig};

fn main() -> qphase::Result<()> {
    let config = SweepConfig::new(Family::Hypergeometric)
        .param("L", 100.0)
        .param("M", 10.0)
        .axis("p", 0.05, 0.95, 0.05);
    let table = run_sweep(&config)?;
    let csv = table.to_csv_string();
    print!("{}", table.to_human());

    let check = validate_csv(csv.as_bytes())?;
    println!(
        "{} rows, {} ok, {} invariant violations",
        check.rows,
        check.ok_rows,
        check.violations.len()
    );

    // The same sweep written as a TOML config file.
    let toml = "family = \"hs\"\n[params]\nL = 100\nM = 10\n[[axes]]\nname = \"p\"\nstart = 0.05\nstop = 0.95\nstep = 0.05\n";
    let from_file = run_sweep(&SweepConfig::from_toml(toml)?)?;
    assert_eq!(from_file.to_csv_string(), csv);
    Ok(())
}
