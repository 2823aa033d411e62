//! Builds every twist table shipped with the fixtures and compares both the
//! integer coefficients and the predicted central values against the
//! expected rows.

use std::path::PathBuf;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../fixtures/{name}"))
}

fn main() -> qtwist::Result<()> {
    for name in ["27a.fx", "15a.fx", "75a.fx"] {
        let fx = qtwist::fixture::load(fixture(name))?;
        println!("{} (level {})", fx.curve.name, fx.curve.level);
        for spec in &fx.families {
            let rows = fx.family_table(&spec.family.name, spec.bound)?;
            let expected = fx.expected_table(spec)?;
            let mut worst: f64 = 0.0;
            let mut mismatches = 0;
            if let Some(expected) = &expected {
                if expected.len() != rows.len() {
                    mismatches += 1;
                }
                for (row, want) in rows.iter().zip(expected) {
                    if row.d != want.d || row.coefficient != want.coefficient {
                        mismatches += 1;
                    }
                    worst = worst.max((row.predicted - want.central_value).abs());
                }
            }
            println!(
                "  {:6}  rows {:2}  coefficient mismatches {}  max |L - expected| {:.2e}",
                spec.family.name,
                rows.len(),
                mismatches,
                worst,
            );
        }
    }
    Ok(())
}
