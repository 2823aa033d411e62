//! Shows the calibration step on its own: the probe discriminants drawn for
//! each family, the winning sign assignment, the fitted proportionality
//! constant with its spread, and the printed identity it should reproduce.

use std::path::PathBuf;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../fixtures/{name}"))
}

fn main() -> qtwist::Result<()> {
    for name in ["27a.fx", "15a.fx", "75a.fx"] {
        let fx = qtwist::fixture::load(fixture(name))?;
        println!("{}", fx.curve.name);
        for spec in &fx.families {
            let fam = &spec.family;
            let probes = fx.probes(fam, 5)?;
            let ds: Vec<i64> = probes.iter().map(|p| p.d).collect();
            let (_, outcome) = fx.eigenform(&fam.name, spec.expansion_limit)?;
            println!("  {:6} probes {ds:?}", fam.name);
            println!(
                "         signs {:?}  k {:.12}  spread {:.1e}",
                outcome.signs, outcome.k, outcome.relative_spread
            );
            if let Some(value) = fx.identity_value(fam)? {
                let (coeff, d) = fam.identity.unwrap();
                println!(
                    "         identity {coeff}*L({d}) = {value:.12}  relative difference {:.1e}",
                    (outcome.k - value).abs() / value
                );
            }
        }
    }
    Ok(())
}
