//! Calibrates every family's eigenform and prints its q-expansion next to
//! the reference expansion stored in the fixture.

use std::path::PathBuf;

use qtwist::lift::format_q_expansion;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../fixtures/{name}"))
}

fn main() -> qtwist::Result<()> {
    for name in ["27a.fx", "15a.fx", "75a.fx"] {
        let fx = qtwist::fixture::load(fixture(name))?;
        println!("{}", fx.curve.name);
        for spec in &fx.families {
            let (coeffs, outcome) = fx.eigenform(&spec.family.name, spec.expansion_limit)?;
            let rendered = format_q_expansion(&coeffs, spec.expansion_limit);
            let status = if rendered == spec.expansion { "ok " } else { "BAD" };
            println!("  {status} {:6} signs {:?}", spec.family.name, outcome.signs);
            println!("      {rendered}");
        }
    }
    Ok(())
}
