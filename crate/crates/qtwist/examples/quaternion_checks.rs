//! Runs the quaternionic consistency checks for each fixture: order
//! closure, discriminant, derived ternary forms, unit counts, the height
//! identity, and the Brandt matrix at 2.

use std::path::PathBuf;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../fixtures/{name}"))
}

fn main() -> qtwist::Result<()> {
    let mut all = true;
    for name in ["27a.fx", "15a.fx", "75a.fx"] {
        let fx = qtwist::fixture::load(fixture(name))?;
        println!("{} (level {})", fx.curve.name, fx.curve.level);
        for check in fx.verify() {
            let status = if check.passed { "ok " } else { "BAD" };
            all &= check.passed;
            if check.detail.is_empty() {
                println!("  {status} {}", check.name);
            } else {
                println!("  {status} {} — {}", check.name, check.detail);
            }
        }
    }
    println!("{}", if all { "all checks passed" } else { "FAILURES" });
    Ok(())
}
