//! Exercises the L-series oracle directly: central values of quadratic
//! twists, exact vanishing for odd-sign twists, and the self-twist identity
//! of the level-27 curve, which has complex multiplication.

use std::path::PathBuf;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../fixtures/{name}"))
}

fn main() -> qtwist::Result<()> {
    let fx = qtwist::fixture::load(fixture("27a.fx"))?;
    let oracle = fx.oracle();

    println!("twists of {}:", fx.curve.name);
    for d in [1, -4, -7, 13, 5, -8, 40] {
        let sign = oracle.twist_sign(d)?;
        println!("  L(f, {d:>3}, 1) = {:<18}  sign {sign:+}", format!("{:.12}", oracle.l_value(d)?));
    }

    println!("self-twist identity (twisting by -3 fixes the form):");
    for d in [-4, -7, 13, 28, 37] {
        let direct = oracle.l_value(d)?;
        let conductor = oracle.twisted_conductor(d)? as f64;
        let via_cm = oracle.smoothed_sum(-3 * d, conductor);
        println!(
            "  D = {d:>3}: L = {direct:.12}  via -3D character {via_cm:.12}  |diff| {:.2e}",
            (direct - via_cm).abs()
        );
    }
    Ok(())
}
