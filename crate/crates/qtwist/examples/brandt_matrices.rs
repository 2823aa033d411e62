//! Prints Brandt matrices B(n) for the fixtures that ship ideal-class
//! representatives, together with their row sums and the eigenvalue of the
//! fixture eigenvector.

use std::path::PathBuf;

use qtwist::quaternion::brandt_matrix;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../fixtures/{name}"))
}

fn eigenvalue(b: &[Vec<i64>], v: &[i64]) -> Option<i64> {
    for transpose in [false, true] {
        let image: Vec<i64> = (0..v.len())
            .map(|i| {
                (0..v.len())
                    .map(|j| if transpose { b[j][i] * v[j] } else { b[i][j] * v[j] })
                    .sum()
            })
            .collect();
        let pivot = v.iter().position(|&x| x != 0)?;
        let lambda = image[pivot] / v[pivot];
        if (0..v.len()).all(|i| image[i] == lambda * v[i]) {
            return Some(lambda);
        }
    }
    None
}

fn main() -> qtwist::Result<()> {
    for name in ["27a.fx", "15a.fx"] {
        let fx = qtwist::fixture::load(fixture(name))?;
        let classes = fx.classes()?;
        println!("{} (level {})", fx.curve.name, fx.curve.level);
        for n in [2, 4, 7, 11, 13] {
            let b = brandt_matrix(&fx.algebra, &fx.order, &classes, fx.curve.level, n)?;
            let sums: Vec<i64> = b.iter().map(|row| row.iter().sum()).collect();
            println!(
                "  B({n}) = {:?}   row sums {:?}   eigenvalue {:?}",
                b,
                sums,
                eigenvalue(&b, &fx.eigenvector)
            );
        }
    }
    Ok(())
}
