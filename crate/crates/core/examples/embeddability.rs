//! Deciding whether a matrix of squared distances comes from kissing spheres,
//! with both certificate methods.

use kissing_spheres::embed::{check_euclidean, check_kissing, Method, SquaredDistanceMatrix};
use kissing_spheres::numkernel::Tolerance;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerance::default();
    // three mutually tangent spheres
    let d = SquaredDistanceMatrix::from_rows(&[
        vec![0.0, 1.0, 1.0],
        vec![1.0, 0.0, 1.0],
        vec![1.0, 1.0, 0.0],
    ])?;
    for n in 1..=2 {
        for method in [Method::Minors, Method::Inertia] {
            let c = check_kissing(&d, n, method, &tol)?;
            println!("n={n} {method:?}: {:?} witness={:?}", c.verdict, c.witness);
        }
    }

    // the same numbers read as Euclidean squared distances
    let c = check_euclidean(&d, 2, Method::Inertia, &tol)?;
    println!("euclidean n=2: {:?}", c.verdict);
    Ok(())
}
