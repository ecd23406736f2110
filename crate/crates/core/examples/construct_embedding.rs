//! Turning a certified distance matrix back into spheres, by factorization and
//! by the explicit Schur construction.

use kissing_spheres::embed::{construct_embedding, schur_construction};
use kissing_spheres::kissing::{distance_matrix, KissingSphere};
use kissing_spheres::numkernel::Tolerance;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerance::default();
    let n = 3;
    let original = vec![
        KissingSphere::finite(vec![0.0, 0.0], 1.0)?,
        KissingSphere::finite(vec![2.0, 1.0], 0.5)?,
        KissingSphere::finite(vec![-1.0, 1.5], 3.0)?,
        KissingSphere::finite(vec![0.5, -2.0], 1.5)?,
        KissingSphere::hyperplane(2.0)?,
    ];
    let d = distance_matrix(&original)?;

    let r = construct_embedding(&d, n, &tol)?;
    println!("factorization, relative error {:e}", r.relative_error);
    for s in &r.spheres {
        println!("  {s:?}");
    }

    let spheres = schur_construction(&d, n, (0, 1), &tol)?;
    let err = d.relative_error(&distance_matrix(&spheres)?);
    println!("schur with pivot (0, 1), relative error {err:e}");
    for s in &spheres {
        println!("  {s:?}");
    }
    Ok(())
}
