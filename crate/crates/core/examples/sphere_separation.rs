//! Arbitrary Euclidean spheres: separations, the hyperboloid picture and the
//! embeddability test for separation matrices.

use kissing_spheres::embed::Method;
use kissing_spheres::numkernel::Tolerance;
use kissing_spheres::spheres::{
    check_spheres, classify_spheres, hyperboloid_embed, separation, separation_matrix,
    EuclideanSphere,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerance::default();
    let spheres = [
        EuclideanSphere::new(vec![0.0, 0.0], 1.0)?,
        EuclideanSphere::new(vec![2.0, 0.0], 1.0)?,
        EuclideanSphere::new(vec![0.5, 0.0], 3.0)?,
        EuclideanSphere::new(vec![1.0, 5.0], 0.5)?,
    ];
    for i in 0..spheres.len() {
        for j in (i + 1)..spheres.len() {
            let s = separation(&spheres[i], &spheres[j])?;
            println!("{i}-{j}: {s:.4} {:?}", classify_spheres(&spheres[i], &spheres[j])?);
        }
    }
    for s in &spheres {
        let x = hyperboloid_embed(s);
        println!("{:?} -> {:?} (<x,x> = {:.3})", s, x.coords(), x.norm_sq());
    }
    let m = separation_matrix(&spheres)?;
    for n in 1..=2 {
        let c = check_spheres(&m, n, Method::Inertia, &tol)?;
        println!("n={n}: {:?} {:?}", c.verdict, c.inertia);
    }
    Ok(())
}
