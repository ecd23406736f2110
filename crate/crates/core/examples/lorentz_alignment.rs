//! Recovering the Lorentz map between two configurations with the same
//! inner products.

use kissing_spheres::kissing::KissingSphere;
use kissing_spheres::lightcone::{lorentz_align, psi, LorentzMap};
use kissing_spheres::numkernel::Tolerance;
use nalgebra::DMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerance::default();
    let n = 2;
    let xs = [
        KissingSphere::finite(vec![0.0], 1.0)?,
        KissingSphere::finite(vec![1.5], 0.5)?,
        KissingSphere::hyperplane(2.0)?,
    ]
    .iter()
    .map(|s| psi(s, n))
    .collect::<Result<Vec<_>, _>>()?;

    let (c, s) = (0.8f64.cosh(), 0.8f64.sinh());
    let boost = LorentzMap::from_matrix(DMatrix::from_row_slice(3, 3, &[c, 0.0, s, 0.0, 1.0, 0.0, s, 0.0, c]));
    let ys = xs.iter().map(|x| boost.apply(x)).collect::<Result<Vec<_>, _>>()?;

    let found = lorentz_align(&xs, &ys, &tol)?;
    println!("lorentz: {}", found.is_lorentz(&tol));
    for row in found.matrix().row_iter() {
        println!("  {}", row.iter().map(|x| format!("{x:9.5}")).collect::<String>());
    }
    println!("max deviation {:e}", (found.matrix() - boost.matrix()).amax());
    Ok(())
}
