//! Spheres as null vectors of Minkowski space: the squared kissing distance
//! equals minus the Minkowski inner product of the images.

use kissing_spheres::kissing::{dist_k, KissingSphere};
use kissing_spheres::lightcone::{d_m_squared, psi, psi_inverse};
use kissing_spheres::numkernel::Tolerance;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 3;
    let tol = Tolerance::default();
    let p = KissingSphere::finite(vec![0.5, -1.0], 2.0)?;
    let q = KissingSphere::hyperplane(0.5)?;

    let (x, y) = (psi(&p, n)?, psi(&q, n)?);
    println!("psi(p) = {:?}, <x,x> = {:e}", x.coords(), x.norm_sq());
    println!("psi(q) = {:?}, <y,y> = {:e}", y.coords(), y.norm_sq());

    let d = dist_k(&p, &q)?;
    println!("d_K^2 = {:.12}, d_M^2 = {:.12}", d * d, d_m_squared(&x, &y)?);
    println!("psi^-1(psi(p)) = {:?}", psi_inverse(&x, &tol)?);
    Ok(())
}
