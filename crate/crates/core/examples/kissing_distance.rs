//! Distances between spheres kissing the boundary of the upper half-space,
//! and their invariance under Möbius generators.

use kissing_spheres::kissing::{
    apply_generator, classify_pair, dist_k, InversionSphere, KissingSphere, MobiusGenerator,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spheres = [
        KissingSphere::finite(vec![0.0, 0.0], 1.0)?,
        KissingSphere::finite(vec![1.0, 0.0], 1.0)?,
        KissingSphere::finite(vec![0.0, 3.0], 4.0)?,
        KissingSphere::hyperplane(1.0)?,
    ];
    let inversion = MobiusGenerator::Inversion(InversionSphere::new(vec![0.3, -0.2], 1.5)?);
    let moved: Vec<_> = spheres
        .iter()
        .map(|s| apply_generator(s, &inversion))
        .collect::<Result<_, _>>()?;

    for i in 0..spheres.len() {
        for j in (i + 1)..spheres.len() {
            let d = dist_k(&spheres[i], &spheres[j])?;
            let after = dist_k(&moved[i], &moved[j])?;
            let class = classify_pair(&spheres[i], &spheres[j])?;
            println!("{i}-{j}: d = {d:.6} ({class:?}), after inversion {after:.6}");
        }
    }
    Ok(())
}
