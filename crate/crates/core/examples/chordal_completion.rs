//! Filling in the missing distances of a chordal pattern so that the full
//! matrix is realized by kissing spheres.

use kissing_spheres::completion::{complete_chordal, is_chordal, LengthGraph};
use kissing_spheres::kissing::{dist_k, KissingSphere};
use kissing_spheres::numkernel::Tolerance;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerance::default();
    let spheres = [
        KissingSphere::finite(vec![0.0], 1.0)?,
        KissingSphere::finite(vec![1.0], 2.0)?,
        KissingSphere::finite(vec![3.0], 0.5)?,
        KissingSphere::finite(vec![-2.0], 1.0)?,
        KissingSphere::hyperplane(3.0)?,
    ];
    // two triangles sharing the edge 1-2, plus a pendant
    let pattern = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4)];
    let mut g = LengthGraph::new(spheres.len())?;
    for (u, v) in pattern {
        g.add_edge(u, v, dist_k(&spheres[u], &spheres[v])?)?;
    }
    println!("{:?}", is_chordal(&g));

    let res = complete_chordal(&g, 2, &tol)?;
    println!("verdict: {:?}", res.verdict);
    if let Some(d) = res.full_matrix {
        for row in d.to_rows() {
            println!("  {}", row.iter().map(|x| format!("{x:8.4}")).collect::<String>());
        }
    }
    Ok(())
}
