#![allow(dead_code)]

use kissing_spheres::completion::LengthGraph;
use kissing_spheres::kissing::{dist_k, InversionSphere, KissingSphere, MobiusGenerator};
use kissing_spheres::spheres::EuclideanSphere;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn point(rng: &mut ChaCha8Rng, dim: usize, half_width: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-half_width..half_width)).collect()
}

pub fn finite(rng: &mut ChaCha8Rng, n: usize) -> KissingSphere {
    KissingSphere::finite(point(rng, n - 1, 2.0), rng.gen_range(0.5..2.0)).unwrap()
}

pub fn hyperplane(rng: &mut ChaCha8Rng) -> KissingSphere {
    KissingSphere::hyperplane(rng.gen_range(0.5..2.0)).unwrap()
}

/// `k` spheres in dimension `n`, at most one of them a hyperplane.
pub fn sphere_set(rng: &mut ChaCha8Rng, k: usize, n: usize) -> Vec<KissingSphere> {
    let mut out: Vec<KissingSphere> = (0..k).map(|_| finite(rng, n)).collect();
    if rng.gen_bool(0.3) {
        let i = rng.gen_range(0..k);
        out[i] = hyperplane(rng);
    }
    out
}

pub fn generator(rng: &mut ChaCha8Rng, n: usize) -> MobiusGenerator {
    match rng.gen_range(0..4) {
        0 => MobiusGenerator::Translation(point(rng, n - 1, 3.0)),
        1 => MobiusGenerator::Dilation(rng.gen_range(0.2..5.0)),
        2 => {
            let mut normal = point(rng, n - 1, 1.0);
            normal[0] += 1e-3;
            MobiusGenerator::Reflection {
                normal,
                offset: rng.gen_range(-1.0..1.0),
            }
        }
        _ => MobiusGenerator::Inversion(
            InversionSphere::new(point(rng, n - 1, 3.0), rng.gen_range(0.5..2.0)).unwrap(),
        ),
    }
}

pub fn euclidean_sphere(rng: &mut ChaCha8Rng, n: usize) -> EuclideanSphere {
    EuclideanSphere::new(point(rng, n, 2.0), rng.gen_range(0.5..2.0)).unwrap()
}

pub fn rel_close(a: f64, b: f64, eps: f64) -> bool {
    (a - b).abs() <= eps * a.abs().max(b.abs()).max(1.0)
}

/// Chordal graph on `k` vertices grown by attaching each new vertex to a
/// random subset of an existing clique, so every vertex is simplicial when
/// added.
pub fn chordal_shape(rng: &mut ChaCha8Rng, k: usize) -> Vec<(usize, usize)> {
    let mut cliques: Vec<Vec<usize>> = vec![vec![0]];
    let mut edges = Vec::new();
    for v in 1..k {
        let base = cliques.choose(rng).unwrap().clone();
        let size = rng.gen_range(0..=base.len());
        let mut attach: Vec<usize> = base.choose_multiple(rng, size).copied().collect();
        attach.sort_unstable();
        for &u in &attach {
            edges.push((u, v));
        }
        attach.push(v);
        cliques.push(attach);
    }
    edges
}

/// Edge lengths read off a true sphere configuration.
pub fn graph_from_spheres(k: usize, edges: &[(usize, usize)], spheres: &[KissingSphere]) -> LengthGraph {
    LengthGraph::from_edges(
        k,
        edges.iter().map(|&(u, v)| (u, v, dist_k(&spheres[u], &spheres[v]).unwrap())),
    )
    .unwrap()
}

pub fn cycle_graph(k: usize) -> LengthGraph {
    LengthGraph::from_edges(k, (0..k).map(|i| (i, (i + 1) % k, 1.0))).unwrap()
}
