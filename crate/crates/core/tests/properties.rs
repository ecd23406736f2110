#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use kissing_spheres::completion::{
    clique_feasible, complete_chordal, is_chordal, non_chordal_witness, zero_chain_contradiction,
    Chordality, CompletionVerdict, LengthGraph,
};
use kissing_spheres::embed::{check_kissing, Method};
use kissing_spheres::kissing::{apply_generator, classify_pair, dist_k, KissingSphere, PairClass};
use kissing_spheres::lightcone::{lorentz_align, psi, LorentzMap, MinkowskiVector};
use kissing_spheres::numkernel::{schur_complement, SymMatrix, Tolerance};
use kissing_spheres::spheres::{check_spheres, separation_matrix, SeparationMatrix};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

fn sphere_strategy(n: usize) -> impl Strategy<Value = KissingSphere> {
    prop_oneof![
        9 => (prop::collection::vec(-2.0..2.0f64, n - 1), 0.5..2.0f64)
            .prop_map(|(t, phi)| KissingSphere::finite(t, phi).unwrap()),
        1 => (0.5..2.0f64).prop_map(|h| KissingSphere::hyperplane(h).unwrap()),
    ]
}

/// Boost along the first axis composed with a rotation in the first two
/// spatial coordinates.
fn random_lorentz(rapidity: f64, angle: f64, n: usize) -> LorentzMap {
    let mut boost = DMatrix::identity(n + 1, n + 1);
    boost[(0, 0)] = rapidity.cosh();
    boost[(n, n)] = rapidity.cosh();
    boost[(0, n)] = rapidity.sinh();
    boost[(n, 0)] = rapidity.sinh();
    let mut rot = DMatrix::identity(n + 1, n + 1);
    if n >= 2 {
        rot[(0, 0)] = angle.cos();
        rot[(1, 1)] = angle.cos();
        rot[(0, 1)] = -angle.sin();
        rot[(1, 0)] = angle.sin();
    }
    LorentzMap::from_matrix(rot * boost)
}

fn max_diff(a: &MinkowskiVector, b: &MinkowskiVector) -> f64 {
    a.coords().iter().zip(b.coords()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distance_is_symmetric_and_classified_consistently(
        p in sphere_strategy(3), q in sphere_strategy(3)
    ) {
        let d = dist_k(&p, &q).unwrap();
        prop_assert_eq!(d, dist_k(&q, &p).unwrap());
        prop_assert!(d >= 0.0);
        let class = classify_pair(&p, &q).unwrap();
        match class {
            PairClass::Disjoint => prop_assert!(d > 1.0),
            PairClass::Intersecting => prop_assert!(d < 1.0),
            PairClass::Tangent => prop_assert!((d - 1.0).abs() <= 1e-9),
            PairClass::SharedTangentPoint => prop_assert!(d <= 1e-9),
        }
    }

    #[test]
    fn generators_preserve_distance(p in sphere_strategy(3), q in sphere_strategy(3), seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = generator(&mut r, 3);
        let before = dist_k(&p, &q).unwrap();
        let after = dist_k(&apply_generator(&p, &g).unwrap(), &apply_generator(&q, &g).unwrap()).unwrap();
        prop_assert!(rel_close(before, after, 1e-9), "{} vs {}", before, after);
    }

    #[test]
    fn alignment_recovers_a_lorentz_map(
        spheres in prop::collection::vec(sphere_strategy(3), 1..6),
        rapidity in -1.5..1.5f64,
        angle in -3.0..3.0f64,
    ) {
        let tol = Tolerance::default();
        let xs: Vec<MinkowskiVector> = spheres.iter().map(|s| psi(s, 3).unwrap()).collect();
        let l = random_lorentz(rapidity, angle, 3);
        let ys: Vec<MinkowskiVector> = xs.iter().map(|x| l.apply(x).unwrap()).collect();
        let found = match lorentz_align(&xs, &ys, &tol) {
            Ok(found) => found,
            // several spheres sharing a tangent point leave a degenerate span
            Err(_) => return Ok(()),
        };
        prop_assert!(found.is_lorentz(&tol));
        for (x, y) in xs.iter().zip(&ys) {
            prop_assert!(max_diff(&found.apply(x).unwrap(), y) <= 1e-8 * y.euclidean_norm().max(1.0));
        }
        let back = lorentz_align(&ys, &xs, &tol).unwrap();
        let id = back.compose(&found).unwrap();
        let drift = (id.matrix() - DMatrix::<f64>::identity(4, 4)).amax();
        prop_assert!(drift <= 1e-7, "align(Y, X) is not the inverse: {:e}", drift);
    }

    #[test]
    fn schur_determinant_identity(entries in prop::collection::vec(-3.0..3.0f64, 21), pivot in 0usize..6) {
        let mut it = entries.into_iter();
        let mut rows = vec![vec![0.0; 6]; 6];
        for i in 0..6 {
            for j in i..6 {
                let v = it.next().unwrap();
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        let m = SymMatrix::from_rows(&rows).unwrap();
        let pivots = [pivot, (pivot + 2) % 6];
        let block = m.principal(&pivots);
        prop_assume!(block.determinant().abs() > 1e-3);
        let p = schur_complement(&m, &pivots, &Tolerance::default()).unwrap();
        let lhs = m.determinant();
        let rhs = block.determinant() * p.determinant();
        prop_assert!((lhs - rhs).abs() <= 1e-7 * m.hadamard_bound().max(1.0), "{} vs {}", lhs, rhs);
    }
}

#[test]
fn sphere_certificates_agree_up_to_order_eight() {
    let mut r = rng(11);
    let tol = Tolerance::default();
    let mut matrices: Vec<SeparationMatrix> = Vec::new();
    for _ in 0..150 {
        let (k, n) = (r.gen_range(1..=8), r.gen_range(1..=3));
        let spheres: Vec<_> = (0..k).map(|_| euclidean_sphere(&mut r, n)).collect();
        matrices.push(separation_matrix(&spheres).unwrap());
    }
    for _ in 0..150 {
        let k = r.gen_range(1..=8);
        let mut rows = vec![vec![-1.0; k]; k];
        for i in 0..k {
            for j in (i + 1)..k {
                let v = r.gen_range(-3.0..3.0);
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        matrices.push(SeparationMatrix::from_rows(&rows).unwrap());
    }
    for (i, s) in matrices.iter().enumerate() {
        for n in 0..=5 {
            let a = check_spheres(s, n, Method::Minors, &tol).unwrap();
            let b = check_spheres(s, n, Method::Inertia, &tol).unwrap();
            assert_eq!(a.verdict, b.verdict, "matrix {i} at n={n}: {a:?} vs {b:?}");
        }
    }
}

#[test]
fn hyperplane_pairs_have_distance_zero() {
    let p = KissingSphere::hyperplane(1.0).unwrap();
    let q = KissingSphere::hyperplane(3.0).unwrap();
    assert_eq!(dist_k(&p, &q).unwrap(), 0.0);
    assert_eq!(classify_pair(&p, &q).unwrap(), PairClass::SharedTangentPoint);
}

fn graph_from_mask(k: usize, mask: u64) -> LengthGraph {
    let mut edges = Vec::new();
    let mut bit = 0;
    for u in 0..k {
        for v in (u + 1)..k {
            if mask >> bit & 1 == 1 {
                edges.push((u, v, 1.0));
            }
            bit += 1;
        }
    }
    LengthGraph::from_edges(k, edges).unwrap()
}

fn check_witness(g: &LengthGraph, tol: &Tolerance) {
    let (w, cycle) = non_chordal_witness(g).unwrap();
    assert!(cycle.len() >= 4);
    // the zero edges of the cycle join the ends of its first edge
    assert!(zero_chain_contradiction(&w).is_some(), "{cycle:?}");
    assert!(clique_feasible(&w, 2, tol).unwrap().feasible, "{w:?}");
    assert_eq!(complete_chordal(&w, 2, tol).unwrap().verdict, CompletionVerdict::NotChordal);
}

#[test]
fn witness_property_small_graphs_exhaustive() {
    let tol = Tolerance::default();
    let mut seen = 0;
    for k in 4..=6 {
        let pairs = k * (k - 1) / 2;
        for mask in 0..(1u64 << pairs) {
            let g = graph_from_mask(k, mask);
            if is_chordal(&g).is_chordal() {
                assert!(non_chordal_witness(&g).is_err());
                continue;
            }
            check_witness(&g, &tol);
            seen += 1;
        }
    }
    assert!(seen > 1000);
}

#[test]
fn witness_property_sampled_larger_graphs() {
    let tol = Tolerance::default();
    let mut r = rng(12);
    let mut seen = 0;
    while seen < 300 {
        let k = r.gen_range(7..=8);
        let pairs = k * (k - 1) / 2;
        let mask = r.gen_range(0..(1u64 << pairs));
        let g = graph_from_mask(k, mask);
        if let Chordality::NotChordal { .. } = is_chordal(&g) {
            check_witness(&g, &tol);
            seen += 1;
        }
    }
}

#[test]
fn generated_instances_complete_and_certify() {
    let tol = Tolerance::default();
    let mut r = rng(13);
    for _ in 0..60 {
        let (k, n) = (r.gen_range(2..=8), r.gen_range(2..=4));
        let spheres = sphere_set(&mut r, k, n);
        let edges = chordal_shape(&mut r, k);
        let g = graph_from_spheres(k, &edges, &spheres);
        let res = complete_chordal(&g, n, &tol).unwrap();
        assert_eq!(res.verdict, CompletionVerdict::Completed, "{:?}", res.witness);
        let d = res.full_matrix.unwrap();
        assert!(check_kissing(&d, n, Method::Minors, &tol).unwrap().is_embeddable());
    }
}
