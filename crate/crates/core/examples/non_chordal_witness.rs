//! A graph with a chordless cycle admits lengths that pass every clique test
//! yet have no completion.

use kissing_spheres::completion::{
    clique_feasible, complete_chordal, non_chordal_witness, zero_chain_contradiction, LengthGraph,
};
use kissing_spheres::numkernel::Tolerance;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerance::default();
    let square = LengthGraph::from_edges(5, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0), (3, 4, 1.0)])?;
    let (w, cycle) = non_chordal_witness(&square)?;
    println!("cycle {cycle:?}");
    for (u, v, len) in w.edges() {
        println!("  {u}-{v}: {len}");
    }
    println!("clique feasible: {}", clique_feasible(&w, 2, &tol)?.feasible);
    println!("zero chain joins {:?}", zero_chain_contradiction(&w));
    println!("completion: {:?}", complete_chordal(&w, 2, &tol)?.verdict);
    Ok(())
}
