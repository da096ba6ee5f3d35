#![allow(dead_code)]

use proptest::prelude::*;

use hodgefir::experiments::toy_complex;
use hodgefir::{HodgeSystem, SimplicialComplex, Spectrum};

/// Random complex on up to `max_nodes` nodes: a random edge subset of the
/// complete graph and a random subset of the resulting 3-cliques.
pub fn arb_complex(max_nodes: usize) -> impl Strategy<Value = SimplicialComplex> {
    (2..=max_nodes)
        .prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (Just(n), proptest::collection::vec(proptest::bool::weighted(0.45), pairs), any::<u64>())
        })
        .prop_map(|(n, mask, tri_bits)| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if mask[k] {
                        edges.push([u, v]);
                    }
                    k += 1;
                }
            }
            let graph = SimplicialComplex::from_indices(n, &edges, &[]).unwrap();
            let triangles: Vec<[usize; 3]> = graph
                .three_cliques()
                .into_iter()
                .enumerate()
                .filter(|(i, _)| tri_bits.rotate_left(*i as u32) & 1 == 1)
                .map(|(_, t)| t)
                .collect();
            SimplicialComplex::from_indices(n, &edges, &triangles).unwrap()
        })
}

pub fn arb_complex_with_flow(max_nodes: usize) -> impl Strategy<Value = (SimplicialComplex, Vec<f64>)> {
    arb_complex(max_nodes).prop_flat_map(|c| {
        let n = c.num_edges();
        (Just(c), proptest::collection::vec(-10.0..10.0f64, n))
    })
}

pub fn toy() -> (HodgeSystem, Spectrum) {
    let sys = HodgeSystem::new(toy_complex());
    let s = Spectrum::new(&sys).unwrap();
    (sys, s)
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}
