//! Reference oracles and random instance generators used by the acceptance
//! checks. Everything here is computed densely or by a route independent of
//! the library code it is compared against.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use hodgefir::complex::SimplicialComplex;
use hodgefir::rank::rank_mod_prime;
use hodgefir::spectral::{FrequencyKind, Spectrum};
use hodgefir::IncidencePair;

/// Random complex on `3..=max_nodes` nodes: each node pair is an edge with a
/// probability drawn from `0.1..0.5`, and each resulting 3-clique is filled
/// with probability one half.
pub fn random_complex<R: Rng>(rng: &mut R, max_nodes: usize) -> SimplicialComplex {
    let n = rng.random_range(3..=max_nodes.max(3));
    let p = rng.random_range(0.1..0.5);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push([u, v]);
            }
        }
    }
    fill_some_cliques(rng, n, edges, 0.5)
}

/// Sparse random complex with about `degree * n / 2` edges: a ring plus
/// random chords, with 3-cliques filled at probability `fill`.
pub fn sparse_complex<R: Rng>(rng: &mut R, n: usize, degree: usize, fill: f64) -> SimplicialComplex {
    let mut edges = Vec::new();
    for u in 0..n {
        let v = (u + 1) % n;
        edges.push([u.min(v), u.max(v)]);
    }
    let target = degree * n / 2;
    while edges.len() < target {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a != b {
            edges.push([a.min(b), a.max(b)]);
        }
        edges.sort_unstable();
        edges.dedup();
    }
    fill_some_cliques(rng, n, edges, fill)
}

fn fill_some_cliques<R: Rng>(rng: &mut R, n: usize, edges: Vec<[usize; 2]>, fill: f64) -> SimplicialComplex {
    let graph = SimplicialComplex::from_indices(n, &edges, &[]).expect("edges reference valid nodes");
    let triangles: Vec<[usize; 3]> = graph
        .three_cliques()
        .into_iter()
        .filter(|_| rng.random_bool(fill))
        .collect();
    SimplicialComplex::from_indices(n, &edges, &triangles).expect("cliques are closed")
}

/// `sum_l h_l x^l` term by term.
pub fn power_sum(h: &[f64], x: f64) -> f64 {
    h.iter().enumerate().map(|(l, c)| c * x.powi(l as i32)).sum()
}

/// Response of a subspace-varying filter, expanded term by term.
pub fn sv_response(h0: f64, alpha: &[f64], beta: &[f64], x: f64, kind: FrequencyKind) -> f64 {
    let tail = |c: &[f64]| -> f64 { c.iter().enumerate().map(|(l, a)| a * x.powi(l as i32 + 1)).sum() };
    match kind {
        FrequencyKind::Harmonic => h0,
        FrequencyKind::Gradient => h0 + tail(alpha),
        FrequencyKind::Curl => h0 + tail(beta),
    }
}

/// `U diag(response) U^T f` with dense products.
pub fn spectral_apply(spectrum: &Spectrum, response: &[f64], f: &[f64]) -> Vec<f64> {
    let u = spectrum.eigenvectors();
    let d = DMatrix::from_diagonal(&DVector::from_column_slice(response));
    let out = u * d * u.transpose() * DVector::from_column_slice(f);
    out.iter().copied().collect()
}

/// Number of connected components of the 1-skeleton by breadth-first search.
pub fn components_bfs(complex: &SimplicialComplex) -> usize {
    let n = complex.num_nodes();
    let mut adj = vec![Vec::new(); n];
    for &[u, v] in complex.edges() {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut count = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    count
}

/// First Betti number from the Euler characteristic:
/// `b1 = b0 - (N0 - N1 + N2) + b2` with `b2 = N2 - rank B2`, the rank taken
/// modulo a large prime.
pub fn first_betti_number(complex: &SimplicialComplex) -> usize {
    let pair = IncidencePair::new(complex);
    let b0 = components_bfs(complex) as i64;
    let (n0, n1, n2) = (
        complex.num_nodes() as i64,
        complex.num_edges() as i64,
        complex.num_triangles() as i64,
    );
    let b2 = n2 - rank_mod_prime(&pair.b2, 1_000_000_007) as i64;
    (b0 - (n0 - n1 + n2) + b2) as usize
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
