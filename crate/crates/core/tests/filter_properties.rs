mod common;

use proptest::prelude::*;

use common::{arb_complex_with_flow, dist, norm};
use hodgefir::filtering::{apply_fir, apply_fir_instrumented, apply_sv, response_fir, response_sv, shift};
use hodgefir::{EdgeFlow, FirFilter, FrequencyKind, HodgeSystem, Spectrum, SvFilter};

fn coeffs(max: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0..1.0f64, 0..=max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn recursion_matches_spectral_application(
        (c, f) in arb_complex_with_flow(10),
        h in proptest::collection::vec(-1.0..1.0f64, 1..=6),
        h0 in -1.0..1.0f64,
        alpha in coeffs(3),
        beta in coeffs(3),
    ) {
        let sys = HodgeSystem::new(c);
        let s = Spectrum::new(&sys).unwrap();
        let flow = EdgeFlow::new(f);
        let fir = FirFilter::new(h).unwrap();
        let want = s.apply_response(&response_fir(&fir, &s).values, &flow).unwrap();
        let got = apply_fir(&fir, &sys.laplacians, &flow).unwrap();
        prop_assert!(dist(&got, &want) <= 1e-9 * norm(&want).max(1e-12));

        let sv = SvFilter::new(h0, alpha, beta).unwrap();
        let want = s.apply_response(&response_sv(&sv, &s).values, &flow).unwrap();
        let got = apply_sv(&sv, &sys.laplacians, &flow).unwrap();
        prop_assert!(dist(&got, &want) <= 1e-9 * norm(&want).max(1e-12));
    }

    #[test]
    fn filters_are_linear(
        (c, f) in arb_complex_with_flow(10),
        h in proptest::collection::vec(-1.0..1.0f64, 1..=5),
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
    ) {
        let sys = HodgeSystem::new(c);
        let n = f.len();
        let g: Vec<f64> = f.iter().rev().map(|x| x * 0.5 + 1.0).collect();
        let (fe, ge) = (EdgeFlow::new(f.clone()), EdgeFlow::new(g.clone()));
        let mix = EdgeFlow::new((0..n).map(|i| a * f[i] + b * g[i]).collect());
        let fir = FirFilter::new(h.clone()).unwrap();
        let lhs = apply_fir(&fir, &sys.laplacians, &mix).unwrap();
        let rhs = apply_fir(&fir, &sys.laplacians, &fe).unwrap().scaled(a).add(&apply_fir(&fir, &sys.laplacians, &ge).unwrap().scaled(b));
        prop_assert!(dist(&lhs, &rhs) <= 1e-9 * norm(&rhs).max(1.0));

        let sv = SvFilter::new(h[0], h[1..].to_vec(), h.iter().rev().copied().collect()).unwrap();
        let lhs = apply_sv(&sv, &sys.laplacians, &mix).unwrap();
        let rhs = apply_sv(&sv, &sys.laplacians, &fe).unwrap().scaled(a).add(&apply_sv(&sv, &sys.laplacians, &ge).unwrap().scaled(b));
        prop_assert!(dist(&lhs, &rhs) <= 1e-9 * norm(&rhs).max(1.0));
    }

    /// Perturbing an edge outside the closed neighborhood of edge `i` leaves
    /// the one-step shift at `i` unchanged.
    #[test]
    fn one_step_shift_is_local((c, f) in arb_complex_with_flow(10), pick in any::<usize>()) {
        prop_assume!(!f.is_empty());
        let sys = HodgeSystem::new(c);
        let i = pick % f.len();
        let nb = sys.complex.neighborhoods(i).unwrap();
        let (lo, up) = shift(&sys.laplacians, &EdgeFlow::new(f.clone())).unwrap();
        for j in 0..f.len() {
            if j == i || nb.lower.contains(&j) || nb.upper.contains(&j) {
                continue;
            }
            let mut g = f.clone();
            g[j] += 100.0;
            let (lo2, up2) = shift(&sys.laplacians, &EdgeFlow::new(g)).unwrap();
            prop_assert_eq!(lo[i], lo2[i]);
            prop_assert_eq!(up[i], up2[i]);
        }
    }

    #[test]
    fn operation_count_is_bounded_by_length_times_nnz(
        (c, f) in arb_complex_with_flow(10),
        len in 1usize..12,
    ) {
        prop_assume!(!f.is_empty());
        let sys = HodgeSystem::new(c);
        let fir = FirFilter::new(vec![0.5; len]).unwrap();
        let (out, ops) = apply_fir_instrumented(&fir, &sys.laplacians, &EdgeFlow::new(f.clone())).unwrap();
        let plain = apply_fir(&fir, &sys.laplacians, &EdgeFlow::new(f)).unwrap();
        prop_assert_eq!(out, plain);
        prop_assert!(ops.0 <= 4 * len as u64 * sys.laplacians.l1.nnz() as u64);
    }

    /// With a single coefficient both families reduce to scaling.
    #[test]
    fn single_coefficient_families_agree((c, f) in arb_complex_with_flow(8), h0 in -2.0..2.0f64) {
        let sys = HodgeSystem::new(c);
        let flow = EdgeFlow::new(f);
        let a = apply_fir(&FirFilter::new(vec![h0]).unwrap(), &sys.laplacians, &flow).unwrap();
        let b = apply_sv(&SvFilter::new(h0, vec![], vec![]).unwrap(), &sys.laplacians, &flow).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn sv_scales_harmonic_input_by_h0() {
    let (sys, s) = common::toy();
    let h = s.eigenvector(s.indices(FrequencyKind::Harmonic)[0]);
    let sv = SvFilter::new(-1.25, vec![0.4, 2.0], vec![3.0]).unwrap();
    let out = apply_sv(&sv, &sys.laplacians, &h).unwrap();
    assert!(dist(&out, &h.scaled(-1.25)) < 1e-9);
}

#[test]
fn responses_of_simple_filters() {
    let (_, s) = common::toy();
    let fir = FirFilter::new(vec![1.0, 1.0]).unwrap();
    assert_eq!(fir.eval(0.0), 1.0);
    assert_eq!(fir.eval(2.0), 3.0);
    let sv = SvFilter::new(0.5, vec![1.0], vec![]).unwrap();
    let r = response_sv(&sv, &s);
    for i in s.indices(FrequencyKind::Curl) {
        assert_eq!(r.values[i], 0.5);
    }
}
