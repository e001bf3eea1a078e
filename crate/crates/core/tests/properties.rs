use blockmap::criticality::{
    dual_dimension, hausdorff_dimensions, kpz, kpz_inverse, lqg_exponents, solve_tc, EllipticBlocks, QuadBlocks,
};
use blockmap::lab::{fl, np_estimate, SequenceWindow};
use blockmap::models::{
    enumerate_arch_systems, noncrossing_matchings, ArchConstraints, BlockStructure, Family, MeanderSystem,
};
use blockmap::rug::ops::Pow;
use blockmap::rug::{Integer, Rational};
use blockmap::substitution::{compose_outer, extract_block_coefficients, extract_outer_coefficients, weighted_map_series};
use blockmap::TruncatedSeries;
use proptest::prelude::*;

fn int_series(cs: &[i64]) -> TruncatedSeries<Integer> {
    TruncatedSeries::from_coeffs(cs.iter().map(|&c| Integer::from(c)).collect())
}

fn unit_series() -> impl Strategy<Value = TruncatedSeries<Integer>> {
    prop::collection::vec(0i64..60, 1..9).prop_map(|mut v| {
        v.insert(0, 1);
        int_series(&v)
    })
}

fn synthetic(rho: &Rational, delta: &Rational, n: usize) -> SequenceWindow {
    let values = (0..=n)
        .map(|k| {
            if k == 0 {
                fl(1)
            } else {
                let geometric = fl(rho).pow(-(k as i32));
                geometric / fl(k as u32).pow(fl(delta))
            }
        })
        .collect();
    SequenceWindow::new(values, "synthetic").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn blocks_then_substitution_recovers_m1(m1 in unit_series()) {
        let b = extract_block_coefficients(&m1).unwrap();
        let m_u = weighted_map_series(&b);
        for n in 0..=m1.order() {
            prop_assert_eq!(&m_u.coeff(n).coeff_sum(), m1.coeff(n));
            prop_assert!(m_u.coeff(n).degree().unwrap_or(0) <= n);
        }
    }

    #[test]
    fn outer_extraction_inverts_composition(m in unit_series(), c in prop::collection::vec(-20i64..20, 9), a in 0u32..=2) {
        let c = int_series(&c[..=m.order()]);
        let s = compose_outer(&c, &m, a).unwrap();
        prop_assert_eq!(extract_outer_coefficients(&s, &m, a).unwrap(), c);
    }

    #[test]
    fn meander_blocks_partition_the_system(n in 1usize..6, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let ms = noncrossing_matchings(2 * n);
        let sys = MeanderSystem::from_partners(i.get(&ms).clone(), j.get(&ms).clone()).unwrap();
        let blocks = sys.block_decomposition();
        prop_assert_eq!(blocks.len(), sys.block_count());
        prop_assert_eq!(blocks.iter().map(|b| b.n()).sum::<usize>(), n);
        prop_assert!(blocks.iter().all(|b| b.is_irreducible()));
        prop_assert!((1..=n).contains(&sys.connected_components()));
    }

    #[test]
    fn arch_blocks_partition_the_system(n in 1usize..6, k in any::<prop::sample::Index>(), bicolored in any::<bool>()) {
        let family = if bicolored { Family::Bicubic } else { Family::Cubic };
        let all: Vec<_> = enumerate_arch_systems(n, ArchConstraints::for_family(family).unwrap()).unwrap().collect();
        let sys = k.get(&all);
        let blocks = sys.block_decomposition();
        prop_assert_eq!(blocks.len(), sys.block_count());
        prop_assert_eq!(blocks.iter().map(|b| b.n()).sum::<usize>(), n);
        prop_assert!(blocks.iter().all(|b| b.is_irreducible() && b.is_bicolored() == bicolored));
    }

    #[test]
    fn duality_identities(c in -40.0f64..1.0, x in 0.0f64..4.0) {
        let e = lqg_exponents(c).unwrap();
        prop_assert!((e.gamma * e.gamma_prime - 4.0).abs() < 1e-12);
        prop_assert!(((1.0 - e.gamma_s) * (1.0 - e.gamma_s_prime) - 1.0).abs() < 1e-12);
        let (d, dp) = (kpz(x, e.gamma), kpz(x, e.gamma_prime));
        prop_assert!((d * dp - x).abs() < 1e-12);
        prop_assert!((dual_dimension(d, e.gamma_s) - dp).abs() < 1e-12);
        prop_assert!((kpz_inverse(d, e.gamma) - x).abs() < 1e-12);
    }

    #[test]
    fn quad_form_is_duality_invariant(gamma in 0.05f64..1.999) {
        let g = hausdorff_dimensions(4.0 / gamma, None).quad_form / gamma;
        let gp = hausdorff_dimensions(gamma, None).quad_form / (4.0 / gamma);
        prop_assert!((g - gp).abs() < 1e-12 * g.abs().max(1.0));
    }

    #[test]
    fn solve_tc_hits_the_weight(u in 1.8f64..60.0) {
        let s = solve_tc(u, &QuadBlocks).unwrap();
        prop_assert!((1.0 / s.point.inverse_weight() - u).abs() < 1e-9 * u);
        let cubic = EllipticBlocks::cubic();
        if u >= 3.03 {
            let s = solve_tc(u, &cubic).unwrap();
            prop_assert!((1.0 / s.point.inverse_weight() - u).abs() < 1e-9 * u);
        }
    }

    #[test]
    fn synthetic_exponent_is_recovered(rn in 1u32..30, rd in 1u32..30, dn in 1i32..12) {
        let rho = Rational::from((rn, rd));
        let delta = Rational::from((dn, 4));
        let w = synthetic(&rho, &delta, 40);
        let target = delta.to_f64();
        let errs: Vec<f64> = (1..=5).map(|p| (np_estimate(&w, 40, p).unwrap().estimate - target).abs()).collect();
        prop_assert!(errs[4] < 1e-6, "{:?}", errs);
        prop_assert!(errs.windows(2).all(|e| e[1] <= e[0]), "{:?}", errs);
    }
}

#[test]
fn log_correction_is_needed_and_sufficient() {
    let n = 50;
    let rho = fl(Rational::from((1, 7)));
    let values = (0..=n)
        .map(|k| {
            let base = fl(&rho).pow(-(k as i32)) / fl(k.max(1) as u32).pow(fl(1.5));
            if k < 2 {
                base
            } else {
                base / fl(k as u32).ln().sqrt()
            }
        })
        .collect();
    let w = SequenceWindow::new(values, "log-corrected").unwrap();
    let plain = np_estimate(&w, n, 5).unwrap().estimate;
    let corrected = np_estimate(&w.clone().with_eta(0.5), n, 5).unwrap().estimate;
    assert!((corrected - 1.5).abs() < 0.02, "{corrected}");
    assert!((plain - 1.5).abs() > 0.02, "{plain}");
}
