use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ringcut_core::corr::{
    bond_correlator, correlation_matrix, ground_state_correlations, magnetization, xx_correlator, zz_correlator,
    Axis,
};
use ringcut_core::fid::ring_cut_fidelity;
use ringcut_core::qinfo::{
    classical_correlations, concurrence_closed_form, concurrence_wootters, mutual_information, quantum_discord,
    two_qubit_rdm,
};
use ringcut_core::spectrum::{ground_state, DEGENERACY_TOL};
use ringcut_core::{Boundary, ModelParams, Site};

fn site(twice: i64) -> Site {
    Site::from_twice(twice).unwrap()
}

fn boundary() -> impl Strategy<Value = Boundary> {
    prop_oneof![Just(Boundary::RingNaive), Just(Boundary::RingParityExact)]
}

/// Random orthogonal matrix from Gram-Schmidt on a random square matrix.
fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    a.qr().q()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn degenerate_eigenspaces_can_be_rotated(m in 3usize..12, h in -0.9f64..0.9, seed in any::<u64>()) {
        // The uniform ring pairs k with -k, so most levels are doubly degenerate.
        let params = ModelParams::new(m, 1.0, h, Boundary::RingNaive).unwrap();
        let g = ground_state(&params).unwrap();
        prop_assume!(!g.zero_mode_flag());
        let before = ground_state_correlations(&g);
        let mut spec = g.spectrum.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = spec.len();
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && spec.eigenvalues[end] - spec.eigenvalues[start] < DEGENERACY_TOL.sqrt() {
                end += 1;
            }
            if end - start > 1 {
                let block = spec.eigenvectors.columns(start, end - start).clone_owned();
                let rotated = block * random_orthogonal(end - start, &mut rng);
                spec.eigenvectors.columns_mut(start, end - start).copy_from(&rotated);
            }
            start = end;
        }
        let after = correlation_matrix(&spec, &g.occupation);
        prop_assert!((before.matrix() - after.matrix()).amax() < 1e-10);
        let (a, b) = (site(-1), site(5));
        prop_assert!((xx_correlator(&before, a, b).unwrap() - xx_correlator(&after, a, b).unwrap()).abs() < 1e-10);
        prop_assert!(
            (concurrence_closed_form(&before, a, site(1)).unwrap()
                - concurrence_closed_form(&after, a, site(1)).unwrap()).abs() < 1e-10
        );
    }

    #[test]
    fn bond_profiles_are_reflection_symmetric(
        m in 4usize..14, j in 0.0f64..8.0, h in -1.2f64..1.2, bc in boundary()
    ) {
        let params = ModelParams::new(m, j, h, bc).unwrap();
        let g = ground_state(&params).unwrap();
        prop_assume!(!g.degenerate);
        let corr = ground_state_correlations(&g);
        for b in 1..(m as i64 - 1) {
            for axis in [Axis::X, Axis::Z] {
                let plus = bond_correlator(&corr, axis, b).unwrap();
                let minus = bond_correlator(&corr, axis, -b).unwrap();
                prop_assert!((plus - minus).abs() < 1e-10, "b={} {:?}: {} vs {}", b, axis, plus, minus);
            }
        }
    }

    #[test]
    fn field_reversal_exchanges_particles_and_holes(
        m in 2usize..10, j in 0.0f64..6.0, h in 0.05f64..1.5
    ) {
        let up = ModelParams::new(m, j, h, Boundary::RingParityExact).unwrap();
        let down = up.with_field(-h).unwrap();
        let (gu, gd) = (ground_state(&up).unwrap(), ground_state(&down).unwrap());
        prop_assume!(!gu.degenerate && !gd.degenerate);
        let (cu, cd) = (ground_state_correlations(&gu), ground_state_correlations(&gd));
        let (a, b) = (site(-1), site(3));
        prop_assert!((magnetization(&cu, a).unwrap() + magnetization(&cd, a).unwrap()).abs() < 1e-10);
        prop_assert!((zz_correlator(&cu, a, b).unwrap() - zz_correlator(&cd, a, b).unwrap()).abs() < 1e-10);
        prop_assert!((xx_correlator(&cu, a, b).unwrap() - xx_correlator(&cd, a, b).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn pair_states_are_valid_and_measures_consistent(
        m in 2usize..10, j in 0.0f64..8.0, h in -1.3f64..1.3, bc in boundary(), pa in 0usize..20, pb in 0usize..20
    ) {
        let params = ModelParams::new(m, j, h, bc).unwrap();
        let g = ground_state(&params).unwrap();
        prop_assume!(!g.degenerate);
        let corr = ground_state_correlations(&g);
        let (pa, pb) = (pa % (2 * m), pb % (2 * m));
        prop_assume!(pa != pb);
        let (a, b) = (corr.site(pa).unwrap(), corr.site(pb).unwrap());
        let state = two_qubit_rdm(&corr, a, b).unwrap();
        let c_closed = concurrence_closed_form(&corr, a, b).unwrap();
        let c_w = concurrence_wootters(&state);
        prop_assert!((c_closed - c_w).abs() < 1e-9, "{} vs {}", c_closed, c_w);
        let mi = mutual_information(&state).unwrap();
        let cc = classical_correlations(&state).unwrap();
        let qd = quantum_discord(&state).unwrap();
        prop_assert!(cc >= -1e-12 && qd >= -1e-9);
        prop_assert!((cc + qd - mi).abs() < 1e-12);
        prop_assert!(cc <= mi + 1e-12);
    }

    #[test]
    fn fidelity_is_a_probability(
        m in 2usize..12, j in 0.0f64..8.0, h in -1.5f64..1.5, bc in boundary()
    ) {
        let params = ModelParams::new(m, j, h, bc).unwrap();
        let r = ring_cut_fidelity(&params).unwrap();
        for t in [r.term_00, r.term_m, r.term_p, r.term_mp] {
            prop_assert!(t >= 0.0);
        }
        prop_assert!(r.total <= 1.0 + 1e-10, "F = {}", r.total);
        prop_assert!((r.total - (r.term_00 + r.term_m + r.term_p + r.term_mp)).abs() < 1e-15);
    }
}

#[test]
fn concurrence_uses_the_modulus_of_xx() {
    let params = ModelParams::new(3, 5.5, -0.45, Boundary::RingNaive).unwrap();
    let corr = ground_state_correlations(&ground_state(&params).unwrap());
    let (a, b) = (site(5), site(-3));
    assert!(xx_correlator(&corr, a, b).unwrap() < -0.4);
    let c = concurrence_closed_form(&corr, a, b).unwrap();
    assert!(c > 0.3);
    assert!((c - concurrence_wootters(&two_qubit_rdm(&corr, a, b).unwrap())).abs() < 1e-9);
}
