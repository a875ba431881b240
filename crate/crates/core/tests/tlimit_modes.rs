//! Infinite-chain modes and contractions against independent constructions.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ringcut_core::corr::{ground_state_correlations, TwoPointSource};
use ringcut_core::fid::{segment_modes, segment_position};
use ringcut_core::model::{ring_matrix, site_to_pos};
use ringcut_core::spectrum::{diagonalize_matrix, ground_state, BandSide};
use ringcut_core::tlimit::{
    completeness, localized_amplitude, scattering_mode, scattering_state_from_t, tl_correlation_entry, TlCorrelations,
};
use ringcut_core::{Boundary, ModelParams, Site};

fn site(twice: i64) -> Site {
    Site::from_twice(twice).unwrap()
}

fn random_site(rng: &mut ChaCha8Rng, reach: i64) -> Site {
    let n = rng.gen_range(-reach..reach);
    site(2 * n + 1)
}

/// Hopping onto `n` from its neighbours, with coupling `j` on the bond (-1/2, +1/2).
fn hop<F: Fn(Site) -> Complex64>(psi: &F, n: Site, j: f64) -> Complex64 {
    let coupling = |a: Site, b: Site| {
        if a.twice().min(b.twice()) == -1 && a.twice().max(b.twice()) == 1 {
            j
        } else {
            1.0
        }
    };
    let (l, r) = (n.offset(-1), n.offset(1));
    -(psi(l) * coupling(l, n) + psi(r) * coupling(n, r))
}

#[test]
fn distorted_modes_solve_the_lattice_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let k = rng.gen_range(-PI..PI);
        if k.abs() < 1e-3 || PI - k.abs() < 1e-3 {
            continue;
        }
        let j = rng.gen_range(0.0..5.0);
        let n = random_site(&mut rng, 12);
        let psi = |s: Site| scattering_mode(k, s, j).unwrap();
        let lhs = hop(&psi, n, j);
        let rhs = psi(n) * (-2.0 * k.cos());
        assert!((lhs - rhs).norm() < 1e-11, "k={k} j={j} n={n}: {lhs} vs {rhs}");
    }
}

#[test]
fn distortion_agrees_with_t_matrix_scattering_state() {
    // The T-matrix state is written for the incoming wave exp(i k n); the closed form
    // for the incoming wave exp(-i k n), i.e. wavevector -k.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let k = rng.gen_range(-PI..PI);
        if k.abs() < 1e-3 || PI - k.abs() < 1e-3 {
            continue;
        }
        let j = rng.gen_range(0.0..5.0);
        let h = rng.gen_range(-0.9..0.9);
        let n = random_site(&mut rng, 12);
        let closed = scattering_mode(-k, n, j).unwrap();
        let from_t = scattering_state_from_t(k, n, j, h).unwrap();
        assert!((closed - from_t).norm() < 1e-10, "k={k} j={j} n={n}: {closed} vs {from_t}");
    }
}

#[test]
fn completeness_at_random_sites() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for j in [0.5, 2.0] {
        for _ in 0..50 {
            let n = random_site(&mut rng, 30);
            let e = completeness(n, j).unwrap();
            assert!((e.value - 1.0).abs() < 1e-8, "j={j} n={n}: {}", e.value);
        }
    }
}

#[test]
fn localized_modes_match_large_ring_eigenvectors() {
    let m = 1000;
    for j in [1.5, 2.0, 11.0] {
        let spec = diagonalize_matrix(&ring_matrix(m, j, 0.0), 0.0).unwrap();
        let last = spec.len() - 1;
        for (col, side) in [(0, BandSide::Below), (last, BandSide::Above)] {
            let v = spec.mode(col);
            let p0 = site_to_pos(site(1), m).unwrap();
            let sign = (v[p0] / localized_amplitude(side, j, site(1)).unwrap()).signum();
            for t in -21..=21 {
                let s = site(2 * t + 1);
                let want = localized_amplitude(side, j, s).unwrap();
                let got = sign * v[site_to_pos(s, m).unwrap()];
                assert!((got - want).abs() < 1e-10, "j={j} {side:?} n={s}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn infinite_chain_contractions_are_the_large_ring_limit() {
    let m = 600;
    for (j, h) in [(0.5, 0.3), (2.0, 0.3), (6.0, -0.4)] {
        let params = ModelParams::new(m, j, h, Boundary::RingParityExact).unwrap();
        let finite = ground_state_correlations(&ground_state(&params).unwrap());
        let window = TlCorrelations::window(j, h, site(-7), site(7)).unwrap();
        for a in -3..3 {
            for b in a..3 {
                let (sa, sb) = (site(2 * a + 1), site(2 * b + 1));
                let f = finite.contraction(sa, sb).unwrap();
                let t = window.contraction(sa, sb).unwrap();
                assert!((f - t).abs() < 5e-3, "j={j} h={h} C({sa},{sb}): {f} vs {t}");
                let direct = tl_correlation_entry(sa, sb, j, h).unwrap();
                assert!((direct.value - t).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn segment_modes_are_standing_waves() {
    let m = 9;
    let len = 2 * m - 2;
    let norm = (2.0 / (len as f64 + 1.0)).sqrt();
    for h in [-0.4, 0.0, 0.6] {
        let seg = segment_modes(m, h).unwrap();
        let modes = seg.modes.modes();
        for c in 0..modes.ncols() {
            let k = PI * (c + 1) as f64 / (len as f64 + 1.0);
            let closed = |i: usize| norm * (k * (i + 1) as f64).sin();
            let sign = (modes[(segment_position(0, m), c)] / closed(0)).signum();
            for i in 0..len {
                let got = sign * modes[(segment_position(i, m), c)];
                assert!((got - closed(i)).abs() < 1e-12, "h={h} mode {c} index {i}");
            }
            assert_eq!(modes[(m - 1, c)], 0.0);
            assert_eq!(modes[(m, c)], 0.0);
            let energy = -2.0 * k.cos() - 2.0 * h;
            assert!((seg.energies[c] - energy).abs() < 1e-12);
        }
    }
}

#[test]
fn lazy_source_matches_window() {
    let (j, h) = (2.0, 0.2);
    let window = TlCorrelations::window(j, h, site(-5), site(5)).unwrap();
    let lazy = ringcut_core::tlimit::TlLazy::new(j, h).unwrap();
    for a in -3..2 {
        for b in -3..2 {
            let (sa, sb) = (site(2 * a + 1), site(2 * b + 1));
            assert_eq!(lazy.contraction(sa, sb).unwrap(), window.contraction(sa, sb).unwrap());
        }
    }
    assert!(lazy.error_estimate() <= window.error_estimate());
}
