//! Frozen values for the seed-1 PEG(24,18) graph, each recomputed here by an
//! independent oracle where one exists.

use std::collections::HashSet;

use hgp_core::pal::calibrate;
use hgp_core::tanner::{classical_syndrome, flip_decode};
use hgp_core::{peg_construct, HgpCode, Side, TannerGraph};

fn graph() -> TannerGraph {
    peg_construct(24, 18, 3, 4, 1).unwrap()
}

#[test]
fn peg_24_18_has_girth_six() {
    let g = graph();
    assert_eq!(g.girth(), Some(6));
    // No two bits share two checks, so there is no 4-cycle.
    for a in 0..24 {
        let na: HashSet<_> = g.bit_neighbors(a).iter().collect();
        for b in a + 1..24 {
            assert!(g.bit_neighbors(b).iter().filter(|c| na.contains(c)).count() <= 1);
        }
    }
    // A 6-cycle a-c1-b-c2-d-c3-a exists.
    let has_six = (0..24).any(|a| {
        g.bit_neighbors(a).iter().any(|&c1| {
            g.check_neighbors(c1).iter().filter(|&&b| b != a).any(|&b| {
                g.bit_neighbors(b).iter().filter(|&&c2| c2 != c1).any(|&c2| {
                    g.check_neighbors(c2).iter().filter(|&&d| d != b && d != a).any(|&d| {
                        g.bit_neighbors(d).iter().any(|c3| *c3 != c2 && g.bit_neighbors(a).contains(c3) && *c3 != c1)
                    })
                })
            })
        })
    });
    assert!(has_six);
}

#[test]
fn code_900_dimension() {
    let c = HgpCode::new(graph()).unwrap();
    assert_eq!((c.n_qubits(), c.n_checks(), c.logical_dimension()), (900, 432, 36));
}

/// Reference FLIP: recompute the syndrome weight from scratch for each bit.
fn reference_flip_succeeds(g: &TannerGraph, syndrome: &[u8]) -> bool {
    let mut s = syndrome.to_vec();
    loop {
        let w = |s: &[u8]| s.iter().filter(|&&x| x == 1).count();
        let before = w(&s);
        let improver = (0..g.n_bits()).find(|&b| {
            let mut t = s.clone();
            for &c in g.bit_neighbors(b) {
                t[c] ^= 1;
            }
            w(&t) < before
        });
        match improver {
            Some(b) => {
                for &c in g.bit_neighbors(b) {
                    s[c] ^= 1;
                }
            }
            None => return before == 0,
        }
    }
}

#[test]
fn flip_weight_two_sweep() {
    let g = graph();
    let (mut cleared, mut reference, mut total) = (0, 0, 0);
    for a in 0..24 {
        for b in a..24 {
            let mut e = vec![0u8; 24];
            e[a] ^= 1;
            e[b] ^= 1;
            let s = classical_syndrome(&g, &e, Side::Primal).unwrap();
            let out = flip_decode(&g, &s).unwrap();
            total += 1;
            cleared += usize::from(out.residual.iter().all(|&x| x == 0));
            reference += usize::from(reference_flip_succeeds(&g, &s));
        }
    }
    assert_eq!(cleared, reference);
    assert_eq!((cleared, total), (205, 300));
}

#[test]
fn calibration_900_at_p_002() {
    let c = HgpCode::new(graph()).unwrap();
    let cal = calibrate(&c, 0.02, 4000, 1).unwrap();
    assert_eq!((cal.horizontal_samples, cal.vertical_samples), (1007, 315));
    assert!((cal.q_v - 0.174_900_695_134_061_26).abs() < 1e-12);
    assert!((cal.q_c - 0.042_328_042_328_042_3).abs() < 1e-12);
    assert!(!cal.fallback);
}
