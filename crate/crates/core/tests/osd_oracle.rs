//! OSD-CS against brute-force minimum-weight decoding on small dense codes.

use hgp_core::cdec::{osd_cs, SparseParity};
use proptest::prelude::*;

fn weight(v: &[u8]) -> usize {
    v.iter().filter(|&&x| x == 1).count()
}

fn syndrome_of(rows: &[Vec<usize>], e: &[u8]) -> Vec<u8> {
    rows.iter().map(|r| r.iter().fold(0, |acc, &b| acc ^ e[b])).collect()
}

/// Minimum weight over all solutions, or `None` if infeasible.
fn brute_min(rows: &[Vec<usize>], n: usize, s: &[u8]) -> Option<usize> {
    (0u32..1 << n)
        .map(|mask| (0..n).map(|b| (mask >> b & 1) as u8).collect::<Vec<_>>())
        .filter(|e| syndrome_of(rows, e) == s)
        .map(|e| weight(&e))
        .min()
}

fn matrix(n: usize, m: usize, bits: &[bool]) -> Vec<Vec<usize>> {
    (0..m).map(|c| (0..n).filter(|&b| bits[c * n + b]).collect()).collect()
}

proptest! {
    #[test]
    fn valid_and_minimal_when_reachable(
        n in 3usize..10,
        extra in 0usize..4,
        bits in proptest::collection::vec(any::<bool>(), 12 * 10),
        err in proptest::collection::vec(any::<bool>(), 10),
        post in proptest::collection::vec(-4.0f64..4.0, 10),
    ) {
        let m = n.saturating_sub(extra).max(1);
        let rows = matrix(n, m, &bits);
        let h = SparseParity::from_check_rows(n, &rows);
        let e: Vec<u8> = err[..n].iter().map(|&x| u8::from(x)).collect();
        let s = syndrome_of(&rows, &e);
        let out = osd_cs(&h, &s, &post[..n]).unwrap();
        prop_assert_eq!(syndrome_of(&rows, &out.correction), s.clone());
        prop_assert_eq!(syndrome_of(&rows, &out.osd0), s.clone());
        prop_assert!(weight(&out.correction) <= weight(&out.osd0));
        let best = brute_min(&rows, n, &s).unwrap();
        prop_assert!(weight(&out.correction) >= best);
        let reachable = (0u32..1 << n)
            .map(|mask| (0..n).map(|b| (mask >> b & 1) as u8).collect::<Vec<_>>())
            .filter(|sol| weight(sol) == best && syndrome_of(&rows, sol) == s)
            .any(|sol| out.free_bits.iter().filter(|&&b| sol[b] == 1).count() <= 2);
        if reachable {
            prop_assert_eq!(weight(&out.correction), best);
        }
    }

    #[test]
    fn infeasible_syndromes_are_rejected(
        n in 2usize..8,
        bits in proptest::collection::vec(any::<bool>(), 8 * 10),
        syn in proptest::collection::vec(any::<bool>(), 10),
    ) {
        let m = n + 2;
        let rows = matrix(n, m, &bits);
        let h = SparseParity::from_check_rows(n, &rows);
        let s: Vec<u8> = syn[..m].iter().map(|&x| u8::from(x)).collect();
        let result = osd_cs(&h, &s, &vec![1.0; n]);
        prop_assert_eq!(result.is_ok(), brute_min(&rows, n, &s).is_some());
    }
}

#[test]
fn confident_posterior_with_independent_support_is_returned_exactly() {
    // Columns of an identity block plus parity columns: any error on the
    // identity block has independent support.
    let rows: Vec<Vec<usize>> = (0..5).map(|c| vec![c, 5, 6 + c % 2]).collect();
    let h = SparseParity::from_check_rows(8, &rows);
    for mask in 0u32..32 {
        let e: Vec<u8> = (0..8).map(|b| u8::from(b < 5 && mask >> b & 1 == 1)).collect();
        let post: Vec<f64> = e.iter().map(|&x| if x == 1 { -3.0 } else { 3.0 }).collect();
        let out = osd_cs(&h, &syndrome_of(&rows, &e), &post).unwrap();
        assert_eq!(out.osd0, e);
    }
}

/// Whole-code oracle for the seed-1 PEG(24,18) primal code: every syndrome's
/// minimum weight and the kernel, from one Gray-order walk over all 2^24
/// error patterns.
struct PegOracle {
    rows: Vec<Vec<usize>>,
    min_weight: Vec<u8>,
    kernel: Vec<u32>,
}

impl PegOracle {
    fn new() -> Self {
        let g = hgp_core::peg_construct(24, 18, 3, 4, 1).unwrap();
        let rows: Vec<Vec<usize>> = (0..18).map(|c| g.check_neighbors(c).to_vec()).collect();
        let mut col = [0u32; 24];
        for (c, row) in rows.iter().enumerate() {
            for &b in row {
                col[b] |= 1 << c;
            }
        }
        let mut min_weight = vec![u8::MAX; 1 << 18];
        let mut kernel = Vec::new();
        let (mut mask, mut syn) = (0u32, 0u32);
        for t in 0u32..1 << 24 {
            if t > 0 {
                let b = t.trailing_zeros() as usize;
                mask ^= 1 << b;
                syn ^= col[b];
            }
            let w = mask.count_ones() as u8;
            let slot = &mut min_weight[syn as usize];
            *slot = (*slot).min(w);
            if syn == 0 {
                kernel.push(mask);
            }
        }
        Self { rows, min_weight, kernel }
    }
}

#[test]
fn osd_reaches_the_minimum_on_peg_24_18() {
    use hgp_core::cdec::{bp_min_sum, LlrVector};
    use rand::{Rng, SeedableRng};

    let oracle = PegOracle::new();
    assert_eq!(oracle.kernel.len(), 1 << 6);
    let g = hgp_core::peg_construct(24, 18, 3, 4, 1).unwrap();
    let h = SparseParity::from_check_rows(24, &oracle.rows);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
    let mut guaranteed = 0;
    for trial in 0..3000 {
        let k = rng.gen_range(1..=8);
        let mut e = vec![0u8; 24];
        for _ in 0..k {
            e[rng.gen_range(0..24)] ^= 1;
        }
        let s = syndrome_of(&oracle.rows, &e);
        let posterior = if trial % 2 == 0 {
            bp_min_sum(&g, hgp_core::Side::Primal, &s, &LlrVector::uniform(24, 0.05).unwrap(), 30).unwrap().posterior
        } else {
            (0..24).map(|_| rng.gen_range(-3.0..3.0)).collect()
        };
        let out = osd_cs(&h, &s, &posterior).unwrap();
        assert_eq!(syndrome_of(&oracle.rows, &out.correction), s);

        let syn_index = s.iter().enumerate().fold(0usize, |acc, (c, &x)| acc | (x as usize) << c);
        let best = oracle.min_weight[syn_index] as usize;
        assert!(weight(&out.correction) >= best);

        // A minimum-weight solution with at most two set bits outside the
        // pivots is reachable by the sweep, so OSD must find that weight.
        let e_mask = e.iter().enumerate().fold(0u32, |acc, (b, &x)| acc | (x as u32) << b);
        let free_mask = out.free_bits.iter().fold(0u32, |acc, &b| acc | 1 << b);
        let reachable = oracle
            .kernel
            .iter()
            .map(|k| e_mask ^ k)
            .any(|sol| sol.count_ones() as usize == best && (sol & free_mask).count_ones() <= 2);
        if reachable {
            guaranteed += 1;
            assert_eq!(weight(&out.correction), best, "trial {trial}");
        }
    }
    assert!(guaranteed > 1000);
}
