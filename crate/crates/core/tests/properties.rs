use proptest::prelude::*;

use seccf::bounds::{bound_b1, bound_b2, log_bound_b1, log_bound_b2};
use seccf::codes::{encode_node, make_hash_split, sample_code};
use seccf::{CodeRateParams, EnsembleKind, EnsembleSpec, FieldVector};

fn params() -> impl Strategy<Value = CodeRateParams> {
    (1usize..200)
        .prop_flat_map(|n| (Just(n), 0..=n))
        .prop_flat_map(|(n, k)| (Just(n), Just(k), 0..=k))
        .prop_map(|(n, k, kbar)| CodeRateParams::new(n, k, kbar, 2).unwrap())
}

proptest! {
    #[test]
    fn max_deviation_costs_at_most_a_factor_two(
        p in params(),
        s in 0.0f64..=0.5,
        r1 in 0.0f64..0.7,
        gap in 0.0f64..1.0,
    ) {
        // Any pair obeying I(X1,X2) <= I(X1) + ln q.
        let r12 = r1 + gap * std::f64::consts::LN_2;
        let a = 2f64.powi((p.n - p.k) as i32);
        let b1 = log_bound_b1(&p, s, r1).unwrap();
        let b2 = log_bound_b2(&p, s, a, r1, r12).unwrap();
        prop_assert!(b2 <= b1 + std::f64::consts::LN_2 + 1e-9);
    }

    #[test]
    fn raw_and_log_bounds_agree(p in params(), s in 0.0f64..=0.5, r1 in 0.0f64..0.1, a in 0.0f64..4.0) {
        let lb1 = log_bound_b1(&p, s, r1).unwrap();
        let b1 = bound_b1(&p, s, r1).unwrap();
        if lb1 < 700.0 {
            prop_assert!((b1.ln() - lb1).abs() <= 1e-9 * lb1.abs().max(1.0));
        }
        let lb2 = log_bound_b2(&p, s, a, r1, r1).unwrap();
        let b2 = bound_b2(&p, s, a, r1, r1).unwrap();
        if lb2 < 700.0 {
            prop_assert!((b2.ln() - lb2).abs() <= 1e-9 * lb2.abs().max(1.0));
        }
    }

    #[test]
    fn hashed_sum_recovers_peer_message(
        seed in any::<u64>(),
        k in 1usize..5,
        extra in 0usize..4,
        kbar_frac in 0.0f64..=1.0,
        m_seed in any::<u64>(),
    ) {
        let n = k + extra;
        let q = 3;
        let kbar = ((k as f64) * kbar_frac).floor() as usize;
        let code = sample_code(&EnsembleSpec::new(EnsembleKind::Uniform, n, k, q, seed)).unwrap();
        let split = make_hash_split(k, kbar, q).unwrap();
        let mk = k - kbar;
        let pick = |len: usize, salt: u64| {
            let count = (q as u64).pow(len as u32);
            FieldVector::from_index(m_seed.wrapping_mul(salt) % count.max(1), len, q)
        };
        let (m1, m2, l1, l2) = (pick(mk, 3), pick(mk, 5), pick(kbar, 7), pick(kbar, 11));
        let v1 = split.combine(&m1, &l1).unwrap();
        let v2 = split.combine(&m2, &l2).unwrap();
        let sum = v1.add(&v2).unwrap();
        let hashed = split.hash(&sum).unwrap();
        prop_assert_eq!(hashed.sub(&m1).unwrap(), m2.clone());
        prop_assert_eq!(hashed.sub(&m2).unwrap(), m1);
        // The relay's coset view: codeword sums stay in the code after removing shifts.
        let e = pick(n, 13);
        let x = encode_node(&v1, &code, &e).unwrap().sub(&e).unwrap();
        prop_assert_eq!(code.message_of(&x).unwrap(), Some(v1));
    }
}
