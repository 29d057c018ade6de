use proptest::prelude::*;

use num_bigint::BigUint;
use rdlab::gf::{Elem, Gf};
use rdlab::paperchecks::{big_binomial, cone_condition, lucas_binomial};
use rdlab::rdengine::{Engine, TABLE_CHARS, TABLE_GROUPS};

fn fields() -> Vec<Gf> {
    [(2, 1), (2, 3), (3, 2), (5, 1), (7, 2)].iter().map(|&(p, r)| Gf::new(p, r).unwrap()).collect()
}

proptest! {
    #[test]
    fn lucas_matches_direct(n in 0u64..200, k in 0u64..200, pi in 0usize..4) {
        let p = [2u64, 3, 5, 7][pi];
        prop_assert_eq!(BigUint::from(lucas_binomial(n, k, p)), big_binomial(n, k) % p);
    }

    #[test]
    fn cone_condition_at_prime_powers(pi in 0usize..4, e in 1u32..5) {
        let p = [2u64, 3, 5, 7][pi];
        let n = p.pow(e);
        // C(p^e, k) = 0 mod p for 0 < k < p^e
        prop_assert_eq!(cone_condition(n, p), n > 3);
    }

    #[test]
    fn field_laws(fi in 0usize..5, a in 0u32..10_000, b in 0u32..10_000, c in 0u32..10_000) {
        let f = &fields()[fi];
        let (a, b, c) = (Elem(a % f.size()), Elem(b % f.size()), Elem(c % f.size()));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
        }
        prop_assert_eq!(f.pow(a, f.size() as u64), a);
        let p = f.characteristic() as u64;
        prop_assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
    }

    #[test]
    fn removing_axioms_never_tightens(mask in proptest::collection::vec(any::<bool>(), 40)) {
        let mut full = Engine::default_base();
        full.derive();
        let mut reduced = Engine::default_base();
        let n = reduced.axioms().len();
        for i in (0..n).rev() {
            if mask[i % mask.len()] {
                reduced.remove_axiom(i);
            }
        }
        reduced.derive();
        for g in TABLE_GROUPS {
            for p in TABLE_CHARS {
                let before = full.bound(g, p).unwrap();
                if let Some(after) = reduced.bound(g, p) {
                    prop_assert!(after >= before, "{} at {}: {} < {}", g, p, after, before);
                }
            }
        }
        prop_assert!(reduced.replay().is_ok());
    }
}
