use nfdb_core::encoding::set_contains;
use nfdb_core::{decode_absdisc, encode_absdisc, encode_group_set, GroupSetCode, OrderedDiscKey};
use num_bigint::BigUint;
use num_traits::{One, Pow};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn digits(len: usize) -> impl Strategy<Value = BigUint> {
    (1u8..=9, proptest::collection::vec(0u8..=9, len - 1)).prop_map(|(lead, rest)| {
        let mut s = String::with_capacity(rest.len() + 1);
        s.push((b'0' + lead) as char);
        s.extend(rest.iter().map(|d| (b'0' + d) as char));
        s.parse().unwrap()
    })
}

/// Mostly short numbers, with lengths clustered on powers of ten.
fn big() -> impl Strategy<Value = BigUint> {
    prop_oneof![
        (1usize..=40).prop_flat_map(digits),
        (1usize..=4).prop_flat_map(|k| {
            let edge = 10usize.pow(k as u32);
            (edge - 1..=(edge + 1).min(10_000)).prop_flat_map(digits)
        }),
        (1usize..=10_000).prop_flat_map(digits),
        (1u32..10_000, 0u8..3)
            .prop_map(|(k, d)| BigUint::from(10u32).pow(k) - 1u32 + BigUint::from(d)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn key_order_is_numeric_order(a in big(), b in big()) {
        let (ka, kb) = (encode_absdisc(&a).unwrap(), encode_absdisc(&b).unwrap());
        prop_assert_eq!(ka.as_str().cmp(kb.as_str()), a.cmp(&b));
        prop_assert_eq!(ka.as_bytes().cmp(kb.as_bytes()), a.cmp(&b));
    }

    #[test]
    fn key_round_trip(a in big()) {
        let k = encode_absdisc(&a).unwrap();
        prop_assert_eq!(decode_absdisc(&k).unwrap(), a.clone());
        let reparsed = OrderedDiscKey::parse(k.as_str()).unwrap();
        prop_assert_eq!(reparsed, k);
    }

    #[test]
    fn group_set_round_trip(members in proptest::collection::btree_set(1u32..=50, 0..20), probe in 1u32..=50) {
        let code = encode_group_set(8, members.iter().copied()).unwrap();
        let naive: BigUint = members.iter().map(|t| BigUint::one() << (t - 1) as usize).sum();
        prop_assert_eq!(code.code(), &naive);
        let back = GroupSetCode::from_decimal(8, &code.to_decimal()).unwrap();
        prop_assert_eq!(&back, &code);
        prop_assert_eq!(back.members().collect::<BTreeSet<_>>(), members.clone());
        prop_assert_eq!(set_contains(&code, probe), members.contains(&probe));
    }
}

#[test]
fn short_keys_sort_numerically() {
    let k = |n: u32| encode_absdisc(&BigUint::from(n)).unwrap();
    assert_eq!(k(4).as_str(), "00004");
    assert_eq!(k(11).as_str(), "000111");
    assert!(k(4) < k(11));
    // raw decimal text sorts the other way
    assert!("11" < "4");
}

#[test]
fn capacity_edges() {
    let top = BigUint::from(10u32).pow(10_000u32) - 1u32;
    let key = encode_absdisc(&top).unwrap();
    assert!(key.as_str().starts_with("9999"));
    assert_eq!(decode_absdisc(&key).unwrap(), top);
    assert!(encode_absdisc(&(top + 1u32)).is_err());
    assert!(encode_absdisc(&BigUint::from(0u32)).is_err());
}

#[test]
fn full_octic_set() {
    let code = encode_group_set(8, 1..=50).unwrap();
    assert_eq!(
        code.to_decimal(),
        ((BigUint::one() << 50usize) - 1u32).to_string()
    );
    assert_eq!(code.to_decimal(), "1125899906842623");
    assert!(encode_group_set(8, [51]).is_err());
}
