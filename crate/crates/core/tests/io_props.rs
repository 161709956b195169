mod common;

use common::map_zoo;
use proptest::prelude::*;
use tropical_core::fixtures;
use tropical_core::io::{
    curve_from_json, curve_to_json, function_from_json, function_to_json, map_from_json, map_to_json,
};
use tropical_core::random::{random_function_or_bottom, rng};

#[test]
fn fixtures_validate_and_round_trip() {
    for (name, text) in fixtures::ALL {
        let c = curve_from_json(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let once = curve_to_json(&c);
        assert_eq!(curve_to_json(&curve_from_json(&once).unwrap()), once, "{name}");
    }
}

#[test]
fn maps_round_trip() {
    for (name, m) in map_zoo(&mut rng(2)) {
        let once = map_to_json(&m);
        let back = map_from_json(&once, None).unwrap();
        assert_eq!(back, m, "{name}");
        assert_eq!(map_to_json(&back), once, "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn functions_round_trip(i in 0usize..7, seed in any::<u64>()) {
        let c = fixtures::by_name(fixtures::ALL[i].0).unwrap();
        let f = random_function_or_bottom(&c, &mut rng(seed));
        let once = function_to_json(&f);
        let back = function_from_json(&once, None).unwrap();
        prop_assert!(back.equals(&f).unwrap());
        prop_assert_eq!(function_to_json(&back), once);
    }
}
