use proptest::prelude::*;

#[path = "support/hygiene.rs"]
#[allow(dead_code)]
mod hygiene;

fn check(r: Result<(), String>) -> Result<(), TestCaseError> {
    r.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>()) {
        check(hygiene::normalize_idempotent(seed))?;
    }

    #[test]
    fn equiv_is_reflexive(seed in any::<u64>()) {
        check(hygiene::equiv_reflexive(seed))?;
    }

    #[test]
    fn equiv_is_symmetric(seed in any::<u64>(), pick in any::<u64>()) {
        check(hygiene::equiv_symmetric(seed, pick))?;
    }

    #[test]
    fn equiv_is_transitive(seed in any::<u64>(), pick in any::<u64>()) {
        check(hygiene::equiv_transitive(seed, pick))?;
    }

    #[test]
    fn inverse_images_are_canonical(seed in any::<u64>()) {
        check(hygiene::inverse_image_canonical(seed))?;
    }

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        check(hygiene::parse_print_round_trip(seed))?;
    }
}

#[test]
fn pools_hold_equations_of_every_shape() {
    let mut sizes = Vec::new();
    let mut shared = 0;
    for seed in 0..24 {
        let p = hygiene::Pool::new(seed);
        sizes.push(p.groups.iter().map(Vec::len).sum::<usize>());
        shared += p.groups.iter().filter(|g| g.len() >= 3).count();
    }
    println!("pool sizes {sizes:?}, {shared} signatures with 3 or more terms");
    assert!(sizes.iter().all(|&n| n > 0));
    assert!(shared >= 24);
}
