mod common {
    pub mod oracle;
}

use common::oracle::Oracle;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stlrob::lab::generate::random_case;
use stlrob::semantics::{robustness_value, Traditional};

#[test]
fn traditional_matches_direct_recursion() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0_5eed);
    for _ in 0..500 {
        let (f, trace) = random_case(&mut rng);
        let expected = Oracle::new(&trace).rho(&f, 0);
        let got = robustness_value(&Traditional, &f, &trace, 0.0).unwrap();
        assert!((got - expected).abs() <= 1e-12, "{f}: {got} vs {expected}");
    }
}
