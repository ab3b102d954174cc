//! Harness-level invariants: nonce entropy accounting at an observable
//! scale and the game pipeline over the lattice instantiation.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use ofs_core::bits::BitString;
use ofs_core::fs::FiatShamir;
use ofs_core::lattice::LatticeScheme;
use ofs_core::reduction::{run_reduction_game, CooperativeForger, GameConfig};

#[test]
fn nonce_collision_rate_matches_entropy() {
    // lambda = 10 makes collisions observable: after q_h distinct queried
    // nonces for one message, a fresh signature hits the queried set with
    // probability q_h / 2^lambda.
    let fs = FiatShamir::new(LatticeScheme::preset("t0").unwrap());
    let oracle = fs.reference_oracle();
    let mut rng = ChaCha20Rng::seed_from_u64(110);
    let (sk, pk) = fs.skgen(&mut rng).unwrap();
    assert_eq!(fs.nonce_bits(), 10);

    let q_h = 32usize;
    let trials = 10_000usize;
    let mut collisions = 0usize;
    for _ in 0..trials {
        let queried: std::collections::HashSet<Vec<u8>> = (0..q_h)
            .map(|_| {
                BitString::random(fs.nonce_bits(), &mut rng)
                    .as_bytes()
                    .to_vec()
            })
            .collect();
        let sig = fs.sign(&sk, b"the message", &oracle, &mut rng).unwrap();
        assert!(fs.verify(&pk, b"the message", &sig, &oracle));
        if queried.contains(sig.r.as_bytes()) {
            collisions += 1;
        }
    }
    // The queried set may be marginally below q_h on nonce repeats, so the
    // expected rate is at most q_h * 2^-lambda.
    let expected = q_h as f64 / 1024.0;
    let rate = collisions as f64 / trials as f64;
    let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
    assert!(
        rate <= expected + 3.0 * sigma,
        "collision rate {rate} above bound"
    );
    assert!(
        rate >= expected - 4.0 * sigma,
        "collisions not observable: {rate}"
    );
}

#[test]
fn lattice_game_extracts_when_landing() {
    let scheme = LatticeScheme::preset("t0").unwrap();
    let fs = FiatShamir::new(scheme);
    let mut rng = ChaCha20Rng::seed_from_u64(111);
    let (sk, _) = fs.skgen(&mut rng).unwrap();
    let pair = sk.pair().clone();
    let forger = CooperativeForger::new(&pair).with_sign_queries(1);
    let config = GameConfig {
        delta: 0.25,
        trials: 400,
        q_h: 24,
        q_s: 2,
        seed: 13,
    };
    let report = run_reduction_game(&fs, &pair, &forger, &config).unwrap();
    assert!(
        report.forgery_rate > 0.99,
        "forgery rate {}",
        report.forgery_rate
    );
    let sigma = (0.25f64 * 0.75 / 400.0).sqrt();
    assert!(
        (report.landing_rate - 0.25).abs() < 3.5 * sigma,
        "landing rate {} vs 0.25",
        report.landing_rate
    );
    // Extraction can only miss a landing through a derived-challenge
    // collision, which has probability about 1/|V| per landing.
    assert!(report.landing_rate - report.extraction_rate <= 0.01);
}
