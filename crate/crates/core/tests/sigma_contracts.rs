//! Cross-instantiation checks of the protocol contracts: completeness,
//! challenge uniformity, special soundness, and the agreement between the
//! oblivious commitment path and honest runs.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use ofs_core::bits::BitString;
use ofs_core::gq::GqScheme;
use ofs_core::lattice::{self, LatticeScheme};
use ofs_core::sigma::{
    fork_run, run_honest, InstanceGenerator, ObliviousCommitments, SigmaProtocol,
    StatementWitnessPair,
};
use ofs_core::stats;

fn chi_square_on_challenge_prefix(challenges: &[BitString]) -> bool {
    // Bucket the first six bits; uniformity of the full string implies
    // uniformity of any prefix.
    let mut counts = [0u64; 64];
    for ch in challenges {
        let mut idx = 0usize;
        for b in 0..6 {
            idx = (idx << 1) | ch.bit(b) as usize;
        }
        counts[idx] += 1;
    }
    stats::chi_square_uniform_ok(&counts)
}

#[test]
fn gq_completeness_and_public_coin() {
    let scheme = GqScheme::toy();
    let mut rng = ChaCha20Rng::seed_from_u64(100);
    let (x, w) = scheme.generate(&mut rng).unwrap();
    let pair = StatementWitnessPair::new(&scheme, x, w).unwrap();
    let mut challenges = Vec::new();
    for _ in 0..1000 {
        let t = run_honest(&scheme, &pair, &mut rng).unwrap();
        assert!(scheme.verify(pair.statement(), &t.com, &t.ch, &t.rsp));
        assert_eq!(t.ch.bit_len(), scheme.challenge_bits());
        challenges.push(t.ch);
    }
    // Tampering with the response must flip the verdict.
    let t = run_honest(&scheme, &pair, &mut rng).unwrap();
    let bad = &t.rsp + 1u32;
    assert!(!scheme.verify(pair.statement(), &t.com, &t.ch, &bad));

    for _ in 0..9000 {
        challenges.push(BitString::random(scheme.challenge_bits(), &mut rng));
    }
    assert!(chi_square_on_challenge_prefix(&challenges));
}

#[test]
fn lattice_completeness_and_public_coin() {
    let scheme = LatticeScheme::preset("t0").unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(101);
    let (x, w) = scheme.generate(&mut rng).unwrap();
    let pair = StatementWitnessPair::new(&scheme, x, w).unwrap();
    let mut challenges = Vec::new();
    for _ in 0..1000 {
        let t = run_honest(&scheme, &pair, &mut rng).unwrap();
        assert!(scheme.verify(pair.statement(), &t.com, &t.ch, &t.rsp));
        challenges.push(t.ch);
    }
    for _ in 0..9000 {
        challenges.push(BitString::random(scheme.challenge_bits(), &mut rng));
    }
    assert!(chi_square_on_challenge_prefix(&challenges));
}

#[test]
fn gq_honest_run_at_worked_parameters() {
    // N = 77, e = 7, y = 51, witness 2; re-verify the transcript with a
    // plain square-and-multiply oracle, independent of the library path.
    fn modexp(mut base: u128, mut exp: u128, n: u128) -> u128 {
        let mut acc = 1u128;
        base %= n;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % n;
            }
            base = base * base % n;
            exp >>= 1;
        }
        acc
    }
    let scheme = GqScheme::new(16, 7).unwrap();
    let x = ofs_core::gq::GqStatement::from_parts(7, 77, 51).unwrap();
    let w = ofs_core::gq::GqWitness::from_parts(2, 7, 11, 7).unwrap();
    let pair = StatementWitnessPair::new(&scheme, x, w).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(109);
    for _ in 0..50 {
        let t = run_honest(&scheme, &pair, &mut rng).unwrap();
        assert!(scheme.verify(pair.statement(), &t.com, &t.ch, &t.rsp));
        let r: u128 = (&t.com).try_into().unwrap();
        let z: u128 = (&t.rsp).try_into().unwrap();
        let c = t.ch.to_u128();
        assert_eq!(modexp(z, 7, 77), r * modexp(51, c, 77) % 77);
    }
}

#[test]
fn gq_fork_worked_example() {
    // N = 77, e = 7, y = 51, witness 2; commitment R = 4 answered at
    // challenges 3 and 1 gives z = 39 and z = 29.
    let scheme = GqScheme::new(16, 7).unwrap();
    let x = ofs_core::gq::GqStatement::from_parts(7, 77, 51).unwrap();
    let w = ofs_core::gq::GqWitness::from_parts(2, 7, 11, 7).unwrap();
    let pair = StatementWitnessPair::new(&scheme, x, w).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(102);
    let com = num_bigint::BigUint::from(4u32);
    let ch1 = BitString::from_u128(3, 2);
    let ch2 = BitString::from_u128(1, 2);
    let (t1, t2) = fork_run(&scheme, &pair, &com, &ch1, &ch2, &mut rng).unwrap();
    assert_eq!(t1.rsp, num_bigint::BigUint::from(39u32));
    assert_eq!(t2.rsp, num_bigint::BigUint::from(29u32));
    assert!(scheme.verify(pair.statement(), &t1.com, &t1.ch, &t1.rsp));
    assert!(scheme.verify(pair.statement(), &t2.com, &t2.ch, &t2.rsp));

    // Equal challenges violate the precondition.
    assert_eq!(
        fork_run(&scheme, &pair, &com, &ch1, &ch1, &mut rng).unwrap_err(),
        ofs_core::SigmaError::SameChallenge
    );
}

#[test]
fn special_soundness_on_forks_both_instantiations() {
    let mut rng = ChaCha20Rng::seed_from_u64(103);

    let gq = GqScheme::toy();
    let (x, w) = gq.generate(&mut rng).unwrap();
    let pair = StatementWitnessPair::new(&gq, x, w).unwrap();
    for _ in 0..200 {
        let com = gq.honest_commit(pair.statement(), &mut rng);
        let ch1 = BitString::random(gq.challenge_bits(), &mut rng);
        let ch2 = loop {
            let c = BitString::random(gq.challenge_bits(), &mut rng);
            if c != ch1 {
                break c;
            }
        };
        let (t1, t2) = fork_run(&gq, &pair, &com, &ch1, &ch2, &mut rng).unwrap();
        let root = gq.extract(pair.statement(), &t1, &t2).unwrap();
        assert!(gq.extracted_check(pair.statement(), &root));
    }

    let lat = LatticeScheme::preset("t0").unwrap();
    let (x, w) = lat.generate(&mut rng).unwrap();
    let pair = StatementWitnessPair::new(&lat, x, w).unwrap();
    let params = lat.params();
    for _ in 0..100 {
        // An oblivious commitment: uniform Y straight from randomness.
        let rho = BitString::random(lat.randomness_bits(), &mut rng);
        let com = lat.commit_from_randomness(pair.statement(), &rho).unwrap();
        let (ch1, ch2) = loop {
            let a = BitString::random(lat.challenge_bits(), &mut rng);
            let b = BitString::random(lat.challenge_bits(), &mut rng);
            let ca = lattice::derive_challenge(&a, params.k, params.kappa).unwrap();
            let cb = lattice::derive_challenge(&b, params.k, params.kappa).unwrap();
            if ca != cb {
                break (a, b);
            }
        };
        let (t1, t2) = fork_run(&lat, &pair, &com, &ch1, &ch2, &mut rng).unwrap();
        assert!(lat.verify(pair.statement(), &t1.com, &t1.ch, &t1.rsp));
        assert!(lat.verify(pair.statement(), &t2.com, &t2.ch, &t2.rsp));
        let sol = lat.extract(pair.statement(), &t1, &t2).unwrap();
        assert!(lat.extracted_check(pair.statement(), &sol));
    }
}

#[test]
fn gq_oblivious_and_honest_paths_agree() {
    // Both paths should give the same acceptance and verification rates,
    // and the commitment marginal is uniform over the units either way.
    let scheme = GqScheme::new(16, 7).unwrap();
    let x = ofs_core::gq::GqStatement::from_parts(7, 77, 51).unwrap();
    let w = ofs_core::gq::GqWitness::from_parts(2, 7, 11, 7).unwrap();
    let pair = StatementWitnessPair::new(&scheme, x, w).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(104);
    let units: Vec<u64> = (1..77)
        .filter(|v| num_integer::gcd(*v, 77u64) == 1)
        .collect();

    let trials = 10_000;
    let mut honest_verified = 0usize;
    let mut oblivious_verified = 0usize;
    let mut honest_counts = vec![0u64; units.len()];
    let mut oblivious_counts = vec![0u64; units.len()];
    for _ in 0..trials {
        let t = run_honest(&scheme, &pair, &mut rng).unwrap();
        if scheme.verify(pair.statement(), &t.com, &t.ch, &t.rsp) {
            honest_verified += 1;
        }
        let r: u64 = (&t.com).try_into().unwrap();
        honest_counts[units.iter().position(|&u| u == r).unwrap()] += 1;

        let rho = BitString::random(scheme.randomness_bits(), &mut rng);
        let com = scheme
            .commit_from_randomness(pair.statement(), &rho)
            .unwrap();
        let ch = BitString::random(scheme.challenge_bits(), &mut rng);
        let rsp = scheme
            .respond(pair.statement(), pair.witness(), &com, &ch, &mut rng)
            .unwrap();
        if scheme.verify(pair.statement(), &com, &ch, &rsp) {
            oblivious_verified += 1;
        }
        let r: u64 = (&com).try_into().unwrap();
        oblivious_counts[units.iter().position(|&u| u == r).unwrap()] += 1;
    }
    let diff = (honest_verified as f64 - oblivious_verified as f64).abs() / trials as f64;
    assert!(diff < 0.02, "verification rates differ by {diff}");
    assert!(stats::chi_square_uniform_ok(&honest_counts));
    assert!(stats::chi_square_uniform_ok(&oblivious_counts));
}

#[test]
fn lattice_oblivious_and_honest_paths_agree() {
    // Acceptance rates within 0.02 and response-norm distributions pass a
    // two-sample KS test between the two commitment paths.
    let scheme = LatticeScheme::preset("t0").unwrap();
    let params = scheme.params().clone();
    let mut rng = ChaCha20Rng::seed_from_u64(105);
    let (x, w) = scheme.generate(&mut rng).unwrap();
    let pair = StatementWitnessPair::new(&scheme, x, w).unwrap();

    let attempts = 10_000;
    let mut honest_accepted = Vec::new();
    let mut oblivious_accepted = Vec::new();
    for _ in 0..attempts {
        let com = scheme.honest_commit(pair.statement(), &mut rng);
        let ch = BitString::random(scheme.challenge_bits(), &mut rng);
        if let Ok(z) = scheme.respond(pair.statement(), pair.witness(), &com, &ch, &mut rng) {
            honest_accepted.push(norm(&z));
        }
        let rho = BitString::random(scheme.randomness_bits(), &mut rng);
        let com = scheme
            .commit_from_randomness(pair.statement(), &rho)
            .unwrap();
        let ch = BitString::random(scheme.challenge_bits(), &mut rng);
        if let Ok(z) = scheme.respond(pair.statement(), pair.witness(), &com, &ch, &mut rng) {
            oblivious_accepted.push(norm(&z));
        }
    }
    let rate_h = honest_accepted.len() as f64 / attempts as f64;
    let rate_o = oblivious_accepted.len() as f64 / attempts as f64;
    assert!(
        (rate_h - rate_o).abs() < 0.02,
        "acceptance rates {rate_h} vs {rate_o}"
    );
    assert!(
        stats::ks_two_sample_ok(&honest_accepted, &oblivious_accepted),
        "norm distributions diverge between paths"
    );
    let _ = params;
}

fn norm(v: &[i64]) -> f64 {
    v.iter()
        .map(|&x| (x as f64) * (x as f64))
        .sum::<f64>()
        .sqrt()
}

#[test]
fn randomness_length_is_enforced() {
    let scheme = GqScheme::toy();
    let mut rng = ChaCha20Rng::seed_from_u64(108);
    let (x, _) = scheme.generate(&mut rng).unwrap();
    let short = BitString::random(scheme.randomness_bits() - 1, &mut rng);
    assert!(matches!(
        ofs_core::sigma::oblivious_commit(&scheme, &x, &short),
        Err(ofs_core::SigmaError::BadRandomnessLength { .. })
    ));
    let good = BitString::random(scheme.randomness_bits(), &mut rng);
    let com = ofs_core::sigma::oblivious_commit(&scheme, &x, &good).unwrap();
    let rho = ofs_core::sigma::sample_rnd(&scheme, &x, &com, &mut rng).unwrap();
    assert_eq!(
        ofs_core::sigma::oblivious_commit(&scheme, &x, &rho).unwrap(),
        com
    );
}

#[test]
fn exhausted_retry_budget_is_reported() {
    let scheme = LatticeScheme::preset("t0").unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(107);
    let (x, w) = scheme.generate(&mut rng).unwrap();
    let pair = StatementWitnessPair::new(&scheme, x, w).unwrap();
    assert_eq!(
        ofs_core::sigma::run_honest_with_budget(&scheme, &pair, 0, &mut rng).unwrap_err(),
        ofs_core::SigmaError::AbortRetryExceeded { budget: 0 }
    );
}

#[test]
fn key_material_is_shareable_across_threads() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<StatementWitnessPair<GqScheme>>();
    assert_send_sync::<StatementWitnessPair<LatticeScheme>>();
    assert_send_sync::<ofs_core::fs::SigningKey<LatticeScheme>>();
    assert_send_sync::<ofs_core::fs::VerifyingKey<LatticeScheme>>();
    assert_send_sync::<ofs_core::oracle::XofOracle>();
    assert_send_sync::<ofs_core::oracle::LazyOracle>();
    assert_send_sync::<ofs_core::oracle::SemiConstantOracle>();
}

#[test]
fn oblivious_round_trip_contract() {
    // rho -> com -> sample_rnd -> rho' reproduces com on both schemes.
    let mut rng = ChaCha20Rng::seed_from_u64(106);

    let gq = GqScheme::toy();
    let (x, _) = gq.generate(&mut rng).unwrap();
    for _ in 0..200 {
        let rho = BitString::random(gq.randomness_bits(), &mut rng);
        let com = gq.commit_from_randomness(&x, &rho).unwrap();
        let rho2 = gq.sample_randomness(&x, &com, &mut rng).unwrap();
        assert_eq!(gq.commit_from_randomness(&x, &rho2).unwrap(), com);
    }

    let lat = LatticeScheme::preset("t0").unwrap();
    let (x, _) = lat.generate(&mut rng).unwrap();
    for _ in 0..200 {
        let rho = BitString::random(lat.randomness_bits(), &mut rng);
        let com = lat.commit_from_randomness(&x, &rho).unwrap();
        let rho2 = lat.sample_randomness(&x, &com, &mut rng).unwrap();
        assert_eq!(lat.commit_from_randomness(&x, &rho2).unwrap(), com);
    }
}
