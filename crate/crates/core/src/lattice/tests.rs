use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::*;
use crate::stats;

fn setup(seed: u64) -> (LatticeParams, LatticeKeys, ChaCha20Rng) {
    let params = LatticeParams::preset("t0").unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let keys = keygen(&params, &mut rng).unwrap();
    (params, keys, rng)
}

/// Independent check oracle: plain nested-loop matrix multiply mod q.
fn naive_mat_vec(a: &ModMatrix, v: &[i64], q: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.rows()];
    for (r, slot) in out.iter_mut().enumerate() {
        let mut acc: i128 = 0;
        for c in 0..a.cols() {
            acc += a.get(r, c) as i128 * v[c] as i128;
        }
        *slot = acc.rem_euclid(q as i128) as u64;
    }
    out
}

fn respond_until_accept(
    params: &LatticeParams,
    keys: &LatticeKeys,
    target: &[u64],
    c: &LatticeChallenge,
    rng: &mut ChaCha20Rng,
) -> Vec<i64> {
    loop {
        match respond(params, &keys.secret, target, c, rng) {
            Ok(z) => return z,
            Err(SigmaError::Abort) => continue,
            Err(e) => panic!("unexpected respond error: {e}"),
        }
    }
}

#[test]
fn preset_invariants_validate() {
    for name in ["t0", "t1"] {
        let p = LatticeParams::preset(name).unwrap();
        p.validate().unwrap();
    }
    // Each invariant individually rejects.
    let mut p = LatticeParams::preset("t0").unwrap();
    p.m = 63;
    assert!(p.validate().is_err());
    let mut p = LatticeParams::preset("t0").unwrap();
    p.s = 100.0;
    assert!(p.validate().is_err());
    let mut p = LatticeParams::preset("t0").unwrap();
    p.lambda = 30;
    assert!(p.validate().is_err());
}

#[test]
fn preset_file_round_trip() {
    let text = "# toy preset\nn = 4\nlog2_q = 8\nm = 64\nk = 8\nd = 1\nkappa = 4\ns = 384 # 12*1*4*sqrt(64)\neta = 1.1\nlambda = 10\n";
    let p = LatticeParams::parse(text).unwrap();
    assert_eq!(p, LatticeParams::preset("t0").unwrap());

    assert!(LatticeParams::parse("n = 4").is_err());
    assert!(LatticeParams::parse(&text.replace("384", "50")).is_err());
}

#[test]
fn keygen_satisfies_relation() {
    let (params, keys, _) = setup(40);
    let scheme = LatticeScheme::new(params.clone()).unwrap();
    assert!(scheme.relation_check(&keys.public, &keys.secret));
    // R = A S verified against the independent oracle column by column.
    for (j, col) in keys.secret.secret.iter().enumerate() {
        let image = naive_mat_vec(&keys.public.a, col, params.q());
        for (i, &v) in image.iter().enumerate() {
            assert_eq!(keys.public.r.get(i, j), v);
        }
    }
}

#[test]
fn honest_run_verifies_with_exact_identity() {
    let (params, keys, mut rng) = setup(41);
    let scheme = LatticeScheme::new(params.clone()).unwrap();
    let q = params.q();
    for _ in 0..20 {
        let y = scheme.honest_commit(&keys.public, &mut rng);
        let c = sample_uniform_challenge(params.k, params.kappa, &mut rng);
        let z = respond_until_accept(&params, &keys, &y, &c, &mut rng);
        assert!(verify_id(&params, &keys.public, &y, &c, &z).unwrap());
        // R c + A z = Y mod q, exactly, via the independent oracle.
        let az = naive_mat_vec(&keys.public.a, &z, q);
        let rc = {
            let wide: Vec<i64> = c.coeffs().iter().map(|&x| x as i64).collect();
            naive_mat_vec(&keys.public.r, &wide, q)
        };
        for i in 0..params.n {
            assert_eq!((az[i] + rc[i]) % q, y[i]);
        }
    }
}

#[test]
fn zero_challenge_collapses_acceptance_to_one_over_m() {
    let (params, keys, mut rng) = setup(42);
    let zero = challenge_from_index(0, params.k, params.kappa);
    assert_eq!(zero.weight(), 0);
    let y = vec![0u64; params.n];
    let z = respond_until_accept(&params, &keys, &y, &zero, &mut rng);
    // With c = 0 the shift vanishes and z is the raw preimage.
    let prob = rejection_acceptance_prob(&z, &vec![0i64; params.m], params.s);
    assert!((prob - 1.0 / rejection_m()).abs() < 1e-12);
}

#[test]
fn acceptance_rate_is_near_one_over_m() {
    let (params, keys, mut rng) = setup(43);
    let trials = 10_000;
    let mut accepted = 0usize;
    for _ in 0..trials {
        let y: Vec<u64> = (0..params.n)
            .map(|_| rng.gen_range(0..params.q()))
            .collect();
        let c = sample_uniform_challenge(params.k, params.kappa, &mut rng);
        if respond(&params, &keys.secret, &y, &c, &mut rng).is_ok() {
            accepted += 1;
        }
    }
    let rate = accepted as f64 / trials as f64;
    let m = rejection_m();
    assert!(
        rate >= 1.0 / (1.2 * m),
        "acceptance rate {rate} below 1/(1.2 M)"
    );
    assert!(rate <= 1.0, "acceptance rate {rate} above 1");
    // Near 1/M: within 5 binomial sigmas.
    let sigma = (rate * (1.0 - rate) / trials as f64).sqrt();
    assert!(
        (rate - 1.0 / m).abs() < 5.0 * sigma + 0.01,
        "rate {rate} far from 1/M"
    );
}

#[test]
fn norm_accounting_of_the_shift() {
    let (params, keys, mut rng) = setup(44);
    let bound = (params.d as f64 * params.kappa as f64 * (params.m as f64).sqrt()).powi(2);
    for _ in 0..200 {
        let c = sample_uniform_challenge(params.k, params.kappa, &mut rng);
        let shift = secret_times_challenge(&keys.secret.secret, &c);
        let norm: i128 = shift.iter().map(|&v| v as i128 * v as i128).sum();
        assert!(
            norm as f64 <= bound + 1e-9,
            "||Sc||^2 = {norm} above (d kappa sqrt(m))^2"
        );
    }
}

#[test]
fn verifier_rejects_scaled_response() {
    let (params, keys, mut rng) = setup(45);
    let scheme = LatticeScheme::new(params.clone()).unwrap();
    // Tripling z typically breaks the norm bound at this preset
    // (9 ||z||^2 > (eta s)^2 m); retry until the premise holds.
    let (y, c, z) = loop {
        let y = scheme.honest_commit(&keys.public, &mut rng);
        let c = sample_uniform_challenge(params.k, params.kappa, &mut rng);
        let z = respond_until_accept(&params, &keys, &y, &c, &mut rng);
        let norm_sq: i128 = z.iter().map(|&v| 9 * v as i128 * v as i128).sum();
        if norm_sq > params.response_norm_bound_sq() {
            break (y, c, z);
        }
    };
    assert!(verify_id(&params, &keys.public, &y, &c, &z).unwrap());
    let scaled: Vec<i64> = z.iter().map(|&v| 3 * v).collect();
    assert!(!verify_id(&params, &keys.public, &y, &c, &scaled).unwrap());

    // Shifting Y by one column of A breaks the linear check.
    let mut e1 = vec![0i64; params.m];
    e1[0] = 1;
    let ae1 = keys.public.a.mul_signed_vec(&e1);
    let q = params.q();
    let shifted: Vec<u64> = y.iter().zip(&ae1).map(|(&a, &b)| (a + b) % q).collect();
    assert!(!verify_id(&params, &keys.public, &shifted, &c, &z).unwrap());

    // Shape violations are errors, not false.
    assert!(matches!(
        verify_id(&params, &keys.public, &y[..params.n - 1], &c, &z),
        Err(SigmaError::ShapeMismatch(_))
    ));
}

#[test]
fn simulator_outputs_verify_and_abort_rate_matches() {
    let (params, keys, mut rng) = setup(46);
    let trials = 10_000;
    let mut aborts = 0usize;
    for _ in 0..trials {
        match simulate_id(&params, &keys.public, &mut rng) {
            Ok((y, c, z)) => {
                assert!(verify_id(&params, &keys.public, &y, &c, &z).unwrap());
            }
            Err(SigmaError::Abort) => aborts += 1,
            Err(e) => panic!("unexpected simulator error: {e}"),
        }
    }
    let expected = 1.0 - 1.0 / rejection_m();
    let rate = aborts as f64 / trials as f64;
    let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
    assert!(
        (rate - expected).abs() < 3.0 * sigma,
        "abort rate {rate} vs {expected}"
    );
}

#[test]
fn simulated_and_honest_norms_agree() {
    let (params, keys, mut rng) = setup(47);
    let scheme = LatticeScheme::new(params.clone()).unwrap();
    let samples = 2_000;
    let mut honest = Vec::with_capacity(samples);
    while honest.len() < samples {
        let y = scheme.honest_commit(&keys.public, &mut rng);
        let c = sample_uniform_challenge(params.k, params.kappa, &mut rng);
        if let Ok(z) = respond(&params, &keys.secret, &y, &c, &mut rng) {
            honest.push((z.iter().map(|&v| v as f64 * v as f64).sum::<f64>()).sqrt());
        }
    }
    let mut simulated = Vec::with_capacity(samples);
    while simulated.len() < samples {
        if let Ok((_, _, z)) = simulate_id(&params, &keys.public, &mut rng) {
            simulated.push((z.iter().map(|&v| v as f64 * v as f64).sum::<f64>()).sqrt());
        }
    }
    assert!(
        stats::ks_two_sample_ok(&honest, &simulated),
        "norm distributions diverge"
    );
}

#[test]
fn extraction_from_forks() {
    let (params, keys, mut rng) = setup(48);
    // Oblivious commitment: uniform Y, as the hash oracle would produce.
    let y: Vec<u64> = (0..params.n)
        .map(|_| rng.gen_range(0..params.q()))
        .collect();
    let c1 = sample_uniform_challenge(params.k, params.kappa, &mut rng);
    let c2 = loop {
        let c = sample_uniform_challenge(params.k, params.kappa, &mut rng);
        if c != c1 {
            break c;
        }
    };
    let z1 = respond_until_accept(&params, &keys, &y, &c1, &mut rng);
    let z2 = respond_until_accept(&params, &keys, &y, &c2, &mut rng);
    let t1 = (y.clone(), c1, z1);
    let t2 = (y, c2, z2);
    let sol = extract_solution(&params, &keys.public, &t1, &t2).unwrap();
    assert!(extracted_solution_ok(&params, &keys.public, &sol));
    // A u = R e against the independent oracle.
    assert_eq!(
        naive_mat_vec(&keys.public.a, &sol.u, params.q()),
        naive_mat_vec(&keys.public.r, &sol.e, params.q())
    );

    assert_eq!(
        extract_solution(&params, &keys.public, &t1, &t1).unwrap_err(),
        SigmaError::SameChallenge
    );
}

#[test]
fn extraction_property_over_many_forks() {
    let (params, keys, mut rng) = setup(49);
    for _ in 0..1000 {
        let y: Vec<u64> = (0..params.n)
            .map(|_| rng.gen_range(0..params.q()))
            .collect();
        let c1 = sample_uniform_challenge(params.k, params.kappa, &mut rng);
        let c2 = loop {
            let c = sample_uniform_challenge(params.k, params.kappa, &mut rng);
            if c != c1 {
                break c;
            }
        };
        let z1 = respond_until_accept(&params, &keys, &y, &c1, &mut rng);
        let z2 = respond_until_accept(&params, &keys, &y, &c2, &mut rng);
        let sol = extract_solution(
            &params,
            &keys.public,
            &(y.clone(), c1, z1),
            &(y.clone(), c2, z2),
        )
        .unwrap();
        assert!(extracted_solution_ok(&params, &keys.public, &sol));
    }
}

#[test]
fn statement_and_witness_codecs_round_trip() {
    let (params, keys, _) = setup(50);
    let scheme = LatticeScheme::new(params).unwrap();
    let bytes = scheme.encode_statement(&keys.public);
    let decoded = scheme.decode_statement(&bytes).unwrap();
    assert_eq!(decoded, keys.public);
    assert!(scheme.decode_statement(&bytes[..bytes.len() - 4]).is_err());

    let wbytes = scheme.encode_witness(&keys.secret);
    let dw = scheme.decode_witness(&keys.public, &wbytes).unwrap();
    assert_eq!(dw.secret, keys.secret.secret);
    assert_eq!(dw.trapdoor.basis(), keys.secret.trapdoor.basis());
    assert!(scheme.decode_witness(&keys.public, &wbytes[..8]).is_err());
}

#[test]
fn oblivious_commitment_bijection() {
    let (params, keys, mut rng) = setup(51);
    let scheme = LatticeScheme::new(params.clone()).unwrap();
    for _ in 0..500 {
        let rho = BitString::random(scheme.randomness_bits(), &mut rng);
        let com = scheme.commit_from_randomness(&keys.public, &rho).unwrap();
        assert!(com.iter().all(|&v| v < params.q()));
        assert_eq!(
            scheme.commit_from_randomness(&keys.public, &rho).unwrap(),
            com
        );
        let back = scheme
            .sample_randomness(&keys.public, &com, &mut rng)
            .unwrap();
        assert_eq!(back, rho);
    }
    // Out-of-range coordinate is outside the image.
    let mut bad = vec![0u64; params.n];
    bad[0] = params.q();
    assert_eq!(
        scheme
            .sample_randomness(&keys.public, &bad, &mut rng)
            .unwrap_err(),
        SigmaError::NotInRange
    );
}
