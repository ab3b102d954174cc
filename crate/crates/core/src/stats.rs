//! Statistical checks used by the experiment harnesses and tests.

/// Pearson chi-square statistic for observed counts against expected counts.
///
/// Panics if the slices differ in length or an expected count is zero.
pub fn chi_square_stat(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            assert!(e > 0.0, "expected count must be positive");
            let d = o as f64 - e;
            d * d / e
        })
        .sum()
}

/// Upper critical value of the chi-square distribution at significance 0.01.
///
/// Exact table for small degrees of freedom, Wilson-Hilferty approximation
/// above; the approximation error is well under the sampling noise of the
/// statistics compared against it.
pub fn chi_square_critical_01(df: usize) -> f64 {
    const TABLE: [f64; 12] = [
        6.635, 9.210, 11.345, 13.277, 15.086, 16.812, 18.475, 20.090, 21.666, 23.209, 24.725,
        26.217,
    ];
    assert!(df >= 1);
    if df <= TABLE.len() {
        return TABLE[df - 1];
    }
    // Wilson-Hilferty: chi2 ~ df * (1 - 2/(9 df) + z * sqrt(2/(9 df)))^3.
    const Z_99: f64 = 2.326_347_874_040_841;
    let d = df as f64;
    let t = 1.0 - 2.0 / (9.0 * d) + Z_99 * (2.0 / (9.0 * d)).sqrt();
    d * t * t * t
}

/// Chi-square uniformity test over equally likely cells at significance 0.01.
pub fn chi_square_uniform_ok(counts: &[u64]) -> bool {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let stat = chi_square_stat(counts, &vec![expected; counts.len()]);
    stat < chi_square_critical_01(counts.len() - 1)
}

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = a[i].min(b[j]);
        while i < na && a[i] <= x {
            i += 1;
        }
        while j < nb && b[j] <= x {
            j += 1;
        }
        let fa = i as f64 / na as f64;
        let fb = j as f64 / nb as f64;
        d = d.max((fa - fb).abs());
    }
    d
}

/// Two-sample KS test at significance 0.01: statistic below
/// c(0.01) * sqrt((n+m)/(n m)) with c(0.01) = 1.628.
pub fn ks_two_sample_ok(a: &[f64], b: &[f64]) -> bool {
    let d = ks_statistic(a, b);
    let (n, m) = (a.len() as f64, b.len() as f64);
    d < 1.628 * ((n + m) / (n * m)).sqrt()
}

/// Three-sigma binomial half-width for a rate estimated from `n` trials.
pub fn binomial_three_sigma(p: f64, n: usize) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn chi_square_accepts_uniform_counts() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let mut counts = [0u64; 64];
        for _ in 0..20_000 {
            counts[rng.gen_range(0..64)] += 1;
        }
        assert!(chi_square_uniform_ok(&counts));
    }

    #[test]
    fn chi_square_rejects_skewed_counts() {
        let mut counts = [300u64; 16];
        counts[0] = 900;
        assert!(!chi_square_uniform_ok(&counts));
    }

    #[test]
    fn ks_same_distribution_passes() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let a: Vec<f64> = (0..4000).map(|_| rng.gen::<f64>()).collect();
        let b: Vec<f64> = (0..4000).map(|_| rng.gen::<f64>()).collect();
        assert!(ks_two_sample_ok(&a, &b));
    }

    #[test]
    fn ks_shifted_distribution_fails() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let a: Vec<f64> = (0..4000).map(|_| rng.gen::<f64>()).collect();
        let b: Vec<f64> = (0..4000).map(|_| rng.gen::<f64>() + 0.2).collect();
        assert!(!ks_two_sample_ok(&a, &b));
    }

    #[test]
    fn critical_values_are_monotone() {
        let mut prev = 0.0;
        for df in 1..200 {
            let c = chi_square_critical_01(df);
            assert!(c > prev);
            prev = c;
        }
        // Spot-check against the standard table at df = 50 (76.154).
        assert!((chi_square_critical_01(50) - 76.154).abs() < 0.2);
    }
}
