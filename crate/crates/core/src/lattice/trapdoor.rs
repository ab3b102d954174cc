//! Gadget trapdoors for power-of-two moduli and Gaussian preimage sampling.
//!
//! The matrix is A = [Abar | G - Abar*Rbar] for uniform Abar and a small
//! random Rbar, with G = I_n (x) (1, 2, ..., 2^(l-1)). Since q = 2^l the
//! gadget decomposition is exact bit decomposition, and a short basis of
//! the kernel lattice of A assembles directly from Rbar and the bit
//! structure. Preimages are sampled by randomized nearest-plane over that
//! basis, shifted to an arbitrary solution obtained through the trapdoor
//! identity A * [Rbar; I] = G.

use rand::Rng;

use super::gaussian::{gram_schmidt, klein_sample, Gso};
use super::{LatticeParams, ModMatrix};
use crate::error::SigmaError;

/// Multiplier between the largest Gram-Schmidt norm of the basis and the
/// smallest Gaussian parameter the sampler accepts (smoothing slack for the
/// randomized nearest-plane sampler).
pub const KLEIN_SLACK: f64 = 3.0;

const GEN_RETRY_BUDGET: usize = 64;

/// Matrix A with trapdoor data: the small matrix Rbar and the short kernel
/// basis it defines, plus cached Gram-Schmidt data for sampling.
#[derive(Clone, Debug)]
pub struct LatticeTrapdoorKey {
    a: ModMatrix,
    /// Rows of Rbar, an (m - w) x w matrix with entries in {-1, 0, 1}.
    r_bar: Vec<Vec<i64>>,
    /// Columns of a basis of { v : A v = 0 mod q }.
    basis: Vec<Vec<i64>>,
    gso: Gso,
}

impl LatticeTrapdoorKey {
    pub fn matrix(&self) -> &ModMatrix {
        &self.a
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    /// Smallest Gaussian parameter the sampler accepts for this trapdoor.
    pub fn sampling_threshold(&self) -> f64 {
        self.gso.max_norm() * KLEIN_SLACK
    }

    pub fn max_basis_column_norm(&self) -> f64 {
        self.basis
            .iter()
            .map(|col| col.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub(crate) fn r_bar(&self) -> &[Vec<i64>] {
        &self.r_bar
    }

    pub(crate) fn rebuild(params: &LatticeParams, a: ModMatrix, r_bar: Vec<Vec<i64>>) -> Self {
        let basis = assemble_kernel_basis(params, &a, &r_bar);
        let gso = gram_schmidt(&basis);
        LatticeTrapdoorKey {
            a,
            r_bar,
            basis,
            gso,
        }
    }
}

/// Generates a trapdoored matrix.
///
/// A is statistically close to uniform; every basis column b satisfies
/// A b = 0 mod q and stays below the preset's quality bound (regeneration
/// on the rare miss).
pub fn gen_trap<R: Rng + ?Sized>(
    params: &LatticeParams,
    rng: &mut R,
) -> Result<LatticeTrapdoorKey, SigmaError> {
    params.validate()?;
    let n = params.n;
    let w = params.gadget_width();
    let m_bar = params.m - w;
    let q = params.q();

    for _ in 0..GEN_RETRY_BUDGET {
        let mut a_bar = ModMatrix::zero(n, m_bar, q);
        for r in 0..n {
            for c in 0..m_bar {
                a_bar.set(r, c, rng.gen_range(0..q));
            }
        }
        let r_bar: Vec<Vec<i64>> = (0..m_bar)
            .map(|_| (0..w).map(|_| rng.gen_range(-1..=1)).collect())
            .collect();

        // A = [Abar | G - Abar * Rbar]
        let mut a = ModMatrix::zero(n, params.m, q);
        for r in 0..n {
            for c in 0..m_bar {
                a.set(r, c, a_bar.get(r, c));
            }
        }
        for r in 0..n {
            for c in 0..w {
                let mut acc: i128 = 0;
                for t in 0..m_bar {
                    acc += a_bar.get(r, t) as i128 * r_bar[t][c] as i128;
                }
                let gadget = if c / params.log2_q as usize == r {
                    1u64 << (c % params.log2_q as usize)
                } else {
                    0
                };
                let v = (gadget as i128 - acc).rem_euclid(q as i128) as u64;
                a.set(r, m_bar + c, v);
            }
        }

        let key = LatticeTrapdoorKey::rebuild(params, a, r_bar);
        debug_assert!(kernel_basis_ok(&key));
        if key.max_basis_column_norm() <= params.basis_quality_bound()
            && key.sampling_threshold() <= params.s
        {
            return Ok(key);
        }
    }
    Err(SigmaError::UnsupportedParameters(
        "could not reach the basis quality bound for these parameters".into(),
    ))
}

/// Columns of the kernel basis: T * P for the unimodular T = [[I, Rbar], [0, I]]
/// and P the kernel basis of [Abar | G].
fn assemble_kernel_basis(
    params: &LatticeParams,
    a: &ModMatrix,
    r_bar: &[Vec<i64>],
) -> Vec<Vec<i64>> {
    let n = params.n;
    let l = params.log2_q as usize;
    let w = params.gadget_width();
    let m_bar = params.m - w;
    let q = params.q();
    let mut basis = Vec::with_capacity(params.m);

    // Left block: (e_i - Rbar d_i ; -d_i) with d_i the bit decomposition of
    // column i of Abar, so that [Abar | G] (e_i ; -d_i) = 0 exactly.
    for i in 0..m_bar {
        let mut d = vec![0i64; w];
        for r in 0..n {
            let v = a.get(r, i);
            for j in 0..l {
                d[r * l + j] = ((v >> j) & 1) as i64;
            }
        }
        let mut col = vec![0i64; params.m];
        col[i] = 1;
        for (t, row) in r_bar.iter().enumerate() {
            let mut acc: i64 = 0;
            for (j, &dj) in d.iter().enumerate() {
                acc += row[j] * dj;
            }
            col[t] -= acc;
        }
        for (j, &dj) in d.iter().enumerate() {
            col[m_bar + j] = -dj;
        }
        basis.push(col);
    }

    // Right block: (Rbar s_j ; s_j) for s_j the gadget-kernel columns
    // (2 on the diagonal, -1 below, except the top power where 2*2^(l-1) = q).
    for j in 0..w {
        let mut s = vec![0i64; w];
        s[j] = 2;
        if (j % l) != l - 1 {
            s[j + 1] = -1;
        }
        let mut col = vec![0i64; params.m];
        for (t, row) in r_bar.iter().enumerate() {
            let mut acc: i64 = 0;
            for (i, &si) in s.iter().enumerate() {
                acc += row[i] * si;
            }
            col[t] = acc;
        }
        for (i, &si) in s.iter().enumerate() {
            col[m_bar + i] = si;
        }
        basis.push(col);
    }

    debug_assert_eq!(basis.len(), params.m);
    let _ = q;
    basis
}

fn kernel_basis_ok(key: &LatticeTrapdoorKey) -> bool {
    key.basis
        .iter()
        .all(|col| key.a.mul_signed_vec(col).iter().all(|&v| v == 0))
}

/// Samples a Gaussian preimage: y' distributed as D^m_s conditioned on
/// A y' = target (mod q).
pub fn sample_preimage<R: Rng + ?Sized>(
    trapdoor: &LatticeTrapdoorKey,
    target: &[u64],
    s: f64,
    rng: &mut R,
) -> Result<Vec<i64>, SigmaError> {
    let a = &trapdoor.a;
    if target.len() != a.rows() {
        return Err(SigmaError::ShapeMismatch(
            "target length must equal the row count",
        ));
    }
    let threshold = trapdoor.sampling_threshold();
    if s < threshold {
        return Err(SigmaError::QualityViolation {
            required: threshold,
            got: s,
        });
    }

    // Arbitrary solution through the trapdoor identity: v0 = [Rbar; I] t
    // with t the bit decomposition of the target, so A v0 = G t = target.
    let l = a.q().trailing_zeros() as usize;
    let w = a.rows() * l;
    let m_bar = a.cols() - w;
    let mut t = vec![0i64; w];
    for (r, &yr) in target.iter().enumerate() {
        for j in 0..l {
            t[r * l + j] = ((yr >> j) & 1) as i64;
        }
    }
    let mut v0 = vec![0i64; a.cols()];
    for (row_idx, row) in trapdoor.r_bar.iter().enumerate() {
        let mut acc = 0i64;
        for (j, &tj) in t.iter().enumerate() {
            acc += row[j] * tj;
        }
        v0[row_idx] = acc;
    }
    v0[m_bar..(w + m_bar)].copy_from_slice(&t[..w]);

    // Gaussian over the kernel coset: v0 + D_{kernel, s, -v0}.
    let center: Vec<f64> = v0.iter().map(|&x| -x as f64).collect();
    let lattice_part = klein_sample(&trapdoor.basis, &trapdoor.gso, s, &center, rng);
    let preimage: Vec<i64> = v0.iter().zip(&lattice_part).map(|(&a, &b)| a + b).collect();

    debug_assert_eq!(a.mul_signed_vec(&preimage), target);
    Ok(preimage)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn toy_params() -> LatticeParams {
        // n=4, q=256, m=64 exercises the generator at the smallest scale.
        LatticeParams::preset("t0").unwrap()
    }

    #[test]
    fn generated_basis_lies_in_kernel() {
        let params = toy_params();
        let mut rng = ChaCha20Rng::seed_from_u64(30);
        let key = gen_trap(&params, &mut rng).unwrap();
        assert_eq!(key.matrix().rows(), params.n);
        assert_eq!(key.matrix().cols(), params.m);
        assert_eq!(key.basis().len(), params.m);
        for col in key.basis() {
            let image = key.matrix().mul_signed_vec(col);
            assert!(image.iter().all(|&v| v == 0), "basis column outside kernel");
        }
        assert!(key.max_basis_column_norm() <= params.basis_quality_bound());
        assert!(key.sampling_threshold() <= params.s);
    }

    #[test]
    fn invalid_dimension_is_rejected() {
        let mut params = toy_params();
        params.n = 0;
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        assert!(matches!(
            gen_trap(&params, &mut rng),
            Err(SigmaError::UnsupportedParameters(_))
        ));
    }

    #[test]
    fn distinct_seeds_give_distinct_matrices() {
        let params = toy_params();
        let mut seen = std::collections::HashSet::new();
        for seed in 0..100u64 {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let key = gen_trap(&params, &mut rng).unwrap();
            let rows: Vec<u64> = (0..params.n)
                .flat_map(|r| (0..params.m).map(move |c| (r, c)))
                .map(|(r, c)| key.matrix().get(r, c))
                .collect();
            assert!(
                seen.insert(rows),
                "seed {seed} reproduced an earlier matrix"
            );
        }
    }

    #[test]
    fn matrix_entries_look_uniform() {
        // Pool the gadget-side block over many keys and chi-square the
        // value distribution in 16 buckets.
        let params = toy_params();
        let q = params.q();
        let mut counts = vec![0u64; 16];
        for seed in 0..60u64 {
            let mut rng = ChaCha20Rng::seed_from_u64(1000 + seed);
            let key = gen_trap(&params, &mut rng).unwrap();
            let w = params.gadget_width();
            for r in 0..params.n {
                for c in (params.m - w)..params.m {
                    let bucket = (key.matrix().get(r, c) * 16 / q) as usize;
                    counts[bucket] += 1;
                }
            }
        }
        assert!(crate::stats::chi_square_uniform_ok(&counts));
    }

    #[test]
    fn preimage_congruence_and_norms() {
        let params = toy_params();
        let mut rng = ChaCha20Rng::seed_from_u64(32);
        let key = gen_trap(&params, &mut rng).unwrap();
        let q = params.q();

        // Zero target still yields a proper preimage.
        let zero = vec![0u64; params.n];
        let y = sample_preimage(&key, &zero, params.s, &mut rng).unwrap();
        assert_eq!(key.matrix().mul_signed_vec(&y), zero);

        let target: Vec<u64> = (0..params.n).map(|_| rng.gen_range(0..q)).collect();
        let trials = 10_000;
        let mut coord_sum = vec![0i64; params.m];
        let mut long = 0usize;
        for _ in 0..trials {
            let y = sample_preimage(&key, &target, params.s, &mut rng).unwrap();
            assert_eq!(key.matrix().mul_signed_vec(&y), target);
            for (acc, &v) in coord_sum.iter_mut().zip(&y) {
                *acc += v;
            }
            let norm_sq: f64 = y.iter().map(|&v| (v * v) as f64).sum();
            if norm_sq.sqrt() > params.s * (params.m as f64).sqrt() {
                long += 1;
            }
        }
        // Per-coordinate mean within the Gaussian error bars of zero (4
        // sigma per coordinate absorbs the multiplicity over m coordinates).
        let sigma1 = params.s / (2.0 * std::f64::consts::PI).sqrt();
        let bound = 4.0 * sigma1 / (trials as f64).sqrt();
        let worst = coord_sum
            .iter()
            .map(|&s| (s as f64 / trials as f64).abs())
            .fold(0.0, f64::max);
        assert!(worst < bound, "coordinate mean {worst} vs bound {bound}");
        assert!(
            long as f64 / trials as f64 <= 1e-3,
            "too many long preimages: {long}"
        );
    }

    #[test]
    fn low_quality_parameter_is_rejected() {
        let params = toy_params();
        let mut rng = ChaCha20Rng::seed_from_u64(33);
        let key = gen_trap(&params, &mut rng).unwrap();
        let err = sample_preimage(&key, &vec![0u64; params.n], 1.0, &mut rng).unwrap_err();
        assert!(matches!(err, SigmaError::QualityViolation { .. }));
    }
}
