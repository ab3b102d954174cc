//! Discrete Gaussian sampling over the integers and over lattice cosets.
//!
//! The width convention throughout is rho_s(x) = exp(-pi ||x||^2 / s^2),
//! so a 1-d sample has variance s^2 / (2 pi).

use rand::Rng;

/// Exact discrete Gaussian on the integers with parameter `s` and real
/// center, by rejection from a two-sided geometric proposal.
pub fn gaussian_sample_1d<R: Rng + ?Sized>(s: f64, center: f64, rng: &mut R) -> i64 {
    assert!(s > 0.0, "gaussian parameter must be positive");
    let sigma = s / (2.0 * std::f64::consts::PI).sqrt();
    let c0 = center.round();
    let log_ratio = -1.0 / sigma;
    loop {
        // Geometric magnitude u >= 0 with P[u] proportional to exp(-u/sigma).
        let a = 1.0 - rng.gen::<f64>(); // (0, 1]
        let u = (a.ln() / log_ratio).floor() as i64;
        let positive: bool = rng.gen();
        if u == 0 && !positive {
            continue; // count zero once
        }
        let k = if positive {
            c0 as i64 + u
        } else {
            c0 as i64 - u
        };
        let d = k as f64 - center;
        // exp bound: sup_k target/proposal = exp(1/2 + 1/(2 sigma)).
        let log_accept = u as f64 / sigma - d * d / (2.0 * sigma * sigma) - 0.5 - 0.5 / sigma;
        if rng.gen::<f64>() < log_accept.exp() {
            return k;
        }
    }
}

/// Gram-Schmidt data of an integer basis, columns orthogonalized in order.
#[derive(Clone, Debug)]
pub struct Gso {
    pub(crate) bstar: Vec<Vec<f64>>,
    pub(crate) norms_sq: Vec<f64>,
}

impl Gso {
    pub fn max_norm(&self) -> f64 {
        self.norms_sq.iter().cloned().fold(0.0, f64::max).sqrt()
    }
}

pub(crate) fn gram_schmidt(basis: &[Vec<i64>]) -> Gso {
    let dim = basis[0].len();
    let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(basis.len());
    let mut norms_sq = Vec::with_capacity(basis.len());
    for col in basis {
        let mut v: Vec<f64> = col.iter().map(|&x| x as f64).collect();
        assert_eq!(v.len(), dim);
        for (prev, &nsq) in bstar.iter().zip(&norms_sq) {
            let mu = dot(&v, prev) / nsq;
            for (vi, pi) in v.iter_mut().zip(prev) {
                *vi -= mu * pi;
            }
        }
        let nsq = dot(&v, &v);
        assert!(nsq > 1e-9, "basis columns must be linearly independent");
        norms_sq.push(nsq);
        bstar.push(v);
    }
    Gso { bstar, norms_sq }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Randomized nearest-plane sampling: a lattice point distributed as the
/// discrete Gaussian D_{L(basis), s, center}.
pub(crate) fn klein_sample<R: Rng + ?Sized>(
    basis: &[Vec<i64>],
    gso: &Gso,
    s: f64,
    center: &[f64],
    rng: &mut R,
) -> Vec<i64> {
    let dim = center.len();
    let mut remaining = center.to_vec();
    let mut out = vec![0i64; dim];
    for i in (0..basis.len()).rev() {
        let c_i = dot(&remaining, &gso.bstar[i]) / gso.norms_sq[i];
        let s_i = s / gso.norms_sq[i].sqrt();
        let z_i = gaussian_sample_1d(s_i, c_i, rng);
        for t in 0..dim {
            let step = basis[i][t];
            remaining[t] -= z_i as f64 * step as f64;
            out[t] += z_i * step;
        }
    }
    out
}
