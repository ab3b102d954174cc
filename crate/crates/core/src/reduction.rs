//! Executable security-reduction pipeline.
//!
//! One trial mirrors the reduction's game sequence: simulate a transcript
//! (com*, ch*, rsp*), build a semi-constant oracle injecting the packed
//! (rho*, ch') at a delta-fraction of inputs, answer signing queries by
//! per-point reprogramming with fresh simulated transcripts, and finally
//! record whether the forgery verifies, whether its hash input lands on an
//! injected point, and whether special-soundness extraction on the pair of
//! transcripts succeeds. The closed-form quantities the proof optimizes —
//! delta* and the landing bound — are exposed both as floats and as exact
//! rationals.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use std::sync::Arc;

use crate::bits::BitString;
use crate::error::SigmaError;
use crate::fs::{FiatShamir, Signature, VerifyingKey};
use crate::oracle::{reprogram, shake256, LazyOracle, ReprogrammedOracle, SemiConstantOracle};
use crate::sigma::{
    ObliviousCommitments, SigmaProtocol, StatementWitnessPair, Transcript, DEFAULT_RETRY_BUDGET,
};

/// delta* = 3 eps / (16 q_H^4), the maximizer of the landing bound,
/// clamped into (0, 1].
pub fn optimal_delta(eps: f64, q_h: u32) -> Result<f64, SigmaError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(SigmaError::DomainError("eps must lie in (0, 1]"));
    }
    if q_h == 0 {
        return Err(SigmaError::DomainError("q_h must be at least 1"));
    }
    let q = q_h as f64;
    Ok((3.0 * eps / (16.0 * q * q * q * q)).min(1.0))
}

/// Exact-rational twin of [`optimal_delta`].
pub fn optimal_delta_exact(eps: Ratio<i128>, q_h: u32) -> Result<Ratio<i128>, SigmaError> {
    if eps <= Ratio::new(0, 1) || eps > Ratio::new(1, 1) {
        return Err(SigmaError::DomainError("eps must lie in (0, 1]"));
    }
    if q_h == 0 {
        return Err(SigmaError::DomainError("q_h must be at least 1"));
    }
    let q4 = (q_h as i128).pow(4);
    let delta = eps * Ratio::new(3, 16 * q4);
    Ok(delta.min(Ratio::new(1, 1)))
}

/// The landing lower bound delta*eps - (8/3) q_H^4 delta^2.
pub fn landing_bound(eps: f64, delta: f64, q_h: u32) -> f64 {
    let q = q_h as f64;
    delta * eps - (8.0 / 3.0) * q * q * q * q * delta * delta
}

/// Exact-rational twin of [`landing_bound`].
pub fn landing_bound_exact(eps: Ratio<i128>, delta: Ratio<i128>, q_h: u32) -> Ratio<i128> {
    let q4 = Ratio::new((q_h as i128).pow(4), 1);
    delta * eps - Ratio::new(8, 3) * q4 * delta * delta
}

/// The headline bound 3 eps^2 / (16 q_H^4) printed beside reports for
/// audit. Substituting delta* into the landing bound gives half of it.
pub fn headline_bound(eps: f64, q_h: u32) -> f64 {
    let q = q_h as f64;
    3.0 * eps * eps / (16.0 * q * q * q * q)
}

/// Exact-rational twin of [`headline_bound`].
pub fn headline_bound_exact(eps: Ratio<i128>, q_h: u32) -> Ratio<i128> {
    Ratio::new(3, 16 * (q_h as i128).pow(4)) * eps * eps
}

/// Game configuration: injection fraction, trial count, query budgets and
/// the master seed all trials derive from.
#[derive(Clone, Debug)]
pub struct GameConfig {
    pub delta: f64,
    pub trials: usize,
    pub q_h: usize,
    pub q_s: usize,
    pub seed: u64,
}

/// Per-trial verdict flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub forged: bool,
    pub landed: bool,
    pub extracted: bool,
}

/// Aggregated rates; extraction <= landing <= forgery by construction.
#[derive(Clone, Debug)]
pub struct GameReport {
    pub trials: usize,
    pub forgery_rate: f64,
    pub landing_rate: f64,
    pub extraction_rate: f64,
    pub delta: f64,
    pub q_h: usize,
    pub q_s: usize,
}

impl GameReport {
    pub fn from_outcomes(outcomes: &[TrialOutcome], config: &GameConfig) -> Self {
        let n = outcomes.len().max(1) as f64;
        GameReport {
            trials: outcomes.len(),
            forgery_rate: outcomes.iter().filter(|o| o.forged).count() as f64 / n,
            landing_rate: outcomes.iter().filter(|o| o.landed).count() as f64 / n,
            extraction_rate: outcomes.iter().filter(|o| o.extracted).count() as f64 / n,
            delta: config.delta,
            q_h: config.q_h,
            q_s: config.q_s,
        }
    }
}

/// CSV rows (trial index, verdict flags) plus a `#`-prefixed summary line.
pub fn outcomes_csv(outcomes: &[TrialOutcome], report: &GameReport) -> String {
    let mut out = String::from("trial,forged,landed,extracted\n");
    for (i, o) in outcomes.iter().enumerate() {
        out.push_str(&format!(
            "{i},{},{},{}\n",
            u8::from(o.forged),
            u8::from(o.landed),
            u8::from(o.extracted)
        ));
    }
    out.push_str(&format!(
        "# trials={} forgery_rate={:.6} landing_rate={:.6} extraction_rate={:.6} delta={:.6} qh={} qs={}\n",
        report.trials,
        report.forgery_rate,
        report.landing_rate,
        report.extraction_rate,
        report.delta,
        report.q_h,
        report.q_s
    ));
    out
}

/// The oracle and signer surface a forger sees during one trial. Hash and
/// sign calls are counted against the declared budgets.
pub struct GameContext<'a, P: SigmaProtocol + ObliviousCommitments> {
    fs: &'a FiatShamir<P>,
    statement: &'a P::Statement,
    witness_free_pk: VerifyingKey<P>,
    oracle: ReprogrammedOracle,
    sc: Arc<SemiConstantOracle>,
    q_h: usize,
    q_s: usize,
    hash_queries: usize,
    sign_queries: usize,
    budget_exceeded: bool,
    signed_messages: Vec<Vec<u8>>,
}

impl<'a, P: SigmaProtocol + ObliviousCommitments> GameContext<'a, P> {
    pub fn statement(&self) -> &P::Statement {
        self.statement
    }

    /// Remaining hash-query budget.
    pub fn hash_budget_left(&self) -> usize {
        self.q_h - self.hash_queries
    }

    /// One counted hash query: (com, ch) = H(pk, m, r).
    pub fn hash(
        &mut self,
        message: &[u8],
        r: &BitString,
    ) -> Result<(P::Commitment, BitString), SigmaError> {
        if self.hash_queries >= self.q_h {
            self.budget_exceeded = true;
            return Err(SigmaError::AdversaryBudgetExceeded);
        }
        self.hash_queries += 1;
        self.fs
            .hash_to_com_ch(self.statement, message, r, &self.oracle)
            .map_err(|_| SigmaError::ShapeMismatch("oracle evaluation failed"))
    }

    /// One counted signing query, answered the way the reduction answers:
    /// a fresh simulated transcript patched into the oracle at the single
    /// point (pk, m, r).
    pub fn sign<R: Rng + ?Sized>(
        &mut self,
        message: &[u8],
        rng: &mut R,
    ) -> Result<Signature<P>, SigmaError> {
        if self.sign_queries >= self.q_s {
            self.budget_exceeded = true;
            return Err(SigmaError::AdversaryBudgetExceeded);
        }
        self.sign_queries += 1;
        let r = BitString::random(self.fs.nonce_bits(), rng);
        let simulated = simulate_until_ok(self.fs.protocol(), self.statement, rng)?;
        let rho = self
            .fs
            .protocol()
            .sample_randomness(self.statement, &simulated.com, rng)?;
        let value = self.fs.pack_oracle_value(&rho, &simulated.ch);
        let point = self.fs.oracle_input(self.statement, message, &r);
        let mut oracle = ReprogrammedOracle::over(Box::new(self.sc.clone()));
        std::mem::swap(&mut oracle, &mut self.oracle);
        self.oracle = reprogram(oracle, &point, value)
            .map_err(|_| SigmaError::ShapeMismatch("oracle value length mismatch"))?;
        self.signed_messages.push(message.to_vec());
        Ok(Signature {
            r,
            com: simulated.com,
            ch: simulated.ch,
            rsp: simulated.rsp,
        })
    }
}

fn simulate_until_ok<P: SigmaProtocol, R: Rng + ?Sized>(
    protocol: &P,
    statement: &P::Statement,
    rng: &mut R,
) -> Result<Transcript<P::Commitment, P::Response>, SigmaError> {
    for _ in 0..DEFAULT_RETRY_BUDGET {
        match protocol.simulate(statement, rng) {
            Ok(t) => return Ok(t),
            Err(SigmaError::Abort) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(SigmaError::AbortRetryExceeded {
        budget: DEFAULT_RETRY_BUDGET,
    })
}

/// A classical adversary in the unforgeability game. The forgery is a
/// message plus compact wire bytes.
pub trait Forger<P: SigmaProtocol + ObliviousCommitments>: Sync {
    fn forge<R: Rng + ?Sized>(
        &self,
        ctx: &mut GameContext<'_, P>,
        rng: &mut R,
    ) -> Option<(Vec<u8>, Vec<u8>)>;
}

/// Signs honestly with the real witness; succeeds with rate one up to
/// prover aborts (the eps = 1 forger of the analysis).
pub struct CooperativeForger<'w, P: SigmaProtocol> {
    pair: &'w StatementWitnessPair<P>,
    sign_queries: usize,
}

impl<'w, P: SigmaProtocol> CooperativeForger<'w, P> {
    pub fn new(pair: &'w StatementWitnessPair<P>) -> Self {
        CooperativeForger {
            pair,
            sign_queries: 0,
        }
    }

    /// Ask for this many signing queries before forging.
    pub fn with_sign_queries(mut self, n: usize) -> Self {
        self.sign_queries = n;
        self
    }
}

impl<'w, P: SigmaProtocol + ObliviousCommitments + Sync> Forger<P> for CooperativeForger<'w, P>
where
    P::Statement: Sync,
    P::Witness: Sync,
{
    fn forge<R: Rng + ?Sized>(
        &self,
        ctx: &mut GameContext<'_, P>,
        rng: &mut R,
    ) -> Option<(Vec<u8>, Vec<u8>)> {
        for i in 0..self.sign_queries {
            let message = format!("signing query {i}");
            ctx.sign(message.as_bytes(), rng).ok()?;
        }
        // Forge on a fresh message; prover aborts retry within the budget.
        let mut fresh = *b"forged message ................";
        rng.fill_bytes(&mut fresh[15..]);
        while ctx.hash_budget_left() > 0 {
            let r = BitString::random(ctx.fs.nonce_bits(), rng);
            let (com, ch) = ctx.hash(&fresh, &r).ok()?;
            match ctx
                .fs
                .protocol()
                .respond(ctx.statement, self.pair.witness(), &com, &ch, rng)
            {
                Ok(rsp) => {
                    let sig = Signature { r, com, ch, rsp };
                    return Some((fresh.to_vec(), ctx.fs.encode_signature(&sig, true)));
                }
                Err(SigmaError::Abort) => continue,
                Err(_) => return None,
            }
        }
        None
    }
}

/// Replays a signing-oracle answer on its own query; the freshness check
/// must reject it every time.
pub struct ReplayForger;

impl<P: SigmaProtocol + ObliviousCommitments + Sync> Forger<P> for ReplayForger
where
    P::Statement: Sync,
{
    fn forge<R: Rng + ?Sized>(
        &self,
        ctx: &mut GameContext<'_, P>,
        rng: &mut R,
    ) -> Option<(Vec<u8>, Vec<u8>)> {
        let message = b"replayed message".to_vec();
        let sig = ctx.sign(&message, rng).ok()?;
        let bytes = ctx.fs.encode_signature(&sig, true);
        Some((message, bytes))
    }
}

/// Outputs random bytes as the signature.
pub struct RandomBytesForger {
    pub wire_len: usize,
}

impl<P: SigmaProtocol + ObliviousCommitments + Sync> Forger<P> for RandomBytesForger
where
    P::Statement: Sync,
{
    fn forge<R: Rng + ?Sized>(
        &self,
        _ctx: &mut GameContext<'_, P>,
        rng: &mut R,
    ) -> Option<(Vec<u8>, Vec<u8>)> {
        let mut message = vec![0u8; 16];
        rng.fill_bytes(&mut message);
        let mut wire = vec![0u8; self.wire_len];
        rng.fill_bytes(&mut wire);
        Some((message, wire))
    }
}

/// Runs the full pipeline and aggregates the report.
pub fn run_reduction_game<P, F>(
    fs: &FiatShamir<P>,
    pair: &StatementWitnessPair<P>,
    forger: &F,
    config: &GameConfig,
) -> Result<GameReport, SigmaError>
where
    P: SigmaProtocol + ObliviousCommitments + Sync,
    P::Statement: Sync,
    P::Witness: Sync,
    F: Forger<P>,
{
    let (report, _) = run_reduction_game_detailed(fs, pair, forger, config)?;
    Ok(report)
}

/// As [`run_reduction_game`], also returning the per-trial rows.
pub fn run_reduction_game_detailed<P, F>(
    fs: &FiatShamir<P>,
    pair: &StatementWitnessPair<P>,
    forger: &F,
    config: &GameConfig,
) -> Result<(GameReport, Vec<TrialOutcome>), SigmaError>
where
    P: SigmaProtocol + ObliviousCommitments + Sync,
    P::Statement: Sync,
    P::Witness: Sync,
    F: Forger<P>,
{
    if config.trials == 0 {
        return Err(SigmaError::DomainError("trial count must be positive"));
    }
    if !(0.0..=1.0).contains(&config.delta) {
        return Err(SigmaError::DomainError("delta must lie in [0, 1]"));
    }
    let outcomes: Result<Vec<TrialOutcome>, SigmaError> = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(fs, pair, forger, config, i as u64))
        .collect();
    let outcomes = outcomes?;
    Ok((GameReport::from_outcomes(&outcomes, config), outcomes))
}

fn trial_seeds(master: u64, index: u64) -> ([u8; 32], [u8; 32], u64) {
    let mut input = Vec::with_capacity(22);
    input.extend_from_slice(b"game:");
    input.extend_from_slice(&master.to_le_bytes());
    input.extend_from_slice(&index.to_le_bytes());
    let stream = shake256(&input, 72);
    let base: [u8; 32] = stream[0..32].try_into().unwrap();
    let membership: [u8; 32] = stream[32..64].try_into().unwrap();
    let rng_seed = u64::from_le_bytes(stream[64..72].try_into().unwrap());
    (base, membership, rng_seed)
}

fn run_trial<P, F>(
    fs: &FiatShamir<P>,
    pair: &StatementWitnessPair<P>,
    forger: &F,
    config: &GameConfig,
    index: u64,
) -> Result<TrialOutcome, SigmaError>
where
    P: SigmaProtocol + ObliviousCommitments + Sync,
    P::Statement: Sync,
    P::Witness: Sync,
    F: Forger<P>,
{
    let (base_seed, membership_seed, rng_seed) = trial_seeds(config.seed, index);
    let mut rng = ChaCha20Rng::seed_from_u64(rng_seed);
    let protocol = fs.protocol();
    let statement = pair.statement();

    // The reduction's own transcript and its distinct challenge.
    let star = simulate_until_ok(protocol, statement, &mut rng)?;
    let ch_prime = loop {
        let ch = BitString::random(protocol.challenge_bits(), &mut rng);
        if ch != star.ch {
            break ch;
        }
    };
    // Bend the simulated commitment back to oracle randomness and inject.
    let rho_star = protocol.sample_randomness(statement, &star.com, &mut rng)?;
    let y_star = fs.pack_oracle_value(&rho_star, &ch_prime);
    let base = LazyOracle::new(base_seed, fs.oracle_output_len());
    let sc = Arc::new(
        SemiConstantOracle::new(base, config.delta, y_star, membership_seed)
            .map_err(|_| SigmaError::ShapeMismatch("oracle value length mismatch"))?,
    );

    let mut ctx = GameContext {
        fs,
        statement,
        witness_free_pk: fs.verifying_key(statement.clone()),
        oracle: ReprogrammedOracle::over(Box::new(sc.clone())),
        sc,
        q_h: config.q_h,
        q_s: config.q_s,
        hash_queries: 0,
        sign_queries: 0,
        budget_exceeded: false,
        signed_messages: Vec::new(),
    };

    let forgery = forger.forge(&mut ctx, &mut rng);
    if ctx.budget_exceeded {
        return Err(SigmaError::AdversaryBudgetExceeded);
    }
    let Some((message, wire)) = forgery else {
        return Ok(TrialOutcome {
            forged: false,
            landed: false,
            extracted: false,
        });
    };

    // Freshness first: a replayed message never wins.
    if ctx.signed_messages.contains(&message) {
        return Ok(TrialOutcome {
            forged: false,
            landed: false,
            extracted: false,
        });
    }
    let Ok(sig) = fs.decode_signature(&wire, &ctx.witness_free_pk, &message, &ctx.oracle) else {
        return Ok(TrialOutcome {
            forged: false,
            landed: false,
            extracted: false,
        });
    };
    let forged = fs.verify(&ctx.witness_free_pk, &message, &sig, &ctx.oracle);
    let landed = forged
        && ctx
            .sc
            .is_member(&fs.oracle_input(statement, &message, &sig.r));
    let extracted = landed && {
        let forged_transcript = Transcript {
            com: sig.com,
            ch: sig.ch,
            rsp: sig.rsp,
        };
        protocol
            .extract(statement, &star, &forged_transcript)
            .map(|w| protocol.extracted_check(statement, &w))
            .unwrap_or(false)
    };
    Ok(TrialOutcome {
        forged,
        landed,
        extracted,
    })
}
