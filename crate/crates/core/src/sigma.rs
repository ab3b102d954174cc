//! The three-move public-coin protocol abstraction.
//!
//! A [`SigmaProtocol`] fixes a statement/witness relation together with the
//! four contracts every instantiation must honor: completeness, a uniform
//! challenge, special soundness (two accepting transcripts on one commitment
//! yield a witness) and honest-verifier zero-knowledge. Challenges are bit
//! strings of the scheme's declared length; instantiations interpret them.
//!
//! [`ObliviousCommitments`] is the extra interface that lets a hash oracle
//! stand in for the verifier: a deterministic map from public randomness to
//! commitments together with a randomness re-sampler that inverts it.

use rand::Rng;

use crate::bits::BitString;
use crate::error::SigmaError;

/// Retry budget for instantiations whose prover can abort.
pub const DEFAULT_RETRY_BUDGET: usize = 64;

/// A three-move protocol for an NP relation, with canonical byte encodings.
///
/// Encodings must be injective; variable-length components carry their own
/// length prefixes inside the instantiation's encoding.
pub trait SigmaProtocol {
    type Statement: Clone + Send + Sync;
    type Witness: Clone + Send + Sync;
    type Commitment: Clone + PartialEq + std::fmt::Debug + Send + Sync;
    type Response: Clone + PartialEq + std::fmt::Debug + Send + Sync;
    /// What the special-soundness extractor produces.
    type Extracted: Clone + std::fmt::Debug;

    /// One-byte tag identifying the instantiation on the wire.
    fn scheme_tag(&self) -> u8;

    /// Challenge length in bits.
    fn challenge_bits(&self) -> usize;

    /// Security parameter of this instantiation.
    fn security_param(&self) -> u32;

    fn relation_check(&self, statement: &Self::Statement, witness: &Self::Witness) -> bool;

    /// First message of an interactive run, produced without the witness.
    fn honest_commit<R: Rng + ?Sized>(
        &self,
        statement: &Self::Statement,
        rng: &mut R,
    ) -> Self::Commitment;

    /// Prover's answer to a commitment and challenge.
    ///
    /// Returns [`SigmaError::Abort`] when rejection sampling rejects; the
    /// caller retries with a fresh commitment.
    fn respond<R: Rng + ?Sized>(
        &self,
        statement: &Self::Statement,
        witness: &Self::Witness,
        commitment: &Self::Commitment,
        challenge: &BitString,
        rng: &mut R,
    ) -> Result<Self::Response, SigmaError>;

    fn verify(
        &self,
        statement: &Self::Statement,
        commitment: &Self::Commitment,
        challenge: &BitString,
        response: &Self::Response,
    ) -> bool;

    /// Honest-verifier zero-knowledge simulator.
    ///
    /// Aborting instantiations return [`SigmaError::Abort`] with the same
    /// probability as the real prover.
    fn simulate<R: Rng + ?Sized>(
        &self,
        statement: &Self::Statement,
        rng: &mut R,
    ) -> Result<Transcript<Self::Commitment, Self::Response>, SigmaError>;

    /// Special-soundness extractor on two accepting transcripts that share
    /// a commitment but differ in challenge.
    fn extract(
        &self,
        statement: &Self::Statement,
        first: &Transcript<Self::Commitment, Self::Response>,
        second: &Transcript<Self::Commitment, Self::Response>,
    ) -> Result<Self::Extracted, SigmaError>;

    /// The relation the extractor targets.
    fn extracted_check(&self, statement: &Self::Statement, extracted: &Self::Extracted) -> bool;

    fn encode_statement(&self, statement: &Self::Statement) -> Vec<u8>;
    fn decode_statement(&self, bytes: &[u8]) -> Result<Self::Statement, SigmaError>;
    fn encode_witness(&self, witness: &Self::Witness) -> Vec<u8>;
    /// Witness decoding may rebuild derived data against the statement.
    fn decode_witness(
        &self,
        statement: &Self::Statement,
        bytes: &[u8],
    ) -> Result<Self::Witness, SigmaError>;
    fn encode_commitment(&self, commitment: &Self::Commitment) -> Vec<u8>;
    fn decode_commitment(&self, bytes: &[u8]) -> Result<Self::Commitment, SigmaError>;
    fn encode_response(&self, response: &Self::Response) -> Vec<u8>;
    fn decode_response(&self, bytes: &[u8]) -> Result<Self::Response, SigmaError>;
}

/// Oblivious commitments: a deterministic commitment map on public
/// randomness and a right-inverse sampler, statistically indistinguishable
/// from honest runs.
pub trait ObliviousCommitments: SigmaProtocol {
    /// Bit length of the commitment randomness.
    fn randomness_bits(&self) -> usize;

    /// The commitment map; deterministic in `(statement, rho)`.
    fn commit_from_randomness(
        &self,
        statement: &Self::Statement,
        rho: &BitString,
    ) -> Result<Self::Commitment, SigmaError>;

    /// Samples randomness that reproduces `commitment` under the map.
    ///
    /// Fails with [`SigmaError::NotInRange`] when the commitment is outside
    /// the map's image.
    fn sample_randomness<R: Rng + ?Sized>(
        &self,
        statement: &Self::Statement,
        commitment: &Self::Commitment,
        rng: &mut R,
    ) -> Result<BitString, SigmaError>;
}

/// Instance generator for the scheme's relation.
pub trait InstanceGenerator: SigmaProtocol {
    fn generate<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(Self::Statement, Self::Witness), SigmaError>;
}

/// One protocol run: commitment, challenge, response.
#[derive(Clone, Debug, PartialEq)]
pub struct Transcript<C, Z> {
    pub com: C,
    pub ch: BitString,
    pub rsp: Z,
}

/// Transcript type of a protocol `P`.
pub type SchemeTranscript<P> =
    Transcript<<P as SigmaProtocol>::Commitment, <P as SigmaProtocol>::Response>;

/// A statement with its witness, validated against the relation at
/// construction. Statement encoders never touch the witness field.
pub struct StatementWitnessPair<P: SigmaProtocol> {
    statement: P::Statement,
    witness: P::Witness,
    security_param: u32,
}

impl<P: SigmaProtocol> Clone for StatementWitnessPair<P> {
    fn clone(&self) -> Self {
        StatementWitnessPair {
            statement: self.statement.clone(),
            witness: self.witness.clone(),
            security_param: self.security_param,
        }
    }
}

impl<P: SigmaProtocol> StatementWitnessPair<P> {
    pub fn new(
        scheme: &P,
        statement: P::Statement,
        witness: P::Witness,
    ) -> Result<Self, SigmaError> {
        if !scheme.relation_check(&statement, &witness) {
            return Err(SigmaError::NotVerifying);
        }
        Ok(StatementWitnessPair {
            statement,
            witness,
            security_param: scheme.security_param(),
        })
    }

    pub fn statement(&self) -> &P::Statement {
        &self.statement
    }

    pub fn witness(&self) -> &P::Witness {
        &self.witness
    }

    pub fn security_param(&self) -> u32 {
        self.security_param
    }
}

/// Runs the interactive protocol honestly: commitment, uniform challenge,
/// response. Aborting provers are retried with a fresh exchange up to the
/// default budget.
pub fn run_honest<P: SigmaProtocol, R: Rng + ?Sized>(
    scheme: &P,
    pair: &StatementWitnessPair<P>,
    rng: &mut R,
) -> Result<SchemeTranscript<P>, SigmaError> {
    run_honest_with_budget(scheme, pair, DEFAULT_RETRY_BUDGET, rng)
}

pub fn run_honest_with_budget<P: SigmaProtocol, R: Rng + ?Sized>(
    scheme: &P,
    pair: &StatementWitnessPair<P>,
    budget: usize,
    rng: &mut R,
) -> Result<SchemeTranscript<P>, SigmaError> {
    for _ in 0..budget {
        let com = scheme.honest_commit(pair.statement(), rng);
        let ch = BitString::random(scheme.challenge_bits(), rng);
        match scheme.respond(pair.statement(), pair.witness(), &com, &ch, rng) {
            Ok(rsp) => return Ok(Transcript { com, ch, rsp }),
            Err(SigmaError::Abort) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(SigmaError::AbortRetryExceeded { budget })
}

/// Answers two distinct challenges on one shared commitment, the raw
/// material of special soundness.
pub fn fork_run<P: SigmaProtocol, R: Rng + ?Sized>(
    scheme: &P,
    pair: &StatementWitnessPair<P>,
    com: &P::Commitment,
    ch1: &BitString,
    ch2: &BitString,
    rng: &mut R,
) -> Result<(SchemeTranscript<P>, SchemeTranscript<P>), SigmaError> {
    if ch1 == ch2 {
        return Err(SigmaError::SameChallenge);
    }
    let rsp1 = respond_with_retries(scheme, pair, com, ch1, rng)?;
    let rsp2 = respond_with_retries(scheme, pair, com, ch2, rng)?;
    Ok((
        Transcript {
            com: com.clone(),
            ch: ch1.clone(),
            rsp: rsp1,
        },
        Transcript {
            com: com.clone(),
            ch: ch2.clone(),
            rsp: rsp2,
        },
    ))
}

fn respond_with_retries<P: SigmaProtocol, R: Rng + ?Sized>(
    scheme: &P,
    pair: &StatementWitnessPair<P>,
    com: &P::Commitment,
    ch: &BitString,
    rng: &mut R,
) -> Result<P::Response, SigmaError> {
    for _ in 0..DEFAULT_RETRY_BUDGET {
        match scheme.respond(pair.statement(), pair.witness(), com, ch, rng) {
            Ok(rsp) => return Ok(rsp),
            Err(SigmaError::Abort) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(SigmaError::AbortRetryExceeded {
        budget: DEFAULT_RETRY_BUDGET,
    })
}

/// Evaluates the commitment map after checking the randomness length.
pub fn oblivious_commit<P: ObliviousCommitments>(
    scheme: &P,
    statement: &P::Statement,
    rho: &BitString,
) -> Result<P::Commitment, SigmaError> {
    if rho.bit_len() != scheme.randomness_bits() {
        return Err(SigmaError::BadRandomnessLength {
            expected: scheme.randomness_bits(),
            got: rho.bit_len(),
        });
    }
    scheme.commit_from_randomness(statement, rho)
}

/// Samples randomness reproducing `com`; a right inverse of the commitment
/// map on its image.
pub fn sample_rnd<P: ObliviousCommitments, R: Rng + ?Sized>(
    scheme: &P,
    statement: &P::Statement,
    com: &P::Commitment,
    rng: &mut R,
) -> Result<BitString, SigmaError> {
    scheme.sample_randomness(statement, com, rng)
}
