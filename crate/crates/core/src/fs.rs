//! The signature transform for protocols with oblivious commitments.
//!
//! Signing picks a fresh nonce r, derives both the commitment and the
//! challenge from the oracle as (com, ch) = H(pk, m, r), and answers with
//! the prover. A prover abort draws a fresh r and repeats the attempt for
//! the same message. Verification recomputes (com, ch) from (pk, m, r) and
//! runs the protocol verifier, so the compact wire form only carries
//! (r, rsp).
//!
//! The reference oracle is SHAKE-256, making test vectors bit-exact.

use rand::Rng;
use thiserror::Error;

use crate::bits::BitString;
use crate::error::SigmaError;
use crate::oracle::{RandomOracle, XofOracle};
use crate::sigma::{InstanceGenerator, ObliviousCommitments, SigmaProtocol, StatementWitnessPair};

/// Compact wire form marker: version byte, then tag, r, and the response.
pub const WIRE_COMPACT: u8 = 0x01;
/// Full wire form marker; keeps com and ch alongside, for debugging.
pub const WIRE_FULL: u8 = 0x02;
const KEY_HEADER_VERIFYING: u8 = 0x03;
const KEY_HEADER_SIGNING: u8 = 0x04;

/// Errors of the signature layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FsError {
    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),
    #[error("signing retry budget of {budget} attempts exhausted")]
    AbortRetryExceeded { budget: usize },
    #[error("decode error at byte {offset}: {reason}")]
    Decode { offset: usize, reason: &'static str },
    #[error("oracle output length {got}, scheme needs {expected}")]
    OracleLength { expected: usize, got: usize },
    #[error(transparent)]
    Sigma(#[from] SigmaError),
}

/// Signing key: the statement/witness pair.
#[derive(Clone)]
pub struct SigningKey<P: SigmaProtocol> {
    pair: StatementWitnessPair<P>,
}

impl<P: SigmaProtocol> SigningKey<P> {
    pub fn pair(&self) -> &StatementWitnessPair<P> {
        &self.pair
    }
}

/// Verifying key: the bare statement.
#[derive(Clone)]
pub struct VerifyingKey<P: SigmaProtocol> {
    statement: P::Statement,
}

impl<P: SigmaProtocol> VerifyingKey<P> {
    pub fn statement(&self) -> &P::Statement {
        &self.statement
    }
}

/// A signature (r, com, ch, rsp); the compact wire form stores (r, rsp).
pub struct Signature<P: SigmaProtocol> {
    pub r: BitString,
    pub com: P::Commitment,
    pub ch: BitString,
    pub rsp: P::Response,
}

impl<P: SigmaProtocol> Clone for Signature<P> {
    fn clone(&self) -> Self {
        Signature {
            r: self.r.clone(),
            com: self.com.clone(),
            ch: self.ch.clone(),
            rsp: self.rsp.clone(),
        }
    }
}

impl<P: SigmaProtocol> PartialEq for Signature<P> {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r && self.com == other.com && self.ch == other.ch && self.rsp == other.rsp
    }
}

impl<P: SigmaProtocol> std::fmt::Debug for Signature<P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Signature")
            .field("r", &self.r)
            .field("com", &self.com)
            .field("ch", &self.ch)
            .field("rsp", &self.rsp)
            .finish()
    }
}

/// The transform, parameterized by the underlying protocol.
#[derive(Clone)]
pub struct FiatShamir<P> {
    protocol: P,
    include_statement: bool,
    retry_budget: usize,
}

impl<P: SigmaProtocol + ObliviousCommitments> FiatShamir<P> {
    pub fn new(protocol: P) -> Self {
        FiatShamir {
            protocol,
            include_statement: true,
            retry_budget: crate::sigma::DEFAULT_RETRY_BUDGET,
        }
    }

    /// Whether the statement is hashed along with (m, r). On by default;
    /// the construction stays sound either way, so this is a config flag.
    pub fn hash_statement(mut self, include: bool) -> Self {
        self.include_statement = include;
        self
    }

    pub fn retry_budget(mut self, budget: usize) -> Self {
        self.retry_budget = budget;
        self
    }

    pub fn protocol(&self) -> &P {
        &self.protocol
    }

    /// Nonce length in bits: the scheme's security parameter.
    pub fn nonce_bits(&self) -> usize {
        self.protocol.security_param() as usize
    }

    /// Bytes of oracle output one evaluation must supply.
    pub fn oracle_output_len(&self) -> usize {
        (self.protocol.randomness_bits() + self.protocol.challenge_bits()).div_ceil(8)
    }

    /// The reference SHAKE-256 oracle sized for this scheme.
    pub fn reference_oracle(&self) -> XofOracle {
        XofOracle::reference(self.oracle_output_len())
    }

    /// Fresh keys from the instantiation's generator.
    pub fn skgen<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(SigningKey<P>, VerifyingKey<P>), FsError>
    where
        P: InstanceGenerator,
    {
        let (statement, witness) = self.protocol.generate(rng)?;
        let pair = StatementWitnessPair::new(&self.protocol, statement.clone(), witness)?;
        Ok((SigningKey { pair }, VerifyingKey { statement }))
    }

    /// Domain-separated oracle input: tag, then length-prefixed pk, m, r.
    pub fn oracle_input(&self, statement: &P::Statement, message: &[u8], r: &BitString) -> Vec<u8> {
        let pk_bytes = if self.include_statement {
            self.protocol.encode_statement(statement)
        } else {
            Vec::new()
        };
        let mut out = Vec::with_capacity(13 + pk_bytes.len() + message.len() + r.as_bytes().len());
        out.push(self.protocol.scheme_tag());
        out.extend_from_slice(&(pk_bytes.len() as u32).to_le_bytes());
        out.extend_from_slice(&pk_bytes);
        out.extend_from_slice(&(message.len() as u32).to_le_bytes());
        out.extend_from_slice(message);
        out.extend_from_slice(&(r.as_bytes().len() as u32).to_le_bytes());
        out.extend_from_slice(r.as_bytes());
        out
    }

    /// Packs (rho, ch) into one oracle value, the exact layout
    /// [`hash_to_com_ch`](Self::hash_to_com_ch) splits.
    pub fn pack_oracle_value(&self, rho: &BitString, ch: &BitString) -> Vec<u8> {
        assert_eq!(rho.bit_len(), self.protocol.randomness_bits());
        assert_eq!(ch.bit_len(), self.protocol.challenge_bits());
        let mut out = rho.concat(ch).as_bytes().to_vec();
        out.resize(self.oracle_output_len(), 0);
        out
    }

    /// Expands the oracle on (pk, m, r) and splits the stream into the
    /// commitment randomness (mapped through the commitment map) and the
    /// challenge.
    pub fn hash_to_com_ch(
        &self,
        statement: &P::Statement,
        message: &[u8],
        r: &BitString,
        oracle: &dyn RandomOracle,
    ) -> Result<(P::Commitment, BitString), FsError> {
        if oracle.output_len() != self.oracle_output_len() {
            return Err(FsError::OracleLength {
                expected: self.oracle_output_len(),
                got: oracle.output_len(),
            });
        }
        let stream = oracle.eval(&self.oracle_input(statement, message, r));
        let rho_bits = self.protocol.randomness_bits();
        let rho = BitString::from_stream_slice(&stream, 0, rho_bits);
        let ch = BitString::from_stream_slice(&stream, rho_bits, self.protocol.challenge_bits());
        let com = self.protocol.commit_from_randomness(statement, &rho)?;
        Ok((com, ch))
    }

    /// Signs a message. Prover aborts draw a fresh r and retry.
    pub fn sign<R: Rng + ?Sized>(
        &self,
        sk: &SigningKey<P>,
        message: &[u8],
        oracle: &dyn RandomOracle,
        rng: &mut R,
    ) -> Result<Signature<P>, FsError> {
        for _ in 0..self.retry_budget {
            let r = BitString::random(self.nonce_bits(), rng);
            let (com, ch) = self.hash_to_com_ch(sk.pair.statement(), message, &r, oracle)?;
            match self
                .protocol
                .respond(sk.pair.statement(), sk.pair.witness(), &com, &ch, rng)
            {
                Ok(rsp) => return Ok(Signature { r, com, ch, rsp }),
                Err(SigmaError::Abort) => continue,
                Err(e) => return Err(e.into()),
            }
        }
        Err(FsError::AbortRetryExceeded {
            budget: self.retry_budget,
        })
    }

    /// Pure verification: the hash recomputation must reproduce (com, ch)
    /// and the protocol verifier must accept.
    pub fn verify(
        &self,
        pk: &VerifyingKey<P>,
        message: &[u8],
        sig: &Signature<P>,
        oracle: &dyn RandomOracle,
    ) -> bool {
        if sig.r.bit_len() != self.nonce_bits() {
            return false;
        }
        let Ok((com, ch)) = self.hash_to_com_ch(&pk.statement, message, &sig.r, oracle) else {
            return false;
        };
        com == sig.com && ch == sig.ch && self.protocol.verify(&pk.statement, &com, &ch, &sig.rsp)
    }

    pub fn verifying_key(&self, statement: P::Statement) -> VerifyingKey<P> {
        VerifyingKey { statement }
    }

    pub fn signing_key(
        &self,
        statement: P::Statement,
        witness: P::Witness,
    ) -> Result<SigningKey<P>, FsError> {
        Ok(SigningKey {
            pair: StatementWitnessPair::new(&self.protocol, statement, witness)?,
        })
    }

    // ---- wire format ----

    /// Compact: 0x01 | tag | r | le32(|rsp|) | rsp.
    /// Full: 0x02 | tag | r | le32(|com|) | com | ch | le32(|rsp|) | rsp.
    pub fn encode_signature(&self, sig: &Signature<P>, compact: bool) -> Vec<u8> {
        let mut out = Vec::new();
        out.push(if compact { WIRE_COMPACT } else { WIRE_FULL });
        out.push(self.protocol.scheme_tag());
        out.extend_from_slice(sig.r.as_bytes());
        if !compact {
            let com = self.protocol.encode_commitment(&sig.com);
            out.extend_from_slice(&(com.len() as u32).to_le_bytes());
            out.extend_from_slice(&com);
            out.extend_from_slice(sig.ch.as_bytes());
        }
        let rsp = self.protocol.encode_response(&sig.rsp);
        out.extend_from_slice(&(rsp.len() as u32).to_le_bytes());
        out.extend_from_slice(&rsp);
        out
    }

    /// Decodes either wire form; the compact form recomputes (com, ch)
    /// through the oracle.
    pub fn decode_signature(
        &self,
        bytes: &[u8],
        pk: &VerifyingKey<P>,
        message: &[u8],
        oracle: &dyn RandomOracle,
    ) -> Result<Signature<P>, FsError> {
        let mut off = 0usize;
        let version = *bytes.get(off).ok_or(FsError::Decode {
            offset: 0,
            reason: "empty buffer",
        })?;
        if version != WIRE_COMPACT && version != WIRE_FULL {
            return Err(FsError::Decode {
                offset: 0,
                reason: "unknown wire version",
            });
        }
        off += 1;
        let tag = *bytes.get(off).ok_or(FsError::Decode {
            offset: 1,
            reason: "missing scheme tag",
        })?;
        if tag != self.protocol.scheme_tag() {
            return Err(FsError::Decode {
                offset: 1,
                reason: "scheme tag mismatch",
            });
        }
        off += 1;
        let r_len = self.nonce_bits().div_ceil(8);
        let r_bytes = bytes.get(off..off + r_len).ok_or(FsError::Decode {
            offset: off,
            reason: "truncated nonce",
        })?;
        let r = BitString::from_bytes(r_bytes, self.nonce_bits());
        if r.as_bytes() != r_bytes {
            return Err(FsError::Decode {
                offset: off,
                reason: "nonce padding bits set",
            });
        }
        off += r_len;

        let (com, ch) = if version == WIRE_COMPACT {
            self.hash_to_com_ch(&pk.statement, message, &r, oracle)?
        } else {
            let com_len = read_le32(bytes, &mut off)?;
            let com_bytes = bytes.get(off..off + com_len).ok_or(FsError::Decode {
                offset: off,
                reason: "truncated commitment",
            })?;
            let com = self
                .protocol
                .decode_commitment(com_bytes)
                .map_err(|_| FsError::Decode {
                    offset: off,
                    reason: "bad commitment",
                })?;
            off += com_len;
            let ch_len = self.protocol.challenge_bits().div_ceil(8);
            let ch_bytes = bytes.get(off..off + ch_len).ok_or(FsError::Decode {
                offset: off,
                reason: "truncated challenge",
            })?;
            let ch = BitString::from_bytes(ch_bytes, self.protocol.challenge_bits());
            off += ch_len;
            (com, ch)
        };

        let rsp_len = read_le32(bytes, &mut off)?;
        let rsp_bytes = bytes.get(off..off + rsp_len).ok_or(FsError::Decode {
            offset: off,
            reason: "truncated response",
        })?;
        let rsp = self
            .protocol
            .decode_response(rsp_bytes)
            .map_err(|_| FsError::Decode {
                offset: off,
                reason: "bad response",
            })?;
        off += rsp_len;
        if off != bytes.len() {
            return Err(FsError::Decode {
                offset: off,
                reason: "trailing bytes",
            });
        }
        Ok(Signature { r, com, ch, rsp })
    }

    // ---- key files: lowercase hex, one value per line, # comments ----

    pub fn encode_verifying_key_text(&self, pk: &VerifyingKey<P>) -> String {
        let mut out = String::from("# verifying key\n");
        out.push_str(&format!(
            "{}\n",
            hex(&[KEY_HEADER_VERIFYING, self.protocol.scheme_tag()])
        ));
        out.push_str(&format!(
            "{}\n",
            hex(&self.protocol.encode_statement(&pk.statement))
        ));
        out
    }

    pub fn encode_signing_key_text(&self, sk: &SigningKey<P>) -> String {
        let mut out = String::from("# signing key\n");
        out.push_str(&format!(
            "{}\n",
            hex(&[KEY_HEADER_SIGNING, self.protocol.scheme_tag()])
        ));
        out.push_str(&format!(
            "{}\n",
            hex(&self.protocol.encode_statement(sk.pair.statement()))
        ));
        out.push_str(&format!(
            "{}\n",
            hex(&self.protocol.encode_witness(sk.pair.witness()))
        ));
        out
    }

    pub fn decode_verifying_key_text(&self, text: &str) -> Result<VerifyingKey<P>, FsError> {
        let values = hex_lines(text)?;
        if values.len() != 2 {
            return Err(FsError::Decode {
                offset: 0,
                reason: "verifying key needs two values",
            });
        }
        self.check_key_header(&values[0], KEY_HEADER_VERIFYING)?;
        let statement =
            self.protocol
                .decode_statement(&values[1])
                .map_err(|_| FsError::Decode {
                    offset: 0,
                    reason: "bad statement",
                })?;
        Ok(VerifyingKey { statement })
    }

    pub fn decode_signing_key_text(&self, text: &str) -> Result<SigningKey<P>, FsError> {
        let values = hex_lines(text)?;
        if values.len() != 3 {
            return Err(FsError::Decode {
                offset: 0,
                reason: "signing key needs three values",
            });
        }
        self.check_key_header(&values[0], KEY_HEADER_SIGNING)?;
        let statement =
            self.protocol
                .decode_statement(&values[1])
                .map_err(|_| FsError::Decode {
                    offset: 0,
                    reason: "bad statement",
                })?;
        let witness = self
            .protocol
            .decode_witness(&statement, &values[2])
            .map_err(|_| FsError::Decode {
                offset: 0,
                reason: "bad witness",
            })?;
        Ok(SigningKey {
            pair: StatementWitnessPair::new(&self.protocol, statement, witness)?,
        })
    }

    fn check_key_header(&self, header: &[u8], kind: u8) -> Result<(), FsError> {
        if header != [kind, self.protocol.scheme_tag()] {
            return Err(FsError::Decode {
                offset: 0,
                reason: "key header mismatch",
            });
        }
        Ok(())
    }
}

fn read_le32(bytes: &[u8], off: &mut usize) -> Result<usize, FsError> {
    let slice = bytes.get(*off..*off + 4).ok_or(FsError::Decode {
        offset: *off,
        reason: "truncated length field",
    })?;
    let v = u32::from_le_bytes(slice.try_into().unwrap()) as usize;
    *off += 4;
    Ok(v)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn hex_lines(text: &str) -> Result<Vec<Vec<u8>>, FsError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.len() % 2 != 0 || !line.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(FsError::Decode {
                offset: 0,
                reason: "bad hex line",
            });
        }
        let bytes = (0..line.len() / 2)
            .map(|i| u8::from_str_radix(&line[2 * i..2 * i + 2], 16).unwrap())
            .collect();
        out.push(bytes);
    }
    Ok(out)
}
