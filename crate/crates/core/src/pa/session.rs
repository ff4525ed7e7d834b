//! Party state machines, adversaries and the local session runner.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::bits::mask;
use crate::dist::WeakSourceSpec;
use crate::error::{Error, Result};
use crate::ff::encode_bits;
use crate::mac::{mac_tag, mac_verify, MacKey};
use crate::xtr::{ip_ext, nm_ext, trevisan_ext, truncate};

use super::ProtocolParams;

/// Deterministic per-session RNG: one stream per sampled quantity so local
/// and networked runs agree bit for bit.
pub fn derive_rng(seed: u64, session: u64, stream: u64) -> ChaCha12Rng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&session.to_le_bytes());
    bytes[16..24].copy_from_slice(&stream.to_le_bytes());
    ChaCha12Rng::from_seed(bytes)
}

/// Alice's retained state between the two rounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliceState {
    pub x: u64,
    pub a: u64,
}

/// Round 1: Alice samples A and sends it in the clear.
pub fn alice_round1(params: &ProtocolParams, x: u64, a: u64) -> Result<(u64, AliceState)> {
    check_width(x, params.n)?;
    check_width(a, params.a_bits)?;
    Ok((a, AliceState { x, a }))
}

/// The shared key-derivation core: S = truncate_2m(nmExt(X, A)).
fn derive_s(params: &ProtocolParams, x: u64, a: u64) -> Result<u64> {
    let p = params.nmext.p;
    let xv = encode_bits(x, params.n, p, params.nmext.n)?;
    // A encodes into the extension field GF(p^(n_vec/2)); digits are
    // reversed into low-coefficient-first order
    let k = params.nmext.n / 2;
    let mut yv = encode_bits(a, params.a_bits, p, k)?;
    yv.reverse();
    let z = nm_ext(&params.nmext, &xv, &yv)?;
    Ok(truncate(z, 2 * params.m))
}

/// W' = truncate_m(IP_q(X, B)).
fn derive_w(params: &ProtocolParams, x: u64, b: u64) -> Result<u64> {
    let field = crate::ff::PrimeField::new(params.ext_q)?;
    let xv = encode_bits(x, params.n, params.ext_q, params.ext_digits)?;
    let bv = encode_bits(b, params.b_bits, params.ext_q, params.ext_digits)?;
    let z = ip_ext(&field, &xv, &bv)?;
    Ok(truncate(z, params.m))
}

/// Bob's single round: derive S' from the received A', extract W' from his
/// local sample, authenticate, and emit his key. Bob never rejects.
pub fn bob_round(
    params: &ProtocolParams,
    x: u64,
    a_received: u64,
    b: u64,
) -> Result<(u64, u64, u64, u64)> {
    check_width(x, params.n)?;
    check_width(a_received, params.a_bits)?;
    check_width(b, params.b_bits)?;
    let s_prime = derive_s(params, x, a_received)?;
    let w_prime = derive_w(params, x, b)?;
    let key = MacKey::from_word(&params.mac, s_prime)?;
    let t_prime = mac_tag(&params.mac, &key, w_prime);
    let r_b = trevisan_ext(x, w_prime, &params.tre)?;
    Ok((w_prime, t_prime, r_b, s_prime))
}

/// Alice's finish: verify the tag under her own key and either reject or
/// extract. Returns (S, R_A).
pub fn alice_finish(
    params: &ProtocolParams,
    state: &AliceState,
    w: u64,
    t: u64,
) -> Result<(u64, Option<u64>)> {
    check_width(w, params.m)?;
    check_width(t, params.m)?;
    let s = derive_s(params, state.x, state.a)?;
    let key = MacKey::from_word(&params.mac, s)?;
    if !mac_verify(&params.mac, &key, w, t) {
        return Ok((s, None));
    }
    Ok((s, Some(trevisan_ext(state.x, w, &params.tre)?)))
}

fn check_width(v: u64, width: usize) -> Result<()> {
    if width < 64 && v >> width != 0 {
        return Err(Error::ElementOutOfRange(v));
    }
    Ok(())
}

/// Full record of one session; everything needed to replay both parties.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionOutcome {
    pub session: u64,
    pub seed: u64,
    pub x: u64,
    pub a: u64,
    pub b: u64,
    /// A' as received by Bob.
    pub a_received: u64,
    /// Bob's outgoing message.
    pub w_prime: u64,
    pub t_prime: u64,
    /// Alice's received message.
    pub w: u64,
    pub t: u64,
    /// The 2m-bit keys.
    pub s: u64,
    pub s_prime: u64,
    pub r_a: Option<u64>,
    pub r_b: u64,
    pub correct: bool,
    pub robust_violation: bool,
}

impl SessionOutcome {
    pub fn csv_header() -> &'static str {
        "session,seed,x,a,a_received,b,w_prime,t_prime,w,t,s,s_prime,r_a,r_b,correct,robust_violation"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:#x},{:#x},{:#x},{:#x},{:#x},{:#x},{:#x},{:#x},{:#x},{:#x},{},{:#x},{},{}",
            self.session,
            self.seed,
            self.x,
            self.a,
            self.a_received,
            self.b,
            self.w_prime,
            self.t_prime,
            self.w,
            self.t,
            self.s,
            self.s_prime,
            self.r_a.map_or_else(|| "reject".to_string(), |r| format!("{r:#x}")),
            self.r_b,
            self.correct,
            self.robust_violation
        )
    }
}

/// An active adversary: arbitrary stateful tampering of both messages.
pub trait Adversary: Send {
    fn tamper1(&mut self, a: u64, a_bits: usize) -> u64;
    fn tamper2(&mut self, w: u64, t: u64, m: usize) -> (u64, u64);
    fn name(&self) -> &'static str;
}

pub type AdversaryBox = Box<dyn Adversary>;

/// Passive channel.
pub struct Identity;

impl Adversary for Identity {
    fn tamper1(&mut self, a: u64, _: usize) -> u64 {
        a
    }
    fn tamper2(&mut self, w: u64, t: u64, _: usize) -> (u64, u64) {
        (w, t)
    }
    fn name(&self) -> &'static str {
        "identity"
    }
}

/// Replaces msg1 by a constant (bit-flipped when it happens to match, so the
/// substitution is always a genuine change).
struct SubstituteMsg1 {
    constant: u64,
}

impl Adversary for SubstituteMsg1 {
    fn tamper1(&mut self, a: u64, _: usize) -> u64 {
        if a == self.constant {
            self.constant ^ 1
        } else {
            self.constant
        }
    }
    fn tamper2(&mut self, w: u64, t: u64, _: usize) -> (u64, u64) {
        (w, t)
    }
    fn name(&self) -> &'static str {
        "substitute-msg1"
    }
}

/// Flips bit 0 of the W half of msg2.
struct FlipMsg2Bit0;

impl Adversary for FlipMsg2Bit0 {
    fn tamper1(&mut self, a: u64, _: usize) -> u64 {
        a
    }
    fn tamper2(&mut self, w: u64, t: u64, _: usize) -> (u64, u64) {
        (w ^ 1, t)
    }
    fn name(&self) -> &'static str {
        "flip-msg2-bit0"
    }
}

/// Replays the previous session's msg2 (first session passes through).
struct ReplayMsg2 {
    last: Option<(u64, u64)>,
}

impl Adversary for ReplayMsg2 {
    fn tamper1(&mut self, a: u64, _: usize) -> u64 {
        a
    }
    fn tamper2(&mut self, w: u64, t: u64, _: usize) -> (u64, u64) {
        let out = self.last.unwrap_or((w, t));
        self.last = Some((w, t));
        out
    }
    fn name(&self) -> &'static str {
        "replay-msg2"
    }
}

/// Random substitution of both messages.
struct RandomBoth {
    rng: ChaCha12Rng,
}

impl Adversary for RandomBoth {
    fn tamper1(&mut self, _: u64, a_bits: usize) -> u64 {
        mask(self.rng.next_u64(), a_bits)
    }
    fn tamper2(&mut self, _: u64, _: u64, m: usize) -> (u64, u64) {
        (mask(self.rng.next_u64(), m), mask(self.rng.next_u64(), m))
    }
    fn name(&self) -> &'static str {
        "random-both"
    }
}

/// The registered adversary profile names.
pub const ADVERSARY_NAMES: &[&str] =
    &["identity", "substitute-msg1", "flip-msg2-bit0", "replay-msg2", "random-both"];

/// Instantiates a named adversary profile.
pub fn adversary_by_name(name: &str, seed: u64) -> Result<AdversaryBox> {
    match name {
        "identity" => Ok(Box::new(Identity)),
        "substitute-msg1" | "constant-substitute-msg1" => {
            Ok(Box::new(SubstituteMsg1 { constant: 0 }))
        }
        "flip-msg2-bit0" | "flip-msg2-bit" => Ok(Box::new(FlipMsg2Bit0)),
        "replay-msg2" => Ok(Box::new(ReplayMsg2 { last: None })),
        "random-both" => Ok(Box::new(RandomBoth { rng: derive_rng(seed, u64::MAX, 0xadde) })),
        other => Err(Error::InvalidParameter(format!(
            "unknown adversary {other:?} (known: {})",
            ADVERSARY_NAMES.join(", ")
        ))),
    }
}

/// Samples (X, A, B) for one session. Stream assignment: 0 = X, 1 = A,
/// 2 = B.
pub fn sample_inputs(
    x_src: &WeakSourceSpec,
    a_src: &WeakSourceSpec,
    b_src: &WeakSourceSpec,
    seed: u64,
    session: u64,
) -> (u64, u64, u64) {
    let x = x_src.sample(&mut derive_rng(seed, session, 0));
    let a = a_src.sample(&mut derive_rng(seed, session, 1));
    let b = b_src.sample(&mut derive_rng(seed, session, 2));
    (x, a, b)
}

/// Runs one full session in process, routing both messages through the
/// adversary.
pub fn run_session(
    params: &ProtocolParams,
    x_src: &WeakSourceSpec,
    a_src: &WeakSourceSpec,
    b_src: &WeakSourceSpec,
    adv: &mut dyn Adversary,
    seed: u64,
    session: u64,
) -> Result<SessionOutcome> {
    let (x, a, b) = sample_inputs(x_src, a_src, b_src, seed, session);
    let (msg1, state) = alice_round1(params, x, a)?;
    let a_received = adv.tamper1(msg1, params.a_bits);
    let (w_prime, t_prime, r_b, s_prime) = bob_round(params, x, a_received, b)?;
    let (w, t) = adv.tamper2(w_prime, t_prime, params.m);
    let (s, r_a) = alice_finish(params, &state, w, t)?;
    let correct = r_a == Some(r_b);
    let robust_violation = matches!(r_a, Some(ra) if ra != r_b);
    Ok(SessionOutcome {
        session,
        seed,
        x,
        a,
        b,
        a_received,
        w_prime,
        t_prime,
        w,
        t,
        s,
        s_prime,
        r_a,
        r_b,
        correct,
        robust_violation,
    })
}

/// Default local sources for a profile: uniform A and B.
pub fn default_sources(params: &ProtocolParams) -> (WeakSourceSpec, WeakSourceSpec, WeakSourceSpec) {
    (
        WeakSourceSpec::uniform(1u64 << params.n),
        WeakSourceSpec::uniform(1u64 << params.a_bits),
        WeakSourceSpec::uniform(1u64 << params.b_bits),
    )
}
