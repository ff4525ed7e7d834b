//! Networked roles: Alice and Bob speaking the wire format over TCP, one
//! session per connection, and the MITM proxy that applies an adversary to
//! the byte stream after de-framing.

use std::net::{TcpListener, TcpStream};

use crate::dist::WeakSourceSpec;
use crate::error::{Error, Result};

use super::session::{
    alice_finish, alice_round1, bob_round, sample_inputs, Adversary, SessionOutcome,
};
use super::wire::{read_frame, write_frame, Frame};
use super::ProtocolParams;

/// Shared run configuration for the networked roles. Both endpoints derive
/// X from the same (seed, session) stream, standing in for the out-of-band
/// shared secret.
#[derive(Debug, Clone)]
pub struct NetConfig {
    pub params: ProtocolParams,
    pub x_src: WeakSourceSpec,
    pub a_src: WeakSourceSpec,
    pub b_src: WeakSourceSpec,
    pub seed: u64,
    pub sessions: u64,
}

/// Alice: connects once per session, sends msg1, waits for msg2, finishes.
pub fn run_alice(addr: &str, cfg: &NetConfig) -> Result<Vec<SessionOutcome>> {
    let mut outcomes = Vec::with_capacity(cfg.sessions as usize);
    for session in 0..cfg.sessions {
        let (x, a, _) = sample_inputs(&cfg.x_src, &cfg.a_src, &cfg.b_src, cfg.seed, session);
        let mut stream =
            TcpStream::connect(addr).map_err(|e| Error::Transport(e.to_string()))?;
        let (msg1, state) = alice_round1(&cfg.params, x, a)?;
        write_frame(&mut stream, &Frame::msg1(msg1, cfg.params.a_bits))?;
        let frame = read_frame(&mut stream)?;
        let (w, t) = frame.parse_msg2(cfg.params.m)?;
        let (s, r_a) = alice_finish(&cfg.params, &state, w, t)?;
        outcomes.push(SessionOutcome {
            session,
            seed: cfg.seed,
            x,
            a,
            b: 0,
            a_received: 0,
            w_prime: 0,
            t_prime: 0,
            w,
            t,
            s,
            s_prime: 0,
            r_a,
            r_b: 0,
            correct: false,
            robust_violation: false,
        });
    }
    Ok(outcomes)
}

/// Bob: accepts one connection per session, reads msg1, answers msg2.
pub fn run_bob(listener: &TcpListener, cfg: &NetConfig) -> Result<Vec<SessionOutcome>> {
    let mut outcomes = Vec::with_capacity(cfg.sessions as usize);
    for session in 0..cfg.sessions {
        let (mut stream, _) = listener.accept().map_err(|e| Error::Transport(e.to_string()))?;
        let (x, _, b) = sample_inputs(&cfg.x_src, &cfg.a_src, &cfg.b_src, cfg.seed, session);
        let frame = read_frame(&mut stream)?;
        let a_received = frame.parse_msg1(cfg.params.a_bits)?;
        let (w_prime, t_prime, r_b, s_prime) = bob_round(&cfg.params, x, a_received, b)?;
        write_frame(&mut stream, &Frame::msg2(w_prime, t_prime, cfg.params.m))?;
        outcomes.push(SessionOutcome {
            session,
            seed: cfg.seed,
            x,
            a: 0,
            b,
            a_received,
            w_prime,
            t_prime,
            w: 0,
            t: 0,
            s: 0,
            s_prime,
            r_a: None,
            r_b,
            correct: false,
            robust_violation: false,
        });
    }
    Ok(outcomes)
}

/// MITM proxy: de-frames each message, hands the parsed fields to the
/// adversary, re-frames, forwards. One proxied session per accepted
/// connection.
pub fn run_mitm(
    listener: &TcpListener,
    upstream: &str,
    params: &ProtocolParams,
    adv: &mut dyn Adversary,
    sessions: u64,
) -> Result<()> {
    for _ in 0..sessions {
        let (mut client, _) = listener.accept().map_err(|e| Error::Transport(e.to_string()))?;
        let mut server =
            TcpStream::connect(upstream).map_err(|e| Error::Transport(e.to_string()))?;
        // msg1: client -> server
        let frame = read_frame(&mut client)?;
        let a = frame.parse_msg1(params.a_bits)?;
        let a_tampered = adv.tamper1(a, params.a_bits);
        write_frame(&mut server, &Frame::msg1(a_tampered, params.a_bits))?;
        // msg2: server -> client
        let frame = read_frame(&mut server)?;
        let (w, t) = frame.parse_msg2(params.m)?;
        let (w2, t2) = adv.tamper2(w, t, params.m);
        write_frame(&mut client, &Frame::msg2(w2, t2, params.m))?;
    }
    Ok(())
}
