//! The two-round privacy-amplification protocol with weak local sources,
//! as explicit party state machines plus a pluggable active adversary, a
//! session runner, the wire format for networked runs, and the extraction
//! audit.
//!
//! One session, with shared secret X and local samples A (Alice) and B
//! (Bob):
//!
//! ```text
//! Alice                             Bob
//!   msg1 = A          ---->           (receives A')
//!   S = nmExt(X, A)                 S' = nmExt(X, A')
//!                                   W' = Ext(X, B)
//!   (receives W, T)    <----        msg2 = (W', T' = MAC_S'(W'))
//!   reject if T != MAC_S(W)         R_B = Tre(X, W')
//!   else R_A = Tre(X, W)
//! ```
//!
//! Bob has no reject branch; Alice outputs the bottom symbol on MAC
//! failure. Field outputs are truncated to bit strings per the recorded
//! truncation rule (the field sizes keep the bias under 2^-8 per point).

mod audit;
mod net;
mod session;
mod wire;

pub use audit::{extraction_audit, AuditReport};
pub use net::{run_alice, run_bob, run_mitm, NetConfig};
pub use session::{
    adversary_by_name, alice_finish, alice_round1, bob_round, default_sources, derive_rng,
    run_session, Adversary, AdversaryBox, AliceState, Identity, SessionOutcome, ADVERSARY_NAMES,
};
pub use wire::{read_frame, write_frame, Frame, MsgType, WIRE_VERSION};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{next_prime, Gf2m};
use crate::xtr::{NmExtParams, TrevisanParams};

/// All primitive parameters of one protocol instantiation.
///
/// Width plumbing: nmExt output is truncated to 2m bits (the MAC key), the
/// W' extractor output to m bits (the MAC message and the Trevisan seed:
/// d = m), and Tre emits the final l-bit keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolParams {
    pub name: String,
    /// Shared secret length in bits.
    pub n: usize,
    /// Alice's local sample length (n/2).
    pub a_bits: usize,
    /// Bob's local sample length (n).
    pub b_bits: usize,
    /// MAC width = message width = Trevisan seed width.
    pub m: usize,
    /// Final key length.
    pub l: usize,
    pub nmext: NmExtParams,
    /// Prime for the W' inner-product extractor (q > 2^(m+8)).
    pub ext_q: u64,
    /// Vector length of the W' extractor.
    pub ext_digits: usize,
    pub tre: TrevisanParams,
    pub mac: Gf2m,
}

impl ProtocolParams {
    /// Validates the width plumbing between the primitives and re-verifies
    /// the constructions themselves, since profile records may arrive from
    /// JSON files rather than the builders.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > 64 || self.n % 2 != 0 {
            return Err(Error::InvalidParameter("n must be even and at most 64".into()));
        }
        if !crate::ff::is_prime(self.nmext.p) {
            return Err(Error::NotPrime(self.nmext.p));
        }
        if !crate::ff::is_prime(self.ext_q) {
            return Err(Error::NotPrime(self.ext_q));
        }
        // irreducibility of the extension modulus and the MAC polynomial
        self.nmext.ext_field()?;
        Gf2m::new(self.mac.width(), self.mac.poly())?;
        self.tre.validate()?;
        if self.a_bits != self.n / 2 || self.b_bits != self.n {
            return Err(Error::InvalidParameter("local source widths must be n/2 and n".into()));
        }
        if self.mac.width() != self.m {
            return Err(Error::InvalidParameter("MAC width must equal m".into()));
        }
        if self.tre.d != self.m {
            return Err(Error::InvalidParameter(
                "the Trevisan seed width d must equal m (the protocol feeds W into Tre)".into(),
            ));
        }
        if self.tre.n != self.n || self.tre.l != self.l {
            return Err(Error::InvalidParameter("Trevisan params must match (n, l)".into()));
        }
        if 2 * self.m + 8 > 63 {
            return Err(Error::InvalidParameter("2m + 8 must stay below 63 bits".into()));
        }
        if self.nmext.p <= 1u64 << (2 * self.m + 8) {
            return Err(Error::InvalidParameter(
                "nmExt prime must exceed 2^(2m+8) to keep truncation bias under 2^-8".into(),
            ));
        }
        if self.ext_q <= 1u64 << (self.m + 8) {
            return Err(Error::InvalidParameter("Ext prime must exceed 2^(m+8)".into()));
        }
        // capacity: X fits both field encodings, A fits the ext field, B
        // fits the W' extractor domain
        let px = self.nmext.p as f64;
        if (self.nmext.n as f64) * px.log2() < self.n as f64 {
            return Err(Error::InvalidParameter("p^n_vec cannot hold X".into()));
        }
        if ((self.nmext.n / 2) as f64) * px.log2() < self.a_bits as f64 {
            return Err(Error::InvalidParameter("GF(p^(n_vec/2)) cannot hold A".into()));
        }
        if (self.ext_digits as f64) * (self.ext_q as f64).log2() < self.b_bits as f64 {
            return Err(Error::InvalidParameter("q^ext_digits cannot hold B".into()));
        }
        Ok(())
    }

    /// The desk-scale default profile.
    ///
    /// n = 32 secret bits, l = 4 output bits, and m = d = 16 because the
    /// polynomial weak design pins d = q^2 and the one-bit core needs
    /// q >= l; q = 4 is the smallest field that satisfies both while
    /// keeping the nmExt prime (> 2^(2m+8) = 2^40) in u64 range.
    pub fn desk32() -> Result<Self> {
        ProtocolParams::build("desk32", 32, 4, 4)
    }

    /// A tiny profile for exhaustive unit testing: n = 8, m = 4, l = 2.
    pub fn mini8() -> Result<Self> {
        ProtocolParams::build("mini8", 8, 2, 2)
    }

    /// Builds a profile from (n, l, t): m = d = q^2 with q the smallest
    /// prime power >= t, p the smallest prime > 2^(2m+8), and the W' field
    /// the smallest prime > 2^(m+8).
    pub fn build(name: &str, n: usize, l: usize, t: usize) -> Result<Self> {
        let tre = TrevisanParams::new(n, l, t)?;
        let m = tre.d;
        if 2 * m + 8 > 63 {
            return Err(Error::InvalidParameter(format!(
                "profile needs p > 2^{}, beyond the 64-bit desk cap",
                2 * m + 8
            )));
        }
        let p = next_prime(1u64 << (2 * m + 8));
        let nmext = NmExtParams::new(p, 2)?;
        let ext_q = next_prime(1u64 << (m + 8));
        let mac = Gf2m::canonical(m)?;
        let params = ProtocolParams {
            name: name.into(),
            n,
            a_bits: n / 2,
            b_bits: n,
            m,
            l,
            nmext,
            ext_q,
            ext_digits: 2,
            tre,
            mac,
        };
        params.validate()?;
        Ok(params)
    }

    /// Resolves a named builtin profile.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "desk32" => ProtocolParams::desk32(),
            "mini8" => ProtocolParams::mini8(),
            other => Err(Error::InvalidParameter(format!(
                "unknown profile {other:?} (builtins: desk32, mini8)"
            ))),
        }
    }

    /// The substitute non-malleability epsilon reported for this profile:
    /// the instantiated bound at k' = H_min(X), k = H_min(A).
    pub fn nm_epsilon(&self, x_entropy: f64, a_entropy: f64) -> f64 {
        crate::nmtest::nm_theorem_bound(self.nmext.p, self.nmext.n, x_entropy, a_entropy)
    }

    /// Exact uniform-input error of the profile's Trevisan extractor.
    pub fn tre_epsilon(&self) -> Result<f64> {
        crate::xtr::exact_uniform_error(&self.tre)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk32_profile_wiring() {
        let p = ProtocolParams::desk32().unwrap();
        assert_eq!(p.n, 32);
        assert_eq!(p.m, 16);
        assert_eq!(p.l, 4);
        assert_eq!(p.tre.d, 16);
        assert_eq!(p.mac.width(), 16);
        assert!(p.nmext.p > 1u64 << 40);
        assert!(p.ext_q > 1u64 << 24);
        assert!(crate::ff::is_prime(p.nmext.p));
        assert!(crate::ff::is_prime(p.ext_q));
        p.validate().unwrap();
    }

    #[test]
    fn mini8_profile_wiring() {
        let p = ProtocolParams::mini8().unwrap();
        assert_eq!((p.n, p.m, p.l), (8, 4, 2));
        assert_eq!(p.nmext.p, 65537);
        assert_eq!(p.mac.poly(), 0x13);
        p.validate().unwrap();
    }

    #[test]
    fn profile_serialization_round_trip() {
        let p = ProtocolParams::mini8().unwrap();
        let json = serde_json::to_string(&p).unwrap();
        let back: ProtocolParams = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn unknown_profile_rejected() {
        assert!(ProtocolParams::by_name("desk99").is_err());
    }

    #[test]
    fn tampered_profile_records_rejected() {
        let p = ProtocolParams::mini8().unwrap();
        // composite nmExt modulus
        let mut bad = serde_json::to_value(&p).unwrap();
        bad["nmext"]["p"] = serde_json::json!(65536);
        let parsed: std::result::Result<ProtocolParams, _> = serde_json::from_value(bad);
        if let Ok(parsed) = parsed {
            assert!(parsed.validate().is_err());
        }
        // unknown fields are rejected outright
        let mut extra = serde_json::to_value(&p).unwrap();
        extra["surprise"] = serde_json::json!(1);
        assert!(serde_json::from_value::<ProtocolParams>(extra).is_err());
    }
}
