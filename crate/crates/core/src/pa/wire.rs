//! Bit-exact wire format.
//!
//! Each message is `[version: 0x01][type: 0x01 msg1 / 0x02 msg2]
//! [length: 4 octets big-endian][payload]`. msg1's payload is A packed
//! MSB-first and zero-padded to an octet boundary; msg2's payload is W'
//! (packed, m bits) followed by T' (packed, m bits), each padded to its own
//! octet boundary.

use std::io::{Read, Write};

use crate::bits::{pack_msb, unpack_msb};
use crate::error::{Error, Result};

pub const WIRE_VERSION: u8 = 0x01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsgType {
    Msg1 = 0x01,
    Msg2 = 0x02,
}

impl MsgType {
    fn from_octet(b: u8) -> Result<Self> {
        match b {
            0x01 => Ok(MsgType::Msg1),
            0x02 => Ok(MsgType::Msg2),
            other => Err(Error::MalformedFrame(format!("unknown message type {other:#x}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub msg_type: MsgType,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn msg1(a: u64, a_bits: usize) -> Frame {
        Frame { msg_type: MsgType::Msg1, payload: pack_msb(a, a_bits) }
    }

    pub fn msg2(w: u64, t: u64, m: usize) -> Frame {
        let mut payload = pack_msb(w, m);
        payload.extend(pack_msb(t, m));
        Frame { msg_type: MsgType::Msg2, payload }
    }

    pub fn parse_msg1(&self, a_bits: usize) -> Result<u64> {
        if self.msg_type != MsgType::Msg1 {
            return Err(Error::MalformedFrame("expected msg1".into()));
        }
        unpack_msb(&self.payload, a_bits)
    }

    pub fn parse_msg2(&self, m: usize) -> Result<(u64, u64)> {
        if self.msg_type != MsgType::Msg2 {
            return Err(Error::MalformedFrame("expected msg2".into()));
        }
        let half = (m + 7) / 8;
        if self.payload.len() != 2 * half {
            return Err(Error::MalformedFrame(format!(
                "msg2 payload is {} octets, expected {}",
                self.payload.len(),
                2 * half
            )));
        }
        let w = unpack_msb(&self.payload[..half], m)?;
        let t = unpack_msb(&self.payload[half..], m)?;
        Ok((w, t))
    }
}

pub fn write_frame<W: Write>(writer: &mut W, frame: &Frame) -> Result<()> {
    let mut buf = Vec::with_capacity(6 + frame.payload.len());
    buf.push(WIRE_VERSION);
    buf.push(frame.msg_type as u8);
    buf.extend((frame.payload.len() as u32).to_be_bytes());
    buf.extend(&frame.payload);
    writer.write_all(&buf).map_err(|e| Error::Transport(e.to_string()))?;
    writer.flush().map_err(|e| Error::Transport(e.to_string()))?;
    Ok(())
}

/// Reads one frame. Transport failures (short reads, resets) come back as
/// `Error::Transport`; recognizable octets with bad structure come back as
/// `Error::MalformedFrame`, kept distinct from any protocol-level reject.
pub fn read_frame<R: Read>(reader: &mut R) -> Result<Frame> {
    let mut head = [0u8; 6];
    reader.read_exact(&mut head).map_err(|e| Error::Transport(e.to_string()))?;
    if head[0] != WIRE_VERSION {
        return Err(Error::MalformedFrame(format!("unknown version {:#x}", head[0])));
    }
    let msg_type = MsgType::from_octet(head[1])?;
    let len = u32::from_be_bytes([head[2], head[3], head[4], head[5]]) as usize;
    if len > 1 << 20 {
        return Err(Error::MalformedFrame(format!("implausible length {len}")));
    }
    let mut payload = vec![0u8; len];
    reader.read_exact(&mut payload).map_err(|e| Error::Transport(e.to_string()))?;
    Ok(Frame { msg_type, payload })
}
