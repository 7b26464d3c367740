//! Binary checkpoint format.
//!
//! ```text
//! "PFCK" | u32 version | u32 meta_len | meta (JSON) | u32 n_records |
//!   n_records x (u32 name_len | name | u32 rank | rank x u64 extent | f64 LE values) |
//! u32 CRC32 of everything before it
//! ```
//! All integers are little-endian.

use std::path::Path;

use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use super::{ImleConfig, TrainConfig};
use crate::error::{CheckpointError, Error, Result};
use crate::model::ModelConfig;
use crate::nn::{ParamSet, Tensor};

pub const CHECKPOINT_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"PFCK";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Gan,
    Imle,
}

/// Serializable ChaCha8 state: key, stream and 128-bit word position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngState {
    /// 32-byte key, hex encoded.
    pub seed: String,
    pub stream: u64,
    /// Decimal string, since JSON numbers cannot hold a u128.
    pub word_pos: String,
}

impl RngState {
    pub fn capture(rng: &ChaCha8Rng) -> Self {
        let seed = rng.get_seed().iter().map(|b| format!("{b:02x}")).collect();
        Self { seed, stream: rng.get_stream(), word_pos: rng.get_word_pos().to_string() }
    }

    pub fn restore(&self) -> Result<ChaCha8Rng> {
        let bad = |what: &str| Error::Checkpoint(CheckpointError::Malformed(format!("rng {what}")));
        if self.seed.len() != 64 {
            return Err(bad("seed"));
        }
        let mut key = [0u8; 32];
        for (i, b) in key.iter_mut().enumerate() {
            *b = u8::from_str_radix(&self.seed[2 * i..2 * i + 2], 16).map_err(|_| bad("seed"))?;
        }
        let pos: u128 = self.word_pos.parse().map_err(|_| bad("word_pos"))?;
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.stream);
        rng.set_word_pos(pos);
        Ok(rng)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub kind: ModelKind,
    pub model: ModelConfig,
    pub train: Option<TrainConfig>,
    pub imle: Option<ImleConfig>,
    pub epoch: usize,
    pub critic_steps: u64,
    pub generator_steps: u64,
    pub rng: RngState,
    pub pad_to: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub meta: CheckpointMeta,
    pub generator: ParamSet,
    pub critic: Option<ParamSet>,
    /// RMSProp accumulators, in generator parameter order.
    pub generator_opt: Vec<Tensor>,
    pub critic_opt: Option<Vec<Tensor>>,
}

fn records(ck: &Checkpoint) -> Vec<(String, &Tensor)> {
    let mut out: Vec<(String, &Tensor)> = ck.generator.iter().map(|p| (format!("generator.{}", p.name), &p.value)).collect();
    if let Some(c) = &ck.critic {
        out.extend(c.iter().map(|p| (format!("critic.{}", p.name), &p.value)));
    }
    out.extend(ck.generator.iter().zip(&ck.generator_opt).map(|(p, t)| (format!("opt.generator.{}", p.name), t)));
    if let (Some(c), Some(acc)) = (&ck.critic, &ck.critic_opt) {
        out.extend(c.iter().zip(acc).map(|(p, t)| (format!("opt.critic.{}", p.name), t)));
    }
    out
}

pub fn encode_checkpoint(ck: &Checkpoint) -> Result<Vec<u8>> {
    if ck.generator_opt.len() != ck.generator.len() {
        return Err(Error::LengthMismatch { what: "generator optimizer state", left: ck.generator_opt.len(), right: ck.generator.len() });
    }
    if let (Some(c), Some(acc)) = (&ck.critic, &ck.critic_opt) {
        if acc.len() != c.len() {
            return Err(Error::LengthMismatch { what: "critic optimizer state", left: acc.len(), right: c.len() });
        }
    }
    let meta = serde_json::to_vec(&ck.meta).map_err(|e| Error::Invalid(format!("checkpoint metadata: {e}")))?;
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(meta.len() as u32).to_le_bytes());
    buf.extend_from_slice(&meta);
    let recs = records(ck);
    buf.extend_from_slice(&(recs.len() as u32).to_le_bytes());
    for (name, t) in recs {
        buf.extend_from_slice(&(name.len() as u32).to_le_bytes());
        buf.extend_from_slice(name.as_bytes());
        buf.extend_from_slice(&(t.shape().len() as u32).to_le_bytes());
        for &d in t.shape() {
            buf.extend_from_slice(&(d as u64).to_le_bytes());
        }
        for v in t.data() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&buf);
    buf.extend_from_slice(&crc.to_le_bytes());
    Ok(buf)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CheckpointError> {
        let end = self.pos.checked_add(n).ok_or(CheckpointError::Truncated)?;
        let s = self.buf.get(self.pos..end).ok_or(CheckpointError::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, CheckpointError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, CheckpointError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<Checkpoint> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4).map_err(|_| CheckpointError::BadMagic)? != MAGIC {
        return Err(CheckpointError::BadMagic.into());
    }
    let version = r.u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(CheckpointError::Version { found: version, expected: CHECKPOINT_VERSION }.into());
    }
    let meta_len = r.u32()? as usize;
    let meta_bytes = r.take(meta_len)?;
    let n = r.u32()? as usize;
    let mut recs = Vec::new();
    for _ in 0..n {
        let name_len = r.u32()? as usize;
        let name = String::from_utf8(r.take(name_len)?.to_vec())
            .map_err(|_| CheckpointError::Malformed("record name is not UTF-8".into()))?;
        let rank = r.u32()? as usize;
        let mut shape = Vec::with_capacity(rank.min(8));
        for _ in 0..rank {
            shape.push(r.u64()? as usize);
        }
        let count = shape.iter().try_fold(1usize, |a, &d| a.checked_mul(d)).ok_or(CheckpointError::Truncated)?;
        let raw = r.take(count.checked_mul(8).ok_or(CheckpointError::Truncated)?)?;
        let data = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
        recs.push((name, shape, data));
    }
    let body_end = r.pos;
    let stored = r.u32()?;
    if r.pos != bytes.len() {
        return Err(CheckpointError::Malformed(format!("{} trailing bytes", bytes.len() - r.pos)).into());
    }
    let computed = crc32fast::hash(&bytes[..body_end]);
    if stored != computed {
        return Err(CheckpointError::Checksum { stored, computed }.into());
    }

    let meta: CheckpointMeta =
        serde_json::from_slice(meta_bytes).map_err(|e| CheckpointError::Malformed(format!("metadata: {e}")))?;
    let mut generator = ParamSet::new();
    let mut critic = ParamSet::new();
    let mut gen_opt = Vec::new();
    let mut critic_opt = Vec::new();
    for (name, shape, data) in recs {
        let t = Tensor::new(shape, data).map_err(|e| CheckpointError::Malformed(e.to_string()))?;
        // longest prefixes first, since "opt.generator." would not otherwise be distinguishable
        if let Some(rest) = name.strip_prefix("opt.generator.") {
            check_order(&generator, gen_opt.len(), rest)?;
            gen_opt.push(t);
        } else if let Some(rest) = name.strip_prefix("opt.critic.") {
            check_order(&critic, critic_opt.len(), rest)?;
            critic_opt.push(t);
        } else if let Some(rest) = name.strip_prefix("generator.") {
            generator.insert(rest, t).map_err(|e| CheckpointError::Malformed(e.to_string()))?;
        } else if let Some(rest) = name.strip_prefix("critic.") {
            critic.insert(rest, t).map_err(|e| CheckpointError::Malformed(e.to_string()))?;
        } else {
            return Err(CheckpointError::Malformed(format!("unknown record `{name}`")).into());
        }
    }
    if gen_opt.len() != generator.len() {
        return Err(CheckpointError::Malformed("generator optimizer state incomplete".into()).into());
    }
    let has_critic = !critic.is_empty();
    if has_critic && critic_opt.len() != critic.len() {
        return Err(CheckpointError::Malformed("critic optimizer state incomplete".into()).into());
    }
    Ok(Checkpoint {
        meta,
        generator,
        critic: has_critic.then_some(critic),
        generator_opt: gen_opt,
        critic_opt: has_critic.then_some(critic_opt),
    })
}

fn check_order(set: &ParamSet, i: usize, name: &str) -> Result<(), CheckpointError> {
    if i >= set.len() || set.get(i).name != name {
        return Err(CheckpointError::Malformed(format!("optimizer record `{name}` out of order")));
    }
    Ok(())
}

pub fn save_checkpoint(path: impl AsRef<Path>, ck: &Checkpoint) -> Result<()> {
    std::fs::write(path, encode_checkpoint(ck)?)?;
    Ok(())
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    decode_checkpoint(&std::fs::read(path)?)
}
