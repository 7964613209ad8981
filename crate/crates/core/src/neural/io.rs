use std::path::Path;

use crate::error::{Error, Result};

use super::mlp::{Activation, Mlp};

pub const WEIGHT_MAGIC: [u8; 4] = *b"EVNW";
pub const WEIGHT_VERSION: u32 = 1;

/// Encode a network as
/// `magic | version | layer count | sizes | activation codes | tanh bounds |
/// per layer: row-major weights, bias | crc32`, all little-endian.
pub fn weights_to_bytes(net: &Mlp) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + net.num_params() * 8);
    out.extend_from_slice(&WEIGHT_MAGIC);
    out.extend_from_slice(&WEIGHT_VERSION.to_le_bytes());
    out.extend_from_slice(&(net.num_layers() as u32).to_le_bytes());
    for &s in net.sizes() {
        out.extend_from_slice(&(s as u32).to_le_bytes());
    }
    for a in net.activations() {
        out.push(a.code());
    }
    for a in net.activations() {
        if let Activation::BoundedTanh(b) = a {
            b.iter().for_each(|v| out.extend_from_slice(&v.to_le_bytes()));
        }
    }
    for p in net.params() {
        out.extend_from_slice(&p.to_le_bytes());
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::WeightFormat(format!(
                "{what}: need {n} bytes, {} remain",
                self.buf.len() - self.pos
            )));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize, what: &str) -> Result<Vec<f64>> {
        let bytes = self.take(n.checked_mul(8).unwrap_or(usize::MAX), what)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

pub fn weights_from_bytes(bytes: &[u8]) -> Result<Mlp> {
    if bytes.len() < 16 {
        return Err(Error::WeightFormat(format!(
            "file too short ({} bytes)",
            bytes.len()
        )));
    }
    if bytes[..4] != WEIGHT_MAGIC {
        return Err(Error::WeightFormat("bad magic".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != WEIGHT_VERSION {
        return Err(Error::WeightFormat(format!(
            "unsupported version {version} (expected {WEIGHT_VERSION})"
        )));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().unwrap());
    let actual = crc32fast::hash(body);
    if stored != actual {
        return Err(Error::WeightFormat(format!(
            "checksum mismatch: stored {stored:08x}, computed {actual:08x}"
        )));
    }

    let mut r = Reader { buf: body, pos: 8 };
    let layers = r.u32("layer count")? as usize;
    if layers == 0 || layers > 1024 {
        return Err(Error::WeightFormat(format!("implausible layer count {layers}")));
    }
    let mut sizes = Vec::with_capacity(layers + 1);
    for i in 0..=layers {
        let s = r.u32(&format!("size {i}"))? as usize;
        if s == 0 {
            return Err(Error::WeightFormat(format!("layer {i}: zero width")));
        }
        sizes.push(s);
    }
    let codes = r.take(layers, "activation codes")?.to_vec();
    let mut acts = Vec::with_capacity(layers);
    for (l, &c) in codes.iter().enumerate() {
        acts.push(match c {
            0 => Activation::Identity,
            1 => Activation::Relu,
            2 => Activation::BoundedTanh(Vec::new()),
            _ => {
                return Err(Error::WeightFormat(format!(
                    "layer {l}: unknown activation code {c}"
                )))
            }
        });
    }
    for (l, a) in acts.iter_mut().enumerate() {
        if let Activation::BoundedTanh(b) = a {
            *b = r.f64s(sizes[l + 1], &format!("layer {l} output bounds"))?;
        }
    }
    let mut net = Mlp::new(sizes.clone(), acts)
        .map_err(|e| Error::WeightFormat(format!("invalid header: {e}")))?;
    for l in 0..layers {
        let (start, end) = net.layer_range(l);
        let vals = r.f64s(
            end - start,
            &format!("layer {l} ({}x{}) parameters", sizes[l + 1], sizes[l]),
        )?;
        net.params_mut()[start..end].copy_from_slice(&vals);
    }
    if r.pos != body.len() {
        return Err(Error::WeightFormat(format!(
            "{} trailing bytes after layer {}: declared sizes do not match payload",
            body.len() - r.pos,
            layers - 1
        )));
    }
    if !net.all_finite() {
        return Err(Error::WeightFormat("non-finite parameter".into()));
    }
    Ok(net)
}

pub fn save_weights(net: &Mlp, path: &Path) -> Result<()> {
    std::fs::write(path, weights_to_bytes(net)).map_err(|e| Error::io(path, e))
}

pub fn load_weights(path: &Path) -> Result<Mlp> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    weights_from_bytes(&bytes)
}
