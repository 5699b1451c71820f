//! Binary field snapshots.
//!
//! Layout (all integers little-endian `u32`, values little-endian `f64`):
//!
//! ```text
//! "BIAXFLD1" | version = 1 | ndim | dims[ndim] | field count
//! per field:  name length | name bytes (UTF-8) | prod(dims) values, x fastest
//! ```
//!
//! `dims` are node counts per axis.

use std::path::Path;

use crate::error::{Error, Result};
use crate::field::DirectorPairField;
use crate::hydro::FlowState;

pub const MAGIC: &[u8; 8] = b"BIAXFLD1";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub dims: Vec<u32>,
    pub fields: Vec<(String, Vec<f64>)>,
}

fn components(name: &str, v: &[[f64; 3]]) -> Vec<(String, Vec<f64>)> {
    ["x", "y", "z"]
        .iter()
        .enumerate()
        .map(|(c, s)| (format!("{name}_{s}"), v.iter().map(|x| x[c]).collect()))
        .collect()
}

impl Snapshot {
    pub fn node_count(&self) -> usize {
        self.dims.iter().map(|&d| d as usize).product()
    }

    pub fn field(&self, name: &str) -> Option<&[f64]> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn from_directors(d: &DirectorPairField) -> Snapshot {
        let dims = d.grid.shape()[..d.grid.ndim()].iter().map(|&s| s as u32).collect();
        let mut fields = components("n", &d.n);
        fields.extend(components("m", &d.m));
        Snapshot { dims, fields }
    }

    /// Fields `u_x, u_y, p, n_*, m_*`.
    pub fn from_flow_state(s: &FlowState) -> Snapshot {
        let mut snap = Snapshot::from_directors(&s.directors);
        let mut head = vec![
            ("u_x".to_string(), s.u.component(0)),
            ("u_y".to_string(), s.u.component(1)),
            ("p".to_string(), s.p.values.clone()),
        ];
        head.append(&mut snap.fields);
        snap.fields = head;
        snap
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let count = self.node_count();
        let mut out = Vec::with_capacity(24 + self.fields.len() * (16 + 8 * count));
        out.extend_from_slice(MAGIC);
        let u32le = |out: &mut Vec<u8>, v: u32| out.extend_from_slice(&v.to_le_bytes());
        u32le(&mut out, VERSION);
        u32le(&mut out, self.dims.len() as u32);
        for &d in &self.dims {
            u32le(&mut out, d);
        }
        u32le(&mut out, self.fields.len() as u32);
        for (name, values) in &self.fields {
            assert_eq!(values.len(), count, "field {name} has the wrong length");
            u32le(&mut out, name.len() as u32);
            out.extend_from_slice(name.as_bytes());
            for v in values {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Snapshot> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let ndim = r.u32()?;
        if !(1..=3).contains(&ndim) {
            return Err(Error::Format(format!("ndim = {ndim}")));
        }
        let dims: Vec<u32> = (0..ndim).map(|_| r.u32()).collect::<Result<_>>()?;
        let count = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d as usize));
        let count = count.ok_or_else(|| Error::Format("dims overflow".into()))?;
        let nfields = r.u32()?;
        let mut fields = Vec::new();
        for _ in 0..nfields {
            let len = r.u32()? as usize;
            let name = std::str::from_utf8(r.take(len)?)
                .map_err(|_| Error::Format("field name is not UTF-8".into()))?
                .to_string();
            let raw = r.take(count.checked_mul(8).ok_or(Error::TruncatedFile)?)?;
            let values = raw
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
                .collect();
            fields.push((name, values));
        }
        if r.pos != bytes.len() {
            return Err(Error::Format(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        Ok(Snapshot { dims, fields })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).ok_or(Error::TruncatedFile)?;
        let s = self.bytes.get(self.pos..end).ok_or(Error::TruncatedFile)?;
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
}

pub fn write_snapshot(snapshot: &Snapshot, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, snapshot.to_bytes())?;
    Ok(())
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Snapshot> {
    Snapshot::from_bytes(&std::fs::read(path)?)
}
