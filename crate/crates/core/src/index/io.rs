//! Binary index file.
//!
//! ```text
//! magic "LSCRIDX1"
//! u64 graph fingerprint, u64 k, u64 seed, u32 vertex count
//! u32 landmark count, landmarks (u32 each)
//! vertex-count owners (u32, u32::MAX = none)
//! per landmark:
//!   u32 n, n × (u32 vertex, u32 m, m × u64 label set)      II
//!   u32 n, n × (u64 label set, u32 m, m × u32 vertex)      EI^T
//!   u32 n, n × (u32 landmark, u64 count)                   D
//! ```
//!
//! All integers are little-endian. Build time is not stored, so equal inputs
//! give byte-identical files.

use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Duration;

use super::{LandmarkAssignment, LandmarkEntry, LocalIndex};
use crate::error::{Error, Result};
use crate::graph::{KnowledgeGraph, VertexId};
use crate::labels::{LabelSet, LabelSetFamily};

const MAGIC: &[u8; 8] = b"LSCRIDX1";

impl LocalIndex {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Vec::new();
        w.extend_from_slice(MAGIC);
        put_u64(&mut w, self.fingerprint);
        put_u64(&mut w, self.k as u64);
        put_u64(&mut w, self.seed);
        put_u32(&mut w, self.vertex_count() as u32);
        put_u32(&mut w, self.landmarks().len() as u32);
        for u in self.landmarks() {
            put_u32(&mut w, u.0);
        }
        for &o in self.assignment.raw_owners() {
            put_u32(&mut w, o);
        }
        for e in &self.entries {
            put_u32(&mut w, e.internal.len() as u32);
            for (v, fam) in &e.internal {
                put_u32(&mut w, v.0);
                put_u32(&mut w, fam.len() as u32);
                for s in fam.sets() {
                    put_u64(&mut w, s.0);
                }
            }
            put_u32(&mut w, e.external_t.len() as u32);
            for (s, vs) in &e.external_t {
                put_u64(&mut w, s.0);
                put_u32(&mut w, vs.len() as u32);
                for v in vs {
                    put_u32(&mut w, v.0);
                }
            }
            put_u32(&mut w, e.correlation.len() as u32);
            for (v, c) in &e.correlation {
                put_u32(&mut w, v.0);
                put_u64(&mut w, *c);
            }
        }
        w
    }

    /// Decodes an index and checks it against `g`.
    pub fn from_bytes(bytes: &[u8], g: &KnowledgeGraph) -> Result<LocalIndex> {
        let mut r = Reader { buf: bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(Error::FormatError("bad magic".into()));
        }
        let fingerprint = r.u64()?;
        if fingerprint != g.fingerprint() {
            return Err(Error::FingerprintMismatch {
                expected: g.fingerprint(),
                found: fingerprint,
            });
        }
        let k = r.u64()? as usize;
        let seed = r.u64()?;
        let n = r.u32()? as usize;
        if n != g.vertex_count() {
            return Err(Error::FormatError(format!(
                "index covers {n} vertices, graph has {}",
                g.vertex_count()
            )));
        }
        let nl = r.count(n)?;
        let landmarks = (0..nl).map(|_| r.vertex(n)).collect::<Result<Vec<_>>>()?;
        let mut owners = Vec::with_capacity(n);
        for _ in 0..n {
            let o = r.u32()?;
            if o != u32::MAX && o as usize >= n {
                return Err(Error::FormatError(format!("owner {o} out of range")));
            }
            owners.push(o);
        }
        let mut entries = Vec::with_capacity(nl);
        for _ in 0..nl {
            let ni = r.count(n)?;
            let mut internal = Vec::with_capacity(ni);
            for _ in 0..ni {
                let v = r.vertex(n)?;
                let m = r.count(usize::MAX)?;
                let sets = (0..m).map(|_| r.u64().map(LabelSet)).collect::<Result<Vec<_>>>()?;
                internal.push((v, LabelSetFamily::from_sets(sets)));
            }
            let ne = r.count(usize::MAX)?;
            let mut external_t = Vec::with_capacity(ne);
            for _ in 0..ne {
                let s = LabelSet(r.u64()?);
                let m = r.count(n)?;
                let vs = (0..m).map(|_| r.vertex(n)).collect::<Result<Vec<_>>>()?;
                external_t.push((s, vs));
            }
            let nd = r.count(nl)?;
            let mut correlation = Vec::with_capacity(nd);
            for _ in 0..nd {
                correlation.push((r.vertex(n)?, r.u64()?));
            }
            entries.push(LandmarkEntry {
                internal,
                external_t,
                correlation,
            });
        }
        if r.pos != bytes.len() {
            return Err(Error::FormatError(format!(
                "{} trailing bytes",
                bytes.len() - r.pos
            )));
        }
        Ok(LocalIndex::assemble(
            fingerprint,
            k,
            seed,
            LandmarkAssignment::from_parts(landmarks, owners),
            entries,
            Duration::ZERO,
        ))
    }

    pub fn stats(&self) -> IndexStats {
        let mut owned = vec![0usize; self.landmarks().len()];
        for v in 0..self.vertex_count() as u32 {
            if let Some(o) = self.owner(VertexId(v)) {
                owned[self.slot[o.index()] as usize] += 1;
            }
        }
        let per_landmark = self
            .entries()
            .zip(owned)
            .map(|((u, e), owned)| LandmarkStats {
                landmark: u,
                owned,
                ii_vertices: e.internal.len(),
                ii_sets: e.internal.iter().map(|(_, f)| f.len()).sum(),
                ei_sets: e.external_t.len(),
                ei_vertices: e.external_t.iter().map(|(_, vs)| vs.len()).sum(),
                d_entries: e.correlation.len(),
            })
            .collect();
        IndexStats {
            k: self.k,
            seed: self.seed,
            fingerprint: self.fingerprint,
            per_landmark,
            total_bytes: self.to_bytes().len(),
        }
    }
}

pub fn save_index(ix: &LocalIndex, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, ix.to_bytes())?;
    Ok(())
}

pub fn load_index(path: impl AsRef<Path>, g: &KnowledgeGraph) -> Result<LocalIndex> {
    LocalIndex::from_bytes(&fs::read(path)?, g)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LandmarkStats {
    pub landmark: VertexId,
    pub owned: usize,
    pub ii_vertices: usize,
    pub ii_sets: usize,
    pub ei_sets: usize,
    pub ei_vertices: usize,
    pub d_entries: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexStats {
    pub k: usize,
    pub seed: u64,
    pub fingerprint: u64,
    pub per_landmark: Vec<LandmarkStats>,
    pub total_bytes: usize,
}

impl IndexStats {
    /// The report with landmarks labelled by `name`.
    pub fn render(&self, name: impl Fn(VertexId) -> String) -> String {
        let mut out = format!(
            "landmarks={} seed={} fingerprint={:016x}\n{:>10} {:>8} {:>8} {:>8} {:>8} {:>8} {:>6}\n",
            self.k, self.seed, self.fingerprint, "landmark", "owned", "ii_keys", "ii_sets", "ei_sets", "ei_verts", "d"
        );
        for s in &self.per_landmark {
            out += &format!(
                "{:>10} {:>8} {:>8} {:>8} {:>8} {:>8} {:>6}\n",
                name(s.landmark),
                s.owned,
                s.ii_vertices,
                s.ii_sets,
                s.ei_sets,
                s.ei_vertices,
                s.d_entries
            );
        }
        out + &format!("total_bytes={}\n", self.total_bytes)
    }
}

impl fmt::Display for IndexStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|v| v.0.to_string()))
    }
}

fn put_u32(w: &mut Vec<u8>, x: u32) {
    w.extend_from_slice(&x.to_le_bytes());
}

fn put_u64(w: &mut Vec<u8>, x: u64) {
    w.extend_from_slice(&x.to_le_bytes());
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::FormatError(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn count(&mut self, max: usize) -> Result<usize> {
        let c = self.u32()? as usize;
        if c > max {
            return Err(Error::FormatError(format!("count {c} exceeds {max}")));
        }
        Ok(c)
    }

    fn vertex(&mut self, n: usize) -> Result<VertexId> {
        let v = self.u32()?;
        if v as usize >= n {
            return Err(Error::FormatError(format!("vertex {v} out of range")));
        }
        Ok(VertexId(v))
    }
}
