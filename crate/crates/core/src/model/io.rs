//! Binary field files and the JSON grid/parameter manifest.
//!
//! Field layout: 32-byte header (`INLSFLD1`, `n` as u64 LE, geometry tag as
//! u64 LE with 0 = line and 1 = radial, 8 reserved zero bytes) followed by
//! `n` pairs of little-endian f64 `(re, im)`.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{InlsError, Result};
use crate::model::field::{Field, Model};
use crate::model::grid::{Geometry, Grid, RadialOrder};
use crate::model::params::ProblemParams;

const MAGIC: &[u8; 8] = b"INLSFLD1";
const HEADER_LEN: usize = 32;

fn geometry_tag(g: &Geometry) -> u64 {
    match g {
        Geometry::Line { .. } => 0,
        Geometry::Radial { .. } => 1,
    }
}

pub fn encode_field(u: &Field) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * u.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(u.len() as u64).to_le_bytes());
    out.extend_from_slice(&geometry_tag(&u.grid().geometry()).to_le_bytes());
    out.extend_from_slice(&[0u8; 8]);
    for v in u.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn decode_field(model: &Arc<Model>, bytes: &[u8]) -> Result<Field> {
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return Err(InlsError::Format("missing INLSFLD1 header".into()));
    }
    let word = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().expect("8-byte slice"));
    let n = word(8) as usize;
    let tag = word(16);
    let expected_tag = geometry_tag(&model.grid().geometry());
    if tag != expected_tag {
        return Err(InlsError::Format(format!("geometry tag {tag} does not match the model ({expected_tag})")));
    }
    if n != model.grid().len() {
        return Err(InlsError::Format(format!("file holds {n} nodes, grid has {}", model.grid().len())));
    }
    if bytes.len() != HEADER_LEN + 16 * n {
        return Err(InlsError::Format(format!(
            "expected {} bytes for {n} nodes, found {}",
            HEADER_LEN + 16 * n,
            bytes.len()
        )));
    }
    let f = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().expect("8-byte slice"));
    let values = (0..n)
        .map(|j| {
            let at = HEADER_LEN + 16 * j;
            Complex64::new(f(at), f(at + 8))
        })
        .collect();
    Field::new(model, values).map_err(|e| InlsError::Format(e.to_string()))
}

pub fn write_field(path: impl AsRef<Path>, u: &Field) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(&encode_field(u))?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>, model: &Arc<Model>) -> Result<Field> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_field(model, &bytes)
}

/// Flat description of a model, enough to rebuild it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub dim: usize,
    pub sigma: f64,
    pub b: f64,
    pub geometry: String,
    #[serde(rename = "L_or_Rmax")]
    pub l_or_rmax: f64,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radial_order: Option<RadialOrder>,
}

impl Manifest {
    pub fn from_model(model: &Model) -> Manifest {
        let p = model.params();
        let g = model.grid().geometry();
        Manifest {
            dim: p.dim,
            sigma: p.sigma,
            b: p.b,
            geometry: g.name().to_string(),
            l_or_rmax: g.extent(),
            n: g.len(),
            radial_order: model.grid().radial_order(),
        }
    }

    pub fn to_model(&self) -> Result<Arc<Model>> {
        let params = if self.b == 0.0 {
            ProblemParams::validation_only(self.dim, self.sigma)?
        } else {
            ProblemParams::new(self.dim, self.sigma, self.b)?
        };
        let grid = match self.geometry.as_str() {
            "line" => Grid::line(self.l_or_rmax, self.n)?,
            "radial" => Grid::radial_with_order(self.dim, self.l_or_rmax, self.n, self.radial_order.unwrap_or_default())?,
            other => return Err(InlsError::invalid("geometry", format!("unknown geometry `{other}`"))),
        };
        Model::new(params, grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let m = Model::new(ProblemParams::new(2, 0.75, 0.5).unwrap(), Grid::radial(2, 4.0, 16).unwrap()).unwrap();
        let u = m.sample(|r| Complex64::new(r, -r));
        let bytes = encode_field(&u);
        assert_eq!(bytes.len(), 32 + 16 * 16);
        assert_eq!(&bytes[..8], b"INLSFLD1");
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 16);
        assert_eq!(u64::from_le_bytes(bytes[16..24].try_into().unwrap()), 1);
        assert!(bytes[24..32].iter().all(|&b| b == 0));
        let back = decode_field(&m, &bytes).unwrap();
        assert_eq!(back.values(), u.values());
    }

    #[test]
    fn rejects_truncated_and_foreign_files() {
        let m = Model::new(ProblemParams::new(1, 1.5, 0.5).unwrap(), Grid::line(4.0, 16).unwrap()).unwrap();
        let u = m.sample_real(|x| x);
        let bytes = encode_field(&u);
        assert!(decode_field(&m, &bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode_field(&m, &bad).is_err());
        let mut radial = bytes;
        radial[16] = 1;
        assert!(decode_field(&m, &radial).is_err());
    }

    #[test]
    fn manifest_keys() {
        let m = Model::new(ProblemParams::new(1, 1.5, 0.5).unwrap(), Grid::line(4.0, 16).unwrap()).unwrap();
        let json = serde_json::to_value(Manifest::from_model(&m)).unwrap();
        for key in ["dim", "sigma", "b", "geometry", "L_or_Rmax", "n"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        let back: Manifest = serde_json::from_value(json).unwrap();
        let m2 = back.to_model().unwrap();
        assert_eq!(m2.grid().geometry(), m.grid().geometry());
    }
}
