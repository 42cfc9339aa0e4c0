use serde::{Deserialize, Serialize};

use super::Gauge;
use crate::error::Result;

/// On-disk description of a gauge.
///
/// ```json
/// {"type": "polytope_h", "normals": [[0,-1],[-1,1],[1,1]]}
/// {"type": "polytope_v", "vertices": [[0,1],[-2,-1],[2,-1]], "scale": 2}
/// {"type": "ellipsoid", "Q": [[1,0],[0,1]], "c": [0.5, 0]}
/// ```
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GaugeSpec {
    PolytopeH {
        normals: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
    PolytopeV {
        vertices: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
    Ellipsoid {
        #[serde(rename = "Q")]
        q: Vec<Vec<f64>>,
        c: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
}

impl GaugeSpec {
    pub fn build(self) -> Result<Gauge> {
        let (g, scale) = match self {
            GaugeSpec::PolytopeH { normals, scale } => (Gauge::polytope_h(normals)?, scale),
            GaugeSpec::PolytopeV { vertices, scale } => (Gauge::polytope_v(vertices)?, scale),
            GaugeSpec::Ellipsoid { q, c, scale } => (Gauge::ellipsoid(q, c)?, scale),
        };
        match scale {
            Some(k) => g.scaled(k),
            None => Ok(g),
        }
    }
}
