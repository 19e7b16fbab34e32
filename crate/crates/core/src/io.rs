//! JSON and CSV interchange formats (double precision).
//!
//! * Cone: `{"kind":"circular","axis":[..],"half_angle":r,"n":k}` or
//!   `{"kind":"polyhedral","generators":[[..],..]}`
//! * Pseudo-cone: `{"cone":<cone>,"facets":[{"u":[..],"hbar":r},..]}`
//! * Measure: `{"atoms":[{"u":[..],"w":r},..],"total":r}`
//!
//! Written documents carry a `"schema"` field; it is optional on input, but
//! a different version is rejected. Documents may also carry a free-form
//! `"meta"` object (grid size, seed and so on).

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Cone, ConeKind, QuadratureGrid};
use crate::measures::{Atom, DiscreteMeasure};
use crate::pseudocone::{Facet, PseudoCone, DEFAULT_TIE_TOL};

pub const SCHEMA_VERSION: &str = "pseudocone/1";

/// Sorted key/value metadata attached to written documents.
pub type Meta = BTreeMap<String, serde_json::Value>;

/// Accepts a missing schema tag or [`SCHEMA_VERSION`].
pub fn check_schema(schema: Option<&str>) -> Result<()> {
    match schema {
        None => Ok(()),
        Some(s) if s == SCHEMA_VERSION => Ok(()),
        Some(s) => Err(Error::Unsupported(format!(
            "document schema {s:?}, expected {SCHEMA_VERSION:?}"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ConeSpec {
    Circular {
        axis: Vec<f64>,
        half_angle: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
    },
    Polyhedral {
        generators: Vec<Vec<f64>>,
    },
}

impl ConeSpec {
    pub fn to_cone(&self) -> Result<Cone<f64>> {
        match self {
            Self::Circular {
                axis,
                half_angle,
                n,
            } => Cone::circular_in(axis.clone(), *half_angle, n.unwrap_or(axis.len())),
            Self::Polyhedral { generators } => Cone::polyhedral(generators.clone()),
        }
    }

    pub fn from_cone(cone: &Cone<f64>) -> Self {
        match cone.kind() {
            ConeKind::Circular { axis, half_angle } => Self::Circular {
                axis: axis.clone(),
                half_angle: *half_angle,
                n: Some(cone.dim()),
            },
            ConeKind::Polyhedral { generators, .. } => Self::Polyhedral {
                generators: generators.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacetSpec {
    pub u: Vec<f64>,
    pub hbar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoConeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub cone: ConeSpec,
    pub facets: Vec<FacetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

impl PseudoConeSpec {
    pub fn to_pseudocone(&self) -> Result<PseudoCone<f64>> {
        check_schema(self.schema.as_deref())?;
        PseudoCone::wulff_shape(
            self.cone.to_cone()?,
            self.facets
                .iter()
                .map(|f| Facet::new(f.u.clone(), f.hbar))
                .collect(),
        )
    }

    pub fn from_pseudocone(k: &PseudoCone<f64>) -> Self {
        Self {
            schema: Some(SCHEMA_VERSION.into()),
            cone: ConeSpec::from_cone(k.cone()),
            facets: k
                .facets()
                .iter()
                .map(|f| FacetSpec {
                    u: f.normal.clone(),
                    hbar: f.depth,
                })
                .collect(),
            meta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub u: Vec<f64>,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub atoms: Vec<AtomSpec>,
    #[serde(default)]
    pub total: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

impl MeasureSpec {
    /// Builds the measure; a stated `total` must agree with the recomputed
    /// one to relative `1e-9`.
    pub fn to_measure(&self) -> Result<DiscreteMeasure<f64>> {
        check_schema(self.schema.as_deref())?;
        let m = DiscreteMeasure::new(
            self.atoms
                .iter()
                .map(|a| Atom::new(a.u.clone(), a.w))
                .collect(),
        )?;
        if let Some(stated) = self.total {
            if (stated - m.total()).abs() > 1e-9 * m.total().abs().max(1.0) {
                return Err(Error::InvalidMeasure(format!(
                    "stated total {stated} differs from the sum of weights {}",
                    m.total()
                )));
            }
        }
        Ok(m)
    }

    pub fn from_measure(m: &DiscreteMeasure<f64>) -> Self {
        Self {
            schema: Some(SCHEMA_VERSION.into()),
            atoms: m
                .atoms()
                .iter()
                .map(|a| AtomSpec {
                    u: a.u.clone(),
                    w: a.weight,
                })
                .collect(),
            total: Some(m.total()),
            meta: None,
        }
    }
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn coord_header(prefix: &str, n: usize) -> String {
    (1..=n)
        .map(|i| format!("{prefix}{i}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// First line of every CSV export: `# key=value ...`.
pub fn csv_banner(meta: &[(&str, String)]) -> String {
    let mut s = format!("# schema={SCHEMA_VERSION}");
    for (k, v) in meta {
        s.push_str(&format!(" {k}={v}"));
    }
    s
}

/// Grid nodes: `v1..vn,weight`.
pub fn write_grid_csv<W: Write>(
    out: &mut W,
    grid: &QuadratureGrid<f64>,
    meta: &[(&str, String)],
) -> io::Result<()> {
    writeln!(out, "{}", csv_banner(meta))?;
    writeln!(out, "{},weight", coord_header("v", grid.dim()))?;
    for (v, w) in grid.nodes().zip(grid.weights()) {
        writeln!(out, "{},{}", join(v), w)?;
    }
    Ok(())
}

/// Radial dump: `v1..vn,rho,gauss_index,is_tie`.
pub fn write_radial_csv<W: Write>(
    out: &mut W,
    k: &PseudoCone<f64>,
    grid: &QuadratureGrid<f64>,
    meta: &[(&str, String)],
) -> Result<()> {
    let io_err = |e: io::Error| Error::Unsupported(format!("write failed: {e}"));
    writeln!(out, "{}", csv_banner(meta)).map_err(io_err)?;
    writeln!(
        out,
        "{},rho,gauss_index,is_tie",
        coord_header("v", grid.dim())
    )
    .map_err(io_err)?;
    for v in grid.nodes() {
        let gauss = k.radial_gauss(v, DEFAULT_TIE_TOL)?;
        let rho = k.radial(v)?;
        writeln!(out, "{},{},{},{}", join(v), rho, gauss.index, gauss.is_tie).map_err(io_err)?;
    }
    Ok(())
}

/// Measure atoms: `u1..un,weight`.
pub fn write_measure_csv<W: Write>(
    out: &mut W,
    m: &DiscreteMeasure<f64>,
    meta: &[(&str, String)],
) -> io::Result<()> {
    writeln!(out, "{}", csv_banner(meta))?;
    writeln!(out, "{},weight", coord_header("u", m.dim()))?;
    for a in m.atoms() {
        writeln!(out, "{},{}", join(&a.u), a.weight)?;
    }
    Ok(())
}
