//! Instance files: a JSON bundle or a directory of MatrixMarket files.
//!
//! JSON bundle:
//!
//! ```json
//! { "type": "NGAVME", "A": [[..]], "B": [[..]], "C": [[..]], "F": [[..]] }
//! ```
//!
//! Matrices are arrays of row arrays. A GAVE carries `"f"` as a flat
//! array. `"K"`/`"L"` belong to SYLVESTER instances. An optional `"X0"`
//! holds a known solution (GAVE: a single column).
//!
//! A MatrixMarket directory holds one file per matrix with the fixed
//! names `A.mtx`, `B.mtx`, `C.mtx`, `K.mtx`, `L.mtx`, `F.mtx`, `f.mtx`
//! (and optionally `X0.mtx`). The class follows from which files exist:
//! `K.mtx`+`L.mtx` → SYLVESTER, `C.mtx` → NGAVME, `f.mtx` → GAVE,
//! otherwise GAVME.

use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::mtx::{read_mtx, write_mtx};
use super::{GaveInstance, GavmeInstance, Instance, InstanceKind, NgavmeInstance, SylvesterInstance};
use crate::error::{Error, Result};
use crate::matcore::{Matrix, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceFormat {
    Json,
    MatrixMarket,
}

impl InstanceFormat {
    /// Directories are MatrixMarket bundles, everything else JSON.
    pub fn detect(path: &Path) -> Self {
        if path.is_dir() {
            InstanceFormat::MatrixMarket
        } else {
            InstanceFormat::Json
        }
    }
}

impl std::str::FromStr for InstanceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "mtx" | "matrixmarket" | "mm" => Ok(Self::MatrixMarket),
            other => Err(Error::Parse(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBundle {
    #[serde(rename = "type")]
    kind: InstanceKind,
    #[serde(rename = "A")]
    a: Option<Matrix>,
    #[serde(rename = "B")]
    b: Option<Matrix>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    c: Option<Matrix>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    k: Option<Matrix>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    l: Option<Matrix>,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    f_mat: Option<Matrix>,
    #[serde(rename = "f", default, skip_serializing_if = "Option::is_none")]
    f_vec: Option<Vector>,
    #[serde(rename = "X0", default, skip_serializing_if = "Option::is_none")]
    x0: Option<Matrix>,
}

/// A parsed instance file: the instance and, when present, a known solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    pub instance: Instance,
    pub ground_truth: Option<Matrix>,
}

fn required(m: Option<Matrix>, name: &str, kind: InstanceKind) -> Result<Matrix> {
    m.ok_or_else(|| Error::Parse(format!("{} instance is missing {name}", kind.as_str())))
}

fn reject(present: bool, name: &str, kind: InstanceKind) -> Result<()> {
    if present {
        Err(Error::Parse(format!("{name} is not a field of a {} instance", kind.as_str())))
    } else {
        Ok(())
    }
}

impl RawBundle {
    fn into_bundle(self) -> Result<Bundle> {
        let kind = self.kind;
        let a = required(self.a, "A", kind)?;
        let b = required(self.b, "B", kind)?;
        let instance = match kind {
            InstanceKind::Gave => {
                reject(self.c.is_some(), "C", kind)?;
                reject(self.k.is_some() || self.l.is_some(), "K/L", kind)?;
                reject(self.f_mat.is_some(), "F (use f)", kind)?;
                Instance::Gave(GaveInstance::new(a, b, self.f_vec)?)
            }
            InstanceKind::Gavme => {
                reject(self.c.is_some(), "C", kind)?;
                reject(self.k.is_some() || self.l.is_some(), "K/L", kind)?;
                reject(self.f_vec.is_some(), "f (use F)", kind)?;
                Instance::Gavme(GavmeInstance::new(a, b, self.f_mat)?)
            }
            InstanceKind::Ngavme => {
                reject(self.k.is_some() || self.l.is_some(), "K/L", kind)?;
                reject(self.f_vec.is_some(), "f (use F)", kind)?;
                let c = required(self.c, "C", kind)?;
                Instance::Ngavme(NgavmeInstance::new(a, b, c, self.f_mat)?)
            }
            InstanceKind::Sylvester => {
                reject(self.c.is_some(), "C", kind)?;
                reject(self.f_vec.is_some(), "f (use F)", kind)?;
                let k = required(self.k, "K", kind)?;
                let l = required(self.l, "L", kind)?;
                Instance::Sylvester(SylvesterInstance::new(a, b, k, l, self.f_mat)?)
            }
        };
        if let Some(x0) = &self.x0 {
            let cols = match &instance {
                Instance::Gave(_) => 1,
                Instance::Gavme(g) => g.columns(),
                Instance::Ngavme(g) => g.columns(),
                Instance::Sylvester(s) => s.order(),
            };
            if x0.shape() != (instance.order(), cols) {
                return Err(Error::DimensionMismatch(format!(
                    "X0 must be {}x{cols}, got {}x{}",
                    instance.order(),
                    x0.rows(),
                    x0.cols()
                )));
            }
        }
        Ok(Bundle {
            instance,
            ground_truth: self.x0,
        })
    }

    fn from_instance(instance: &Instance, ground_truth: Option<&Matrix>) -> Self {
        let mut raw = RawBundle {
            kind: instance.kind(),
            a: None,
            b: None,
            c: None,
            k: None,
            l: None,
            f_mat: None,
            f_vec: None,
            x0: ground_truth.cloned(),
        };
        match instance {
            Instance::Gave(g) => {
                raw.a = Some(g.a.clone());
                raw.b = Some(g.b.clone());
                raw.f_vec = g.f.clone();
            }
            Instance::Gavme(g) => {
                raw.a = Some(g.a.clone());
                raw.b = Some(g.b.clone());
                raw.f_mat = g.f.clone();
            }
            Instance::Ngavme(g) => {
                raw.a = Some(g.a.clone());
                raw.b = Some(g.b.clone());
                raw.c = Some(g.c.clone());
                raw.f_mat = g.f.clone();
            }
            Instance::Sylvester(s) => {
                raw.a = Some(s.a.clone());
                raw.b = Some(s.b.clone());
                raw.k = Some(s.k.clone());
                raw.l = Some(s.l.clone());
                raw.f_mat = s.f.clone();
            }
        }
        raw
    }
}

impl Bundle {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawBundle = serde_json::from_str(text).map_err(map_json_error)?;
        raw.into_bundle()
    }

    pub fn from_reader(mut reader: impl Read) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        let raw = RawBundle::from_instance(&self.instance, self.ground_truth.as_ref());
        serde_json::to_string_pretty(&raw).expect("bundle serialization cannot fail")
    }
}

fn map_json_error(e: serde_json::Error) -> Error {
    // dimension errors raised inside Matrix deserialization surface as data errors
    let msg = e.to_string();
    if msg.contains("dimension mismatch") {
        Error::DimensionMismatch(msg)
    } else {
        Error::Parse(msg)
    }
}

fn read_optional(dir: &Path, name: &str) -> Result<Option<Matrix>> {
    let path = dir.join(name);
    if path.is_file() {
        read_mtx(&path).map(Some)
    } else {
        Ok(None)
    }
}

fn read_mtx_dir(dir: &Path) -> Result<Bundle> {
    let a = read_optional(dir, "A.mtx")?;
    let b = read_optional(dir, "B.mtx")?;
    let c = read_optional(dir, "C.mtx")?;
    let k = read_optional(dir, "K.mtx")?;
    let l = read_optional(dir, "L.mtx")?;
    let f_mat = read_optional(dir, "F.mtx")?;
    let f_small = read_optional(dir, "f.mtx")?;
    let x0 = read_optional(dir, "X0.mtx")?;

    let kind = if k.is_some() || l.is_some() {
        InstanceKind::Sylvester
    } else if c.is_some() {
        InstanceKind::Ngavme
    } else if f_small.is_some() && f_mat.is_none() {
        InstanceKind::Gave
    } else {
        InstanceKind::Gavme
    };
    let f_vec = match (kind, f_small) {
        (InstanceKind::Gave, Some(f)) => {
            if f.cols() != 1 {
                return Err(Error::DimensionMismatch(format!(
                    "f.mtx must be a single column, got {}x{}",
                    f.rows(),
                    f.cols()
                )));
            }
            Some(f.col(0))
        }
        (_, Some(_)) => {
            return Err(Error::Parse(format!(
                "f.mtx is only valid for GAVE, directory looks like {}",
                kind.as_str()
            )))
        }
        (_, None) => None,
    };
    RawBundle {
        kind,
        a,
        b,
        c,
        k,
        l,
        f_mat,
        f_vec,
        x0,
    }
    .into_bundle()
}

/// Reads an instance file with a known solution if it has one.
pub fn read_bundle(path: &Path, format: Option<InstanceFormat>) -> Result<Bundle> {
    match format.unwrap_or_else(|| InstanceFormat::detect(path)) {
        InstanceFormat::Json => Bundle::from_json_str(&fs::read_to_string(path)?),
        InstanceFormat::MatrixMarket => {
            if !path.is_dir() {
                return Err(Error::Parse(format!(
                    "{} is not a MatrixMarket directory",
                    path.display()
                )));
            }
            read_mtx_dir(path)
        }
    }
}

pub fn parse_instance(path: &Path, format: Option<InstanceFormat>) -> Result<Instance> {
    read_bundle(path, format).map(|b| b.instance)
}

/// Writes a bundle as JSON (to the file `path`) or as a MatrixMarket
/// directory (created at `path`).
pub fn write_bundle(path: &Path, bundle: &Bundle, format: InstanceFormat) -> Result<()> {
    match format {
        InstanceFormat::Json => {
            fs::write(path, bundle.to_json_string())?;
        }
        InstanceFormat::MatrixMarket => {
            fs::create_dir_all(path)?;
            let raw = RawBundle::from_instance(&bundle.instance, bundle.ground_truth.as_ref());
            let named = [
                ("A.mtx", raw.a),
                ("B.mtx", raw.b),
                ("C.mtx", raw.c),
                ("K.mtx", raw.k),
                ("L.mtx", raw.l),
                ("F.mtx", raw.f_mat),
                ("f.mtx", raw.f_vec.as_ref().map(Matrix::column)),
                ("X0.mtx", raw.x0),
            ];
            for (name, m) in named {
                if let Some(m) = m {
                    write_mtx(&path.join(name), &m)?;
                }
            }
        }
    }
    Ok(())
}
