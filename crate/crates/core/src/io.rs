//! JSON space files: `{"n": 3, "matrix": [[0, 1, "inf"], …], "base": 0,
//! "label": "…"}`. Reading validates the matrix.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::metric::{validate, FiniteSpace, PointedSpace};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub n: usize,
    pub matrix: Vec<Vec<ExtReal<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl SpaceFile {
    pub fn from_space<T: Scalar>(x: &FiniteSpace<T>, base: Option<usize>) -> Self {
        let x = x.cast::<f64>();
        SpaceFile { n: x.len(), matrix: x.rows(), base, label: x.label().map(str::to_owned) }
    }

    pub fn from_pointed<T: Scalar>(x: &PointedSpace<T>) -> Self {
        Self::from_space(&x.space, Some(x.base()))
    }

    /// Validates and builds the space.
    pub fn space<T: Scalar>(&self) -> Result<FiniteSpace<T>> {
        if self.matrix.len() != self.n {
            return Err(Error::Format(format!("n = {} but the matrix has {} rows", self.n, self.matrix.len())));
        }
        let rows: Vec<Vec<ExtReal<T>>> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|v| v.value().map_or(ExtReal::INF, |f| ExtReal::Finite(T::lit(f)))).collect())
            .collect();
        let mut x = validate(&rows)?;
        if let Some(l) = &self.label {
            x = x.with_label(l.clone());
        }
        Ok(x)
    }

    /// Pointed at `base`, or at point 0 when the file has none.
    pub fn pointed<T: Scalar>(&self) -> Result<PointedSpace<T>> {
        PointedSpace::new(self.space()?, self.base.unwrap_or(0))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn read_space_file(path: impl AsRef<Path>) -> Result<SpaceFile> {
    SpaceFile::from_json(&std::fs::read_to_string(path)?)
}

pub fn write_space_file(path: impl AsRef<Path>, file: &SpaceFile) -> Result<()> {
    std::fs::write(path, file.to_json()? + "\n")?;
    Ok(())
}

/// A net as a JSON array of space files.
pub fn net_to_json<T: Scalar>(elements: &[FiniteSpace<T>], pointed: bool) -> Result<String> {
    let files: Vec<SpaceFile> = elements.iter().map(|e| SpaceFile::from_space(e, pointed.then_some(0))).collect();
    Ok(serde_json::to_string_pretty(&files)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let x = FiniteSpace::<f64>::from_fn(3, |_, j| if j == 2 { ExtReal::INF } else { ExtReal::Finite(1.0) })
            .unwrap()
            .with_label("mixed");
        let f = SpaceFile::from_space(&x, Some(2));
        let back = SpaceFile::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.space::<f64>().unwrap(), x);
        assert_eq!(back.pointed::<f64>().unwrap().base(), 2);
    }

    #[test]
    fn invalid_files_report_violations() {
        let bad = r#"{"n": 3, "matrix": [[0,1,5],[1,0,1],[5,1,0]]}"#;
        let f = SpaceFile::from_json(bad).unwrap();
        assert!(matches!(f.space::<f64>(), Err(Error::Invalid(v)) if !v.is_empty()));
        let short = r#"{"n": 2, "matrix": [[0]]}"#;
        assert!(matches!(SpaceFile::from_json(short).unwrap().space::<f64>(), Err(Error::Format(_))));
    }
}
