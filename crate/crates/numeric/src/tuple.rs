use dspkit::{ClassTuple, Flavor};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, frobenius, identity, product, CMat};

/// Matrices of a witness tuple together with the classes they should lie in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTuple", into = "RawTuple")]
pub struct MatrixTuple {
    flavor: Flavor,
    matrices: Vec<CMat>,
    declared_classes: ClassTuple,
    residual: f64,
}

/// Row-major `[re, im]` entries.
#[derive(Serialize, Deserialize)]
struct RawTuple {
    flavor: Flavor,
    n: usize,
    matrices: Vec<Vec<Vec<[f64; 2]>>>,
    declared_classes: ClassTuple,
    residual: f64,
}

impl TryFrom<RawTuple> for MatrixTuple {
    type Error = Error;

    fn try_from(raw: RawTuple) -> Result<Self> {
        let mut matrices = Vec::with_capacity(raw.matrices.len());
        for (j, rows) in raw.matrices.iter().enumerate() {
            if rows.len() != raw.n || rows.iter().any(|r| r.len() != raw.n) {
                return Err(Error::InvalidTuple(format!("matrix {j} is not {0}×{0}", raw.n)));
            }
            matrices.push(CMat::from_fn(raw.n, raw.n, |r, k| c(rows[r][k][0], rows[r][k][1])));
        }
        MatrixTuple::new(raw.flavor, matrices, raw.declared_classes)
    }
}

impl From<MatrixTuple> for RawTuple {
    fn from(t: MatrixTuple) -> Self {
        let n = t.n();
        RawTuple {
            flavor: t.flavor,
            n,
            matrices: t
                .matrices
                .iter()
                .map(|m| (0..n).map(|r| (0..n).map(|k| [m[(r, k)].re, m[(r, k)].im]).collect()).collect())
                .collect(),
            declared_classes: t.declared_classes,
            residual: t.residual,
        }
    }
}

impl MatrixTuple {
    pub fn new(flavor: Flavor, matrices: Vec<CMat>, declared_classes: ClassTuple) -> Result<Self> {
        if matrices.len() != declared_classes.len() {
            return Err(Error::InvalidTuple(format!(
                "{} matrices for {} classes",
                matrices.len(),
                declared_classes.len()
            )));
        }
        if flavor != declared_classes.flavor() {
            return Err(Error::InvalidTuple("flavor differs from the declared classes".into()));
        }
        let n = declared_classes.n();
        if matrices.iter().any(|m| m.nrows() != n || m.ncols() != n) {
            return Err(Error::InvalidTuple(format!("matrices must be {n}×{n}")));
        }
        if matrices.iter().any(|m| m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
            return Err(Error::InvalidTuple("non-finite entry".into()));
        }
        let residual = residual_of(flavor, &matrices);
        Ok(MatrixTuple { flavor, matrices, declared_classes, residual })
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn n(&self) -> usize {
        self.declared_classes.n()
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.matrices
    }

    pub fn declared_classes(&self) -> &ClassTuple {
        &self.declared_classes
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }
}

/// `‖ΣA_j‖_F` or `‖M_1⋯M_{p+1} − I‖_F`.
pub fn residual_of(flavor: Flavor, matrices: &[CMat]) -> f64 {
    let n = matrices.first().map_or(0, |m| m.nrows());
    match flavor {
        Flavor::Additive => frobenius(&matrices.iter().fold(CMat::zeros(n, n), |acc, m| acc + m)),
        Flavor::Multiplicative => frobenius(&(product(matrices) - identity(n))),
    }
}
