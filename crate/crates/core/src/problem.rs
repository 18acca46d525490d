//! JSON problem files shared by every command.

use serde::{Deserialize, Serialize};

use crate::decider::DecisionMode;
use crate::error::{Error, Result};
use crate::genericity::EigenvalueAssignment;
use crate::jordan::{ClassTuple, Flavor, JordanNormalForm, Label};
use crate::partition::Partition;
use crate::rational::ExactComplexRational;

/// Options for the numerical witness construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub seed: u64,
    pub max_restarts: usize,
    pub max_newton_iters: usize,
    /// `None` selects 1e-10 (additive) or 1e-9 (multiplicative).
    pub residual_target: Option<f64>,
    pub continuation_steps: usize,
    /// Relative singular-value cutoff; `None` selects 1e-8.
    pub rank_tolerance: Option<f64>,
    pub max_n: usize,
    /// Attempt a construction even when the decision is not `solvable`.
    pub force: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            seed: 0,
            max_restarts: 50,
            max_newton_iters: 200,
            residual_target: None,
            continuation_steps: 20,
            rank_tolerance: None,
            max_n: 12,
            force: false,
        }
    }
}

impl SolverOptions {
    pub fn residual_target_for(&self, flavor: Flavor) -> f64 {
        self.residual_target.unwrap_or(match flavor {
            Flavor::Additive => 1e-10,
            Flavor::Multiplicative => 1e-9,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.residual_target {
            if t.is_nan() || t <= 0.0 {
                return Err(Error::Problem(format!("residual_target must be positive, got {t}")));
            }
        }
        if let Some(t) = self.rank_tolerance {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::Problem(format!("rank_tolerance must lie in (0, 1), got {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenvalueSpec {
    /// May be omitted for eigenvalue-free commands, but then for every
    /// eigenvalue of the file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<ExactComplexRational>,
    pub mult: usize,
    /// Jordan block sizes; omitted means diagonalizable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub eigenvalues: Vec<EigenvalueSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub flavor: Flavor,
    pub n: usize,
    pub classes: Vec<ClassSpec>,
    #[serde(default = "default_mode")]
    pub mode: DecisionMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverOptions>,
}

fn default_mode() -> DecisionMode {
    DecisionMode::Generic
}

impl ProblemFile {
    /// The class tuple, with eigenvalues attached when the file gives them.
    pub fn to_tuple(&self) -> Result<ClassTuple> {
        let mut forms = Vec::with_capacity(self.classes.len());
        let mut values = Vec::with_capacity(self.classes.len());
        let mut seen_value = false;
        let mut seen_missing = false;
        for (j, class) in self.classes.iter().enumerate() {
            if class.eigenvalues.is_empty() {
                return Err(Error::Problem(format!("class {j} has no eigenvalues")));
            }
            let mut entries = Vec::new();
            let mut class_values = Vec::new();
            let mut total = 0;
            for (k, e) in class.eigenvalues.iter().enumerate() {
                if e.mult == 0 {
                    return Err(Error::Problem(format!("class {j}, eigenvalue {k}: zero multiplicity")));
                }
                let blocks = match &e.blocks {
                    Some(b) => Partition::new(b.clone())
                        .map_err(|err| Error::Problem(format!("class {j}, eigenvalue {k}: {err}")))?,
                    None => Partition::ones(e.mult),
                };
                if blocks.size() != e.mult {
                    return Err(Error::Problem(format!(
                        "class {j}, eigenvalue {k}: blocks sum to {} but multiplicity is {}",
                        blocks.size(),
                        e.mult
                    )));
                }
                total += e.mult;
                entries.push((Label(k as u32), blocks));
                match &e.value {
                    Some(v) => {
                        seen_value = true;
                        class_values.push((v.clone(), e.mult));
                    }
                    None => seen_missing = true,
                }
            }
            if total != self.n {
                return Err(Error::Problem(format!(
                    "class {j}: multiplicities sum to {total}, expected n = {}",
                    self.n
                )));
            }
            forms.push(JordanNormalForm::new(entries)?);
            values.push(class_values);
        }
        if seen_value && seen_missing {
            return Err(Error::Problem("either every eigenvalue has a value or none has".into()));
        }
        let tuple = ClassTuple::new(self.flavor, forms)?;
        if seen_value {
            let a = EigenvalueAssignment::new(self.flavor, values)?;
            tuple.with_eigenvalues(a)
        } else {
            Ok(tuple)
        }
    }

    /// Problem file describing `t`.
    pub fn from_tuple(t: &ClassTuple, mode: DecisionMode) -> Self {
        let classes = t
            .forms()
            .iter()
            .enumerate()
            .map(|(j, f)| ClassSpec {
                eigenvalues: f
                    .entries()
                    .iter()
                    .enumerate()
                    .map(|(k, e)| EigenvalueSpec {
                        value: t.eigenvalues().map(|a| a.classes()[j][k].0.clone()),
                        mult: e.blocks.size(),
                        blocks: Some(e.blocks.parts().to_vec()),
                    })
                    .collect(),
            })
            .collect();
        ProblemFile { flavor: t.flavor(), n: t.n(), classes, mode, solver: None }
    }
}
