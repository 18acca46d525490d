//! Jordan normal forms with opaque eigenvalue labels, the quantities `r` and
//! `d`, and the correspondence between general and diagonal forms.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genericity::EigenvalueAssignment;
use crate::partition::{MultiplicityVector, Partition};

/// Opaque eigenvalue identifier. Values are bound separately through an
/// [`EigenvalueAssignment`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub u32);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// `A_1 + … + A_{p+1} = 0`
    Additive,
    /// `M_1 ⋯ M_{p+1} = I`
    Multiplicative,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JordanEntry {
    pub label: Label,
    pub blocks: Partition,
}

/// Block sizes per eigenvalue label. Entries are kept sorted by label and
/// never contain empty partitions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawForm", into = "RawForm")]
pub struct JordanNormalForm {
    n: usize,
    entries: Vec<JordanEntry>,
}

#[derive(Serialize, Deserialize)]
struct RawForm {
    n: usize,
    entries: Vec<JordanEntry>,
}

impl TryFrom<RawForm> for JordanNormalForm {
    type Error = Error;

    fn try_from(raw: RawForm) -> Result<Self> {
        let form = JordanNormalForm::new(raw.entries.into_iter().map(|e| (e.label, e.blocks)).collect())?;
        if form.n != raw.n {
            return Err(Error::InvalidForm(format!("declared n = {} but blocks sum to {}", raw.n, form.n)));
        }
        Ok(form)
    }
}

impl From<JordanNormalForm> for RawForm {
    fn from(f: JordanNormalForm) -> Self {
        RawForm { n: f.n, entries: f.entries }
    }
}

impl JordanNormalForm {
    pub fn new(entries: Vec<(Label, Partition)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (label, blocks) in entries {
            if blocks.is_empty() {
                return Err(Error::InvalidForm(format!("label {label} has no blocks")));
            }
            if map.insert(label, blocks).is_some() {
                return Err(Error::InvalidForm(format!("label {label} repeated")));
            }
        }
        let entries: Vec<JordanEntry> = map.into_iter().map(|(label, blocks)| JordanEntry { label, blocks }).collect();
        let n = entries.iter().map(|e| e.blocks.size()).sum();
        Ok(JordanNormalForm { n, entries })
    }

    /// Single eigenvalue (label 0) with the given blocks.
    pub fn single_eigenvalue(blocks: Partition) -> Result<Self> {
        JordanNormalForm::new(vec![(Label(0), blocks)])
    }

    /// Diagonal form whose `i`-th label has multiplicity `mv[i]`.
    pub fn diagonal(mv: &MultiplicityVector) -> Self {
        let entries = mv
            .components()
            .iter()
            .enumerate()
            .map(|(i, &m)| JordanEntry { label: Label(i as u32), blocks: Partition::ones(m) })
            .collect::<Vec<_>>();
        JordanNormalForm { n: mv.length(), entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[JordanEntry] {
        &self.entries
    }

    pub fn blocks_of(&self, label: Label) -> Option<&Partition> {
        self.entries.iter().find(|e| e.label == label).map(|e| &e.blocks)
    }

    /// True when every block has size 1.
    pub fn is_diagonal(&self) -> bool {
        self.entries.iter().all(|e| e.blocks.largest() <= 1)
    }

    /// Algebraic multiplicity of every label, in label order.
    pub fn multiplicities(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.blocks.size()).collect()
    }

    /// Largest number of blocks sharing one eigenvalue.
    pub fn max_block_count(&self) -> usize {
        self.entries.iter().map(|e| e.blocks.len()).max().unwrap_or(0)
    }

    /// `r(J) = n − max_l #blocks(l)`, the minimal rank of `Y − λI`.
    pub fn rank_defect(&self) -> usize {
        self.n - self.max_block_count()
    }

    /// Dimension of the conjugacy class: `n²` minus the centralizer dimension.
    pub fn orbit_dimension(&self) -> usize {
        self.n * self.n - self.centralizer_dimension()
    }

    /// `Σ_l (b_1 + 3b_2 + 5b_3 + …)` over labels.
    pub fn centralizer_dimension(&self) -> usize {
        self.entries
            .iter()
            .map(|e| e.blocks.parts().iter().enumerate().map(|(i, &b)| (2 * i + 1) * b).sum::<usize>())
            .sum()
    }

    /// Diagonal correspondent: disjoint union of the dual partitions.
    pub fn to_diagonal(&self) -> MultiplicityVector {
        let parts = self.entries.iter().flat_map(|e| e.blocks.dual().into_parts()).collect();
        MultiplicityVector::new(parts).expect("dual parts are positive")
    }

    /// Single-eigenvalue correspondent: the `k`-th block is the sum over
    /// labels of the `k`-th largest block.
    pub fn to_single_eigenvalue(&self) -> Partition {
        let longest = self.entries.iter().map(|e| e.blocks.len()).max().unwrap_or(0);
        let parts = (0..longest).map(|k| self.entries.iter().map(|e| e.blocks.part(k)).sum()).collect();
        Partition::new(parts).expect("row sums are positive")
    }

    /// The label with the most blocks; ties go to the smallest label.
    pub fn max_count_label(&self) -> Option<Label> {
        let best = self.max_block_count();
        self.entries.iter().find(|e| e.blocks.len() == best).map(|e| e.label)
    }

    /// Labels attaining the maximal block count.
    pub fn max_count_labels(&self) -> Vec<Label> {
        let best = self.max_block_count();
        self.entries.iter().filter(|e| e.blocks.len() == best).map(|e| e.label).collect()
    }

    /// Decreases by one the `k` smallest blocks of `label` and deletes
    /// blocks of size zero.
    pub fn shrink_smallest(&self, label: Label, k: usize) -> Result<Self> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            if e.label != label {
                entries.push((e.label, e.blocks.clone()));
                continue;
            }
            let mut parts = e.blocks.parts().to_vec();
            if k > parts.len() {
                return Err(Error::InvalidForm(format!("cannot shrink {k} blocks of {}", e.blocks)));
            }
            let len = parts.len();
            for part in &mut parts[len - k..] {
                *part -= 1;
            }
            let shrunk = Partition::from_parts_dropping_zeros(parts);
            if !shrunk.is_empty() {
                entries.push((e.label, shrunk));
            }
        }
        if self.blocks_of(label).is_none() {
            return Err(Error::InvalidForm(format!("no label {label}")));
        }
        JordanNormalForm::new(entries)
    }
}

impl fmt::Display for JordanNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}:{}", e.label, e.blocks)?;
        }
        write!(f, "}}")
    }
}

pub fn to_diagonal(j: &JordanNormalForm) -> MultiplicityVector {
    j.to_diagonal()
}

pub fn to_single_eigenvalue(j: &JordanNormalForm) -> Partition {
    j.to_single_eigenvalue()
}

pub fn rank_defect(j: &JordanNormalForm) -> usize {
    j.rank_defect()
}

pub fn orbit_dimension(j: &JordanNormalForm) -> usize {
    j.orbit_dimension()
}

/// gcd of all non-zero components; a PMV is simple iff this is 1.
pub fn pmv_gcd(pmv: &[MultiplicityVector]) -> u64 {
    pmv.iter().flat_map(|mv| mv.components().iter()).fold(0u64, |g, &c| g.gcd(&(c as u64)))
}

/// A tuple of Jordan normal forms of one common size, optionally with
/// eigenvalues bound to their labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTuple {
    flavor: Flavor,
    forms: Vec<JordanNormalForm>,
    eigenvalues: Option<EigenvalueAssignment>,
}

impl ClassTuple {
    pub fn new(flavor: Flavor, forms: Vec<JordanNormalForm>) -> Result<Self> {
        if forms.len() < 2 {
            return Err(Error::InvalidTuple(format!("need at least two classes, got {}", forms.len())));
        }
        let n = forms[0].n();
        if let Some(bad) = forms.iter().find(|f| f.n() != n) {
            return Err(Error::InvalidTuple(format!("sizes differ: {n} vs {}", bad.n())));
        }
        Ok(ClassTuple { flavor, forms, eigenvalues: None })
    }

    /// Diagonal classes from a polymultiplicity vector.
    pub fn from_pmv(flavor: Flavor, pmv: &[MultiplicityVector]) -> Result<Self> {
        ClassTuple::new(flavor, pmv.iter().map(JordanNormalForm::diagonal).collect())
    }

    /// Attaches eigenvalues. The `k`-th value of class `j` is bound to the
    /// `k`-th entry (in label order) of form `j`, and multiplicities must
    /// agree.
    pub fn with_eigenvalues(mut self, a: EigenvalueAssignment) -> Result<Self> {
        if a.flavor() != self.flavor {
            return Err(Error::InvalidTuple("assignment flavor differs from tuple flavor".into()));
        }
        if a.classes().len() != self.forms.len() {
            return Err(Error::InvalidTuple(format!(
                "assignment has {} classes, tuple has {}",
                a.classes().len(),
                self.forms.len()
            )));
        }
        for (j, (form, class)) in self.forms.iter().zip(a.classes()).enumerate() {
            let mults: Vec<usize> = class.iter().map(|(_, m)| *m).collect();
            if mults != form.multiplicities() {
                return Err(Error::InvalidTuple(format!(
                    "class {j}: assignment multiplicities {mults:?} differ from form {:?}",
                    form.multiplicities()
                )));
            }
        }
        self.eigenvalues = Some(a);
        Ok(self)
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn forms(&self) -> &[JordanNormalForm] {
        &self.forms
    }

    pub fn eigenvalues(&self) -> Option<&EigenvalueAssignment> {
        self.eigenvalues.as_ref()
    }

    pub fn n(&self) -> usize {
        self.forms[0].n()
    }

    /// `p + 1`.
    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    /// PMV of the diagonal correspondents.
    pub fn diagonal_pmv(&self) -> Vec<MultiplicityVector> {
        self.forms.iter().map(JordanNormalForm::to_diagonal).collect()
    }

    /// PMV formed by the algebraic multiplicities of the eigenvalues.
    pub fn eigenvalue_pmv(&self) -> Vec<MultiplicityVector> {
        self.forms
            .iter()
            .map(|f| MultiplicityVector::new(f.multiplicities()).expect("positive multiplicities"))
            .collect()
    }

    /// gcd over all `(j, label, size)` of the number of blocks of that size.
    pub fn block_count_gcd(&self) -> u64 {
        block_count_gcd(&self.forms)
    }
}

/// gcd of the numbers of Jordan blocks of each size, per class and label.
pub fn block_count_gcd(forms: &[JordanNormalForm]) -> u64 {
    let mut g = 0u64;
    for form in forms {
        for e in form.entries() {
            let mut parts = e.blocks.parts().to_vec();
            parts.dedup();
            for size in parts {
                g = g.gcd(&(e.blocks.count_of(size) as u64));
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn mv(v: &[usize]) -> MultiplicityVector {
        MultiplicityVector::new(v.to_vec()).unwrap()
    }

    fn two_label() -> JordanNormalForm {
        JordanNormalForm::new(vec![(Label(0), p(&[4, 3, 2])), (Label(1), p(&[3, 1]))]).unwrap()
    }

    #[test]
    fn to_diagonal_examples() {
        assert_eq!(two_label().to_diagonal(), mv(&[3, 3, 2, 2, 1, 1, 1]));
        let diag = JordanNormalForm::diagonal(&mv(&[3, 2, 2]));
        assert!(diag.is_diagonal());
        assert_eq!(diag.to_diagonal(), mv(&[3, 2, 2]));
        let block = JordanNormalForm::single_eigenvalue(p(&[5])).unwrap();
        assert_eq!(block.to_diagonal(), mv(&[1, 1, 1, 1, 1]));
    }

    #[test]
    fn to_single_eigenvalue_examples() {
        let single = two_label().to_single_eigenvalue();
        assert_eq!(single, p(&[7, 4, 2]));
        // independent route: the single-eigenvalue form is the dual of the diagonal MV
        assert_eq!(single, two_label().to_diagonal().as_partition().dual());
        let scalar = JordanNormalForm::diagonal(&mv(&[4]));
        assert_eq!(scalar.to_single_eigenvalue(), Partition::ones(4));
        let already = JordanNormalForm::single_eigenvalue(p(&[3, 3, 1])).unwrap();
        assert_eq!(already.to_single_eigenvalue(), p(&[3, 3, 1]));
    }

    #[test]
    fn rank_defect_examples() {
        assert_eq!(two_label().n(), 13);
        assert_eq!(two_label().rank_defect(), 10);
        assert_eq!(JordanNormalForm::diagonal(&mv(&[3, 3, 2, 2, 1, 1, 1])).rank_defect(), 10);
        assert_eq!(JordanNormalForm::diagonal(&mv(&[1, 1])).rank_defect(), 1);
    }

    #[test]
    fn orbit_dimension_examples() {
        let j = JordanNormalForm::single_eigenvalue(p(&[4, 3, 2])).unwrap();
        assert_eq!(j.orbit_dimension(), 58);
        assert_eq!(JordanNormalForm::diagonal(&mv(&[3, 3, 2, 1])).orbit_dimension(), 81 - 23);
        assert_eq!(JordanNormalForm::diagonal(&mv(&[2, 2])).orbit_dimension(), 8);
        assert_eq!(JordanNormalForm::diagonal(&mv(&[6])).orbit_dimension(), 0);
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(pmv_gcd(&[mv(&[2, 2]), mv(&[2, 2]), mv(&[2, 2])]), 2);
        assert_eq!(pmv_gcd(&[mv(&[1, 1]), mv(&[1, 1]), mv(&[1, 1])]), 1);
        assert_eq!(pmv_gcd(&[mv(&[2, 1, 1]), mv(&[2, 1, 1]), mv(&[2, 2])]), 1);

        let f = JordanNormalForm::single_eigenvalue(p(&[2, 2])).unwrap();
        let t = ClassTuple::new(Flavor::Multiplicative, vec![f.clone(), f.clone(), f]).unwrap();
        assert_eq!(t.block_count_gcd(), 2);
        let g = JordanNormalForm::new(vec![(Label(0), p(&[3, 3, 1, 1, 1, 1])), (Label(1), p(&[2; 6]))]).unwrap();
        assert_eq!(block_count_gcd(&[g]), 2);
        let h = JordanNormalForm::new(vec![(Label(0), p(&[2, 2])), (Label(1), p(&[1]))]).unwrap();
        assert_eq!(block_count_gcd(&[h]), 1);
    }

    #[test]
    fn shrink_smallest_later_blocks_first() {
        let j = JordanNormalForm::single_eigenvalue(p(&[3, 2, 1, 1])).unwrap();
        let s = j.shrink_smallest(Label(0), 3).unwrap();
        assert_eq!(s.blocks_of(Label(0)).unwrap(), &p(&[3, 1]));
        let d = JordanNormalForm::diagonal(&mv(&[1, 1]));
        let s = d.shrink_smallest(Label(0), 1).unwrap();
        assert_eq!(s.n(), 1);
        assert_eq!(s.entries().len(), 1);
    }

    #[test]
    fn form_rejects_duplicates_and_serde_checks_n() {
        assert!(JordanNormalForm::new(vec![(Label(0), p(&[1])), (Label(0), p(&[2]))]).is_err());
        let json = serde_json::to_string(&two_label()).unwrap();
        let back: JordanNormalForm = serde_json::from_str(&json).unwrap();
        assert_eq!(back, two_label());
        let bad = json.replace("\"n\":13", "\"n\":12");
        assert!(serde_json::from_str::<JordanNormalForm>(&bad).is_err());
    }
}
