//! One-stop container: a group together with its classified irreps and the
//! realifications of every potentially-real irrep.

use std::fmt;

use crate::group::{FiniteRotationGroup, GroupName};
use crate::io::DataError;
use crate::irreps::{classify, load_irreps, Irrep, IrrepError, Realness};
use crate::realify::{realify_irrep, RealificationResult, RealifyError};

#[derive(Debug)]
pub enum BuildError {
    Data(DataError),
    Irrep(IrrepError),
    Realify(RealifyError),
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::Data(e) => write!(f, "data error: {e}"),
            BuildError::Irrep(e) => write!(f, "irrep error: {e}"),
            BuildError::Realify(e) => write!(f, "realification error: {e}"),
        }
    }
}

impl std::error::Error for BuildError {}

impl From<DataError> for BuildError {
    fn from(e: DataError) -> Self {
        BuildError::Data(e)
    }
}

impl From<IrrepError> for BuildError {
    fn from(e: IrrepError) -> Self {
        BuildError::Irrep(e)
    }
}

impl From<RealifyError> for BuildError {
    fn from(e: RealifyError) -> Self {
        BuildError::Realify(e)
    }
}

/// A rotation group with classified irreps and real irrep matrices.
///
/// Immutable after [`SymmetrySystem::load`]; safe to share across threads.
#[derive(Clone, Debug)]
pub struct SymmetrySystem {
    pub group: FiniteRotationGroup,
    pub irreps: Vec<Irrep>,
    /// Indexed like `irreps`; `None` for irreps that are not potentially real.
    pub realifications: Vec<Option<RealificationResult>>,
}

impl SymmetrySystem {
    pub fn load(name: GroupName) -> Result<Self, BuildError> {
        let group = FiniteRotationGroup::build(name)?;
        let mut irreps = load_irreps(&group)?;
        for irrep in &mut irreps {
            classify(irrep, &group)?;
        }
        let mut realifications = Vec::with_capacity(irreps.len());
        for irrep in &irreps {
            if irrep.realness == Realness::PotentiallyReal {
                realifications.push(Some(realify_irrep(irrep, &group)?));
            } else {
                realifications.push(None);
            }
        }
        Ok(SymmetrySystem { group, irreps, realifications })
    }

    /// 0-based indices of the potentially-real irreps, ascending.
    pub fn potentially_real_indices(&self) -> Vec<usize> {
        self.irreps
            .iter()
            .enumerate()
            .filter(|(_, i)| i.realness == Realness::PotentiallyReal)
            .map(|(idx, _)| idx)
            .collect()
    }

    /// Looks up an irrep by its 1-based index `p`.
    pub fn irrep(&self, p: usize) -> Option<&Irrep> {
        self.irreps.get(p.checked_sub(1)?)
    }
}
