use crate::error::{FastError, Result};
use crate::mapping::FermionOperator;

#[derive(Clone, Debug, PartialEq)]
pub struct Target {
    pub label: String,
    pub op: FermionOperator,
}

impl Target {
    pub fn new(label: impl Into<String>, op: FermionOperator) -> Target {
        Target {
            label: label.into(),
            op,
        }
    }
}

/// Left (`A`) and right (`B`) operator lists; a run estimates every pair.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetSet {
    pub a: Vec<Target>,
    pub b: Vec<Target>,
}

impl TargetSet {
    pub fn new(a: Vec<Target>, b: Vec<Target>) -> Result<TargetSet> {
        let modes = a.first().or(b.first()).map(|t| t.op.modes());
        if a.is_empty() || b.is_empty() {
            return Err(FastError::Config("target lists must be nonempty".into()));
        }
        if a.iter().chain(&b).any(|t| Some(t.op.modes()) != modes) {
            return Err(FastError::Config("targets act on different mode counts".into()));
        }
        Ok(TargetSet { a, b })
    }

    pub fn single(a: FermionOperator, b: FermionOperator) -> TargetSet {
        TargetSet {
            a: vec![Target::new("A", a)],
            b: vec![Target::new("B", b)],
        }
    }

    pub fn modes(&self) -> usize {
        self.a[0].op.modes()
    }

    /// `A_i = n_i`, `B_j = n_j`.
    pub fn density(modes: usize) -> Result<TargetSet> {
        let ops = (0..modes)
            .map(|i| Ok(Target::new(format!("n{i}"), FermionOperator::number(modes, i)?)))
            .collect::<Result<Vec<_>>>()?;
        TargetSet::new(ops.clone(), ops)
    }

    /// `A_a = c_a`, `B_b = c_b†`.
    pub fn green(modes: usize) -> Result<TargetSet> {
        let a = (0..modes)
            .map(|i| Ok(Target::new(format!("c{i}"), FermionOperator::annihilation(modes, i)?)))
            .collect::<Result<Vec<_>>>()?;
        let b = (0..modes)
            .map(|i| Ok(Target::new(format!("c{i}^"), FermionOperator::creation(modes, i)?)))
            .collect::<Result<Vec<_>>>()?;
        TargetSet::new(a, b)
    }

    /// Every `c_k† c_l` on both sides.
    pub fn hopping(modes: usize) -> Result<TargetSet> {
        let mut ops = Vec::with_capacity(modes * modes);
        for k in 0..modes {
            for l in 0..modes {
                ops.push(Target::new(format!("c{k}^c{l}"), FermionOperator::hopping(modes, k, l)?));
            }
        }
        TargetSet::new(ops.clone(), ops)
    }

    /// Bond currents `J_{i,i+1}` on both sides.
    pub fn current(modes: usize, amplitude: f64) -> Result<TargetSet> {
        if modes < 2 {
            return Err(FastError::Config("currents need at least two modes".into()));
        }
        let ops = (0..modes - 1)
            .map(|i| {
                Ok(Target::new(
                    format!("J{i}{}", i + 1),
                    FermionOperator::current(modes, i, i + 1, amplitude)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        TargetSet::new(ops.clone(), ops)
    }
}
