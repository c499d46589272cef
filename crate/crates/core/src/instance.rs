//! Data model for the forward feasible set `S`, its augmentation
//! `S+ = S ∪ {x0}`, and the inverse-problem inputs.

use num_traits::Zero;

use crate::error::Error;
use crate::rational::{is_zero_vec, Norm, Rat};

/// The forward problem data: `S = {x | Ax <= b} ∩ (Z^r × R^(n-r))` with
/// optional per-variable bounds kept separate from `A` for enumeration;
/// semantically the bounds are just more rows of `Ax <= b`.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpInstance {
    pub num_vars: usize,
    /// Count of leading integer variables (`r`); `r = n` is pure integer.
    pub num_int: usize,
    /// Rows `a' x <= b`.
    pub rows: Vec<(Vec<Rat>, Rat)>,
    pub lower: Vec<Option<Rat>>,
    pub upper: Vec<Option<Rat>>,
}

impl MilpInstance {
    pub fn new(num_vars: usize, num_int: usize) -> Self {
        MilpInstance {
            num_vars,
            num_int,
            rows: Vec::new(),
            lower: vec![None; num_vars],
            upper: vec![None; num_vars],
        }
    }

    pub fn push_row(&mut self, coeffs: Vec<Rat>, rhs: Rat) {
        assert_eq!(coeffs.len(), self.num_vars);
        self.rows.push((coeffs, rhs));
    }

    pub fn set_bounds(&mut self, var: usize, lo: Option<Rat>, hi: Option<Rat>) {
        self.lower[var] = lo;
        self.upper[var] = hi;
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pure_integer(&self) -> bool {
        self.num_int == self.num_vars
    }

    /// All variables have finite lower and upper bounds.
    pub fn is_box_bounded(&self) -> bool {
        self.lower.iter().all(Option::is_some) && self.upper.iter().all(Option::is_some)
    }

    /// Exact membership test: rows, bounds and integrality of the leading
    /// `r` components.
    pub fn contains(&self, x: &[Rat]) -> Result<bool, Error> {
        if x.len() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, got: x.len() });
        }
        for xi in x.iter().take(self.num_int) {
            if !xi.is_integer() {
                return Ok(false);
            }
        }
        for (j, xj) in x.iter().enumerate() {
            if let Some(lo) = &self.lower[j] {
                if xj < lo {
                    return Ok(false);
                }
            }
            if let Some(hi) = &self.upper[j] {
                if xj > hi {
                    return Ok(false);
                }
            }
        }
        for (coeffs, rhs) in &self.rows {
            let lhs: Rat = coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            if lhs > *rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Input to the inverse problem: forward set, target `x0`, estimate `c` and
/// the norm measuring `||c - d||`.
///
/// `x0` is not required to lie in `S`, and `c = 0` is accepted by the model;
/// operations whose characterizations assume `0 <= gamma < ||c||` reject the
/// zero estimate with [`Error::ZeroEstimate`].
#[derive(Debug, Clone, PartialEq)]
pub struct InverseInstance {
    pub forward: MilpInstance,
    pub x0: Vec<Rat>,
    pub c: Vec<Rat>,
    pub norm: Norm,
}

impl InverseInstance {
    pub fn new(
        forward: MilpInstance,
        x0: Vec<Rat>,
        c: Vec<Rat>,
        norm: Norm,
    ) -> Result<Self, Error> {
        if x0.len() != forward.num_vars {
            return Err(Error::DimensionMismatch { expected: forward.num_vars, got: x0.len() });
        }
        if c.len() != forward.num_vars {
            return Err(Error::DimensionMismatch { expected: forward.num_vars, got: c.len() });
        }
        Ok(InverseInstance { forward, x0, c, norm })
    }

    pub fn estimate_is_zero(&self) -> bool {
        is_zero_vec(&self.c)
    }

    /// Membership in `S+ = S ∪ {x0}`.
    pub fn contains_plus(&self, x: &[Rat]) -> Result<bool, Error> {
        if x.len() != self.forward.num_vars {
            return Err(Error::DimensionMismatch { expected: self.forward.num_vars, got: x.len() });
        }
        if x == self.x0.as_slice() {
            return Ok(true);
        }
        self.forward.contains(x)
    }

    /// `||c||` under the instance norm; errors on the zero estimate.
    pub fn estimate_norm(&self) -> Result<Rat, Error> {
        let n = self.norm.eval(&self.c);
        if n.is_zero() {
            return Err(Error::ZeroEstimate);
        }
        Ok(n)
    }
}

/// The desk-scale example instance used throughout the test suite:
/// `S = {x in Z^2 | 0 <= x1 <= 3, 0 <= x2 <= 1}`, `c = (2,-1)`, `x0 = (0,3)`.
#[cfg(test)]
pub(crate) fn desk_instance() -> InverseInstance {
    use crate::rational::rat;
    let mut fwd = MilpInstance::new(2, 2);
    fwd.set_bounds(0, Some(rat(0)), Some(rat(3)));
    fwd.set_bounds(1, Some(rat(0)), Some(rat(1)));
    InverseInstance::new(fwd, vec![rat(0), rat(3)], vec![rat(2), rat(-1)], Norm::Linf).unwrap()
}
