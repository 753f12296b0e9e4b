//! Sturm chains for counting positive real roots, and the pole count of the
//! tangent-matching function.
//!
//! The poles of `E(y)` are the zeros of `1 + P(y)`, i.e. of
//! `f0 = C^2 + D^2 + A C + B D`, which is a polynomial in `x = y^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plant::NormalizedPlant;
use crate::poly::Poly;

/// Relative size below which a remainder counts as identically zero.
pub const REMAINDER_TOL: f64 = 1e-12;

/// Chain `f0, f1 = f0', f2 = -rem(f0, f1), ...`.
///
/// Members are stored max-norm scaled; scaling by a positive factor keeps
/// every sign the chain is used for.
#[derive(Clone, Debug, PartialEq)]
pub struct SturmChain {
    members: Vec<Poly>,
}

/// Signs of each chain member at `x = 0` and `x = +inf`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignTable {
    pub at_zero: Vec<i8>,
    pub at_infinity: Vec<i8>,
    pub changes_at_zero: usize,
    pub changes_at_infinity: usize,
}

impl SignTable {
    pub fn positive_roots(&self) -> usize {
        self.changes_at_zero.saturating_sub(self.changes_at_infinity)
    }
}

fn normalized(p: &Poly) -> Poly {
    let m = p.max_abs();
    if m == 0.0 {
        p.clone()
    } else {
        p.scale(1.0 / m)
    }
}

fn sign_of(x: f64, tol: f64) -> i8 {
    if x > tol {
        1
    } else if x < -tol {
        -1
    } else {
        0
    }
}

fn sign_changes(signs: &[i8]) -> usize {
    let nonzero: Vec<i8> = signs.iter().copied().filter(|s| *s != 0).collect();
    nonzero.windows(2).filter(|w| w[0] != w[1]).count()
}

impl SturmChain {
    pub fn build(poly: &Poly) -> Result<SturmChain> {
        let f0 = normalized(&poly.chop(REMAINDER_TOL));
        if f0.is_zero() {
            return Err(Error::InvalidArgument("zero polynomial has no Sturm chain".into()));
        }
        let mut members = vec![f0.clone()];
        if f0.degree() == 0 {
            return Ok(SturmChain { members });
        }
        members.push(normalized(&f0.derivative()));
        loop {
            let k = members.len();
            let (prev, last) = (&members[k - 2], &members[k - 1]);
            if last.degree() == 0 {
                break;
            }
            let (_, rem) = prev.div_rem(last);
            let rem = rem.chop(REMAINDER_TOL);
            if rem.max_abs() <= REMAINDER_TOL * prev.max_abs() {
                return Err(Error::MultipleRootSuspected {
                    degree: last.degree(),
                });
            }
            members.push(normalized(&-&rem));
        }
        Ok(SturmChain { members })
    }

    pub fn members(&self) -> &[Poly] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Coefficient `psi_{i,j}` of `x^j` in member `i` (zero past its degree).
    pub fn psi(&self, i: usize, j: usize) -> f64 {
        self.members.get(i).map(|p| p.coeff(j)).unwrap_or(0.0)
    }

    pub fn sign_table(&self) -> SignTable {
        let at_zero: Vec<i8> = self
            .members
            .iter()
            .map(|p| sign_of(p.coeff(0), REMAINDER_TOL))
            .collect();
        let at_infinity: Vec<i8> = self.members.iter().map(|p| sign_of(p.leading(), 0.0)).collect();
        SignTable {
            changes_at_zero: sign_changes(&at_zero),
            changes_at_infinity: sign_changes(&at_infinity),
            at_zero,
            at_infinity,
        }
    }

    /// Number of distinct roots in `(0, +inf)`.
    pub fn count_positive_roots(&self) -> Result<usize> {
        if self.members[0].coeff(0).abs() <= REMAINDER_TOL {
            return Err(Error::EndpointIsRoot);
        }
        Ok(self.sign_table().positive_roots())
    }
}

/// Builds the chain and counts roots in `(0, +inf)`.
pub fn count_positive_roots(poly: &Poly) -> Result<usize> {
    SturmChain::build(poly)?.count_positive_roots()
}

/// `f0(x) = C^2 + D^2 + A C + B D` at `y = sqrt(x)`.
pub fn pole_polynomial(np: &NormalizedPlant) -> Poly {
    let (p_num, den) = np.p_rational();
    (den + p_num).even_part_in_square()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleCount {
    /// Poles of `E` with `y > 0`.
    pub count: usize,
    /// False when the chain broke down and a grid count was used instead.
    pub certified: bool,
    pub signs: Option<SignTable>,
}

/// Number of poles of `E(y)` on the positive frequency axis.
pub fn pole_count_of_e(np: &NormalizedPlant) -> Result<PoleCount> {
    let f0 = pole_polynomial(np);
    if f0.chop(REMAINDER_TOL).degree() == 0 {
        return Ok(PoleCount {
            count: 0,
            certified: true,
            signs: None,
        });
    }
    match SturmChain::build(&f0) {
        Ok(chain) => {
            let count = chain.count_positive_roots()?;
            Ok(PoleCount {
                count,
                certified: true,
                signs: Some(chain.sign_table()),
            })
        }
        Err(Error::MultipleRootSuspected { .. }) => Ok(PoleCount {
            count: grid_positive_roots(&f0),
            certified: false,
            signs: None,
        }),
        Err(e) => Err(e),
    }
}

/// Fallback counter: sign changes of `f` on a dense grid up to its Cauchy
/// bound, sampled in `y = sqrt(x)`.
fn grid_positive_roots(f: &Poly) -> usize {
    let y_max = f.cauchy_bound().sqrt() * 1.01 + 1e-9;
    let steps = 20_000usize;
    let mut count = 0;
    let mut prev = f.eval(0.0);
    for k in 1..=steps {
        let y = y_max * k as f64 / steps as f64;
        let cur = f.eval(y * y);
        if cur != 0.0 && prev != 0.0 && (cur > 0.0) != (prev > 0.0) {
            count += 1;
        }
        if cur != 0.0 {
            prev = cur;
        }
    }
    count
}
