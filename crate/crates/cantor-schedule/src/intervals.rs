//! Interval sets `I_k`, grid times `T_k` and the shrinking step.

use std::cmp::Ordering;

use rug::{Integer, Rational};
use scalar_jet::{Prec, Scalar};
use serde::{Deserialize, Serialize};

use crate::rationals::{format_rational, parse_rational};
use crate::ScheduleError;

/// One closed component of `I_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub lo: Scalar,
    pub hi: Scalar,
    /// Index of the component of `I_{k-1}` containing this one.
    pub parent: Option<usize>,
}

impl Component {
    pub fn width(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Scalar {
        (&self.lo + &self.hi).mul_pow2(-1)
    }

    /// `lo ≤ r ≤ hi`, compared exactly.
    pub fn contains(&self, r: &Rational) -> bool {
        self.lo.cmp_rational(r) != Ordering::Greater && self.hi.cmp_rational(r) != Ordering::Less
    }

    fn bounds(&self) -> (Rational, Rational) {
        (self.lo.to_rational().expect("finite endpoint"), self.hi.to_rational().expect("finite endpoint"))
    }
}

/// Sorted disjoint components of `I_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSet {
    pub k: usize,
    pub components: Vec<Component>,
}

/// A grid time `p/q` together with the component of `I_{k-1}` it lies in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridTime {
    pub component: usize,
    pub time: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub lo_hex: String,
    pub hi_hex: String,
    pub parent: Option<usize>,
    pub excluded_rationals: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalSetRecord {
    pub k: usize,
    pub components: Vec<ComponentRecord>,
}

impl IntervalSet {
    /// `I_0 = [0, 1]`, labelled with stage `k`.
    pub fn unit(k: usize, p: Prec) -> Self {
        IntervalSet { k, components: vec![Component { lo: Scalar::zero(p), hi: Scalar::one(p), parent: None }] }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn max_width(&self) -> Scalar {
        self.components.iter().map(Component::width).reduce(|a, b| a.max(&b)).expect("nonempty set")
    }

    /// Indices of the children of component `parent` of the previous set.
    pub fn children(&self, parent: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.components[i].parent == Some(parent)).collect()
    }

    /// Checks the structural invariants against the parent set and the excluded rationals.
    pub fn validate(&self, parent: &IntervalSet, excluded: &[Rational]) -> Result<(), ScheduleError> {
        let bad = |m: String| Err(ScheduleError::Invalid(m));
        if self.len() != 2 * parent.len() {
            return bad(format!("{} components for {} parents", self.len(), parent.len()));
        }
        for (i, c) in self.components.iter().enumerate() {
            if c.hi <= c.lo {
                return bad(format!("component {i} is empty"));
            }
            let Some(pi) = c.parent else {
                return bad(format!("component {i} has no parent"));
            };
            let Some(pc) = parent.components.get(pi) else {
                return bad(format!("component {i} points to missing parent {pi}"));
            };
            if c.lo < pc.lo || c.hi > pc.hi {
                return bad(format!("component {i} leaves its parent"));
            }
            if let Some(r) = excluded.iter().find(|r| c.contains(r)) {
                return bad(format!("component {i} contains {}", format_rational(r)));
            }
        }
        for w in self.components.windows(2) {
            if w[0].hi >= w[1].lo {
                return bad("components overlap or touch".into());
            }
        }
        for pi in 0..parent.len() {
            if self.children(pi).len() != 2 {
                return bad(format!("parent {pi} does not have exactly two children"));
            }
        }
        Ok(())
    }

    pub fn to_record(&self, excluded: &[Rational]) -> IntervalSetRecord {
        let ex: Vec<String> = excluded.iter().map(format_rational).collect();
        IntervalSetRecord {
            k: self.k,
            components: self
                .components
                .iter()
                .map(|c| ComponentRecord {
                    lo_hex: c.lo.to_hex(),
                    hi_hex: c.hi.to_hex(),
                    parent: c.parent,
                    excluded_rationals: ex.clone(),
                })
                .collect(),
        }
    }

    /// Rebuilds the set and the rationals it records as excluded.
    pub fn from_record(r: &IntervalSetRecord, p: Prec) -> Result<(Self, Vec<Rational>), ScheduleError> {
        let hex = |s: &str| Scalar::from_hex(s, p).map_err(|e| ScheduleError::Invalid(e.to_string()));
        let components = r
            .components
            .iter()
            .map(|c| Ok(Component { lo: hex(&c.lo_hex)?, hi: hex(&c.hi_hex)?, parent: c.parent }))
            .collect::<Result<Vec<_>, ScheduleError>>()?;
        let excluded = match r.components.first() {
            Some(c) => c
                .excluded_rationals
                .iter()
                .map(|s| parse_rational(s).ok_or_else(|| ScheduleError::Invalid(format!("bad rational {s}"))))
                .collect::<Result<Vec<_>, _>>()?,
            None => vec![],
        };
        Ok((IntervalSet { k: r.k, components }, excluded))
    }
}

/// Integers `a` with `lo < a/q < hi`, smallest first.
fn interior_grid(lo: &Rational, hi: &Rational, q: u64) -> (Integer, Integer) {
    let ql = Rational::from(lo * q);
    let qh = Rational::from(hi * q);
    let first = ql.floor().into_numer_denom().0 + 1u32;
    let last = qh.ceil().into_numer_denom().0 - 1u32;
    (first, last)
}

/// Number of points of `(1/q)ℤ` strictly inside `(lo, hi)`.
pub fn interior_grid_count(lo: &Rational, hi: &Rational, q: u64) -> Integer {
    let (a, b) = interior_grid(lo, hi, q);
    if b < a {
        Integer::new()
    } else {
        b - a + 1u32
    }
}

impl IntervalSet {
    /// Exact endpoints of every component.
    pub fn exact_bounds(&self) -> Vec<(Rational, Rational)> {
        self.components.iter().map(Component::bounds).collect()
    }
}

/// The two smallest points of `(1/q)ℤ` inside each component of `parent`.
pub fn select_tk(parent: &IntervalSet, q: u64) -> Result<Vec<GridTime>, ScheduleError> {
    let mut out = Vec::with_capacity(2 * parent.len());
    for (ci, (lo, hi)) in parent.exact_bounds().iter().enumerate() {
        let (a, b) = interior_grid(lo, hi, q);
        if b < Integer::from(&a + 1u32) {
            return Err(ScheduleError::GridMiss { component: ci, q });
        }
        for num in [a.clone(), a + 1u32] {
            out.push(GridTime { component: ci, time: Rational::from((num, q)) });
        }
    }
    Ok(out)
}

/// Number of sample times per candidate interval in [`refine_ik`].
pub const DEFAULT_SAMPLES: usize = 9;

/// Closed neighbourhoods of the grid times, shrunk until they sit inside their parent,
/// avoid `r` and keep the sampled bound below `2^{-k}`.
///
/// `bound` returns the sampled distance between consecutive flows at a time.
pub fn refine_ik<F>(
    tk: &[GridTime],
    parent: &IntervalSet,
    r: &Rational,
    k: usize,
    q: u64,
    samples: usize,
    p: Prec,
    mut bound: F,
) -> Result<IntervalSet, ScheduleError>
where
    F: FnMut(&Scalar) -> Result<Scalar, ScheduleError>,
{
    if samples < 2 {
        return Err(ScheduleError::Precondition("at least two sample times per interval".into()));
    }
    let limit = Scalar::pow2(-(k as i64), p);
    let sharp = Scalar::pow2(-(k as i64) - 4, p);
    let floor_bits = p.bits() / 2;
    let floor = Rational::from(Rational::from(1) >> floor_bits);
    let bounds = parent.exact_bounds();
    let mut components = Vec::with_capacity(tk.len());
    for g in tk {
        let (plo, phi) = &bounds[g.component];
        let pc = &parent.components[g.component];
        let at = bound(&Scalar::from_rational(&g.time, p))?;
        if at > sharp {
            return Err(ScheduleError::Precondition(format!(
                "bound {} at grid time {} exceeds 2^-{}",
                at.to_f64(),
                format_rational(&g.time),
                k + 4
            )));
        }
        let dist = Rational::from(&g.time - plo).min(Rational::from(phi - &g.time));
        let mut h = Rational::from((1, 4 * q)).min(dist / 4u32);
        loop {
            if h < floor {
                return Err(ScheduleError::WidthUnderflow { center: format_rational(&g.time), bits: floor_bits });
            }
            let c = Component {
                lo: Scalar::from_rational(&Rational::from(&g.time - &h), p),
                hi: Scalar::from_rational(&Rational::from(&g.time + &h), p),
                parent: Some(g.component),
            };
            let inside = c.lo > pc.lo && c.hi < pc.hi;
            if inside && !c.contains(r) && sampled_ok(&c, samples, &limit, &mut bound)? {
                components.push(c);
                break;
            }
            h /= 2u32;
        }
    }
    components.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let out = IntervalSet { k, components };
    let mut excluded = vec![r.clone()];
    excluded.retain(|x| parent.components.iter().any(|c| c.contains(x)));
    out.validate(parent, &excluded)?;
    Ok(out)
}

/// Sample times `lo + i·(hi - lo)/(samples - 1)`.
pub fn sample_times(c: &Component, samples: usize) -> Vec<Scalar> {
    let step = c.width().div_i(samples as i64 - 1);
    (0..samples).map(|i| &c.lo + &step.mul_i(i as i64)).collect()
}

fn sampled_ok<F>(c: &Component, samples: usize, limit: &Scalar, bound: &mut F) -> Result<bool, ScheduleError>
where
    F: FnMut(&Scalar) -> Result<Scalar, ScheduleError>,
{
    for t in sample_times(c, samples) {
        if &bound(&t)? > limit {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Prec {
        Prec::new(256).unwrap()
    }

    #[test]
    fn first_grid_times() {
        let t = select_tk(&IntervalSet::unit(0, p()), 3).unwrap();
        let times: Vec<Rational> = t.into_iter().map(|g| g.time).collect();
        assert_eq!(times, [Rational::from((1, 3)), Rational::from((2, 3))]);
        assert!(matches!(select_tk(&IntervalSet::unit(0, p()), 2), Err(ScheduleError::GridMiss { .. })));
    }

    #[test]
    fn grid_count() {
        let lo = Rational::from((1, 4));
        let hi = Rational::from((5, 12));
        assert_eq!(interior_grid_count(&lo, &hi, 9), 1);
        assert_eq!(interior_grid_count(&lo, &hi, 11), 2);
        // endpoints on the grid are not interior
        assert_eq!(interior_grid_count(&Rational::from(0), &Rational::from(1), 1), 0);
    }
}
