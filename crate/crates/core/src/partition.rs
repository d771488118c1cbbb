//! Break-point evolution and normalization to `[0, 1]`.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::boundary::{Boundary, BoundarySpec};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::split::{ProportionStream, SplitSpec};
use crate::stats::dist::Cdf;

/// `(a[n][0], ..., a[n][n+1])`, listed with multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakPoints {
    pub n: usize,
    pub points: Vec<f64>,
}

impl BreakPoints {
    /// The trivial partition `(a[0][0], a[0][1])`.
    pub fn initial(left: f64, right: f64) -> Result<Self> {
        if !(left < right) {
            return Err(Error::DegenerateInterval {
                step: 0,
                length: right - left,
            });
        }
        Ok(BreakPoints {
            n: 0,
            points: alloc::vec![left, right],
        })
    }

    pub fn left(&self) -> f64 {
        self.points[0]
    }

    pub fn right(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// `l_n`.
    pub fn length(&self) -> f64 {
        self.right() - self.left()
    }

    pub fn interior(&self) -> &[f64] {
        &self.points[1..self.points.len() - 1]
    }

    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| w[0] <= w[1])
    }
}

/// One step: `a[n][k] = p[n][k] a[n-1][k-1] + (1 - p[n][k]) a[n-1][k]`, then new end points.
pub fn evolve_step(prev: &BreakPoints, proportions: &[f64], boundary: (f64, f64)) -> Result<BreakPoints> {
    let mut next = prev.clone();
    evolve_in_place(&mut next, proportions, boundary)?;
    Ok(next)
}

/// [`evolve_step`] reusing the allocation of `bp`. On error `bp` is unchanged.
pub fn evolve_in_place(bp: &mut BreakPoints, proportions: &[f64], boundary: (f64, f64)) -> Result<()> {
    let n = bp.n + 1;
    if proportions.len() != n {
        return Err(Error::DimensionMismatch {
            step: n,
            expected: n,
            got: proportions.len(),
        });
    }
    if bp.points.len() != n + 1 {
        return Err(Error::DimensionMismatch {
            step: bp.n,
            expected: n + 1,
            got: bp.points.len(),
        });
    }
    if let Some(k) = proportions.iter().position(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::ProportionOutOfRange {
            step: n,
            index: k + 1,
            value: proportions[k],
        });
    }
    let (left, right) = boundary;
    if !left.is_finite() {
        return Err(Error::BoundaryOverflow { step: n, index: 0 });
    }
    if !right.is_finite() {
        return Err(Error::BoundaryOverflow { step: n, index: n + 1 });
    }
    if left > bp.left() {
        return Err(Error::BoundaryNotMonotone {
            step: n,
            index: 0,
            value: left,
            previous: bp.left(),
        });
    }
    if right < bp.right() {
        return Err(Error::BoundaryNotMonotone {
            step: n,
            index: n + 1,
            value: right,
            previous: bp.right(),
        });
    }
    let a = &mut bp.points;
    a.push(right);
    for k in (1..=n).rev() {
        let p = proportions[k - 1];
        a[k] = p * a[k - 1] + (1.0 - p) * a[k];
    }
    a[0] = left;
    bp.n = n;
    Ok(())
}

/// Steps a partition forward one row at a time without keeping history.
#[derive(Debug, Clone)]
pub struct Evolver {
    boundary: Boundary,
    proportions: ProportionStream,
    current: BreakPoints,
    row: Vec<f64>,
}

impl Evolver {
    pub fn new(boundary: Boundary, proportions: ProportionStream) -> Result<Self> {
        let (left, right) = boundary.endpoints(0)?;
        Ok(Evolver {
            current: BreakPoints::initial(left, right)?,
            boundary,
            proportions,
            row: Vec::new(),
        })
    }

    /// Realizes the boundary and the split from stream `(seed, stream_id)`.
    pub fn from_specs(
        boundary: &BoundarySpec,
        split: &SplitSpec,
        n_max: usize,
        stream: Option<RngStream>,
    ) -> Result<Self> {
        Evolver::new(boundary.realize(n_max, stream)?, split.stream(stream)?)
    }

    pub fn current(&self) -> &BreakPoints {
        &self.current
    }

    pub fn boundary(&self) -> &Boundary {
        &self.boundary
    }

    pub fn step(&mut self) -> Result<&BreakPoints> {
        let n = self.current.n + 1;
        self.proportions.fill_row(n, &mut self.row)?;
        let ends = self.boundary.endpoints(n)?;
        evolve_in_place(&mut self.current, &self.row, ends)?;
        Ok(&self.current)
    }

    pub fn run_to(&mut self, n: usize) -> Result<&BreakPoints> {
        while self.current.n < n {
            self.step()?;
        }
        Ok(&self.current)
    }
}

/// All rows `0..=n_max`. Uses stream `(seed, 0)`; a seed is needed when either spec is random.
pub fn evolve(boundary: &BoundarySpec, split: &SplitSpec, n_max: usize, seed: Option<u64>) -> Result<Vec<BreakPoints>> {
    let mut ev = Evolver::from_specs(boundary, split, n_max, seed.map(|s| RngStream::new(s, 0)))?;
    let mut rows = Vec::with_capacity(n_max + 1);
    rows.push(ev.current().clone());
    for _ in 0..n_max {
        rows.push(ev.step()?.clone());
    }
    Ok(rows)
}

/// Only the last row of [`evolve`], in `O(n)` memory.
pub fn evolve_last(boundary: &BoundarySpec, split: &SplitSpec, n_max: usize, seed: Option<u64>) -> Result<BreakPoints> {
    let mut ev = Evolver::from_specs(boundary, split, n_max, seed.map(|s| RngStream::new(s, 0)))?;
    ev.run_to(n_max)?;
    Ok(ev.current)
}

/// Uniform probability on `n` atoms in `[0, 1]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(atoms: Vec<f64>) -> Self {
        EmpiricalMeasure { atoms }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Atoms in increasing order.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.atoms.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Fraction of atoms in `[lo, hi]`.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        let count = self.atoms.iter().filter(|&&x| lo <= x && x <= hi).count();
        count as f64 / self.atoms.len() as f64
    }
}

impl Cdf for EmpiricalMeasure {
    fn cdf(&self, x: f64) -> f64 {
        self.atoms.iter().filter(|&&a| a <= x).count() as f64 / self.atoms.len() as f64
    }

    fn cdf_left(&self, x: f64) -> f64 {
        self.atoms.iter().filter(|&&a| a < x).count() as f64 / self.atoms.len() as f64
    }
}

/// `alpha[n][k] = (a[n][k] - a[n][0]) / l_n` for `k = 1..=n`.
pub fn normalize(bp: &BreakPoints) -> Result<EmpiricalMeasure> {
    let l = bp.length();
    if !(l > 0.0) {
        return Err(Error::DegenerateInterval { step: bp.n, length: l });
    }
    let a0 = bp.left();
    let atoms = bp.interior().iter().map(|&a| ((a - a0) / l).clamp(0.0, 1.0)).collect();
    Ok(EmpiricalMeasure { atoms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryKind;
    use crate::split::{Proportions, SplitLaw};
    use alloc::vec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-15);
        }
    }

    #[test]
    fn first_two_iterations() {
        let p0 = BreakPoints::initial(0.0, 1.0).unwrap();
        let p1 = evolve_step(&p0, &[2.0 / 3.0], (-1.0 / 3.0, 4.0 / 3.0)).unwrap();
        close(&p1.points, &[-1.0 / 3.0, 1.0 / 3.0, 4.0 / 3.0]);
        let p2 = evolve_step(&p1, &[0.5, 2.0 / 3.0], (-1.0, 2.0)).unwrap();
        close(&p2.points, &[-1.0, 0.0, 2.0 / 3.0, 2.0]);
        assert_eq!(p2.n, 2);
    }

    #[test]
    fn zero_proportions_copy_right_parents() {
        let p = BreakPoints {
            n: 3,
            points: vec![-1.0, 0.1, 0.4, 0.7, 2.0],
        };
        let q = evolve_step(&p, &[0.0; 4], (-1.0, 2.0)).unwrap();
        assert_eq!(q.points, vec![-1.0, 0.1, 0.4, 0.7, 2.0, 2.0]);
    }

    #[test]
    fn constant_boundary_halving() {
        let spec = BoundarySpec::new(BoundaryKind::Constant, 1.0, 1.0).unwrap();
        let rows = evolve(&spec, &SplitSpec::constant(0.5).unwrap(), 2, None).unwrap();
        assert_eq!(rows[0].points, vec![0.0, 1.0]);
        assert_eq!(rows[1].points, vec![0.0, 0.5, 1.0]);
        assert_eq!(rows[2].points, vec![0.0, 0.25, 0.75, 1.0]);
    }

    #[test]
    fn n_max_zero_is_trivial() {
        let spec = BoundarySpec::power(1.0, 1.0, 0.5).unwrap();
        let rows = evolve(&spec, &SplitSpec::constant(0.5).unwrap(), 0, None).unwrap();
        assert_eq!(
            rows,
            vec![BreakPoints {
                n: 0,
                points: vec![-0.5, 0.5]
            }]
        );
        assert!(normalize(&rows[0]).unwrap().is_empty());
    }

    #[test]
    fn regular_case_lattice() {
        for &r in &[0.5, 1.0, 3.0] {
            for &p in &[0.1, 0.3, 0.5, 0.7, 0.9] {
                let spec = BoundarySpec::regular_case(r, p).unwrap();
                let mut ev = Evolver::from_specs(&spec, &SplitSpec::constant(p).unwrap(), 0, None).unwrap();
                for n in 1..=500 {
                    let bp = ev.step().unwrap();
                    for (k, a) in bp.points.iter().enumerate() {
                        let exact = r * (-p * (n + 1) as f64 + k as f64);
                        assert!((a - exact).abs() <= 1e-10, "r={r} p={p} n={n} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn normalize_examples() {
        let bp = BreakPoints {
            n: 1,
            points: vec![-1.0 / 3.0, 1.0 / 3.0, 4.0 / 3.0],
        };
        assert_abs_diff_eq!(normalize(&bp).unwrap().atoms[0], 0.4, epsilon = 1e-15);
        let degenerate = BreakPoints {
            n: 1,
            points: vec![1.0, 1.0, 1.0],
        };
        assert!(matches!(normalize(&degenerate), Err(Error::DegenerateInterval { .. })));
        // Lattice: atoms k/(n+1).
        let spec = BoundarySpec::regular_case(2.0, 0.3).unwrap();
        let bp = evolve_last(&spec, &SplitSpec::constant(0.3).unwrap(), 40, None).unwrap();
        for (i, &x) in normalize(&bp).unwrap().atoms.iter().enumerate() {
            assert_abs_diff_eq!(x, (i + 1) as f64 / 41.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn step_errors() {
        let p0 = BreakPoints::initial(0.0, 1.0).unwrap();
        assert_eq!(
            evolve_step(&p0, &[0.5, 0.5], (0.0, 1.0)),
            Err(Error::DimensionMismatch {
                step: 1,
                expected: 1,
                got: 2
            })
        );
        assert_eq!(
            evolve_step(&p0, &[0.5], (0.1, 1.0)),
            Err(Error::BoundaryNotMonotone {
                step: 1,
                index: 0,
                value: 0.1,
                previous: 0.0
            })
        );
        assert_eq!(
            evolve_step(&p0, &[0.5], (0.0, 0.9)),
            Err(Error::BoundaryNotMonotone {
                step: 1,
                index: 2,
                value: 0.9,
                previous: 1.0
            })
        );
        assert_eq!(
            evolve_step(&p0, &[1.5], (0.0, 1.0)),
            Err(Error::ProportionOutOfRange {
                step: 1,
                index: 1,
                value: 1.5
            })
        );
        assert_eq!(
            evolve_step(&p0, &[0.5], (f64::NEG_INFINITY, 1.0)),
            Err(Error::BoundaryOverflow { step: 1, index: 0 })
        );
    }

    #[test]
    fn random_specs_are_seeded() {
        let spec = BoundarySpec::new(BoundaryKind::PoissonArrivals, 1.0, 0.5).unwrap();
        let split = SplitSpec::FullyRandom(SplitLaw::Uniform);
        assert_eq!(evolve(&spec, &split, 5, None), Err(Error::MissingSeed));
        let a = evolve(&spec, &split, 50, Some(9)).unwrap();
        let b = evolve(&spec, &split, 50, Some(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[50], evolve_last(&spec, &split, 50, Some(9)).unwrap());
        assert_ne!(a, evolve(&spec, &split, 50, Some(10)).unwrap());
    }

    #[test]
    fn exponential_family_overflows_with_a_diagnostic() {
        let spec = BoundarySpec::new(BoundaryKind::Exponential, 1.0, 0.5).unwrap();
        let err = evolve_last(&spec, &SplitSpec::constant(0.5).unwrap(), 800, None).unwrap_err();
        assert!(matches!(err, Error::BoundaryOverflow { .. }));
    }

    fn arb_step() -> impl Strategy<Value = (BreakPoints, Vec<f64>, f64, f64)> {
        (1usize..30).prop_flat_map(|n| {
            (
                prop::collection::vec(-100.0f64..100.0, n + 2),
                prop::collection::vec(prop_oneof![Just(0.0), Just(1.0), 0.0f64..=1.0], n + 1),
                0.0f64..10.0,
                0.0f64..10.0,
            )
                .prop_map(move |(mut pts, p, dl, dr)| {
                    pts.sort_by(f64::total_cmp);
                    let left = pts[0] - dl;
                    let right = pts[n + 1] + dr;
                    (BreakPoints { n, points: pts }, p, left, right)
                })
        })
    }

    proptest! {
        #[test]
        fn steps_preserve_order_and_stay_in_range((bp, p, left, right) in arb_step()) {
            let next = evolve_step(&bp, &p, (left, right)).unwrap();
            prop_assert_eq!(next.points.len(), bp.n + 3);
            prop_assert!(next.is_monotone());
            for &a in next.interior() {
                prop_assert!(bp.left() <= a && a <= bp.right());
            }
            let m = normalize(&next).unwrap();
            prop_assert!(m.atoms.iter().all(|a| (0.0..=1.0).contains(a)));
        }

        #[test]
        fn deterministic_evolution_is_reproducible(p in 0.0f64..=1.0, n in 0usize..60) {
            let spec = BoundarySpec::power(1.5, 1.0, 0.3).unwrap();
            let split = SplitSpec::Deterministic(Proportions::Constant(p));
            prop_assert_eq!(evolve(&spec, &split, n, None).unwrap(), evolve(&spec, &split, n, Some(1)).unwrap());
        }
    }
}
