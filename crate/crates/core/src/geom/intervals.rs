use std::f64::consts::TAU;

/// Reduce an angle to `[0, 2π)`.
pub fn normalize_angle(a: f64) -> f64 {
    if (0.0..TAU).contains(&a) {
        return a;
    }
    if (-TAU..0.0).contains(&a) && a + TAU < TAU {
        return a + TAU;
    }
    let r = a.rem_euclid(TAU);
    // rem_euclid can return TAU itself for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Absolute angular distance between two directions, in `[0, π]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = normalize_angle(a - b);
    d.min(TAU - d)
}

/// A measurable subset of the circle, stored as sorted, pairwise disjoint
/// closed intervals inside `[0, 2π]`.
///
/// Arcs that cross the zero direction are split in two, so the set
/// `[5.9, 0.2]` (wrapping) is held as `[0, 0.2] ∪ [5.9, 2π]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AngularIntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl AngularIntervalSet {
    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    pub fn full() -> Self {
        Self {
            intervals: vec![(0.0, TAU)],
        }
    }

    /// Build a normalized set from arcs given as `(start, end)` with
    /// `end >= start`; angles may lie outside `[0, 2π)`. Arcs whose width
    /// reaches `2π` make the whole circle. Degenerate arcs are dropped.
    pub fn from_arcs<I>(arcs: I) -> Self
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut raw = Vec::new();
        for (start, end) in arcs {
            let width = end - start;
            if !(width > 0.0) {
                continue;
            }
            if width >= TAU {
                return Self::full();
            }
            let s = normalize_angle(start);
            let e = s + width;
            if e > TAU {
                raw.push((s, TAU));
                raw.push((0.0, e - TAU));
            } else {
                raw.push((s, e));
            }
        }
        Self::from_sorted_merge(raw, 0.0)
    }

    fn from_sorted_merge(mut raw: Vec<(f64, f64)>, tol: f64) -> Self {
        raw.retain(|&(s, e)| e > s);
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (s, e) in raw {
            match out.last_mut() {
                Some(last) if s <= last.1 + tol => {
                    if e > last.1 {
                        last.1 = e;
                    }
                }
                _ => out.push((s, e)),
            }
        }
        Self { intervals: out }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Total angular measure, in radians.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().fold(0.0, |acc, (s, e)| acc + (e - s)).min(TAU)
    }

    /// Whether the set covers the whole circle up to gaps of at most `tol`
    /// radians.
    pub fn covers_circle(&self, tol: f64) -> bool {
        let merged = Self::from_sorted_merge(self.intervals.clone(), tol);
        match merged.intervals.as_slice() {
            [(s, e)] => *s <= tol && *e >= TAU - tol,
            _ => false,
        }
    }

    pub fn contains(&self, angle: f64) -> bool {
        let a = normalize_angle(angle);
        self.intervals.iter().any(|&(s, e)| a >= s && a <= e)
            || (a == 0.0 && self.intervals.last().is_some_and(|l| l.1 >= TAU))
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut raw = self.intervals.clone();
        raw.extend_from_slice(&other.intervals);
        Self::from_sorted_merge(raw, 0.0)
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        let mut cursor = 0.0;
        for &(s, e) in &self.intervals {
            if s > cursor {
                out.push((cursor, s));
            }
            cursor = cursor.max(e);
        }
        if cursor < TAU {
            out.push((cursor, TAU));
        }
        Self { intervals: out }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.complement().union(&other.complement()).complement()
    }
}

/// Fraction of the full circle covered by `set`.
pub fn arc_fraction(set: &AngularIntervalSet) -> f64 {
    (set.measure() / TAU).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn fractions_of_simple_sets() {
        assert_eq!(arc_fraction(&AngularIntervalSet::empty()), 0.0);
        assert_eq!(arc_fraction(&AngularIntervalSet::full()), 1.0);
        let half = AngularIntervalSet::from_arcs([(1.0, 1.0 + PI)]);
        assert!((arc_fraction(&half) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn wrapping_arc_is_split() {
        let s = AngularIntervalSet::from_arcs([(-0.1, 0.2)]);
        assert_eq!(s.intervals().len(), 2);
        assert!((s.measure() - 0.3).abs() < 1e-12);
        assert!(s.contains(0.0));
        assert!(s.contains(TAU - 0.05));
        assert!(!s.contains(1.0));
    }

    #[test]
    fn overlapping_arcs_merge() {
        let s = AngularIntervalSet::from_arcs([(0.5, 1.0), (0.8, 1.5), (2.0, 2.1)]);
        assert_eq!(s.intervals(), &[(0.5, 1.5), (2.0, 2.1)]);
    }

    #[test]
    fn covers_circle_tolerates_rounding_gaps() {
        let s = AngularIntervalSet::from_arcs([(0.0, 3.0), (3.0 + 1e-14, TAU)]);
        assert!(s.covers_circle(1e-12));
        let gap = AngularIntervalSet::from_arcs([(0.0, 3.0), (3.001, TAU)]);
        assert!(!gap.covers_circle(1e-12));
    }

    fn arcs_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-10.0f64..10.0, 0.0f64..3.0), 0..12)
            .prop_map(|v| v.into_iter().map(|(s, w)| (s, s + w)).collect())
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent(arcs in arcs_strategy()) {
            let s = AngularIntervalSet::from_arcs(arcs);
            let again = AngularIntervalSet::from_arcs(s.intervals().iter().copied());
            prop_assert_eq!(s.intervals().len(), again.intervals().len());
            prop_assert!((s.measure() - again.measure()).abs() < 1e-12);
        }

        #[test]
        fn complement_round_trip_preserves_measure(arcs in arcs_strategy()) {
            let s = AngularIntervalSet::from_arcs(arcs);
            let c = s.complement();
            prop_assert!((s.measure() + c.measure() - TAU).abs() < 1e-9);
            let back = c.complement();
            prop_assert!((back.measure() - s.measure()).abs() < 1e-9);
            prop_assert!(s.intersection(&c).measure() < 1e-9);
            prop_assert!((s.union(&c).measure() - TAU).abs() < 1e-9);
        }

        #[test]
        fn intervals_stay_sorted_and_disjoint(arcs in arcs_strategy()) {
            let s = AngularIntervalSet::from_arcs(arcs);
            for w in s.intervals().windows(2) {
                prop_assert!(w[0].1 < w[1].0);
            }
            for &(a, b) in s.intervals() {
                prop_assert!(a >= 0.0 && b <= TAU && a < b);
            }
        }
    }
}
