//! Interval distances and the bottleneck distance between barcodes.

use std::collections::BTreeMap;

use crate::persistence::{Barcode, Grade};

/// An interval `[birth, death)` or the empty interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedInterval {
    Empty,
    Bar { birth: f64, death: f64 },
}

impl ExtendedInterval {
    pub fn new(birth: f64, death: f64) -> Self {
        ExtendedInterval::Bar { birth, death }
    }

    fn half_length(self) -> f64 {
        match self {
            ExtendedInterval::Empty => 0.0,
            ExtendedInterval::Bar { birth, death } => (death - birth) / 2.0,
        }
    }
}

/// Matching cost between two extended intervals.
pub type Cost = fn(ExtendedInterval, ExtendedInterval) -> f64;

/// Endpoint distance `π`.
pub fn pi_distance(a: ExtendedInterval, b: ExtendedInterval) -> f64 {
    use ExtendedInterval::*;
    match (a, b) {
        (Empty, Empty) => 0.0,
        (Empty, i) | (i, Empty) => i.half_length(),
        (Bar { birth: a0, death: a1 }, Bar { birth: b0, death: b1 }) => {
            match (a1.is_infinite(), b1.is_infinite()) {
                (true, true) => (a0 - b0).abs(),
                (false, false) => (a0 - b0).abs().max((a1 - b1).abs()),
                _ => f64::INFINITY,
            }
        }
    }
}

/// Interleaving distance between two interval modules.
pub fn interval_interleaving(a: ExtendedInterval, b: ExtendedInterval) -> f64 {
    use ExtendedInterval::*;
    match (a, b) {
        (Bar { .. }, Bar { .. }) => {
            let both_dead = a.half_length().max(b.half_length());
            both_dead.min(pi_distance(a, b))
        }
        _ => pi_distance(a, b),
    }
}

/// Hopcroft–Karp on a bipartite graph with `n` left and `n` right vertices.
/// Returns whether a perfect matching exists.
fn has_perfect_matching(adj: &[Vec<usize>], n: usize) -> bool {
    const NONE: usize = usize::MAX;
    let mut left = vec![NONE; n];
    let mut right = vec![NONE; n];
    let mut layer = vec![0usize; n];
    let mut matched = 0;

    fn augment(u: usize, adj: &[Vec<usize>], left: &mut [usize], right: &mut [usize], layer: &mut [usize]) -> bool {
        for &v in &adj[u] {
            let w = right[v];
            if w == usize::MAX || (layer[w] == layer[u] + 1 && augment(w, adj, left, right, layer)) {
                left[u] = v;
                right[v] = u;
                return true;
            }
        }
        layer[u] = usize::MAX;
        false
    }

    loop {
        let mut queue = std::collections::VecDeque::new();
        for u in 0..n {
            if left[u] == NONE {
                layer[u] = 0;
                queue.push_back(u);
            } else {
                layer[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match right[v] {
                    NONE => found = true,
                    w if layer[w] == usize::MAX => {
                        layer[w] = layer[u] + 1;
                        queue.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            break;
        }
        for u in 0..n {
            if left[u] == NONE && augment(u, adj, &mut left, &mut right, &mut layer) {
                matched += 1;
            }
        }
    }
    matched == n
}

/// Bottleneck distance between two multisets of intervals under `cost`.
///
/// Each side is padded with one empty interval per interval of the other side.
pub fn interval_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)], cost: Cost) -> f64 {
    let (k, l) = (a.len(), b.len());
    let n = k + l;
    if n == 0 {
        return 0.0;
    }
    let ia: Vec<ExtendedInterval> = a.iter().map(|&(x, y)| ExtendedInterval::new(x, y)).collect();
    let ib: Vec<ExtendedInterval> = b.iter().map(|&(x, y)| ExtendedInterval::new(x, y)).collect();
    // left: a_0..a_k, then empties for b; right: b_0..b_l, then empties for a
    let mut weights = vec![vec![f64::INFINITY; n]; n];
    for u in 0..k {
        for v in 0..l {
            weights[u][v] = cost(ia[u], ib[v]);
        }
        weights[u][l + u] = cost(ia[u], ExtendedInterval::Empty);
    }
    for v in 0..l {
        weights[k + v][v] = cost(ExtendedInterval::Empty, ib[v]);
        for u in 0..k {
            weights[k + v][l + u] = 0.0;
        }
    }
    let mut candidates: Vec<f64> = weights.iter().flatten().copied().filter(|c| c.is_finite()).collect();
    candidates.push(0.0);
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let feasible = |limit: f64| {
        let adj: Vec<Vec<usize>> = weights
            .iter()
            .map(|row| (0..n).filter(|&v| row[v] <= limit).collect())
            .collect();
        has_perfect_matching(&adj, n)
    };
    if !feasible(*candidates.last().unwrap()) {
        return f64::INFINITY;
    }
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

fn by_grade(b: &Barcode, graded: bool) -> BTreeMap<Option<Grade>, Vec<(f64, f64)>> {
    let mut out: BTreeMap<Option<Grade>, Vec<(f64, f64)>> = BTreeMap::new();
    for bar in b.bars() {
        let key = graded.then_some(bar.grade);
        out.entry(key).or_default().push((bar.birth, bar.death));
    }
    out
}

/// Bottleneck distance under an arbitrary matching cost.
///
/// With `graded`, bars only match bars of the same grade and the result is the
/// maximum over grades.
pub fn bottleneck_with_cost(a: &Barcode, b: &Barcode, graded: bool, cost: Cost) -> f64 {
    let ga = by_grade(a, graded);
    let gb = by_grade(b, graded);
    let keys: std::collections::BTreeSet<_> = ga.keys().chain(gb.keys()).copied().collect();
    keys.into_iter()
        .map(|g| {
            let empty = Vec::new();
            interval_bottleneck(
                ga.get(&g).unwrap_or(&empty),
                gb.get(&g).unwrap_or(&empty),
                cost,
            )
        })
        .fold(0.0, f64::max)
}

/// `W_∞` with the endpoint cost `π`.
pub fn bottleneck(a: &Barcode, b: &Barcode, graded: bool) -> f64 {
    bottleneck_with_cost(a, b, graded, pi_distance)
}

/// Interleaving distance of the modules with barcodes `a` and `b`, read off as
/// their grade-matched bottleneck distance.
pub fn interleaving_via_isometry(a: &Barcode, b: &Barcode) -> f64 {
    bottleneck(a, b, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hochster::Bigrade;
    use crate::persistence::Bar;
    use proptest::prelude::*;

    fn bars(intervals: &[(f64, f64)]) -> Barcode {
        Barcode::new(intervals.iter().map(|&(b, d)| Bar::new(Grade::Degree(0), b, d)).collect())
    }

    fn i(b: f64, d: f64) -> ExtendedInterval {
        ExtendedInterval::new(b, d)
    }

    #[test]
    fn interval_costs() {
        assert_eq!(pi_distance(i(0.0, 5.0), i(1.0, 7.0)), 2.0);
        assert_eq!(pi_distance(ExtendedInterval::Empty, i(3.0, 9.0)), 3.0);
        assert_eq!(pi_distance(i(2.0, f64::INFINITY), ExtendedInterval::Empty), f64::INFINITY);
        assert_eq!(pi_distance(i(2.0, f64::INFINITY), i(0.5, f64::INFINITY)), 1.5);
        assert_eq!(pi_distance(i(2.0, f64::INFINITY), i(0.5, 4.0)), f64::INFINITY);
        assert_eq!(pi_distance(ExtendedInterval::Empty, ExtendedInterval::Empty), 0.0);

        assert_eq!(interval_interleaving(i(0.0, 5.0), i(1.0, 7.0)), 2.0);
        assert_eq!(interval_interleaving(i(0.0, 5.0), ExtendedInterval::Empty), 2.5);
        assert_eq!(interval_interleaving(i(1.0, 4.0), i(1.0, 4.0)), 0.0);
        // far apart short bars are cheaper to kill than to move
        assert_eq!(interval_interleaving(i(0.0, 1.0), i(10.0, 12.0)), 1.0);
    }

    #[test]
    fn golden_bottleneck_values() {
        assert_eq!(bottleneck(&bars(&[(0.0, 5.0)]), &bars(&[(1.0, 7.0)]), true), 2.0);
        assert_eq!(bottleneck(&bars(&[(0.0, 5.0)]), &bars(&[(3.0, 9.0)]), true), 3.0);
        let b = bars(&[(0.0, 1.0), (0.5, 3.0), (2.0, f64::INFINITY)]);
        assert_eq!(bottleneck(&b, &b, true), 0.0);
        assert_eq!(bottleneck(&Barcode::default(), &Barcode::default(), true), 0.0);
    }

    #[test]
    fn infinite_bars_only_match_infinite_bars() {
        let a = bars(&[(0.0, f64::INFINITY)]);
        assert_eq!(bottleneck(&a, &bars(&[(0.0, 100.0)]), true), f64::INFINITY);
        assert_eq!(bottleneck(&a, &bars(&[(0.25, f64::INFINITY)]), true), 0.25);
    }

    #[test]
    fn grading_restricts_matchings() {
        let g1 = Grade::Bigrade(Bigrade::new(1, 2));
        let g2 = Grade::Bigrade(Bigrade::new(1, 3));
        let a = Barcode::new(vec![Bar::new(g1, 0.0, 4.0)]);
        let b = Barcode::new(vec![Bar::new(g2, 0.0, 4.0)]);
        assert_eq!(bottleneck(&a, &b, true), 2.0);
        assert_eq!(bottleneck(&a, &b, false), 0.0);
    }

    fn arb_barcode() -> impl Strategy<Value = Barcode> {
        proptest::collection::vec((0u8..3, 0.0f64..10.0, 0.01f64..10.0), 0..6).prop_map(|v| {
            Barcode::new(
                v.into_iter()
                    .map(|(g, b, len)| Bar::new(Grade::Degree(g as isize), b, b + len))
                    .collect(),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn costs_give_the_same_bottleneck(a in arb_barcode(), b in arb_barcode(), graded in any::<bool>()) {
            let pi = bottleneck_with_cost(&a, &b, graded, pi_distance);
            let il = bottleneck_with_cost(&a, &b, graded, interval_interleaving);
            prop_assert!((pi - il).abs() <= 1e-12, "{} vs {}", pi, il);
        }

        #[test]
        fn pseudo_metric(a in arb_barcode(), b in arb_barcode(), c in arb_barcode()) {
            let ab = bottleneck(&a, &b, true);
            prop_assert_eq!(ab, bottleneck(&b, &a, true));
            prop_assert_eq!(bottleneck(&a, &a, true), 0.0);
            prop_assert!(bottleneck(&a, &c, true) <= ab + bottleneck(&b, &c, true) + 1e-12);
        }

        #[test]
        fn direct_sums(a1 in arb_barcode(), b1 in arb_barcode(), a2 in arb_barcode(), b2 in arb_barcode()) {
            let joint = bottleneck(&a1.merged(&a2), &b1.merged(&b2), true);
            let parts = bottleneck(&a1, &b1, true).max(bottleneck(&a2, &b2, true));
            prop_assert!(joint <= parts + 1e-12);
        }
    }
}
