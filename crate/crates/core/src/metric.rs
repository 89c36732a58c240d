//! Finite pseudo-metric spaces and Gromov–Hausdorff distances between them.

use crate::error::{Error, Result};

/// Absolute tolerance used for every comparison of real distances.
pub const TOLERANCE: f64 = 1e-9;

/// Default bound on `|X| * |Y|` for exact correspondence enumeration.
pub const GH_PAIR_CAP: usize = 30;

/// Default bound on `|X|` for the bijective variant.
pub const GH_BIJECTIVE_CAP: usize = 9;

/// A finite set with a symmetric, zero-diagonal distance matrix.
///
/// Distinct points may sit at distance zero. The triangle inequality is not
/// enforced on construction; see [`PseudoMetricSpace::triangle_violations`].
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoMetricSpace {
    n: usize,
    dist: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl PseudoMetricSpace {
    /// Euclidean distances between the given coordinate vectors.
    pub fn from_points<P: AsRef<[f64]>>(coords: &[P]) -> Result<Self> {
        let Some(first) = coords.first() else {
            return Err(Error::InvalidInput("a point cloud needs at least one point".into()));
        };
        let dim = first.as_ref().len();
        for (k, p) in coords.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "ragged input: point {k} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidInput(format!("point {k} has a non-finite coordinate")));
            }
        }
        let n = coords.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = coords[i]
                    .as_ref()
                    .iter()
                    .zip(coords[j].as_ref())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Ok(PseudoMetricSpace {
            n,
            dist,
            labels: None,
        })
    }

    /// A space from an explicit distance matrix.
    ///
    /// The matrix must be square, finite, nonnegative, with zero diagonal and
    /// symmetric within [`TOLERANCE`]. The upper triangle is authoritative.
    pub fn from_matrix<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput("a distance matrix needs at least one row".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.as_ref().len() != n {
                return Err(Error::InvalidInput(format!(
                    "distance matrix row {i} has {} entries, expected {n}",
                    r.as_ref().len()
                )));
            }
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            let d_ii = rows[i].as_ref()[i];
            if !d_ii.is_finite() || d_ii.abs() > TOLERANCE {
                return Err(Error::InvalidInput(format!("nonzero diagonal entry at {i}")));
            }
            for j in i + 1..n {
                let a = rows[i].as_ref()[j];
                let b = rows[j].as_ref()[i];
                if !a.is_finite() || !b.is_finite() || a < 0.0 || b < 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "entry ({i},{j}) is negative or not finite"
                    )));
                }
                if (a - b).abs() > TOLERANCE {
                    return Err(Error::InvalidInput(format!(
                        "non-symmetric matrix: d({i},{j}) = {a} but d({j},{i}) = {b}"
                    )));
                }
                dist[i * n + j] = a;
                dist[j * n + i] = a;
            }
        }
        Ok(PseudoMetricSpace {
            n,
            dist,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    /// Always false for a constructed space; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.dist[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }

    /// Triples `(x, y, z)` with `d(x,z) > d(x,y) + d(y,z) + TOLERANCE`.
    pub fn triangle_violations(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.n {
            for y in 0..self.n {
                for z in 0..self.n {
                    if self.distance(x, z) > self.distance(x, y) + self.distance(y, z) + TOLERANCE {
                        out.push((x, y, z));
                    }
                }
            }
        }
        out
    }

    /// The subspace on `points`, in the given order.
    pub fn restrict(&self, points: &[usize]) -> Result<Self> {
        if let Some(&bad) = points.iter().find(|&&p| p >= self.n) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: self.n,
            });
        }
        if points.is_empty() {
            return Err(Error::InvalidInput("cannot restrict to an empty subset".into()));
        }
        let k = points.len();
        let mut dist = vec![0.0; k * k];
        for (a, &i) in points.iter().enumerate() {
            for (b, &j) in points.iter().enumerate() {
                dist[a * k + b] = self.distance(i, j);
            }
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| points.iter().map(|&p| l[p].clone()).collect());
        Ok(PseudoMetricSpace { n: k, dist, labels })
    }

    /// `X ⊔ {x'}` with `x'` a copy of `x` at distance zero; `x'` gets index `n`.
    pub fn doubling(&self, x: usize) -> Result<Self> {
        if x >= self.n {
            return Err(Error::IndexOutOfRange {
                index: x,
                len: self.n,
            });
        }
        let n = self.n + 1;
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            let si = if i == self.n { x } else { i };
            for j in 0..n {
                let sj = if j == self.n { x } else { j };
                dist[i * n + j] = self.distance(si, sj);
            }
        }
        let labels = self.labels.as_ref().map(|l| {
            let mut l = l.clone();
            l.push(format!("{}'", l[x]));
            l
        });
        Ok(PseudoMetricSpace { n, dist, labels })
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Whether `d(x,y) >= max_{y' != x} d(y,y')` holds for every `y != x`.
    ///
    /// The inequality is not strict: in a space where all distances agree every
    /// point is a strong outlier.
    pub fn is_strong_outlier(&self, x: usize) -> bool {
        if self.n < 2 || x >= self.n {
            return false;
        }
        (0..self.n).filter(|&y| y != x).all(|y| {
            let spread = (0..self.n)
                .filter(|&z| z != x)
                .map(|z| self.distance(y, z))
                .fold(0.0, f64::max);
            self.distance(x, y) >= spread
        })
    }

    pub fn strong_outliers(&self) -> Vec<usize> {
        (0..self.n).filter(|&x| self.is_strong_outlier(x)).collect()
    }
}

/// A relation `C ⊆ X × Y` whose projections are both surjective.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correspondence {
    nx: usize,
    ny: usize,
    pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn new(nx: usize, ny: usize, mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        pairs.sort_unstable();
        pairs.dedup();
        if let Some(&(x, y)) = pairs.iter().find(|&&(x, y)| x >= nx || y >= ny) {
            return Err(Error::IndexOutOfRange {
                index: if x >= nx { x } else { y },
                len: if x >= nx { nx } else { ny },
            });
        }
        let c = Correspondence { nx, ny, pairs };
        if (0..nx).any(|x| c.degree_x(x) == 0) || (0..ny).any(|y| c.degree_y(y) == 0) {
            return Err(Error::InvalidInput(
                "a correspondence must cover every point of both spaces".into(),
            ));
        }
        Ok(c)
    }

    /// The graph of a bijection `x -> theta[x]`.
    pub fn from_bijection(theta: &[usize]) -> Result<Self> {
        Correspondence::new(
            theta.len(),
            theta.len(),
            theta.iter().enumerate().map(|(x, &y)| (x, y)).collect(),
        )
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn degree_x(&self, x: usize) -> usize {
        self.pairs.iter().filter(|p| p.0 == x).count()
    }

    pub fn degree_y(&self, y: usize) -> usize {
        self.pairs.iter().filter(|p| p.1 == y).count()
    }

    pub fn is_bijection(&self) -> bool {
        self.nx == self.ny && self.pairs.len() == self.nx
    }

    /// `max |d_X(x1,x2) - d_Y(y1,y2)|` over pairs of pairs in `C`.
    pub fn distortion(&self, x: &PseudoMetricSpace, y: &PseudoMetricSpace) -> f64 {
        let mut worst = 0.0f64;
        for &(x1, y1) in &self.pairs {
            for &(x2, y2) in &self.pairs {
                worst = worst.max((x.distance(x1, x2) - y.distance(y1, y2)).abs());
            }
        }
        worst
    }
}

/// `d_GH(X, Y)` by exact search over correspondences, with the default pair cap.
pub fn gromov_hausdorff(x: &PseudoMetricSpace, y: &PseudoMetricSpace) -> Result<f64> {
    gromov_hausdorff_with_cap(x, y, GH_PAIR_CAP).map(|(d, _)| d)
}

/// `d_GH(X, Y)` and a correspondence realizing it.
///
/// The optimum is one of the finitely many values `|d_X(a,b) - d_Y(c,d)|`; a
/// binary search over them asks whether some correspondence has all pairwise
/// distortions below the threshold. That is a clique in the compatibility graph
/// on `X × Y` covering both sides, found by backtracking on the uncovered point
/// with the fewest admissible pairs.
pub fn gromov_hausdorff_with_cap(
    x: &PseudoMetricSpace,
    y: &PseudoMetricSpace,
    cap: usize,
) -> Result<(f64, Correspondence)> {
    let size = x.len() * y.len();
    if size > cap {
        return Err(Error::CapExceeded {
            what: "|X|*|Y|",
            size,
            cap,
            hint: "; use gromov_hausdorff_bijective or subsample",
        });
    }
    let mut candidates = Vec::with_capacity(size * size);
    for a in 0..x.len() {
        for b in a..x.len() {
            for c in 0..y.len() {
                for d in c..y.len() {
                    candidates.push((x.distance(a, b) - y.distance(c, d)).abs());
                }
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let search = CorrespondenceSearch::new(x, y);
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    let mut best = search
        .feasible(candidates[hi])
        .expect("the full product is always a correspondence");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match search.feasible(candidates[mid]) {
            Some(c) => {
                best = c;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    let corr = Correspondence::new(x.len(), y.len(), best)?;
    Ok((corr.distortion(x, y) / 2.0, corr))
}

struct CorrespondenceSearch<'a> {
    x: &'a PseudoMetricSpace,
    y: &'a PseudoMetricSpace,
}

type Bits = Vec<u64>;

fn bit(bits: &Bits, k: usize) -> bool {
    bits[k / 64] >> (k % 64) & 1 == 1
}

impl<'a> CorrespondenceSearch<'a> {
    fn new(x: &'a PseudoMetricSpace, y: &'a PseudoMetricSpace) -> Self {
        CorrespondenceSearch { x, y }
    }

    fn feasible(&self, delta: f64) -> Option<Vec<(usize, usize)>> {
        let (nx, ny) = (self.x.len(), self.y.len());
        let total = nx * ny;
        let words = total.div_ceil(64);
        let pair = |k: usize| (k / ny, k % ny);
        let compat: Vec<Bits> = (0..total)
            .map(|k| {
                let (x1, y1) = pair(k);
                let mut row = vec![0u64; words];
                for l in 0..total {
                    let (x2, y2) = pair(l);
                    if (self.x.distance(x1, x2) - self.y.distance(y1, y2)).abs() <= delta {
                        row[l / 64] |= 1 << (l % 64);
                    }
                }
                row
            })
            .collect();
        let mut allowed = vec![0u64; words];
        for k in 0..total {
            allowed[k / 64] |= 1 << (k % 64);
        }
        let mut chosen = Vec::new();
        let mut covered_x = vec![false; nx];
        let mut covered_y = vec![false; ny];
        self.extend(
            &compat,
            &allowed,
            &mut chosen,
            &mut covered_x,
            &mut covered_y,
        )
        .then(|| chosen.iter().map(|&k| pair(k)).collect())
    }

    fn extend(
        &self,
        compat: &[Bits],
        allowed: &Bits,
        chosen: &mut Vec<usize>,
        covered_x: &mut [bool],
        covered_y: &mut [bool],
    ) -> bool {
        let (nx, ny) = (covered_x.len(), covered_y.len());
        // options covering each uncovered point; pick the most constrained one
        let mut best: Option<Vec<usize>> = None;
        for x in (0..nx).filter(|&x| !covered_x[x]) {
            let opts: Vec<usize> = (0..ny).map(|y| x * ny + y).filter(|&k| bit(allowed, k)).collect();
            if best.as_ref().is_none_or(|b| opts.len() < b.len()) {
                best = Some(opts);
            }
        }
        for y in (0..ny).filter(|&y| !covered_y[y]) {
            let opts: Vec<usize> = (0..nx).map(|x| x * ny + y).filter(|&k| bit(allowed, k)).collect();
            if best.as_ref().is_none_or(|b| opts.len() < b.len()) {
                best = Some(opts);
            }
        }
        let Some(options) = best else {
            return true;
        };
        for k in options {
            let (px, py) = (k / ny, k % ny);
            let (was_x, was_y) = (covered_x[px], covered_y[py]);
            covered_x[px] = true;
            covered_y[py] = true;
            chosen.push(k);
            let next: Bits = allowed.iter().zip(&compat[k]).map(|(a, b)| a & b).collect();
            if self.extend(compat, &next, chosen, covered_x, covered_y) {
                return true;
            }
            chosen.pop();
            covered_x[px] = was_x;
            covered_y[py] = was_y;
        }
        false
    }
}

/// `d'_GH(X, Y)`: half the least distortion of a bijection, default cap.
pub fn gromov_hausdorff_bijective(x: &PseudoMetricSpace, y: &PseudoMetricSpace) -> Result<f64> {
    gromov_hausdorff_bijective_with_cap(x, y, GH_BIJECTIVE_CAP).map(|(d, _)| d)
}

/// `d'_GH(X, Y)` and an optimal bijection `theta` (`x -> theta[x]`), by
/// branch and bound over permutations.
pub fn gromov_hausdorff_bijective_with_cap(
    x: &PseudoMetricSpace,
    y: &PseudoMetricSpace,
    cap: usize,
) -> Result<(f64, Vec<usize>)> {
    if x.len() != y.len() {
        return Err(Error::CardinalityMismatch(x.len(), y.len()));
    }
    if x.len() > cap {
        return Err(Error::CapExceeded {
            what: "|X| for bijective enumeration",
            size: x.len(),
            cap,
            hint: "",
        });
    }
    let n = x.len();
    let identity: Vec<usize> = (0..n).collect();
    let mut best = bijection_distortion(x, y, &identity);
    let mut best_theta = identity;
    let mut theta = Vec::with_capacity(n);
    let mut used = vec![false; n];
    branch_bijection(x, y, &mut theta, &mut used, 0.0, &mut best, &mut best_theta);
    Ok((best / 2.0, best_theta))
}

fn branch_bijection(
    x: &PseudoMetricSpace,
    y: &PseudoMetricSpace,
    theta: &mut Vec<usize>,
    used: &mut [bool],
    current: f64,
    best: &mut f64,
    best_theta: &mut Vec<usize>,
) {
    let k = theta.len();
    if k == x.len() {
        if current < *best {
            *best = current;
            best_theta.clone_from(theta);
        }
        return;
    }
    for cand in 0..y.len() {
        if used[cand] {
            continue;
        }
        let worst = theta
            .iter()
            .enumerate()
            .map(|(l, &tl)| (x.distance(l, k) - y.distance(tl, cand)).abs())
            .fold(current, f64::max);
        if worst >= *best {
            continue;
        }
        used[cand] = true;
        theta.push(cand);
        branch_bijection(x, y, theta, used, worst, best, best_theta);
        theta.pop();
        used[cand] = false;
    }
}

/// `max |d_X(a,b) - d_Y(theta a, theta b)|`.
pub fn bijection_distortion(x: &PseudoMetricSpace, y: &PseudoMetricSpace, theta: &[usize]) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..theta.len() {
        for b in 0..theta.len() {
            worst = worst.max((x.distance(a, b) - y.distance(theta[a], theta[b])).abs());
        }
    }
    worst
}

/// Result of turning a correspondence into a bijection by iterated doublings.
#[derive(Clone, Debug)]
pub struct Equalized {
    pub x: PseudoMetricSpace,
    pub y: PseudoMetricSpace,
    /// `bijection[x̂] = ŷ`.
    pub bijection: Vec<usize>,
    /// Original point of `X` each point of `X̂` copies.
    pub x_origin: Vec<usize>,
    pub y_origin: Vec<usize>,
}

/// Doubles every `x` with `D_C(x) > 1` exactly `D_C(x) - 1` times, then every
/// `y` whose degree in the resulting map exceeds one, yielding equal-size spaces
/// and a bijection with the same distortion as `C`.
pub fn equalize_by_doubling(
    x: &PseudoMetricSpace,
    y: &PseudoMetricSpace,
    c: &Correspondence,
) -> Result<Equalized> {
    if c.nx != x.len() || c.ny != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len() * y.len(),
            found: c.nx * c.ny,
        });
    }
    // first stage: a single-valued map X̂ -> Y
    let mut x_hat = x.clone();
    let mut x_origin: Vec<usize> = (0..x.len()).collect();
    let mut map_to_y = vec![usize::MAX; x.len()];
    for xi in 0..x.len() {
        let targets: Vec<usize> = c.pairs.iter().filter(|p| p.0 == xi).map(|p| p.1).collect();
        map_to_y[xi] = targets[0];
        for &t in &targets[1..] {
            x_hat = x_hat.doubling(xi)?;
            x_origin.push(xi);
            map_to_y.push(t);
        }
    }
    // second stage: split fibres over Y
    let mut y_hat = y.clone();
    let mut y_origin: Vec<usize> = (0..y.len()).collect();
    let mut bijection = vec![usize::MAX; x_hat.len()];
    for yi in 0..y.len() {
        let fibre: Vec<usize> = (0..x_hat.len()).filter(|&k| map_to_y[k] == yi).collect();
        bijection[fibre[0]] = yi;
        for &k in &fibre[1..] {
            y_hat = y_hat.doubling(yi)?;
            y_origin.push(yi);
            bijection[k] = y_hat.len() - 1;
        }
    }
    debug_assert_eq!(x_hat.len(), y_hat.len());
    Ok(Equalized {
        x: x_hat,
        y: y_hat,
        bijection,
        x_origin,
        y_origin,
    })
}
