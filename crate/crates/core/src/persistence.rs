//! Towers of vector spaces over a critical-value grid and their barcodes.
//!
//! Three pipelines share the machinery: ordinary reduced persistent homology
//! of the Rips filtration, its bigraded refinement (one Rips filtration per
//! subspace, placed at the bigrade fixed by the subspace size and the degree),
//! and the persistent double homology of the moment-angle complexes.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;

use crate::complex::{FiltrationGrid, RipsFiltration};
use crate::double::{induced_map_hh, DoubleHomology};
use crate::error::{Error, Result};
use crate::hochster::{Bigrade, HochsterGroup};
use crate::homology::{induced_map, reduced_homology, HomologyBasis};
use crate::linalg::{FMatrix, PrimeField};
use crate::metric::PseudoMetricSpace;
use crate::Config;

/// What a bar is graded by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Grade {
    Degree(isize),
    Bigrade(Bigrade),
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grade::Degree(p) => write!(f, "H{p}"),
            Grade::Bigrade(b) => b.fmt(f),
        }
    }
}

/// A half-open interval `[birth, death)`; `death` is `f64::INFINITY` for infinite bars.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bar {
    pub grade: Grade,
    pub birth: f64,
    pub death: f64,
}

impl Bar {
    pub fn new(grade: Grade, birth: f64, death: f64) -> Self {
        Bar { grade, birth, death }
    }

    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.birth <= t && t < self.death
    }

    fn cmp_key(&self, other: &Bar) -> Ordering {
        self.grade
            .cmp(&other.grade)
            .then(self.birth.total_cmp(&other.birth))
            .then(self.death.total_cmp(&other.death))
    }
}

/// A multiset of bars kept in canonical order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Barcode {
    bars: Vec<Bar>,
}

impl Barcode {
    pub fn new(mut bars: Vec<Bar>) -> Self {
        bars.sort_by(Bar::cmp_key);
        Barcode { bars }
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn grades(&self) -> BTreeSet<Grade> {
        self.bars.iter().map(|b| b.grade).collect()
    }

    /// `(birth, death)` pairs of one grade, in canonical order.
    pub fn intervals(&self, grade: Grade) -> Vec<(f64, f64)> {
        self.bars
            .iter()
            .filter(|b| b.grade == grade)
            .map(|b| (b.birth, b.death))
            .collect()
    }

    /// Number of bars of `grade` alive at `t`.
    pub fn count_at(&self, grade: Grade, t: f64) -> usize {
        self.bars.iter().filter(|b| b.grade == grade && b.contains(t)).count()
    }

    /// Union of two multisets.
    pub fn merged(&self, other: &Barcode) -> Barcode {
        Barcode::new(self.bars.iter().chain(&other.bars).copied().collect())
    }

    /// Equality with endpoints compared up to `tol`.
    pub fn approx_eq(&self, other: &Barcode, tol: f64) -> bool {
        let close = |a: f64, b: f64| (a.is_infinite() && a == b) || (a - b).abs() <= tol;
        self.len() == other.len()
            && self
                .bars
                .iter()
                .zip(&other.bars)
                .all(|(a, b)| a.grade == b.grade && close(a.birth, b.birth) && close(a.death, b.death))
    }
}

/// A persistence module sampled on a grid: `steps[k] : V_k → V_{k+1}`.
#[derive(Clone, Debug)]
pub struct Tower {
    grid: FiltrationGrid,
    grade: Grade,
    dims: Vec<usize>,
    steps: Vec<FMatrix>,
}

impl Tower {
    pub fn new(grid: FiltrationGrid, grade: Grade, dims: Vec<usize>, steps: Vec<FMatrix>) -> Result<Self> {
        if dims.len() != grid.len() {
            return Err(Error::InvalidTower(format!(
                "{} dimensions for a grid of {} values",
                dims.len(),
                grid.len()
            )));
        }
        if steps.len() + 1 != dims.len() {
            return Err(Error::InvalidTower(format!(
                "{} steps for {} spaces",
                steps.len(),
                dims.len()
            )));
        }
        for (k, s) in steps.iter().enumerate() {
            if (s.rows(), s.cols()) != (dims[k + 1], dims[k]) {
                return Err(Error::InvalidTower(format!(
                    "step {k} is {}x{}, expected {}x{}",
                    s.rows(),
                    s.cols(),
                    dims[k + 1],
                    dims[k]
                )));
            }
        }
        Ok(Tower {
            grid,
            grade,
            dims,
            steps,
        })
    }

    pub fn grid(&self) -> &FiltrationGrid {
        &self.grid
    }

    pub fn grade(&self) -> Grade {
        self.grade
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn steps(&self) -> &[FMatrix] {
        &self.steps
    }

    /// `rank[s][t]` of the composite `V_s → V_t` for `s <= t`.
    pub fn rank_function(&self) -> Vec<Vec<usize>> {
        let n = self.dims.len();
        let mut r = vec![vec![0; n]; n];
        for s in 0..n {
            r[s][s] = self.dims[s];
            if self.dims[s] == 0 {
                continue;
            }
            let mut composite: Option<FMatrix> = None;
            for t in s + 1..n {
                let next = match &composite {
                    None => self.steps[s].clone(),
                    Some(c) => self.steps[t - 1].mul(c).expect("tower shapes are validated"),
                };
                r[s][t] = next.rank();
                if r[s][t] == 0 {
                    break;
                }
                composite = Some(next);
            }
        }
        r
    }
}

/// Barcode of a tower from the multiplicities of its rank function.
pub fn tower_barcode(tower: &Tower) -> Barcode {
    let n = tower.dims.len();
    let r = tower.rank_function();
    let rank = |s: isize, t: usize| -> i64 {
        if s < 0 || t >= n {
            0
        } else {
            r[s as usize][t] as i64
        }
    };
    let values = tower.grid.values();
    let mut bars = Vec::new();
    for b in 0..n {
        for d in b + 1..=n {
            let bi = b as isize;
            let mult = rank(bi, d - 1) - rank(bi, d) - rank(bi - 1, d - 1) + rank(bi - 1, d);
            assert!(mult >= 0, "rank function of a tower is not a barcode");
            let death = if d == n { f64::INFINITY } else { values[d] };
            for _ in 0..mult {
                bars.push(Bar::new(tower.grade, values[b], death));
            }
        }
    }
    Barcode::new(bars)
}

/// Towers of `H̃_p(R(X, t)_J)` over the grid levels where `J` changes.
fn subset_towers(
    filtration: &RipsFiltration,
    subset: u32,
    field: PrimeField,
) -> Vec<(isize, Tower)> {
    let levels = filtration.levels_within(subset);
    let values = filtration.grid().values();
    let grid = FiltrationGrid::new(levels.iter().map(|&k| values[k]).collect())
        .expect("a sub-grid of a grid is a grid");
    let homology: Vec<HomologyBasis> = levels
        .iter()
        .map(|&k| {
            let sub = filtration
                .complex_at(k)
                .full_subcomplex(subset)
                .expect("subset of the point set");
            reduced_homology(&sub, field)
        })
        .collect();
    let size = subset.count_ones() as isize;
    let mut out = Vec::new();
    for p in 0..=size - 2 {
        let dims: Vec<usize> = homology.iter().map(|h| h.dim(p)).collect();
        if dims.iter().all(|&d| d == 0) {
            continue;
        }
        let steps = homology
            .windows(2)
            .map(|w| induced_map(&w[0], &w[1], p).expect("Rips complexes are nested"))
            .collect();
        let tower = Tower::new(grid.clone(), Grade::Degree(p), dims, steps).expect("consistent shapes");
        out.push((p, tower));
    }
    out
}

fn check_cap(n: usize, config: &Config) -> Result<()> {
    if n > config.max_vertices {
        return Err(Error::CapExceeded {
            what: "point set",
            size: n,
            cap: config.max_vertices,
            hint: " (raise the vertex cap or subsample the input)",
        });
    }
    Ok(())
}

fn check_finite_bars(barcode: &Barcode, allowed: Option<Grade>) -> Result<()> {
    match barcode.bars.iter().find(|b| b.is_infinite() && Some(b.grade) != allowed) {
        Some(b) => Err(Error::Invariant(format!("unexpected infinite bar in grade {}", b.grade))),
        None => Ok(()),
    }
}

/// Reduced persistent homology of the Rips filtration, graded by degree.
pub fn persistent_homology(x: &PseudoMetricSpace, config: &Config) -> Result<Barcode> {
    check_cap(x.len(), config)?;
    let filtration = RipsFiltration::new(x)?;
    let all = (1u64 << x.len()) - 1;
    let bars: Vec<Bar> = subset_towers(&filtration, all as u32, config.field)
        .iter()
        .flat_map(|(_, t)| tower_barcode(t).bars)
        .collect();
    let barcode = Barcode::new(bars);
    check_finite_bars(&barcode, None)?;
    Ok(barcode)
}

/// Bigraded barcode of the moment-angle complexes, one Rips filtration per subspace.
pub fn phz(x: &PseudoMetricSpace, config: &Config) -> Result<Barcode> {
    check_cap(x.len(), config)?;
    let filtration = RipsFiltration::new(x)?;
    let n = x.len();
    let mut bars: Vec<Bar> = (1u64..1 << n)
        .into_par_iter()
        .filter(|s| s.count_ones() >= 2)
        .flat_map_iter(|s| {
            let subset = s as u32;
            let size = subset.count_ones() as usize;
            subset_towers(&filtration, subset, config.field)
                .into_iter()
                .flat_map(move |(p, t)| {
                    let grade = Grade::Bigrade(Bigrade::of_summand(p, size));
                    tower_barcode(&t)
                        .bars
                        .into_iter()
                        .map(move |b| Bar { grade, ..b })
                })
                .collect::<Vec<_>>()
        })
        .collect();
    bars.push(Bar::new(Grade::Bigrade(Bigrade::ORIGIN), 0.0, f64::INFINITY));
    let barcode = Barcode::new(bars);
    check_finite_bars(&barcode, Some(Grade::Bigrade(Bigrade::ORIGIN)))?;
    Ok(barcode)
}

/// Per-bigrade towers of double homology along the Rips filtration.
pub fn phhz_towers(x: &PseudoMetricSpace, config: &Config) -> Result<Vec<Tower>> {
    check_cap(x.len(), config)?;
    let filtration = RipsFiltration::new(x)?;
    let grid = filtration.grid().clone();
    let field = config.field;

    let mut stages: Vec<BTreeMap<Bigrade, usize>> = Vec::with_capacity(grid.len());
    let mut maps: Vec<BTreeMap<Bigrade, FMatrix>> = Vec::with_capacity(grid.len());
    let mut previous: Option<DoubleHomology> = None;
    for k in 0..grid.len() {
        let complex = filtration.complex_at(k);
        let group = match &previous {
            Some(prev) => HochsterGroup::reusing(&complex, prev.group(), config)?,
            None => HochsterGroup::new(&complex, config)?,
        };
        let hh = DoubleHomology::from_group(group)?;
        if let Some(prev) = &previous {
            maps.push(induced_map_hh(prev, &hh)?);
        }
        stages.push(hh.dims());
        previous = Some(hh);
    }

    let grades: BTreeSet<Bigrade> = stages.iter().flat_map(|s| s.keys().copied()).collect();
    grades
        .into_iter()
        .map(|b| {
            let dims: Vec<usize> = stages.iter().map(|s| s.get(&b).copied().unwrap_or(0)).collect();
            let steps = maps
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    m.get(&b)
                        .cloned()
                        .unwrap_or_else(|| FMatrix::zeros(field, dims[k + 1], dims[k]))
                })
                .collect();
            Tower::new(grid.clone(), Grade::Bigrade(b), dims, steps)
        })
        .collect()
}

/// Bigraded barcode of persistent double homology.
pub fn phhz(x: &PseudoMetricSpace, config: &Config) -> Result<Barcode> {
    let bars = phhz_towers(x, config)?
        .iter()
        .flat_map(|t| tower_barcode(t).bars)
        .collect();
    let barcode = Barcode::new(bars);
    check_finite_bars(&barcode, Some(Grade::Bigrade(Bigrade::ORIGIN)))?;
    Ok(barcode)
}

/// Bars of a bigraded barcode restricted to the subsets of a given size `j`.
pub fn level(barcode: &Barcode, j: usize) -> Barcode {
    Barcode::new(
        barcode
            .bars
            .iter()
            .filter(|b| matches!(b.grade, Grade::Bigrade(g) if g.j == j))
            .copied()
            .collect(),
    )
}
