//! Seeded property checks over random spaces and complexes.
//!
//! Each trial draws its own inputs from a ChaCha stream seeded by the trial
//! seed, so any failure can be replayed from the seed alone.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::complex::{critical_values, vietoris_rips, SimplicialComplex};
use crate::distances::bottleneck;
use crate::double::DoubleHomology;
use crate::error::Result;
use crate::hochster::{Bigrade, HochsterGroup};
use crate::linalg::PrimeField;
use crate::metric::{bijection_distortion, gromov_hausdorff, PseudoMetricSpace, TOLERANCE};
use crate::persistence::{phhz, phz, Grade};
use crate::Config;

/// Parameters of the random inputs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomModel {
    pub seed: u64,
    pub min_points: usize,
    pub max_points: usize,
    /// Side of the square the points are drawn from.
    pub extent: f64,
    /// Largest displacement of a point in a perturbation.
    pub epsilon: f64,
}

impl Default for RandomModel {
    fn default() -> Self {
        RandomModel {
            seed: 1,
            min_points: 3,
            max_points: 7,
            extent: 10.0,
            epsilon: 0.2,
        }
    }
}

impl RandomModel {
    pub fn with_seed(seed: u64) -> Self {
        RandomModel {
            seed,
            ..RandomModel::default()
        }
    }
}

/// Uniform random points in `[0, extent]^2`.
pub fn random_points<R: Rng>(rng: &mut R, n: usize, extent: f64) -> Vec<[f64; 2]> {
    (0..n)
        .map(|_| [rng.gen_range(0.0..=extent), rng.gen_range(0.0..=extent)])
        .collect()
}

/// Moves every point by at most `epsilon`.
pub fn perturb<R: Rng>(rng: &mut R, points: &[[f64; 2]], epsilon: f64) -> Vec<[f64; 2]> {
    points
        .iter()
        .map(|&[x, y]| {
            let r = epsilon * rng.gen::<f64>().sqrt();
            let a = rng.gen_range(0.0..std::f64::consts::TAU);
            [x + r * a.cos(), y + r * a.sin()]
        })
        .collect()
}

/// Moves each point of an arbitrary-dimensional cloud by at most `epsilon`,
/// using a generator seeded with `seed`.
pub fn perturb_points(points: &[Vec<f64>], epsilon: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    points
        .iter()
        .map(|p| {
            let dir: Vec<f64> = p.iter().map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            let r = epsilon * rng.gen::<f64>();
            p.iter()
                .zip(&dir)
                .map(|(x, d)| if norm > 0.0 { x + r * d / norm } else { *x })
                .collect()
        })
        .collect()
}

/// Flag complex on `[m]` with each edge present with probability `density`.
pub fn random_flag_complex<R: Rng>(rng: &mut R, m: usize, density: f64) -> SimplicialComplex {
    let mut edges = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            if rng.gen_bool(density) {
                edges.push((a, b));
            }
        }
    }
    SimplicialComplex::flag(m, &edges).expect("small vertex set")
}

/// A random gluing `K' ∪_I Δ^n` with at least one fresh vertex.
pub fn random_gluing<R: Rng>(rng: &mut R) -> (SimplicialComplex, u32, usize, SimplicialComplex) {
    let m = rng.gen_range(1..=5);
    let density = rng.gen_range(0.2..0.9);
    let base = random_flag_complex(rng, m, density);
    let faces = base.all_faces();
    let face = *faces.choose(rng).expect("the empty face is always present");
    let n = face.count_ones() as usize + rng.gen_range(0..=2);
    let glued = base.glue_simplex(face, n).expect("a face and at least one fresh vertex");
    (base, face, n, glued)
}

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialReport {
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl TrialReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub model: RandomModel,
    pub trials: Vec<TrialReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.trials.iter().all(TrialReport::passed)
    }

    /// `(seed, failing check)` pairs.
    pub fn failures(&self) -> Vec<(u64, &CheckOutcome)> {
        self.trials
            .iter()
            .flat_map(|t| t.checks.iter().filter(|c| !c.passed).map(move |c| (t.seed, c)))
            .collect()
    }

    /// Pass counts per check name.
    pub fn tally(&self) -> BTreeMap<&'static str, (usize, usize)> {
        let mut out: BTreeMap<&'static str, (usize, usize)> = BTreeMap::new();
        for c in self.trials.iter().flat_map(|t| &t.checks) {
            let e = out.entry(c.name).or_default();
            e.1 += 1;
            if c.passed {
                e.0 += 1;
            }
        }
        out
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, (ok, total)) in self.tally() {
            let status = if ok == total { "PASS" } else { "FAIL" };
            writeln!(f, "{status} {name}: {ok}/{total}")?;
        }
        for (seed, c) in self.failures() {
            writeln!(f, "  seed {seed}: {} failed: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

type Check = std::result::Result<(), String>;

fn outcome(name: &'static str, r: Result<Check>) -> CheckOutcome {
    let (passed, detail) = match r {
        Ok(Ok(())) => (true, String::new()),
        Ok(Err(d)) => (false, d),
        Err(e) => (false, format!("error: {e}")),
    };
    CheckOutcome { name, passed, detail }
}

fn expected_surgery_dims() -> BTreeMap<Bigrade, usize> {
    BTreeMap::from([(Bigrade::ORIGIN, 1), (Bigrade::new(1, 2), 1)])
}

fn check_surgery(rng: &mut ChaCha8Rng, config: &Config) -> Result<Check> {
    let (base, face, n, k) = random_gluing(rng);
    if k.is_simplex() {
        return Ok(Ok(()));
    }
    let dims = DoubleHomology::compute(&k, config)?.dims();
    if dims == expected_surgery_dims() {
        Ok(Ok(()))
    } else {
        Ok(Err(format!("{base:?} glued along {face:#b} with n = {n}: HH dims {dims:?}")))
    }
}

fn check_nilpotency(rng: &mut ChaCha8Rng, config: &Config) -> Result<Check> {
    let m = rng.gen_range(1..=8);
    let density = rng.gen_range(0.1..0.9);
    let k = random_flag_complex(rng, m, density);
    // construction verifies ∂'∘∂' = 0
    match DoubleHomology::compute(&k, config) {
        Ok(_) => Ok(Ok(())),
        Err(e) => Ok(Err(format!("{k:?}: {e}"))),
    }
}

fn check_doubling_hh(rng: &mut ChaCha8Rng, config: &Config) -> Result<Check> {
    let m = rng.gen_range(1..=6);
    let density = rng.gen_range(0.1..0.9);
    let k = random_flag_complex(rng, m, density);
    let v = rng.gen_range(0..m);
    let before = DoubleHomology::compute(&k, config)?.dims();
    let after = DoubleHomology::compute(&k.double_vertex(v)?, config)?.dims();
    Ok(if before == after {
        Ok(())
    } else {
        Err(format!("{k:?} doubled at {v}: {before:?} vs {after:?}"))
    })
}

fn check_doubling_phhz(x: &PseudoMetricSpace, rng: &mut ChaCha8Rng, config: &Config) -> Result<Check> {
    let v = rng.gen_range(0..x.len());
    let a = phhz(x, config)?;
    let b = phhz(&x.doubling(v)?, config)?;
    Ok(if a == b {
        Ok(())
    } else {
        Err(format!("doubling at {v} changed the barcode: {a:?} vs {b:?}"))
    })
}

fn check_stability(
    x: &PseudoMetricSpace,
    y: &PseudoMetricSpace,
    config: &Config,
) -> Result<Check> {
    // the identity bijection bounds both Gromov–Hausdorff distances
    let identity: Vec<usize> = (0..x.len()).collect();
    let bound = bijection_distortion(x, y, &identity);
    let hh = bottleneck(&phhz(x, config)?, &phhz(y, config)?, true);
    let z = bottleneck(&phz(x, config)?, &phz(y, config)?, true);
    if hh > bound + TOLERANCE {
        return Ok(Err(format!("phhz: W = {hh} exceeds {bound}")));
    }
    if z > bound + TOLERANCE {
        return Ok(Err(format!("phz: W = {z} exceeds {bound}")));
    }
    Ok(Ok(()))
}

fn check_outlier_pair(rng: &mut ChaCha8Rng, model: &RandomModel, config: &Config) -> Result<Check> {
    let n = rng.gen_range(3..=4);
    let mut pts = random_points(rng, n, model.extent);
    let x = PseudoMetricSpace::from_points(&pts)?;
    pts.push([10.0 * model.extent, 10.0 * model.extent]);
    let y = PseudoMetricSpace::from_points(&pts)?;
    let gh = gromov_hausdorff(&x, &y)?;
    let w = bottleneck(&phhz(&x, config)?, &phhz(&y, config)?, true);
    Ok(if w <= 2.0 * gh + TOLERANCE {
        Ok(())
    } else {
        Err(format!("W = {w} exceeds 2 d_GH = {}", 2.0 * gh))
    })
}

fn check_bar_counts(x: &PseudoMetricSpace, config: &Config) -> Result<Check> {
    let b = phz(x, config)?;
    let grid = critical_values(x);
    let mut previous: Option<HochsterGroup> = None;
    for &t in grid.values() {
        let k = vietoris_rips(x, t)?;
        let group = match &previous {
            Some(p) => HochsterGroup::reusing(&k, p, config)?,
            None => HochsterGroup::new(&k, config)?,
        };
        let table = group.betti_table();
        let grades: std::collections::BTreeSet<Bigrade> = table
            .keys()
            .copied()
            .chain(b.grades().into_iter().filter_map(|g| match g {
                Grade::Bigrade(g) => Some(g),
                Grade::Degree(_) => None,
            }))
            .collect();
        for g in grades {
            let bars = b.count_at(Grade::Bigrade(g), t);
            let dim = table.get(&g).copied().unwrap_or(0);
            if bars != dim {
                return Ok(Err(format!("at t = {t}, {g}: {bars} bars but dimension {dim}")));
            }
        }
        previous = Some(group);
    }
    Ok(Ok(()))
}

/// Runs one trial; the seed fixes every random choice.
pub fn run_trial(model: &RandomModel, seed: u64) -> TrialReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = if seed % 2 == 0 { PrimeField::F2 } else { PrimeField::F3 };
    let config = Config::with_field(field);
    let lo = model.min_points.max(1);
    let hi = model.max_points.max(lo);

    let n = rng.gen_range(lo..=hi);
    let pts = random_points(&mut rng, n, model.extent);
    let moved = perturb(&mut rng, &pts, model.epsilon);
    let (x, y) = match (PseudoMetricSpace::from_points(&pts), PseudoMetricSpace::from_points(&moved)) {
        (Ok(x), Ok(y)) => (x, y),
        _ => unreachable!("random clouds are well formed"),
    };
    let small = PseudoMetricSpace::from_points(&pts[..n.min(5)]).expect("nonempty");

    let checks = vec![
        outcome("surgery", check_surgery(&mut rng, &config)),
        outcome("nilpotency", check_nilpotency(&mut rng, &config)),
        outcome("doubling-hh", check_doubling_hh(&mut rng, &config)),
        outcome("doubling-phhz", check_doubling_phhz(&x, &mut rng, &config)),
        outcome("stability", check_stability(&x, &y, &config)),
        outcome("outlier-stability", check_outlier_pair(&mut rng, model, &config)),
        outcome("bar-counts", check_bar_counts(&small, &config)),
    ];
    TrialReport { seed, checks }
}

/// Runs `trials` independent trials with seeds `model.seed, model.seed + 1, ...`.
pub fn run_property_suite(model: &RandomModel, trials: usize) -> SuiteReport {
    let mut reports: Vec<TrialReport> = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial(model, model.seed.wrapping_add(t)))
        .collect();
    reports.sort_by_key(|r| r.seed);
    SuiteReport {
        model: *model,
        trials: reports,
    }
}
