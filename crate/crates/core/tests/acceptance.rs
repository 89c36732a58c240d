//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeMap;
use std::panic;
use std::process::ExitCode;
use std::time::Instant;

use bgph_core::complex::{bits, critical_values, vietoris_rips, FiltrationGrid, SimplicialComplex};
use bgph_core::distances::{bottleneck, bottleneck_with_cost, interval_interleaving, pi_distance};
use bgph_core::double::{DoubleChainComplex, DoubleHomology};
use bgph_core::harness::{perturb, random_flag_complex, random_gluing, random_points};
use bgph_core::hochster::{trapezoid_violations, Bigrade, HochsterGroup};
use bgph_core::metric::{gromov_hausdorff, gromov_hausdorff_bijective, PseudoMetricSpace};
use bgph_core::persistence::{persistent_homology, phhz, phz, tower_barcode, Bar, Barcode, Grade, Tower};
use bgph_core::{Config, FMatrix, PrimeField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

const TOL: f64 = 1e-9;
const FIELDS: [PrimeField; 2] = [PrimeField::F2, PrimeField::F3];

fn bg(a: i64, b: i64) -> Grade {
    Grade::Bigrade(Bigrade::from_display(a, b).unwrap())
}

fn barcode(bars: &[((i64, i64), f64, f64)]) -> Barcode {
    Barcode::new(bars.iter().map(|&(g, b, d)| Bar::new(bg(g.0, g.1), b, d)).collect())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn x1() -> PseudoMetricSpace {
    PseudoMetricSpace::from_points(&[[0.0, 0.0], [2.0, 0.0], [0.0, 4.0]]).unwrap()
}

fn x2() -> PseudoMetricSpace {
    PseudoMetricSpace::from_points(&[[0.0, 0.0], [2.0, 0.0], [1.0, 15f64.sqrt()]]).unwrap()
}

/// Two squares 1-2-4-3 and 4-5-7-6 sharing vertex 4, with path-length distances.
fn wedge_of_squares() -> PseudoMetricSpace {
    let edges = [(1, 2), (2, 4), (4, 3), (3, 1), (4, 5), (5, 7), (7, 6), (6, 4)];
    let n = 7;
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(a, b) in &edges {
        d[a - 1][b - 1] = 1.0;
        d[b - 1][a - 1] = 1.0;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    PseudoMetricSpace::from_matrix(&d).unwrap()
}

fn complete_bipartite_2_3() -> SimplicialComplex {
    SimplicialComplex::flag(5, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]).unwrap()
}

fn surgery_dims() -> BTreeMap<Bigrade, usize> {
    BTreeMap::from([(Bigrade::ORIGIN, 1), (Bigrade::new(1, 2), 1)])
}

fn two_triangles() -> Outcome {
    let cfg = Config::default();
    let r5 = 2.0 * 5f64.sqrt();
    let inf = f64::INFINITY;
    let want1 = barcode(&[
        ((0, 0), 0.0, inf),
        ((-1, 4), 0.0, 2.0),
        ((-1, 4), 0.0, 4.0),
        ((-1, 4), 0.0, r5),
        ((-2, 6), 0.0, 2.0),
        ((-2, 6), 0.0, 4.0),
    ]);
    let want2 = barcode(&[
        ((0, 0), 0.0, inf),
        ((-1, 4), 0.0, 2.0),
        ((-1, 4), 0.0, 4.0),
        ((-1, 4), 0.0, 4.0),
        ((-2, 6), 0.0, 2.0),
        ((-2, 6), 0.0, 4.0),
    ]);
    let z1 = ok(phz(&x1(), &cfg))?;
    let z2 = ok(phz(&x2(), &cfg))?;
    ensure!(z1.approx_eq(&want1, TOL), "phz(X1) = {z1:?}");
    ensure!(z2.approx_eq(&want2, TOL), "phz(X2) = {z2:?}");
    let p1 = ok(persistent_homology(&x1(), &cfg))?;
    let p2 = ok(persistent_homology(&x2(), &cfg))?;
    ensure!(p1 == p2, "ordinary barcodes differ: {p1:?} vs {p2:?}");
    ensure!(z1 != z2, "bigraded barcodes coincide");
    Ok(format!("{} bigraded bars each; ordinary barcodes equal ({} bars)", z1.len(), p1.len()))
}

fn strong_outlier() -> Outcome {
    let mut checked = 0;
    for seed in 0..10u64 {
        let mut r = rng(seed);
        let mut pts = random_points(&mut r, 5, 1.0);
        pts.push([r.gen_range(20.0..30.0), r.gen_range(20.0..30.0)]);
        let x = ok(PseudoMetricSpace::from_points(&pts))?;
        ensure!(x.is_strong_outlier(5), "seed {seed}: point 5 is not a strong outlier");
        let d = x.diameter();
        let cfg = Config::with_field(FIELDS[seed as usize % 2]);
        let got = ok(phhz(&x, &cfg))?;
        let want = barcode(&[((0, 0), 0.0, f64::INFINITY), ((-1, 4), 0.0, d)]);
        ensure!(got == want, "seed {seed}: {got:?}, diameter {d}");
        checked += 1;
    }
    Ok(format!("{checked} random spaces, death at the diameter exactly"))
}

fn wedge_of_squares_barcodes() -> Outcome {
    let x = wedge_of_squares();
    ensure!(x.distance(0, 6) == 4.0, "diameter should be 4");
    for field in FIELDS {
        let cfg = Config::with_field(field);
        let got = ok(phhz(&x, &cfg))?;
        let want = barcode(&[((0, 0), 0.0, f64::INFINITY), ((-1, 4), 0.0, 4.0)]);
        ensure!(got == want, "full space over F{}: {got:?}", field.characteristic());

        let s = ok(x.restrict(&[0, 1, 2, 3]))?;
        let got = ok(phhz(&s, &cfg))?;
        let want = barcode(&[
            ((0, 0), 0.0, f64::INFINITY),
            ((-1, 4), 0.0, 2.0),
            ((-1, 4), 1.0, 2.0),
            ((-2, 8), 1.0, 2.0),
        ]);
        ensure!(got == want, "subset over F{}: {got:?}", field.characteristic());
    }
    Ok("full space and 4-point subset over F2 and F3".into())
}

fn bipartite_join() -> Outcome {
    let want = BTreeMap::from([(Bigrade::ORIGIN, 1), (Bigrade::new(1, 2), 2), (Bigrade::new(2, 4), 1)]);
    for field in FIELDS {
        let got = ok(DoubleHomology::compute(&complete_bipartite_2_3(), &Config::with_field(field)))?.dims();
        ensure!(got == want, "over F{}: {got:?}", field.characteristic());
    }
    Ok("dims 1, 2, 1 over F2 and F3".into())
}

fn surgery() -> Outcome {
    let mut non_simplex = 0;
    for seed in 0..100u64 {
        let (base, face, n, k) = random_gluing(&mut rng(1000 + seed));
        if k.is_simplex() {
            continue;
        }
        non_simplex += 1;
        for field in FIELDS {
            let dims = ok(DoubleHomology::compute(&k, &Config::with_field(field)))?.dims();
            ensure!(
                dims == surgery_dims(),
                "seed {seed}: {base:?} with a {n}-simplex along {face:#b} over F{}: {dims:?}",
                field.characteristic()
            );
        }
    }
    Ok(format!("100 gluings, {non_simplex} non-simplices, 0 failures"))
}

fn nilpotency() -> Outcome {
    let mut products = 0;
    for seed in 0..100u64 {
        let mut r = rng(2000 + seed);
        let m = r.gen_range(1..=8);
        let density = r.gen_range(0.1..0.9);
        let k = random_flag_complex(&mut r, m, density);
        for field in FIELDS {
            let group = ok(HochsterGroup::new(&k, &Config::with_field(field)))?;
            let grades: Vec<Bigrade> = group.layouts().keys().copied().collect();
            let chain = ok(DoubleChainComplex::new(std::sync::Arc::new(group)))?;
            for b in grades {
                let d1 = chain.differential(b);
                let d2 = chain.differential(b.next());
                if d1.rows() == 0 || d1.cols() == 0 || d2.rows() == 0 {
                    continue;
                }
                ensure!(ok(d2.mul(&d1))?.is_zero(), "seed {seed}: nonzero square at {b}");
                products += 1;
            }
        }
    }
    Ok(format!("100 complexes x 2 fields, {products} nontrivial products vanish"))
}

fn doubling() -> Outcome {
    for seed in 0..50u64 {
        let mut r = rng(3000 + seed);
        let field = FIELDS[seed as usize % 2];
        let cfg = Config::with_field(field);
        let m = r.gen_range(1..=6);
        let density = r.gen_range(0.1..0.9);
        let k = random_flag_complex(&mut r, m, density);
        let v = r.gen_range(0..m);
        let before = ok(DoubleHomology::compute(&k, &cfg))?.dims();
        let after = ok(DoubleHomology::compute(&ok(k.double_vertex(v))?, &cfg))?.dims();
        ensure!(before == after, "seed {seed}: HH {before:?} vs {after:?}");

        let n = r.gen_range(3..=6);
        let x = ok(PseudoMetricSpace::from_points(&random_points(&mut r, n, 10.0)))?;
        let v = r.gen_range(0..n);
        let a = ok(phhz(&x, &cfg))?;
        let b = ok(phhz(&ok(x.doubling(v))?, &cfg))?;
        ensure!(a == b, "seed {seed}: phhz changed under doubling at {v}");
    }
    Ok("50 complexes and 50 point clouds, exact equality".into())
}

fn rectangle_and_tetrahedron() -> Outcome {
    let n: f64 = 3.0;
    let l = (n * n - 1.0).sqrt();
    let x = ok(PseudoMetricSpace::from_matrix(&[
        [0.0, 1.0, l, n],
        [1.0, 0.0, n, l],
        [l, n, 0.0, 1.0],
        [n, l, 1.0, 0.0],
    ]))?;
    let y = ok(PseudoMetricSpace::from_matrix(&[
        [0.0, 1.0, 1.0, n],
        [1.0, 0.0, 1.0, n],
        [1.0, 1.0, 0.0, n],
        [n, n, n, 0.0],
    ]))?;
    let gh = ok(gromov_hausdorff(&x, &y))?;
    let ghb = ok(gromov_hausdorff_bijective(&x, &y))?;
    ensure!(gh == 0.5, "d_GH = {gh}");
    ensure!(ghb == 1.0, "d'_GH = {ghb}");
    Ok("d_GH = 0.5, d'_GH = 1".into())
}

fn random_barcode(r: &mut ChaCha8Rng) -> Barcode {
    let k = r.gen_range(0..7);
    Barcode::new(
        (0..k)
            .map(|_| {
                let g = Grade::Degree(r.gen_range(0..3));
                let b = r.gen_range(0.0..10.0);
                let d = if r.gen_bool(0.1) { f64::INFINITY } else { b + r.gen_range(0.01..10.0) };
                Bar::new(g, b, d)
            })
            .collect(),
    )
}

fn bottleneck_values() -> Outcome {
    let one = |b: f64, d: f64| Barcode::new(vec![Bar::new(Grade::Degree(0), b, d)]);
    let w1 = bottleneck(&one(0.0, 5.0), &one(1.0, 7.0), true);
    let w2 = bottleneck(&one(0.0, 5.0), &one(3.0, 9.0), true);
    ensure!(w1 == 2.0, "first value {w1}");
    ensure!(w2 == 3.0, "second value {w2}");
    let mut r = rng(4000);
    for trial in 0..200 {
        let a = random_barcode(&mut r);
        let b = random_barcode(&mut r);
        let graded = r.gen_bool(0.5);
        let p = bottleneck_with_cost(&a, &b, graded, pi_distance);
        let i = bottleneck_with_cost(&a, &b, graded, interval_interleaving);
        ensure!(p == i || (p - i).abs() <= TOL, "trial {trial}: {p} vs {i}");
    }
    Ok("2 and 3 exactly; 200 random pairs agree".into())
}

fn stability() -> Outcome {
    let mut worst: f64 = 0.0;
    // independent random pairs against the exact distance
    for seed in 0..50u64 {
        let mut r = rng(5000 + seed);
        let cfg = Config::with_field(FIELDS[seed as usize % 2]);
        let (nx, ny) = (r.gen_range(1..=5), r.gen_range(1..=5));
        let x = ok(PseudoMetricSpace::from_points(&random_points(&mut r, nx, 3.0)))?;
        let y = ok(PseudoMetricSpace::from_points(&random_points(&mut r, ny, 3.0)))?;
        let gh = ok(gromov_hausdorff(&x, &y))?;
        let w = bottleneck(&ok(phhz(&x, &cfg))?, &ok(phhz(&y, &cfg))?, true);
        ensure!(w <= 2.0 * gh + TOL, "seed {seed}: W = {w} > 2 d_GH = {}", 2.0 * gh);
        worst = worst.max(if gh > 0.0 { w / (2.0 * gh) } else { 0.0 });
    }
    // perturbations: moving every point by at most eps gives d_GH <= eps
    for seed in 0..50u64 {
        let mut r = rng(6000 + seed);
        let cfg = Config::with_field(FIELDS[seed as usize % 2]);
        let eps = r.gen_range(0.0..=0.2);
        let n = r.gen_range(3..=7);
        let pts = random_points(&mut r, n, 10.0);
        let x = ok(PseudoMetricSpace::from_points(&pts))?;
        let y = ok(PseudoMetricSpace::from_points(&perturb(&mut r, &pts, eps)))?;
        let w = bottleneck(&ok(phhz(&x, &cfg))?, &ok(phhz(&y, &cfg))?, true);
        ensure!(w <= 2.0 * eps + TOL, "seed {seed}: W = {w} > 2 eps = {}", 2.0 * eps);
    }
    // bijective distance for the non-double barcodes
    for seed in 0..50u64 {
        let mut r = rng(7000 + seed);
        let cfg = Config::with_field(FIELDS[seed as usize % 2]);
        let n = r.gen_range(1..=7);
        let x = ok(PseudoMetricSpace::from_points(&random_points(&mut r, n, 3.0)))?;
        let y = ok(PseudoMetricSpace::from_points(&random_points(&mut r, n, 3.0)))?;
        let ghb = ok(gromov_hausdorff_bijective(&x, &y))?;
        let w = bottleneck(&ok(phz(&x, &cfg))?, &ok(phz(&y, &cfg))?, true);
        ensure!(w <= 2.0 * ghb + TOL, "seed {seed}: W = {w} > 2 d'_GH = {}", 2.0 * ghb);
    }
    Ok(format!("150 pairs, 0 violations (largest W / 2 d_GH = {worst:.3})"))
}

/// Intervals `(b, d)` of grid indices whose containment counts reproduce the rank function.
fn exhaustive_intervals(tower: &Tower) -> Option<Vec<(usize, usize)>> {
    let n = tower.dims().len();
    let r = tower.rank_function();
    let kinds: Vec<(usize, usize)> = (0..n).flat_map(|b| (b + 1..=n).map(move |d| (b, d))).collect();
    let mut counts = vec![vec![0usize; n]; n];
    let mut chosen = Vec::new();
    fn go(
        kinds: &[(usize, usize)],
        k: usize,
        r: &[Vec<usize>],
        counts: &mut [Vec<usize>],
        chosen: &mut Vec<(usize, usize)>,
    ) -> bool {
        let n = r.len();
        if k == kinds.len() {
            return (0..n).all(|s| (s..n).all(|t| counts[s][t] == r[s][t]));
        }
        let (b, d) = kinds[k];
        let top = d.min(n);
        let mut added = 0;
        let found = loop {
            if go(kinds, k + 1, r, counts, chosen) {
                break true;
            }
            if added == 3 || !(b..top).all(|s| (s..top).all(|t| counts[s][t] < r[s][t])) {
                break false;
            }
            for s in b..top {
                for t in s..top {
                    counts[s][t] += 1;
                }
            }
            chosen.push((b, d));
            added += 1;
        };
        if !found {
            for _ in 0..added {
                chosen.pop();
                for s in b..top {
                    for t in s..top {
                        counts[s][t] -= 1;
                    }
                }
            }
        }
        found
    }
    go(&kinds, 0, &r, &mut counts, &mut chosen).then(|| {
        chosen.sort_unstable();
        chosen
    })
}

fn random_tower(r: &mut ChaCha8Rng) -> Tower {
    let n = r.gen_range(1..=4);
    let field = FIELDS[r.gen_range(0..2)];
    let p = field.characteristic();
    let dims: Vec<usize> = (0..n).map(|_| r.gen_range(0..=3)).collect();
    let steps = dims
        .windows(2)
        .map(|w| {
            let cols: Vec<Vec<u32>> = (0..w[0]).map(|_| (0..w[1]).map(|_| r.gen_range(0..p)).collect()).collect();
            FMatrix::from_columns(field, w[1], &cols).unwrap()
        })
        .collect();
    let grid = FiltrationGrid::new((0..n).map(|k| k as f64).collect()).unwrap();
    Tower::new(grid, Grade::Degree(0), dims, steps).unwrap()
}

/// Reduced Betti numbers from ranks of freshly built augmented boundary matrices.
fn oracle_betti(k: &SimplicialComplex, field: PrimeField) -> Vec<usize> {
    let top = k.vertex_count() as isize - 1;
    let faces = k.faces_by_dim(top);
    let boundary_rank = |upper: usize| -> usize {
        // ∂ from faces[upper] to faces[upper - 1]
        if upper == 0 || upper >= faces.len() || faces[upper].is_empty() {
            return 0;
        }
        let rows: Vec<Vec<i64>> = faces[upper - 1]
            .iter()
            .map(|&tau| {
                faces[upper]
                    .iter()
                    .map(|&sigma| {
                        if sigma & tau != tau || (sigma & !tau).count_ones() != 1 {
                            return 0;
                        }
                        let removed = (sigma & !tau).trailing_zeros();
                        let position = (sigma & ((1u32 << removed) - 1)).count_ones();
                        if position % 2 == 0 { 1 } else { -1 }
                    })
                    .collect()
            })
            .collect();
        FMatrix::from_rows(field, &rows).unwrap().rank()
    };
    (0..faces.len())
        .map(|g| faces[g].len() - boundary_rank(g) - boundary_rank(g + 1))
        .collect()
}

fn oracles() -> Outcome {
    let mut r = rng(8000);
    for trial in 0..200 {
        let t = random_tower(&mut r);
        let n = t.dims().len();
        let mut fast: Vec<(usize, usize)> = tower_barcode(&t)
            .bars()
            .iter()
            .map(|b| (b.birth as usize, if b.is_infinite() { n } else { b.death as usize }))
            .collect();
        fast.sort_unstable();
        let slow = exhaustive_intervals(&t).ok_or_else(|| format!("trial {trial}: no decomposition found"))?;
        ensure!(fast == slow, "tower {trial}: {fast:?} vs {slow:?}");
    }
    for seed in 0..50u64 {
        let mut r = rng(9000 + seed);
        let field = FIELDS[seed as usize % 2];
        let m = r.gen_range(1..=7);
        let density = r.gen_range(0.1..0.9);
        let k = random_flag_complex(&mut r, m, density);
        let table = ok(HochsterGroup::new(&k, &Config::with_field(field)))?.betti_table();
        let mut oracle: BTreeMap<Bigrade, usize> = BTreeMap::new();
        for mask in 0u32..1 << m {
            let size = bits(mask).count();
            let betti = oracle_betti(&ok(k.full_subcomplex(mask))?, field);
            for (g, &d) in betti.iter().enumerate() {
                if d > 0 {
                    *oracle.entry(Bigrade::of_summand(g as isize - 1, size)).or_default() += d;
                }
            }
        }
        ensure!(table == oracle, "seed {seed}: {table:?} vs {oracle:?}");
    }
    Ok("200 towers, 50 Betti tables".into())
}

fn trapezoid() -> Outcome {
    let mut complexes: Vec<SimplicialComplex> = Vec::new();
    for x in [x1(), x2(), wedge_of_squares()] {
        for &t in critical_values(&x).values() {
            complexes.push(ok(vietoris_rips(&x, t))?);
        }
    }
    complexes.push(complete_bipartite_2_3());
    complexes.push(SimplicialComplex::flag(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap());
    for seed in 0..100u64 {
        complexes.push(random_gluing(&mut rng(1000 + seed)).3);
    }
    for seed in 0..50u64 {
        let mut r = rng(9000 + seed);
        let m = r.gen_range(1..=7);
        let density = r.gen_range(0.1..0.9);
        complexes.push(random_flag_complex(&mut r, m, density));
    }
    let mut entries = 0;
    for k in &complexes {
        let table = ok(HochsterGroup::new(k, &Config::default()))?.betti_table();
        entries += table.len();
        let bad = trapezoid_violations(&table, k.universe());
        ensure!(bad.is_empty(), "{k:?} has entries at {bad:?}");
        ensure!(table.get(&Bigrade::ORIGIN) == Some(&1), "{k:?}: origin entry is not 1");
    }
    Ok(format!("{} complexes, {entries} nonzero entries inside the region", complexes.len()))
}

fn panic_message(e: Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "panic".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("two triangles: bigraded vs ordinary barcodes", two_triangles),
        ("strong outlier double barcode", strong_outlier),
        ("wedge of two squares and its 4-point subset", wedge_of_squares_barcodes),
        ("double homology of the 2+3 bipartite join", bipartite_join),
        ("gluing a simplex along a proper face", surgery),
        ("second differential squares to zero", nilpotency),
        ("doubling invariance of HH and phhz", doubling),
        ("rectangle vs tetrahedron GH distances", rectangle_and_tetrahedron),
        ("bottleneck golden values and cost agreement", bottleneck_values),
        ("stability inequalities", stability),
        ("tower and Betti table oracles", oracles),
        ("Betti numbers inside the trapezoid", trapezoid),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(check).unwrap_or_else(|e| Err(format!("panicked: {}", panic_message(e))));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.2}s]", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
