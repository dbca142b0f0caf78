//! A concrete tree: `[0, 1]` with Lebesgue measure and its m-adic intervals.
//!
//! Grid functions live on the `m^N` leaves. The maximal operator is exact on
//! such functions, which lets the closed-form bounds be checked from both
//! sides: [`transplant`] realizes an extremal profile as a function whose
//! level set has (almost) the predicted measure, and [`oracle_search`] looks
//! for anything better.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundBranch};
use crate::domain::{approx_eq, normalize, require_domain, ConstraintTriple, Exponents};
use crate::error::{Error, Result};
use crate::extremal::{self, ExtremalBranch};
use crate::grid::{extract_equal_average_block, sorted_desc, weak_norm_sorted, GridFunction};
use crate::profile::Profile;
use crate::roots::bisect;

/// Relative slack when testing `M_T φ ≥ λ`, absorbing rounding in averages.
pub const LEVEL_TOL: f64 = 1e-12;

/// Cap on cell exchanges when trimming one transplant window.
const MAX_EXCHANGES: usize = 64;

/// Largest leaf count a tree may have.
pub const MAX_CELLS: usize = 1 << 24;

/// The m-adic tree of depth `N` over `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeSpec {
    branching: usize,
    depth: u32,
}

impl TreeSpec {
    pub fn new(branching: usize, depth: u32) -> Result<Self> {
        if branching < 2 {
            return Err(Error::Constraint(format!("branching m ≥ 2 (got {branching})")));
        }
        let cells = (branching as u128).checked_pow(depth).unwrap_or(u128::MAX);
        if cells > MAX_CELLS as u128 {
            return Err(Error::Constraint(format!("{branching}^{depth} cells exceeds {MAX_CELLS}")));
        }
        Ok(Self { branching, depth })
    }

    pub fn dyadic(depth: u32) -> Result<Self> {
        Self::new(2, depth)
    }

    pub fn branching(&self) -> usize {
        self.branching
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Leaf count `m^N`.
    pub fn cells(&self) -> usize {
        self.branching.pow(self.depth)
    }

    /// Leaf count of one interval at `level`.
    pub fn cells_per_interval(&self, level: u32) -> usize {
        self.branching.pow(self.depth - level)
    }
}

/// An interval `[index · m^{-level}, (index+1) · m^{-level})` of the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeInterval {
    pub level: u32,
    pub index: usize,
}

impl TreeInterval {
    pub fn start(&self, tree: &TreeSpec) -> f64 {
        self.index as f64 / (tree.branching as f64).powi(self.level as i32)
    }

    pub fn length(&self, tree: &TreeSpec) -> f64 {
        (tree.branching as f64).powi(-(self.level as i32))
    }

    /// Leaf range covered by the interval.
    pub fn leaves(&self, tree: &TreeSpec) -> std::ops::Range<usize> {
        let w = tree.cells_per_interval(self.level);
        self.index * w..(self.index + 1) * w
    }
}

/// `M_T φ` on the leaves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalField {
    pub values: Vec<f64>,
}

impl MaximalField {
    /// `|{M_T φ ≥ λ}|`, with the closed inequality.
    pub fn distribution_measure(&self, lambda: f64) -> f64 {
        count_at_level(&self.values, lambda) as f64 / self.values.len() as f64
    }

    pub fn to_grid(&self) -> GridFunction {
        GridFunction::new(self.values.clone()).expect("maximal averages are finite and nonnegative")
    }
}

/// Free-function form of [`MaximalField::distribution_measure`].
pub fn distribution_measure(field: &MaximalField, lambda: f64) -> f64 {
    field.distribution_measure(lambda)
}

fn reaches(v: f64, lambda: f64) -> bool {
    v >= lambda * (1.0 - LEVEL_TOL)
}

fn count_at_level(values: &[f64], lambda: f64) -> usize {
    values.iter().filter(|&&v| reaches(v, lambda)).count()
}

/// Exact `M_T φ`: averages per level bottom-up, then running maxima of the
/// ancestor averages top-down. Linear in the number of leaves.
pub fn maximal_operator(phi: &GridFunction, tree: &TreeSpec) -> Result<MaximalField> {
    if phi.len() != tree.cells() {
        return Err(Error::Constraint(format!(
            "grid has {} cells but the tree has {} leaves",
            phi.len(),
            tree.cells()
        )));
    }
    Ok(MaximalField { values: maximal_values(phi.values(), tree) })
}

fn maximal_values(values: &[f64], tree: &TreeSpec) -> Vec<f64> {
    let m = tree.branching;
    let mut averages: Vec<Vec<f64>> = Vec::with_capacity(tree.depth as usize + 1);
    averages.push(values.to_vec());
    for _ in 0..tree.depth {
        let finer = averages.last().expect("at least the leaf level");
        let coarser: Vec<f64> = finer.chunks_exact(m).map(|c| c.iter().sum::<f64>() / m as f64).collect();
        averages.push(coarser);
    }
    // averages[d] now holds level N - d.
    let mut running = averages.pop().expect("root level");
    while let Some(level) = averages.pop() {
        running = level.iter().enumerate().map(|(i, &a)| a.max(running[i / m])).collect();
    }
    running
}

/// Maximal tree intervals tiling `[0, α_N)`, `α_N = ⌊α m^N⌋ / m^N`, largest first.
pub fn dyadic_cover(alpha: f64, tree: &TreeSpec) -> Result<Vec<TreeInterval>> {
    if !(0.0..=1.0 + 1e-12).contains(&alpha) {
        return Err(Error::OutOfRange(format!("α = {alpha} outside [0, 1]")));
    }
    let count = cover_cells(alpha, tree);
    Ok(cover_blocks(count, tree.branching, tree.depth)
        .into_iter()
        .map(|(level, start, width)| TreeInterval { level, index: start / width })
        .collect())
}

/// `(level, first leaf, leaf count)` of the maximal intervals tiling the
/// first `count` leaves of an `m`-ary tree of the given depth.
fn cover_blocks(count: usize, m: usize, depth: u32) -> Vec<(u32, usize, usize)> {
    let total = m.pow(depth);
    if count == total {
        return vec![(0, 0, total)];
    }
    let mut out = Vec::new();
    let mut offset = 0usize;
    for level in 1..=depth {
        let w = m.pow(depth - level);
        let digit = (count - offset) / w;
        debug_assert!(digit < m);
        for _ in 0..digit {
            out.push((level, offset, w));
            offset += w;
        }
    }
    debug_assert_eq!(offset, count);
    out
}

/// `⌊α m^N⌋`, snapping values within rounding of an integer.
fn cover_cells(alpha: f64, tree: &TreeSpec) -> usize {
    let total = tree.cells();
    let x = alpha.clamp(0.0, 1.0) * total as f64;
    let nearest = x.round();
    let cells = if (x - nearest).abs() <= 1e-9 * x.max(1.0) { nearest } else { x.floor() };
    (cells as usize).min(total)
}

/// Realizes a nonincreasing profile on the tree so that the cover of
/// `[0, α_N)` consists of intervals whose averages reach `λ`.
///
/// Each cover interval, largest first, receives a window of the remaining
/// head cells whose average matches the current remaining average; the tail
/// fills the rest of `[0, 1]` in decreasing order. A cover interval left
/// short of `λ` by rounding is rearranged the same way inside itself, so the
/// loss shrinks to one of its subintervals. The output is a rearrangement of
/// the discretized profile, so its integral and L^q mass are those of the
/// discretization.
pub fn transplant(g: &Profile, alpha: f64, lambda: f64, tree: &TreeSpec) -> Result<GridFunction> {
    if !(0.0..=1.0 + 1e-12).contains(&alpha) {
        return Err(Error::Infeasible(format!("α = {alpha} outside [0, 1]")));
    }
    let reach = g.running_integral_clamped(alpha);
    if reach < alpha * lambda - 1e-9 {
        return Err(Error::Infeasible(format!(
            "∫_0^α g = {reach} is below αλ = {}",
            alpha * lambda
        )));
    }
    let sorted = sorted_desc(g.discretize_cells(tree.cells()).values());
    let mut out = vec![0.0; sorted.len()];
    place(&sorted, cover_cells(alpha, tree), lambda, tree.branching, tree.depth, &mut out)?;
    GridFunction::new(out)
}

/// Writes the nonincreasing `sorted` into `out` (a subtree of the given
/// depth), covering its first `head_len` leaves with `λ`-intervals.
fn place(sorted: &[f64], head_len: usize, lambda: f64, m: usize, depth: u32, out: &mut [f64]) -> Result<()> {
    let blocks = cover_blocks(head_len, m, depth);
    let mut head: Vec<f64> = sorted[..head_len].to_vec();
    for &(_, start, width) in &blocks {
        let target = head.iter().sum::<f64>() / head.len() as f64;
        let r = extract_equal_average_block(&head, width, target)?;
        let (window, rest) = refine_window(&head, r, width, target);
        out[start..start + width].copy_from_slice(&window);
        head = rest;
    }
    debug_assert!(head.is_empty());
    out[head_len..].copy_from_slice(&sorted[head_len..]);

    for &(level, start, width) in &blocks {
        let cells = &mut out[start..start + width];
        let sum: f64 = cells.iter().sum();
        if width == 1 || sum >= lambda * width as f64 * (1.0 - LEVEL_TOL) {
            continue;
        }
        // Longest prefix of the interval's own cells still averaging λ.
        let local = cells.to_vec();
        let mut acc = 0.0;
        let mut reach = 0;
        for (i, v) in local.iter().enumerate() {
            acc += v;
            if acc >= lambda * (i + 1) as f64 * (1.0 - LEVEL_TOL) {
                reach = i + 1;
            }
        }
        if reach > 0 {
            place(&local, reach, lambda, m, depth - level, cells)?;
        }
    }
    Ok(())
}

/// Trims the overshoot of the crossing window `[r, r + width)` over the
/// average `target` by exchanging window cells with cells below it.
///
/// Adjacent crossing windows can differ by far more than the surplus left
/// above `λ` when the head is singular; a few exchanges bring the overshoot
/// down to roughly the local cell spacing. Returns the window in decreasing
/// order and the remaining head, still sorted.
fn refine_window(head: &[f64], r: usize, width: usize, target: f64) -> (Vec<f64>, Vec<f64>) {
    let mut window = head[r..r + width].to_vec();
    let mut below = head[r + width..].to_vec();
    let mut overshoot = window.iter().sum::<f64>() - target * width as f64;
    for _ in 0..MAX_EXCHANGES {
        if overshoot <= 0.0 || below.is_empty() {
            break;
        }
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, &v) in window.iter().enumerate() {
            // Smallest cell below the window that is still ≥ v - overshoot.
            let k = below.partition_point(|b| *b >= v - overshoot);
            if k > 0 && v - below[k - 1] > best.map_or(0.0, |b| b.2) {
                best = Some((i, k - 1, v - below[k - 1]));
            }
        }
        let Some((i, j, cut)) = best else { break };
        std::mem::swap(&mut window[i], &mut below[j]);
        window.sort_unstable_by(|a, b| b.total_cmp(a));
        below.sort_unstable_by(|a, b| b.total_cmp(a));
        overshoot -= cut;
    }
    let mut rest = head[..r].to_vec();
    rest.extend_from_slice(&below);
    (window, rest)
}

/// End-to-end comparison of the formula with a simulated extremizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub lambda: f64,
    pub formula_t: f64,
    pub simulated_measure: f64,
    /// `formula_t - simulated_measure`.
    pub gap: f64,
    pub grid_level: u32,
    pub branching: usize,
    pub branch: BoundBranch,
    pub extremal_branch: ExtremalBranch,
    pub bound: bounds::BoundReport,
}

/// Evaluates the bound, builds the matching extremizer, transplants it onto
/// the tree and measures `{M_T φ ≥ λ}`.
pub fn verify_sharpness(
    exp: &Exponents,
    c: &ConstraintTriple,
    lambda: f64,
    tree: &TreeSpec,
) -> Result<SharpnessReport> {
    let bound = bounds::t_scaled(exp, c, lambda)?;
    let (n, scale) = normalize(exp, c);
    let level = lambda / scale;
    let (g, recipe) = extremal::extremizer_for(n.l1, n.lq, level, exp)?;
    let phi = transplant(&g, recipe.alpha, level, tree)?;
    let measure = maximal_operator(&phi, tree)?.distribution_measure(level);
    Ok(SharpnessReport {
        lambda,
        formula_t: bound.t_value,
        simulated_measure: measure,
        gap: bound.t_value - measure,
        grid_level: tree.depth,
        branching: tree.branching,
        branch: bound.branch,
        extremal_branch: recipe.branch,
        bound,
    })
}

/// Settings for [`oracle_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Local-search steps per seed.
    pub steps: usize,
    /// Independent local-search runs.
    pub seeds: usize,
    pub base_seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { steps: 500, seeds: 8, base_seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub best_measure: f64,
    pub witness: GridFunction,
    pub formula_t: f64,
    /// `formula_t - best_measure`.
    pub gap: f64,
}

/// Largest level cell count allowed in [`oracle_search`].
pub const ORACLE_MAX_LEVEL: u32 = 12;

/// L^q tolerance for accepting a search state.
const ORACLE_LQ_TOL: f64 = 1e-6;
/// Weak-norm slack for accepting a search state.
const ORACLE_NORM_TOL: f64 = 1e-12;

/// Searches `2^n`-cell functions with `∫ φ = f`, `∫ φ^q = A` and weak norm
/// at most one for a large `|{M_T φ ≥ λ}|`.
///
/// Starts are transplants of every applicable extremal profile, projected
/// back onto `∫ φ^q = A` by mixing with the constant `f` or with an extreme
/// point rearranged to the same order. Each seed then runs a local search of
/// three-cell moves that keep `∫ φ` and `∫ φ^q` fixed.
pub fn oracle_search(
    f: f64,
    a: f64,
    lambda: f64,
    exp: &Exponents,
    n: u32,
    config: &OracleConfig,
) -> Result<OracleResult> {
    require_domain(exp, f, a)?;
    if n > ORACLE_MAX_LEVEL {
        return Err(Error::OutOfRange(format!("oracle level n = {n} exceeds {ORACLE_MAX_LEVEL}")));
    }
    let tree = TreeSpec::dyadic(n)?;
    let formula_t = bounds::t1(f, a, lambda, exp)?.t_value;
    let (p, q) = (exp.p(), exp.q());

    if approx_eq(a, f.powf(q)) {
        let witness = GridFunction::constant(f, tree.cells())?;
        let best = maximal_operator(&witness, &tree)?.distribution_measure(lambda);
        return Ok(OracleResult { best_measure: best, witness, formula_t, gap: formula_t - best });
    }

    let donor = extremal::extreme_point_steps(n, f, p);
    // The L^q mass is convex, so its maximum over the cell functions is at
    // an extreme point; they are all rearrangements of `donor`.
    let ceiling = donor.iter().map(|v| v.powf(q)).sum::<f64>() / tree.cells() as f64;
    if a > ceiling * (1.0 + ORACLE_LQ_TOL) {
        return Err(Error::Infeasible(format!(
            "A = {a} exceeds {ceiling}, the largest ∫φ^q of a {}-cell function with ∫φ = {f} and weak norm ≤ 1",
            tree.cells()
        )));
    }
    let mut starts: Vec<(Vec<f64>, f64)> = Vec::new();
    for profile in seed_profiles(f, a, lambda, exp) {
        let reach = profile.level_reach(lambda);
        let Ok(phi) = transplant(&profile, reach, lambda, &tree) else { continue };
        let mut values = phi.into_values();
        if !project_lq(&mut values, f, a, q, &donor) {
            continue;
        }
        if weak_norm_sorted(&sorted_desc(&values), p) > 1.0 + ORACLE_NORM_TOL {
            continue;
        }
        let measure = count_at_level(&maximal_values(&values, &tree), lambda) as f64 / tree.cells() as f64;
        starts.push((values, measure));
    }
    let Some((start, start_measure)) = starts.into_iter().max_by(|x, y| x.1.total_cmp(&y.1)) else {
        return Err(Error::Infeasible(format!(
            "no {}-cell function has ∫φ = {f}, ∫φ^q = {a} and weak norm ≤ 1",
            tree.cells()
        )));
    };

    let run = |seed: usize| {
        local_search(start.clone(), start_measure, lambda, exp, &tree, config.steps, config.base_seed.wrapping_add(seed as u64))
    };
    #[cfg(feature = "parallel")]
    let runs: Vec<(Vec<f64>, f64)> = {
        use rayon::prelude::*;
        (0..config.seeds).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let runs: Vec<(Vec<f64>, f64)> = (0..config.seeds).map(run).collect();

    // Ties go to the earliest run, keeping output independent of scheduling.
    let (best_values, best_measure) = runs
        .into_iter()
        .fold((start, start_measure), |acc, r| if r.1 > acc.1 { r } else { acc });
    Ok(OracleResult {
        best_measure,
        witness: GridFunction::new(best_values)?,
        formula_t,
        gap: formula_t - best_measure,
    })
}

fn seed_profiles(f: f64, a: f64, lambda: f64, exp: &Exponents) -> Vec<Profile> {
    let mut out = Vec::new();
    if let Ok((g, _)) = extremal::extremizer_for(f, a, lambda, exp) {
        out.push(g);
    }
    if let Ok(g) = extremal::construct_two_piece(f, a, 1.0, exp) {
        out.push(g);
    }
    if let Ok((g, _)) = extremal::construct_prop43(f, a, lambda, exp) {
        out.push(g);
    }
    if let Ok((g, _)) = extremal::construct_prop44(f, a, lambda, exp) {
        out.push(g);
    }
    out
}

/// Moves `values` (with `∫ = f`) onto `∫ φ^q = a` along a segment towards
/// the constant `f` or towards `donor` rearranged into the same order. Both
/// endpoints have weak norm ≤ 1 and the norm is convex, so the segment
/// stays admissible.
fn project_lq(values: &mut [f64], f: f64, a: f64, q: f64, donor_sorted: &[f64]) -> bool {
    let n = values.len() as f64;
    let lq = |v: &[f64]| v.iter().map(|x| x.powf(q)).sum::<f64>() / n;
    let current = lq(values);
    if (current - a).abs() <= 1e-13 {
        return true;
    }
    let target: Vec<f64> = if current > a {
        vec![f; values.len()]
    } else {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
        let mut t = vec![0.0; values.len()];
        for (rank, &i) in order.iter().enumerate() {
            t[i] = donor_sorted[rank];
        }
        t
    };
    if (lq(&target) - a) * (current - a) > 0.0 {
        return false;
    }
    let base = values.to_vec();
    let mix = |s: f64| -> f64 {
        base.iter().zip(&target).map(|(x, y)| ((1.0 - s) * x + s * y).powf(q)).sum::<f64>() / n - a
    };
    let Ok(root) = bisect(mix, 0.0, 1.0, "L^q projection") else { return false };
    for (v, (x, y)) in values.iter_mut().zip(base.iter().zip(&target)) {
        *v = ((1.0 - root.x) * x + root.x * y).max(0.0);
    }
    (lq(values) - a).abs() <= ORACLE_LQ_TOL
}

fn local_search(
    mut values: Vec<f64>,
    mut measure: f64,
    lambda: f64,
    exp: &Exponents,
    tree: &TreeSpec,
    steps: usize,
    seed: u64,
) -> (Vec<f64>, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = values.len();
    if cells < 3 {
        return (values, measure);
    }
    let (p, q) = (exp.p(), exp.q());
    let mut candidate = values.clone();
    for _ in 0..steps {
        let i = rng.gen_range(0..cells);
        let j = rng.gen_range(0..cells);
        let l = rng.gen_range(0..cells);
        if i == j || j == l || i == l {
            continue;
        }
        let top = values[i].max(values[j]).max(values[l]).max(1e-300);
        let size = top * 10f64.powf(-4.0 * rng.gen::<f64>());
        let delta = if rng.gen::<bool>() { size } else { -size };
        candidate.copy_from_slice(&values);
        if !three_cell_move(&mut candidate, [i, j, l], delta, q, rng.gen::<bool>()) {
            continue;
        }
        if weak_norm_sorted(&sorted_desc(&candidate), p) > 1.0 + ORACLE_NORM_TOL {
            continue;
        }
        let m = count_at_level(&maximal_values(&candidate, tree), lambda) as f64 / cells as f64;
        if m >= measure {
            std::mem::swap(&mut values, &mut candidate);
            measure = m;
        }
    }
    (values, measure)
}

/// Changes cell `i` by `delta` and redistributes cells `j`, `l` so that both
/// their sum and the sum of `q`-th powers over the three cells are unchanged.
fn three_cell_move(v: &mut [f64], [i, j, l]: [usize; 3], delta: f64, q: f64, j_larger: bool) -> bool {
    let new_i = v[i] + delta;
    if new_i < 0.0 {
        return false;
    }
    let rest = v[i] + v[j] + v[l] - new_i;
    if rest < 0.0 {
        return false;
    }
    let target = v[i].powf(q) + v[j].powf(q) + v[l].powf(q) - new_i.powf(q);
    let lo_val = 2.0 * (0.5 * rest).powf(q);
    let hi_val = rest.powf(q);
    if !(target >= lo_val && target <= hi_val) {
        return false;
    }
    // x^q + (rest - x)^q is increasing on [rest/2, rest].
    let h = |x: f64| x.powf(q) + (rest - x).powf(q) - target;
    let Ok(root) = bisect(h, 0.5 * rest, rest, "three-cell move") else { return false };
    let (big, small) = (root.x, (rest - root.x).max(0.0));
    v[i] = new_i;
    if j_larger {
        v[j] = big;
        v[l] = small;
    } else {
        v[j] = small;
        v[l] = big;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field() {
        let tree = TreeSpec::dyadic(5).unwrap();
        let phi = GridFunction::constant(0.7, 32).unwrap();
        let field = maximal_operator(&phi, &tree).unwrap();
        assert!(field.values.iter().all(|&v| v == 0.7));
        assert_eq!(field.distribution_measure(0.7), 1.0);
        assert_eq!(field.distribution_measure(0.71), 0.0);
    }

    #[test]
    fn two_cell_field() {
        let tree = TreeSpec::dyadic(1).unwrap();
        let phi = GridFunction::new(vec![2.0, 0.0]).unwrap();
        let field = maximal_operator(&phi, &tree).unwrap();
        assert_eq!(field.values, vec![2.0, 1.0]);
        assert_eq!(field.distribution_measure(1.0), 1.0);
        assert_eq!(field.distribution_measure(1.5), 0.5);
        assert_eq!(field.distribution_measure(0.0), 1.0);
        assert_eq!(field.distribution_measure(2.5), 0.0);
    }

    #[test]
    fn triadic_field() {
        let tree = TreeSpec::new(3, 1).unwrap();
        let phi = GridFunction::new(vec![3.0, 0.0, 0.0]).unwrap();
        let field = maximal_operator(&phi, &tree).unwrap();
        assert_eq!(field.values, vec![3.0, 1.0, 1.0]);
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let tree = TreeSpec::dyadic(3).unwrap();
        assert!(maximal_operator(&GridFunction::constant(1.0, 4).unwrap(), &tree).is_err());
    }

    #[test]
    fn cover_examples() {
        let tree = TreeSpec::dyadic(4).unwrap();
        assert_eq!(dyadic_cover(0.5, &tree).unwrap(), vec![TreeInterval { level: 1, index: 0 }]);
        assert_eq!(
            dyadic_cover(0.375, &tree).unwrap(),
            vec![TreeInterval { level: 2, index: 0 }, TreeInterval { level: 3, index: 2 }]
        );
        // ⌊16/6⌋ = 2 cells
        assert_eq!(dyadic_cover(1.0 / 6.0, &tree).unwrap(), vec![TreeInterval { level: 3, index: 0 }]);
        assert_eq!(dyadic_cover(1.0, &tree).unwrap(), vec![TreeInterval { level: 0, index: 0 }]);
        assert!(dyadic_cover(0.0, &tree).unwrap().is_empty());
        let t3 = TreeSpec::new(3, 3).unwrap();
        let cover = dyadic_cover(8.0 / 27.0, &t3).unwrap();
        let total: f64 = cover.iter().map(|c| c.length(&t3)).sum();
        assert!((total - 8.0 / 27.0).abs() < 1e-15);
        let starts: Vec<f64> = cover.iter().map(|c| c.start(&t3)).collect();
        assert!(starts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn cover_measure_bounds() {
        let tree = TreeSpec::dyadic(10).unwrap();
        for i in 1..100 {
            let alpha = i as f64 / 100.0 + 1e-4;
            let total: f64 = dyadic_cover(alpha, &tree).unwrap().iter().map(|c| c.length(&tree)).sum();
            assert!(total <= alpha && total > alpha - 1.0 / 1024.0);
        }
    }

    #[test]
    fn transplant_constant() {
        let tree = TreeSpec::dyadic(6).unwrap();
        let g = Profile::constant(3.0, 1.3, 1.0).unwrap();
        let phi = transplant(&g, 1.0, 1.3, &tree).unwrap();
        assert!(phi.values().iter().all(|&v| v == 1.3));
        assert_eq!(maximal_operator(&phi, &tree).unwrap().distribution_measure(1.3), 1.0);
    }

    #[test]
    fn transplant_rejects_unreachable_level() {
        let tree = TreeSpec::dyadic(6).unwrap();
        let g = Profile::constant(3.0, 0.5, 1.0).unwrap();
        assert!(matches!(transplant(&g, 0.5, 0.8, &tree), Err(Error::Infeasible(_))));
    }

    #[test]
    fn three_cell_move_preserves_moments() {
        let mut v = vec![1.0, 0.4, 0.2];
        let (s, q2) = (v.iter().sum::<f64>(), v.iter().map(|x: &f64| x * x).sum::<f64>());
        assert!(three_cell_move(&mut v, [0, 1, 2], -0.1, 2.0, true));
        assert!((v.iter().sum::<f64>() - s).abs() < 1e-15);
        assert!((v.iter().map(|x| x * x).sum::<f64>() - q2).abs() < 1e-14);
        assert!((v[0] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn oracle_lower_boundary() {
        let x = Exponents::new(3.0, 2.0).unwrap();
        let cfg = OracleConfig { steps: 10, seeds: 1, base_seed: 0 };
        let r = oracle_search(0.5, 0.25, 0.4, &x, 6, &cfg).unwrap();
        assert_eq!(r.best_measure, 1.0);
        let r = oracle_search(0.5, 0.25, 0.6, &x, 6, &cfg).unwrap();
        assert_eq!(r.best_measure, 0.0);
        assert!(r.witness.values().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn oracle_level_cap() {
        let x = Exponents::new(3.0, 2.0).unwrap();
        let err = oracle_search(0.5, 0.3, 1.0, &x, 13, &OracleConfig::default()).unwrap_err();
        assert!(matches!(err, Error::OutOfRange(_)));
    }
}
