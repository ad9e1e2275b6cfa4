//! Ground-truth gap probabilities at desk scale.
//!
//! The root oracle is [`gap_enumerate`], a literal sum over all particle
//! configurations; it involves no derivation steps and everything else in the
//! crate is ultimately validated against it. The same module provides the
//! exact Fredholm determinant of the projection kernel, seed values for the
//! recursion pipelines, and the diagonal resolvent identity.

use crate::ensemble::NodeGrid;
use crate::error::{CoreError, Result};
use crate::orthopoly::{cd_kernel, OPSystem};
use crate::scalar::Scalar;

/// Gap probabilities `D_s` for `s = start ..= start + values.len() - 1`.
///
/// `D_s` is the probability that all particles sit strictly below node `s`,
/// so `D_N` is the fully packed value and `D_{M+1} = 1`. Values are positive
/// and nondecreasing in `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct GapTable<T: Scalar> {
    pub start: usize,
    pub values: Vec<T>,
    pub method: &'static str,
}

impl<T: Scalar> GapTable<T> {
    /// The value `D_s`; panics when `s` is outside the table range.
    pub fn value(&self, s: usize) -> &T {
        &self.values[s - self.start]
    }

    /// Largest `s` stored, normally `M + 1`.
    pub fn end(&self) -> usize {
        self.start + self.values.len() - 1
    }
}

/// Binomial coefficient with saturation, for enumeration guards.
fn binomial_guard(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > u128::from(u64::MAX) {
            return u128::MAX;
        }
    }
    acc
}

/// Calls `f` on every strictly increasing `k`-subset of `0..n`.
fn for_each_subset<F: FnMut(&[usize])>(n: usize, k: usize, mut f: F) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // Advance the rightmost index that can still move.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Unnormalized measure of one configuration: the squared Vandermonde of its
/// nodes times the product of its weights.
fn config_mass<T: Scalar>(grid: &NodeGrid<T>, subset: &[usize]) -> T {
    let mut mass = T::one();
    for (a, &xa) in subset.iter().enumerate() {
        mass = mass * grid.weights[xa].clone();
        for &xb in subset.iter().take(a) {
            let diff = grid.nodes[xa].clone() - grid.nodes[xb].clone();
            mass = mass * diff.clone() * diff;
        }
    }
    mass
}

/// Sum of configuration masses over all `k`-subsets of `0..limit`.
fn mass_sum<T: Scalar>(grid: &NodeGrid<T>, k: usize, limit: usize) -> T {
    let mut acc = T::zero();
    for_each_subset(limit, k, |subset| {
        acc = acc.clone() + config_mass(grid, subset);
    });
    acc
}

/// Gap probability `D_s` by literal enumeration: the measure of all
/// `N`-particle configurations inside `{0 .. s-1}`, normalized by the total
/// over `{0 .. M}`.
pub fn gap_enumerate<T: Scalar>(
    grid: &NodeGrid<T>,
    big_n: usize,
    s: usize,
) -> Result<T> {
    let total = grid.len();
    assert!(big_n <= s && s <= total, "s outside N ..= M+1");
    let count = binomial_guard(total, big_n);
    if count > 1_000_000 {
        return Err(CoreError::TooLarge(format!(
            "C({total}, {big_n}) = {count} configurations"
        )));
    }
    Ok(mass_sum(grid, big_n, s) / mass_sum(grid, big_n, total))
}

/// Determinant of a dense matrix by fraction-free-enough Gaussian
/// elimination over a field; empty matrix gives 1.
fn det_dense<T: Scalar>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    let mut det = T::one();
    for col in 0..n {
        let Some(pivot_row) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return T::zero();
        };
        if pivot_row != col {
            m.swap(pivot_row, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det = det * pivot.clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() / pivot.clone();
            for c in col..n {
                let sub = factor.clone() * m[col][c].clone();
                m[r][c] = m[r][c].clone() - sub;
            }
        }
    }
    det
}

/// Solves `A X = B` for square `A` by Gauss-Jordan elimination; `None` when
/// `A` is singular.
fn solve_dense<T: Scalar>(
    mut a: Vec<Vec<T>>,
    mut b: Vec<Vec<T>>,
) -> Option<Vec<Vec<T>>> {
    let n = a.len();
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(pivot_row, col);
        b.swap(pivot_row, col);
        let pivot = a[col][col].clone();
        for c in 0..n {
            a[col][c] = a[col][c].clone() / pivot.clone();
        }
        for c in 0..b[col].len() {
            b[col][c] = b[col][c].clone() / pivot.clone();
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in 0..n {
                let sub = factor.clone() * a[col][c].clone();
                a[r][c] = a[r][c].clone() - sub;
            }
            for c in 0..b[r].len() {
                let sub = factor.clone() * b[col][c].clone();
                b[r][c] = b[r][c].clone() - sub;
            }
        }
    }
    Some(b)
}

/// The kernel block `Kt` restricted to nodes `s ..= M`.
fn kernel_block<T: Scalar>(
    ops: &OPSystem<T>,
    grid: &NodeGrid<T>,
    big_n: usize,
    s: usize,
) -> Result<Vec<Vec<T>>> {
    let top = grid.len() - 1;
    let mut block = Vec::with_capacity(top + 1 - s);
    for x in s..=top {
        let mut row = Vec::with_capacity(top + 1 - s);
        for y in s..=top {
            row.push(cd_kernel(ops, grid, big_n, x, y)?);
        }
        block.push(row);
    }
    Ok(block)
}

/// Gap probability as the exact Fredholm determinant
/// `det(I - Kt restricted to {s ..= M})`.
pub fn gap_fredholm<T: Scalar>(
    ops: &OPSystem<T>,
    grid: &NodeGrid<T>,
    big_n: usize,
    s: usize,
) -> Result<T> {
    let total = grid.len();
    assert!(big_n <= s && s <= total, "s outside N ..= M+1");
    let mut block = kernel_block(ops, grid, big_n, s)?;
    for (r, row) in block.iter_mut().enumerate() {
        for (c, entry) in row.iter_mut().enumerate() {
            let diag = if r == c { T::one() } else { T::zero() };
            *entry = diag - entry.clone();
        }
    }
    Ok(det_dense(block))
}

/// The auxiliary values `rho_x = w(x)^{-1} prod_{m <= N-1, m != x}
/// (pi_x - pi_m)^{-2}`, defined for any node index `x`.
pub fn rho_value<T: Scalar>(grid: &NodeGrid<T>, big_n: usize, x: usize) -> T {
    let mut denom = grid.weights[x].clone();
    for m in 0..big_n {
        if m == x {
            continue;
        }
        let diff = grid.nodes[x].clone() - grid.nodes[m].clone();
        denom = denom * diff.clone() * diff;
    }
    T::one() / denom
}

/// Seed values `(D_N, D_{N+1})` for the recursion pipelines.
///
/// `D_N` is the single packed configuration's mass over the partition
/// function, which by the Heine identity equals the product of the squared
/// norms `c_0 .. c_{N-1}`. `D_{N+1}` adds the configurations with one
/// particle at node `N`:
///
/// ```text
/// D_{N+1} = w(N) * h_N * D_N * prod_{l<N} (pi_N - pi_l)^2,
/// h_N = rho_N + sum_{m<N} rho_m / (pi_N - pi_m)^2.
/// ```
pub fn seed_values<T: Scalar>(
    ops: &OPSystem<T>,
    grid: &NodeGrid<T>,
    big_n: usize,
) -> (T, T) {
    let mut z = T::one();
    for k in 0..big_n {
        z = z * ops.norm(k).clone();
    }
    let packed: Vec<usize> = (0..big_n).collect();
    let d_n = config_mass(grid, &packed) / z;

    let mut h = rho_value(grid, big_n, big_n);
    let mut vandermonde_sq = T::one();
    for m in 0..big_n {
        let diff = grid.nodes[big_n].clone() - grid.nodes[m].clone();
        let diff_sq = diff.clone() * diff;
        h = h + rho_value(grid, big_n, m) / diff_sq.clone();
        vandermonde_sq = vandermonde_sq * diff_sq;
    }
    let d_n1 =
        grid.weights[big_n].clone() * h * d_n.clone() * vandermonde_sq;
    (d_n, d_n1)
}

/// Diagonal resolvent value `R_s(pi_s, pi_s)` of the kernel restricted to
/// `{s ..= M}`, satisfying `1 + R_s(pi_s, pi_s) = D_{s+1} / D_s`.
pub fn resolvent_diag<T: Scalar>(
    ops: &OPSystem<T>,
    grid: &NodeGrid<T>,
    big_n: usize,
    s: usize,
) -> Result<T> {
    let total = grid.len();
    assert!(big_n <= s && s < total, "s outside N ..= M");
    let block = kernel_block(ops, grid, big_n, s)?;
    let mut one_minus = block.clone();
    for (r, row) in one_minus.iter_mut().enumerate() {
        for (c, entry) in row.iter_mut().enumerate() {
            let diag = if r == c { T::one() } else { T::zero() };
            *entry = diag - entry.clone();
        }
    }
    let resolvent = solve_dense(one_minus, block)
        .ok_or(CoreError::SingularMatrix)?;
    Ok(resolvent[0][0].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{raw_params_p0, raw_params_p1, Params, RawParams};
    use crate::orthopoly::build_ops;
    use crate::scalar::{rat, rat_int, Ring};
    use num::BigRational;

    fn setup(
        raw: &RawParams,
    ) -> (NodeGrid<BigRational>, OPSystem<BigRational>, usize) {
        let grid = Params::<BigRational>::new(raw).unwrap().grid();
        let ops = build_ops(&grid).unwrap();
        (grid, ops, raw.big_n)
    }

    #[test]
    fn enumeration_full_interval_is_one() {
        for raw in [raw_params_p0(), raw_params_p1()] {
            let (grid, _, big_n) = setup(&raw);
            let d = gap_enumerate(&grid, big_n, grid.len()).unwrap();
            assert_eq!(d, rat_int(1));
        }
    }

    #[test]
    fn enumeration_packed_configuration() {
        // At s = N only the packed configuration (0, .., N-1) contributes.
        let (grid, _, big_n) = setup(&raw_params_p0());
        let d = gap_enumerate(&grid, big_n, big_n).unwrap();
        let single = config_mass(&grid, &[0, 1])
            / mass_sum(&grid, big_n, grid.len());
        assert_eq!(d, single);
    }

    #[test]
    fn enumeration_p0_s3_frozen() {
        // Frozen reference value, cross-checked against an independent
        // implementation of the same sum.
        let (grid, _, big_n) = setup(&raw_params_p0());
        let d = gap_enumerate(&grid, big_n, 3).unwrap();
        assert_eq!(d, rat(1_506_277, 1_511_653));
    }

    #[test]
    fn fredholm_matches_enumeration_everywhere() {
        for raw in [raw_params_p0(), raw_params_p1()] {
            let (grid, ops, big_n) = setup(&raw);
            for s in big_n..=grid.len() {
                let by_enum = gap_enumerate(&grid, big_n, s).unwrap();
                let by_det = gap_fredholm(&ops, &grid, big_n, s).unwrap();
                assert_eq!(by_enum, by_det, "s = {s}");
            }
        }
    }

    #[test]
    fn last_node_ratio_is_scalar_determinant() {
        // With s = M the complement is one node, so the Fredholm determinant
        // collapses to 1 - Kt(M, M) and must equal D_{M+1}/D_M.
        let (grid, ops, big_n) = setup(&raw_params_p0());
        let top = grid.len() - 1;
        let scalar = rat_int(1)
            - crate::orthopoly::cd_kernel(&ops, &grid, big_n, top, top)
                .unwrap();
        let ratio = gap_enumerate(&grid, big_n, top + 1).unwrap()
            / gap_enumerate(&grid, big_n, top).unwrap();
        assert_eq!(scalar, rat_int(1) / ratio);
    }

    #[test]
    fn seeds_match_enumeration() {
        for raw in [raw_params_p0(), raw_params_p1()] {
            let (grid, ops, big_n) = setup(&raw);
            let (d_n, d_n1) = seed_values(&ops, &grid, big_n);
            assert!(!d_n.is_zero());
            assert_eq!(d_n, gap_enumerate(&grid, big_n, big_n).unwrap());
            assert_eq!(
                d_n1,
                gap_enumerate(&grid, big_n, big_n + 1).unwrap()
            );
        }
    }

    #[test]
    fn gap_table_monotone_in_unit_interval() {
        for raw in [raw_params_p0(), raw_params_p1()] {
            let (grid, _, big_n) = setup(&raw);
            let values: Vec<BigRational> = (big_n..=grid.len())
                .map(|s| gap_enumerate(&grid, big_n, s).unwrap())
                .collect();
            let table = GapTable {
                start: big_n,
                values,
                method: "enumerate",
            };
            assert_eq!(table.end(), grid.len());
            assert_eq!(*table.value(grid.len()), rat_int(1));
            for w in table.values.windows(2) {
                assert!(w[0] <= w[1], "D_s not monotone");
            }
            for v in &table.values {
                assert!(*v > rat_int(0) && *v <= rat_int(1));
            }
        }
    }

    #[test]
    fn resolvent_identity_all_s() {
        let (grid, ops, big_n) = setup(&raw_params_p0());
        for s in big_n..grid.len() {
            let r = resolvent_diag(&ops, &grid, big_n, s).unwrap();
            let lhs = rat_int(1) + r.clone();
            let rhs = gap_enumerate(&grid, big_n, s + 1).unwrap()
                / gap_enumerate(&grid, big_n, s).unwrap();
            assert_eq!(lhs, rhs, "s = {s}");
            assert!(r > rat_int(-1));
        }
    }

    #[test]
    fn enumeration_guard_rejects_large_spaces() {
        let grid = NodeGrid {
            nodes: (1..=40).map(rat_int).collect(),
            weights: vec![rat_int(1); 40],
        };
        assert!(matches!(
            gap_enumerate(&grid, 20, 40),
            Err(CoreError::TooLarge(_))
        ));
    }

    #[test]
    fn determinant_and_solver_basics() {
        let m = vec![
            vec![rat_int(2), rat_int(1)],
            vec![rat_int(1), rat_int(3)],
        ];
        assert_eq!(det_dense(m.clone()), rat_int(5));
        assert_eq!(det_dense(Vec::<Vec<BigRational>>::new()), rat_int(1));
        let sol = solve_dense(m, vec![vec![rat_int(5)], vec![rat_int(10)]])
            .unwrap();
        assert_eq!(sol[0][0], rat_int(1));
        assert_eq!(sol[1][0], rat_int(3));
        let singular = vec![
            vec![rat_int(1), rat_int(2)],
            vec![rat_int(2), rat_int(4)],
        ];
        assert_eq!(det_dense(singular.clone()), rat_int(0));
        assert!(solve_dense(singular, vec![vec![rat_int(1)], vec![rat_int(1)]])
            .is_none());
    }
}
