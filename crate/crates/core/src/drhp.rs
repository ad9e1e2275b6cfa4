//! Discrete Riemann-Hilbert recursion for gap probabilities.
//!
//! The 2x2 solution matrix at stage `s` has an entire first column, a
//! monic degree `N` polynomial over a degree `< N` companion, while the
//! second column is the weighted Cauchy sum of the first over the `s`
//! consumed nodes. Advancing a stage multiplies by an elementary factor
//! `I + T_s / (z - pi_s)` with nilpotent `T_s`, and the gap determinant
//! ratio `D_{s+1} / D_s` comes out of the same linear solve in closed
//! form. Cumulating ratios from the seed `D_N` yields the full gap table
//! without any determinant evaluation.

use crate::ensemble::NodeGrid;
use crate::error::{CoreError, Result};
use crate::mat2::Mat2;
use crate::oracle::{rho_value, seed_values};
use crate::orthopoly::OPSystem;
use crate::poly::Poly;
use crate::scalar::Scalar;

/// Stage `s` of the residue-condition matrix recursion.
///
/// Only the entire first column is stored. The second column is
/// determined by it: its residue at a consumed node `pi_x` is the weight
/// `w(x)` times the first column there, and the decay conditions at
/// infinity then pin it down as the Cauchy sum over `x < s`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhpState<T: Scalar> {
    /// Number of consumed nodes; the matrix has poles among `pi_0 ..
    /// pi_{s-1}` only.
    pub s: usize,
    /// Ensemble size, fixed along the recursion.
    pub big_n: usize,
    /// Top left entry, a monic polynomial of degree `N`.
    pub p11: Poly<T>,
    /// Bottom left entry, a polynomial of degree at most `N - 1`.
    pub p21: Poly<T>,
}

impl<T: Scalar> RhpState<T> {
    /// Initial stage `s = N`.
    ///
    /// The first column vanishes on the packed nodes: the top entry is
    /// `prod_{m<N} (z - pi_m)` and the bottom entry is `sum_x rho_x
    /// prod_{m != x} (z - pi_m)` with the auxiliary weights `rho_x`.
    pub fn initial(grid: &NodeGrid<T>, big_n: usize) -> Self {
        assert!(
            big_n >= 1 && big_n < grid.len(),
            "ensemble size outside 1 ..= M"
        );
        let packed = &grid.nodes[..big_n];
        let p11 = Poly::from_roots(packed);
        let mut p21 = Poly::zero();
        for (x, node) in packed.iter().enumerate() {
            let factor = p11.div_exact(&Poly::linear(node));
            p21 = p21 + factor.scale(&rho_value(grid, big_n, x));
        }
        RhpState { s: big_n, big_n, p11, p21 }
    }

    /// Residue vectors `(r12, r22)` of the second column at the consumed
    /// nodes `pi_0 .. pi_{s-1}`.
    pub fn residues(&self, grid: &NodeGrid<T>) -> (Vec<T>, Vec<T>) {
        let mut r12 = Vec::with_capacity(self.s);
        let mut r22 = Vec::with_capacity(self.s);
        for x in 0..self.s {
            let w = &grid.weights[x];
            let node = &grid.nodes[x];
            r12.push(w.clone() * self.p11.eval(node));
            r22.push(w.clone() * self.p21.eval(node));
        }
        (r12, r22)
    }

    /// Evaluate the full matrix at a point away from the consumed nodes.
    pub fn eval(&self, grid: &NodeGrid<T>, z: &T) -> Result<Mat2<T>> {
        let (r12, r22) = self.residues(grid);
        let mut m12 = T::zero();
        let mut m22 = T::zero();
        for x in 0..self.s {
            let diff = z.clone() - grid.nodes[x].clone();
            let inv = diff.checked_inv().ok_or(CoreError::DivisionByZero)?;
            m12 = m12 + r12[x].clone() * inv.clone();
            m22 = m22 + r22[x].clone() * inv;
        }
        Ok(Mat2::new(self.p11.eval(z), m12, self.p21.eval(z), m22))
    }

    /// Transition matrix `T_s` together with the gap ratio
    /// `D_{s+1} / D_s`.
    ///
    /// Writing `v = (v1, v2)` for the first column at `pi_s` and
    /// `(d1, d2)` for its derivative, the residue and regularity
    /// conditions at `pi_s` force the rank one, traceless form
    ///
    /// ```text
    /// T_s = -(w(s) / h) * [[v1 v2, -v1^2], [v2^2, -v1 v2]],
    /// h = 1 + w(s) * (v2 d1 - v1 d2),
    /// ```
    ///
    /// and `h` itself is the ratio `D_{s+1} / D_s`.
    pub fn transition(&self, grid: &NodeGrid<T>) -> Result<(Mat2<T>, T)> {
        assert!(self.s < grid.len(), "no node left to consume");
        let z = &grid.nodes[self.s];
        let w = &grid.weights[self.s];
        let v1 = self.p11.eval(z);
        let v2 = self.p21.eval(z);
        let d1 = self.p11.derivative().eval(z);
        let d2 = self.p21.derivative().eval(z);
        let h = T::one()
            + w.clone() * (v2.clone() * d1 - v1.clone() * d2);
        let scale = (T::zero() - w.clone())
            * h.checked_inv().ok_or(CoreError::SingularMatrix)?;
        let t = Mat2::new(
            v1.clone() * v2.clone(),
            T::zero() - v1.clone() * v1.clone(),
            v2.clone() * v2.clone(),
            T::zero() - v1 * v2,
        )
        .scale(&scale);
        Ok((t, h))
    }

    /// Consume node `pi_s`, returning the next stage and the ratio
    /// `D_{s+1} / D_s`.
    ///
    /// The new first column is `col + T_s col / (z - pi_s)`; the numerator
    /// vanishes at `pi_s` by construction, so the division is exact and
    /// the degrees are preserved.
    pub fn step(&self, grid: &NodeGrid<T>) -> Result<(Self, T)> {
        let (t, ratio) = self.transition(grid)?;
        let divisor = Poly::linear(&grid.nodes[self.s]);
        let q1 = self.p11.clone().scale(&t.e11)
            + self.p21.clone().scale(&t.e12);
        let q2 = self.p11.clone().scale(&t.e21)
            + self.p21.clone().scale(&t.e22);
        let next = RhpState {
            s: self.s + 1,
            big_n: self.big_n,
            p11: self.p11.clone() + q1.div_exact(&divisor),
            p21: self.p21.clone() + q2.div_exact(&divisor),
        };
        Ok((next, ratio))
    }
}

/// Gap probabilities `D_N ..= D_{M+1}` via the matrix recursion.
///
/// The seed `D_N` comes from the packed configuration mass over the
/// partition function; every later value multiplies on one transition
/// ratio. The squared norms are only used for the partition function.
pub fn gap_table_rhp<T: Scalar>(
    ops: &OPSystem<T>,
    grid: &NodeGrid<T>,
    big_n: usize,
) -> Result<Vec<T>> {
    let (d_n, _) = seed_values(ops, grid, big_n);
    let mut state = RhpState::initial(grid, big_n);
    let mut values = vec![d_n];
    while state.s < grid.len() {
        let (next, ratio) = state.step(grid)?;
        let last = values.last().expect("nonempty").clone();
        values.push(last * ratio);
        state = next;
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{raw_params_p0, raw_params_p1, Params, RawParams};
    use crate::oracle::gap_enumerate;
    use crate::orthopoly::build_ops;
    use crate::scalar::{rat, rat_int, QuadExt, Ring};
    use num::BigRational;

    fn setup(raw: &RawParams) -> (NodeGrid<BigRational>, usize) {
        let grid = Params::<BigRational>::new(raw).unwrap().grid();
        (grid, raw.big_n)
    }

    #[test]
    fn initial_state_moment_conditions() {
        let (grid, big_n) = setup(&raw_params_p0());
        let state = RhpState::initial(&grid, big_n);
        assert_eq!(state.p11.degree(), Some(big_n));
        assert_eq!(state.p11.leading(), Some(&rat_int(1)));
        assert!(state.p21.degree().unwrap_or(0) < big_n);
        let (r12, r22) = state.residues(&grid);
        for k in 0..big_n {
            let mut s12 = rat_int(0);
            let mut s22 = rat_int(0);
            for x in 0..state.s {
                let pk = grid.nodes[x].clone().pow_i(k as i64);
                s12 += &r12[x] * &pk;
                s22 += &r22[x] * &pk;
            }
            assert_eq!(s12, rat_int(0));
            let expect = if k == big_n - 1 { 1 } else { 0 };
            assert_eq!(s22, rat_int(expect));
        }
    }

    #[test]
    fn determinant_is_one_along_the_recursion() {
        let (grid, big_n) = setup(&raw_params_p0());
        let probes = [rat(7, 3), rat(-5, 2), rat(101, 17)];
        let mut state = RhpState::initial(&grid, big_n);
        loop {
            for z in &probes {
                let m = state.eval(&grid, z).unwrap();
                assert_eq!(m.det(), rat_int(1));
            }
            if state.s == grid.len() {
                break;
            }
            state = state.step(&grid).unwrap().0;
        }
    }

    #[test]
    fn stages_are_orthogonal_polynomials_on_consumed_nodes() {
        for raw in [raw_params_p0(), raw_params_p1()] {
            let (grid, big_n) = setup(&raw);
            let mut state = RhpState::initial(&grid, big_n);
            while state.s < grid.len() {
                state = state.step(&grid).unwrap().0;
                let sub = NodeGrid {
                    nodes: grid.nodes[..state.s].to_vec(),
                    weights: grid.weights[..state.s].to_vec(),
                };
                let sub_ops = build_ops(&sub).unwrap();
                assert_eq!(&state.p11, sub_ops.poly(big_n));
                let lead = sub_ops.norm(big_n - 1).checked_inv().unwrap();
                let expect = sub_ops.poly(big_n - 1).clone().scale(&lead);
                assert_eq!(state.p21, expect);
            }
        }
    }

    #[test]
    fn transition_is_nilpotent_and_factors_the_step() {
        let (grid, big_n) = setup(&raw_params_p0());
        let z0 = rat(13, 5);
        let mut state = RhpState::initial(&grid, big_n);
        while state.s < grid.len() {
            let (t, _) = state.transition(&grid).unwrap();
            assert_eq!(t.trace(), rat_int(0));
            assert_eq!(t.det(), rat_int(0));
            assert_eq!(t.clone() * t.clone(), Mat2::zero());

            let (next, _) = state.step(&grid).unwrap();
            let gap = z0.clone() - grid.nodes[state.s].clone();
            let factor = Mat2::identity() + t.scale(&(rat_int(1) / gap));
            let lhs = next.eval(&grid, &z0).unwrap();
            let rhs = factor * state.eval(&grid, &z0).unwrap();
            assert_eq!(lhs, rhs);
            state = next;
        }
    }

    #[test]
    fn ratio_products_match_enumeration() {
        for raw in [raw_params_p0(), raw_params_p1()] {
            let (grid, big_n) = setup(&raw);
            let ops = build_ops(&grid).unwrap();
            let table = gap_table_rhp(&ops, &grid, big_n).unwrap();
            assert_eq!(table.len(), grid.len() - big_n + 1);
            for (offset, value) in table.iter().enumerate() {
                let reference =
                    gap_enumerate(&grid, big_n, big_n + offset).unwrap();
                assert_eq!(value, &reference);
            }
            assert_eq!(table.last(), Some(&rat_int(1)));
        }
    }

    #[test]
    fn quadratic_extension_backend_agrees() {
        let raw = raw_params_p0();
        let (grid, big_n) = setup(&raw);
        let ops = build_ops(&grid).unwrap();
        let table = gap_table_rhp(&ops, &grid, big_n).unwrap();

        let lift = NodeGrid {
            nodes: grid
                .nodes
                .iter()
                .cloned()
                .map(QuadExt::from_base)
                .collect(),
            weights: grid
                .weights
                .iter()
                .cloned()
                .map(QuadExt::from_base)
                .collect(),
        };
        let lift_ops = build_ops(&lift).unwrap();
        let lifted = gap_table_rhp(&lift_ops, &lift, big_n).unwrap();
        for (plain, ext) in table.iter().zip(&lifted) {
            assert_eq!(ext.base_part(), plain);
            assert!(ext.ext_part().is_zero());
        }
    }
}
