//! Connection matrices of the nodal difference system and their
//! isomonodromic recursion.
//!
//! The connection matrix at stage `s` compares the solution matrix along
//! the two branches of the node map. Cleared of its six simple poles it
//! becomes a polynomial matrix of degree six with a rigid coefficient
//! structure, and consuming a node conjugates it by an elementary
//! dressing factor. Tracking a vector triple through that conjugation
//! reproduces every gap determinant ratio without ever touching the
//! solution matrix again, which is what makes the recursion a practical
//! algorithm.

use crate::drhp::RhpState;
use crate::ensemble::{NodeGrid, Params};
use crate::error::{CoreError, Result};
use crate::mat2::{det2, Mat2, Vec2};
use crate::oracle::{rho_value, seed_values};
use crate::orthopoly::OPSystem;
use crate::poly::{Poly, RatFunc};
use crate::scalar::Scalar;

/// Stage `s` connection matrix `A(z) = B(z) / P(z)`.
///
/// `B` is a polynomial matrix of degree at most six. `P` and `Q` are the
/// degree six denominators of `A` and of `A^{-1} = adj B / Q`; both are
/// stored through their roots, and `det B = P * Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionMatrix<T: Scalar> {
    /// Stage index; the moving roots sit at `q^{-s+1}` and `u^2 q^{s-1}`.
    pub s: i64,
    /// Cleared polynomial matrix.
    pub b: Mat2<Poly<T>>,
    /// Roots of the denominator of `A`.
    pub p_roots: [T; 6],
    /// Roots of the denominator of `A^{-1}`.
    pub q_roots: [T; 6],
    /// Leading coefficient of that denominator.
    pub q_scale: T,
}

/// Denominator data `(p_roots, q_roots, q_scale)` at stage `s`.
fn stage_roots<T: Scalar>(params: &Params<T>, s: i64) -> ([T; 6], [T; 6], T) {
    let z = params.z_params(s);
    let u2 = &params.u2;
    let flip = |i: usize| u2.clone() / z[i].clone();
    let p_roots = [
        z[0].clone(),
        flip(1),
        z[2].clone(),
        flip(3),
        z[4].clone(),
        flip(5),
    ];
    let q_roots = [
        flip(0),
        z[1].clone(),
        flip(2),
        z[3].clone(),
        flip(4),
        z[5].clone(),
    ];
    let q_scale = z[0].clone() * z[2].clone() * z[4].clone()
        / (z[1].clone() * z[3].clone() * z[5].clone());
    (p_roots, q_roots, q_scale)
}

impl<T: Scalar> ConnectionMatrix<T> {
    /// Denominator of `A`.
    pub fn p_poly(&self) -> Poly<T> {
        Poly::from_roots(&self.p_roots)
    }

    /// Denominator of `A^{-1}`, including the leading coefficient.
    pub fn q_poly(&self) -> Poly<T> {
        Poly::from_roots(&self.q_roots).scale(&self.q_scale)
    }

    /// Evaluate `A(z)` away from its poles.
    pub fn eval(&self, z: &T) -> Result<Mat2<T>> {
        let p = self.p_poly().eval(z);
        let inv = p.checked_inv().ok_or(CoreError::DivisionByZero)?;
        Ok(self.b.map_into(|e| e.eval(z) * inv.clone()))
    }

    /// Evaluate `A^{-1}(z)` away from its poles.
    pub fn eval_inverse(&self, z: &T) -> Result<Mat2<T>> {
        let q = self.q_poly().eval(z);
        let inv = q.checked_inv().ok_or(CoreError::DivisionByZero)?;
        Ok(self.b.adjugate().map_into(|e| e.eval(z) * inv.clone()))
    }

    /// Residue of `A` at the simple pole `p_roots[idx]`.
    pub fn residue(&self, idx: usize) -> Result<Mat2<T>> {
        let z0 = &self.p_roots[idx];
        let mut denom = T::one();
        for (j, r) in self.p_roots.iter().enumerate() {
            if j != idx {
                denom = denom * (z0.clone() - r.clone());
            }
        }
        let inv = denom.checked_inv().ok_or(CoreError::HigherOrderPole)?;
        Ok(self.b.map_into(|e| e.eval(z0) * inv.clone()))
    }

    /// Residue of `A^{-1}` at the simple pole `q_roots[idx]`.
    pub fn inverse_residue(&self, idx: usize) -> Result<Mat2<T>> {
        let z0 = &self.q_roots[idx];
        let mut denom = self.q_scale.clone();
        for (j, r) in self.q_roots.iter().enumerate() {
            if j != idx {
                denom = denom * (z0.clone() - r.clone());
            }
        }
        let inv = denom.checked_inv().ok_or(CoreError::HigherOrderPole)?;
        Ok(self.b.adjugate().map_into(|e| e.eval(z0) * inv.clone()))
    }

    /// Constant Laurent coefficient of `A^{-1}` at a simple pole.
    pub fn inverse_regular(&self, z0: &T) -> Result<Mat2<T>> {
        let q = self.q_poly();
        let adj = self.b.adjugate();
        let reg = |num: &Poly<T>| -> Result<T> {
            let f = RatFunc::new(num.clone(), q.clone())?;
            Ok(f.laurent_expand(z0, 0)?.remove(1))
        };
        Ok(Mat2::new(
            reg(&adj.e11)?,
            reg(&adj.e12)?,
            reg(&adj.e21)?,
            reg(&adj.e22)?,
        ))
    }

    /// Coefficients `(k0, k1)` of the lower left entry
    /// `z (z^2 - u^2)(k0 z^2 + k1 z + k0 u^2)`.
    pub fn lower_quadratic(&self, params: &Params<T>) -> (T, T) {
        quadratic_cofactor(&self.b.e21, &params.u2)
    }

    /// Coefficients `(m0, m1)` of the upper right entry
    /// `z (z^2 - u^2)(m0 z^2 + m1 z + m0 u^2)`.
    pub fn upper_quadratic(&self, params: &Params<T>) -> (T, T) {
        quadratic_cofactor(&self.b.e12, &params.u2)
    }

    /// Diagonalized values `(d1, d2)` of `A` at infinity in the node
    /// coordinate, constants of motion of the stage recursion.
    pub fn moduli(&self, params: &Params<T>) -> (T, T) {
        let u6 = params.u2.pow_i(3);
        let d1 = self.b.e11.coeff(6);
        let d2 = self.b.e11.coeff(0) / (u6 * params.q.clone());
        (d1, d2)
    }
}

/// Extract `(c0, c1)` from `z (z^2 - u^2)(c0 z^2 + c1 z + c0 u^2)`.
fn quadratic_cofactor<T: Scalar>(entry: &Poly<T>, u2: &T) -> (T, T) {
    if entry.is_zero() {
        return (T::zero(), T::zero());
    }
    let cubic = Poly::from_coeffs(vec![
        T::zero(),
        T::zero() - u2.clone(),
        T::zero(),
        T::one(),
    ]);
    let quad = entry.div_exact(&cubic);
    (quad.coeff(2), quad.coeff(1))
}

/// Interpolate a polynomial matrix through pointwise samples, verifying
/// the expected degree bound on spare sample points.
fn interpolate_matrix<T: Scalar>(
    samples: &[(T, Mat2<T>)],
    max_deg: usize,
) -> Result<Mat2<Poly<T>>> {
    assert!(samples.len() > max_deg + 2, "not enough matrix samples");
    let fit = |pick: &dyn Fn(&Mat2<T>) -> T| -> Result<Poly<T>> {
        let points: Vec<(T, T)> = samples[..=max_deg]
            .iter()
            .map(|(z, m)| (z.clone(), pick(m)))
            .collect();
        let poly = Poly::interpolate(&points);
        if poly.degree().unwrap_or(0) > max_deg {
            return Err(CoreError::NotPolynomial(format!(
                "interpolant degree exceeds {max_deg}"
            )));
        }
        for (z, m) in &samples[max_deg + 1..] {
            if poly.eval(z) != pick(m) {
                return Err(CoreError::NotPolynomial(
                    "spare sample point mismatch".into(),
                ));
            }
        }
        Ok(poly)
    };
    Ok(Mat2::new(
        fit(&|m: &Mat2<T>| m.e11.clone())?,
        fit(&|m: &Mat2<T>| m.e12.clone())?,
        fit(&|m: &Mat2<T>| m.e21.clone())?,
        fit(&|m: &Mat2<T>| m.e22.clone())?,
    ))
}

/// Sample abscissae for matrix interpolation. Negative values stay away
/// from every pole of the recursion, whose singular points are all
/// positive under the standing parameter assumptions.
fn sample_points<T: Scalar>(count: usize) -> Vec<T> {
    (1..=count as i64).map(|k| T::from_i64(-k)).collect()
}

/// Build the stage `s` connection matrix from the solution state by
/// pointwise evaluation and exact interpolation.
pub fn build_connection<T: Scalar>(
    state: &RhpState<T>,
    grid: &NodeGrid<T>,
    params: &Params<T>,
) -> Result<ConnectionMatrix<T>> {
    let s = state.s as i64;
    let (p_roots, q_roots, q_scale) = stage_roots(params, s);
    let p_poly = Poly::from_roots(&p_roots);
    let mut samples = Vec::new();
    for z in sample_points::<T>(10) {
        let shifted = z.clone() / params.q.clone();
        let m1 = state.eval(grid, &params.sigma(&shifted)?)?;
        let m0 = state.eval(grid, &params.sigma(&z)?)?;
        let d = params.phi_plus(&z)
            * params
                .phi_minus(&z)
                .checked_inv()
                .ok_or(CoreError::DivisionByZero)?;
        let a = m1 * Mat2::diag(d, T::one()) * m0.adjugate();
        samples.push((z.clone(), a.scale(&p_poly.eval(&z))));
    }
    let b = interpolate_matrix(&samples, 6)?;
    Ok(ConnectionMatrix { s, b, p_roots, q_roots, q_scale })
}

/// Closed form of the initial connection matrix at stage `N`.
///
/// The diagonal factorizes over shifted denominator roots, the upper
/// right entry vanishes, and the lower left quadratic has coefficients
/// given by sums over the auxiliary weights `rho_x`.
pub fn initial_connection<T: Scalar>(
    grid: &NodeGrid<T>,
    params: &Params<T>,
) -> ConnectionMatrix<T> {
    let big_n = params.big_n;
    let s = big_n as i64;
    let (p_roots, q_roots, q_scale) = stage_roots(params, s);
    let z = params.z_params(s);
    let u2 = &params.u2;
    let flip = |i: usize| u2.clone() / z[i].clone();
    let q = &params.q;

    let b11_roots = [flip(0), flip(1), z[2].clone(), z[3].clone(), flip(4), z[5].clone()];
    let b22_roots = [z[0].clone(), z[1].clone(), flip(2), flip(3), z[4].clone(), flip(5)];
    let ab = z[3].clone() * z[5].clone() / (z[2].clone() * z[4].clone());
    let c11 = q.pow_i(-s) * ab.clone().inv();
    let b11 = Poly::from_roots(&b11_roots).scale(&c11);
    let b22 = Poly::from_roots(&b22_roots).scale(&q.pow_i(s));

    let fall = q.pow_i(-s) / ab;
    let rise = q.pow_i(s - 1);
    let sum_fall = b11_roots
        .iter()
        .fold(T::zero(), |acc, r| acc + r.clone());
    let sum_rise = b22_roots
        .iter()
        .fold(T::zero(), |acc, r| acc + r.clone());
    let mut k0 = T::zero();
    let mut k1 = T::zero();
    for x in 0..big_n {
        let rho = q.clone() * rho_value(grid, big_n, x);
        let pi = &grid.nodes[x];
        k0 = k0 + rho.clone() * (fall.clone() - rise.clone());
        k1 = k1
            + rho.clone()
                * (fall.clone() * (q.clone() * pi.clone() - sum_fall.clone()))
            - rho * rise.clone() * (pi.clone() - sum_rise.clone());
    }
    let cubic = Poly::from_coeffs(vec![
        T::zero(),
        T::zero() - u2.clone(),
        T::zero(),
        T::one(),
    ]);
    let quad =
        Poly::from_coeffs(vec![k0.clone() * u2.clone(), k1, k0]);
    let b21 = cubic * quad;

    let b = Mat2::new(b11, Poly::zero(), b21, b22);
    ConnectionMatrix { s, b, p_roots, q_roots, q_scale }
}

/// Scalar factor `y / ((y - q^{-s})(y - u^2 q^{s-1}))` of the stage `s`
/// dressing matrix.
fn dressing_scalar<T: Scalar>(params: &Params<T>, s: i64, y: &T) -> Result<T> {
    let a = params.q.pow_i(-s);
    let b = params.u2.clone() * params.q.pow_i(s - 1);
    let den = (y.clone() - a) * (y.clone() - b);
    let inv = den.checked_inv().ok_or(CoreError::DivisionByZero)?;
    Ok(y.clone() * inv)
}

/// Dressing matrix `R_s(y) = I + T_s y / ((y - q^{-s})(y - u^2 q^{s-1}))`.
pub fn dressing<T: Scalar>(
    t: &Mat2<T>,
    params: &Params<T>,
    s: i64,
    y: &T,
) -> Result<Mat2<T>> {
    Ok(Mat2::identity() + t.scale(&dressing_scalar(params, s, y)?))
}

/// Inverse dressing matrix; `T_s` is nilpotent, so the inverse just
/// flips the sign of the pole part.
pub fn dressing_inv<T: Scalar>(
    t: &Mat2<T>,
    params: &Params<T>,
    s: i64,
    y: &T,
) -> Result<Mat2<T>> {
    Ok(Mat2::identity() - t.scale(&dressing_scalar(params, s, y)?))
}

/// Vector triple `(v, v1, v2)` encoding the stage transition.
///
/// `v` spans the image of the residue of `A` at the moving pole, `v1`
/// spans the row space of the residue of `A^{-1}` there, and `v2` solves
/// `T v2 = v`; it is pinned against the kernel ambiguity by `v . v2 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Triple<T: Scalar> {
    pub v: Vec2<T>,
    pub v1: Vec2<T>,
    pub v2: Vec2<T>,
}

impl<T: Scalar> Triple<T> {
    /// Transition matrix `T_s = v v1^t / (v1 . v2)`.
    pub fn transition(&self) -> Result<Mat2<T>> {
        let denom = self.v1.dot(&self.v2);
        let inv = denom.checked_inv().ok_or(CoreError::SingularMatrix)?;
        Ok(self.v.outer(&self.v1).scale(&inv))
    }
}

/// Solve for `v2` from the defining limit condition at the moving pole
/// of `A^{-1}`: the residue applied to `v2` matches the regular part
/// applied to `v`, rescaled by `c = (q^{-s} - u^2 q^{s-1}) / q^{-s+1}`.
pub fn solve_v2<T: Scalar>(
    conn: &ConnectionMatrix<T>,
    params: &Params<T>,
    v: &Vec2<T>,
) -> Result<Vec2<T>> {
    let s = conn.s;
    let z0 = &conn.q_roots[1];
    let res = conn.inverse_residue(1)?;
    let reg = conn.inverse_regular(z0)?;
    let kernel = res.apply(v);
    if !kernel.is_zero() {
        return Err(CoreError::SingularMatrix);
    }
    let c = (params.q.pow_i(-s)
        - params.u2.clone() * params.q.pow_i(s - 1))
        / params.q.pow_i(-s + 1);
    let rhs = reg.apply(v).scale(&c.inv());

    // Two proportional residue rows plus the pin row v . v2 = 0 leave a
    // single nonsingular 2x2 system; the spare row is checked after.
    let rows = [
        (res.e11.clone(), res.e12.clone(), rhs.x.clone()),
        (res.e21.clone(), res.e22.clone(), rhs.y.clone()),
    ];
    let lead = rows
        .iter()
        .find(|(a, b, _)| !a.is_zero() || !b.is_zero())
        .ok_or(CoreError::SingularMatrix)?;
    let det = lead.0.clone() * v.y.clone() - lead.1.clone() * v.x.clone();
    let det_inv = det.checked_inv().ok_or(CoreError::SingularMatrix)?;
    let v2 = Vec2::new(
        lead.2.clone() * v.y.clone() * det_inv.clone(),
        T::zero() - lead.2.clone() * v.x.clone() * det_inv,
    );
    for (a, b, r) in &rows {
        let got = a.clone() * v2.x.clone() + b.clone() * v2.y.clone();
        if got != *r {
            return Err(CoreError::SingularMatrix);
        }
    }
    Ok(v2)
}

/// Extract the stage triple from the solution state, normalizing `v` to
/// the first column of the solution matrix at the next node.
pub fn triple_from_state<T: Scalar>(
    state: &RhpState<T>,
    conn: &ConnectionMatrix<T>,
    grid: &NodeGrid<T>,
    params: &Params<T>,
) -> Result<Triple<T>> {
    assert_eq!(state.s as i64, conn.s, "state and connection stages differ");
    let node = &grid.nodes[state.s];
    let v = Vec2::new(state.p11.eval(node), state.p21.eval(node));
    let res_inv = conn.inverse_residue(1)?;
    let v1 = if !res_inv.e11.is_zero() || !res_inv.e12.is_zero() {
        Vec2::new(res_inv.e11.clone(), res_inv.e12.clone())
    } else {
        Vec2::new(res_inv.e21.clone(), res_inv.e22.clone())
    };
    if v1.is_zero() {
        return Err(CoreError::SingularMatrix);
    }
    let v2 = solve_v2(conn, params, &v)?;
    Ok(Triple { v, v1, v2 })
}

/// Advance the connection matrix one stage by dressing conjugation,
/// `A(z) -> R(z/q) A(z) R^{-1}(z)`, using pointwise samples and exact
/// interpolation of the cleared matrix.
pub fn advance_connection<T: Scalar>(
    conn: &ConnectionMatrix<T>,
    t: &Mat2<T>,
    params: &Params<T>,
) -> Result<ConnectionMatrix<T>> {
    let s = conn.s;
    let (p_roots, q_roots, q_scale) = stage_roots(params, s + 1);
    let p_next = Poly::from_roots(&p_roots);
    let mut samples = Vec::new();
    for z in sample_points::<T>(10) {
        let shifted = z.clone() / params.q.clone();
        let left = dressing(t, params, s, &shifted)?;
        let right = dressing_inv(t, params, s, &z)?;
        let a = left * conn.eval(&z)? * right;
        samples.push((z.clone(), a.scale(&p_next.eval(&z))));
    }
    let b = interpolate_matrix(&samples, 6)?;
    Ok(ConnectionMatrix { s: s + 1, b, p_roots, q_roots, q_scale })
}

/// Advance the triple one stage.
///
/// The new `v` and `v1` are dressed images of the old ones; the new `v2`
/// solves the limit condition at the next moving pole, which reduces to
/// derivative data of `A^{-1}(z) R^{-1}(z/q)` at `q^{-s}`.
pub fn advance_triple<T: Scalar>(
    conn: &ConnectionMatrix<T>,
    triple: &Triple<T>,
    params: &Params<T>,
) -> Result<Triple<T>> {
    let s = conn.s;
    let t = triple.transition()?;
    let y0 = params.q.pow_i(-s);
    let y1 = params.q.pow_i(-s - 1);

    let a0 = conn.eval(&y0)?;
    let r1 = dressing(&t, params, s, &y1)?;
    let push = r1.clone() * a0;
    let v_hat = push.apply(&triple.v);

    let a0_inv = conn.eval_inverse(&y0)?;
    let r1_inv = dressing_inv(&t, params, s, &y1)?;
    let v1_hat = r1_inv.apply_left(&a0_inv.apply_left(&triple.v1));

    // Exact derivative of A^{-1}(z) R^{-1}(z/q) at z = q^{-s}: the first
    // factor entrywise as a rational function, the second through the
    // scalar z / ((z/q - q^{-s})(z/q - u^2 q^{s-1})) cleared to
    // q z / ((z - q^{-s+1})(z - u^2 q^s)).
    let q_poly = conn.q_poly();
    let adj = conn.b.adjugate();
    let dval = |num: &Poly<T>| -> Result<T> {
        let f = RatFunc::new(num.clone(), q_poly.clone())?;
        f.derivative().eval(&y0).ok_or(CoreError::DivisionByZero)
    };
    let a_inv_der = Mat2::new(
        dval(&adj.e11)?,
        dval(&adj.e12)?,
        dval(&adj.e21)?,
        dval(&adj.e22)?,
    );
    let psi = RatFunc::new(
        Poly::from_coeffs(vec![T::zero(), params.q.clone()]),
        Poly::from_roots(&[
            params.q.pow_i(-s + 1),
            params.u2.clone() * params.q.pow_i(s),
        ]),
    )?;
    let psi_der = psi
        .derivative()
        .eval(&y0)
        .ok_or(CoreError::DivisionByZero)?;
    let der = a_inv_der * r1_inv - (a0_inv * t).scale(&psi_der);

    let b_minus = params.u2.clone() * params.q.pow_i(s - 1);
    let b_plus = params.u2.clone() * params.q.pow_i(s + 1 - 1);
    let combo = der.apply(&v_hat).scale(&y0)
        + triple.v2.scale(&(y0.clone() - b_minus));
    let v2_hat = push
        .apply(&combo)
        .scale(&(y1 - b_plus).inv());

    Ok(Triple { v: v_hat, v1: v1_hat, v2: v2_hat })
}

/// Double ratio `D_{s+2} D_s / D_{s+1}^2` from the determinants of two
/// consecutive triples.
///
/// The value is invariant under rescaling `v` and under shifting `v2`
/// by multiples of `v`, which is why the recursion never needs to fix
/// those ambiguities.
pub fn gap_double_ratio<T: Scalar>(
    triple: &Triple<T>,
    hat: &Triple<T>,
    s: i64,
    grid: &NodeGrid<T>,
    params: &Params<T>,
) -> Result<T> {
    let y0 = params.q.pow_i(-s);
    let phi_ratio = params.phi_minus(&y0)
        * params
            .phi_plus(&y0)
            .checked_inv()
            .ok_or(CoreError::DivisionByZero)?;
    let det_ratio = det2(&hat.v, &hat.v2)
        * det2(&triple.v, &triple.v2)
            .checked_inv()
            .ok_or(CoreError::SingularMatrix)?;
    let su = s as usize;
    let weight_ratio =
        grid.weights[su + 1].clone() / grid.weights[su].clone();
    Ok(weight_ratio * phi_ratio.clone() * phi_ratio * det_ratio)
}

/// Run the double-ratio recursion from explicit seeds, returning
/// `D_N ..= D_{M+1}`.
pub fn chain_gap_values<T: Scalar>(
    mut conn: ConnectionMatrix<T>,
    mut triple: Triple<T>,
    seeds: (T, T),
    grid: &NodeGrid<T>,
    params: &Params<T>,
) -> Result<Vec<T>> {
    let total = grid.len() - params.big_n + 1;
    let mut values = vec![seeds.0, seeds.1];
    while values.len() < total {
        let hat = advance_triple(&conn, &triple, params)?;
        let double =
            gap_double_ratio(&triple, &hat, conn.s, grid, params)?;
        let last = values[values.len() - 1].clone();
        let prev = values[values.len() - 2].clone();
        values.push(double * last.clone() * last / prev);

        if values.len() < total {
            let t = triple.transition()?;
            conn = advance_connection(&conn, &t, params)?;
            triple = hat;
        }
    }
    Ok(values)
}

/// Gap probabilities `D_N ..= D_{M+1}` via the connection recursion,
/// seeded by the packed-configuration values.
pub fn gap_table_connection<T: Scalar>(
    ops: &OPSystem<T>,
    grid: &NodeGrid<T>,
    params: &Params<T>,
) -> Result<Vec<T>> {
    let big_n = params.big_n;
    assert!(grid.len() > big_n, "ensemble fills the whole node range");
    let seeds = seed_values(ops, grid, big_n);
    if grid.len() == big_n + 1 {
        return Ok(vec![seeds.0, seeds.1]);
    }
    let state = RhpState::initial(grid, big_n);
    let conn = initial_connection(grid, params);
    let triple = triple_from_state(&state, &conn, grid, params)?;
    chain_gap_values(conn, triple, seeds, grid, params)
}
