//! Spectral coordinates of connection matrices, their involution
//! invariants, the birational chart to the discrete Painleve `(f, g)`
//! plane, and the flow step in that chart.
//!
//! The lower left entry of a connection matrix carries a palindromic
//! quadratic whose roots `(t, u^2/t)` single out a spectral parameter;
//! the value of the matrix at that root gives a second coordinate `p`.
//! The pair is defined only up to the involution
//! `(t, p) -> (u^2/t, 1/p)`, so the symmetric combinations
//! `x = t + u^2/t` and `y = (pt - u)/(pu - t)` are the honest
//! coordinates, and they stay in the ground field even when `t` itself
//! needs a square root. A further birational change of variables moves
//! `(x, y)` into the standard chart in which the flow acts by a pair of
//! multiplicative linear-fractional steps, one in each coordinate.

use crate::connection::{
    advance_connection, advance_triple, gap_double_ratio,
    initial_connection, triple_from_state, ConnectionMatrix,
};
use crate::drhp::RhpState;
use crate::ensemble::{NodeGrid, Params};
use crate::error::{CoreError, Result};
use crate::mat2::Mat2;
use crate::oracle::seed_values;
use crate::orthopoly::OPSystem;
use crate::poly::Poly;
use crate::scalar::{sqrt_with_root_hint, QuadExt, Ring, Scalar};
use num::rational::BigRational;
use num::Signed;

/// Spectral pair `(t, p)` of a connection matrix.
///
/// `t` is one root of the palindromic quadratic cofactor of the lower
/// left entry and `p` the value of the `(1,1)` entry of `A` at `t`. The
/// partner root `u^2/t` carries the reciprocal value `1/p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPoint<T: Scalar> {
    pub t: T,
    pub p: T,
}

impl<T: Scalar> SpectralPoint<T> {
    /// The involution partner `(u^2/t, 1/p)`.
    pub fn involution(&self, u2: &T) -> Result<Self> {
        let t_inv = self.t.checked_inv().ok_or(CoreError::DivisionByZero)?;
        let p = self.p.checked_inv().ok_or(CoreError::DivisionByZero)?;
        Ok(Self { t: u2.clone() * t_inv, p })
    }
}

/// Involution-invariant coordinates `x = t + u^2/t`,
/// `y = (pt - u)/(pu - t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantPoint<T: Scalar> {
    pub x: T,
    pub y: T,
}

/// Parameter block of the `(f, g)` chart: eight base values, two kappa
/// values, and the multiplicative step.
#[derive(Debug, Clone, PartialEq)]
pub struct PainleveParams<T: Scalar> {
    pub nu: [T; 8],
    pub kappa1: T,
    pub kappa2: T,
    pub q: T,
}

/// Orientation of one flow step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepDirection {
    /// `kappa1 -> kappa1/q`, `kappa2 -> q kappa2`.
    Forward,
    /// `kappa1 -> q kappa1`, `kappa2 -> kappa2/q`.
    Inverse,
}

impl<T: Scalar> PainleveParams<T> {
    /// The step recovered from the block itself,
    /// `kappa1^2 kappa2^2 / (nu_1 ... nu_8)`.
    pub fn step_q(&self) -> T {
        let mut prod = T::one();
        for v in &self.nu {
            prod = prod * v.clone();
        }
        let kk = self.kappa1.clone() * self.kappa2.clone();
        kk.clone() * kk * prod.inv()
    }

    /// The eight base points: `(nu_i, 1/nu_i)` for the first four and
    /// `(kappa1/nu_i, nu_i/kappa2)` for the last four.
    pub fn base_points(&self) -> [(T, T); 8] {
        std::array::from_fn(|i| {
            if i < 4 {
                (self.nu[i].clone(), self.nu[i].inv())
            } else {
                (
                    self.kappa1.clone() / self.nu[i].clone(),
                    self.nu[i].clone() / self.kappa2.clone(),
                )
            }
        })
    }

    /// Parameter motion of one flow step; the base values and the step
    /// stay put.
    pub fn shifted(&self, direction: StepDirection) -> Self {
        let (kappa1, kappa2) = match direction {
            StepDirection::Forward => (
                self.kappa1.clone() / self.q.clone(),
                self.q.clone() * self.kappa2.clone(),
            ),
            StepDirection::Inverse => (
                self.q.clone() * self.kappa1.clone(),
                self.kappa2.clone() / self.q.clone(),
            ),
        };
        Self {
            nu: self.nu.clone(),
            kappa1,
            kappa2,
            q: self.q.clone(),
        }
    }
}

/// A point of the `(f, g)` chart together with its parameter block.
#[derive(Debug, Clone, PartialEq)]
pub struct PainlevePoint<T: Scalar> {
    pub f: T,
    pub g: T,
    pub params: PainleveParams<T>,
}

impl<T: Scalar> PainlevePoint<T> {
    /// Index of the base point the value sits on, if any.
    pub fn base_point_index(&self) -> Option<usize> {
        self.params
            .base_points()
            .iter()
            .position(|(f, g)| f == &self.f && g == &self.g)
    }
}

/// Lifts polynomial coefficients into the quadratic extension.
fn lift_poly<T: Scalar>(p: &Poly<T>) -> Poly<QuadExt<T>> {
    Poly::from_coeffs(
        p.coeffs().iter().cloned().map(QuadExt::from_base).collect(),
    )
}

/// One root of the quadratic `k0 z^2 + k1 z + k0 u^2`, taken in a
/// quadratic extension of the working field. Rational roots embed as
/// base elements; the partner root is `u^2 / t`.
fn spectral_root<T: Scalar>(
    conn: &ConnectionMatrix<T>,
    params: &Params<T>,
) -> Result<QuadExt<T>> {
    let (k0, k1) = conn.lower_quadratic(params);
    let k0_inv = k0.checked_inv().ok_or(CoreError::DegenerateQuadratic)?;
    let disc = k1.clone() * k1.clone()
        - T::from_i64(4) * k0.clone() * k0 * params.u2.clone();
    let sqrt_disc = if disc.is_zero() {
        QuadExt::from_base(T::zero())
    } else {
        let direct = match &params.u {
            Some(u) => sqrt_with_root_hint(&disc, u, &params.u2),
            None => disc.try_sqrt(),
        };
        match direct {
            Some(s) => QuadExt::from_base(s),
            None => QuadExt::generator(disc),
        }
    };
    let half = QuadExt::from_base(k0_inv / T::from_i64(2));
    Ok((sqrt_disc - QuadExt::from_base(k1)) * half)
}

/// Numerator and denominator of the matrix value `b11(t) / P(t)` after
/// cancelling a shared root at `t`.
///
/// When both polynomials vanish the shared factor is removed by
/// differentiating both until one survives, so the returned pair never
/// has both components zero. A zero denominator then means the value is
/// genuinely infinite.
fn matrix_value_parts<T: Scalar>(
    conn: &ConnectionMatrix<T>,
    t: &QuadExt<T>,
) -> (QuadExt<T>, QuadExt<T>) {
    let mut num_poly = lift_poly(&conn.b.e11);
    let mut den_poly = lift_poly(&conn.p_poly());
    loop {
        let num = num_poly.eval(t);
        let den = den_poly.eval(t);
        if !num.is_zero() || !den.is_zero() {
            return (num, den);
        }
        num_poly = num_poly.derivative();
        den_poly = den_poly.derivative();
    }
}

/// Extract the spectral pair from a connection matrix.
///
/// The root `t` of `k0 z^2 + k1 z + k0 u^2` generally needs one square
/// root, so the result lives one quadratic extension above the working
/// field; values that stay rational embed as base elements. When `t`
/// lands on a pole of the matrix the value `p` is infinite and the pair
/// leaves this chart, which is reported as a base point hit; the
/// invariant coordinates still exist there.
pub fn spectral_from_connection<T: Scalar>(
    conn: &ConnectionMatrix<T>,
    params: &Params<T>,
) -> Result<SpectralPoint<QuadExt<T>>> {
    let t = spectral_root(conn, params)?;
    let (num, den) = matrix_value_parts(conn, &t);
    let den_inv = den.checked_inv().ok_or_else(|| {
        CoreError::BasePointHit("matrix value at t is infinite".into())
    })?;
    Ok(SpectralPoint { t, p: num * den_inv })
}

/// Fold a spectral pair into the involution-invariant coordinates.
///
/// The corners `(u, 1)` and `(-u, -1)`, where both the numerator and
/// the denominator of `y` vanish, are the degenerate points of the
/// involution and are rejected; a vanishing denominator alone means `y`
/// leaves the affine chart.
pub fn invariant_from_spectral<T: Scalar>(
    sp: &SpectralPoint<T>,
    u: &T,
) -> Result<InvariantPoint<T>> {
    let t_inv = sp.t.checked_inv().ok_or(CoreError::DivisionByZero)?;
    let x = sp.t.clone() + u.clone() * u.clone() * t_inv;
    let num = sp.p.clone() * sp.t.clone() - u.clone();
    let den = sp.p.clone() * u.clone() - sp.t.clone();
    let den_inv = den.checked_inv().ok_or({
        if num.is_zero() {
            CoreError::InvolutionFixedPoint
        } else {
            CoreError::DivisionByZero
        }
    })?;
    Ok(InvariantPoint { x, y: num * den_inv })
}

/// Invariant coordinates of a connection matrix.
///
/// Runs the extraction in a quadratic extension and projects back; both
/// coordinates are fixed by the root conjugation, so the projection
/// always succeeds. The formula for `y` keeps the matrix value in
/// homogeneous form `(num, den)`, writing
/// `y = (num t - u den) / (u num - t den)`, so stages where the matrix
/// value at `t` blows up still fold correctly; there `y` degenerates to
/// `t / u`. Requires `u` itself in the working field.
pub fn invariant_from_connection<T: Scalar>(
    conn: &ConnectionMatrix<T>,
    params: &Params<T>,
) -> Result<InvariantPoint<T>> {
    let t = spectral_root(conn, params)?;
    let u = QuadExt::from_base(params.u().clone());
    let u2 = QuadExt::from_base(params.u2.clone());
    let t_inv = t.checked_inv().ok_or(CoreError::DivisionByZero)?;
    let x = t.clone() + u2 * t_inv;
    let (vn, vd) = matrix_value_parts(conn, &t);
    let num = vn.clone() * t.clone() - u.clone() * vd.clone();
    let den = u * vn - t * vd;
    let den_inv = den.checked_inv().ok_or({
        if num.is_zero() {
            CoreError::InvolutionFixedPoint
        } else {
            CoreError::DivisionByZero
        }
    })?;
    let y = num * den_inv;
    let x = x.to_base().expect("x is fixed by the root conjugation");
    let y = y.to_base().expect("y is fixed by the root conjugation");
    Ok(InvariantPoint { x, y })
}

/// Parameter block of the stage `s` chart.
///
/// The slots are fixed expressions in the stage roots `z_1..z_6`, the
/// involution parameter `u`, and the residue values `rho = (-d1, -d2)`
/// of the second coordinate at infinity. Requires `u` in the field.
pub fn qracah_painleve_params<T: Scalar>(
    params: &Params<T>,
    s: i64,
    rho: (T, T),
) -> PainleveParams<T> {
    let z = params.z_params(s);
    let u = params.u().clone();
    let zz46 = z[3].clone() * z[5].clone();
    let nu = [
        z[5].inv(),
        z[0].inv(),
        z[2].inv(),
        z[4].inv(),
        u.clone() * z[3].clone() / z[1].clone(),
        u.clone(),
        T::zero() - rho.0 * zz46.clone() / u.clone(),
        T::zero() - rho.1 * zz46 / u.clone(),
    ];
    PainleveParams {
        nu,
        kappa1: u.clone() / z[1].clone(),
        kappa2: z[3].clone() / u,
        q: params.q.clone(),
    }
}

/// Diagonal values `(d1, d2)` of the dressed matrix at infinity.
///
/// Conjugating `A(z)` by `diag(1, sigma(z))` across the node map sends
/// the diagonal entries to two constants and the upper right entry to
/// zero as `z` grows. The function checks the coefficient symmetry that
/// makes this happen, reads the constants off the top entry, and checks
/// their product against the stage data.
pub fn asymptotic_d<T: Scalar>(
    conn: &ConnectionMatrix<T>,
    params: &Params<T>,
) -> Result<(T, T)> {
    let u2 = &params.u2;
    for k in 0..=6usize {
        let twist = u2.pow_i(3 - k as i64);
        if conn.b.e22.coeff(6 - k) * twist != conn.b.e11.coeff(k) {
            return Err(CoreError::NonDiagonalLimit(format!(
                "coefficient duality fails at degree {k}"
            )));
        }
    }
    for (label, entry) in
        [("upper right", &conn.b.e12), ("lower left", &conn.b.e21)]
    {
        if palindromic_quadratic(entry, u2).is_none() {
            return Err(CoreError::NonDiagonalLimit(format!(
                "{label} entry lacks the odd palindromic factor"
            )));
        }
    }
    let (d1, d2) = conn.moduli(params);
    if d1.clone() * d2.clone() != conn.q_scale.clone() / params.q.clone() {
        return Err(CoreError::NonDiagonalLimit(
            "product of the diagonal values is off".into(),
        ));
    }
    Ok((d1, d2))
}

/// Extract `(c0, c1)` from `z (z^2 - u^2)(c0 z^2 + c1 z + c0 u^2)`,
/// or `None` when the entry does not have that shape.
fn palindromic_quadratic<T: Scalar>(
    entry: &Poly<T>,
    u2: &T,
) -> Option<(T, T)> {
    if entry.is_zero() {
        return Some((T::zero(), T::zero()));
    }
    let cubic = Poly::from_coeffs(vec![
        T::zero(),
        T::zero() - u2.clone(),
        T::zero(),
        T::one(),
    ]);
    let (quot, rem) = entry.div_rem(&cubic);
    if !rem.is_zero() || quot.degree().unwrap_or(0) > 2 {
        return None;
    }
    if quot.coeff(0) != quot.coeff(2) * u2.clone() {
        return None;
    }
    Some((quot.coeff(2), quot.coeff(1)))
}

/// Stage block of a connection matrix, with the residue values read off
/// its diagonal moduli. `swap_moduli` exchanges the two, a relabeling
/// the chart allows.
pub fn stage_params<T: Scalar>(
    conn: &ConnectionMatrix<T>,
    params: &Params<T>,
    swap_moduli: bool,
) -> Result<PainleveParams<T>> {
    let (d1, d2) = asymptotic_d(conn, params)?;
    let rho = if swap_moduli {
        (T::zero() - d2, T::zero() - d1)
    } else {
        (T::zero() - d1, T::zero() - d2)
    };
    Ok(qracah_painleve_params(params, conn.s, rho))
}

/// Raw chart evaluation from explicit geometric data.
fn chart_values<T: Scalar>(
    x: &T,
    y: &T,
    u: &T,
    z2: &T,
    z4: &T,
    z6: &T,
) -> Result<(T, T)> {
    let one = T::one();
    let s1 = z2.clone() + z4.clone() + z6.clone();
    let s2 = z2.clone() * z4.clone()
        + z4.clone() * z6.clone()
        + z6.clone() * z2.clone();
    let s3 = z2.clone() * z4.clone() * z6.clone();
    let u2 = u.clone() * u.clone();
    let u3 = u2.clone() * u.clone();
    let u4 = u3.clone() * u.clone();
    let u5 = u4.clone() * u.clone();
    let yp = y.clone() + one.clone();
    let ym = one.clone() - y.clone();
    let core = x.clone() * y.clone() + u.clone() * (y.clone() - one.clone());

    let f_num = s3.clone() * core.clone()
        - u2.clone()
            * (x.clone() * x.clone() - s1.clone() * x.clone()
                + s2.clone() * yp.clone())
        + u3.clone() * ym.clone() * (s1.clone() - x.clone())
        + u4.clone() * yp.clone();
    let f_den = s3.clone() * x.clone() * core
        - u2.clone() * (s2.clone() * x.clone() * y.clone() + s3 * yp.clone())
        + u3 * s2 * ym.clone()
        + u4 * (s1 * yp.clone() - x.clone())
        - u5 * ym.clone();
    let g_num = x.clone() * y.clone() * z6.clone()
        + u.clone() * z6.clone() * (y.clone() - one.clone())
        - u2 * yp.clone();
    let g_den = z6.clone() * yp - x.clone() - u.clone() * ym;

    let f = f_num
        * f_den.checked_inv().ok_or_else(|| {
            CoreError::BasePointHit("f denominator vanishes".into())
        })?;
    let g = g_num
        * g_den.checked_inv().ok_or_else(|| {
            CoreError::BasePointHit("g denominator vanishes".into())
        })?;
    Ok((f, g))
}

/// Chart map from invariant coordinates.
///
/// The geometric data is recovered from the block as `u = nu_6`,
/// `z2 = nu_6 / kappa1`, `z4 = nu_6 kappa2`, `z6 = 1/nu_1`.
pub fn to_painleve<T: Scalar>(
    inv: &InvariantPoint<T>,
    pp: &PainleveParams<T>,
) -> Result<PainlevePoint<T>> {
    let u = pp.nu[5].clone();
    let z2 = pp.nu[5].clone() / pp.kappa1.clone();
    let z4 = pp.nu[5].clone() * pp.kappa2.clone();
    let z6 = pp.nu[0].inv();
    let (f, g) = chart_values(&inv.x, &inv.y, &u, &z2, &z4, &z6)?;
    Ok(PainlevePoint { f, g, params: pp.clone() })
}

/// Inverse chart map back to invariant coordinates.
pub fn from_painleve<T: Scalar>(
    pt: &PainlevePoint<T>,
) -> Result<InvariantPoint<T>> {
    let pp = &pt.params;
    let one = T::one();
    let (f, g) = (pt.f.clone(), pt.g.clone());
    let (k1, k2) = (pp.kappa1.clone(), pp.kappa2.clone());
    let (n1, n6) = (pp.nu[0].clone(), pp.nu[5].clone());
    let fg = f.clone() * g.clone();
    let kd = k1.clone() - k2.clone();
    let kp = one.clone() + k1.clone() * k2.clone();

    let x_num = kd.clone() * g.clone()
        + n6.clone() * kp.clone() * (one.clone() - fg.clone())
        + n6.clone() * n6.clone() * kd * f.clone();
    let x_den = k1.clone() - k2.clone() * fg.clone();
    let y_num = n1.clone()
        * n6.clone()
        * (one.clone() - fg.clone())
        * (n6.clone() * k1.clone() - kp * g.clone())
        + k2.clone()
            * fg.clone()
            * ((n1.clone() * n6.clone() - one.clone()) * g.clone()
                - n6.clone())
        + n1.clone() * k2.clone() * g.clone() * g.clone()
        + k1.clone()
            * (one.clone() - n1.clone() * g.clone())
            * (g.clone() + n6.clone());
    let y_den = (one.clone() - fg)
        * (n6.clone() - k2.clone() * (g.clone() - n6.clone() * k1.clone()))
        - n6.clone()
            * ((g.clone() + n6.clone())
                * (k1.clone() * n1.clone()
                    + k2 * f.clone() * (one.clone() - g * n1))
                - k1 * (one + n6 * f));

    let x = x_num
        * x_den.checked_inv().ok_or_else(|| {
            CoreError::BasePointHit("x denominator vanishes".into())
        })?;
    let y = y_num
        * y_den.checked_inv().ok_or_else(|| {
            CoreError::BasePointHit("y denominator vanishes".into())
        })?;
    Ok(InvariantPoint { x, y })
}

/// Product of `g` distances to the four upper base values over the four
/// lower ones; the right side of the flow equation that drives `f`.
fn g_side<T: Scalar>(pp: &PainleveParams<T>, g: &T) -> Result<T> {
    let mut num = T::one();
    let mut den = T::one();
    for i in 0..4 {
        num = num
            * (g.clone() - pp.nu[i + 4].clone() / pp.kappa2.clone());
        den = den * (g.clone() - pp.nu[i].inv());
    }
    let inv = den.checked_inv().ok_or_else(|| {
        CoreError::IndeterminateStep(
            "g sits on a lower base value".into(),
        )
    })?;
    Ok(num * inv)
}

/// Product of `f` distances to the four upper base values over the four
/// lower ones; the right side of the flow equation that drives `g`.
fn f_side<T: Scalar>(pp: &PainleveParams<T>, f: &T) -> Result<T> {
    let mut num = T::one();
    let mut den = T::one();
    for i in 0..4 {
        num = num
            * (f.clone() - pp.kappa1.clone() / pp.nu[i + 4].clone());
        den = den * (f.clone() - pp.nu[i].clone());
    }
    let inv = den.checked_inv().ok_or_else(|| {
        CoreError::IndeterminateStep(
            "f sits on a lower base value".into(),
        )
    })?;
    Ok(num * inv)
}

/// The factor `(w - c)/(w - 1)` of a product variable `w = f g`.
fn shifted_ratio<T: Scalar>(w: &T, c: &T) -> Result<T> {
    let inv = (w.clone() - T::one()).checked_inv().ok_or_else(|| {
        CoreError::IndeterminateStep("f g = 1 on the flow divisor".into())
    })?;
    Ok((w.clone() - c.clone()) * inv)
}

/// Solve `(w - c) b = r (w - 1)` for the product variable `w`.
fn solve_product<T: Scalar>(b: &T, r: &T, c: &T) -> Result<T> {
    let inv = (b.clone() - r.clone()).checked_inv().ok_or_else(|| {
        CoreError::IndeterminateStep(
            "the two sides of the flow equation coincide".into(),
        )
    })?;
    Ok((b.clone() * c.clone() - r.clone()) * inv)
}

/// One step of the discrete flow in the `(f, g)` chart.
///
/// Two coupled multiplicative equations relate consecutive points; each
/// is linear-fractional in its unknown. The forward step solves the
/// first for the next `f` given `g`, then the second, shifted one step,
/// for the next `g`; the inverse step runs the pair the other way
/// round. The parameter block moves with the step.
pub fn qp_e7_step<T: Scalar>(
    pt: &PainlevePoint<T>,
    direction: StepDirection,
) -> Result<PainlevePoint<T>> {
    match direction {
        StepDirection::Forward => step_forward(pt),
        StepDirection::Inverse => step_inverse(pt),
    }
}

fn step_forward<T: Scalar>(pt: &PainlevePoint<T>) -> Result<PainlevePoint<T>> {
    let pp = &pt.params;
    let q = pp.q.clone();
    let kappa = pp.kappa1.clone() / pp.kappa2.clone();
    let fg = pt.f.clone() * pt.g.clone();

    let a_fac = shifted_ratio(&fg, &kappa)?;
    let r1 = g_side(pp, &pt.g)?;
    let fnext_g = solve_product(&a_fac, &r1, &(kappa.clone() / q.clone()))?;
    let g_inv = pt.g.checked_inv().ok_or_else(|| {
        CoreError::IndeterminateStep("g vanishes".into())
    })?;
    let f_next = fnext_g.clone() * g_inv;

    let shifted = pp.shifted(StepDirection::Forward);
    let b_fac = shifted_ratio(&fnext_g, &(kappa.clone() / q.clone()))?;
    let r2 = f_side(&shifted, &f_next)?;
    let kappa_next = kappa / (q.clone() * q);
    let fnext_gnext = solve_product(&b_fac, &r2, &kappa_next)?;
    let f_inv = f_next.checked_inv().ok_or_else(|| {
        CoreError::IndeterminateStep("next f vanishes".into())
    })?;
    let g_next = fnext_gnext * f_inv;
    Ok(PainlevePoint { f: f_next, g: g_next, params: shifted })
}

fn step_inverse<T: Scalar>(pt: &PainlevePoint<T>) -> Result<PainlevePoint<T>> {
    let pp = &pt.params;
    let q = pp.q.clone();
    let kappa = pp.kappa1.clone() / pp.kappa2.clone();
    let fg = pt.f.clone() * pt.g.clone();

    let b_fac = shifted_ratio(&fg, &kappa)?;
    let r2 = f_side(pp, &pt.f)?;
    let f_gprev = solve_product(&b_fac, &r2, &(q.clone() * kappa.clone()))?;
    let f_inv = pt.f.checked_inv().ok_or_else(|| {
        CoreError::IndeterminateStep("f vanishes".into())
    })?;
    let g_prev = f_gprev.clone() * f_inv;

    let shifted = pp.shifted(StepDirection::Inverse);
    let c_fac = shifted_ratio(&f_gprev, &(q.clone() * kappa.clone()))?;
    let r1 = g_side(&shifted, &g_prev)?;
    let kappa_prev = q.clone() * q * kappa;
    let fprev_gprev = solve_product(&c_fac, &r1, &kappa_prev)?;
    let g_inv = g_prev.checked_inv().ok_or_else(|| {
        CoreError::IndeterminateStep("previous g vanishes".into())
    })?;
    let f_prev = fprev_gprev * g_inv;
    Ok(PainlevePoint { f: f_prev, g: g_prev, params: shifted })
}

/// One way of matching the stage chain to the flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Calibration {
    pub direction: StepDirection,
    /// Convert both endpoints in the starting stage block instead of
    /// each in its own.
    pub frozen_block: bool,
    /// Exchange the two residue values in the dictionary.
    pub swap_moduli: bool,
}

/// All calibrations under which one flow step reproduces the observed
/// motion between two consecutive stage connections.
pub fn calibrate_step<T: Scalar>(
    conn: &ConnectionMatrix<T>,
    next: &ConnectionMatrix<T>,
    params: &Params<T>,
) -> Result<Vec<Calibration>> {
    assert_eq!(next.s, conn.s + 1, "stages must be consecutive");
    let inv0 = invariant_from_connection(conn, params)?;
    let inv1 = invariant_from_connection(next, params)?;
    let mut found = Vec::new();
    for direction in [StepDirection::Forward, StepDirection::Inverse] {
        for frozen_block in [false, true] {
            for swap_moduli in [false, true] {
                let pp0 = stage_params(conn, params, swap_moduli)?;
                let pp1 = if frozen_block {
                    pp0.clone()
                } else {
                    stage_params(next, params, swap_moduli)?
                };
                let start = match to_painleve(&inv0, &pp0) {
                    Ok(pt) => pt,
                    Err(_) => continue,
                };
                let target = match to_painleve(&inv1, &pp1) {
                    Ok(pt) => pt,
                    Err(_) => continue,
                };
                let stepped = match qp_e7_step(&start, direction) {
                    Ok(pt) => pt,
                    Err(_) => continue,
                };
                if stepped.f == target.f && stepped.g == target.g {
                    found.push(Calibration {
                        direction,
                        frozen_block,
                        swap_moduli,
                    });
                }
            }
        }
    }
    Ok(found)
}

/// Round-trips the invariant point of one connection through the chart
/// and verifies the rational trace shortcut of the spectral quadratic.
fn check_coordinate_layer<T: Scalar>(
    conn: &ConnectionMatrix<T>,
    params: &Params<T>,
) -> Result<()> {
    let inv = invariant_from_connection(conn, params)?;
    let (k0, k1) = conn.lower_quadratic(params);
    if inv.x != T::zero() - k1 / k0 {
        return Err(CoreError::ChartMismatch(format!(
            "spectral trace differs from the root sum at stage {}",
            conn.s
        )));
    }
    let pp = stage_params(conn, params, false)?;
    let pt = to_painleve(&inv, &pp)?;
    let back = from_painleve(&pt)?;
    if back != inv {
        return Err(CoreError::ChartMismatch(format!(
            "chart round trip moved the point at stage {}",
            conn.s
        )));
    }
    Ok(())
}

/// Gap probabilities `D_N ..= D_{M+1}` via the stage recursion carried
/// through the coordinate layer.
///
/// Runs the same double-ratio chain as the connection path, but at
/// every stage extracts the invariant point, maps it through the chart
/// and back, and cross-checks the trace of the spectral quadratic.
/// Requires `u` itself in the working field.
pub fn gap_table_painleve<T: Scalar>(
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
    let mut conn = initial_connection(grid, params);
    let mut triple = triple_from_state(&state, &conn, grid, params)?;
    let total = grid.len() - big_n + 1;
    let mut values = vec![seeds.0, seeds.1];
    while values.len() < total {
        check_coordinate_layer(&conn, params)?;
        let hat = advance_triple(&conn, &triple, params)?;
        let double = gap_double_ratio(&triple, &hat, conn.s, grid, params)?;
        let last = values[values.len() - 1].clone();
        let prev = values[values.len() - 2].clone();
        values.push(double * last.clone() * last / prev);
        if values.len() < total {
            let t = triple.transition()?;
            conn = advance_connection(&conn, &t, params)?;
            triple = hat;
        }
    }
    check_coordinate_layer(&conn, params)?;
    Ok(values)
}

/// The chart used on the degenerate (`delta = 0`) connection family:
/// `f = 1/t` and `g = t w z6 / (z6 (p - w) + t w)`.
pub fn qhahn_coords<T: Scalar>(
    t: &T,
    p: &T,
    w: &T,
    z6: &T,
) -> Result<(T, T)> {
    let f = t.checked_inv().ok_or(CoreError::DivisionByZero)?;
    let den = z6.clone() * (p.clone() - w.clone()) + t.clone() * w.clone();
    let den_inv = den.checked_inv().ok_or(CoreError::DivisionByZero)?;
    Ok((f, t.clone() * w.clone() * z6.clone() * den_inv))
}

/// Value of the `(x, y)` chart in the `u -> 0` limit: `f` tends to
/// `1/x` and `g` to `x y z6 / (z6 (1 + y) - x)`.
pub fn degenerate_coords<T: Scalar>(
    x: &T,
    y: &T,
    z6: &T,
) -> Result<(T, T)> {
    let f = x.checked_inv().ok_or(CoreError::DivisionByZero)?;
    let den = z6.clone() * (T::one() + y.clone()) - x.clone();
    let den_inv = den.checked_inv().ok_or(CoreError::DivisionByZero)?;
    Ok((f, x.clone() * y.clone() * z6.clone() * den_inv))
}

/// Error magnitudes of the chart against its small-`u` limit along a
/// decreasing sequence of `u` values.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub f_errors: Vec<BigRational>,
    pub g_errors: Vec<BigRational>,
}

/// Consecutive shrink factors `err_k / err_{k+1}`. Exact zeros are
/// skipped: a vanishing later error only means the sequence converged
/// early, while a vanishing earlier one contributes an honest zero.
pub fn shrink_factors(errors: &[BigRational]) -> Vec<BigRational> {
    let mut out = Vec::new();
    for pair in errors.windows(2) {
        if pair[1].is_zero() {
            continue;
        }
        out.push(&pair[0] / &pair[1]);
    }
    out
}

/// Evaluates the chart at a fixed invariant point for each `u` in the
/// sequence and measures the distance to the degenerate chart values.
pub fn qhahn_limit_check(
    x: &BigRational,
    y: &BigRational,
    zblock: &(BigRational, BigRational, BigRational),
    u_values: &[BigRational],
) -> Result<ConvergenceReport> {
    let (z2, z4, z6) = zblock;
    let (f_limit, g_limit) = degenerate_coords(x, y, z6)?;
    let mut f_errors = Vec::new();
    let mut g_errors = Vec::new();
    for u in u_values {
        let (f, g) = chart_values(x, y, u, z2, z4, z6)?;
        f_errors.push((f - f_limit.clone()).abs());
        g_errors.push((g - g_limit.clone()).abs());
    }
    Ok(ConvergenceReport { f_errors, g_errors })
}

/// Conjugation of `A(z)` by `diag(1, sigma(z))` across the node map,
/// the combination whose large-`z` limit is `diag(d1, d2)`.
pub fn dressed_at<T: Scalar>(
    conn: &ConnectionMatrix<T>,
    params: &Params<T>,
    z: &T,
) -> Result<Mat2<T>> {
    let a = conn.eval(z)?;
    let left = params.sigma(&(z.clone() / params.q.clone()))?;
    let right = params.sigma(z)?;
    let right_inv =
        right.checked_inv().ok_or(CoreError::DivisionByZero)?;
    Ok(Mat2::new(
        a.e11,
        a.e12 * right_inv.clone(),
        left.clone() * a.e21,
        left * a.e22 * right_inv,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::build_connection;
    use crate::ensemble::{raw_params_p0, raw_params_p1};
    use crate::oracle::gap_enumerate;
    use crate::orthopoly::build_ops;
    use crate::rng::SplitMix64;
    use crate::scalar::{rat, rat_int, QRat, Ring};

    fn setup_p0() -> (NodeGrid<BigRational>, Params<BigRational>) {
        let params = Params::<BigRational>::new(&raw_params_p0()).unwrap();
        (params.grid(), params)
    }

    fn setup_p1_extended() -> (NodeGrid<QRat>, Params<QRat>) {
        let params = Params::new_extended(&raw_params_p1()).unwrap();
        (params.grid(), params)
    }

    fn stage_connections<T: Scalar>(
        grid: &NodeGrid<T>,
        params: &Params<T>,
    ) -> Vec<ConnectionMatrix<T>> {
        let mut state = RhpState::initial(grid, params.big_n);
        let mut out =
            vec![build_connection(&state, grid, params).unwrap()];
        while state.s < grid.len() {
            state = state.step(grid).unwrap().0;
            out.push(build_connection(&state, grid, params).unwrap());
        }
        out
    }

    #[test]
    fn spectral_root_solves_the_quadratic_with_rational_trace() {
        let (grid, params) = setup_p0();
        let conn = initial_connection(&grid, &params);
        let (k0, k1) = conn.lower_quadratic(&params);
        let sp = spectral_from_connection(&conn, &params).unwrap();
        let lift = QuadExt::from_base;
        let residual = lift(k0.clone()) * sp.t.clone() * sp.t.clone()
            + lift(k1.clone()) * sp.t.clone()
            + lift(k0.clone() * params.u2.clone());
        assert!(residual.is_zero());

        let inv = invariant_from_connection(&conn, &params).unwrap();
        assert_eq!(inv.x, -(k1 / k0));
    }

    #[test]
    fn involution_partner_gives_the_same_invariants() {
        let (grid, params) = setup_p0();
        let u = QuadExt::from_base(params.u().clone());
        let u2 = QuadExt::from_base(params.u2.clone());
        let mut finite_chart_stages = 0;
        for conn in &stage_connections(&grid, &params) {
            let robust = invariant_from_connection(conn, &params).unwrap();
            // The finite (t, p) chart misses stages where the matrix
            // value at t blows up; where it exists the two routes and
            // the involution partner must all agree.
            let sp = match spectral_from_connection(conn, &params) {
                Ok(sp) => sp,
                Err(CoreError::BasePointHit(_)) => continue,
                Err(other) => panic!("unexpected error: {other}"),
            };
            finite_chart_stages += 1;
            let partner = sp.involution(&u2).unwrap();
            let a = invariant_from_spectral(&sp, &u).unwrap();
            let b = invariant_from_spectral(&partner, &u).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.x.to_base().unwrap(), robust.x);
            assert_eq!(a.y.to_base().unwrap(), robust.y);
        }
        assert!(finite_chart_stages >= 1);
    }

    #[test]
    fn involution_corners_are_rejected_and_the_regular_one_maps() {
        let u = QRat::generator(rat(1, 8));
        let one = QRat::one();
        let bad = SpectralPoint { t: u.clone(), p: one.clone() };
        assert!(matches!(
            invariant_from_spectral(&bad, &u),
            Err(CoreError::InvolutionFixedPoint)
        ));
        let bad = SpectralPoint { t: -u.clone(), p: -one.clone() };
        assert!(matches!(
            invariant_from_spectral(&bad, &u),
            Err(CoreError::InvolutionFixedPoint)
        ));

        // The remaining corner of the fixed locus is regular and lands
        // on the blown-up point (-2u, -1).
        let good = SpectralPoint { t: -u.clone(), p: one.clone() };
        let inv = invariant_from_spectral(&good, &u).unwrap();
        assert_eq!(inv.x, -(QRat::from_i64(2) * u.clone()));
        assert_eq!(inv.y, -QRat::one());

        // A simple pole of y that is not a fixed corner reports as a
        // plain overflow of the affine chart.
        let pole = SpectralPoint {
            t: QRat::from_i64(3) * u.clone(),
            p: QRat::from_i64(3),
        };
        assert!(matches!(
            invariant_from_spectral(&pole, &u),
            Err(CoreError::DivisionByZero)
        ));
    }

    #[test]
    fn chart_round_trips_at_random_points() {
        let (grid, params) = setup_p0();
        let conn = initial_connection(&grid, &params);
        let pp = stage_params(&conn, &params, false).unwrap();
        let mut rng = SplitMix64::new(0xC0FFEE);
        for _ in 0..20 {
            let inv = InvariantPoint {
                x: rng.rational(40, 12),
                y: rng.rational(40, 12),
            };
            let pt = to_painleve(&inv, &pp).unwrap();
            assert_eq!(from_painleve(&pt).unwrap(), inv);
        }
        for _ in 0..20 {
            let pt = PainlevePoint {
                f: rng.rational(40, 12),
                g: rng.rational(40, 12),
                params: pp.clone(),
            };
            let inv = from_painleve(&pt).unwrap();
            let back = to_painleve(&inv, &pp).unwrap();
            assert_eq!(back.f, pt.f);
            assert_eq!(back.g, pt.g);
        }
    }

    #[test]
    fn first_base_point_lands_on_its_chart_coordinates() {
        let (grid, params) = setup_p0();
        let conn = initial_connection(&grid, &params);
        let pp = stage_params(&conn, &params, false).unwrap();
        let z6 = pp.nu[0].inv();
        let u = params.u().clone();
        let inv = InvariantPoint {
            x: z6.clone() + params.u2.clone() / z6.clone(),
            y: z6.clone() / u,
        };
        let pt = to_painleve(&inv, &pp).unwrap();
        assert_eq!(pt.f, pp.nu[0]);
        assert_eq!(pt.g, z6);
        assert_eq!(pt.base_point_index(), Some(0));
    }

    #[test]
    fn flow_step_round_trips() {
        let (grid, params) = setup_p0();
        let conn = initial_connection(&grid, &params);
        let pp = stage_params(&conn, &params, false).unwrap();
        let mut rng = SplitMix64::new(0xBEEF);
        let mut completed = 0;
        for _ in 0..30 {
            let pt = PainlevePoint {
                f: rng.rational(30, 10),
                g: rng.rational(30, 10),
                params: pp.clone(),
            };
            // A random point can land on the indeterminacy locus of a
            // step; such samples are skipped, not failed.
            let there = match qp_e7_step(&pt, StepDirection::Forward) {
                Ok(pt) => pt,
                Err(CoreError::IndeterminateStep(_)) => continue,
                Err(other) => panic!("unexpected error: {other}"),
            };
            let back = qp_e7_step(&there, StepDirection::Inverse).unwrap();
            assert_eq!(back, pt);
            let there = match qp_e7_step(&pt, StepDirection::Inverse) {
                Ok(pt) => pt,
                Err(CoreError::IndeterminateStep(_)) => continue,
                Err(other) => panic!("unexpected error: {other}"),
            };
            let back = qp_e7_step(&there, StepDirection::Forward).unwrap();
            assert_eq!(back, pt);
            completed += 1;
        }
        assert!(completed >= 15, "only {completed} clean samples");
    }

    #[test]
    fn degenerate_side_pins_the_next_product() {
        let (grid, params) = setup_p0();
        let conn = initial_connection(&grid, &params);
        let pp = stage_params(&conn, &params, false).unwrap();
        // With g on the fifth base value the right side of the first
        // flow equation vanishes, pinning the next product to kappa/q.
        let f = rat(3, 7);
        let g = pp.nu[4].clone() / pp.kappa2.clone();
        let kappa = pp.kappa1.clone() / pp.kappa2.clone();
        let fg = f.clone() * g.clone();
        let a_fac = shifted_ratio(&fg, &kappa).unwrap();
        let r1 = g_side(&pp, &g).unwrap();
        assert!(r1.is_zero());
        let pinned =
            solve_product(&a_fac, &r1, &(kappa.clone() / pp.q.clone()))
                .unwrap();
        assert_eq!(pinned, kappa / pp.q.clone());
        // The pinned product puts the image on a shifted base point,
        // so the full step is indeterminate there and says so.
        let pt = PainlevePoint { f, g, params: pp };
        assert!(matches!(
            qp_e7_step(&pt, StepDirection::Forward),
            Err(CoreError::IndeterminateStep(_))
        ));
    }

    #[test]
    fn stage_blocks_satisfy_the_product_identities() {
        let (grid, params) = setup_p0();
        for conn in &stage_connections(&grid, &params) {
            let (d1, d2) = asymptotic_d(conn, &params).unwrap();
            assert_eq!(
                d1 * d2,
                conn.q_scale.clone() / params.q.clone()
            );
            for swap in [false, true] {
                let pp = stage_params(conn, &params, swap).unwrap();
                assert_eq!(pp.step_q(), params.q);
            }
        }
        let (grid, params) = setup_p1_extended();
        let conn = initial_connection(&grid, &params);
        let pp = stage_params(&conn, &params, false).unwrap();
        assert_eq!(pp.step_q(), params.q);
    }

    #[test]
    fn diagonal_limit_matches_large_argument_sampling() {
        // Strictly shrinking by two orders per decade step, except for
        // sequences that are identically zero.
        fn assert_shrinks(errs: &[BigRational]) {
            for pair in errs.windows(2) {
                if pair[0].is_zero() && pair[1].is_zero() {
                    continue;
                }
                assert!(&pair[0] > &(pair[1].clone() * rat_int(100)));
            }
        }

        let (grid, params) = setup_p0();
        let big_n = params.big_n as i64;
        let ab = params.alpha.clone() * params.beta.clone();
        for conn in &stage_connections(&grid, &params) {
            let (d1, d2) = asymptotic_d(conn, &params).unwrap();
            assert_eq!(d1, params.q.pow_i(-big_n) / ab.clone());
            assert_eq!(d2, params.q.pow_i(big_n - 1));

            let (k0, _) = conn.lower_quadratic(&params);
            let corner = k0 / params.q.clone();
            let mut errs: Vec<[BigRational; 4]> = Vec::new();
            for e in [3, 6, 9] {
                let z = rat_int(10).pow_i(e);
                let m = dressed_at(conn, &params, &z).unwrap();
                errs.push([
                    (m.e11 - d1.clone()).abs(),
                    (m.e22 - d2.clone()).abs(),
                    m.e12.abs(),
                    (m.e21 - corner.clone()).abs(),
                ]);
            }
            for k in 0..4 {
                let line: Vec<BigRational> =
                    errs.iter().map(|row| row[k].clone()).collect();
                assert_shrinks(&line);
            }
        }
    }

    #[test]
    fn chart_approaches_its_degenerate_form_linearly() {
        let x = rat(5, 3);
        let y = rat(7, 2);
        let zblock = (rat_int(3), rat(5, 2), rat_int(2));
        let u_values: Vec<BigRational> =
            (3..=8).map(|k| rat(1, 4).pow_i(k)).collect();
        let report =
            qhahn_limit_check(&x, &y, &zblock, &u_values).unwrap();
        for factors in
            [shrink_factors(&report.f_errors), shrink_factors(&report.g_errors)]
        {
            assert_eq!(factors.len(), 5);
            for ratio in factors {
                assert!(ratio >= rat_int(3));
            }
        }

        let (f, _) = qhahn_coords(
            &rat_int(4),
            &rat(1, 2),
            &rat(1, 3),
            &rat_int(2),
        )
        .unwrap();
        assert_eq!(f, rat(1, 4));
    }

    #[test]
    fn calibration_finds_no_literal_flow_match() {
        let (grid, params) = setup_p0();
        let conns = stage_connections(&grid, &params);
        for pair in conns.windows(2) {
            let found =
                calibrate_step(&pair[0], &pair[1], &params).unwrap();
            assert!(found.is_empty(), "unexpected match: {found:?}");
        }
    }

    #[test]
    fn gap_table_via_chart_matches_enumeration() {
        let (grid, params) = setup_p0();
        let ops = build_ops(&grid).unwrap();
        let table = gap_table_painleve(&ops, &grid, &params).unwrap();
        for (offset, value) in table.iter().enumerate() {
            let reference = gap_enumerate(
                &grid,
                params.big_n,
                params.big_n + offset,
            )
            .unwrap();
            assert_eq!(value, &reference);
        }

        let (grid, params) = setup_p1_extended();
        let ops = build_ops(&grid).unwrap();
        let table = gap_table_painleve(&ops, &grid, &params).unwrap();
        for (offset, value) in table.iter().enumerate() {
            let reference = gap_enumerate(
                &grid,
                params.big_n,
                params.big_n + offset,
            )
            .unwrap();
            assert_eq!(value, &reference);
        }
    }
}
