//! Monic orthogonal polynomials on a weighted grid, their Christoffel-Darboux
//! projection kernel, and a high-precision closed form for the squared norms.
//!
//! The production constructor [`build_ops`] runs the three-term recurrence
//! with inner products contracted against precomputed power moments of the
//! grid measure. The independent oracle [`gram_schmidt`] orthogonalizes the
//! monomial basis with inner products evaluated as weighted sums over the
//! nodes; tests compare the two routes coefficient by coefficient.

use num::rational::BigRational;
use num::Signed;

use crate::bigfloat::BigFloat;
use crate::ensemble::{qpochhammer, NodeGrid, RawParams};
use crate::error::{CoreError, Result};
use crate::poly::Poly;
use crate::scalar::{rat, Scalar};

/// Monic orthogonal polynomials `P_0 .. P_K` on a weighted grid with `K + 1`
/// nodes, together with their squared norms and recurrence coefficients.
///
/// The polynomials satisfy `P_{n+1}(z) = (z - a_n) P_n(z) - b_n P_{n-1}(z)`
/// with `a_n = <z P_n, P_n> / c_n` and `b_n = c_n / c_{n-1}`, and the
/// orthogonality `(P_m, P_n) = c_n delta_{mn}` with every `c_n` nonzero.
#[derive(Clone, Debug)]
pub struct OPSystem<T: Scalar> {
    polys: Vec<Poly<T>>,
    norms: Vec<T>,
    rec_a: Vec<T>,
    rec_b: Vec<T>,
}

impl<T: Scalar> OPSystem<T> {
    /// The monic polynomial of degree `n`.
    pub fn poly(&self, n: usize) -> &Poly<T> {
        &self.polys[n]
    }

    /// The squared norm `c_n = (P_n, P_n)`.
    pub fn norm(&self, n: usize) -> &T {
        &self.norms[n]
    }

    /// Number of polynomials in the system (top degree plus one).
    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// Recurrence coefficient `a_n`, defined for `n < len() - 1`.
    pub fn rec_a(&self, n: usize) -> &T {
        &self.rec_a[n]
    }

    /// Recurrence coefficient `b_n = c_n / c_{n-1}`, defined for
    /// `1 <= n < len() - 1`.
    pub fn rec_b(&self, n: usize) -> &T {
        &self.rec_b[n - 1]
    }
}

/// Power moments `m_k = sum_x w(x) pi_x^k` for `k = 0 .. count-1`.
fn power_moments<T: Scalar>(grid: &NodeGrid<T>, count: usize) -> Vec<T> {
    let mut moments = vec![T::zero(); count];
    for (node, weight) in grid.nodes.iter().zip(&grid.weights) {
        let mut pw = T::one();
        for m in moments.iter_mut() {
            *m = m.clone() + weight.clone() * pw.clone();
            pw = pw * node.clone();
        }
    }
    moments
}

/// Inner product of two polynomials through the moment functional:
/// `<f, g> = sum_{i,j} f_i g_j m_{i+j}`.
fn moment_inner<T: Scalar>(f: &Poly<T>, g: &Poly<T>, moments: &[T]) -> T {
    let mut acc = T::zero();
    for (i, fi) in f.coeffs().iter().enumerate() {
        for (j, gj) in g.coeffs().iter().enumerate() {
            acc = acc + fi.clone() * gj.clone() * moments[i + j].clone();
        }
    }
    acc
}

/// Inner product evaluated directly on the grid:
/// `<f, g> = sum_x w(x) f(pi_x) g(pi_x)`.
pub fn grid_inner<T: Scalar>(grid: &NodeGrid<T>, f: &Poly<T>, g: &Poly<T>) -> T {
    let mut acc = T::zero();
    for (node, weight) in grid.nodes.iter().zip(&grid.weights) {
        acc = acc + weight.clone() * f.eval(node) * g.eval(node);
    }
    acc
}

/// Builds the monic orthogonal polynomial system of the grid measure by the
/// three-term recurrence, with inner products computed from power moments.
///
/// Produces all degrees `0 ..= K` where `K + 1` is the node count. Fails with
/// `DegenerateWeight` when some squared norm vanishes, which for a moment
/// functional is exactly a vanishing leading principal minor of the Hankel
/// moment matrix.
pub fn build_ops<T: Scalar>(grid: &NodeGrid<T>) -> Result<OPSystem<T>> {
    assert!(!grid.is_empty(), "empty grid");
    let top = grid.len() - 1;
    let moments = power_moments(grid, 2 * top + 1);

    let mut polys = vec![Poly::one()];
    let mut norms = vec![moments[0].clone()];
    let mut rec_a = Vec::new();
    let mut rec_b = Vec::new();
    if norms[0].is_zero() {
        return Err(CoreError::DegenerateWeight(0));
    }

    for n in 0..top {
        let pn = polys[n].clone();
        let cn = norms[n].clone();
        let zpn = Poly::var() * pn.clone();
        let a_n = moment_inner(&zpn, &pn, &moments) / cn.clone();
        let mut next = (Poly::var() - Poly::constant(a_n.clone())) * pn;
        let b_n = if n > 0 {
            let b = cn / norms[n - 1].clone();
            next = next - polys[n - 1].clone().scale(&b);
            b
        } else {
            T::zero()
        };
        let c_next = moment_inner(&next, &next, &moments);
        if c_next.is_zero() {
            return Err(CoreError::DegenerateWeight(n + 1));
        }
        rec_a.push(a_n);
        if n > 0 {
            rec_b.push(b_n);
        }
        polys.push(next);
        norms.push(c_next);
    }

    Ok(OPSystem {
        polys,
        norms,
        rec_a,
        rec_b,
    })
}

/// Test oracle: classical Gram-Schmidt on the monomial basis with grid-sum
/// inner products. Returns the monic polynomials with their squared norms.
pub fn gram_schmidt<T: Scalar>(grid: &NodeGrid<T>) -> Result<Vec<(Poly<T>, T)>> {
    assert!(!grid.is_empty(), "empty grid");
    let top = grid.len() - 1;
    let mut out: Vec<(Poly<T>, T)> = Vec::new();
    for n in 0..=top {
        let mut p = Poly::monomial(T::one(), n);
        for (q, cq) in &out {
            let coef = grid_inner(grid, &p, q) / cq.clone();
            p = p - q.clone().scale(&coef);
        }
        let c = grid_inner(grid, &p, &p);
        if c.is_zero() {
            return Err(CoreError::DegenerateWeight(n));
        }
        out.push((p, c));
    }
    Ok(out)
}

/// The conjugated Christoffel-Darboux kernel
/// `Kt(x, y) = w(x) sum_{i<N} P_i(pi_x) P_i(pi_y) / c_i`.
///
/// This differs from the symmetric kernel `sqrt(w(x) w(y)) sum ...` by the
/// diagonal similarity `diag(sqrt(w))`, which leaves every principal minor of
/// `I - K` unchanged; storing the conjugated form keeps all entries in the
/// base field even when the `sqrt(w(x))` are irrational.
pub fn cd_kernel<T: Scalar>(
    ops: &OPSystem<T>,
    grid: &NodeGrid<T>,
    big_n: usize,
    x: usize,
    y: usize,
) -> Result<T> {
    let top = grid.len() - 1;
    if x > top {
        return Err(CoreError::IndexOutOfRange(x, top));
    }
    if y > top {
        return Err(CoreError::IndexOutOfRange(y, top));
    }
    assert!(big_n <= ops.len(), "rank exceeds available polynomials");
    let px = &grid.nodes[x];
    let py = &grid.nodes[y];
    let mut acc = T::zero();
    for i in 0..big_n {
        let pi = ops.poly(i);
        acc = acc + pi.eval(px) * pi.eval(py) / ops.norm(i).clone();
    }
    Ok(grid.weights[x].clone() * acc)
}

/// Truncated infinite q-Pochhammer `(y; q)_inf` to roughly `prec` bits.
///
/// Factors are multiplied until `|y| q^J < 2^{-(prec+16)} (1 - q)`; the
/// remaining tail multiplies the product by `1 + eps` with
/// `|eps| <= 2 |y| q^J / (1 - q) < 2^{-(prec+15)}`, so the truncation error
/// sits well below the working precision of `prec + 32` bits.
pub fn qpochhammer_infinite(
    y: &BigRational,
    q: &BigRational,
    prec: u32,
) -> Result<BigFloat> {
    if !(q.is_positive() && *q < rat(1, 1)) {
        return Err(CoreError::NonConvergent(format!(
            "q = {q} outside (0,1)"
        )));
    }
    let wp = prec + 32;
    let threshold =
        (rat(1, 1) - q.clone()) / rat(2, 1).pow_i(i64::from(prec) + 16);
    let mut product = BigFloat::one();
    let mut term = y.clone();
    while term.abs() >= threshold {
        let factor = BigFloat::from_rat(&(rat(1, 1) - term.clone()), wp);
        product = product.mul(&factor, wp);
        if product.is_zero() {
            return Ok(product);
        }
        term *= q;
    }
    Ok(product)
}

/// The closed-form squared norm `c_n` of the monic grid orthogonal
/// polynomials, evaluated to `prec` bits.
///
/// The value combines four infinite q-Pochhammer quotients with exact
/// rational finite parts:
///
/// ```text
/// (g d q^2, g/(a b), d/a, 1/b; q)_inf     (1 - a b q) (g d q)^n
/// -----------------------------------  *  ---------------------
/// (g d q/a, g q/b, d q, 1/(a b q); q)_inf  1 - a b q^{2n+1}
///
///    (q, a q, b q, g q, b d q, a q/d, a b q/g; q)_n
///  * ----------------------------------------------
///    (a b q; q)_{2n} (a b q^{n+1}; q)_n
/// ```
///
/// The last quotient is the unit-normalization norm factor
/// `(q, b q, a q/d, a b q/g; q)_n / (a b q, a q, b d q, g q; q)_n`
/// divided by the squared leading coefficient
/// `k_n = (a b q^{n+1}; q)_n / (a q, b d q, g q; q)_n`, which converts the
/// classical normalization to the monic one used everywhere in this crate.
///
/// Requires `delta > 0`; the `a q/d` factor has no meaning on the q-Hahn
/// face.
pub fn cn_closed_form(raw: &RawParams, n: usize, prec: u32) -> Result<BigFloat> {
    let q = &raw.q;
    if !(q.is_positive() && *q < rat(1, 1)) {
        return Err(CoreError::NonConvergent(format!(
            "q = {q} outside (0,1)"
        )));
    }
    if !raw.delta.is_positive() {
        return Err(CoreError::InvalidParams(
            "closed-form c_n requires delta > 0".into(),
        ));
    }
    let wp = prec + 32;
    let (a, b, d) = (&raw.alpha, &raw.beta, &raw.delta);
    let g = raw.gamma();

    let inf_num = [
        g.clone() * d * q * q,
        g.clone() / (a * b),
        d / a,
        rat(1, 1) / b,
    ];
    let inf_den = [
        g.clone() * d * q / a,
        g.clone() * q / b,
        d * q,
        rat(1, 1) / (a * b * q),
    ];
    let mut value = BigFloat::one();
    for y in &inf_num {
        value = value.mul(&qpochhammer_infinite(y, q, wp)?, wp);
    }
    for y in &inf_den {
        value = value.div(&qpochhammer_infinite(y, q, wp)?, wp);
    }

    let gdq = g.clone() * d * q;
    let abq = a * b * q;
    let ni = n as i64;
    let mut finite = (rat(1, 1) - abq.clone()) * gdq.pow_i(ni)
        / (rat(1, 1) - abq.clone() * q.pow_i(2 * ni));
    let fin_num = [
        q.clone(),
        a * q,
        b * q,
        g.clone() * q,
        b * d * q,
        a * q / d,
        a * b * q / g,
    ];
    for y in &fin_num {
        finite *= qpochhammer(y, q, n);
    }
    finite /= qpochhammer(&abq, q, 2 * n);
    let shifted = a * b * q.pow_i(ni + 1);
    finite /= qpochhammer(&shifted, q, n);

    Ok(value.mul(&BigFloat::from_rat(&finite, wp), wp).round_to(prec))
}
