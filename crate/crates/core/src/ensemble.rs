//! The q-Racah weight on a q-quadratic lattice and its parameter bookkeeping.
//!
//! The ensemble lives on nodes `pi_x = sigma(q^{-x})` for `x = 0..=M`, where
//! `sigma(z) = z + u2/(q z)` and `u2 = gamma*delta*q^2` with
//! `gamma = q^{-M-1}`. The weight is a ratio of q-Pochhammer products; at
//! `delta = 0` it degenerates to the q-Hahn weight. This module also carries
//! the factor pair `Phi+` and `Phi-` (the coefficients of the weight's
//! first-order q-difference equation) and the map from hexagon-tiling slices
//! to ensemble parameters.

use crate::error::{CoreError, Result};
use crate::scalar::{rat_int, QuadExt, Scalar};
use num::rational::BigRational;
use num::Signed;

/// Finite q-Pochhammer symbol `(y; q)_k = (1-y)(1-yq)...(1-yq^{k-1})`.
pub fn qpochhammer<T: Scalar>(y: &T, q: &T, k: usize) -> T {
    let mut acc = T::one();
    let mut factor = y.clone();
    for _ in 0..k {
        acc = acc * (T::one() - factor.clone());
        factor = factor * q.clone();
    }
    acc
}

/// Raw rational parameter bundle, the form read from config files.
#[derive(Debug, Clone, PartialEq)]
pub struct RawParams {
    pub q: BigRational,
    pub alpha: BigRational,
    pub beta: BigRational,
    pub delta: BigRational,
    pub big_m: usize,
    pub big_n: usize,
}

impl RawParams {
    pub fn gamma(&self) -> BigRational {
        rational_pow(&self.q, -(self.big_m as i64) - 1)
    }

    pub fn u2(&self) -> BigRational {
        self.gamma() * &self.delta * &self.q * &self.q
    }

    /// Reports every violated inequality of the sufficient positivity
    /// assumption. An empty list means the standard parameter region.
    ///
    /// Tiling slices can step slightly outside this region (for example
    /// `beta*delta = 1`) while every weight stays positive, so construction
    /// enforces structural constraints plus direct positivity instead of
    /// this list; see [`Params::new`].
    pub fn validate_assumption(&self) -> Vec<String> {
        let mut violations = Vec::new();
        let one = rat_int(1);
        let gamma = self.gamma();
        if self.big_m + 1 < self.big_n {
            violations.push("M >= N-1".to_string());
        }
        if self.big_n < 1 {
            violations.push("N >= 1".to_string());
        }
        if !(self.q > rat_int(0) && self.q < one) {
            violations.push("0 < q < 1".to_string());
        }
        if !self.alpha.is_positive() {
            violations.push("alpha > 0".to_string());
        }
        if !self.beta.is_positive() {
            violations.push("beta > 0".to_string());
        }
        if self.delta.is_negative() {
            violations.push("delta >= 0".to_string());
        }
        if &self.beta * &self.delta >= one {
            violations.push("beta*delta < 1".to_string());
        }
        if self.beta < gamma {
            violations.push("beta >= gamma".to_string());
        }
        if self.alpha < gamma {
            violations.push("alpha >= gamma".to_string());
        }
        let gdq = gamma * &self.delta * &self.q;
        if gdq.is_negative() || gdq >= one {
            violations.push("gamma*delta*q in [0,1)".to_string());
        }
        violations
    }
}

/// A finite weighted grid: the support `pi_0 < pi_1 < ... < pi_M` of the
/// ensemble together with the weight of each node.
///
/// Orthogonal polynomials, kernels, and determinants downstream only ever see
/// this data, so artificial grids (for degenerate-input tests) can be built
/// directly.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeGrid<T: Scalar> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> NodeGrid<T> {
    /// Number of nodes, `M + 1` for an ensemble grid.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Ensemble parameters embedded into a working field `T`.
#[derive(Debug, Clone)]
pub struct Params<T: Scalar> {
    pub q: T,
    pub alpha: T,
    pub beta: T,
    pub delta: T,
    pub gamma: T,
    pub u2: T,
    /// A square root of `u2` inside `T`, when one exists there.
    pub u: Option<T>,
    pub big_m: usize,
    pub big_n: usize,
}

fn rational_pow(base: &BigRational, e: i64) -> BigRational {
    Scalar::pow_i(base, e)
}

impl<T: Scalar> Params<T> {
    /// Builds and checks parameters.
    ///
    /// Structural requirements (violations are errors): `0 < q < 1`,
    /// `N >= 1`, `M >= N-1`, `alpha, beta > 0`, `delta >= 0`,
    /// `gamma*delta*q in [0,1)`, and all weights strictly positive. The
    /// stricter textbook inequalities are reported by
    /// [`RawParams::validate_assumption`] but not enforced, because
    /// admissible tiling slices may sit on their boundary.
    pub fn new(raw: &RawParams) -> Result<Self> {
        let one = rat_int(1);
        let mut hard = Vec::new();
        if !(raw.q > rat_int(0) && raw.q < one) {
            hard.push("0 < q < 1");
        }
        if raw.big_n < 1 {
            hard.push("N >= 1");
        }
        if raw.big_m + 1 < raw.big_n {
            hard.push("M >= N-1");
        }
        if !raw.alpha.is_positive() {
            hard.push("alpha > 0");
        }
        if !raw.beta.is_positive() {
            hard.push("beta > 0");
        }
        if raw.delta.is_negative() {
            hard.push("delta >= 0");
        }
        let gdq = raw.gamma() * &raw.delta * &raw.q;
        if gdq.is_negative() || gdq >= one {
            hard.push("gamma*delta*q in [0,1)");
        }
        if !hard.is_empty() {
            return Err(CoreError::InvalidParams(hard.join(", ")));
        }
        let u2 = raw.u2();
        let params = Self {
            q: T::from_rat(&raw.q),
            alpha: T::from_rat(&raw.alpha),
            beta: T::from_rat(&raw.beta),
            delta: T::from_rat(&raw.delta),
            gamma: T::from_rat(&raw.gamma()),
            u: T::from_rat(&u2).try_sqrt(),
            u2: T::from_rat(&u2),
            big_m: raw.big_m,
            big_n: raw.big_n,
        };
        for x in 0..=params.big_m {
            let w = params.weight(x);
            let wr = w.to_rat();
            if matches!(wr, Some(r) if !r.is_positive()) {
                return Err(CoreError::InvalidParams(format!(
                    "weight({x}) is not positive"
                )));
            }
        }
        Ok(params)
    }

    /// The square root of `u2`; panics when the field does not contain one.
    /// Use [`Params::new_extended`] to adjoin it.
    pub fn u(&self) -> &T {
        self.u
            .as_ref()
            .expect("u = sqrt(u2) is not in the working field")
    }

    /// Node `pi_x = q^{-x} + gamma*delta*q^{x+1}`, equal to `sigma(q^{-x})`.
    pub fn node(&self, x: usize) -> T {
        let xi = x as i64;
        self.q.pow_i(-xi)
            + self.gamma.clone() * self.delta.clone() * self.q.pow_i(xi + 1)
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..=self.big_m).map(|x| self.node(x)).collect()
    }

    /// The lattice map `sigma(z) = z + u2/(q z)`.
    pub fn sigma(&self, z: &T) -> Result<T> {
        let zinv = z.checked_inv().ok_or(CoreError::ZeroArgument)?;
        Ok(z.clone() + self.u2.clone() * zinv / self.q.clone())
    }

    /// The q-Racah weight at node `x`; at `delta = 0` this expression
    /// degenerates to the q-Hahn weight automatically.
    pub fn weight(&self, x: usize) -> T {
        assert!(x <= self.big_m, "node index out of range");
        let (q, a, b, g, d) = (
            &self.q,
            &self.alpha,
            &self.beta,
            &self.gamma,
            &self.delta,
        );
        let poch = |y: T| qpochhammer(&y, q, x);
        let num = poch(a.clone() * q.clone())
            * poch(b.clone() * d.clone() * q.clone())
            * poch(g.clone() * q.clone())
            * poch(g.clone() * d.clone() * q.clone());
        let den = poch(q.clone())
            * poch(g.clone() * d.clone() * q.clone() / a.clone())
            * poch(g.clone() * q.clone() / b.clone())
            * poch(d.clone() * q.clone());
        let gdq = g.clone() * d.clone() * q.clone();
        let bracket = (T::one() - gdq.clone() * q.pow_i(2 * x as i64))
            / (T::one() - gdq);
        let scale = (a.clone() * b.clone() * q.clone()).pow_i(x as i64);
        num / den * bracket / scale
    }

    pub fn weights(&self) -> Vec<T> {
        (0..=self.big_m).map(|x| self.weight(x)).collect()
    }

    /// The full support of the measure: nodes with their weights.
    pub fn grid(&self) -> NodeGrid<T> {
        NodeGrid {
            nodes: self.nodes(),
            weights: self.weights(),
        }
    }

    /// The q-Hahn weight `(alpha q, q^{-M}; q)_x / ((q, beta^{-1} q^{-M}; q)_x
    /// (alpha beta q)^x)`, the `delta = 0` face of the q-Racah weight.
    pub fn qhahn_weight(&self, x: usize) -> T {
        assert!(x <= self.big_m, "node index out of range");
        let q = &self.q;
        let qm = q.pow_i(-(self.big_m as i64));
        let poch = |y: T| qpochhammer(&y, q, x);
        let num = poch(self.alpha.clone() * q.clone()) * poch(qm.clone());
        let den = poch(q.clone())
            * poch(qm / self.beta.clone())
            * (self.alpha.clone() * self.beta.clone() * q.clone()).pow_i(x as i64);
        num / den
    }

    /// `Phi+(z) = (z - alpha q)(z - beta delta q)(z - gamma q)(z - gamma delta q)`.
    pub fn phi_plus(&self, z: &T) -> T {
        let q = &self.q;
        let roots = [
            self.alpha.clone() * q.clone(),
            self.beta.clone() * self.delta.clone() * q.clone(),
            self.gamma.clone() * q.clone(),
            self.gamma.clone() * self.delta.clone() * q.clone(),
        ];
        roots
            .into_iter()
            .fold(T::one(), |acc, r| acc * (z.clone() - r))
    }

    /// `Phi-(z) = alpha beta (z - gamma delta q / alpha)(z - gamma q / beta)
    /// (z - delta q)(z - q)`.
    pub fn phi_minus(&self, z: &T) -> T {
        let q = &self.q;
        let roots = [
            self.gamma.clone() * self.delta.clone() * q.clone() / self.alpha.clone(),
            self.gamma.clone() * q.clone() / self.beta.clone(),
            self.delta.clone() * q.clone(),
            q.clone(),
        ];
        let prod = roots
            .into_iter()
            .fold(T::one(), |acc, r| acc * (z.clone() - r));
        self.alpha.clone() * self.beta.clone() * prod
    }

    /// Closed form for `weight(x+1)/weight(x)`:
    /// `Phi+(q^{-x}) (q^{-2x} - q u2) / (q Phi-(q^{-x}) (q^{-2x} - u2/q))`.
    pub fn weight_ratio_closed(&self, x: usize) -> T {
        let xi = x as i64;
        let qx = self.q.pow_i(-xi);
        let q2x = self.q.pow_i(-2 * xi);
        let num = self.phi_plus(&qx) * (q2x.clone() - self.q.clone() * self.u2.clone());
        let den = self.q.clone()
            * self.phi_minus(&qx)
            * (q2x - self.u2.clone() / self.q.clone());
        num / den
    }

    /// Root data `z1..z6` of the connection matrix at gap endpoint `s`:
    /// `z1 = z2 = q^{-s+1}, z3 = q, z4 = alpha q, z5 = delta q, z6 = beta delta q`.
    pub fn z_params(&self, s: i64) -> [T; 6] {
        let z12 = self.q.pow_i(-s + 1);
        [
            z12.clone(),
            z12,
            self.q.clone(),
            self.alpha.clone() * self.q.clone(),
            self.delta.clone() * self.q.clone(),
            self.beta.clone() * self.delta.clone() * self.q.clone(),
        ]
    }
}

impl Params<QuadExt<BigRational>> {
    /// Like [`Params::new`] over `Q(u)`: when `u2` is not a rational square
    /// the square root is adjoined as the field generator.
    pub fn new_extended(raw: &RawParams) -> Result<Self> {
        let mut params = Self::new(raw)?;
        if params.u.is_none() {
            params.u = Some(QuadExt::generator(raw.u2()));
        }
        Ok(params)
    }
}

/// Ensemble parameters describing one vertical slice of a random tiling,
/// plus the coordinate shift between tiling particles and ensemble nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceEnsemble {
    pub raw: RawParams,
    /// Particle position `x` corresponds to ensemble node `x - shift`.
    pub shift: i64,
    /// Which of the four parameter branches applied (1-based).
    pub branch: u8,
}

/// Maps a vertical slice `t` of the hexagon with sides `a, b, c` (weighted by
/// `q` and `kappa^2`) to ensemble parameters with `N = a`, `T = b+c`, `S = c`.
///
/// The four branches overlap at slice boundaries; they are tried in order and
/// the first applicable one wins, which the slice-marginal tests confirm to
/// be consistent.
pub fn tiling_to_ensemble(
    a: usize,
    b: usize,
    c: usize,
    t: usize,
    kappa2: &BigRational,
    q: &BigRational,
) -> Result<SliceEnsemble> {
    if a < 1 || b < 1 || c < 1 {
        return Err(CoreError::NoCaseApplies(
            "hexagon sides must be positive".into(),
        ));
    }
    let n = a as i64;
    let big_t = (b + c) as i64;
    let s = c as i64;
    let t = t as i64;
    if t < 0 || t > big_t {
        return Err(CoreError::NoCaseApplies(format!(
            "slice t = {t} outside 0..={big_t}"
        )));
    }
    if kappa2.is_negative() || *kappa2 >= rational_pow(q, big_t - 1) {
        return Err(CoreError::NoCaseApplies(
            "kappa^2 outside [0, q^(T-1))".into(),
        ));
    }
    let qp = |e: i64| rational_pow(q, e);
    let (branch, alpha, beta, delta, big_m, shift): (u8, _, _, _, i64, i64) =
        if t < s && t < big_t - s {
            (
                1,
                qp(-s - n),
                qp(s - big_t - n),
                kappa2 * qp(-s + n),
                t + n - 1,
                0,
            )
        } else if s - 1 < t && t < big_t - s + 1 {
            (
                2,
                qp(-t - n),
                qp(t - big_t - n),
                kappa2 * qp(-t + n),
                s + n - 1,
                0,
            )
        } else if big_t - s - 1 < t && t < s {
            (
                3,
                qp(-big_t - n + t),
                qp(-t - n),
                kappa2 * qp(-big_t + t + n),
                big_t - s + n - 1,
                t + s - big_t,
            )
        } else if s - 1 < t && big_t - s - 1 < t {
            (
                4,
                qp(-big_t - n + s),
                qp(-s - n),
                kappa2 * qp(-big_t + s + n),
                big_t - t + n - 1,
                t + s - big_t,
            )
        } else {
            return Err(CoreError::NoCaseApplies(format!(
                "no branch covers t = {t} with S = {s}, T = {big_t}"
            )));
        };
    let raw = RawParams {
        q: q.clone(),
        alpha,
        beta,
        delta,
        big_m: big_m as usize,
        big_n: n as usize,
    };
    Ok(SliceEnsemble { raw, shift, branch })
}

/// The standard small test parameter set with rational `u = 1/8`:
/// `q = 1/4, M = 3, N = 2, alpha = beta = 256, delta = 1/1024`.
pub fn raw_params_p0() -> RawParams {
    RawParams {
        q: crate::scalar::rat(1, 4),
        alpha: rat_int(256),
        beta: rat_int(256),
        delta: crate::scalar::rat(1, 1024),
        big_m: 3,
        big_n: 2,
    }
}

/// The standard test parameter set with irrational `u` (`u2 = 1/8`):
/// `q = 1/2, M = 4, N = 2, alpha = beta = 32, delta = 1/64`.
pub fn raw_params_p1() -> RawParams {
    RawParams {
        q: crate::scalar::rat(1, 2),
        alpha: rat_int(32),
        beta: rat_int(32),
        delta: crate::scalar::rat(1, 64),
        big_m: 4,
        big_n: 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use crate::scalar::{rat, Ring};

    type QR = QuadExt<BigRational>;

    fn p0() -> Params<BigRational> {
        Params::new(&raw_params_p0()).unwrap()
    }

    fn p1() -> Params<QR> {
        Params::new_extended(&raw_params_p1()).unwrap()
    }

    #[test]
    fn qpochhammer_examples() {
        let q = rat(1, 2);
        assert_eq!(qpochhammer(&rat_int(5), &q, 0), rat_int(1));
        assert_eq!(qpochhammer(&q.clone(), &q, 2), rat(3, 8));
        let q4 = rat(1, 4);
        assert_eq!(qpochhammer(&(rat_int(256) * &q4), &q4, 1), rat_int(-63));
    }

    #[test]
    fn p0_derived_quantities() {
        let p = p0();
        assert_eq!(p.gamma, rat_int(256));
        assert_eq!(p.u2, rat(1, 64));
        assert_eq!(p.u, Some(rat(1, 8)));
        assert_eq!(
            p.nodes(),
            vec![
                rat(17, 16),
                rat(257, 64),
                rat(4097, 256),
                rat(65537, 1024)
            ]
        );
    }

    #[test]
    fn p1_extends_the_field() {
        let p = p1();
        assert_eq!(p.u2.to_rat(), Some(rat(1, 8)));
        let u = p.u().clone();
        assert_eq!(u.clone() * u, p.u2);
    }

    #[test]
    fn sigma_substitution_example() {
        let p = p0();
        assert_eq!(p.sigma(&rat_int(1)).unwrap(), rat(17, 16));
        assert!(matches!(
            p.sigma(&rat_int(0)),
            Err(CoreError::ZeroArgument)
        ));
    }

    #[test]
    fn sigma_functional_identities() {
        let p = p0();
        let mut rng = SplitMix64::new(0x51C);
        for _ in 0..10 {
            let z = rng.nonzero_rational(40, 12);
            let y = rng.nonzero_rational(40, 12);
            // sigma(u2/z) = sigma(z/q)
            let lhs = p.sigma(&(p.u2.clone() / z.clone())).unwrap();
            let rhs = p.sigma(&(z.clone() / p.q.clone())).unwrap();
            assert_eq!(lhs, rhs);
            // sigma(z) - sigma(y) = (z - y)(1 - u2/(y z q))
            if z != y {
                let diff = p.sigma(&z).unwrap() - p.sigma(&y).unwrap();
                let closed = (z.clone() - y.clone())
                    * (rat_int(1) - p.u2.clone() / (y * z * p.q.clone()));
                assert_eq!(diff, closed);
            }
        }
    }

    #[test]
    fn weight_basics() {
        let p = p0();
        assert_eq!(p.weight(0), rat_int(1));
        for w in p.weights() {
            assert!(w.is_positive());
        }
        let p1 = p1();
        assert_eq!(p1.weight(0), QR::one());
    }

    #[test]
    fn weight_ratio_matches_difference_equation() {
        let p = p0();
        for x in 0..p.big_m {
            let direct = p.weight(x + 1) / p.weight(x);
            assert_eq!(direct, p.weight_ratio_closed(x));
        }
        let p = p1();
        for x in 0..p.big_m {
            let direct = p.weight(x + 1) / p.weight(x);
            assert_eq!(direct, p.weight_ratio_closed(x));
        }
    }

    #[test]
    fn nodes_strictly_increase() {
        let nodes = p0().nodes();
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn phi_factor_properties() {
        let p = p0();
        let aq = p.alpha.clone() * p.q.clone();
        assert_eq!(p.phi_plus(&aq), rat_int(0));
        let mut rng = SplitMix64::new(0xF1F0);
        for _ in 0..10 {
            let z = rng.nonzero_rational(30, 10);
            let uz = p.u2.clone() / z.clone();
            if p.phi_minus(&uz).is_zero() || p.phi_plus(&z).is_zero() {
                continue;
            }
            // Phi+(u2/z)/Phi-(u2/z) = Phi-(z)/Phi+(z)
            let lhs = p.phi_plus(&uz) / p.phi_minus(&uz);
            let rhs = p.phi_minus(&z) / p.phi_plus(&z);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn phi_factors_in_z_parameters() {
        // Phi+ roots are z4, z6, u2/z3, u2/z5; Phi- roots are u2/z4, u2/z6,
        // z3, z5, scaled by alpha*beta = z4 z6/(z3 z5).
        let p = p0();
        let [_, _, z3, z4, z5, z6] = p.z_params(2);
        let mut rng = SplitMix64::new(0xAB);
        for _ in 0..10 {
            let z = rng.nonzero_rational(30, 7);
            let prod = |roots: &[BigRational]| {
                roots
                    .iter()
                    .fold(rat_int(1), |acc, r| acc * (z.clone() - r))
            };
            let u2 = &p.u2;
            let plus = prod(&[
                z4.clone(),
                z6.clone(),
                u2 / z3.clone(),
                u2 / z5.clone(),
            ]);
            let minus = (z4.clone() * &z6 / (z3.clone() * &z5))
                * prod(&[u2 / z4.clone(), u2 / z6.clone(), z3.clone(), z5.clone()]);
            assert_eq!(p.phi_plus(&z), plus);
            assert_eq!(p.phi_minus(&z), minus);
        }
    }

    #[test]
    fn validation_reports() {
        assert!(raw_params_p0().validate_assumption().is_empty());
        let mut bad_delta = raw_params_p0();
        bad_delta.delta = rat_int(1);
        let v = bad_delta.validate_assumption();
        assert!(v.contains(&"beta*delta < 1".to_string()));
        let mut bad_n = raw_params_p0();
        bad_n.big_n = 5;
        let v = bad_n.validate_assumption();
        assert!(v.contains(&"M >= N-1".to_string()));
        assert!(Params::<BigRational>::new(&bad_n).is_err());
    }

    #[test]
    fn qhahn_weight_matches_at_delta_zero() {
        let mut raw = raw_params_p0();
        raw.delta = rat_int(0);
        let p = Params::<BigRational>::new(&raw).unwrap();
        for x in 0..=p.big_m {
            assert_eq!(p.weight(x), p.qhahn_weight(x));
        }
    }

    #[test]
    fn tiling_map_branch_two_example() {
        let se =
            tiling_to_ensemble(2, 3, 3, 3, &rat(1, 4096), &rat(1, 4)).unwrap();
        assert_eq!(se.branch, 2);
        assert_eq!(se.shift, 0);
        assert_eq!(se.raw.alpha, rat_int(1024));
        assert_eq!(se.raw.beta, rat_int(1024));
        assert_eq!(se.raw.big_m, 4);
        assert_eq!(se.raw.big_n, 2);
        assert_eq!(se.raw.delta, rat(1, 1024));
        assert_eq!(se.raw.gamma(), rat_int(1024));
        // Positivity holds even though beta*delta = 1 sits on the boundary
        // of the sufficient assumption.
        assert!(Params::<BigRational>::new(&se.raw).is_ok());
        assert!(se
            .raw
            .validate_assumption()
            .contains(&"beta*delta < 1".to_string()));
    }

    #[test]
    fn tiling_map_branch_one_example() {
        // t = 0 < S with kappa = 0 lands in branch 1 with M = N - 1.
        let se = tiling_to_ensemble(2, 3, 3, 0, &rat_int(0), &rat(1, 4)).unwrap();
        assert_eq!(se.branch, 1);
        assert_eq!(se.raw.big_m, se.raw.big_n - 1);
        assert_eq!(se.raw.alpha, rational_pow(&rat(1, 4), -5));
        assert_eq!(se.raw.beta, rational_pow(&rat(1, 4), 3 - 6 - 2));
        assert_eq!(se.raw.gamma(), rational_pow(&rat(1, 4), -2));
    }

    #[test]
    fn tiling_map_gamma_consistency_grid() {
        // gamma = q^{-M-1} must hold for every branch over a small grid.
        let q = rat(1, 3);
        for a in 1..=4usize {
            for b in 1..=4usize {
                for c in 1..=4usize {
                    let big_t = b + c;
                    let kappa2 = rational_pow(&q, big_t as i64 + 1);
                    for t in 0..=big_t {
                        let se = tiling_to_ensemble(a, b, c, t, &kappa2, &q)
                            .unwrap_or_else(|e| {
                                panic!("(a,b,c,t)=({a},{b},{c},{t}): {e}")
                            });
                        assert_eq!(
                            se.raw.gamma(),
                            rational_pow(&q, -(se.raw.big_m as i64) - 1)
                        );
                        assert!(
                            Params::<BigRational>::new(&se.raw).is_ok(),
                            "(a,b,c,t)=({a},{b},{c},{t}) invalid"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn tiling_map_rejects_bad_kappa() {
        let q = rat(1, 4);
        let too_big = rational_pow(&q, 4); // T = 6 needs kappa2 < q^5
        assert!(matches!(
            tiling_to_ensemble(2, 3, 3, 2, &too_big, &q),
            Err(CoreError::NoCaseApplies(_))
        ));
    }
}
