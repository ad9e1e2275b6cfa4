//! Integer Picard-lattice machinery for the two rational surface families
//! behind the gap recurrences.
//!
//! Both families live on a rank 10 lattice spanned by two hyperplane
//! classes and eight exceptional classes. The module provides the
//! intersection form, affine root data of types E7 and E6 together with
//! Weyl reflections and word actions, the order three symmetry of the E6
//! family, root variables as formal Laurent monomials in the connection
//! parameters, and the rank 11 basis changes that identify the blown up
//! coordinate surface of the invariant chart with the model surface of
//! the discrete flows.

use crate::ensemble::Params;
use crate::error::{CoreError, Result};
use crate::scalar::{rat_int, Ring, Scalar};

use num::rational::BigRational;

/// Rank of the common Picard lattice of the symmetry analysis.
pub const RANK: usize = 10;

/// Divisor class in the basis `(H_f, H_g, F_1..F_8)`.
///
/// `H_f` and `H_g` are the two ruling classes of a blown up product of
/// projective lines carrying the flow coordinates, `F_1..F_8` the
/// exceptional classes of the eight base points.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PicardClass(pub [i64; RANK]);

impl PicardClass {
    /// The zero class.
    pub const fn zero() -> Self {
        PicardClass([0; RANK])
    }

    /// First ruling class `H_f`.
    pub const fn h_f() -> Self {
        let mut v = [0; RANK];
        v[0] = 1;
        PicardClass(v)
    }

    /// Second ruling class `H_g`.
    pub const fn h_g() -> Self {
        let mut v = [0; RANK];
        v[1] = 1;
        PicardClass(v)
    }

    /// Exceptional class `F_i`, `i` in `1..=8`.
    pub fn exceptional(i: usize) -> Self {
        assert!((1..=8).contains(&i), "exceptional index {i} outside 1..=8");
        let mut v = [0; RANK];
        v[1 + i] = 1;
        PicardClass(v)
    }

    /// Integer multiple of the class.
    pub fn scale(&self, k: i64) -> Self {
        let mut v = self.0;
        for x in &mut v {
            *x *= k;
        }
        PicardClass(v)
    }
}

impl std::ops::Add for PicardClass {
    type Output = PicardClass;
    fn add(self, rhs: PicardClass) -> PicardClass {
        let mut v = self.0;
        for (x, y) in v.iter_mut().zip(rhs.0) {
            *x += y;
        }
        PicardClass(v)
    }
}

impl std::ops::Sub for PicardClass {
    type Output = PicardClass;
    fn sub(self, rhs: PicardClass) -> PicardClass {
        let mut v = self.0;
        for (x, y) in v.iter_mut().zip(rhs.0) {
            *x -= y;
        }
        PicardClass(v)
    }
}

impl std::ops::Neg for PicardClass {
    type Output = PicardClass;
    fn neg(self) -> PicardClass {
        self.scale(-1)
    }
}

/// Intersection pairing: `H_f.H_g = 1`, `H_f^2 = H_g^2 = 0`,
/// `F_i.F_j = -1` for `i = j` and `0` otherwise, rulings orthogonal to
/// the exceptional classes.
pub fn pair(a: &PicardClass, b: &PicardClass) -> i64 {
    let mut out = a.0[0] * b.0[1] + a.0[1] * b.0[0];
    for i in 2..RANK {
        out -= a.0[i] * b.0[i];
    }
    out
}

/// Linear map on the lattice, stored as a matrix over the class basis.
///
/// Column `j` holds the image of the `j`-th basis class, so maps act on
/// coordinate columns and composition is the matrix product.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct LatticeMap(pub [[i64; RANK]; RANK]);

impl LatticeMap {
    /// The identity map.
    pub fn identity() -> Self {
        let mut m = [[0; RANK]; RANK];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        LatticeMap(m)
    }

    /// Map sending the `j`-th basis class to `images[j]`.
    pub fn from_images(images: &[PicardClass; RANK]) -> Self {
        let mut m = [[0; RANK]; RANK];
        for (j, c) in images.iter().enumerate() {
            for i in 0..RANK {
                m[i][j] = c.0[i];
            }
        }
        LatticeMap(m)
    }

    /// Image of a class.
    pub fn apply(&self, c: &PicardClass) -> PicardClass {
        let mut v = [0; RANK];
        for (i, row) in self.0.iter().enumerate() {
            v[i] = row.iter().zip(c.0).map(|(m, x)| m * x).sum();
        }
        PicardClass(v)
    }

    /// Composition `self` after `other`.
    pub fn compose(&self, other: &LatticeMap) -> LatticeMap {
        let mut m = [[0; RANK]; RANK];
        for i in 0..RANK {
            for j in 0..RANK {
                m[i][j] = (0..RANK).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        LatticeMap(m)
    }

    /// Reflection `c -> c + (root.c) root` in a class of self-pairing `-2`.
    pub fn reflection(root: &PicardClass) -> Self {
        assert_eq!(pair(root, root), -2, "reflections need a -2 class");
        let mut images = [PicardClass::zero(); RANK];
        for (j, image) in images.iter_mut().enumerate() {
            let mut e = PicardClass::zero();
            e.0[j] = 1;
            *image = e + root.scale(pair(root, &e));
        }
        LatticeMap::from_images(&images)
    }

    /// Whether the map preserves the intersection pairing.
    pub fn is_isometry(&self) -> bool {
        let mut basis = [PicardClass::zero(); RANK];
        for (j, e) in basis.iter_mut().enumerate() {
            e.0[j] = 1;
        }
        basis.iter().all(|a| {
            basis
                .iter()
                .all(|b| pair(&self.apply(a), &self.apply(b)) == pair(a, b))
        })
    }
}

/// Affine root data of one surface family on the rank 10 lattice.
///
/// `surface_roots` span the boundary components of the anticanonical
/// divisor, `symmetry_roots` the simple roots of the symmetry group;
/// the anticanonical class decomposes over the symmetry roots with the
/// listed multiplicities. `diagram_edges` are the bonds of the Dynkin
/// diagram, and `automorphism` holds the extra diagram symmetry used in
/// flow words when the family has one.
pub struct RootSystemData {
    pub symmetry_roots: Vec<PicardClass>,
    pub surface_roots: Vec<PicardClass>,
    pub anticanonical: PicardClass,
    pub multiplicities: Vec<i64>,
    pub diagram_edges: Vec<(usize, usize)>,
    pub automorphism: Option<LatticeMap>,
}

impl RootSystemData {
    /// Root data of the affine E7 family carrying the main flow.
    pub fn e7() -> Self {
        let hf = PicardClass::h_f();
        let hg = PicardClass::h_g();
        let f = PicardClass::exceptional;
        let symmetry_roots = vec![
            hf - hg,
            f(3) - f(4),
            f(2) - f(3),
            f(1) - f(2),
            hg - f(1) - f(5),
            f(5) - f(6),
            f(6) - f(7),
            f(7) - f(8),
        ];
        let surface_roots = vec![
            hf + hg - f(1) - f(2) - f(3) - f(4),
            hf + hg - f(5) - f(6) - f(7) - f(8),
        ];
        let anticanonical = surface_roots[0] + surface_roots[1];
        RootSystemData {
            symmetry_roots,
            surface_roots,
            anticanonical,
            multiplicities: vec![2, 1, 2, 3, 4, 3, 2, 1],
            diagram_edges: vec![(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (0, 4)],
            automorphism: None,
        }
    }

    /// Root data of the affine E6 family carrying the degenerate flow.
    ///
    /// The boundary has three components cycled by an order three
    /// symmetry. On the lattice that symmetry is not a basis
    /// permutation (it must move a class of bidegree `(1,1)` to one of
    /// bidegree `(1,0)`); it is the unique isometry with the stated
    /// cycle structure, a quadratic transformation centered at the
    /// first two exceptional classes composed with two index swaps.
    pub fn e6() -> Self {
        let hf = PicardClass::h_f();
        let hg = PicardClass::h_g();
        let f = PicardClass::exceptional;
        let symmetry_roots = vec![
            f(7) - f(8),
            f(6) - f(5),
            hg - f(1) - f(6),
            f(1) - f(2),
            f(2) - f(3),
            f(3) - f(4),
            hf - f(1) - f(7),
        ];
        let surface_roots = vec![
            hf + hg - f(1) - f(2) - f(3) - f(4),
            hf - f(5) - f(6),
            hg - f(7) - f(8),
        ];
        let anticanonical = surface_roots[0] + surface_roots[1] + surface_roots[2];
        let automorphism = LatticeMap::from_images(&[
            hg,
            hf + hg - f(1) - f(2),
            hg - f(2),
            hg - f(1),
            f(6),
            f(5),
            f(8),
            f(7),
            f(3),
            f(4),
        ]);
        RootSystemData {
            symmetry_roots,
            surface_roots,
            anticanonical,
            multiplicities: vec![1, 1, 2, 3, 2, 1, 2],
            diagram_edges: vec![(1, 2), (2, 3), (3, 4), (4, 5), (3, 6), (6, 0)],
            automorphism: Some(automorphism),
        }
    }

    /// Reflection of a class in the `i`-th symmetry root.
    pub fn reflect(&self, i: usize, c: &PicardClass) -> PicardClass {
        self.reflection_map(i).apply(c)
    }

    /// Matrix of the reflection in the `i`-th symmetry root.
    pub fn reflection_map(&self, i: usize) -> LatticeMap {
        LatticeMap::reflection(&self.symmetry_roots[i])
    }

    /// Gram matrix of the symmetry roots under the pairing.
    pub fn gram(&self) -> Vec<Vec<i64>> {
        self.symmetry_roots
            .iter()
            .map(|a| self.symmetry_roots.iter().map(|b| pair(a, b)).collect())
            .collect()
    }

    /// Gram matrix the Dynkin diagram predicts: `-2` on the diagonal,
    /// `+1` on bonds, `0` elsewhere.
    pub fn diagram_gram(&self) -> Vec<Vec<i64>> {
        let n = self.symmetry_roots.len();
        let mut g = vec![vec![0; n]; n];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = -2;
        }
        for &(i, j) in &self.diagram_edges {
            g[i][j] = 1;
            g[j][i] = 1;
        }
        g
    }

    /// Map of a single word letter: `w0..w7` for the reflections, `r`
    /// for the diagram automorphism where the family has one.
    fn letter(&self, token: &str) -> Result<LatticeMap> {
        if token == "r" {
            if let Some(auto) = self.automorphism {
                return Ok(auto);
            }
        } else if let Some(digits) = token.strip_prefix('w') {
            if let Ok(i) = digits.parse::<usize>() {
                if i < self.symmetry_roots.len() {
                    return Ok(self.reflection_map(i));
                }
            }
        }
        Err(CoreError::UnknownToken(token.to_string()))
    }

    /// Matrix of a whitespace separated word; the rightmost letter acts
    /// first.
    pub fn word_map(&self, word: &str) -> Result<LatticeMap> {
        let mut m = LatticeMap::identity();
        for token in word.split_whitespace() {
            m = m.compose(&self.letter(token)?);
        }
        Ok(m)
    }

    /// Image of a class under a word.
    pub fn apply_word(&self, word: &str, c: &PicardClass) -> Result<PicardClass> {
        Ok(self.word_map(word)?.apply(c))
    }

    /// Shift vector of a lattice translation.
    ///
    /// Returns `c` with `map(alpha_i) = alpha_i + c_i * delta` for every
    /// symmetry root, `delta` the anticanonical class, or `None` when
    /// the map is not of that form.
    pub fn translation_vector(&self, map: &LatticeMap) -> Option<Vec<i64>> {
        let delta = self.anticanonical;
        let pivot = delta.0.iter().position(|&x| x != 0)?;
        let mut out = Vec::with_capacity(self.symmetry_roots.len());
        for alpha in &self.symmetry_roots {
            let diff = map.apply(alpha) - *alpha;
            if diff.0[pivot] % delta.0[pivot] != 0 {
                return None;
            }
            let c = diff.0[pivot] / delta.0[pivot];
            if diff != delta.scale(c) {
                return None;
            }
            out.push(c);
        }
        Some(out)
    }
}

/// Reduced word of the lattice translation underlying one step of the
/// main discrete flow.
pub const FLOW_WORD: &str = "w0 w4 w5 w3 w4 w6 w5 w2 w3 w4 w1 w2 w3 w0 w4 \
     w7 w6 w5 w4 w3 w0 w4 w6 w5 w2 w3 w4 w7 w6 w5 w1 w2 w3 w4";

/// The same flow element spelled with an explicit conjugating prefix
/// and suffix around a common core.
pub const FLOW_WORD_FACTORED: &str = "w0 w4 w5 w3 w4 w6 w7 \
     w5 w2 w3 w4 w1 w2 w3 w0 w4 w6 w5 w4 w3 w0 w4 w6 w5 w2 w3 w4 w1 w2 w3 \
     w7 w6 w5 w4";

/// Conjugate flow element produced by the direct chart matching; same
/// core as [`FLOW_WORD_FACTORED`] with a different prefix and suffix.
pub const DUAL_FLOW_WORD: &str = "w7 w6 w5 w4 w3 w0 w4 \
     w5 w2 w3 w4 w1 w2 w3 w0 w4 w6 w5 w4 w3 w0 w4 w6 w5 w2 w3 w4 w1 w2 w3 \
     w0 w4 w5 w6";

/// Word conjugating the main flow element into the dual one.
pub const CONJUGATOR_WORD: &str = "w6 w5 w4 w0 w7 w6 w5 w4";

/// Word of one step of the degenerate family flow; needs the `r` token.
pub const DEGENERATE_FLOW_WORD: &str = "r w2 w3 w1 w2 w6 w3 w4 w0 w6 w3 w5 w4 w2 w3 w1 w2";

/// Anticanonical shift vector of [`FLOW_WORD`].
pub const FLOW_TRANSLATION: [i64; 8] = [2, 0, 0, 0, -1, 0, 0, 0];

/// Anticanonical shift vector of [`DUAL_FLOW_WORD`].
pub const DUAL_FLOW_TRANSLATION: [i64; 8] = [0, 0, 0, 0, 0, 0, -1, 2];

/// Anticanonical shift vector of [`DEGENERATE_FLOW_WORD`].
pub const DEGENERATE_FLOW_TRANSLATION: [i64; 7] = [0, 0, -1, 0, 0, 0, 1];

/// Formal Laurent monomial over a fixed ordered list of parameter names.
///
/// Every root variable of both families is a monomial in the connection
/// parameters, so period-map bookkeeping reduces to integer exponent
/// vectors with addition as the group law.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiplicativeParam {
    names: &'static [&'static str],
    exps: Vec<i64>,
}

impl MultiplicativeParam {
    /// The trivial monomial `1`.
    pub fn one(names: &'static [&'static str]) -> Self {
        MultiplicativeParam {
            names,
            exps: vec![0; names.len()],
        }
    }

    /// The `idx`-th generator.
    pub fn generator(names: &'static [&'static str], idx: usize) -> Self {
        Self::monomial(names, &[(idx, 1)])
    }

    /// Monomial with the listed `(generator, exponent)` factors.
    pub fn monomial(names: &'static [&'static str], factors: &[(usize, i64)]) -> Self {
        let mut exps = vec![0; names.len()];
        for &(idx, e) in factors {
            exps[idx] += e;
        }
        MultiplicativeParam { names, exps }
    }

    /// Generator names of the underlying free group.
    pub fn names(&self) -> &'static [&'static str] {
        self.names
    }

    /// Exponent vector over the generators.
    pub fn exps(&self) -> &[i64] {
        &self.exps
    }

    /// Product of two monomials on the same generators.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.names, other.names, "monomials share a generator basis");
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| a + b)
            .collect();
        MultiplicativeParam {
            names: self.names,
            exps,
        }
    }

    /// Quotient of two monomials on the same generators.
    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.pow(-1))
    }

    /// Integer power.
    pub fn pow(&self, k: i64) -> Self {
        MultiplicativeParam {
            names: self.names,
            exps: self.exps.iter().map(|e| e * k).collect(),
        }
    }

    /// Whether the monomial is `1`.
    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }
}

impl std::fmt::Display for MultiplicativeParam {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        for (name, &e) in self.names.iter().zip(&self.exps) {
            match e {
                0 => {}
                1 => parts.push((*name).to_string()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        if parts.is_empty() {
            write!(fm, "1")
        } else {
            write!(fm, "{}", parts.join("*"))
        }
    }
}

/// Generators of the ensemble side parameter group: the step `q`, the
/// six stage roots, the involution parameter `u`, and the first modulus
/// `d`. The second modulus is eliminated through the determinant
/// constraint `d1 * d2 = z1 z3 z5 / (q z2 z4 z6)`, which keeps the
/// exponent group free.
pub const ENSEMBLE_GENERATORS: &[&str] = &["q", "z1", "z2", "z3", "z4", "z5", "z6", "u", "d"];

const GQ: usize = 0;
const GZ1: usize = 1;
const GZ2: usize = 2;
const GZ3: usize = 3;
const GZ4: usize = 4;
const GZ5: usize = 5;
const GZ6: usize = 6;
const GU: usize = 7;
const GD: usize = 8;

/// Generators of the degenerate family parameter group: the eight point
/// parameters and the two ruling constants. The step is the derived
/// monomial [`degenerate_step`].
pub const DEGENERATE_GENERATORS: &[&str] = &[
    "nu1", "nu2", "nu3", "nu4", "nu5", "nu6", "nu7", "nu8", "k1", "k2",
];

const GN: usize = 0;
const GK1: usize = 8;
const GK2: usize = 9;

/// Which identification carries the invariant chart to the model
/// surface: the direct one read off the boundary matching, or the
/// adjusted one composed with the conjugation that aligns the standard
/// flow direction.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ChartMatching {
    Direct,
    Adjusted,
}

/// The eliminated second modulus as a monomial on the ensemble
/// generators.
fn second_modulus() -> MultiplicativeParam {
    MultiplicativeParam::monomial(
        ENSEMBLE_GENERATORS,
        &[
            (GZ1, 1),
            (GZ3, 1),
            (GZ5, 1),
            (GZ2, -1),
            (GZ4, -1),
            (GZ6, -1),
            (GQ, -1),
            (GD, -1),
        ],
    )
}

/// Root variables of the eight affine E7 symmetry roots as monomials in
/// the connection parameters.
///
/// They follow the standard recipe on the model surface parameters,
/// `a = (k1/k2, n3/n4, n2/n3, n1/n2, k2/(n1 n5), n5/n6, n6/n7, n7/n8)`,
/// evaluated on the chosen parameter matching.
pub fn root_variables(matching: ChartMatching) -> [MultiplicativeParam; 8] {
    let m = |factors: &[(usize, i64)]| MultiplicativeParam::monomial(ENSEMBLE_GENERATORS, factors);
    let d1 = m(&[(GD, 1)]);
    let d2 = second_modulus();
    match matching {
        ChartMatching::Adjusted => [
            m(&[(GU, 2), (GZ2, -1), (GZ4, -1)]),
            m(&[(GZ5, 1), (GZ3, -1)]),
            m(&[(GZ3, 1), (GZ1, -1)]),
            m(&[(GZ1, 1), (GZ6, -1)]),
            m(&[(GZ2, 1), (GZ6, 1), (GU, -2)]),
            m(&[(GZ4, 1), (GZ2, -1)]),
            m(&[(GU, 2), (GD, -1), (GZ4, -1), (GZ6, -1)]),
            d1.div(&d2),
        ],
        ChartMatching::Direct => [
            m(&[(GZ4, 1), (GZ2, -1)]),
            m(&[(GZ5, 1), (GZ3, -1)]),
            m(&[(GZ3, 1), (GZ1, -1)]),
            m(&[(GZ1, 1), (GZ6, 1), (GU, -2)]),
            m(&[(GU, 2), (GD, -1), (GZ4, -1), (GZ6, -1)]),
            d1.div(&d2),
            d2.mul(&m(&[(GZ2, 1), (GZ4, 1), (GU, -2)])),
            m(&[(GU, 2), (GZ2, -1), (GZ4, -1)]),
        ],
    }
}

/// Multiplicities of the symmetry roots in the affine E7 step product.
pub const E7_STEP_POWERS: [i64; 8] = [2, 1, 2, 3, 4, 3, 2, 1];

/// Multiplicities of the symmetry roots in the affine E6 step product.
pub const E6_STEP_POWERS: [i64; 7] = [1, 1, 2, 3, 2, 1, 2];

/// Product of root variables with the given multiplicities.
pub fn variable_product(
    vars: &[MultiplicativeParam],
    powers: &[i64],
) -> MultiplicativeParam {
    assert_eq!(vars.len(), powers.len(), "one power per variable");
    let mut out = MultiplicativeParam::one(vars[0].names());
    for (v, &p) in vars.iter().zip(powers) {
        out = out.mul(&v.pow(p));
    }
    out
}

/// The flow step on the ensemble generators: the generator `q`.
pub fn ensemble_step() -> MultiplicativeParam {
    MultiplicativeParam::generator(ENSEMBLE_GENERATORS, GQ)
}

/// The flow step of the degenerate family, `k1^2 k2^2 / (n1 .. n8)`.
pub fn degenerate_step() -> MultiplicativeParam {
    let mut factors = vec![(GK1, 2), (GK2, 2)];
    for i in 0..8 {
        factors.push((GN + i, -1));
    }
    MultiplicativeParam::monomial(DEGENERATE_GENERATORS, &factors)
}

/// Root variables of the seven affine E6 symmetry roots on the
/// degenerate family generators.
pub fn degenerate_root_variables() -> [MultiplicativeParam; 7] {
    let m =
        |factors: &[(usize, i64)]| MultiplicativeParam::monomial(DEGENERATE_GENERATORS, factors);
    [
        m(&[(GN + 6, 1), (GN + 7, -1)]),
        m(&[(GN + 5, 1), (GN + 4, -1)]),
        m(&[(GK2, 1), (GN, -1), (GN + 5, -1)]),
        m(&[(GN, 1), (GN + 1, -1)]),
        m(&[(GN + 1, 1), (GN + 2, -1)]),
        m(&[(GN + 2, 1), (GN + 3, -1)]),
        m(&[(GK1, 1), (GN, -1), (GN + 6, -1)]),
    ]
}

/// Position coordinates of the eight base points of the degenerate
/// family: `b_i = n_i` on the diagonal component, `k2/n_i` and `k1/n_i`
/// on the two axis components.
pub fn degenerate_b_variables() -> [MultiplicativeParam; 8] {
    let m =
        |factors: &[(usize, i64)]| MultiplicativeParam::monomial(DEGENERATE_GENERATORS, factors);
    [
        m(&[(GN, 1)]),
        m(&[(GN + 1, 1)]),
        m(&[(GN + 2, 1)]),
        m(&[(GN + 3, 1)]),
        m(&[(GK2, 1), (GN + 4, -1)]),
        m(&[(GK2, 1), (GN + 5, -1)]),
        m(&[(GK1, 1), (GN + 6, -1)]),
        m(&[(GK1, 1), (GN + 7, -1)]),
    ]
}

/// A parameter motion multiplying each generator by a fixed power of
/// the flow step.
#[derive(Clone, Debug)]
pub struct ParameterMotion {
    pub names: &'static [&'static str],
    pub scales: Vec<i64>,
}

impl ParameterMotion {
    /// Step powers picked up by each variable: variable `j` changes by
    /// `q^k_j` under the motion.
    pub fn shift_pattern(&self, vars: &[MultiplicativeParam]) -> Vec<i64> {
        vars.iter()
            .map(|v| {
                assert_eq!(v.names(), self.names, "motion and variables share generators");
                v.exps().iter().zip(&self.scales).map(|(e, c)| e * c).sum()
            })
            .collect()
    }

    /// Anticanonical shift vector of the lattice translation the motion
    /// realizes; the action on root variables inverts the sign.
    pub fn translation_class(&self, vars: &[MultiplicativeParam]) -> Vec<i64> {
        self.shift_pattern(vars).iter().map(|k| -k).collect()
    }
}

/// Advancing the gap boundary by one node divides the two moving stage
/// roots by the step.
pub fn gap_shift() -> ParameterMotion {
    let mut scales = vec![0; ENSEMBLE_GENERATORS.len()];
    scales[GZ1] = -1;
    scales[GZ2] = -1;
    ParameterMotion {
        names: ENSEMBLE_GENERATORS,
        scales,
    }
}

/// The parameter half of one standard flow step multiplies `z2` and
/// `z4` by the step and divides the modulus by it; the eliminated
/// second modulus then moves by `1/q` automatically.
pub fn flow_shift() -> ParameterMotion {
    let mut scales = vec![0; ENSEMBLE_GENERATORS.len()];
    scales[GZ2] = 1;
    scales[GZ4] = 1;
    scales[GD] = -1;
    ParameterMotion {
        names: ENSEMBLE_GENERATORS,
        scales,
    }
}

/// The parameter half of one degenerate flow step divides the first
/// ruling constant by the step and multiplies the second by it.
pub fn degenerate_flow_shift() -> ParameterMotion {
    let mut scales = vec![0; DEGENERATE_GENERATORS.len()];
    scales[GK1] = -1;
    scales[GK2] = 1;
    ParameterMotion {
        names: DEGENERATE_GENERATORS,
        scales,
    }
}

/// Whether `target` is a rational linear combination of the `basis`
/// vectors.
pub fn in_rational_span(target: &[i64], basis: &[&[i64]]) -> bool {
    let dim = target.len();
    let cols = basis.len();
    let mut m: Vec<Vec<BigRational>> = (0..dim)
        .map(|i| {
            basis
                .iter()
                .map(|b| rat_int(b[i]))
                .chain(std::iter::once(rat_int(target[i])))
                .collect()
        })
        .collect();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..dim).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let pivot_row = m[row].clone();
        for (i, r) in m.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone() / pivot_row[col].clone();
            for (x, p) in r.iter_mut().zip(&pivot_row) {
                *x = x.clone() - f.clone() * p.clone();
            }
        }
        row += 1;
    }
    m.iter()
        .all(|r| r[..cols].iter().any(|x| !x.is_zero()) || r[cols].is_zero())
}

/// Evaluates a monomial on the ensemble generators at stage `s`.
///
/// The caller supplies the modulus value `d`, which the lattice does
/// not normalize itself. Odd powers of `u` need the square root in the
/// field; even powers fall back to `u^2`.
pub fn evaluate_ensemble_monomial<T: Scalar>(
    mono: &MultiplicativeParam,
    params: &Params<T>,
    s: i64,
    d: &T,
) -> Result<T> {
    assert_eq!(
        mono.names(),
        ENSEMBLE_GENERATORS,
        "monomial lives on the ensemble generators"
    );
    let z = params.z_params(s);
    let e = mono.exps();
    let mut value = params.q.pow_i(e[GQ]);
    for (k, zk) in z.iter().enumerate() {
        value = value * zk.pow_i(e[GZ1 + k]);
    }
    if e[GU] % 2 == 0 {
        value = value * params.u2.pow_i(e[GU] / 2);
    } else {
        let u = params.u.clone().ok_or(CoreError::NoSquareRoot)?;
        value = value * u.pow_i(e[GU]);
    }
    Ok(value * d.pow_i(e[GD]))
}

/// Rank of the Picard lattice of the nine point blowups, where the
/// coordinate surface and the model surface are identified.
pub const SURFACE_RANK: usize = 11;

/// Divisor coordinates on a nine point blowup, basis `(H1, H2, E1..E9)`.
pub type SurfaceVector = [i64; SURFACE_RANK];

/// Basis change between two nine point blowups, columns holding the
/// images of the source basis.
pub type SurfaceMatrix = [[i64; SURFACE_RANK]; SURFACE_RANK];

/// Intersection pairing on a nine point blowup of a product of lines.
pub fn surface_pair(a: &SurfaceVector, b: &SurfaceVector) -> i64 {
    let mut out = a[0] * b[1] + a[1] * b[0];
    for i in 2..SURFACE_RANK {
        out -= a[i] * b[i];
    }
    out
}

/// Matrix action on surface coordinates.
pub fn surface_apply(m: &SurfaceMatrix, v: &SurfaceVector) -> SurfaceVector {
    let mut out = [0; SURFACE_RANK];
    for (i, row) in m.iter().enumerate() {
        out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

/// Matrix product `a * b`.
pub fn surface_compose(a: &SurfaceMatrix, b: &SurfaceMatrix) -> SurfaceMatrix {
    let mut m = [[0; SURFACE_RANK]; SURFACE_RANK];
    for i in 0..SURFACE_RANK {
        for j in 0..SURFACE_RANK {
            m[i][j] = (0..SURFACE_RANK).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    m
}

/// The identity on surface coordinates.
pub fn surface_identity() -> SurfaceMatrix {
    let mut m = [[0; SURFACE_RANK]; SURFACE_RANK];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

/// Whether a basis change preserves the intersection pairing. Since the
/// form is unimodular, an isometry is automatically invertible over the
/// integers.
pub fn surface_is_isometry(m: &SurfaceMatrix) -> bool {
    let cols: Vec<SurfaceVector> = (0..SURFACE_RANK)
        .map(|j| {
            let mut v = [0; SURFACE_RANK];
            for i in 0..SURFACE_RANK {
                v[i] = m[i][j];
            }
            v
        })
        .collect();
    let mut basis = [[0i64; SURFACE_RANK]; SURFACE_RANK];
    for (j, e) in basis.iter_mut().enumerate() {
        e[j] = 1;
    }
    (0..SURFACE_RANK).all(|i| {
        (0..SURFACE_RANK)
            .all(|j| surface_pair(&cols[i], &cols[j]) == surface_pair(&basis[i], &basis[j]))
    })
}

fn sv(factors: &[(usize, i64)]) -> SurfaceVector {
    let mut v = [0; SURFACE_RANK];
    for &(idx, c) in factors {
        v[idx] += c;
    }
    v
}

fn columns_to_matrix(cols: &[SurfaceVector; SURFACE_RANK]) -> SurfaceMatrix {
    let mut m = [[0; SURFACE_RANK]; SURFACE_RANK];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..SURFACE_RANK {
            m[i][j] = c[i];
        }
    }
    m
}

const fn se(i: usize) -> usize {
    1 + i
}

/// Mutually inverse basis changes identifying the blown up coordinate
/// surface with the model surface.
pub struct SurfaceIdentification {
    /// Columns are the model basis classes `(Hf, Hg, F1..F9)` written in
    /// the coordinate basis `(Hx, Hy, E1..E9)`.
    pub into_coords: SurfaceMatrix,
    /// Columns are the coordinate basis classes written in the model
    /// basis.
    pub into_model: SurfaceMatrix,
}

/// The two identifications of the main family surfaces, one per chart
/// matching.
pub fn surface_identification(matching: ChartMatching) -> SurfaceIdentification {
    match matching {
        ChartMatching::Direct => SurfaceIdentification {
            into_coords: columns_to_matrix(&[
                sv(&[(0, 1), (1, 1), (se(2), -1), (se(9), -1)]),
                sv(&[(0, 1), (1, 1), (se(4), -1), (se(9), -1)]),
                sv(&[(se(6), 1)]),
                sv(&[(se(1), 1)]),
                sv(&[(se(3), 1)]),
                sv(&[(se(5), 1)]),
                sv(&[(se(7), 1)]),
                sv(&[(se(8), 1)]),
                sv(&[(0, 1), (1, 1), (se(2), -1), (se(4), -1), (se(9), -1)]),
                sv(&[(1, 1), (se(9), -1)]),
                sv(&[(0, 1), (se(9), -1)]),
            ]),
            into_model: columns_to_matrix(&[
                sv(&[(0, 1), (1, 1), (se(7), -1), (se(8), -1)]),
                sv(&[(0, 1), (1, 1), (se(7), -1), (se(9), -1)]),
                sv(&[(se(2), 1)]),
                sv(&[(1, 1), (se(7), -1)]),
                sv(&[(se(3), 1)]),
                sv(&[(0, 1), (se(7), -1)]),
                sv(&[(se(4), 1)]),
                sv(&[(se(1), 1)]),
                sv(&[(se(5), 1)]),
                sv(&[(se(6), 1)]),
                sv(&[(0, 1), (1, 1), (se(7), -1), (se(8), -1), (se(9), -1)]),
            ]),
        },
        ChartMatching::Adjusted => SurfaceIdentification {
            into_coords: columns_to_matrix(&[
                sv(&[(0, 2), (1, 1), (se(2), -1), (se(4), -1), (se(6), -1), (se(9), -1)]),
                sv(&[(0, 1), (1, 1), (se(6), -1), (se(9), -1)]),
                sv(&[(0, 1), (se(6), -1)]),
                sv(&[(se(1), 1)]),
                sv(&[(se(3), 1)]),
                sv(&[(se(5), 1)]),
                sv(&[(0, 1), (1, 1), (se(2), -1), (se(6), -1), (se(9), -1)]),
                sv(&[(0, 1), (1, 1), (se(4), -1), (se(6), -1), (se(9), -1)]),
                sv(&[(se(7), 1)]),
                sv(&[(se(8), 1)]),
                sv(&[(0, 1), (se(9), -1)]),
            ]),
            into_model: columns_to_matrix(&[
                sv(&[(0, 1), (1, 1), (se(5), -1), (se(6), -1)]),
                sv(&[(0, 1), (1, 2), (se(1), -1), (se(5), -1), (se(6), -1), (se(9), -1)]),
                sv(&[(se(2), 1)]),
                sv(&[(1, 1), (se(5), -1)]),
                sv(&[(se(3), 1)]),
                sv(&[(1, 1), (se(6), -1)]),
                sv(&[(se(4), 1)]),
                sv(&[(0, 1), (1, 1), (se(1), -1), (se(5), -1), (se(6), -1)]),
                sv(&[(se(7), 1)]),
                sv(&[(se(8), 1)]),
                sv(&[(0, 1), (1, 1), (se(5), -1), (se(6), -1), (se(9), -1)]),
            ]),
        },
    }
}

/// One sided identification of the degenerate family surface: columns
/// are the model basis classes written in the coordinate basis
/// `(Ht, Hp, E1..E9)` of the degenerate connection chart.
pub fn degenerate_identification() -> SurfaceMatrix {
    columns_to_matrix(&[
        sv(&[(0, 1)]),
        sv(&[(0, 1), (1, 1), (se(6), -1), (se(9), -1)]),
        sv(&[(se(1), 1)]),
        sv(&[(0, 1), (se(6), -1)]),
        sv(&[(se(3), 1)]),
        sv(&[(se(5), 1)]),
        sv(&[(se(7), 1)]),
        sv(&[(se(8), 1)]),
        sv(&[(se(2), 1)]),
        sv(&[(se(4), 1)]),
        sv(&[(0, 1), (se(9), -1)]),
    ])
}

/// Boundary components of the model surface in the rank 11 basis; the
/// first one passes through the ninth base point.
pub fn model_boundary() -> [SurfaceVector; 2] {
    [
        sv(&[
            (0, 1),
            (1, 1),
            (se(1), -1),
            (se(2), -1),
            (se(3), -1),
            (se(4), -1),
            (se(9), -1),
        ]),
        sv(&[(0, 1), (1, 1), (se(5), -1), (se(6), -1), (se(7), -1), (se(8), -1)]),
    ]
}

/// Boundary components of the coordinate surface in the rank 11 basis.
pub fn coords_boundary() -> [SurfaceVector; 2] {
    [
        sv(&[
            (0, 1),
            (1, 2),
            (se(1), -1),
            (se(2), -1),
            (se(3), -1),
            (se(4), -1),
            (se(5), -1),
            (se(6), -1),
            (se(9), -1),
        ]),
        sv(&[(0, 1), (se(7), -1), (se(8), -1)]),
    ]
}

/// Anticanonical class of a nine point blowup in either basis.
pub fn surface_anticanonical() -> SurfaceVector {
    let mut factors = vec![(0, 2), (1, 2)];
    for i in 1..=9 {
        factors.push((se(i), -1));
    }
    sv(&factors)
}

/// Outcome of one lattice identity for the verification report.
pub struct IdentityCheck {
    pub name: &'static str,
    pub pass: bool,
}

fn check_gram(data: &RootSystemData) -> bool {
    data.gram() == data.diagram_gram()
}

fn check_surface_roots(data: &RootSystemData) -> bool {
    let orthogonal = data.surface_roots.iter().all(|d| {
        pair(d, d) == -2 && data.symmetry_roots.iter().all(|a| pair(d, a) == 0)
    });
    let decomposition = data
        .symmetry_roots
        .iter()
        .zip(&data.multiplicities)
        .fold(PicardClass::zero(), |acc, (a, &m)| acc + a.scale(m));
    let total = data
        .surface_roots
        .iter()
        .fold(PicardClass::zero(), |acc, d| acc + *d);
    orthogonal
        && decomposition == data.anticanonical
        && total == data.anticanonical
        && pair(&data.anticanonical, &data.anticanonical) == 0
}

fn check_reflections(data: &RootSystemData) -> bool {
    (0..data.symmetry_roots.len()).all(|i| {
        let w = data.reflection_map(i);
        w.is_isometry()
            && w.compose(&w) == LatticeMap::identity()
            && w.apply(&data.symmetry_roots[i]) == -data.symmetry_roots[i]
    })
}

fn check_braid() -> bool {
    let e7 = RootSystemData::e7();
    let w3 = e7.reflection_map(3);
    let w4 = e7.reflection_map(4);
    w3.compose(&w4).compose(&w3) == w4.compose(&w3).compose(&w4)
}

fn check_flow_word() -> bool {
    let e7 = RootSystemData::e7();
    let m1 = e7.word_map(FLOW_WORD).expect("valid word");
    let m2 = e7.word_map(FLOW_WORD_FACTORED).expect("valid word");
    m1 == m2
        && m1.is_isometry()
        && e7.translation_vector(&m1).as_deref() == Some(&FLOW_TRANSLATION[..])
}

fn check_dual_flow_word() -> bool {
    let e7 = RootSystemData::e7();
    let phi = e7.word_map(FLOW_WORD).expect("valid word");
    let psi = e7.word_map(DUAL_FLOW_WORD).expect("valid word");
    let c = e7.word_map(CONJUGATOR_WORD).expect("valid word");
    e7.translation_vector(&psi).as_deref() == Some(&DUAL_FLOW_TRANSLATION[..])
        && psi.compose(&c) == c.compose(&phi)
}

fn check_automorphism() -> bool {
    let e6 = RootSystemData::e6();
    let r = e6.automorphism.expect("the family has the symmetry");
    let order3 = r.compose(&r).compose(&r) == LatticeMap::identity();
    let d = &e6.surface_roots;
    let a = &e6.symmetry_roots;
    let cycles = r.apply(&d[0]) == d[1]
        && r.apply(&d[1]) == d[2]
        && r.apply(&d[2]) == d[0]
        && r.apply(&a[0]) == a[5]
        && r.apply(&a[5]) == a[1]
        && r.apply(&a[1]) == a[0]
        && r.apply(&a[2]) == a[6]
        && r.apply(&a[6]) == a[4]
        && r.apply(&a[4]) == a[2]
        && r.apply(&a[3]) == a[3];
    order3 && r.is_isometry() && cycles
}

fn check_degenerate_flow_word() -> bool {
    let e6 = RootSystemData::e6();
    let m = e6.word_map(DEGENERATE_FLOW_WORD).expect("valid word");
    m.is_isometry()
        && e6.translation_vector(&m).as_deref() == Some(&DEGENERATE_FLOW_TRANSLATION[..])
}

fn check_step_products() -> bool {
    let q = ensemble_step();
    let both = [ChartMatching::Direct, ChartMatching::Adjusted]
        .iter()
        .all(|&m| variable_product(&root_variables(m), &E7_STEP_POWERS) == q);
    let a = degenerate_root_variables();
    both && variable_product(&a, &E6_STEP_POWERS) == degenerate_step()
}

fn check_b_variables() -> bool {
    let a = degenerate_root_variables();
    let b = degenerate_b_variables();
    let from_b = [
        b[7].div(&b[6]),
        b[4].div(&b[5]),
        b[5].div(&b[0]),
        b[0].div(&b[1]),
        b[1].div(&b[2]),
        b[2].div(&b[3]),
        b[6].div(&b[0]),
    ];
    let ratio = b[4]
        .mul(&b[5])
        .mul(&b[6])
        .mul(&b[7])
        .div(&b[0])
        .div(&b[1])
        .div(&b[2])
        .div(&b[3]);
    from_b == a && ratio == degenerate_step()
}

fn check_shift_patterns() -> bool {
    let flow = flow_shift();
    let adjusted = flow.translation_class(&root_variables(ChartMatching::Adjusted));
    let direct = flow.translation_class(&root_variables(ChartMatching::Direct));
    let degenerate =
        degenerate_flow_shift().translation_class(&degenerate_root_variables());
    adjusted == FLOW_TRANSLATION
        && direct == DUAL_FLOW_TRANSLATION
        && degenerate == DEGENERATE_FLOW_TRANSLATION
}

fn check_gap_shift_outside_flow_span() -> bool {
    [ChartMatching::Direct, ChartMatching::Adjusted]
        .iter()
        .all(|&m| {
            let gap = gap_shift().translation_class(&root_variables(m));
            !in_rational_span(&gap, &[&FLOW_TRANSLATION, &DUAL_FLOW_TRANSLATION])
        })
}

fn check_surface_identifications() -> bool {
    [ChartMatching::Direct, ChartMatching::Adjusted]
        .iter()
        .all(|&matching| {
            let id = surface_identification(matching);
            let both_ways = surface_compose(&id.into_coords, &id.into_model)
                == surface_identity()
                && surface_compose(&id.into_model, &id.into_coords) == surface_identity();
            let boundary = model_boundary()
                .iter()
                .zip(coords_boundary())
                .all(|(m, c)| surface_apply(&id.into_coords, m) == c);
            both_ways
                && surface_is_isometry(&id.into_coords)
                && surface_is_isometry(&id.into_model)
                && boundary
        })
}

fn check_degenerate_identification() -> bool {
    let m = degenerate_identification();
    let anticanonical = surface_anticanonical();
    surface_is_isometry(&m) && surface_apply(&m, &anticanonical) == anticanonical
}

/// Runs every lattice identity and reports each outcome, for the
/// command line verifier.
pub fn verification_report() -> Vec<IdentityCheck> {
    let e7 = RootSystemData::e7();
    let e6 = RootSystemData::e6();
    vec![
        IdentityCheck {
            name: "e7 gram matrix matches its diagram",
            pass: check_gram(&e7),
        },
        IdentityCheck {
            name: "e6 gram matrix matches its diagram",
            pass: check_gram(&e6),
        },
        IdentityCheck {
            name: "e7 boundary is orthogonal and decomposes over the roots",
            pass: check_surface_roots(&e7),
        },
        IdentityCheck {
            name: "e6 boundary is orthogonal and decomposes over the roots",
            pass: check_surface_roots(&e6),
        },
        IdentityCheck {
            name: "e7 reflections are involutive isometries",
            pass: check_reflections(&e7),
        },
        IdentityCheck {
            name: "e6 reflections are involutive isometries",
            pass: check_reflections(&e6),
        },
        IdentityCheck {
            name: "adjacent reflections satisfy the braid relation",
            pass: check_braid(),
        },
        IdentityCheck {
            name: "flow word spellings agree and translate by (2,0,0,0,-1,0,0,0)",
            pass: check_flow_word(),
        },
        IdentityCheck {
            name: "dual flow word translates by (0,0,0,0,0,0,-1,2) and is conjugate",
            pass: check_dual_flow_word(),
        },
        IdentityCheck {
            name: "e6 symmetry has order three and the stated cycles",
            pass: check_automorphism(),
        },
        IdentityCheck {
            name: "e6 flow word translates by (0,0,-1,0,0,0,1)",
            pass: check_degenerate_flow_word(),
        },
        IdentityCheck {
            name: "root variable products recover the step",
            pass: check_step_products(),
        },
        IdentityCheck {
            name: "e6 root variables match their position form",
            pass: check_b_variables(),
        },
        IdentityCheck {
            name: "flow parameter motions realize the word translations",
            pass: check_shift_patterns(),
        },
        IdentityCheck {
            name: "gap shift lies outside the span of the flow translations",
            pass: check_gap_shift_outside_flow_span(),
        },
        IdentityCheck {
            name: "surface identifications are inverse isometries matching the boundary",
            pass: check_surface_identifications(),
        },
        IdentityCheck {
            name: "degenerate identification is a unimodular isometry",
            pass: check_degenerate_identification(),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::raw_params_p0;
    use crate::painleve::qracah_painleve_params;

    fn f(i: usize) -> PicardClass {
        PicardClass::exceptional(i)
    }

    #[test]
    fn pairing_matches_the_intersection_form() {
        let e7 = RootSystemData::e7();
        let a = &e7.symmetry_roots;
        assert_eq!(pair(&a[0], &a[0]), -2);
        assert_eq!(pair(&a[0], &a[4]), 1);
        assert_eq!(pair(&e7.anticanonical, &e7.anticanonical), 0);
        assert_eq!(pair(&PicardClass::h_f(), &PicardClass::h_g()), 1);
        assert_eq!(pair(&PicardClass::h_f(), &PicardClass::h_f()), 0);
        assert_eq!(pair(&f(3), &f(3)), -1);
        assert_eq!(pair(&f(3), &f(5)), 0);
        assert_eq!(pair(&PicardClass::h_f(), &f(1)), 0);
    }

    #[test]
    fn gram_matrices_match_the_diagrams() {
        assert!(check_gram(&RootSystemData::e7()));
        assert!(check_gram(&RootSystemData::e6()));
    }

    #[test]
    fn boundary_components_are_orthogonal_and_decompose() {
        assert!(check_surface_roots(&RootSystemData::e7()));
        assert!(check_surface_roots(&RootSystemData::e6()));
    }

    #[test]
    fn reflections_are_involutive_isometries() {
        assert!(check_reflections(&RootSystemData::e7()));
        assert!(check_reflections(&RootSystemData::e6()));
        assert!(check_braid());
    }

    #[test]
    fn reflection_moves_only_the_pairing_direction() {
        let e7 = RootSystemData::e7();
        // w4 fixes classes orthogonal to its root and negates the root.
        assert_eq!(e7.reflect(4, &e7.symmetry_roots[4]), -e7.symmetry_roots[4]);
        assert_eq!(e7.reflect(4, &f(8)), f(8));
        // H_g is orthogonal to H_g - F1 - F5 and stays put; H_f pairs
        // with it once and picks up the root.
        let hf = PicardClass::h_f();
        let hg = PicardClass::h_g();
        assert_eq!(e7.reflect(4, &hg), hg);
        assert_eq!(e7.reflect(4, &hf), hf + e7.symmetry_roots[4]);
    }

    #[test]
    fn word_parsing_rejects_unknown_tokens() {
        let e7 = RootSystemData::e7();
        let e6 = RootSystemData::e6();
        let c = PicardClass::h_f();
        for (data, bad) in [
            (&e7, "w8"),
            (&e7, "r"),
            (&e6, "w7"),
            (&e6, "x3"),
            (&e6, "w"),
        ] {
            let err = data.apply_word(bad, &c).unwrap_err();
            assert!(matches!(err, CoreError::UnknownToken(t) if t == bad));
        }
        // Whitespace only words act as the identity.
        assert_eq!(e7.apply_word("  ", &c).unwrap(), c);
    }

    #[test]
    fn flow_words_translate_as_stated() {
        assert!(check_flow_word());
        assert!(check_dual_flow_word());
        assert!(check_degenerate_flow_word());
    }

    #[test]
    fn single_reflections_are_not_translations() {
        let e7 = RootSystemData::e7();
        for i in 0..e7.symmetry_roots.len() {
            assert_eq!(e7.translation_vector(&e7.reflection_map(i)), None);
        }
        let id = LatticeMap::identity();
        assert_eq!(e7.translation_vector(&id), Some(vec![0; 8]));
    }

    #[test]
    fn order_three_symmetry_has_the_stated_matrix() {
        assert!(check_automorphism());
        let e6 = RootSystemData::e6();
        let r = e6.automorphism.unwrap();
        let hf = PicardClass::h_f();
        let hg = PicardClass::h_g();
        assert_eq!(r.apply(&hf), hg);
        assert_eq!(r.apply(&hg), hf + hg - f(1) - f(2));
        assert_eq!(r.apply(&f(1)), hg - f(2));
        assert_eq!(r.apply(&f(3)), f(6));
        assert_eq!(r.apply(&f(7)), f(3));
    }

    #[test]
    fn root_variable_products_recover_the_step() {
        assert!(check_step_products());
        assert!(check_b_variables());
    }

    #[test]
    fn root_variable_monomials_have_the_stated_exponents() {
        let adjusted = root_variables(ChartMatching::Adjusted);
        let direct = root_variables(ChartMatching::Direct);
        // a0 = u^2/(z2 z4) adjusted, z4/z2 direct.
        assert_eq!(adjusted[0].to_string(), "z2^-1*z4^-1*u^2");
        assert_eq!(direct[0].to_string(), "z2^-1*z4");
        // The modulus ratio expands through the eliminated second modulus.
        assert_eq!(adjusted[7].to_string(), "q*z1^-1*z2*z3^-1*z4*z5^-1*z6*d^2");
        assert_eq!(direct[5], adjusted[7]);
        // Degenerate family: a2 = k2/(n1 n6).
        let a6 = degenerate_root_variables();
        assert_eq!(a6[2].to_string(), "nu1^-1*nu6^-1*k2");
    }

    #[test]
    fn parameter_motions_realize_the_word_translations() {
        assert!(check_shift_patterns());
        let pattern = gap_shift().shift_pattern(&root_variables(ChartMatching::Adjusted));
        assert_eq!(pattern, vec![1, 0, 1, -1, -1, 1, 0, 0]);
        let pattern = gap_shift().shift_pattern(&root_variables(ChartMatching::Direct));
        assert_eq!(pattern, vec![1, 0, 1, -1, 0, 0, -1, 1]);
    }

    #[test]
    fn gap_shift_is_not_a_flow_combination() {
        assert!(check_gap_shift_outside_flow_span());
        // Sanity on the span test itself.
        assert!(in_rational_span(&[2, 0, -2], &[&[1, 0, 0], &[0, 0, 1]]));
        assert!(in_rational_span(&[1, 1], &[&[2, 2]]));
        assert!(!in_rational_span(&[1, 1], &[&[1, 0]]));
        assert!(in_rational_span(&[0, 0], &[]));
        let combined: Vec<i64> = FLOW_TRANSLATION
            .iter()
            .zip(DUAL_FLOW_TRANSLATION)
            .map(|(a, b)| 3 * a - 2 * b)
            .collect();
        assert!(in_rational_span(
            &combined,
            &[&FLOW_TRANSLATION, &DUAL_FLOW_TRANSLATION]
        ));
    }

    #[test]
    fn surface_identifications_hold() {
        assert!(check_surface_identifications());
        assert!(check_degenerate_identification());
        // The two model rulings of the degenerate family map to the
        // fiber classes the chart formulas suggest: Hf = Ht.
        let m = degenerate_identification();
        let hf = sv(&[(0, 1)]);
        assert_eq!(surface_apply(&m, &hf), sv(&[(0, 1)]));
    }

    #[test]
    fn monomials_evaluate_to_the_stage_parameters() {
        let raw = raw_params_p0();
        let params: Params<BigRational> = Params::new(&raw).unwrap();
        let d1 = params.q.pow_i(-(raw.big_n as i64))
            / (params.alpha.clone() * params.beta.clone());
        let d2 = params.q.pow_i(raw.big_n as i64 - 1);
        let vars = root_variables(ChartMatching::Adjusted);
        for s in [0i64, 1, 3] {
            let rho = (
                BigRational::zero() - d1.clone(),
                BigRational::zero() - d2.clone(),
            );
            let pp = qracah_painleve_params(&params, s, rho);
            let n = &pp.nu;
            let concrete = [
                pp.kappa1.clone() / pp.kappa2.clone(),
                n[2].clone() / n[3].clone(),
                n[1].clone() / n[2].clone(),
                n[0].clone() / n[1].clone(),
                pp.kappa2.clone() / (n[0].clone() * n[4].clone()),
                n[4].clone() / n[5].clone(),
                n[5].clone() / n[6].clone(),
                n[6].clone() / n[7].clone(),
            ];
            for (mono, expect) in vars.iter().zip(concrete) {
                let value = evaluate_ensemble_monomial(mono, &params, s, &d1).unwrap();
                assert_eq!(value, expect);
            }
        }
        // One gap step scales each variable by the pattern power of q.
        let pattern = gap_shift().shift_pattern(&vars);
        for (mono, k) in vars.iter().zip(pattern) {
            let now = evaluate_ensemble_monomial(mono, &params, 0, &d1).unwrap();
            let next = evaluate_ensemble_monomial(mono, &params, 1, &d1).unwrap();
            assert_eq!(next / now, params.q.pow_i(k));
        }
    }

    #[test]
    fn odd_u_powers_need_the_square_root() {
        let raw = crate::ensemble::raw_params_p1();
        let params: Params<BigRational> = Params::new(&raw).unwrap();
        assert!(params.u.is_none(), "the second seed has irrational u");
        let d1 = params.q.pow_i(-(raw.big_n as i64))
            / (params.alpha.clone() * params.beta.clone());
        let odd = MultiplicativeParam::monomial(ENSEMBLE_GENERATORS, &[(GU, 1)]);
        let even = MultiplicativeParam::monomial(ENSEMBLE_GENERATORS, &[(GU, 2)]);
        assert!(matches!(
            evaluate_ensemble_monomial(&odd, &params, 0, &d1),
            Err(CoreError::NoSquareRoot)
        ));
        assert_eq!(
            evaluate_ensemble_monomial(&even, &params, 0, &d1).unwrap(),
            params.u2
        );
    }

    #[test]
    fn monomial_arithmetic_and_display() {
        let q = ensemble_step();
        assert_eq!(q.to_string(), "q");
        assert!(q.div(&q).is_one());
        assert_eq!(q.pow(3).div(&q).to_string(), "q^2");
        assert_eq!(MultiplicativeParam::one(ENSEMBLE_GENERATORS).to_string(), "1");
        let d2 = second_modulus();
        assert_eq!(d2.mul(&d2.pow(-1)), MultiplicativeParam::one(ENSEMBLE_GENERATORS));
    }

    #[test]
    fn verification_report_is_all_green() {
        for check in verification_report() {
            assert!(check.pass, "lattice identity failed: {}", check.name);
        }
    }
}
