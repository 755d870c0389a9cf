//! Factorization of symplectic matrices into twist words.
//!
//! The matrix is driven to the identity by left multiplication with twists about the
//! standard curves `a_i`, `b_i`, `a_i − a_{i+1}`, one handle at a time: a Euclidean
//! reduction inside each handle, then between neighbouring handles. The recorded
//! letters, inverted, spell the input.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{pairing, CurveClass, Int, SpMatrix, TwistLetter, TwistWord};
use crate::error::{Error, Result};

/// Factorizations longer than this are abandoned.
pub const MAX_WORD_LENGTH: usize = 2_000_000;

/// Depth of the search for a conjugate of a generator onto a standard curve.
const CONJUGATE_SEARCH_DEPTH: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorMode {
    Signed,
    #[serde(alias = "positive")]
    PositiveOnly,
}

/// `a₁, b₁, …, a_g, b_g` followed by `a_i − a_{i+1}`.
pub fn standard_generators(genus: usize) -> Vec<CurveClass> {
    let mut out = Vec::with_capacity(3 * genus);
    for i in 1..=genus {
        out.push(CurveClass::a(genus, i));
        out.push(CurveClass::b(genus, i));
    }
    for i in 1..genus {
        out.push(CurveClass::a(genus, i).add(&CurveClass::a(genus, i + 1).neg()));
    }
    out
}

/// A generating set, with each standard twist expressed as a conjugate of a generator.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    genus: usize,
    curves: Vec<CurveClass>,
    /// For each standard curve `v`: a word `w` and generator `c` with `w(c) = ±v`, if
    /// the bounded search found one.
    expansions: Vec<Option<(TwistWord, CurveClass)>>,
}

impl GeneratorSet {
    pub fn standard(genus: usize) -> Self {
        let curves = standard_generators(genus);
        let expansions = curves
            .iter()
            .map(|c| Some((TwistWord::empty(genus), c.clone())))
            .collect();
        GeneratorSet {
            genus,
            curves,
            expansions,
        }
    }

    pub fn new(genus: usize, curves: Vec<CurveClass>) -> Result<Self> {
        if genus == 0 || curves.is_empty() {
            return Err(Error::Factorization("empty generator set".into()));
        }
        for c in &curves {
            if c.genus() != genus {
                return Err(Error::Dimension(format!("generator {c} is not on a genus {genus} surface")));
            }
            c.require_primitive()?;
        }
        let expansions = standard_generators(genus)
            .iter()
            .map(|v| conjugate_onto(genus, &curves, v))
            .collect::<Result<_>>()?;
        Ok(GeneratorSet {
            genus,
            curves,
            expansions,
        })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn curves(&self) -> &[CurveClass] {
        &self.curves
    }

    fn expand_standard(&self, index: usize, sign: i8, out: &mut Vec<TwistLetter>) -> Result<()> {
        let (w, c) = self.expansions[index].as_ref().ok_or_else(|| {
            Error::Factorization(format!(
                "generators do not reach the standard curve {} within {CONJUGATE_SEARCH_DEPTH} twists",
                standard_generators(self.genus)[index]
            ))
        })?;
        out.extend(w.letters.iter().cloned());
        out.push(TwistLetter { curve: c.clone(), sign });
        out.extend(w.inverse().letters);
        Ok(())
    }

    /// `T_c⁻¹ = T_d (T_c T_d)⁵` on homology for a generator `d` with `|⟨c,d⟩| = 1`.
    fn positive_inverse(&self, c: &CurveClass, out: &mut Vec<TwistLetter>) -> Result<()> {
        let d = self
            .curves
            .iter()
            .find(|d| pairing(&c.0, &d.0).abs() == 1)
            .ok_or_else(|| Error::Factorization(format!("no generator meets {c} once")))?;
        out.push(TwistLetter::positive(d.clone()));
        for _ in 0..5 {
            out.push(TwistLetter::positive(c.clone()));
            out.push(TwistLetter::positive(d.clone()));
        }
        Ok(())
    }
}

/// Breadth-first search for `w` with `w(c) = ±target` for some generator `c`.
fn conjugate_onto(
    genus: usize,
    gens: &[CurveClass],
    target: &CurveClass,
) -> Result<Option<(TwistWord, CurveClass)>> {
    let neg = target.neg();
    if let Some(c) = gens.iter().find(|c| **c == *target || **c == neg) {
        return Ok(Some((TwistWord::empty(genus), c.clone())));
    }
    let mut parent: HashMap<CurveClass, Option<(CurveClass, TwistLetter)>> = HashMap::new();
    let mut queue = VecDeque::new();
    for c in gens {
        parent.entry(c.clone()).or_insert(None);
        queue.push_back((c.clone(), 0usize));
    }
    while let Some((x, depth)) = queue.pop_front() {
        if depth >= CONJUGATE_SEARCH_DEPTH {
            continue;
        }
        for g in gens {
            for sign in [1i8, -1] {
                let letter = TwistLetter { curve: g.clone(), sign };
                let y = letter.matrix().apply(&x)?;
                if parent.contains_key(&y) {
                    continue;
                }
                parent.insert(y.clone(), Some((x.clone(), letter)));
                if y == *target || y == neg {
                    let mut letters = Vec::new();
                    let mut cur = y;
                    while let Some(Some((prev, l))) = parent.get(&cur).cloned() {
                        letters.push(l);
                        cur = prev;
                    }
                    return Ok(Some((TwistWord { genus, letters }, cur)));
                }
                queue.push_back((y, depth + 1));
            }
        }
    }
    Ok(None)
}

/// A twist word whose action on H₁ is exactly `m`. Positive-only mode uses no inverse
/// twists. The default generators are [`standard_generators`].
pub fn factor_symplectic(m: &SpMatrix, generators: Option<&GeneratorSet>, mode: FactorMode) -> Result<TwistWord> {
    m.require_symplectic()?;
    let genus = m.genus();
    let standard;
    let gens = match generators {
        Some(g) => {
            if g.genus != genus {
                return Err(Error::Dimension("generator set and matrix genus differ".into()));
            }
            g
        }
        None => {
            standard = GeneratorSet::standard(genus);
            &standard
        }
    };
    let cols = (0..m.dim()).map(|j| m.column(j).0).collect();
    let mut r = Reducer::new(genus, cols);
    r.descend()?;
    for h in 0..genus {
        r.clear_a_column(h)?;
        r.clear_b_column(h)?;
    }
    debug_assert!(r.cols.iter().enumerate().all(|(j, c)| c.iter().enumerate().all(|(i, &x)| x == Int::from(i == j))));

    // Recorded letters L₁…L_k satisfy T_{L_k}⋯T_{L₁}·M = I, so M = T_{L₁}⁻¹⋯T_{L_k}⁻¹.
    let mut letters = Vec::new();
    for &(index, power) in &r.record {
        let sign = if power > 0 { -1 } else { 1 };
        for _ in 0..power.unsigned_abs() {
            gens.expand_standard(index, sign, &mut letters)?;
            if letters.len() > MAX_WORD_LENGTH {
                return Err(Error::Factorization(format!("word exceeds {MAX_WORD_LENGTH} letters")));
            }
        }
    }
    if mode == FactorMode::PositiveOnly && letters.iter().any(|l| l.sign < 0) {
        let mut positive = Vec::with_capacity(letters.len());
        for l in letters {
            if l.sign > 0 {
                positive.push(l);
            } else {
                gens.positive_inverse(&l.curve, &mut positive)?;
            }
            if positive.len() > MAX_WORD_LENGTH {
                return Err(Error::Factorization(format!("word exceeds {MAX_WORD_LENGTH} letters")));
            }
        }
        letters = positive;
    }
    Ok(TwistWord { genus, letters })
}

/// A symplectic matrix sending `from` to `to`; both must be primitive.
pub fn transitive_map(from: &CurveClass, to: &CurveClass) -> Result<SpMatrix> {
    from.require_primitive()?;
    to.require_primitive()?;
    if from.genus() != to.genus() {
        return Err(Error::Dimension("curves on different surfaces".into()));
    }
    let genus = from.genus();
    let to_a1 = |c: &CurveClass| -> Result<SpMatrix> {
        let mut r = Reducer::new(genus, vec![c.0.clone()]);
        r.clear_a_column(0)?;
        let mut m = SpMatrix::identity(genus);
        let std = standard_generators(genus);
        for &(index, power) in &r.record {
            m.twist_left(&std[index], power);
        }
        Ok(m)
    };
    let u = to_a1(from)?;
    let v = to_a1(to)?;
    v.symplectic_inverse().mul(&u)
}

/// Column state together with the applied twists `(standard curve index, power)`.
struct Reducer {
    genus: usize,
    std: Vec<CurveClass>,
    cols: Vec<Vec<Int>>,
    record: Vec<(usize, Int)>,
    letters: usize,
}

fn ck(x: Option<Int>) -> Result<Int> {
    x.ok_or_else(|| Error::Factorization("integer overflow".into()))
}

/// Nearest integer to `x / y`.
fn round_div(x: Int, y: Int) -> Int {
    let q = x.div_euclid(y);
    let r = x.rem_euclid(y);
    if 2 * r > y.abs() {
        q + y.signum()
    } else {
        q
    }
}

impl Reducer {
    fn new(genus: usize, cols: Vec<Vec<Int>>) -> Self {
        Reducer {
            genus,
            std: standard_generators(genus),
            cols,
            record: Vec::new(),
            letters: 0,
        }
    }

    fn a(&self, i: usize) -> usize {
        2 * i
    }

    fn b(&self, i: usize) -> usize {
        2 * i + 1
    }

    /// Index of `a_i − a_{i+1}`.
    fn link(&self, i: usize) -> usize {
        2 * self.genus + i
    }

    fn twist(&mut self, index: usize, power: Int) -> Result<()> {
        if power == 0 {
            return Ok(());
        }
        self.letters += power.unsigned_abs() as usize;
        if self.letters > MAX_WORD_LENGTH {
            return Err(Error::Factorization(format!("word exceeds {MAX_WORD_LENGTH} letters")));
        }
        let c = &self.std[index].0;
        for x in &mut self.cols {
            let mut p = 0 as Int;
            for h in 0..c.len() / 2 {
                p = ck(p.checked_add(ck(ck(x[2 * h].checked_mul(c[2 * h + 1]))?.checked_sub(ck(x[2 * h + 1].checked_mul(c[2 * h]))?))?))?;
            }
            if p == 0 {
                continue;
            }
            let k = ck(p.checked_mul(power))?;
            for (xi, ci) in x.iter_mut().zip(c) {
                *xi = ck(xi.checked_add(ck(k.checked_mul(*ci))?))?;
            }
        }
        self.record.push((index, power));
        Ok(())
    }

    fn p(&self, col: usize, i: usize) -> Int {
        self.cols[col][2 * i]
    }

    fn q(&self, col: usize, i: usize) -> Int {
        self.cols[col][2 * i + 1]
    }

    /// `(p, q) ↦ (−q, p)` on handle `i`, or its inverse.
    fn rotate(&mut self, i: usize, inverse: bool) -> Result<()> {
        let s = if inverse { -1 } else { 1 };
        self.twist(self.a(i), s)?;
        self.twist(self.b(i), s)?;
        self.twist(self.a(i), s)
    }

    /// `p_i += k·q_{i+1}` and `p_{i+1} += k·q_i`.
    fn exchange(&mut self, i: usize, k: Int) -> Result<()> {
        self.twist(self.link(i), k)?;
        self.twist(self.a(i + 1), -k)?;
        self.twist(self.a(i), -k)
    }

    /// Brings handle `i` of column `col` to `(g, 0)` inside the handle.
    fn reduce_handle(&mut self, col: usize, i: usize) -> Result<()> {
        loop {
            let (p, q) = (self.p(col, i), self.q(col, i));
            if q == 0 {
                return Ok(());
            }
            if p == 0 {
                return self.rotate(i, false);
            }
            if p.abs() >= q.abs() {
                self.twist(self.a(i), round_div(p, q))?;
            } else {
                self.twist(self.b(i), -round_div(q, p))?;
            }
        }
    }

    /// With handles `j − 1` and `j` of column `col` both of the form `(·, 0)`, moves
    /// their gcd into handle `j − 1` and clears handle `j`.
    fn merge_into_previous(&mut self, col: usize, j: usize) -> Result<()> {
        let i = j - 1;
        loop {
            let (pi, pj) = (self.p(col, i), self.p(col, j));
            if pj == 0 {
                return Ok(());
            }
            if pi == 0 {
                self.rotate(j, false)?;
                self.exchange(i, 1)?;
                self.rotate(j, true)?;
                self.rotate(i, false)?;
                self.exchange(i, -1)?;
                return self.rotate(i, true);
            }
            self.rotate(j, false)?;
            self.exchange(i, -round_div(pi, pj))?;
            self.rotate(j, true)?;
            let (pi, pj) = (self.p(col, i), self.p(col, j));
            if pi != 0 {
                self.rotate(i, false)?;
                self.exchange(i, -round_div(pj, pi))?;
                self.rotate(i, true)?;
            }
        }
    }

    /// Handles `≥ h` of column `col` reduced to `(g, 0)` at handle `h`, zero beyond.
    fn gather(&mut self, col: usize, h: usize) -> Result<()> {
        for i in h..self.genus {
            self.reduce_handle(col, i)?;
        }
        for j in (h + 1..self.genus).rev() {
            self.merge_into_previous(col, j)?;
        }
        Ok(())
    }

    fn cost(cols: &[Vec<Int>]) -> Int {
        cols.iter().flatten().map(|x| x.abs()).sum()
    }

    /// `Σ|entries|` after left multiplication by `T_c^sign`, or `None` on overflow.
    fn cost_after(&self, c: &[Int], sign: Int) -> Option<Int> {
        let mut total: Int = 0;
        for x in &self.cols {
            let mut p: Int = 0;
            for h in 0..c.len() / 2 {
                p = p.checked_add(x[2 * h].checked_mul(c[2 * h + 1])?.checked_sub(x[2 * h + 1].checked_mul(c[2 * h])?)?)?;
            }
            let k = p.checked_mul(sign)?;
            for (xi, ci) in x.iter().zip(c) {
                total = total.checked_add(xi.checked_add(k.checked_mul(*ci)?)?.abs())?;
            }
        }
        Some(total)
    }

    /// Greedy single twists while they strictly lower `Σ|entries|`. Keeps the Euclidean
    /// phase from working on columns whose entries have already grown.
    fn descend(&mut self) -> Result<()> {
        let mut current = Self::cost(&self.cols);
        loop {
            let mut best: Option<(Int, usize, Int)> = None;
            for index in 0..self.std.len() {
                for sign in [1, -1] {
                    let Some(c) = self.cost_after(&self.std[index].0, sign) else {
                        continue;
                    };
                    if c < current && best.is_none_or(|(b, _, _)| c < b) {
                        best = Some((c, index, sign));
                    }
                }
            }
            let Some((c, index, sign)) = best else {
                return Ok(());
            };
            self.twist(index, sign)?;
            current = c;
        }
    }

    /// Column `a_h` becomes the basis vector `a_h`.
    fn clear_a_column(&mut self, h: usize) -> Result<()> {
        let col = 2 * h;
        self.gather(col, h)?;
        match self.p(col, h) {
            1 => Ok(()),
            -1 => {
                self.rotate(h, false)?;
                self.rotate(h, false)
            }
            _ => Err(Error::NotPrimitive(format!("{:?}", self.cols[col]))),
        }
    }

    /// Column `b_h` becomes `b_h`, using only twists that fix `a_h`.
    fn clear_b_column(&mut self, h: usize) -> Result<()> {
        let col = 2 * h + 1;
        if self.q(col, h) != 1 {
            return Err(Error::NotSymplectic);
        }
        if h + 1 < self.genus {
            self.gather(col, h + 1)?;
            let k = -self.p(col, h + 1);
            self.exchange(h, k)?;
        }
        let p = self.p(col, h);
        self.twist(self.a(h), p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_word(genus: usize, len: usize, rng: &mut ChaCha8Rng) -> TwistWord {
        let gens = standard_generators(genus);
        let letters = (0..len)
            .map(|_| TwistLetter {
                curve: gens[rng.gen_range(0..gens.len())].clone(),
                sign: if rng.gen_bool(0.5) { 1 } else { -1 },
            })
            .collect();
        TwistWord { genus, letters }
    }

    #[test]
    fn identity_factors_to_empty_word() {
        let w = factor_symplectic(&SpMatrix::identity(2), None, FactorMode::Signed).unwrap();
        assert!(w.is_empty());
    }

    #[test]
    fn single_twist_round_trip() {
        let m = SpMatrix::from_i64_rows(&[vec![1, -1], vec![0, 1]]).unwrap();
        let gens = GeneratorSet::new(1, vec![CurveClass::from_i64(&[1, 0])]).unwrap();
        let w = factor_symplectic(&m, Some(&gens), FactorMode::Signed).unwrap();
        assert_eq!(w.word_action(), m);
        assert_eq!(w.letters, vec![TwistLetter::positive(CurveClass::from_i64(&[1, 0]))]);
    }

    #[test]
    fn random_round_trips_in_both_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for genus in 1..=3 {
            for _ in 0..20 {
                let m = random_word(genus, 30, &mut rng).word_action();
                for mode in [FactorMode::Signed, FactorMode::PositiveOnly] {
                    let w = factor_symplectic(&m, None, mode).unwrap();
                    assert_eq!(w.word_action(), m);
                    if mode == FactorMode::PositiveOnly {
                        assert!(w.is_positive());
                    }
                }
            }
        }
    }

    #[test]
    fn custom_generators_via_conjugates() {
        let genus = 2;
        let mut gens = vec![CurveClass::a(2, 1), CurveClass::b(2, 1), CurveClass::a(2, 2), CurveClass::b(2, 2)];
        gens.push(CurveClass::from_i64(&[0, 1, 0, -1]));
        let set = GeneratorSet::new(genus, gens.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_word(genus, 12, &mut rng).word_action();
        let w = factor_symplectic(&m, Some(&set), FactorMode::Signed).unwrap();
        assert_eq!(w.word_action(), m);
        assert!(w.letters.iter().all(|l| gens.contains(&l.curve)));
    }

    #[test]
    fn insufficient_generators_are_reported() {
        let set = GeneratorSet::new(2, vec![CurveClass::a(2, 1), CurveClass::b(2, 1)]).unwrap();
        let m = SpMatrix::transvection(&CurveClass::b(2, 2), 1);
        let err = factor_symplectic(&m, Some(&set), FactorMode::Signed);
        assert!(matches!(err, Err(Error::Factorization(_))));
    }

    #[test]
    fn non_symplectic_input_is_rejected() {
        let m = SpMatrix::from_i64_rows(&[vec![2, 0], vec![0, 1]]).unwrap();
        assert_eq!(factor_symplectic(&m, None, FactorMode::Signed), Err(Error::NotSymplectic));
    }

    #[test]
    fn small_entries_give_short_words() {
        let m = SpMatrix::from_i64_rows(&[
            vec![29, -13, 3, 0, 3, 8],
            vec![15, -6, 4, 0, 4, 4],
            vec![28, -12, 5, 1, 5, 7],
            vec![3, -2, -2, -1, -2, 2],
            vec![-31, 14, -4, -1, -3, -8],
            vec![-31, 14, -4, -2, -3, -7],
        ])
        .unwrap();
        for mode in [FactorMode::Signed, FactorMode::PositiveOnly] {
            let w = factor_symplectic(&m, None, mode).unwrap();
            assert_eq!(w.word_action(), m);
            assert!(w.len() < 100_000, "{} letters", w.len());
        }
    }

    #[test]
    fn transitive_maps_hit_their_target() {
        let from = CurveClass::from_i64(&[3, 5, -2, 7]);
        let to = CurveClass::from_i64(&[0, 1, 4, 1]);
        let m = transitive_map(&from, &to).unwrap();
        assert!(m.is_symplectic());
        assert_eq!(m.apply(&from).unwrap(), to);
    }
}
