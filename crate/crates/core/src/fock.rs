//! Finite-window model of the semi-infinite wedge space.
//!
//! A Maya state `(m, λ)` stands for `v_{i_1} ∧ v_{i_2} ∧ …` with
//! `i_s = λ_s + m - s + 1/2`. Wedge factors are kept strictly decreasing and
//! every operator returns the sign of the permutation it needed.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::linalg::{det, rref};
use crate::algebra::rat::{format_rat, parse_rat};
use crate::algebra::{ChargedPoly, MPoly, Rat};
use crate::error::{Error, Result};
use crate::schur::{elementary_schurs, schur_from_table, Partition};

/// A half-integer `label + 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i64);

impl HalfInt {
    /// `k + 1/2`.
    pub const fn plus_half(k: i64) -> Self {
        HalfInt(k)
    }

    /// `k - 1/2`.
    pub const fn minus_half(k: i64) -> Self {
        HalfInt(k - 1)
    }

    /// From twice the value, which must be odd.
    pub fn from_twice(n: i64) -> Result<Self> {
        if n.rem_euclid(2) != 1 {
            return Err(Error::InvalidInput(format!("{n}/2 is not a half-integer")));
        }
        Ok(HalfInt((n - 1) / 2))
    }

    pub fn twice(self) -> i64 {
        2 * self.0 + 1
    }

    /// `floor(self)`.
    pub fn floor(self) -> i64 {
        self.0
    }

    pub fn neg(self) -> Self {
        HalfInt(-self.0 - 1)
    }

    pub fn add_int(self, k: i64) -> Self {
        HalfInt(self.0 + k)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.twice())
    }
}

impl std::str::FromStr for HalfInt {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("half-integer expected, got {s:?}"));
        let (n, d) = s.trim().split_once('/').ok_or_else(bad)?;
        if d.trim() != "2" {
            return Err(bad());
        }
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        HalfInt::from_twice(n).map_err(|_| bad())
    }
}

impl Serialize for HalfInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MayaState {
    pub charge: i64,
    pub partition: Partition,
}

impl MayaState {
    pub fn new(charge: i64, partition: Partition) -> Self {
        MayaState { charge, partition }
    }

    pub fn vacuum(charge: i64) -> Self {
        MayaState::new(charge, Partition::empty())
    }

    /// The first `n` occupied indices, decreasing.
    pub fn indices(&self, n: usize) -> Vec<HalfInt> {
        (1..=n)
            .map(|s| HalfInt(self.partition.part(s) as i64 + self.charge - s as i64))
            .collect()
    }

    pub fn is_occupied(&self, i: HalfInt) -> bool {
        Wedge::from_state(self).occupied(i.0)
    }

    /// Every index `>= bound` is empty and every index `<= -bound` is filled.
    pub fn fits(&self, bound: i64) -> bool {
        let w = Wedge::from_state(self);
        w.cutoff >= -bound && w.labels.first().is_none_or(|&l| l < bound)
    }
}

impl fmt::Display for MayaState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{};{}>", self.charge, self.partition)
    }
}

/// Occupied labels: everything below `cutoff`, plus `labels` (decreasing, all
/// `>= cutoff`). Label `a` stands for the index `a + 1/2`.
#[derive(Clone, Debug)]
struct Wedge {
    cutoff: i64,
    labels: Vec<i64>,
}

impl Wedge {
    fn from_state(st: &MayaState) -> Self {
        let l = st.partition.len();
        Wedge {
            cutoff: st.charge - l as i64,
            labels: (1..=l)
                .map(|s| st.partition.part(s) as i64 + st.charge - s as i64)
                .collect(),
        }
    }

    fn to_state(&self) -> MayaState {
        let m = self.cutoff + self.labels.len() as i64;
        let parts: Vec<u32> = self
            .labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (l - m + i as i64 + 1) as u32)
            .filter(|&p| p > 0)
            .collect();
        MayaState::new(m, Partition::new(parts).expect("decreasing labels give a partition"))
    }

    fn occupied(&self, a: i64) -> bool {
        a < self.cutoff || self.labels.contains(&a)
    }

    fn lower_cutoff(&mut self, to: i64) {
        while self.cutoff > to {
            self.cutoff -= 1;
            self.labels.push(self.cutoff);
        }
    }

    /// `v_a ∧ self`, with the sign of sorting it into place.
    fn wedge(&self, a: i64) -> Option<(bool, Wedge)> {
        if self.occupied(a) {
            return None;
        }
        let pos = self.labels.iter().take_while(|&&l| l > a).count();
        let mut w = self.clone();
        w.labels.insert(pos, a);
        Some((pos % 2 == 1, w))
    }

    /// `v_a^* ⌟ self`.
    fn contract(&self, a: i64) -> Option<(bool, Wedge)> {
        if !self.occupied(a) {
            return None;
        }
        let mut w = self.clone();
        w.lower_cutoff(a);
        let pos = w.labels.iter().position(|&l| l == a).unwrap();
        w.labels.remove(pos);
        Some((pos % 2 == 1, w))
    }
}

/// Finite rational combination of Maya states.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FockVector {
    terms: BTreeMap<MayaState, Rat>,
}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(st: MayaState) -> Self {
        Self::from_terms([(st, Rat::one())])
    }

    pub fn vacuum(m: i64) -> Self {
        Self::basis(MayaState::vacuum(m))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (MayaState, Rat)>) -> Self {
        let mut v = Self::zero();
        for (s, c) in terms {
            v.add_term(s, c);
        }
        v
    }

    pub fn add_term(&mut self, st: MayaState, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(st) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, st: &MayaState) -> Rat {
        self.terms.get(st).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MayaState, &Rat)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(s.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &FockVector) -> FockVector {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> FockVector {
        if c.is_zero() {
            return FockVector::zero();
        }
        FockVector {
            terms: self.terms.iter().map(|(s, x)| (s.clone(), x * c)).collect(),
        }
    }

    /// Charges present, increasing.
    pub fn charges(&self) -> Vec<i64> {
        let mut c: Vec<i64> = self.terms.keys().map(|s| s.charge).collect();
        c.dedup();
        c
    }

    pub fn max_weight(&self) -> u32 {
        self.terms.keys().map(|s| s.partition.weight()).max().unwrap_or(0)
    }

    pub fn fits(&self, bound: i64) -> bool {
        self.terms.keys().all(|s| s.fits(bound))
    }

    fn map_states(&self, f: impl Fn(&Wedge) -> Option<(bool, Wedge)>) -> FockVector {
        let mut out = FockVector::zero();
        for (s, c) in &self.terms {
            if let Some((neg, w)) = f(&Wedge::from_state(s)) {
                out.add_term(w.to_state(), if neg { -c.clone() } else { c.clone() });
            }
        }
        out
    }
}

/// `ψ⁺_j v = v_{-j} ∧ v`.
pub fn psi_plus(j: HalfInt, v: &FockVector) -> FockVector {
    let a = j.neg().0;
    v.map_states(|w| w.wedge(a))
}

/// `ψ⁻_j v = v_j^* ⌟ v`.
pub fn psi_minus(j: HalfInt, v: &FockVector) -> FockVector {
    let a = j.0;
    v.map_states(|w| w.contract(a))
}

/// `ψ⁺(u) v` for a finite combination `u = Σ c_i v_i`.
pub fn wedge_vector(u: &[(HalfInt, Rat)], v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    for (i, c) in u {
        out = out.add(&psi_plus(i.neg(), v).scale(c));
    }
    out
}

/// `r(E_ij) = ψ⁺_{-i} ψ⁻_j`.
pub fn r_eij(i: HalfInt, j: HalfInt, v: &FockVector) -> FockVector {
    psi_plus(i.neg(), &psi_minus(j, v))
}

/// `α_k = Σ_j r(E_{j,j+k})` for `k ≠ 0`; `α_0` multiplies by the charge.
pub fn alpha(k: i64, v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    for (s, c) in &v.terms {
        if k == 0 {
            out.add_term(s.clone(), c * Rat::from_integer(s.charge.into()));
            continue;
        }
        let w = Wedge::from_state(s);
        let top = w.labels.first().copied().unwrap_or(w.cutoff - 1);
        let low = if k > 0 { w.cutoff } else { w.cutoff + k };
        for b in low..=top {
            let Some((n1, w1)) = w.contract(b) else {
                continue;
            };
            if let Some((n2, w2)) = w1.wedge(b - k) {
                let neg = n1 ^ n2;
                out.add_term(w2.to_state(), if neg { -c.clone() } else { c.clone() });
            }
        }
    }
    out
}

/// `Q^power`: every index moves up by `power`.
pub fn shift_q(power: i64, v: &FockVector) -> FockVector {
    FockVector::from_terms(
        v.terms
            .iter()
            .map(|(s, c)| (MayaState::new(s.charge + power, s.partition.clone()), c.clone())),
    )
}

/// Element of `GL_∞` that differs from the identity only on indices in
/// `(-window, window)`. `entries[r][c]` is the coefficient of `v_{row}` in the
/// image of `v_{col}`, rows and columns ordered by increasing index starting
/// at `-window + 1/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowMatrix {
    window: i64,
    entries: Vec<Vec<Rat>>,
}

impl WindowMatrix {
    pub fn new(window: i64, entries: Vec<Vec<Rat>>) -> Result<Self> {
        if window < 0 {
            return Err(Error::InvalidInput("window must be nonnegative".into()));
        }
        let n = 2 * window as usize;
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput(format!("window {window} needs a {n}x{n} matrix")));
        }
        if det(&entries).is_zero() {
            return Err(Error::NotInvertible);
        }
        Ok(WindowMatrix { window, entries })
    }

    pub fn identity(window: i64) -> Self {
        let n = 2 * window as usize;
        let entries = (0..n)
            .map(|r| (0..n).map(|c| if r == c { Rat::one() } else { Rat::zero() }).collect())
            .collect();
        WindowMatrix { window, entries }
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    pub fn entries(&self) -> &[Vec<Rat>] {
        &self.entries
    }

    pub fn pos(&self, i: HalfInt) -> Option<usize> {
        let p = i.0 + self.window;
        (0..2 * self.window).contains(&p).then_some(p as usize)
    }

    pub fn index_at(&self, p: usize) -> HalfInt {
        HalfInt(p as i64 - self.window)
    }

    /// Mutable access for building examples; invertibility is rechecked by
    /// [`WindowMatrix::validated`].
    pub fn set(&mut self, row: HalfInt, col: HalfInt, c: Rat) -> Result<()> {
        let (Some(r), Some(k)) = (self.pos(row), self.pos(col)) else {
            return Err(Error::WindowOverflow(format!("({row}, {col}) outside window {}", self.window)));
        };
        self.entries[r][k] = c;
        Ok(())
    }

    pub fn validated(self) -> Result<Self> {
        WindowMatrix::new(self.window, self.entries)
    }

    /// `A v_j` as a list of `(index, coefficient)`.
    pub fn column(&self, j: HalfInt) -> Vec<(HalfInt, Rat)> {
        match self.pos(j) {
            None => vec![(j, Rat::one())],
            Some(c) => (0..self.entries.len())
                .filter(|&r| !self.entries[r][c].is_zero())
                .map(|r| (self.index_at(r), self.entries[r][c].clone()))
                .collect(),
        }
    }

    /// Smallest `N` such that every entry off the identity lies in `(-N, N)`.
    pub fn support_bound(&self) -> i64 {
        let n = self.entries.len();
        let mut b = 0;
        for r in 0..n {
            for c in 0..n {
                let id = if r == c { Rat::one() } else { Rat::zero() };
                if self.entries[r][c] != id {
                    for p in [r, c] {
                        let i = self.index_at(p);
                        b = b.max(i.0 + 1).max(-i.0);
                    }
                }
            }
        }
        b
    }
}

/// `R(A)|m⟩ = A v_{m-1/2} ∧ A v_{m-3/2} ∧ …`, expanded by maximal minors.
pub fn apply_window_matrix(a: &WindowMatrix, m: i64, target: i64) -> Result<FockVector> {
    let bound = a.support_bound();
    if bound > target {
        return Err(Error::WindowOverflow(format!(
            "matrix moves indices out to {bound}, target window is {target}"
        )));
    }
    if m <= -bound {
        return Ok(FockVector::vacuum(m));
    }
    // Columns -bound+1/2 ..= m-1/2, decreasing; rows up to max(bound, m).
    let cols: Vec<HalfInt> = (-bound..m).rev().map(HalfInt).collect();
    let top = bound.max(m);
    let rows: Vec<HalfInt> = (-bound..top).rev().map(HalfInt).collect();
    let col_vecs: Vec<Vec<Rat>> = cols
        .iter()
        .map(|&j| {
            let mut v = vec![Rat::zero(); rows.len()];
            for (i, c) in a.column(j) {
                v[(top - 1 - i.0) as usize] = c;
            }
            v
        })
        .collect();
    let k = cols.len();
    let mut out = FockVector::zero();
    for subset in combinations(rows.len(), k) {
        let minor: Vec<Vec<Rat>> = subset
            .iter()
            .map(|&r| col_vecs.iter().map(|cv| cv[r].clone()).collect())
            .collect();
        let d = det(&minor);
        if d.is_zero() {
            continue;
        }
        let w = Wedge {
            cutoff: -bound,
            labels: subset.iter().map(|&r| rows[r].0).collect(),
        };
        out.add_term(normalize_wedge(w).to_state(), d);
    }
    Ok(out)
}

/// Pull trailing labels contiguous with the cutoff into it.
fn normalize_wedge(mut w: Wedge) -> Wedge {
    while w.labels.last() == Some(&w.cutoff) {
        w.labels.pop();
        w.cutoff += 1;
    }
    w
}

/// All increasing `k`-subsets of `0..n`.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Boson–fermion map: per charge, `Σ c_λ S_λ(t)`. Zero components dropped.
pub fn sigma_map(v: &FockVector, nvars: usize) -> Result<Vec<ChargedPoly>> {
    let w = v.max_weight() as usize;
    if nvars < w.max(1) {
        return Err(Error::TooFewVariables {
            needed: w.max(1),
            got: nvars,
        });
    }
    let table = elementary_schurs(2 * w + 1, nvars.max(2 * w + 1))?;
    let wide = nvars.max(2 * w + 1);
    let mut by_charge: BTreeMap<i64, MPoly> = BTreeMap::new();
    for (s, c) in &v.terms {
        let p = schur_from_table(&s.partition, &table, wide).scale(c);
        by_charge
            .entry(s.charge)
            .or_insert_with(|| MPoly::zero(wide))
            .add_assign_ref(&p);
    }
    by_charge
        .into_iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|(m, p)| Ok(ChargedPoly::new(m, p.with_vars(nvars)?)))
        .collect()
}

/// σ of a vector known to have a single charge `m` (zero gives the zero
/// polynomial at charge `m`).
pub fn sigma_single(v: &FockVector, m: i64, nvars: usize) -> Result<MPoly> {
    let parts = sigma_map(v, nvars)?;
    match parts.as_slice() {
        [] => Ok(MPoly::zero(nvars)),
        [p] if p.charge == m => Ok(p.poly.clone()),
        _ => Err(Error::ChargeMismatch {
            what: "sigma image".into(),
            expected: m,
            got: parts.iter().map(|p| p.charge).find(|&c| c != m).unwrap_or(m),
        }),
    }
}

/// Element of `F ⊗ F` in the Maya ⊗ Maya basis.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tensor {
    terms: BTreeMap<(MayaState, MayaState), Rat>,
}

impl Tensor {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(MayaState, MayaState), &Rat)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, a: MayaState, b: MayaState, c: Rat) {
        if c.is_zero() {
            return;
        }
        let key = (a, b);
        let e = self.terms.entry(key.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// `Σ u ⊗ v` over the given pairs.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a FockVector, &'a FockVector)>) -> Self {
        let mut t = Tensor::zero();
        for (u, v) in pairs {
            t.add_outer(u, v, &Rat::one());
        }
        t
    }

    pub fn add_outer(&mut self, u: &FockVector, v: &FockVector, c: &Rat) {
        for (a, x) in &u.terms {
            for (b, y) in &v.terms {
                self.add_term(a.clone(), b.clone(), x * y * c);
            }
        }
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        let mut out = self.clone();
        for ((a, b), c) in &other.terms {
            out.add_term(a.clone(), b.clone(), -c.clone());
        }
        out
    }

    /// `(σ ⊗ σ)` image over `t_1..t_D, t'_1..t'_D`, grouped by the pair of
    /// charges.
    pub fn sigma_image(&self, nvars: usize) -> Result<BTreeMap<(i64, i64), MPoly>> {
        let w = self
            .terms
            .keys()
            .map(|(a, b)| a.partition.weight().max(b.partition.weight()))
            .max()
            .unwrap_or(0) as usize;
        if nvars < w.max(1) {
            return Err(Error::TooFewVariables {
                needed: w.max(1),
                got: nvars,
            });
        }
        let wide = nvars.max(2 * w + 1);
        let table = elementary_schurs(2 * w + 1, wide)?;
        let mut cache: BTreeMap<Partition, MPoly> = BTreeMap::new();
        let mut schur = |p: &Partition| -> MPoly {
            cache
                .entry(p.clone())
                .or_insert_with(|| {
                    schur_from_table(p, &table, wide)
                        .with_vars(nvars)
                        .expect("weight bounded by nvars")
                })
                .clone()
        };
        let mut out: BTreeMap<(i64, i64), MPoly> = BTreeMap::new();
        for ((a, b), c) in &self.terms {
            let l = schur(&a.partition).embed(2 * nvars, 0)?;
            let r = schur(&b.partition).embed(2 * nvars, nvars)?;
            out.entry((a.charge, b.charge))
                .or_insert_with(|| MPoly::zero(2 * nvars))
                .add_scaled(&(&l * &r), c);
        }
        out.retain(|_, p| !p.is_zero());
        Ok(out)
    }
}

/// `Σ_i ψ⁺_i u ⊗ ψ⁻_{-i} v`, i.e. `Σ_a ψ⁺(v_a) u ⊗ ψ⁻(v_a^*) v`.
pub fn fermionic_pairing(u: &FockVector, v: &FockVector) -> Tensor {
    let mut out = Tensor::zero();
    if u.is_zero() || v.is_zero() {
        return out;
    }
    let lo = u
        .terms
        .keys()
        .map(|s| Wedge::from_state(s).cutoff)
        .min()
        .unwrap();
    let hi = v
        .terms
        .keys()
        .map(|s| {
            let w = Wedge::from_state(s);
            w.labels.first().copied().unwrap_or(w.cutoff - 1)
        })
        .max()
        .unwrap();
    for a in lo..=hi {
        let au = u.map_states(|w| w.wedge(a));
        if au.is_zero() {
            continue;
        }
        let bv = v.map_states(|w| w.contract(a));
        out.add_outer(&au, &bv, &Rat::one());
    }
    out
}

/// [`fermionic_pairing`] after checking both inputs sit inside `window`.
pub fn fermionic_pairing_in(u: &FockVector, v: &FockVector, window: i64) -> Result<Tensor> {
    for (name, x) in [("u", u), ("v", v)] {
        if !x.fits(window) {
            return Err(Error::WindowOverflow(format!("{name} leaves window {window}")));
        }
    }
    Ok(fermionic_pairing(u, v))
}

/// Coefficient of `z^p` in the bosonic vertex operators applied to `f` at
/// charge `m`:
/// `ψ⁺[z]: z^m e^{ξ(t,z)} f(t-[z^{-1}])` and
/// `ψ⁻[z]: z^{-m} e^{-ξ(t,z)} f(t+[z^{-1}])`, with
/// `ψ^±[z] = Σ_j ψ^±_j z^{-j-1/2}`.
pub fn vertex_coeff(f: &ChargedPoly, plus: bool, p: i64) -> Result<ChargedPoly> {
    use crate::schur::{miwa_shift, Shift};
    let n = f.poly.nvars();
    let wf = f.poly.wdeg().unwrap_or(0) as i64;
    let (shift, off, dq) = if plus {
        (Shift::Minus, f.charge, 1)
    } else {
        (Shift::Plus, -f.charge, -1)
    };
    let shifted = miwa_shift(&f.poly, shift, wf as u32)?;
    // z^off · Σ_i S_i(±t) z^i · Σ_{a ≤ 0} c_a z^a at z^p: i = p - off - a.
    let need = (p - off + wf).max(0) as usize;
    let wide = n.max(need).max(1);
    let mut table = elementary_schurs(need, wide)?;
    if !plus {
        table = table.into_iter().map(|s| s.flip_signs(|_| true)).collect();
    }
    let mut acc = MPoly::zero(wide);
    for (a, c) in shifted.iter() {
        let i = p - off - a;
        if i < 0 || i as usize >= table.len() {
            continue;
        }
        acc.add_assign_ref(&(&c.with_vars(wide)? * &table[i as usize]));
    }
    let total = acc.with_vars(n).or_else(|_| acc.with_vars(wide))?;
    Ok(ChargedPoly::new(f.charge + dq, total))
}

/// Inverse of σ on one charge sector: the Schur expansion of `f.poly`,
/// read as a combination of Maya states of charge `f.charge`.
pub fn sigma_inverse(f: &ChargedPoly) -> Result<FockVector> {
    let Some(w) = f.poly.wdeg() else {
        return Ok(FockVector::zero());
    };
    let nv = f.poly.nvars().max(w as usize).max(1);
    let p = f.poly.with_vars(nv)?;
    let table = elementary_schurs(w as usize, nv)?;
    let mut out = FockVector::zero();
    for weight in 0..=w {
        let parts = Partition::all_of_weight(weight);
        let schurs: Vec<MPoly> = parts.iter().map(|l| schur_from_table(l, &table, nv)).collect();
        let target: Vec<_> = p.terms().filter(|(m, _)| m.weighted_degree() == weight).collect();
        if target.is_empty() {
            continue;
        }
        // Rows are monomials of this weight, columns the partitions, then f.
        let mut monos: Vec<Vec<u16>> = schurs
            .iter()
            .flat_map(|s| s.terms().map(|(m, _)| m.exps().to_vec()))
            .chain(target.iter().map(|(m, _)| m.exps().to_vec()))
            .collect();
        monos.sort();
        monos.dedup();
        let mut rows: Vec<Vec<Rat>> = monos
            .iter()
            .map(|m| {
                let mut r: Vec<Rat> = schurs.iter().map(|s| s.coeff(m)).collect();
                r.push(p.coeff(m));
                r
            })
            .collect();
        let pivots = rref(&mut rows);
        if pivots.contains(&parts.len()) {
            return Err(Error::InvalidInput("polynomial is outside the Schur span".into()));
        }
        for (r, &c) in pivots.iter().enumerate() {
            let coef = rows[r][parts.len()].clone();
            if !coef.is_zero() {
                out.add_term(MayaState::new(f.charge, parts[c].clone()), coef);
            }
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct FockTermJson {
    state: MayaState,
    coef: String,
}

impl Serialize for FockVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<FockTermJson> = self
            .terms
            .iter()
            .map(|(st, c)| FockTermJson {
                state: st.clone(),
                coef: format_rat(c),
            })
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FockVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<FockTermJson>::deserialize(d)?;
        let mut out = FockVector::zero();
        for t in v {
            let c = parse_rat(&t.coef).map_err(serde::de::Error::custom)?;
            out.add_term(t.state, c);
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct WindowMatrixJson {
    window: i64,
    entries: Vec<Vec<String>>,
}

impl Serialize for WindowMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WindowMatrixJson {
            window: self.window,
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(format_rat).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WindowMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = WindowMatrixJson::deserialize(d)?;
        let entries = j
            .entries
            .iter()
            .map(|r| r.iter().map(|x| parse_rat(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        WindowMatrix::new(j.window, entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::{int, rat};
    use crate::schur::{elementary_schur, schur_of_partition};

    fn h(twice: i64) -> HalfInt {
        HalfInt::from_twice(twice).unwrap()
    }

    fn st(m: i64, parts: &[u32]) -> MayaState {
        MayaState::new(m, Partition::from_parts(parts))
    }

    fn b(m: i64, parts: &[u32]) -> FockVector {
        FockVector::basis(st(m, parts))
    }

    #[test]
    fn half_integer_parsing() {
        assert_eq!("-3/2".parse::<HalfInt>().unwrap(), h(-3));
        assert_eq!(h(-3).to_string(), "-3/2");
        assert!("1/3".parse::<HalfInt>().is_err());
        assert!("2/2".parse::<HalfInt>().is_err());
        assert_eq!(h(1).neg(), h(-1));
    }

    #[test]
    fn indices_of_states() {
        assert_eq!(st(0, &[]).indices(2), vec![h(-1), h(-3)]);
        assert_eq!(st(0, &[2]).indices(2), vec![h(3), h(-3)]);
    }

    #[test]
    fn psi_plus_examples() {
        assert!(psi_plus(h(1), &FockVector::vacuum(0)).is_zero());
        assert_eq!(psi_plus(h(-1), &FockVector::vacuum(0)), FockVector::vacuum(1));
        assert!(psi_plus(h(-1), &FockVector::vacuum(1)).is_zero());
    }

    #[test]
    fn psi_minus_examples() {
        assert!(psi_minus(h(1), &FockVector::vacuum(0)).is_zero());
        assert_eq!(psi_minus(h(1), &FockVector::vacuum(1)), FockVector::vacuum(0));
        // Removing the top index of |0⟩ leaves |-1⟩ itself.
        assert_eq!(psi_minus(h(-1), &FockVector::vacuum(0)), FockVector::vacuum(-1));
        // Removing the second index costs a sign and leaves λ = (1).
        assert_eq!(psi_minus(h(-3), &FockVector::vacuum(0)), b(-1, &[1]).scale(&int(-1)));
    }

    #[test]
    fn r_eij_examples() {
        let vac = FockVector::vacuum(0);
        assert_eq!(r_eij(h(-1), h(-1), &vac), vac);
        assert!(r_eij(h(1), h(1), &vac).is_zero());
        assert_eq!(r_eij(h(1), h(-1), &vac), b(0, &[1]));
    }

    #[test]
    fn alpha_examples() {
        let vac = FockVector::vacuum(0);
        assert!(alpha(1, &vac).is_zero());
        assert_eq!(alpha(-1, &vac), b(0, &[1]));
        let s = sigma_map(&alpha(-1, &vac), 2).unwrap();
        assert_eq!(s, vec![ChargedPoly::new(0, MPoly::t(2, 1))]);
        assert_eq!(alpha(0, &FockVector::vacuum(3)), FockVector::vacuum(3).scale(&int(3)));
    }

    #[test]
    fn shift_q_examples() {
        assert_eq!(shift_q(1, &FockVector::vacuum(0)), FockVector::vacuum(1));
        assert_eq!(shift_q(-1, &FockVector::vacuum(1)), FockVector::vacuum(0));
        assert_eq!(shift_q(-1, &b(0, &[2])), b(-1, &[2]));
    }

    #[test]
    fn window_matrix_examples() {
        let id = WindowMatrix::identity(3);
        for m in -3..=3 {
            assert_eq!(apply_window_matrix(&id, m, 3).unwrap(), FockVector::vacuum(m));
        }

        // Swap v_{-1/2} and v_{3/2}.
        let mut a = WindowMatrix::identity(2);
        a.set(h(3), h(-1), int(1)).unwrap();
        a.set(h(-1), h(-1), int(0)).unwrap();
        a.set(h(3), h(3), int(0)).unwrap();
        a.set(h(-1), h(3), int(1)).unwrap();
        let a = a.validated().unwrap();
        assert_eq!(apply_window_matrix(&a, 0, 2).unwrap(), b(0, &[2]));

        // v_{-1/2} ↦ v_{1/2} + v_{-3/2}, v_{-3/2} ↦ v_{-1/2}.
        let mut a = WindowMatrix::identity(2);
        a.set(h(-1), h(-1), int(0)).unwrap();
        a.set(h(1), h(-1), int(1)).unwrap();
        a.set(h(-3), h(-1), int(1)).unwrap();
        a.set(h(-3), h(-3), int(0)).unwrap();
        a.set(h(-1), h(-3), int(1)).unwrap();
        let a = a.validated().unwrap();
        let expect = b(0, &[1, 1]).sub(&FockVector::vacuum(0));
        assert_eq!(apply_window_matrix(&a, 0, 2).unwrap(), expect);
        assert!(matches!(apply_window_matrix(&a, 0, 1), Err(Error::WindowOverflow(_))));
    }

    #[test]
    fn singular_window_matrix_rejected() {
        let mut a = WindowMatrix::identity(2);
        a.set(h(3), h(-1), int(1)).unwrap();
        a.set(h(-1), h(-1), int(0)).unwrap();
        assert_eq!(a.validated(), Err(Error::NotInvertible));
    }

    #[test]
    fn sigma_examples() {
        for m in -2..=2 {
            assert_eq!(
                sigma_map(&FockVector::vacuum(m), 1).unwrap(),
                vec![ChargedPoly::new(m, MPoly::one(1))]
            );
        }
        let s2 = elementary_schur(2, 2).unwrap();
        assert_eq!(sigma_map(&b(0, &[2]), 2).unwrap(), vec![ChargedPoly::new(0, s2)]);
        assert!(sigma_map(&b(0, &[2]), 1).is_err());
    }

    #[test]
    fn vertex_coefficients_are_elementary_schurs() {
        for n in 0..=8i64 {
            let v = psi_plus(HalfInt::minus_half(-n), &FockVector::vacuum(0));
            assert_eq!(v, b(1, &[n as u32]));
            let s = sigma_single(&v, 1, 8).unwrap();
            assert_eq!(s, elementary_schur(n, 8).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn pairing_examples() {
        let vac = FockVector::vacuum(0);
        assert!(fermionic_pairing(&vac, &vac).is_zero());
        let bad = b(0, &[2]).add(&b(0, &[1, 1]));
        assert!(!fermionic_pairing(&bad, &bad).is_zero());
        assert!(fermionic_pairing_in(&b(0, &[3]), &vac, 2).is_err());
    }

    #[test]
    fn annihilator_of_a_perfect_wedge() {
        // R(A)|0⟩ with A v_{-1/2} = v_{1/2} + v_{-3/2}: the subspace is spanned
        // by that vector, v_{-1/2} and the tail below -3/2.
        let mut a = WindowMatrix::identity(2);
        a.set(h(-1), h(-1), int(0)).unwrap();
        a.set(h(1), h(-1), int(1)).unwrap();
        a.set(h(-3), h(-1), int(1)).unwrap();
        a.set(h(-3), h(-3), int(0)).unwrap();
        a.set(h(-1), h(-3), int(1)).unwrap();
        let a = a.validated().unwrap();
        let tau = apply_window_matrix(&a, 0, 2).unwrap();
        assert!(wedge_vector(&[(h(1), int(1)), (h(-3), int(1))], &tau).is_zero());
        assert!(wedge_vector(&[(h(-1), int(1))], &tau).is_zero());
        assert!(wedge_vector(&[(h(-5), rat(2, 3))], &tau).is_zero());
        assert!(!wedge_vector(&[(h(1), int(1))], &tau).is_zero());
    }

    #[test]
    fn json_forms() {
        let v = b(0, &[2, 1]).scale(&rat(-1, 2));
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[{"state":{"charge":0,"partition":[2,1]},"coef":"-1/2"}]"#);
        assert_eq!(serde_json::from_str::<FockVector>(&s).unwrap(), v);
        let a = WindowMatrix::identity(1);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"window":1,"entries":[["1/1","0/1"],["0/1","1/1"]]}"#);
        assert_eq!(serde_json::from_str::<WindowMatrix>(&s).unwrap(), a);
        assert!(serde_json::from_str::<WindowMatrix>(r#"{"window":1,"entries":[["0","0"],["0","1"]]}"#).is_err());
    }

    #[test]
    fn schur_dictionary_matches_alpha_products() {
        // α_{-1}^2 |0⟩ = (2) + (1,1) and σ of it is t_1^2.
        let v = alpha(-1, &alpha(-1, &FockVector::vacuum(0)));
        assert_eq!(v, b(0, &[2]).add(&b(0, &[1, 1])));
        let s = sigma_single(&v, 0, 2).unwrap();
        assert_eq!(s, MPoly::t(2, 1).pow(2));
        assert_eq!(
            schur_of_partition(&Partition::from_parts(&[1, 1]), 2).unwrap()
                + elementary_schur(2, 2).unwrap(),
            s
        );
    }

    #[test]
    fn schur_expansion_inverts_sigma() {
        let n = 3;
        let s2 = elementary_schur(2, n).unwrap();
        let s1 = elementary_schur(1, n).unwrap();
        let v = sigma_inverse(&ChargedPoly::new(1, &s2 - &s1.pow(2))).unwrap();
        assert_eq!(v, b(1, &[1, 1]).scale(&int(-1)));
        let w = b(0, &[2, 1]).scale(&rat(1, 3)).add(&b(0, &[3])).add(&b(0, &[]).scale(&int(5)));
        let f = &sigma_map(&w, 3).unwrap()[0];
        assert_eq!(sigma_inverse(f).unwrap(), w);
    }
}
