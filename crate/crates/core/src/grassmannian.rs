//! Points of the polynomial Sato Grassmannian.
//!
//! The loop variable is `s`, with `v_i = s^{-i-1/2}` and
//! `H_j = span{s^{-j}, s^{-j+1}, …}`. A point is stored as a tail level `T`
//! (so `H_T ⊂ W`) plus a fully reduced echelon basis of Laurent vectors with
//! exponents below `-T`; pivots are lowest exponents.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::linalg::{null_space, rank, rref};
use crate::algebra::rat::{format_rat, parse_rat};
use crate::algebra::{ChargedPoly, MPoly, Rat};
use crate::error::{Error, Result};
use crate::fock::{sigma_single, wedge_vector, FockVector, HalfInt, WindowMatrix};
use crate::schur::elementary_schurs;

/// Finite Laurent polynomial in `s`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentVec {
    coefs: BTreeMap<i64, Rat>,
}

impl LaurentVec {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(e: i64) -> Self {
        Self::from_terms([(e, Rat::one())])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Rat)>) -> Self {
        let mut v = Self::zero();
        for (e, c) in terms {
            v.add_term(e, c);
        }
        v
    }

    /// Coefficients of `s^min_exp, s^{min_exp+1}, …`.
    pub fn from_coefs(min_exp: i64, coefs: Vec<Rat>) -> Self {
        Self::from_terms(coefs.into_iter().enumerate().map(|(i, c)| (min_exp + i as i64, c)))
    }

    fn add_term(&mut self, e: i64, c: Rat) {
        if c.is_zero() {
            return;
        }
        let x = self.coefs.entry(e).or_insert_with(Rat::zero);
        *x += c;
        if x.is_zero() {
            self.coefs.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefs.is_empty()
    }

    pub fn coeff(&self, e: i64) -> Rat {
        self.coefs.get(&e).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rat)> {
        self.coefs.iter().map(|(e, c)| (*e, c))
    }

    pub fn lowest_exp(&self) -> Option<i64> {
        self.coefs.keys().next().copied()
    }

    pub fn highest_exp(&self) -> Option<i64> {
        self.coefs.keys().next_back().copied()
    }

    /// `s^k · self`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentVec {
            coefs: self.coefs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::from_terms(self.coefs.iter().map(|(e, x)| (*e, x * c)))
    }

    pub fn add(&self, other: &LaurentVec) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.coefs {
            out.add_term(*e, c.clone());
        }
        out
    }

    /// Keep only the exponents below `bound`.
    pub fn below(&self, bound: i64) -> Self {
        LaurentVec {
            coefs: self.coefs.range(..bound).map(|(e, c)| (*e, c.clone())).collect(),
        }
    }

    /// The same vector written in the wedge basis `v_i`.
    pub fn as_indices(&self) -> Vec<(HalfInt, Rat)> {
        self.coefs
            .iter()
            .map(|(e, c)| (HalfInt::plus_half(-e - 1), c.clone()))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrPoint {
    tail: i64,
    basis: Vec<LaurentVec>,
}

impl GrPoint {
    /// `H_tail`.
    pub fn h(tail: i64) -> Self {
        GrPoint {
            tail,
            basis: Vec::new(),
        }
    }

    /// Canonical form of `span(raw) ⊕ H_tail`.
    pub fn reduce(raw: &[LaurentVec], tail: i64) -> Self {
        let mut tail = tail;
        let mut vecs: Vec<LaurentVec> = raw.iter().map(|v| v.below(-tail)).collect();
        loop {
            let basis = echelon(&vecs);
            // A basis vector equal to s^{-T-1} extends the tail.
            let grow = basis
                .last()
                .is_some_and(|b| b.lowest_exp() == Some(-tail - 1) && b.coefs.len() == 1);
            if !grow {
                return GrPoint { tail, basis };
            }
            tail += 1;
            vecs = basis[..basis.len() - 1].iter().map(|v| v.below(-tail)).collect();
        }
    }

    pub fn tail(&self) -> i64 {
        self.tail
    }

    pub fn basis(&self) -> &[LaurentVec] {
        &self.basis
    }

    pub fn charge(&self) -> i64 {
        self.tail + self.basis.len() as i64
    }

    pub fn pivots(&self) -> Vec<i64> {
        self.basis.iter().map(|b| b.lowest_exp().unwrap()).collect()
    }

    /// Lowest exponent used, or `-T` for `H_T`.
    pub fn low_exp(&self) -> i64 {
        self.basis.first().and_then(LaurentVec::lowest_exp).unwrap_or(-self.tail)
    }

    /// `W + span{s^{-T-1}}`.
    pub fn enlarge_tail(&self) -> Self {
        let mut raw = self.basis.clone();
        raw.push(LaurentVec::monomial(-self.tail - 1));
        GrPoint::reduce(&raw, self.tail)
    }

    /// Remainder of `x` modulo `W`; zero iff `x ∈ W`.
    pub fn remainder(&self, x: &LaurentVec) -> LaurentVec {
        let mut r = x.below(-self.tail);
        for b in &self.basis {
            let p = b.lowest_exp().unwrap();
            let c = r.coeff(p);
            if !c.is_zero() {
                r = r.add(&b.scale(&-c));
            }
        }
        r
    }

    pub fn contains(&self, x: &LaurentVec) -> bool {
        self.remainder(x).is_zero()
    }

    /// Weight of the pivot Maya state, which bounds the weight of τ.
    pub fn weight_bound(&self) -> u32 {
        let m = self.charge();
        self.pivots()
            .iter()
            .enumerate()
            .map(|(i, e)| (-e - 1 - m + i as i64 + 1).max(0) as u32)
            .sum()
    }
}

/// Fully reduced echelon basis of the span, pivots on lowest exponents,
/// ordered by increasing pivot.
fn echelon(vecs: &[LaurentVec]) -> Vec<LaurentVec> {
    let mut exps: Vec<i64> = vecs.iter().flat_map(|v| v.coefs.keys().copied()).collect();
    exps.sort_unstable();
    exps.dedup();
    if exps.is_empty() {
        return Vec::new();
    }
    let mut rows: Vec<Vec<Rat>> = vecs
        .iter()
        .map(|v| exps.iter().map(|e| v.coeff(*e)).collect())
        .collect();
    let pivots = rref(&mut rows);
    rows.truncate(pivots.len());
    rows.into_iter()
        .map(|r| LaurentVec::from_terms(exps.iter().copied().zip(r)))
        .collect()
}

/// `W' = {w ∈ W : s^k w ∈ W}` together with its codimension `n` in `W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stable {
    pub wprime: GrPoint,
    pub n: usize,
    /// Basis of `W'` modulo `H_T` in the tail level of `W` (not absorbed).
    kernel: Vec<LaurentVec>,
}

pub fn stable_subspace(w: &GrPoint, k: i64) -> Result<Stable> {
    if k <= 0 {
        return Err(Error::InvalidInput(format!("k must be positive, got {k}")));
    }
    let rems: Vec<LaurentVec> = w.basis.iter().map(|b| w.remainder(&b.shift(k))).collect();
    let mut exps: Vec<i64> = rems.iter().flat_map(|v| v.coefs.keys().copied()).collect();
    exps.sort_unstable();
    exps.dedup();
    let r = w.basis.len();
    // Columns are the remainders, rows the exponents.
    let mat: Vec<Vec<Rat>> = exps
        .iter()
        .map(|e| rems.iter().map(|v| v.coeff(*e)).collect())
        .collect();
    let ker = if exps.is_empty() {
        (0..r)
            .map(|i| (0..r).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
            .collect()
    } else {
        null_space(&mat, r)
    };
    let kernel_raw: Vec<LaurentVec> = ker
        .iter()
        .map(|c| {
            c.iter()
                .zip(&w.basis)
                .fold(LaurentVec::zero(), |acc, (x, b)| acc.add(&b.scale(x)))
        })
        .collect();
    let kernel = echelon(&kernel_raw);
    let n = r - kernel.len();
    Ok(Stable {
        wprime: GrPoint::reduce(&kernel, w.tail),
        n,
        kernel,
    })
}

/// Membership in `Gr^{(n,k)}`.
pub fn in_filtration(w: &GrPoint, n: usize, k: i64) -> Result<bool> {
    Ok(stable_subspace(w, k)?.n <= n)
}

fn wedge_all(vecs: &[LaurentVec], tail: i64) -> FockVector {
    let mut v = FockVector::vacuum(tail);
    for b in vecs.iter().rev() {
        v = wedge_vector(&b.as_indices(), &v);
        if v.is_zero() {
            break;
        }
    }
    v
}

/// The pivot Maya state of `W`.
fn pivot_state_coeff(w: &GrPoint, v: &FockVector) -> Rat {
    let top = wedge_all(&w.pivots().iter().map(|&e| LaurentVec::monomial(e)).collect::<Vec<_>>(), w.tail);
    let (st, _) = top.iter().next().expect("monomial wedge is a single state");
    v.coeff(st)
}

/// `b_1 ∧ … ∧ b_r ∧ |T⟩`; the pivot Plücker coordinate is 1.
pub fn tau_fock(w: &GrPoint) -> FockVector {
    wedge_all(&w.basis, w.tail)
}

/// The point `A·H_m` whose wedge is `R(A)|m⟩`: images of `v_i`, `i < m`,
/// with `v_i = s^{-i-1/2}`.
pub fn window_point(a: &WindowMatrix, m: i64) -> GrPoint {
    let n = a.window();
    if m <= -n {
        return GrPoint::h(m);
    }
    let raw: Vec<LaurentVec> = (-n..m.min(n))
        .map(|l| LaurentVec::from_terms(a.column(HalfInt::plus_half(l)).into_iter().map(|(i, c)| (-i.floor() - 1, c))))
        .collect();
    let raw: Vec<LaurentVec> = if m > n {
        // Labels at or above the window are fixed by `A`.
        raw.into_iter().chain((n..m).map(|l| LaurentVec::monomial(-l - 1))).collect()
    } else {
        raw
    };
    GrPoint::reduce(&raw, -n)
}

/// The subspace `{x : x ∧ v = 0}` of a single-charge vector, provided `v`
/// is a perfect wedge; otherwise an input error.
pub fn point_of_wedge(v: &FockVector) -> Result<GrPoint> {
    let charges = v.charges();
    let [m] = charges[..] else {
        return Err(Error::InvalidInput(format!("expected one charge sector, got {charges:?}")));
    };
    let states: Vec<_> = v.iter().map(|(s, _)| s.partition.clone()).collect();
    let lo = m - states.iter().map(|p| p.len() as i64).max().unwrap_or(0);
    let hi = m + states.iter().map(|p| p.part(1) as i64).max().unwrap_or(0);
    // Every label below `lo` is occupied in every state, none at or above `hi`.
    let images: Vec<FockVector> = (lo..hi)
        .map(|l| wedge_vector(&[(HalfInt::plus_half(l), Rat::one())], v))
        .collect();
    let mut keys: Vec<_> = images.iter().flat_map(|f| f.iter().map(|(s, _)| s.clone())).collect();
    keys.sort();
    keys.dedup();
    let rows: Vec<Vec<Rat>> = keys.iter().map(|k| images.iter().map(|f| f.coeff(k)).collect()).collect();
    let ncols = images.len();
    let kernel = if rows.is_empty() {
        (0..ncols)
            .map(|i| (0..ncols).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
            .collect()
    } else {
        null_space(&rows, ncols)
    };
    let raw: Vec<LaurentVec> = kernel
        .iter()
        .map(|c| LaurentVec::from_terms(c.iter().enumerate().map(|(i, x)| (-(lo + i as i64) - 1, x.clone()))))
        .collect();
    let w = GrPoint::reduce(&raw, lo);
    let not_wedge = || Error::InvalidInput("vector is not a perfect wedge".into());
    if w.charge() != m {
        return Err(not_wedge());
    }
    let t = tau_fock(&w);
    let (s0, c0) = v.iter().next().ok_or(Error::ZeroTau)?;
    let ratio = t.coeff(s0) / c0;
    if ratio.is_zero() || t != v.scale(&ratio) {
        return Err(not_wedge());
    }
    Ok(w)
}

pub fn tau_of(w: &GrPoint, nvars: usize) -> Result<ChargedPoly> {
    let v = tau_fock(w);
    Ok(ChargedPoly::new(w.charge(), sigma_single(&v, w.charge(), nvars)?))
}

/// τ, ρ_j, σ_j as wedge-space vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompanionVectors {
    pub k: i64,
    pub charge: i64,
    pub tau: FockVector,
    pub rho: Vec<FockVector>,
    pub sigma: Vec<FockVector>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Companions {
    pub tau: ChargedPoly,
    pub rho: Vec<ChargedPoly>,
    pub sigma: Vec<ChargedPoly>,
}

/// Adapted basis: complement vectors first (`u_1..u_n`), then `W'`.
struct Adapted {
    complement: Vec<LaurentVec>,
    rest: Vec<LaurentVec>,
    tail: i64,
    /// Pivot Plücker coordinate of the adapted wedge.
    c: Rat,
}

fn adapted(w: &GrPoint, k: i64) -> Result<Adapted> {
    let st = stable_subspace(w, k)?;
    let kp: Vec<i64> = st.kernel.iter().map(|b| b.lowest_exp().unwrap()).collect();
    let complement: Vec<LaurentVec> = w
        .basis
        .iter()
        .filter(|b| !kp.contains(&b.lowest_exp().unwrap()))
        .cloned()
        .collect();
    debug_assert_eq!(complement.len(), st.n);
    let mut all = complement.clone();
    all.extend(st.kernel.iter().cloned());
    let c = pivot_state_coeff(w, &wedge_all(&all, w.tail));
    if c.is_zero() {
        return Err(Error::InvalidInput("adapted basis does not span W".into()));
    }
    Ok(Adapted {
        complement,
        rest: st.kernel,
        tail: w.tail,
        c,
    })
}

pub fn companion_vectors(w: &GrPoint, k: i64) -> Result<CompanionVectors> {
    let a = adapted(w, k)?;
    let inv = Rat::one() / &a.c;
    let mut all = a.complement.clone();
    all.extend(a.rest.iter().cloned());
    let tau_raw = wedge_all(&all, a.tail);
    let mut rho = Vec::new();
    let mut sigma = Vec::new();
    let shifted: Vec<LaurentVec> = all.iter().map(|b| b.shift(k)).collect();
    for (j, u) in a.complement.iter().enumerate() {
        let r = wedge_vector(&u.shift(k).as_indices(), &tau_raw).scale(&inv);
        if r.is_zero() {
            return Err(Error::DegenerateCompanion { index: j + 1 });
        }
        rho.push(r);
        let mut dropped = shifted.clone();
        dropped.remove(j);
        let sign = if j % 2 == 0 { inv.clone() } else { -inv.clone() };
        sigma.push(wedge_all(&dropped, a.tail - k).scale(&sign));
    }
    Ok(CompanionVectors {
        k,
        charge: w.charge(),
        tau: tau_raw.scale(&inv),
        rho,
        sigma,
    })
}

impl CompanionVectors {
    pub fn to_polys(&self, nvars: usize) -> Result<Companions> {
        let m = self.charge;
        let conv = |v: &FockVector, c: i64| -> Result<ChargedPoly> {
            Ok(ChargedPoly::new(c, sigma_single(v, c, nvars)?))
        };
        Ok(Companions {
            tau: conv(&self.tau, m)?,
            rho: self.rho.iter().map(|v| conv(v, m + 1)).collect::<Result<_>>()?,
            sigma: self
                .sigma
                .iter()
                .map(|v| conv(v, m - self.k - 1))
                .collect::<Result<_>>()?,
        })
    }

    pub fn max_weight(&self) -> u32 {
        std::iter::once(&self.tau)
            .chain(&self.rho)
            .chain(&self.sigma)
            .map(FockVector::max_weight)
            .max()
            .unwrap_or(0)
    }
}

pub fn companions(w: &GrPoint, k: i64, nvars: usize) -> Result<Companions> {
    companion_vectors(w, k)?.to_polys(nvars)
}

/// `∂τ/∂t_k = Σ_ℓ τ_ℓ`, each `τ_ℓ` a decomposable wedge (zero terms dropped).
pub fn dtk_vectors(w: &GrPoint, k: i64) -> Result<Vec<FockVector>> {
    let a = adapted(w, k)?;
    let inv = Rat::one() / &a.c;
    let n = a.complement.len();
    let mut all = a.complement.clone();
    all.extend(a.rest.iter().cloned());
    let mut out = Vec::new();
    for l in 0..n {
        let mut v = all.clone();
        v[l] = v[l].shift(k);
        let t = wedge_all(&v, a.tail).scale(&inv);
        if !t.is_zero() {
            out.push(t);
        }
    }
    Ok(out)
}

pub fn dtk_decomposition(w: &GrPoint, k: i64, nvars: usize) -> Result<Vec<ChargedPoly>> {
    let m = w.charge();
    dtk_vectors(w, k)?
        .iter()
        .map(|v| Ok(ChargedPoly::new(m, sigma_single(v, m, nvars)?)))
        .collect()
}

/// Rational `M × N` matrix stored by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Rat>>,
}

impl RatMatrix {
    pub fn new(entries: Vec<Vec<Rat>>) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 || entries.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("matrix must be non-empty and rectangular".into()));
        }
        Ok(RatMatrix { rows, cols, entries })
    }

    /// Columns given as lists of entries.
    pub fn from_columns(cols: &[Vec<Rat>]) -> Result<Self> {
        let m = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != m) {
            return Err(Error::InvalidInput("columns of unequal length".into()));
        }
        Self::new((0..m).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Vec<Rat>] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        self.entries.iter().map(|r| r[j].clone()).collect()
    }
}

/// Chain-condition bookkeeping for a generating matrix (columns 1-based).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub rank: usize,
    /// Columns `j` with `R A_j ∉ {0, A_{j+1}}`.
    pub violations: Vec<usize>,
    /// Pairs `(j, i)`, `i < j`, with `R A_j = A_i`.
    pub exclusions: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generated {
    pub point: GrPoint,
    /// The determinant `det(Σ_ℓ S_{ℓ-i} A_{ℓj})`, unnormalized.
    pub tau: ChargedPoly,
    pub report: ChainReport,
}

/// The subspace spanned by the columns under `e_ℓ ↦ s^{N-ℓ}`, plus `H_{-N}`.
pub fn matrix_point(a: &RatMatrix) -> GrPoint {
    let n = a.cols as i64;
    let cols: Vec<LaurentVec> = (0..a.cols)
        .map(|j| {
            LaurentVec::from_terms(
                a.column(j)
                    .into_iter()
                    .enumerate()
                    .map(|(l, c)| (n - 1 - l as i64, c)),
            )
        })
        .collect();
    GrPoint::reduce(&cols, -n)
}

pub fn chain_report(a: &RatMatrix, k: usize) -> ChainReport {
    let shift = |c: &[Rat]| -> Vec<Rat> {
        (0..c.len())
            .map(|i| c.get(i + k).cloned().unwrap_or_else(Rat::zero))
            .collect()
    };
    let cols: Vec<Vec<Rat>> = (0..a.cols).map(|j| a.column(j)).collect();
    let mut violations = Vec::new();
    let mut exclusions = Vec::new();
    for j in 0..a.cols {
        let ra = shift(&cols[j]);
        let zero = ra.iter().all(Zero::is_zero);
        if !zero && cols.get(j + 1) != Some(&ra) {
            violations.push(j + 1);
        }
        if !zero {
            for (i, c) in cols.iter().enumerate().take(j) {
                if *c == ra {
                    exclusions.push((j + 1, i + 1));
                }
            }
        }
    }
    ChainReport {
        rank: rank(&a.entries),
        violations,
        exclusions,
    }
}

pub fn generate_from_matrix(a: &RatMatrix, k: usize, n: usize, nvars: usize) -> Result<Generated> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    if a.rows <= a.cols {
        return Err(Error::InvalidInput(format!(
            "need more rows than columns, got {}x{}",
            a.rows, a.cols
        )));
    }
    let report = chain_report(a, k);
    if report.rank < a.cols {
        return Err(Error::RankDeficient {
            rank: report.rank,
            expected: a.cols,
        });
    }
    if report.violations.len() > n {
        return Err(Error::TooManyViolations {
            count: report.violations.len(),
            allowed: n,
            columns: report.violations.clone(),
        });
    }
    let big_n = a.cols;
    let wide = nvars.max(a.rows).max(1);
    let s = elementary_schurs(a.rows, wide)?;
    let entry = |i: usize, j: usize| -> MPoly {
        let mut acc = MPoly::zero(wide);
        for l in 1..=a.rows {
            if l >= i && !a.entries[l - 1][j].is_zero() {
                acc.add_scaled(&s[l - i], &a.entries[l - 1][j]);
            }
        }
        acc
    };
    let m: Vec<Vec<MPoly>> = (1..=big_n)
        .map(|i| (0..big_n).map(|j| entry(i, j)).collect())
        .collect();
    let tau = crate::algebra::linalg::det_mpoly(&m, wide).with_vars(nvars)?;
    Ok(Generated {
        point: matrix_point(a),
        tau: ChargedPoly::new(0, tau),
        report,
    })
}

#[derive(Serialize, Deserialize)]
struct LaurentJson {
    #[serde(rename = "minExp")]
    min_exp: i64,
    coefs: Vec<String>,
}

impl From<&LaurentVec> for LaurentJson {
    fn from(v: &LaurentVec) -> Self {
        let (lo, hi) = (v.lowest_exp().unwrap_or(0), v.highest_exp().unwrap_or(-1));
        LaurentJson {
            min_exp: lo,
            coefs: (lo..=hi).map(|e| format_rat(&v.coeff(e))).collect(),
        }
    }
}

impl TryFrom<LaurentJson> for LaurentVec {
    type Error = Error;
    fn try_from(j: LaurentJson) -> Result<Self> {
        let c = j.coefs.iter().map(|x| parse_rat(x)).collect::<Result<Vec<_>>>()?;
        Ok(LaurentVec::from_coefs(j.min_exp, c))
    }
}

#[derive(Serialize, Deserialize)]
struct GrPointJson {
    tail: i64,
    basis: Vec<LaurentJson>,
}

impl Serialize for GrPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GrPointJson {
            tail: self.tail,
            basis: self.basis.iter().map(LaurentJson::from).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GrPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GrPointJson::deserialize(d)?;
        let raw = j
            .basis
            .into_iter()
            .map(LaurentVec::try_from)
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ok(GrPoint::reduce(&raw, j.tail))
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<String>>,
}

impl Serialize for RatMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(format_rat).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        let entries = j
            .entries
            .iter()
            .map(|r| r.iter().map(|x| parse_rat(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        let m = RatMatrix::new(entries).map_err(serde::de::Error::custom)?;
        if m.rows != j.rows || m.cols != j.cols {
            return Err(serde::de::Error::custom(format!(
                "declared {}x{} but entries are {}x{}",
                j.rows, j.cols, m.rows, m.cols
            )));
        }
        Ok(m)
    }
}
