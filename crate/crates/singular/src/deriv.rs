//! Derivations on polynomial rings and hypersurface coordinate rings.
//!
//! A derivation is stored by its images on the ring variables and extended
//! by the Leibniz rule.  When the ring is a hypersurface `k[x..]/(F)` the
//! relation is carried along: tangency `D(F) ∈ (F)` is verified at
//! construction and every application is reduced to the normal form modulo
//! the relation ideal.
//!
//! On top of plain application the module computes the p-th power witness
//! `h` with `D^p = hD` (and the induced group-scheme type: multiplicative,
//! additive, general p-closed, or not p-closed), the Hochschild closed
//! formula for the witness of `aD`, the scalar action on the residue
//! volume form of a hypersurface chart, an explicit coordinate slice
//! `D(x) = 1` for additive derivations without fixed point, the unique
//! lift of a derivation through the blowup of a fixed center, and the
//! equivariance scalar of a linear automorphism.

use std::collections::HashMap;
use std::sync::Arc;

use charp_core::groebner::div_exact;
use charp_core::jets::monomials_below;
use charp_core::{linalg, Fq, FqElem, GroebnerBasis, MPoly, Ring, UPoly};
use once_cell::sync::OnceCell;

use crate::SingularError;

/// Largest linear-solve size (columns) attempted when searching for a
/// polynomial witness that exact division does not produce.
const MAX_WITNESS_COLUMNS: usize = 1400;

/// Default jet order for the additive coordinate slice.
pub const DEFAULT_SLICE_JET: u64 = 12;

#[derive(Debug)]
struct RelationData {
    f: MPoly,
    gb: GroebnerBasis,
}

/// Group-scheme type read off the p-th power witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupType {
    /// `h` is a nonzero constant; the stored scale `c` satisfies
    /// `c^{p-1} = h`, so `c^{-1} D` has p-th power equal to itself.
    Multiplicative(FqElem),
    /// `h = 0`.
    Additive,
    /// `h` is a nonconstant polynomial.
    GeneralPClosed,
    /// No polynomial `h` with `D^p = hD` was found.
    NotPClosed,
}

/// The p-th power data of a derivation.
#[derive(Clone, Debug)]
pub struct PClosedness {
    /// Images of `D^p` on the ring variables (reduced mod the relation).
    pub dp_images: Vec<MPoly>,
    /// Polynomial `h` with `D^p = hD`, when one exists.
    pub witness: Option<MPoly>,
    pub group_type: GroupType,
    /// Diagnostic for the `NotPClosed` outcome (e.g. the degree bound of
    /// the failed polynomial search; a rational witness is out of scope).
    pub note: Option<String>,
}

/// Outcome of an equivariance check `g ∘ D ∘ g^{-1} = ζ D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivariance {
    Scalar(FqElem),
    NotEquivariant,
}

/// A derivation of a polynomial ring (or of a hypersurface quotient),
/// given by its images on the variables.
#[derive(Clone, Debug)]
pub struct Derivation {
    ring: Ring,
    images: Vec<MPoly>,
    relation: Option<Arc<RelationData>>,
    pclosed: OnceCell<PClosedness>,
}

/// Leibniz extension: `sum_i images[i] * ∂f/∂x_i`, with no reduction.
fn apply_raw(images: &[MPoly], f: &MPoly) -> MPoly {
    let mut acc = MPoly::zero(f.ring());
    for (i, im) in images.iter().enumerate() {
        if im.is_zero() {
            continue;
        }
        let df = f.partial(i);
        if df.is_zero() {
            continue;
        }
        acc = acc.add(&im.mul(&df));
    }
    acc
}

/// Exact division of every term by the single variable `var`; `None` if
/// some term lacks that variable.
pub(crate) fn div_by_var(f: &MPoly, var: usize) -> Option<MPoly> {
    if f.terms().iter().any(|(e, _)| e[var] == 0) {
        return None;
    }
    let mut exps = vec![0u16; f.ring().nvars()];
    exps[var] = 1;
    Some(f.div_exact_term(&exps, &f.ring().field().one()))
}

/// Finds `c` in the smallest supported extension with `c^{p-1} = h`
/// (`h` a nonzero constant); the canonical smallest root is returned.
fn scale_root(h: &FqElem, p: u64) -> Option<FqElem> {
    if p == 2 {
        return Some(h.clone());
    }
    let base = h.field().clone();
    let k = base.degree();
    for d in 1..=(24 / k).max(1) {
        if k * d > 24 {
            break;
        }
        let fld = if d == 1 {
            base.clone()
        } else {
            match Fq::new(p, k * d) {
                Ok(f) => f,
                Err(_) => break,
            }
        };
        let he = h.embed_into(&fld).ok()?;
        let mut coeffs = vec![fld.zero(); p as usize];
        coeffs[0] = he.neg();
        coeffs[(p - 1) as usize] = fld.one();
        let poly = UPoly::new(&fld, coeffs);
        let mut roots = poly.roots_in_field();
        if !roots.is_empty() {
            roots.sort_by_key(|r| r.canonical_index());
            return Some(roots.swap_remove(0));
        }
    }
    None
}

impl Derivation {
    /// A derivation of the free polynomial ring.
    pub fn new(ring: &Ring, images: Vec<MPoly>) -> Result<Derivation, SingularError> {
        if images.len() != ring.nvars() || images.iter().any(|f| f.ring() != ring) {
            return Err(SingularError::RingMismatch);
        }
        Ok(Derivation {
            ring: ring.clone(),
            images,
            relation: None,
            pclosed: OnceCell::new(),
        })
    }

    /// A derivation of the hypersurface ring `k[x..]/(relation)`.
    /// Tangency `D(relation) ∈ (relation)` is verified here.
    pub fn on_hypersurface(
        ring: &Ring,
        images: Vec<MPoly>,
        relation: MPoly,
    ) -> Result<Derivation, SingularError> {
        if images.len() != ring.nvars()
            || images.iter().any(|f| f.ring() != ring)
            || relation.ring() != ring
        {
            return Err(SingularError::RingMismatch);
        }
        let gb = GroebnerBasis::new(ring, std::slice::from_ref(&relation));
        if !gb.contains(&apply_raw(&images, &relation)) {
            return Err(SingularError::NotTangent);
        }
        let images = images.iter().map(|f| gb.normal_form(f)).collect();
        Ok(Derivation {
            ring: ring.clone(),
            images,
            relation: Some(Arc::new(RelationData { f: relation, gb })),
            pclosed: OnceCell::new(),
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Images on the ring variables, reduced modulo the relation.
    pub fn images(&self) -> &[MPoly] {
        &self.images
    }

    /// The hypersurface relation, if this derivation lives on one.
    pub fn relation(&self) -> Option<&MPoly> {
        self.relation.as_deref().map(|r| &r.f)
    }

    /// Normal form modulo the relation ideal (identity when free).
    pub fn reduce(&self, f: &MPoly) -> MPoly {
        match &self.relation {
            Some(rel) => rel.gb.normal_form(f),
            None => f.clone(),
        }
    }

    /// True when every image reduces to zero.
    pub fn is_zero(&self) -> bool {
        self.images.iter().all(|f| f.is_zero())
    }

    /// `D^times(f)`, reduced modulo the relation after every application.
    pub fn apply_times(&self, f: &MPoly, times: u64) -> Result<MPoly, SingularError> {
        if f.ring() != &self.ring {
            return Err(SingularError::RingMismatch);
        }
        let mut acc = self.reduce(f);
        for _ in 0..times {
            acc = self.reduce(&apply_raw(&self.images, &acc));
        }
        Ok(acc)
    }

    /// `D(f)` reduced modulo the relation.
    pub fn apply(&self, f: &MPoly) -> Result<MPoly, SingularError> {
        self.apply_times(f, 1)
    }

    /// The derivation `a·D` (same relation; tangency is inherited).
    pub fn scale_by(&self, a: &MPoly) -> Result<Derivation, SingularError> {
        if a.ring() != &self.ring {
            return Err(SingularError::RingMismatch);
        }
        let images = self.images.iter().map(|f| self.reduce(&f.mul(a))).collect();
        Ok(Derivation {
            ring: self.ring.clone(),
            images,
            relation: self.relation.clone(),
            pclosed: OnceCell::new(),
        })
    }

    /// The p-th power witness and group-scheme type, memoized.
    pub fn p_closed_witness(&self) -> Result<&PClosedness, SingularError> {
        if self.is_zero() {
            return Err(SingularError::ZeroDerivation);
        }
        Ok(self.pclosed.get_or_init(|| self.compute_pclosedness()))
    }

    fn compute_pclosedness(&self) -> PClosedness {
        let p = self.ring.field().p();
        let dp: Vec<MPoly> = (0..self.ring.nvars())
            .map(|i| {
                self.apply_times(&MPoly::var(&self.ring, i), p)
                    .expect("variable lives in the ring")
            })
            .collect();
        if dp.iter().all(|f| f.is_zero()) {
            return PClosedness {
                dp_images: dp,
                witness: Some(MPoly::zero(&self.ring)),
                group_type: GroupType::Additive,
                note: None,
            };
        }
        if let Some(h) = self.find_witness_direct(&dp) {
            return self.finish_witness(dp, h);
        }
        let bound = self.witness_degree_bound(&dp);
        match self.find_witness_by_solve(&dp, bound) {
            Some(h) => self.finish_witness(dp, h),
            None => PClosedness {
                dp_images: dp,
                witness: None,
                group_type: GroupType::NotPClosed,
                note: Some(format!(
                    "no polynomial witness of total degree <= {bound}; \
                     a rational witness is out of scope"
                )),
            },
        }
    }

    fn finish_witness(&self, dp: Vec<MPoly>, h: MPoly) -> PClosedness {
        let p = self.ring.field().p();
        let hr = self.reduce(&h);
        let (group_type, note) = if hr.is_zero() {
            (GroupType::Additive, None)
        } else if hr.is_constant() {
            match scale_root(&hr.constant_term(), p) {
                Some(c) => (GroupType::Multiplicative(c), None),
                None => (
                    GroupType::GeneralPClosed,
                    Some(
                        "constant witness, but its (p-1)-th root needs an \
                         extension beyond the supported degree"
                            .to_string(),
                    ),
                ),
            }
        } else {
            (GroupType::GeneralPClosed, None)
        };
        PClosedness { dp_images: dp, witness: Some(hr), group_type, note }
    }

    fn find_witness_direct(&self, dp: &[MPoly]) -> Option<MPoly> {
        for (i, im) in self.images.iter().enumerate() {
            if im.is_zero() || dp[i].is_zero() {
                continue;
            }
            if let Some(h) = div_exact(&dp[i], im) {
                if self.witness_checks(&h, dp) {
                    return Some(h);
                }
            }
        }
        None
    }

    fn witness_checks(&self, h: &MPoly, dp: &[MPoly]) -> bool {
        dp.iter()
            .zip(&self.images)
            .all(|(d, im)| self.reduce(&d.sub(&h.mul(im))).is_zero())
    }

    fn witness_degree_bound(&self, dp: &[MPoly]) -> u64 {
        let max_dp = dp.iter().filter_map(|f| f.tdeg()).max().unwrap_or(0);
        let mut bound = max_dp + 2;
        while bound > 1 && monomials_below(&self.ring, bound + 1).len() > MAX_WITNESS_COLUMNS {
            bound -= 1;
        }
        bound
    }

    /// Searches for `h = Σ c_m m` over all monomials `m` of total degree
    /// at most `bound` with `D^p(x_i) ≡ h·D(x_i)` modulo the relation,
    /// as one exact linear system in the `c_m`.
    fn find_witness_by_solve(&self, dp: &[MPoly], bound: u64) -> Option<MPoly> {
        let field = self.ring.field().clone();
        let unknowns = monomials_below(&self.ring, bound + 1);
        let ncols = unknowns.len();
        let mut row_of: HashMap<(usize, Vec<u16>), usize> = HashMap::new();
        let mut rows: Vec<Vec<FqElem>> = Vec::new();
        let mut rhs: Vec<FqElem> = Vec::new();
        let mut row_for = |key: (usize, Vec<u16>),
                           rows: &mut Vec<Vec<FqElem>>,
                           rhs: &mut Vec<FqElem>| {
            *row_of.entry(key).or_insert_with(|| {
                rows.push(vec![field.zero(); ncols]);
                rhs.push(field.zero());
                rows.len() - 1
            })
        };
        let one = field.one();
        for (i, im) in self.images.iter().enumerate() {
            if im.is_zero() && dp[i].is_zero() {
                continue;
            }
            for (col, m) in unknowns.iter().enumerate() {
                let prod = self.reduce(&im.mul_term(m, &one));
                for (e, c) in prod.terms() {
                    let r = row_for((i, e.clone()), &mut rows, &mut rhs);
                    rows[r][col] = rows[r][col].add(c);
                }
            }
            for (e, c) in dp[i].terms() {
                let r = row_for((i, e.clone()), &mut rows, &mut rhs);
                rhs[r] = rhs[r].add(c);
            }
        }
        let sol = linalg::solve(&field, &rows, &rhs)?;
        let mut h = MPoly::zero(&self.ring);
        for (col, c) in sol.into_iter().enumerate() {
            if !c.is_zero() {
                h = h.add(&MPoly::monomial(&self.ring, &unknowns[col], c));
            }
        }
        if self.witness_checks(&h, dp) {
            Some(h)
        } else {
            None
        }
    }

    /// The scalar function `c` with `D(ω) = c·ω` for the residue volume
    /// form `ω = dx_j ∧ dx_k / F_{x_i}` on the chart `(i, j, k)` of the
    /// hypersurface `F = 0` (three variables).  On the surface,
    /// `c·F_i ≡ (∂_j D_j + ∂_k D_k)·F_i − F_j·∂_i D_j − F_k·∂_i D_k − D(F_i)`.
    pub fn act_on_volume_form(
        &self,
        f: &MPoly,
        chart: [usize; 3],
    ) -> Result<MPoly, SingularError> {
        assert_eq!(self.ring.nvars(), 3, "volume form charts need three variables");
        let mut seen = [false; 3];
        for &c in &chart {
            assert!(c < 3 && !seen[c], "chart must be a permutation of the variables");
            seen[c] = true;
        }
        if f.ring() != &self.ring {
            return Err(SingularError::RingMismatch);
        }
        let [i, j, k] = chart;
        let gb = GroebnerBasis::new(&self.ring, std::slice::from_ref(f));
        let fi = gb.normal_form(&f.partial(i));
        if fi.is_zero() {
            return Err(SingularError::DegenerateChart);
        }
        let gj = &self.images[j];
        let gk = &self.images[k];
        let div = gj.partial(j).add(&gk.partial(k));
        let rhs_raw = div
            .mul(&f.partial(i))
            .sub(&f.partial(j).mul(&gj.partial(i)))
            .sub(&f.partial(k).mul(&gk.partial(i)))
            .sub(&apply_raw(&self.images, &f.partial(i)));
        let rhs = gb.normal_form(&rhs_raw);
        // Find polynomial c with c·F_i ≡ rhs (mod F).
        if rhs.is_zero() {
            return Ok(MPoly::zero(&self.ring));
        }
        if let Some(c) = div_exact(&rhs, &fi) {
            if gb.normal_form(&rhs.sub(&c.mul(&fi))).is_zero() {
                return Ok(c);
            }
        }
        // Linear search over bounded-degree candidates.
        let bound = rhs.tdeg().unwrap_or(0).max(f.tdeg().unwrap_or(0)) + 2;
        let field = self.ring.field().clone();
        let unknowns = monomials_below(&self.ring, bound + 1);
        let one = field.one();
        let mut row_of: HashMap<Vec<u16>, usize> = HashMap::new();
        let mut rows: Vec<Vec<FqElem>> = Vec::new();
        let mut rhs_v: Vec<FqElem> = Vec::new();
        let ncols = unknowns.len();
        {
            let mut row_for = |key: Vec<u16>,
                               rows: &mut Vec<Vec<FqElem>>,
                               rhs_v: &mut Vec<FqElem>| {
                *row_of.entry(key).or_insert_with(|| {
                    rows.push(vec![field.zero(); ncols]);
                    rhs_v.push(field.zero());
                    rows.len() - 1
                })
            };
            for (col, m) in unknowns.iter().enumerate() {
                let prod = gb.normal_form(&fi.mul_term(m, &one));
                for (e, c) in prod.terms() {
                    let r = row_for(e.clone(), &mut rows, &mut rhs_v);
                    rows[r][col] = rows[r][col].add(c);
                }
            }
            for (e, c) in rhs.terms() {
                let r = row_for(e.clone(), &mut rows, &mut rhs_v);
                rhs_v[r] = rhs_v[r].add(c);
            }
        }
        let sol = linalg::solve(&field, &rows, &rhs_v).ok_or(SingularError::DegenerateChart)?;
        let mut c = MPoly::zero(&self.ring);
        for (col, a) in sol.into_iter().enumerate() {
            if !a.is_zero() {
                c = c.add(&MPoly::monomial(&self.ring, &unknowns[col], a));
            }
        }
        Ok(c)
    }

    /// For an additive derivation without fixed point at the origin:
    /// an element `x` with `D(x) = 1`, as a jet of order
    /// [`DEFAULT_SLICE_JET`].
    pub fn additive_slice(&self) -> Result<MPoly, SingularError> {
        self.additive_slice_at(DEFAULT_SLICE_JET)
    }

    /// The coordinate slice at a caller-chosen jet order.  Construction:
    /// pick a variable `y` whose image is a unit at the origin; then
    /// `u = D^{p-1}(y^{p-1})` is a unit constant of `D`, and
    /// `D^{p-2}(u^{-1} y^{p-1})` maps to one under `D`.  The result is a
    /// jet, not a closed form: `D(x) = 1` holds modulo terms of total
    /// degree `jet_order − 1` and above.
    pub fn additive_slice_at(&self, jet_order: u64) -> Result<MPoly, SingularError> {
        let p = self.ring.field().p();
        let y_idx = self
            .images
            .iter()
            .position(|im| im.is_unit_at_origin())
            .ok_or(SingularError::FixedPoint)?;
        let margin = jet_order + 2 * p;
        let t = MPoly::var(&self.ring, y_idx).pow((p - 1) as u32);
        let u = self.apply_times_trunc(&t, p - 1, margin);
        let uinv = u.invert_jet(margin).ok_or(SingularError::FixedPoint)?;
        let z = uinv.mul(&t).truncate_below(margin);
        Ok(self.apply_times_trunc(&z, p.saturating_sub(2), margin).truncate_below(jet_order))
    }

    /// p-fold application with jet truncation between steps (used by the
    /// slice construction; only meaningful on relation-free rings, where
    /// truncation commutes with the local filtration).
    fn apply_times_trunc(&self, f: &MPoly, times: u64, order: u64) -> MPoly {
        let mut acc = f.truncate_below(order);
        for _ in 0..times {
            acc = self.reduce(&apply_raw(&self.images, &acc)).truncate_below(order);
        }
        acc
    }

    /// Lifts the derivation through the blowup of the origin, to the
    /// standard chart where `chart` is the exceptional coordinate:
    /// `x_chart = x_chart`, `x_j = x_chart·x_j'` for the other variables.
    /// Chart coordinates reuse the original variable names.  When a
    /// relation is present its strict transform (total transform divided
    /// by the multiplicity power of the chart variable) is carried over
    /// and tangency is re-verified.
    pub fn lift_to_blowup(&self, chart: usize) -> Result<Derivation, SingularError> {
        let n = self.ring.nvars();
        assert!(chart < n, "chart index out of range");
        let xc = MPoly::var(&self.ring, chart);
        let sigma: Vec<MPoly> = (0..n)
            .map(|j| {
                if j == chart {
                    xc.clone()
                } else {
                    xc.mul(&MPoly::var(&self.ring, j))
                }
            })
            .collect();
        let pushed_c = self.images[chart].subst(&sigma);
        let mut new_images = Vec::with_capacity(n);
        for j in 0..n {
            if j == chart {
                new_images.push(pushed_c.clone());
            } else {
                let pushed = self.images[j].subst(&sigma);
                let num = pushed.sub(&MPoly::var(&self.ring, j).mul(&pushed_c));
                new_images.push(div_by_var(&num, chart).ok_or(SingularError::NotDivisible)?);
            }
        }
        match &self.relation {
            Some(rel) => {
                let total = rel.f.subst(&sigma);
                let mult = rel.f.low_tdeg().expect("nonzero relation");
                let mut exps = vec![0u16; n];
                exps[chart] = u16::try_from(mult).expect("multiplicity fits");
                let strict = total.div_exact_term(&exps, &self.ring.field().one());
                Derivation::on_hypersurface(&self.ring, new_images, strict)
            }
            None => Derivation::new(&self.ring, new_images),
        }
    }

    /// The equivariance scalar `ζ` with `g ∘ D ∘ g^{-1} = ζ·D` (modulo
    /// the relation), for a linear substitution `g` given by variable
    /// images.  `g` must be invertible and must preserve the relation
    /// ideal in both directions.
    pub fn check_equivariance(
        &self,
        g_images: &[MPoly],
    ) -> Result<Equivariance, SingularError> {
        if g_images.len() != self.ring.nvars()
            || g_images.iter().any(|f| f.ring() != &self.ring)
        {
            return Err(SingularError::RingMismatch);
        }
        let inv = invert_linear_subst(&self.ring, g_images)
            .ok_or(SingularError::NotAutomorphism)?;
        if let Some(rel) = &self.relation {
            let fwd = rel.f.subst(g_images);
            let bwd = rel.f.subst(&inv);
            if !rel.gb.contains(&fwd) || !rel.gb.contains(&bwd) {
                return Err(SingularError::NotAutomorphism);
            }
        }
        let mut zeta: Option<FqElem> = None;
        let mut pairs = Vec::new();
        for i in 0..self.ring.nvars() {
            let conj = self.reduce(&apply_raw(&self.images, &inv[i]).subst(g_images));
            let base = self.images[i].clone();
            if base.is_zero() {
                if !conj.is_zero() {
                    return Ok(Equivariance::NotEquivariant);
                }
                continue;
            }
            if conj.is_zero() {
                return Ok(Equivariance::NotEquivariant);
            }
            if zeta.is_none() {
                zeta = Some(
                    conj.lc()
                        .div(&base.lc())
                        .expect("leading coefficients are nonzero"),
                );
            }
            pairs.push((base, conj));
        }
        let Some(zeta) = zeta else {
            // The zero derivation is equivariant under everything.
            return Ok(Equivariance::Scalar(self.ring.field().one()));
        };
        for (base, conj) in &pairs {
            if !conj.sub(&base.scale(&zeta)).is_zero() {
                return Ok(Equivariance::NotEquivariant);
            }
        }
        Ok(Equivariance::Scalar(zeta))
    }
}

/// Witness of `a·D` by the Hochschild closed formula
/// `(aD)^p = (a^p h + (aD)^{p-1}(a))·D`, for `D` p-closed with witness
/// `h`.  The right-hand coefficient is divisible by `a` (every
/// application of `aD` carries the factor along), so the witness of `aD`
/// itself is `a^{p-1} h + (aD)^{p-1}(a)/a`.
pub fn hochschild_pth(a: &MPoly, d: &Derivation) -> Result<PClosedness, SingularError> {
    let base = d.p_closed_witness()?;
    let Some(h) = base.witness.clone() else {
        return Err(SingularError::NotPClosed);
    };
    let p = d.ring().field().p();
    let ad = d.scale_by(a)?;
    if ad.is_zero() {
        return Err(SingularError::ZeroDerivation);
    }
    // Literal scaled images (no reduction) keep the factor `a` visible
    // for the exact division below.
    let images_ad: Vec<MPoly> = d.images().iter().map(|im| im.mul(a)).collect();
    let mut u = a.clone();
    for _ in 0..(p - 1) {
        u = apply_raw(&images_ad, &u);
    }
    let v = if u.is_zero() {
        u
    } else {
        div_exact(&u, a).expect("(aD)^{p-1}(a) is divisible by a")
    };
    let pm1 = u32::try_from(p - 1).expect("small characteristic");
    let w = d.reduce(&a.pow(pm1).mul(&h).add(&v));
    let dp_images: Vec<MPoly> = ad.images().iter().map(|im| d.reduce(&w.mul(im))).collect();
    Ok(ad.finish_witness(dp_images, w))
}

/// Inverts a linear homogeneous substitution; `None` when some image is
/// not linear or the coefficient matrix is singular.
fn invert_linear_subst(ring: &Ring, images: &[MPoly]) -> Option<Vec<MPoly>> {
    let n = ring.nvars();
    let field = ring.field().clone();
    let mut a = vec![vec![field.zero(); n]; n];
    for (i, f) in images.iter().enumerate() {
        for (e, c) in f.terms() {
            if Ring::tdeg(e) != 1 {
                return None;
            }
            let j = e.iter().position(|&x| x == 1).expect("degree-one term");
            a[i][j] = a[i][j].add(c);
        }
    }
    let mut aug: Vec<Vec<FqElem>> = (0..n)
        .map(|i| {
            let mut row = a[i].clone();
            for j in 0..n {
                row.push(if i == j { field.one() } else { field.zero() });
            }
            row
        })
        .collect();
    let pivots = linalg::rref(&mut aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(r, &c)| r != c) {
        return None;
    }
    Some(
        (0..n)
            .map(|i| {
                let mut f = MPoly::zero(ring);
                for j in 0..n {
                    let c = aug[i][n + j].clone();
                    if !c.is_zero() {
                        f = f.add(&MPoly::var(ring, j).scale(&c));
                    }
                }
                f
            })
            .collect(),
    )
}
