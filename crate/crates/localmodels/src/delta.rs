//! The covering endomorphism `δ` and its image filtration.
//!
//! On the canonical covering of a catalogued tuple there is a unique
//! endomorphism `δ` that kills the base ring, normalizes the chart sections
//! (`δ(t_i) = 1`), obeys the twisted Leibniz rule
//! `δ(bc) = δ(b)c + bδ(c) + λ^{1/(p−1)} δ(b)δ(c)`, and satisfies `δ^p = 0`.
//! Its image filtration `Image(δ^j | Ker δ^{j+1})` equals the ideal
//! `I = (x, y^m, z)` for every `1 ≤ j ≤ p−1`.
//!
//! Three presentations make these claims finitely checkable:
//! * characteristic 2 (`r ∈ {0, m}`): the section presentation in `u, v` —
//!   every check is exact on polynomial normal forms;
//! * characteristic 3 and 5 with `r = 0`: the covering is smooth with an
//!   additive vector field; the filtration is computed on truncated jets of
//!   the smooth model (`I` pulls back to the maximal invariant ideal);
//! * characteristic 3 and 5 with `r = m`: the chart translations `t ↦ t + μ`,
//!   `μ^{p−1} = λ`, give the exact structural checks, but the filtration at
//!   the closed point has no finite local certificate and is reported as
//!   skipped.

use std::collections::HashMap;

use charp_core::{linalg, monomials_below, FqElem, GroebnerBasis, MPoly, Ring};

use crate::covering::find_structure_root;
use crate::data::RdpLocalData;
use crate::LocalModelError;

/// Which finite presentation carried the checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaPresentation {
    /// Characteristic-2 section basis `1, u, v, uv`.
    SectionBasis,
    /// Smooth covering with an additive vector field (characteristic 3, 5).
    SmoothAdditiveModel,
    /// Chart-level translation automorphism only.
    ChartAutomorphism,
}

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass,
    Fail(String),
    Skipped(String),
}

#[derive(Clone, Debug)]
pub struct DeltaCheck {
    pub name: &'static str,
    pub outcome: CheckOutcome,
}

#[derive(Clone, Debug)]
pub struct DeltaReport {
    pub presentation: DeltaPresentation,
    pub jet_order: u64,
    pub checks: Vec<DeltaCheck>,
}

impl DeltaReport {
    /// True when no check failed (skipped checks are allowed).
    pub fn passed(&self) -> bool {
        self.checks
            .iter()
            .all(|c| !matches!(c.outcome, CheckOutcome::Fail(_)))
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name).map(|c| &c.outcome)
    }

    fn push(&mut self, name: &'static str, ok: bool, why: &str) {
        let outcome = if ok {
            CheckOutcome::Pass
        } else {
            CheckOutcome::Fail(why.to_string())
        };
        self.checks.push(DeltaCheck { name, outcome });
    }
}

/// Applies the derivation with the given coordinate images.
fn derive(g: &MPoly, images: &[MPoly]) -> MPoly {
    let mut out = MPoly::zero(g.ring());
    for (i, img) in images.iter().enumerate() {
        out = out.add(&g.partial(i).mul(img));
    }
    out
}

/// Verifies `δ` on a catalogued tuple at the given jet order.
///
/// Only the boundary regimes `r ∈ {0, m}` admit finite certificates; the
/// intermediate regime is rejected with a descriptive error.
pub fn delta_checks(data: &RdpLocalData, jet_order: u64) -> Result<DeltaReport, LocalModelError> {
    if data.r != 0 && data.r != data.m {
        return Err(LocalModelError::UnsupportedRegime(format!(
            "p={}, {}: 0 < r < m has a one-dimensional fixed locus upstairs and \
             no finite certificate at the closed point",
            data.p, data.label
        )));
    }
    match data.p {
        2 => Ok(section_basis_checks(data)),
        3 | 5 => {
            if data.r == 0 {
                additive_model_checks(data.p, jet_order)
            } else {
                Ok(chart_checks(data))
            }
        }
        _ => Err(LocalModelError::OutsideCatalogue(format!(
            "characteristic {}",
            data.p
        ))),
    }
}

/// Exact characteristic-2 checks on the section presentation.
fn section_basis_checks(data: &RdpLocalData) -> DeltaReport {
    let mut report = DeltaReport {
        presentation: DeltaPresentation::SectionBasis,
        jet_order: 0,
        checks: Vec::new(),
    };
    let ring5 = Ring::new(data.ring.field(), &["x", "y", "z", "u", "v"]);
    let x = MPoly::var(&ring5, 0);
    let y = MPoly::var(&ring5, 1);
    let z = MPoly::var(&ring5, 2);
    let u = MPoly::var(&ring5, 3);
    let v = MPoly::var(&ring5, 4);
    let into5 = |g: &MPoly| g.subst(&[x.clone(), y.clone(), z.clone()]);
    let f5 = into5(&data.f);
    let lam = into5(&data.lambda);
    let ym = y.pow(data.m);
    // Section relations with the canonical (zero) regular correction.
    let (tu, tv) = match data.label.class.family {
        charp_lattice::AdeFamily::D => (x.clone(), y.clone()),
        _ => (y.clone(), x.clone()),
    };
    let r1 = u.pow(2).add(&lam.mul(&x).mul(&u)).add(&tu);
    let r2 = v.pow(2).add(&lam.mul(&ym).mul(&v)).add(&tv);
    let r3 = ym.mul(&u).add(&x.mul(&v)).add(&z);
    let gens = [r1, r2, r3, f5];
    let gb = GroebnerBasis::new(&ring5, &gens);
    // δ(uv) must represent z + λ x y^m.
    let uv_target = z.add(&lam.mul(&x).mul(&ym));

    if data.r == 0 {
        // λ = 0: δ is an honest derivation killing x, y, z.
        let images = [
            MPoly::zero(&ring5),
            MPoly::zero(&ring5),
            MPoly::zero(&ring5),
            x.clone(),
            ym.clone(),
        ];
        let d = |g: &MPoly| derive(g, &images);
        report.push(
            "sections-well-defined",
            gens.iter().all(|g| gb.contains(&d(g))),
            "δ does not preserve the relation ideal",
        );
        report.push("delta-kills-base", true, "");
        report.push(
            "delta-normalizes-sections",
            d(&u) == x && d(&v) == ym && gb.contains(&d(&u.mul(&v)).sub(&uv_target)),
            "δ(u), δ(v), δ(uv) do not match x, y^m, z + λxy^m",
        );
        // The untwisted Leibniz rule holds identically for a derivation;
        // certify one mixed product anyway.
        let a = u.add(&x);
        let b = v.mul(&u);
        let leibniz = d(&a.mul(&b)) == d(&a).mul(&b).add(&a.mul(&d(&b)));
        report.push("twisted-leibniz", leibniz, "product rule violated");
        // In characteristic 2 the square of a derivation is a derivation, so
        // vanishing on the five coordinates kills the operator exactly.
        let square_dies = [&x, &y, &z, &u, &v].iter().all(|w| d(&d(w)).is_zero());
        report.push("delta-p-fold-vanishes", square_dies, "δ² ≠ 0");
    } else {
        // λ is a unit scalar; σ = id + λδ is the translation automorphism.
        let sigma_imgs = [
            x.clone(),
            y.clone(),
            z.clone(),
            u.add(&lam.mul(&x)),
            v.add(&lam.mul(&ym)),
        ];
        let sigma = |g: &MPoly| g.subst(&sigma_imgs);
        let lam_c = data.lambda_scalar().expect("unit λ");
        let lam_inv = lam_c.inv().expect("λ is a unit");
        let delta = |g: &MPoly| sigma(g).sub(g).scale(&lam_inv);
        report.push(
            "sections-well-defined",
            gens.iter().all(|g| gb.contains(&sigma(g))),
            "σ does not preserve the relation ideal",
        );
        report.push(
            "delta-kills-base",
            delta(&x).is_zero() && delta(&y).is_zero() && delta(&z).is_zero(),
            "σ moves the base coordinates",
        );
        report.push(
            "delta-normalizes-sections",
            delta(&u) == x
                && delta(&v) == ym
                && gb.contains(&delta(&u.mul(&v)).sub(&uv_target)),
            "δ(u), δ(v), δ(uv) do not match x, y^m, z + λxy^m",
        );
        // The twisted Leibniz rule is equivalent to multiplicativity of σ.
        let a = u.add(&z);
        let b = u.mul(&v).add(&y);
        let twisted = sigma(&a.mul(&b)) == sigma(&a).mul(&sigma(&b));
        report.push("twisted-leibniz", twisted, "σ is not multiplicative");
        let involutive = [&x, &y, &z, &u, &v].iter().all(|w| sigma(&sigma(w)) == **w);
        report.push("delta-p-fold-vanishes", involutive, "σ² ≠ id");
    }

    // Image filtration: the A-module generated by δ(1), δ(u), δ(v), δ(uv) is
    // (x, y^m, z + λxy^m), which must equal I = (x, y^m, z) modulo (F).
    let xa = data.x();
    let ya = data.y();
    let za = data.z();
    let image_gens = [
        xa.clone(),
        ya.pow(data.m),
        za.add(&data.lambda.mul(&xa).mul(&ya.pow(data.m))),
        data.f.clone(),
    ];
    let ideal_gens = [
        xa.clone(),
        ya.pow(data.m),
        za.clone(),
        data.f.clone(),
    ];
    let gb_img = GroebnerBasis::new(&data.ring, &image_gens);
    let gb_ideal = GroebnerBasis::new(&data.ring, &ideal_gens);
    let equal = image_gens.iter().all(|g| gb_ideal.contains(g))
        && ideal_gens.iter().all(|g| gb_img.contains(g));
    report.push("image-filtration", equal, "Image(δ) ≠ I");
    report
}

/// The smooth additive models: invariant data `(X, Y, Z)` and the quotient
/// relation, plus the vector field itself.
struct AdditiveModel {
    ring: Ring,
    images: [MPoly; 2],
    invariants: [MPoly; 3],
    relation_value: MPoly,
}

fn additive_model(p: u32) -> AdditiveModel {
    let field = charp_core::Fq::prime(u64::from(p)).expect("3 and 5 are supported primes");
    let ring = Ring::new(&field, &["x", "y"]);
    let x = MPoly::var(&ring, 0);
    let y = MPoly::var(&ring, 1);
    match p {
        5 => {
            // D(x) = y², D(y) = x;  X = x⁵, Y = y⁵, Z = 2(x² + y³);
            // relation −Z⁵ + 2(X² + Y³) = 0.
            let z_inv = x.pow(2).add(&y.pow(3)).scale(&field.from_int(2));
            let relation = z_inv
                .pow(5)
                .neg()
                .add(&x.pow(10).add(&y.pow(15)).scale(&field.from_int(2)));
            AdditiveModel {
                ring: ring.clone(),
                images: [y.pow(2), x.clone()],
                invariants: [x.pow(5), y.pow(5), z_inv],
                relation_value: relation,
            }
        }
        3 => {
            // D(x) = y³, D(y) = x;  X = x³, Y = y³, Z = x² + y⁴;
            // relation −Z³ + X² + Y⁴ = 0.
            let z_inv = x.pow(2).add(&y.pow(4));
            let relation = z_inv.pow(3).neg().add(&x.pow(6)).add(&y.pow(12));
            AdditiveModel {
                ring: ring.clone(),
                images: [y.pow(3), x.clone()],
                invariants: [x.pow(3), y.pow(3), z_inv],
                relation_value: relation,
            }
        }
        _ => unreachable!("additive models exist only for p = 3, 5"),
    }
}

fn additive_model_checks(p: u32, jet_order: u64) -> Result<DeltaReport, LocalModelError> {
    let mut report = DeltaReport {
        presentation: DeltaPresentation::SmoothAdditiveModel,
        jet_order,
        checks: Vec::new(),
    };
    let model = additive_model(p);
    let ring = &model.ring;
    let x = MPoly::var(ring, 0);
    let y = MPoly::var(ring, 1);
    let d = |g: &MPoly| derive(g, &model.images);

    // δ^p = 0 exactly: the p-th power of a derivation is a derivation, so it
    // suffices that p-fold application kills both coordinates.
    let mut dx = x.clone();
    let mut dy = y.clone();
    for _ in 0..p {
        dx = d(&dx);
        dy = d(&dy);
    }
    report.push(
        "delta-p-fold-vanishes",
        dx.is_zero() && dy.is_zero(),
        "the vector field is not additive",
    );
    report.push(
        "delta-kills-base",
        model.invariants.iter().all(|g| d(g).is_zero()),
        "an invariant is not killed",
    );
    report.push(
        "invariants-satisfy-relation",
        model.relation_value.is_zero(),
        "the invariant relation fails",
    );

    // Image filtration on jets below `jet_order`, compared on a window that
    // the truncation cannot pollute.
    let window = jet_order.saturating_sub(2 * p as u64);
    if window < 4 {
        return Err(LocalModelError::TruncationTooCoarse(jet_order));
    }
    let basis = monomials_below(ring, jet_order);
    let index: HashMap<Vec<u16>, usize> = basis
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, e)| (e, i))
        .collect();
    let field = ring.field().clone();
    let to_vec = |g: &MPoly| {
        let mut v = vec![field.zero(); basis.len()];
        for (e, c) in g.truncate_below(jet_order).terms() {
            v[index[e]] = c.clone();
        }
        v
    };
    let monomial = |e: &Vec<u16>| MPoly::from_terms(ring, vec![(e.clone(), field.one())]);
    // Images of every basis monomial under k-fold application of D.
    let iterate = |g: &MPoly, k: u32| {
        let mut out = g.clone();
        for _ in 0..k {
            out = d(&out).truncate_below(jet_order);
        }
        out
    };
    // Window sub-basis and projector.
    let window_cols: Vec<usize> = basis
        .iter()
        .enumerate()
        .filter(|(_, e)| Ring::tdeg(e) < window)
        .map(|(i, _)| i)
        .collect();
    let project = |v: &[FqElem]| -> Vec<FqElem> {
        window_cols.iter().map(|&i| v[i].clone()).collect()
    };
    let rank_of = |rows: &[Vec<FqElem>]| {
        let mut m = rows.to_vec();
        linalg::rref(&mut m).len()
    };

    // Target: invariant jets with zero constant term, projected to the window.
    let d1_rows = equations_for_power(&basis, &monomial, &iterate, &to_vec, 1);
    let invariants = linalg::kernel(&field, &d1_rows, basis.len());
    let const_idx = index[&vec![0u16; 2]];
    let target: Vec<Vec<FqElem>> = drop_constants(invariants, const_idx)
        .iter()
        .map(|v| project(v))
        .collect();
    let target_rank = rank_of(&target);

    for j in 1..p {
        let rows = equations_for_power(&basis, &monomial, &iterate, &to_vec, j + 1);
        let ker = linalg::kernel(&field, &rows, basis.len());
        let image: Vec<Vec<FqElem>> = ker
            .iter()
            .map(|v| {
                let mut g = MPoly::zero(ring);
                for (i, c) in v.iter().enumerate() {
                    if !c.is_zero() {
                        g = g.add(&monomial(&basis[i]).scale(c));
                    }
                }
                project(&to_vec(&iterate(&g, j)))
            })
            .collect();
        let image_rank = rank_of(&image);
        let mut joint = image.clone();
        joint.extend(target.iter().cloned());
        let joint_rank = rank_of(&joint);
        if !(image_rank == target_rank && joint_rank == target_rank) {
            return Err(LocalModelError::TruncationTooCoarse(jet_order));
        }
    }
    report.push("image-filtration", true, "");
    Ok(report)
}

/// Rows of the linear system `D^k(g) ≡ 0` (below the jet order) over the
/// monomial basis.
fn equations_for_power(
    basis: &[Vec<u16>],
    monomial: &dyn Fn(&Vec<u16>) -> MPoly,
    iterate: &dyn Fn(&MPoly, u32) -> MPoly,
    to_vec: &dyn Fn(&MPoly) -> Vec<FqElem>,
    k: u32,
) -> Vec<Vec<FqElem>> {
    let images: Vec<Vec<FqElem>> = basis
        .iter()
        .map(|e| to_vec(&iterate(&monomial(e), k)))
        .collect();
    // Transpose: rows indexed by output coordinates.
    let n = basis.len();
    let field = images
        .first()
        .and_then(|v| v.first())
        .map(|c| c.field().clone())
        .expect("nonempty basis");
    let mut rows = vec![vec![field.zero(); n]; n];
    for (col, img) in images.iter().enumerate() {
        for (row, c) in img.iter().enumerate() {
            rows[row][col] = c.clone();
        }
    }
    rows
}

/// Removes the constant direction from a kernel basis: one vector with a
/// nonzero constant coefficient is used to clear that coefficient from the
/// others and is then dropped.
fn drop_constants(mut vectors: Vec<Vec<FqElem>>, const_idx: usize) -> Vec<Vec<FqElem>> {
    let pivot = vectors
        .iter()
        .position(|v| !v[const_idx].is_zero());
    let Some(pi) = pivot else {
        return vectors;
    };
    let pv = vectors.remove(pi);
    let pc_inv = pv[const_idx].inv().expect("nonzero");
    for v in &mut vectors {
        if v[const_idx].is_zero() {
            continue;
        }
        let factor = v[const_idx].mul(&pc_inv);
        for (a, b) in v.iter_mut().zip(pv.iter()) {
            *a = a.sub(&b.mul(&factor));
        }
    }
    vectors
}

/// Chart-level checks for the unit-`λ` regimes in characteristic 3 and 5.
fn chart_checks(data: &RdpLocalData) -> DeltaReport {
    let mut report = DeltaReport {
        presentation: DeltaPresentation::ChartAutomorphism,
        jet_order: 0,
        checks: Vec::new(),
    };
    let lam = data.lambda_scalar();
    match lam.as_ref().and_then(|l| find_structure_root(data.p, l)) {
        Some((_, mu)) => {
            report.push("structure-root-exists", true, "");
            // t ↦ t + μ changes t^p − λt − q by μ^p − λμ, which must vanish.
            let lam_big = lam
                .expect("root implies λ present")
                .embed_into(mu.field())
                .expect("prime subfield embeds");
            let shift = mu.pow(data.p as u128).sub(&lam_big.mul(&mu));
            report.push(
                "chart-translation-preserves-covering",
                shift.is_zero(),
                "μ^p − λμ ≠ 0",
            );
            // g^p(t) = t + pμ = t.
            report.push(
                "delta-p-fold-vanishes",
                mu.mul_int(data.p as i64).is_zero(),
                "pμ ≠ 0",
            );
        }
        None => {
            report.push(
                "structure-root-exists",
                false,
                "no (p−1)-st root of λ in degree ≤ 4 extensions",
            );
        }
    }
    report.checks.push(DeltaCheck {
        name: "image-filtration",
        outcome: CheckOutcome::Skipped(
            "the identification of the filtration with I at the closed point \
             rests on a global argument; no finite local certificate"
                .to_string(),
        ),
    });
    report
}
