//! Classification of isolated double points of surface germs
//! `F(x, y, z) = 0` over finite fields by explicit point blowups.
//!
//! The resolver blows up one singular point at a time, tracks every
//! exceptional curve through later blowups by an exact power-series
//! parametrization of its branches, and assembles the dual graph of the
//! final configuration.  Self-intersections need no per-step bookkeeping:
//! a point blowup at a multiplicity-2 point of a hypersurface is crepant
//! (the pullback of the surface minus twice the exceptional plane is the
//! strict transform, so the canonical class pulls back unchanged), and
//! every exceptional curve is a component of a plane conic, hence
//! rational; adjunction then forces E^2 = -2 whenever the multiplicity
//! stays 2 all the way down.  Any multiplicity >= 3 aborts the
//! resolution with a non-rational-double-point verdict before a wrong
//! self-intersection could ever be recorded.
//!
//! Coindices (the upper index decorating wild rational double points)
//! are read off from the Tjurina number, matched against a catalogue of
//! normal forms whose Tjurina numbers are computed once and cached.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use once_cell::sync::Lazy;

use charp_core::{
    local_quotient_dim, solve_zero_dim, CoreError, Fq, FqElem, MPoly, Ring, SolveResult, UPoly,
};
use charp_core::linalg;
use charp_lattice::{AdeClass, AdeFamily, Coindex, RdpType};

use crate::SingularError;

/// Default blowup budget of [`resolve`] and [`classify_germ`].
pub const DEFAULT_MAX_BLOWUPS: usize = 24;

/// Total-degree truncation of germs carried through the blowup tower.
/// Strict transforms lose at most two degrees of precision per blowup,
/// so this supports the full default budget with room to spare for the
/// catalogued equations (degree <= 26).
const GERM_TRUNC: u64 = 96;

/// t-adic truncation of branch parametrizations.
const SERIES_ORDER: u64 = 48;

/// Order to which `F(branch(t)) = 0` is asserted in debug builds.
const COMPOSE_CHECK_ORDER: u64 = 8;

/// Largest coefficient-field degree (over the prime field) the resolver
/// is willing to pass through when singular points or conic components
/// are defined over extensions.
const FIELD_CAP: usize = 16;

/// Dual graph of an exceptional configuration: one vertex per curve
/// with its self-intersection, and one entry per intersecting pair with
/// the local intersection multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraph {
    /// Self-intersection of each exceptional curve, indexed by curve id.
    pub self_intersections: Vec<i64>,
    /// `(i, j, multiplicity)` with `i < j` for each pair of curves that
    /// meet; `multiplicity` counts distinct intersection points.
    pub edges: Vec<(usize, usize, usize)>,
}

/// Outcome of [`resolve`].
#[derive(Debug, Clone)]
pub enum Resolution {
    /// The germ resolved by point blowups at multiplicity-2 points.
    Graph(DualGraph),
    /// Resolution impossible within the double-point regime; the string
    /// states the obstruction encountered.
    NonRdp(String),
}

/// Full classification of a surface germ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    /// The germ is a smooth point.
    Smooth,
    /// A rational double point with its lattice type and coindex.
    Rdp(RdpType),
    /// One of the three minimally elliptic double-point families that
    /// arise as quotient candidates; `degree` is the colength invariant
    /// attached to the family.
    EllipticDoublePoint { degree: u32, family: &'static str },
    /// Not a rational double point, with the reason.
    NonRdp(String),
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Smooth => write!(f, "smooth"),
            Classification::Rdp(t) => write!(f, "{t}"),
            Classification::EllipticDoublePoint { degree, family } => {
                write!(f, "elliptic double point of degree {degree} ({family})")
            }
            Classification::NonRdp(reason) => write!(f, "non-RDP: {reason}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Tjurina number
// ---------------------------------------------------------------------------

/// Dimension of the Tjurina algebra `k[[x...]]/(F, dF/dx_i)` of an
/// isolated hypersurface singularity.  Returns 0 for a smooth point and
/// `NotIsolated` when the singular locus is positive-dimensional.
pub fn tjurina(germ: &MPoly) -> Result<usize, SingularError> {
    let ring = germ.ring();
    assert!(!germ.is_zero(), "tjurina requires a nonzero germ");
    assert!(
        germ.constant_term().is_zero(),
        "tjurina requires a germ vanishing at the origin"
    );
    let mut gens = vec![germ.clone()];
    for i in 0..ring.nvars() {
        gens.push(germ.partial(i));
    }
    match local_quotient_dim(&gens) {
        Ok(res) => res.finite().ok_or(SingularError::NotIsolated),
        // A unit partial derivative means a nonzero linear part: smooth.
        Err(CoreError::ConstantTermPresent(_)) => Ok(0),
        Err(e) => Err(SingularError::Core(e)),
    }
}

// ---------------------------------------------------------------------------
// Tangent-cone conics
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum ConicShape {
    /// Smooth irreducible conic: one rational exceptional curve.
    Smooth,
    /// Two distinct lines crossing at `node` (coefficient vectors of the
    /// lines and coordinates of the node, possibly over an extension).
    TwoLines { lines: [[FqElem; 3]; 2], node: [FqElem; 3] },
    /// A line counted twice in the cone; the exceptional curve is the
    /// reduced line.
    DoubleLine { line: [FqElem; 3] },
}

#[derive(Debug, Clone)]
enum CurveGeom {
    Line([FqElem; 3]),
    Conic,
}

fn coeff_of(q: &MPoly, exps: [u16; 3]) -> FqElem {
    for (e, c) in q.terms() {
        if e[..] == exps[..] {
            return c.clone();
        }
    }
    q.ring().field().zero()
}

fn unit_triple(field: &Fq, i: usize) -> [FqElem; 3] {
    let mut v = [field.zero(), field.zero(), field.zero()];
    v[i] = field.one();
    v
}

fn add3(a: &[FqElem; 3], b: &[FqElem; 3]) -> [FqElem; 3] {
    [a[0].add(&b[0]), a[1].add(&b[1]), a[2].add(&b[2])]
}

fn dot3(a: &[FqElem; 3], b: &[FqElem; 3]) -> FqElem {
    a[0].mul(&b[0]).add(&a[1].mul(&b[1])).add(&a[2].mul(&b[2]))
}

fn cross3(a: &[FqElem; 3], b: &[FqElem; 3]) -> [FqElem; 3] {
    [
        a[1].mul(&b[2]).sub(&a[2].mul(&b[1])),
        a[2].mul(&b[0]).sub(&a[0].mul(&b[2])),
        a[0].mul(&b[1]).sub(&a[1].mul(&b[0])),
    ]
}

fn embed3(v: &[FqElem; 3], target: &Fq) -> Result<[FqElem; 3], SingularError> {
    Ok([
        v[0].embed_into(target)?,
        v[1].embed_into(target)?,
        v[2].embed_into(target)?,
    ])
}

/// Scale a projective coordinate triple so its first nonzero entry is 1.
fn normalize3(v: &[FqElem; 3]) -> [FqElem; 3] {
    let k = (0..3).find(|&i| !v[i].is_zero()).expect("nonzero projective point");
    let inv = v[k].inv().expect("nonzero element inverts");
    [v[0].mul(&inv), v[1].mul(&inv), v[2].mul(&inv)]
}

type P2Key = (u128, u128, u128);

fn p2_key(v: &[FqElem; 3]) -> P2Key {
    let n = normalize3(v);
    (
        n[0].canonical_index(),
        n[1].canonical_index(),
        n[2].canonical_index(),
    )
}

/// Decide the shape of a nonzero ternary quadratic form.  May extend the
/// coefficient field to split a pair of conjugate lines; all returned
/// elements then live in the extension.
fn conic_shape(q: &MPoly) -> Result<ConicShape, String> {
    let field = q.ring().field().clone();
    let p = field.p();
    let a = coeff_of(q, [2, 0, 0]);
    let b = coeff_of(q, [0, 2, 0]);
    let c = coeff_of(q, [0, 0, 2]);
    let d = coeff_of(q, [1, 1, 0]);
    let e = coeff_of(q, [1, 0, 1]);
    let f = coeff_of(q, [0, 1, 1]);
    if p == 2 {
        if d.is_zero() && e.is_zero() && f.is_zero() {
            // A cross-term-free form in characteristic 2 is the square of
            // a line with square-rooted coefficients.
            let line = [a.pth_root(), b.pth_root(), c.pth_root()];
            return Ok(ConicShape::DoubleLine { line });
        }
        // With cross terms present the form is never a perfect square;
        // the kernel of its polar (alternating) matrix is spanned by
        // [f : e : d], the unique candidate singular point.
        let node = [f, e, d];
        if q.eval(&node).is_zero() {
            two_lines_at_node(q, node)
        } else {
            Ok(ConicShape::Smooth)
        }
    } else {
        let half = field.from_int(2).inv().expect("2 invertible in odd characteristic");
        let m = vec![
            vec![a.clone(), d.mul(&half), e.mul(&half)],
            vec![d.mul(&half), b.clone(), f.mul(&half)],
            vec![e.mul(&half), f.mul(&half), c.clone()],
        ];
        let mut work = m.clone();
        let rank = linalg::rref(&mut work).len();
        match rank {
            3 => Ok(ConicShape::Smooth),
            2 => {
                let ker = linalg::kernel(&field, &m, 3);
                assert_eq!(ker.len(), 1, "rank-2 symmetric form has a line of kernel");
                let node = [ker[0][0].clone(), ker[0][1].clone(), ker[0][2].clone()];
                two_lines_at_node(q, node)
            }
            1 => {
                let row = m
                    .iter()
                    .find(|r| r.iter().any(|x| !x.is_zero()))
                    .expect("nonzero form has a nonzero polar row");
                Ok(ConicShape::DoubleLine {
                    line: [row[0].clone(), row[1].clone(), row[2].clone()],
                })
            }
            _ => Err("degenerate zero tangent cone".to_string()),
        }
    }
}

/// Split a rank-2 form into its two lines through the given singular
/// point of the conic.
fn two_lines_at_node(q: &MPoly, node: [FqElem; 3]) -> Result<ConicShape, String> {
    let field = q.ring().field().clone();
    let k = (0..3)
        .find(|&i| !node[i].is_zero())
        .expect("conic node is a nonzero point");
    let others: Vec<usize> = (0..3).filter(|&i| i != k).collect();
    let (i, j) = (others[0], others[1]);
    let ei = unit_triple(&field, i);
    let ej = unit_triple(&field, j);
    // Polarized restriction of the form to the plane spanned by e_i, e_j:
    // Q(s e_i + r e_j) = A s^2 + B s r + C r^2, with B found by evaluation
    // so the same formula works in every characteristic.
    let aa = q.eval(&ei);
    let cc = q.eval(&ej);
    let bb = q.eval(&add3(&ei, &ej)).sub(&aa).sub(&cc);
    let (dirs, big) = split_binary_quadratic(&field, &aa, &bb, &cc)?;
    let node_big = embed3(&node, &big).map_err(|_| "field embedding failed".to_string())?;
    let mut lines = Vec::with_capacity(2);
    for (s, r) in dirs {
        let mut dir = [big.zero(), big.zero(), big.zero()];
        dir[i] = s;
        dir[j] = r;
        debug_assert!(
            q.eval(&dir).is_zero(),
            "root direction must lie on the conic"
        );
        lines.push(cross3(&node_big, &dir));
    }
    Ok(ConicShape::TwoLines {
        lines: [lines[0].clone(), lines[1].clone()],
        node: node_big,
    })
}

/// Distinct projective roots `(s : r)` of `A s^2 + B s r + C r^2`,
/// extending the field by degree 2 when the roots are conjugate.
/// Returns the roots together with the field they live in.
#[allow(clippy::type_complexity)]
fn split_binary_quadratic(
    field: &Fq,
    a: &FqElem,
    b: &FqElem,
    c: &FqElem,
) -> Result<(Vec<(FqElem, FqElem)>, Fq), String> {
    if a.is_zero() {
        if b.is_zero() {
            return Err("tangent cone factors with a repeated line".to_string());
        }
        // s r (B + C r/s): roots (1 : 0) and (C : -B).
        return Ok((
            vec![
                (field.one(), field.zero()),
                (c.clone(), b.neg()),
            ],
            field.clone(),
        ));
    }
    let quad = UPoly::new(field, vec![c.clone(), b.clone(), a.clone()]);
    let roots = quad.roots_in_field();
    match roots.len() {
        2 => Ok((
            roots.into_iter().map(|t| (t, field.one())).collect(),
            field.clone(),
        )),
        0 => {
            let deg = field.degree() * 2;
            if deg > FIELD_CAP {
                return Err(format!(
                    "splitting the tangent cone needs a degree-{deg} coefficient field"
                ));
            }
            let big = Fq::new(field.p(), deg)
                .map_err(|_| "field extension unavailable".to_string())?;
            let a2 = a.embed_into(&big).map_err(|_| "embed failed".to_string())?;
            let b2 = b.embed_into(&big).map_err(|_| "embed failed".to_string())?;
            let c2 = c.embed_into(&big).map_err(|_| "embed failed".to_string())?;
            let quad2 = UPoly::new(&big, vec![c2, b2, a2]);
            let roots2 = quad2.roots_in_field();
            if roots2.len() != 2 {
                return Err("tangent cone factors with a repeated line".to_string());
            }
            Ok((
                roots2.into_iter().map(|t| (t, big.one())).collect(),
                big,
            ))
        }
        _ => Err("tangent cone factors with a repeated line".to_string()),
    }
}

// ---------------------------------------------------------------------------
// Series helpers for branch parametrizations (one-variable rings)
// ---------------------------------------------------------------------------

fn shift_down(f: &MPoly, k: u64) -> MPoly {
    let terms = f
        .terms()
        .iter()
        .map(|(e, c)| {
            let mut e2 = e.clone();
            assert!(u64::from(e2[0]) >= k, "series shift below valuation");
            e2[0] -= k as u16;
            (e2, c.clone())
        })
        .collect();
    MPoly::from_terms(f.ring(), terms)
}

/// Newton solve of `q2(v, w) = 0` near a point `(v0, w0)` where the
/// partial in the solved variable is a unit; returns the series `s(t)`
/// (valuation >= 1) with `q2` vanishing along the parametrization that
/// sets the other variable to its base value plus `t`.
fn newton_plane_series(
    q2: &MPoly,
    v0: &FqElem,
    w0: &FqElem,
    solve_idx: usize,
    tring: &Ring,
) -> MPoly {
    let t = MPoly::var(tring, 0);
    let c0 = MPoly::constant(tring, v0.clone());
    let c1 = MPoly::constant(tring, w0.clone());
    let dq2 = q2.partial(solve_idx);
    let mut s = MPoly::zero(tring);
    for _ in 0..10 {
        let imgs = if solve_idx == 1 {
            [c0.add(&t), c1.add(&s)]
        } else {
            [c0.add(&s), c1.add(&t)]
        };
        let r = q2.subst(&imgs).truncate_below(SERIES_ORDER);
        if r.is_zero() {
            break;
        }
        let d = dq2.subst(&imgs).truncate_below(SERIES_ORDER);
        let dinv = d
            .invert_jet(SERIES_ORDER)
            .expect("derivative is a unit at a smooth curve point");
        s = s.sub(&r.mul(&dinv)).truncate_below(SERIES_ORDER);
    }
    debug_assert!(
        {
            let imgs = if solve_idx == 1 {
                [c0.add(&t), c1.add(&s)]
            } else {
                [c0.add(&s), c1.add(&t)]
            };
            q2.subst(&imgs).truncate_below(SERIES_ORDER).is_zero()
        },
        "Newton series failed to converge"
    );
    s
}

// ---------------------------------------------------------------------------
// The resolver
// ---------------------------------------------------------------------------

#[derive(Clone)]
struct Branch {
    curve: usize,
    comps: [MPoly; 3],
    /// t-adic order to which the components are certified accurate.
    precision: u64,
}

struct Site {
    germ: MPoly,
    branches: Vec<Branch>,
}

struct Resolver {
    max_blowups: usize,
    processed: usize,
    next_curve: usize,
    edges: BTreeMap<(usize, usize), usize>,
    queue: VecDeque<Site>,
}

fn plane_positions(chart: usize) -> (usize, usize) {
    match chart {
        0 => (1, 2),
        1 => (0, 2),
        2 => (0, 1),
        _ => unreachable!("three charts"),
    }
}

/// Strict transform of a multiplicity-2 germ in the chart where the
/// blown-up variable is `x_c`: substitute `x_j -> x_c x_j` for `j != c`
/// and divide by `x_c^2`.
fn blowup_strict(f: &MPoly, c: usize) -> MPoly {
    let ring = f.ring();
    let imgs: Vec<MPoly> = (0..3)
        .map(|j| {
            if j == c {
                MPoly::var(ring, c)
            } else {
                MPoly::var(ring, c).mul(&MPoly::var(ring, j))
            }
        })
        .collect();
    let g = f.subst(&imgs);
    let terms = g
        .terms()
        .iter()
        .map(|(e, cf)| {
            let mut e2 = e.clone();
            assert!(e2[c] >= 2, "total transform is divisible by the square");
            e2[c] -= 2;
            (e2, cf.clone())
        })
        .collect();
    MPoly::from_terms(ring, terms).truncate_below(GERM_TRUNC)
}

/// Restriction of a chart polynomial to the exceptional plane `x_c = 0`,
/// rewritten in the two remaining variables.
fn restrict_to_plane(f: &MPoly, c: usize, plane: &Ring) -> MPoly {
    let (a, b) = plane_positions(c);
    let terms = f
        .terms()
        .iter()
        .filter(|(e, _)| e[c] == 0)
        .map(|(e, cf)| (vec![e[a], e[b]], cf.clone()))
        .collect();
    MPoly::from_terms(plane, terms)
}

fn gcd_usize(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

fn lcm_usize(a: usize, b: usize) -> usize {
    if a == 0 || b == 0 {
        return a.max(b);
    }
    a / gcd_usize(a, b) * b
}

struct PendingSite {
    chart: usize,
    v0: FqElem,
    w0: FqElem,
    homog: [FqElem; 3],
    germ: MPoly,
    branches: Vec<Branch>,
}

impl Resolver {
    fn fresh_curve(&mut self) -> usize {
        let id = self.next_curve;
        self.next_curve += 1;
        id
    }

    /// Blow up one singular point.  `Ok(Some(reason))` aborts the whole
    /// resolution with a non-RDP verdict.
    fn process_site(&mut self, site: Site) -> Result<Option<String>, SingularError> {
        let f = &site.germ;
        let ring0 = f.ring().clone();
        let field0 = ring0.field().clone();
        let p = field0.p();
        let mult = f.low_tdeg().expect("site germ is nonzero");
        if mult >= 3 {
            return Ok(Some(format!(
                "a point of multiplicity {mult} appears in the blowup tower"
            )));
        }
        assert_eq!(mult, 2, "sites are singular points of a double-point germ");
        let q = f.homogeneous_part(2);
        let shape = match conic_shape(&q) {
            Ok(s) => s,
            Err(reason) => return Ok(Some(reason)),
        };

        // Strict transforms and their singular points on the exceptional
        // plane, chart by chart, with the overlap removed: the chart-1
        // list keeps only points invisible from chart 0, and chart 2 only
        // the single point invisible from both.
        let mut strict: Vec<MPoly> = Vec::with_capacity(3);
        let mut found: Vec<(usize, Vec<FqElem>)> = Vec::new();
        for c in 0..3 {
            let st = blowup_strict(f, c);
            let (a, b) = plane_positions(c);
            let names = ring0.names();
            let plane = Ring::new(&field0, &[names[a], names[b]]);
            let mut gens = vec![restrict_to_plane(&st, c, &plane)];
            for i in 0..3 {
                let pi = restrict_to_plane(&st.partial(i), c, &plane);
                if !pi.is_zero() {
                    gens.push(pi);
                }
            }
            match solve_zero_dim(&plane, &gens) {
                Ok(SolveResult::ZeroDim { points, .. }) => {
                    for pt in points {
                        let keep = match c {
                            0 => true,
                            1 => pt[0].is_zero(),
                            _ => pt[0].is_zero() && pt[1].is_zero(),
                        };
                        if keep {
                            found.push((c, pt));
                        }
                    }
                }
                Ok(SolveResult::Curve { .. }) => {
                    return Ok(Some(
                        "the strict transform is singular along a curve of the exceptional plane"
                            .to_string(),
                    ));
                }
                Err(CoreError::ExtensionTooLarge(k)) => {
                    return Ok(Some(format!(
                        "singular points need a splitting field of degree {k}"
                    )));
                }
                Err(CoreError::NotZeroDimAndNotCurve(d)) => {
                    return Ok(Some(format!(
                        "the singular locus after blowup has dimension {d}"
                    )));
                }
                Err(e) => return Err(SingularError::Core(e)),
            }
            strict.push(st);
        }

        // Compositum of every field the next stage needs.
        let mut need = field0.degree();
        match &shape {
            ConicShape::TwoLines { lines, .. } => {
                need = lcm_usize(need, lines[0][0].field().degree());
            }
            ConicShape::DoubleLine { line } => {
                need = lcm_usize(need, line[0].field().degree());
            }
            ConicShape::Smooth => {}
        }
        for (_, pt) in &found {
            for coord in pt {
                need = lcm_usize(need, coord.field().degree());
            }
        }
        if need > FIELD_CAP {
            return Ok(Some(format!(
                "the resolution needs degree-{need} coefficients over the prime field"
            )));
        }
        let bigfield = if need == field0.degree() {
            field0.clone()
        } else {
            Fq::new(p, need)?
        };
        let names0 = ring0.names();
        let ring3 = Ring::new(&bigfield, &names0);
        let tring = Ring::new(&bigfield, &["t"]);
        let strict: Vec<MPoly> = strict
            .iter()
            .map(|s| s.embed_into(&ring3))
            .collect::<Result<_, _>>()?;
        let qk = q.embed_into(&ring3)?;
        let shape = match shape {
            ConicShape::Smooth => ConicShape::Smooth,
            ConicShape::DoubleLine { line } => ConicShape::DoubleLine {
                line: embed3(&line, &bigfield)?,
            },
            ConicShape::TwoLines { lines, node } => ConicShape::TwoLines {
                lines: [embed3(&lines[0], &bigfield)?, embed3(&lines[1], &bigfield)?],
                node: embed3(&node, &bigfield)?,
            },
        };

        // One exceptional curve per reduced component of the cone.
        let curve_geoms: Vec<(usize, CurveGeom)> = match &shape {
            ConicShape::Smooth => vec![(self.fresh_curve(), CurveGeom::Conic)],
            ConicShape::DoubleLine { line } => {
                vec![(self.fresh_curve(), CurveGeom::Line(line.clone()))]
            }
            ConicShape::TwoLines { lines, .. } => vec![
                (self.fresh_curve(), CurveGeom::Line(lines[0].clone())),
                (self.fresh_curve(), CurveGeom::Line(lines[1].clone())),
            ],
        };

        // Sites of the next level.
        let mut pend: Vec<PendingSite> = Vec::new();
        let mut keymap: BTreeMap<P2Key, usize> = BTreeMap::new();
        for (c, pt) in found {
            let v0 = pt[0].embed_into(&bigfield)?;
            let w0 = pt[1].embed_into(&bigfield)?;
            let (a, b) = plane_positions(c);
            let mut homog = [bigfield.zero(), bigfield.zero(), bigfield.zero()];
            homog[c] = bigfield.one();
            homog[a] = v0.clone();
            homog[b] = w0.clone();
            let key = p2_key(&homog);
            if keymap.contains_key(&key) {
                continue;
            }
            let mut imgs: Vec<MPoly> = (0..3).map(|i| MPoly::var(&ring3, i)).collect();
            imgs[a] = imgs[a].add(&MPoly::constant(&ring3, v0.clone()));
            imgs[b] = imgs[b].add(&MPoly::constant(&ring3, w0.clone()));
            let germ = strict[c].subst(&imgs).truncate_below(GERM_TRUNC);
            assert!(
                germ.constant_term().is_zero(),
                "enumerated point lies on the strict transform"
            );
            assert!(
                germ.low_tdeg().map_or(false, |m| m >= 2),
                "enumerated point is singular on the strict transform"
            );
            keymap.insert(key, pend.len());
            pend.push(PendingSite {
                chart: c,
                v0,
                w0,
                homog,
                germ,
                branches: Vec::new(),
            });
        }

        // Transform the incoming branches: where an old exceptional curve
        // lands decides whether it attaches to a deeper site or records a
        // transversal crossing on the new exceptional curve.
        let mut arrivals: BTreeMap<P2Key, ([FqElem; 3], BTreeSet<usize>)> = BTreeMap::new();
        for br in &site.branches {
            let comps: Vec<MPoly> = br
                .comps
                .iter()
                .map(|c| c.embed_into(&tring))
                .collect::<Result<_, _>>()?;
            let vals: Vec<u64> = comps
                .iter()
                .map(|c| c.low_tdeg().unwrap_or(u64::MAX))
                .collect();
            let vmin = *vals.iter().min().expect("three components");
            assert!(vmin < u64::MAX, "branch has a nonzero component");
            let cbr = vals.iter().position(|&v| v == vmin).expect("min exists");
            let unit = shift_down(&comps[cbr], vmin);
            let inv = unit
                .invert_jet(SERIES_ORDER)
                .expect("lowest-order coefficient is a unit");
            let mut divided: Vec<MPoly> = Vec::with_capacity(3);
            for (i, comp) in comps.iter().enumerate() {
                if i == cbr || comp.is_zero() {
                    divided.push(comp.clone());
                } else {
                    divided.push(
                        shift_down(comp, vmin)
                            .mul(&inv)
                            .truncate_below(SERIES_ORDER),
                    );
                }
            }
            let (a, b) = plane_positions(cbr);
            let v_land = divided[a].constant_term();
            let w_land = divided[b].constant_term();
            let mut homog = [bigfield.zero(), bigfield.zero(), bigfield.zero()];
            homog[cbr] = bigfield.one();
            homog[a] = v_land.clone();
            homog[b] = w_land.clone();
            let key = p2_key(&homog);
            let precision = br.precision.saturating_sub(2 * vmin);
            if let Some(&si) = keymap.get(&key) {
                let ps = &mut pend[si];
                assert_eq!(
                    ps.chart, cbr,
                    "landing chart agrees with the canonical chart of the site"
                );
                let mut comps_site: Vec<MPoly> = Vec::with_capacity(3);
                for (i, dcomp) in divided.iter().enumerate() {
                    let mut comp = dcomp.clone();
                    if i == a {
                        comp = comp.sub(&MPoly::constant(&tring, ps.v0.clone()));
                    }
                    if i == b {
                        comp = comp.sub(&MPoly::constant(&tring, ps.w0.clone()));
                    }
                    comps_site.push(comp);
                }
                ps.branches.push(Branch {
                    curve: br.curve,
                    comps: comps_site.try_into().expect("three components"),
                    precision,
                });
            } else {
                arrivals
                    .entry(key)
                    .or_insert_with(|| (homog.clone(), BTreeSet::new()))
                    .1
                    .insert(br.curve);
            }
        }

        // Attach the new exceptional curves to every deeper site they
        // pass through, with an exact local parametrization.
        for (id, geom) in &curve_geoms {
            for ps in pend.iter_mut() {
                let passes = match geom {
                    CurveGeom::Line(l) => dot3(l, &ps.homog).is_zero(),
                    CurveGeom::Conic => {
                        debug_assert!(qk.eval(&ps.homog).is_zero());
                        true
                    }
                };
                if !passes {
                    continue;
                }
                let comps = match geom {
                    CurveGeom::Line(l) => line_branch(l, ps.chart, &tring),
                    CurveGeom::Conic => conic_branch(&qk, ps.chart, &ps.v0, &ps.w0, &tring),
                };
                ps.branches.push(Branch {
                    curve: *id,
                    comps,
                    precision: SERIES_ORDER,
                });
            }
        }

        // A pair of exceptional lines crossing at a smooth surface point
        // meets transversally there: record the edge.
        if let ConicShape::TwoLines { node, .. } = &shape {
            let nkey = p2_key(node);
            if !keymap.contains_key(&nkey) {
                let entry = arrivals
                    .entry(nkey)
                    .or_insert_with(|| (normalize3(node), BTreeSet::new()));
                for (id, _) in &curve_geoms {
                    entry.1.insert(*id);
                }
            }
        }

        // Every arrival point lies on the exceptional conic; add the new
        // components through it and record one edge per incident pair.
        for (_key, (homog, mut set)) in arrivals {
            for (id, geom) in &curve_geoms {
                let on = match geom {
                    CurveGeom::Line(l) => dot3(l, &homog).is_zero(),
                    CurveGeom::Conic => {
                        debug_assert!(qk.eval(&homog).is_zero());
                        true
                    }
                };
                if on {
                    set.insert(*id);
                }
            }
            let ids: Vec<usize> = set.into_iter().collect();
            for i in 0..ids.len() {
                for j in i + 1..ids.len() {
                    *self.edges.entry((ids[i], ids[j])).or_insert(0) += 1;
                }
            }
        }

        for ps in pend {
            #[cfg(debug_assertions)]
            for br in &ps.branches {
                if br.precision >= COMPOSE_CHECK_ORDER {
                    let imgs: Vec<MPoly> = br.comps.to_vec();
                    let res = ps.germ.subst(&imgs).truncate_below(COMPOSE_CHECK_ORDER);
                    debug_assert!(
                        res.is_zero(),
                        "branch parametrization stays on the strict transform"
                    );
                }
            }
            self.queue.push_back(Site {
                germ: ps.germ,
                branches: ps.branches,
            });
        }
        Ok(None)
    }
}

/// Linear parametrization (shifted to the site origin) of a line through
/// the singular point, inside the affine chart of the site.
fn line_branch(l: &[FqElem; 3], chart: usize, tring: &Ring) -> [MPoly; 3] {
    let (a, b) = plane_positions(chart);
    let t = MPoly::var(tring, 0);
    let da = l[b].clone();
    let db = l[a].neg();
    debug_assert!(
        !(da.is_zero() && db.is_zero()),
        "a line through the chart is not the plane at infinity"
    );
    let mut comps = [
        MPoly::zero(tring),
        MPoly::zero(tring),
        MPoly::zero(tring),
    ];
    comps[a] = t.scale(&da);
    comps[b] = t.scale(&db);
    comps[chart] = MPoly::zero(tring);
    comps
}

/// Series parametrization (shifted to the site origin) of a smooth conic
/// through the singular point, solving the dehomogenized equation by
/// Newton iteration in the direction whose derivative is a unit.
fn conic_branch(
    qk: &MPoly,
    chart: usize,
    v0: &FqElem,
    w0: &FqElem,
    tring: &Ring,
) -> [MPoly; 3] {
    let ring3 = qk.ring();
    let field = ring3.field();
    let plane = Ring::new(field, &["u", "v"]);
    let (a, b) = plane_positions(chart);
    let mut imgs = vec![MPoly::one(&plane); 3];
    imgs[a] = MPoly::var(&plane, 0);
    imgs[b] = MPoly::var(&plane, 1);
    imgs[chart] = MPoly::one(&plane);
    let q2 = qk.subst(&imgs);
    let point = [v0.clone(), w0.clone()];
    let qv = q2.partial(0).eval(&point);
    let qw = q2.partial(1).eval(&point);
    assert!(
        !(qv.is_zero() && qw.is_zero()),
        "every point of a smooth conic is a smooth curve point"
    );
    let t = MPoly::var(tring, 0);
    let mut comps = [
        MPoly::zero(tring),
        MPoly::zero(tring),
        MPoly::zero(tring),
    ];
    if !qw.is_zero() {
        let s = newton_plane_series(&q2, v0, w0, 1, tring);
        comps[a] = t;
        comps[b] = s;
    } else {
        let s = newton_plane_series(&q2, v0, w0, 0, tring);
        comps[a] = s;
        comps[b] = t;
    }
    comps[chart] = MPoly::zero(tring);
    comps
}

/// Resolve an isolated double-point germ `F(x, y, z)` by iterated point
/// blowups, returning the dual graph of the exceptional configuration or
/// the obstruction that shows the germ is not a rational double point.
pub fn resolve(germ: &MPoly, max_blowups: usize) -> Result<Resolution, SingularError> {
    let ring = germ.ring();
    assert_eq!(ring.nvars(), 3, "resolution expects a three-variable germ");
    assert!(!germ.is_zero(), "resolution expects a nonzero germ");
    assert!(
        germ.constant_term().is_zero(),
        "resolution expects a germ vanishing at the origin"
    );
    let _tau = tjurina(germ)?;
    let mult = germ.low_tdeg().expect("nonzero germ");
    assert!(mult >= 2, "resolution expects a singular germ");
    if mult >= 3 {
        return Ok(Resolution::NonRdp(format!(
            "the germ has multiplicity {mult}"
        )));
    }
    let mut r = Resolver {
        max_blowups,
        processed: 0,
        next_curve: 0,
        edges: BTreeMap::new(),
        queue: VecDeque::new(),
    };
    r.queue.push_back(Site {
        germ: germ.truncate_below(GERM_TRUNC),
        branches: Vec::new(),
    });
    while let Some(site) = r.queue.pop_front() {
        if r.processed >= r.max_blowups {
            return Ok(Resolution::NonRdp(format!(
                "no resolution within {max_blowups} point blowups"
            )));
        }
        r.processed += 1;
        if let Some(reason) = r.process_site(site)? {
            return Ok(Resolution::NonRdp(reason));
        }
    }
    // Crepancy of multiplicity-2 point blowups plus adjunction on the
    // rational exceptional components pins every self-intersection at -2.
    Ok(Resolution::Graph(DualGraph {
        self_intersections: vec![-2; r.next_curve],
        edges: r.edges.into_iter().map(|((i, j), m)| (i, j, m)).collect(),
    }))
}

// ---------------------------------------------------------------------------
// ADE recognition
// ---------------------------------------------------------------------------

impl DualGraph {
    /// Number of exceptional curves.
    pub fn len(&self) -> usize {
        self.self_intersections.len()
    }

    /// True when the graph has no vertices.
    pub fn is_empty(&self) -> bool {
        self.self_intersections.is_empty()
    }

    /// Recognize the graph as an ADE diagram: a tree of (-2)-curves with
    /// simple intersections, all vertex degrees at most 3, and at most
    /// one degree-3 fork whose arms have the right lengths.
    pub fn ade_type(&self) -> Option<AdeClass> {
        let n = self.len();
        if n == 0 || n > u32::MAX as usize {
            return None;
        }
        if self.self_intersections.iter().any(|&s| s != -2) {
            return None;
        }
        if self.edges.iter().any(|&(i, j, m)| m != 1 || i == j || i >= n || j >= n) {
            return None;
        }
        if self.edges.len() != n - 1 {
            return None;
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(i, j, _) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        // Connectivity (tree with n-1 edges is connected iff acyclic, so
        // one check suffices; do the walk anyway for robustness).
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count != n {
            return None;
        }
        if adj.iter().any(|nb| nb.len() > 3) {
            return None;
        }
        let forks: Vec<usize> = (0..n).filter(|&v| adj[v].len() == 3).collect();
        match forks.len() {
            0 => Some(AdeClass::a(n as u32)),
            1 => {
                let fk = forks[0];
                let mut arms: Vec<u32> = adj[fk]
                    .iter()
                    .map(|&nb| {
                        let mut len = 1u32;
                        let mut prev = fk;
                        let mut cur = nb;
                        loop {
                            let next: Vec<usize> =
                                adj[cur].iter().copied().filter(|&w| w != prev).collect();
                            match next.len() {
                                0 => break,
                                1 => {
                                    prev = cur;
                                    cur = next[0];
                                    len += 1;
                                }
                                _ => unreachable!("single fork means arms are paths"),
                            }
                        }
                        len
                    })
                    .collect();
                arms.sort_unstable();
                match arms[..] {
                    [1, 1, k] => Some(AdeClass::d(k + 3)),
                    [1, 2, 2] => Some(AdeClass::e(6)),
                    [1, 2, 3] => Some(AdeClass::e(7)),
                    [1, 2, 4] => Some(AdeClass::e(8)),
                    _ => None,
                }
            }
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Elliptic double-point screen
// ---------------------------------------------------------------------------

type EllipticFamily = ([u64; 3], u64, [[u16; 3]; 3], u32, &'static str);

/// The three weighted-homogeneous leading forms of the elliptic double
/// points that occur as quotient candidates, with weights on (X, Y, Z),
/// the total weight, the supporting monomials, and the colength degree.
const ELLIPTIC_FAMILIES: [EllipticFamily; 3] = [
    ([14, 6, 21], 42, [[3, 0, 0], [0, 7, 0], [0, 0, 2]], 12, "Z^2+X^3+Y^7"),
    ([8, 6, 15], 30, [[3, 1, 0], [0, 5, 0], [0, 0, 2]], 11, "Z^2+X^3*Y+Y^5"),
    ([6, 4, 11], 22, [[3, 1, 0], [1, 4, 0], [0, 0, 2]], 12, "Z^2+X^3*Y+X*Y^4"),
];

const VAR_PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Detect the three catalogued elliptic families by their weighted
/// leading form, over every assignment of germ variables to the roles
/// (X, Y, Z).  The supports are exactly the monomials of minimal
/// weighted degree, so a match identifies the family regardless of the
/// coefficients and of any higher-order perturbation.
fn elliptic_screen(germ: &MPoly) -> Option<(u32, &'static str)> {
    for perm in VAR_PERMUTATIONS {
        for (weights, total, support, degree, family) in ELLIPTIC_FAMILIES {
            let mut wv = [0u64; 3];
            for (role, &var) in perm.iter().enumerate() {
                wv[var] = weights[role];
            }
            let wdeg = |e: &[u16]| -> u64 {
                e.iter()
                    .zip(wv.iter())
                    .map(|(&x, &w)| u64::from(x) * w)
                    .sum()
            };
            let dmin = germ.terms().iter().map(|(e, _)| wdeg(e)).min()?;
            if dmin != total {
                continue;
            }
            let sup: BTreeSet<[u16; 3]> = germ
                .terms()
                .iter()
                .filter(|(e, _)| wdeg(e) == total)
                .map(|(e, _)| [e[perm[0]], e[perm[1]], e[perm[2]]])
                .collect();
            let want: BTreeSet<[u16; 3]> = support.iter().copied().collect();
            if sup == want {
                return Some((degree, family));
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Normal-form catalogue and coindex lookup
// ---------------------------------------------------------------------------

/// True when the pair (characteristic, lattice type) admits nontrivial
/// coindices, i.e. the resolution is a purely inseparable quotient in a
/// way the tame theory excludes.
fn is_wild(p: u64, class: AdeClass) -> bool {
    matches!(
        (p, class.family),
        (2, AdeFamily::D) | (2, AdeFamily::E) | (3, AdeFamily::E)
    ) || (p == 5 && class == AdeClass::e(8))
}

/// Catalogued wild normal form for `(p, class, coindex)`, when one exists.
fn wild_form(p: u64, class: AdeClass, r: u32) -> Option<MPoly> {
    let fq = Fq::prime(p).ok()?;
    let ring = Ring::new(&fq, &["x", "y", "z"]);
    let one = fq.one();
    let t = |e: [u16; 3]| (e.to_vec(), one.clone());
    let from = |terms: Vec<(Vec<u16>, FqElem)>| Some(MPoly::from_terms(&ring, terms));
    match (p, class.family) {
        (2, AdeFamily::D) => {
            let n = class.index;
            if n % 2 == 0 {
                let m = n / 2;
                if m < 2 || m > 12 {
                    return None;
                }
                if r == 0 {
                    // z^2 + x^2 y + x y^m
                    from(vec![t([0, 0, 2]), t([2, 1, 0]), t([1, m as u16, 0])])
                } else {
                    if n % 4 != 0 {
                        return None;
                    }
                    let m4 = n / 4;
                    if r > m4 {
                        return None;
                    }
                    // z^2 + x^2 y + x y^(2 m4) + z x y^(2 m4 - r)
                    from(vec![
                        t([0, 0, 2]),
                        t([2, 1, 0]),
                        t([1, (2 * m4) as u16, 0]),
                        t([1, (2 * m4 - r) as u16, 1]),
                    ])
                }
            } else {
                let m = (n - 1) / 2;
                if m < 2 || m > 12 || r != 0 {
                    return None;
                }
                // x^2 + y z^2 + x y^m
                from(vec![t([2, 0, 0]), t([0, 1, 2]), t([1, m as u16, 0])])
            }
        }
        (2, AdeFamily::E) => match (class.index, r) {
            (6, 0) => from(vec![t([2, 0, 0]), t([1, 0, 2]), t([0, 3, 0])]),
            (7, 0) => from(vec![t([0, 0, 2]), t([3, 0, 0]), t([1, 3, 0])]),
            (8, 0) => from(vec![t([0, 0, 2]), t([3, 0, 0]), t([0, 5, 0])]),
            (8, 1) => from(vec![t([0, 0, 2]), t([3, 0, 0]), t([0, 5, 0]), t([1, 3, 1])]),
            (8, 2) => from(vec![t([0, 0, 2]), t([3, 0, 0]), t([0, 5, 0]), t([1, 2, 1])]),
            _ => None,
        },
        (3, AdeFamily::E) => {
            let minus = fq.from_int(-1);
            match (class.index, r) {
                (6, 0) => from(vec![
                    (vec![0, 0, 2], minus),
                    t([3, 0, 0]),
                    t([0, 4, 0]),
                ]),
                (6, 1) => from(vec![
                    (vec![0, 0, 2], minus),
                    t([3, 0, 0]),
                    t([0, 4, 0]),
                    t([2, 2, 0]),
                ]),
                (7, 0) => from(vec![t([2, 0, 0]), t([0, 3, 0]), t([0, 1, 3])]),
                (8, 0) => from(vec![t([2, 0, 0]), t([0, 0, 3]), t([0, 5, 0])]),
                _ => None,
            }
        }
        (5, AdeFamily::E) if class.index == 8 => match r {
            0 => from(vec![t([0, 0, 2]), t([3, 0, 0]), t([0, 5, 0])]),
            1 => from(vec![t([0, 0, 2]), t([3, 0, 0]), t([0, 5, 0]), t([1, 4, 0])]),
            _ => None,
        },
        _ => None,
    }
}

/// Every catalogued wild tuple `(p, class, coindex)`.
fn catalogue_index() -> Vec<(u64, AdeClass, u32)> {
    let mut v = Vec::new();
    for m in 2..=12u32 {
        v.push((2, AdeClass::d(2 * m), 0));
        v.push((2, AdeClass::d(2 * m + 1), 0));
    }
    for m in 1..=6u32 {
        for r in 1..=m {
            v.push((2, AdeClass::d(4 * m), r));
        }
    }
    v.push((2, AdeClass::e(6), 0));
    v.push((2, AdeClass::e(7), 0));
    for r in 0..=2 {
        v.push((2, AdeClass::e(8), r));
    }
    for r in 0..=1 {
        v.push((3, AdeClass::e(6), r));
    }
    v.push((3, AdeClass::e(7), 0));
    v.push((3, AdeClass::e(8), 0));
    for r in 0..=1 {
        v.push((5, AdeClass::e(8), r));
    }
    v
}

/// Tjurina numbers of all catalogued wild normal forms, keyed by
/// (characteristic, lattice type); each value lists `(coindex, tau)`.
static TAU_TABLE: Lazy<BTreeMap<(u64, AdeClass), Vec<(u32, usize)>>> = Lazy::new(|| {
    let mut table: BTreeMap<(u64, AdeClass), Vec<(u32, usize)>> = BTreeMap::new();
    for (p, class, r) in catalogue_index() {
        let germ = wild_form(p, class, r).expect("catalogue entries have forms");
        let tau = tjurina(&germ).expect("catalogue forms are isolated");
        table.entry((p, class)).or_default().push((r, tau));
    }
    table
});

/// Coindex of a wild rational double point, determined by matching the
/// Tjurina number against the catalogue; `Na` for tame pairs, `Unknown`
/// when no catalogued form (or more than one) has the observed number.
fn coindex_of(p: u64, class: AdeClass, tau: usize) -> Coindex {
    if !is_wild(p, class) {
        return Coindex::Na;
    }
    match TAU_TABLE.get(&(p, class)) {
        None => Coindex::Unknown,
        Some(rows) => {
            let hits: Vec<u32> = rows
                .iter()
                .filter(|&&(_, t)| t == tau)
                .map(|&(r, _)| r)
                .collect();
            if hits.len() == 1 {
                Coindex::R(hits[0])
            } else {
                Coindex::Unknown
            }
        }
    }
}

/// Normal form of a rational double point over the prime field.
///
/// For tame pairs the classical equations are returned and `coindex`
/// must be `None`; for wild pairs the catalogued equation for the given
/// coindex is returned.  Requests outside the catalogue (excluded
/// coindex ranges, wild pairs without a coindex, coindices on tame
/// pairs) fail with `OutsideCatalogue`.
pub fn artin_normal_form(
    p: u64,
    class: AdeClass,
    coindex: Option<u32>,
) -> Result<MPoly, SingularError> {
    let fq = Fq::prime(p)?;
    let ring = Ring::new(&fq, &["x", "y", "z"]);
    let one = fq.one();
    let t = |e: [u16; 3]| (e.to_vec(), one.clone());
    if class.family == AdeFamily::A {
        if coindex.is_some() {
            return Err(SingularError::OutsideCatalogue(
                "A-type points have no coindex parameter".to_string(),
            ));
        }
        let n = class.index as u16;
        return Ok(MPoly::from_terms(&ring, vec![t([1, 1, 0]), t([0, 0, n + 1])]));
    }
    if is_wild(p, class) {
        let r = coindex.ok_or_else(|| {
            SingularError::OutsideCatalogue(format!(
                "a coindex is required for {class} in characteristic {p}"
            ))
        })?;
        return wild_form(p, class, r).ok_or_else(|| {
            SingularError::OutsideCatalogue(format!(
                "no catalogued form for {class} with coindex {r} in characteristic {p}"
            ))
        });
    }
    if coindex.is_some() {
        return Err(SingularError::OutsideCatalogue(format!(
            "{class} has no coindex moduli in characteristic {p}"
        )));
    }
    match class.family {
        AdeFamily::D => {
            let n = class.index as u16;
            // x^2 + y^2 z + z^(n-1)
            Ok(MPoly::from_terms(
                &ring,
                vec![t([2, 0, 0]), t([0, 2, 1]), t([0, 0, n - 1])],
            ))
        }
        AdeFamily::E => match class.index {
            6 => Ok(MPoly::from_terms(
                &ring,
                vec![t([2, 0, 0]), t([0, 3, 0]), t([0, 0, 4])],
            )),
            7 => Ok(MPoly::from_terms(
                &ring,
                vec![t([2, 0, 0]), t([0, 3, 0]), t([0, 1, 3])],
            )),
            8 => Ok(MPoly::from_terms(
                &ring,
                vec![t([2, 0, 0]), t([0, 3, 0]), t([0, 0, 5])],
            )),
            _ => unreachable!("E indices are 6, 7, 8"),
        },
        AdeFamily::A => unreachable!("handled above"),
    }
}

// ---------------------------------------------------------------------------
// Full classification
// ---------------------------------------------------------------------------

/// Classify a germ `F(x, y, z)` with `F(0) = 0`: smooth point, rational
/// double point with coindex, catalogued elliptic double point, or
/// non-RDP with a reason.
pub fn classify_germ(germ: &MPoly) -> Result<Classification, SingularError> {
    let ring = germ.ring();
    assert_eq!(ring.nvars(), 3, "classification expects three variables");
    assert!(!germ.is_zero(), "classification expects a nonzero germ");
    assert!(
        germ.constant_term().is_zero(),
        "classification expects a germ vanishing at the origin"
    );
    if !germ.homogeneous_part(1).is_zero() {
        return Ok(Classification::Smooth);
    }
    let tau = tjurina(germ)?;
    if let Some((degree, family)) = elliptic_screen(germ) {
        return Ok(Classification::EllipticDoublePoint { degree, family });
    }
    match resolve(germ, DEFAULT_MAX_BLOWUPS)? {
        Resolution::NonRdp(reason) => Ok(Classification::NonRdp(reason)),
        Resolution::Graph(g) => match g.ade_type() {
            None => Ok(Classification::NonRdp(
                "the exceptional configuration is not an ADE graph".to_string(),
            )),
            Some(class) => Ok(Classification::Rdp(RdpType {
                class,
                coindex: coindex_of(ring.field().p(), class, tau),
            })),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring_p(p: u64) -> Ring {
        Ring::new(&Fq::prime(p).unwrap(), &["x", "y", "z"])
    }

    fn parse(p: u64, s: &str) -> MPoly {
        MPoly::parse(&ring_p(p), s).unwrap()
    }

    fn rdp(c: &Classification) -> RdpType {
        match c {
            Classification::Rdp(t) => *t,
            other => panic!("expected an RDP, got {other:?}"),
        }
    }

    #[test]
    fn tjurina_of_small_cones() {
        assert_eq!(tjurina(&parse(2, "z^2+x*y")).unwrap(), 2);
        assert_eq!(tjurina(&parse(3, "z^2+x*y")).unwrap(), 1);
        assert_eq!(tjurina(&parse(2, "z^2+x^3+y^5")).unwrap(), 16);
        // Positive-dimensional singular locus is refused.
        assert!(matches!(
            tjurina(&parse(2, "x*y")),
            Err(SingularError::NotIsolated)
        ));
    }

    #[test]
    fn resolve_short_chains() {
        for p in [2u64, 3, 5] {
            let g = parse(p, "z^2+x*y");
            match resolve(&g, DEFAULT_MAX_BLOWUPS).unwrap() {
                Resolution::Graph(dg) => {
                    assert_eq!(dg.len(), 1);
                    assert!(dg.edges.is_empty());
                    assert_eq!(dg.self_intersections, vec![-2]);
                    assert_eq!(dg.ade_type(), Some(AdeClass::a(1)));
                }
                Resolution::NonRdp(r) => panic!("A1 must resolve: {r}"),
            }
        }
        let a2 = parse(5, "x*y+z^3");
        match resolve(&a2, DEFAULT_MAX_BLOWUPS).unwrap() {
            Resolution::Graph(dg) => {
                assert_eq!(dg.len(), 2);
                assert_eq!(dg.edges, vec![(0, 1, 1)]);
                assert_eq!(dg.ade_type(), Some(AdeClass::a(2)));
            }
            Resolution::NonRdp(r) => panic!("A2 must resolve: {r}"),
        }
        let a3 = parse(3, "x*y+z^4");
        match resolve(&a3, DEFAULT_MAX_BLOWUPS).unwrap() {
            Resolution::Graph(dg) => {
                assert_eq!(dg.ade_type(), Some(AdeClass::a(3)));
            }
            Resolution::NonRdp(r) => panic!("A3 must resolve: {r}"),
        }
    }

    #[test]
    fn resolve_d8_in_characteristic_two() {
        let g = parse(2, "z^2+x^2*y+x*y^4");
        match resolve(&g, DEFAULT_MAX_BLOWUPS).unwrap() {
            Resolution::Graph(dg) => {
                assert_eq!(dg.len(), 8);
                assert_eq!(dg.ade_type(), Some(AdeClass::d(8)));
            }
            Resolution::NonRdp(r) => panic!("D8 must resolve: {r}"),
        }
    }

    #[test]
    fn resolve_d4_in_characteristic_three_uses_conjugate_points() {
        // Two of the three satellite points are conjugate over the
        // quadratic extension; the dual graph still stars all three.
        let g = parse(3, "x^2+y^2*z+z^3");
        match resolve(&g, DEFAULT_MAX_BLOWUPS).unwrap() {
            Resolution::Graph(dg) => {
                assert_eq!(dg.len(), 4);
                assert_eq!(dg.ade_type(), Some(AdeClass::d(4)));
            }
            Resolution::NonRdp(r) => panic!("D4 must resolve: {r}"),
        }
    }

    #[test]
    fn resolve_rejects_higher_multiplicity() {
        let g = parse(7, "x^3+y^3+z^3");
        match resolve(&g, DEFAULT_MAX_BLOWUPS).unwrap() {
            Resolution::NonRdp(reason) => assert!(reason.contains("multiplicity")),
            Resolution::Graph(_) => panic!("a cone of multiplicity 3 is not an RDP"),
        }
    }

    #[test]
    fn ade_recognition_from_graph_shape() {
        let path = |n: usize| DualGraph {
            self_intersections: vec![-2; n],
            edges: (0..n - 1).map(|i| (i, i + 1, 1)).collect(),
        };
        assert_eq!(path(5).ade_type(), Some(AdeClass::a(5)));
        let star = DualGraph {
            self_intersections: vec![-2; 4],
            edges: vec![(0, 1, 1), (0, 2, 1), (0, 3, 1)],
        };
        assert_eq!(star.ade_type(), Some(AdeClass::d(4)));
        let d7 = DualGraph {
            self_intersections: vec![-2; 7],
            edges: vec![(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (4, 6, 1)],
        };
        assert_eq!(d7.ade_type(), Some(AdeClass::d(7)));
        let e8 = DualGraph {
            self_intersections: vec![-2; 8],
            edges: vec![
                (0, 1, 1),
                (1, 2, 1),
                (2, 3, 1),
                (3, 4, 1),
                (4, 5, 1),
                (5, 6, 1),
                (4, 7, 1),
            ],
        };
        assert_eq!(e8.ade_type(), Some(AdeClass::e(8)));
        let cycle = DualGraph {
            self_intersections: vec![-2; 3],
            edges: vec![(0, 1, 1), (1, 2, 1), (0, 2, 1)],
        };
        assert_eq!(cycle.ade_type(), None);
        let double_edge = DualGraph {
            self_intersections: vec![-2; 2],
            edges: vec![(0, 1, 2)],
        };
        assert_eq!(double_edge.ade_type(), None);
    }

    #[test]
    fn classify_wild_examples_with_coindex() {
        // characteristic 3: E6 with and without the coindex term
        let e60 = classify_germ(&parse(3, "2*z^2+x^3+y^4")).unwrap();
        assert_eq!(rdp(&e60), RdpType::with_coindex(AdeClass::e(6), 0));
        let e61 = classify_germ(&parse(3, "2*z^2+x^3+y^4+x^2*y^2")).unwrap();
        assert_eq!(rdp(&e61), RdpType::with_coindex(AdeClass::e(6), 1));
        // characteristic 5: E8 with and without the coindex term
        let e80 = classify_germ(&parse(5, "z^2+x^3+y^5")).unwrap();
        assert_eq!(rdp(&e80), RdpType::with_coindex(AdeClass::e(8), 0));
        let e81 = classify_germ(&parse(5, "z^2+x^3+y^5+x*y^4")).unwrap();
        assert_eq!(rdp(&e81), RdpType::with_coindex(AdeClass::e(8), 1));
        // characteristic 2: E7
        let e70 = classify_germ(&parse(2, "z^2+x^3+x*y^3")).unwrap();
        assert_eq!(rdp(&e70), RdpType::with_coindex(AdeClass::e(7), 0));
    }

    #[test]
    fn classify_tame_types_have_no_coindex() {
        let a6 = classify_germ(&parse(7, "x*y+z^7")).unwrap();
        assert_eq!(rdp(&a6), RdpType::plain(AdeClass::a(6)));
        let a1 = classify_germ(&parse(5, "z^2+x*y")).unwrap();
        assert_eq!(rdp(&a1), RdpType::plain(AdeClass::a(1)));
        let d4 = classify_germ(&parse(3, "x^2+y^2*z+z^3")).unwrap();
        assert_eq!(rdp(&d4), RdpType::plain(AdeClass::d(4)));
    }

    #[test]
    fn classify_smooth_points() {
        let g = parse(5, "x+y^2+z^3");
        assert_eq!(classify_germ(&g).unwrap(), Classification::Smooth);
    }

    #[test]
    fn elliptic_families_are_screened_before_resolution() {
        let c = classify_germ(&parse(2, "z^2+x^3+y^7")).unwrap();
        assert_eq!(
            c,
            Classification::EllipticDoublePoint { degree: 12, family: "Z^2+X^3+Y^7" }
        );
        // Same family with the variable roles permuted and a sign twist.
        let c2 = classify_germ(&parse(2, "x^7+y^3+z^2")).unwrap();
        assert_eq!(
            c2,
            Classification::EllipticDoublePoint { degree: 12, family: "Z^2+X^3+Y^7" }
        );
        let c3 = classify_germ(&parse(3, "x^7+y^2+2*z^3")).unwrap();
        assert_eq!(
            c3,
            Classification::EllipticDoublePoint { degree: 12, family: "Z^2+X^3+Y^7" }
        );
        let c4 = classify_germ(&parse(2, "z^2+x^3*y+y^5")).unwrap();
        assert_eq!(
            c4,
            Classification::EllipticDoublePoint { degree: 11, family: "Z^2+X^3*Y+Y^5" }
        );
        let c5 = classify_germ(&parse(2, "z^2+x^3*y+x*y^4")).unwrap();
        assert_eq!(
            c5,
            Classification::EllipticDoublePoint { degree: 12, family: "Z^2+X^3*Y+X*Y^4" }
        );
    }

    #[test]
    fn artin_normal_form_oracles() {
        let d8 = artin_normal_form(2, AdeClass::d(8), Some(0)).unwrap();
        assert_eq!(d8, parse(2, "z^2+x^2*y+x*y^4"));
        let e82 = artin_normal_form(2, AdeClass::e(8), Some(2)).unwrap();
        assert_eq!(e82, parse(2, "z^2+x^3+y^5+z*x*y^2"));
        let a6 = artin_normal_form(7, AdeClass::a(6), None).unwrap();
        assert_eq!(a6, parse(7, "x*y+z^7"));
    }

    #[test]
    fn artin_normal_form_rejects_uncatalogued_requests() {
        assert!(matches!(
            artin_normal_form(2, AdeClass::e(8), Some(4)),
            Err(SingularError::OutsideCatalogue(_))
        ));
        // D8 = D_{4*2} admits coindices 0..2 only.
        assert!(matches!(
            artin_normal_form(2, AdeClass::d(8), Some(3)),
            Err(SingularError::OutsideCatalogue(_))
        ));
        // D6 is not a multiple of four: no positive coindex is catalogued.
        assert!(matches!(
            artin_normal_form(2, AdeClass::d(6), Some(1)),
            Err(SingularError::OutsideCatalogue(_))
        ));
        // Wild pair without a coindex.
        assert!(matches!(
            artin_normal_form(3, AdeClass::e(6), None),
            Err(SingularError::OutsideCatalogue(_))
        ));
        // Tame pair with a coindex.
        assert!(matches!(
            artin_normal_form(7, AdeClass::a(6), Some(0)),
            Err(SingularError::OutsideCatalogue(_))
        ));
        assert!(matches!(
            artin_normal_form(5, AdeClass::e(6), Some(0)),
            Err(SingularError::OutsideCatalogue(_))
        ));
    }

    #[test]
    fn tau_table_distinguishes_every_catalogued_coindex() {
        for (key, rows) in TAU_TABLE.iter() {
            let mut taus: Vec<usize> = rows.iter().map(|&(_, t)| t).collect();
            taus.sort_unstable();
            let before = taus.len();
            taus.dedup();
            assert_eq!(
                before,
                taus.len(),
                "Tjurina numbers must separate coindices for {key:?}: {rows:?}"
            );
        }
    }

    #[test]
    fn tjurina_is_invariant_under_coordinate_changes() {
        // Unimodular substitution applied to the char-2 E8 coindex-2 form.
        let g = parse(2, "z^2+x^3+y^5+z*x*y^2");
        let ring = g.ring().clone();
        let x = MPoly::var(&ring, 0);
        let y = MPoly::var(&ring, 1);
        let z = MPoly::var(&ring, 2);
        let imgs = [
            x.add(&z),
            y.add(&x.mul(&x)),
            z.add(&y.mul(&y)),
        ];
        let h = g.subst(&imgs);
        assert_eq!(tjurina(&g).unwrap(), tjurina(&h).unwrap());
    }
}
