//! Embedded covering data for the wild rational double points.
//!
//! Each catalogued tuple `(p, class, r)` carries a hypersurface equation
//! `F ∈ k[x,y,z]`, the ideal `I = (x, y^m, z)`, a structure constant
//! `λ` (zero, a power of `y`, or a unit scalar), and two chart sections
//! `q̄₁ ∈ A[x⁻¹]`, `q̄₂ ∈ A[y⁻¹]` whose difference is the Artin–Schreier
//! obstruction class of the canonical degree-`p` covering.  The glueing
//! section is `ε̄ = z/(x y^m)`.

use charp_core::{Fq, MPoly, Ring};
use charp_lattice::{AdeClass, AdeFamily, RdpType};

use crate::LocalModelError;

/// A fraction `numerator / (x^x_den · y^y_den)` over the germ ring.
///
/// All identities involving these fractions are verified after clearing
/// denominators into the polynomial ring; no localization arithmetic exists.
#[derive(Clone, Debug)]
pub struct LocalFraction {
    pub numerator: MPoly,
    pub x_den: u32,
    pub y_den: u32,
}

/// Covering data for one catalogued wild rational double point.
#[derive(Clone, Debug)]
pub struct RdpLocalData {
    /// Singularity type including the coindex.
    pub label: RdpType,
    /// Residue characteristic.
    pub p: u32,
    /// Coindex parameter, `0 ≤ r ≤ m`.
    pub r: u32,
    /// The module parameter: `I = (x, y^m, z)` and `ε̄ = z/(x y^m)`.
    pub m: u32,
    /// Germ ring `k[x, y, z]` over the prime field.
    pub ring: Ring,
    /// Defining equation of the singularity.
    pub f: MPoly,
    /// Generators `[x, y^m, z]` of the ideal `I`.
    pub ideal_gens: [MPoly; 3],
    /// Structure constant of the covering: `t^p − λ t = q` on each chart.
    pub lambda: MPoly,
    /// Section on the chart where `x` is inverted.
    pub qbar1: LocalFraction,
    /// Section on the chart where `y` is inverted.
    pub qbar2: LocalFraction,
    /// The glueing fraction `z/(x y^m)`.
    pub epsbar: LocalFraction,
}

impl RdpLocalData {
    /// Convenience accessors for the three coordinates.
    pub fn x(&self) -> MPoly {
        MPoly::var(&self.ring, 0)
    }
    pub fn y(&self) -> MPoly {
        MPoly::var(&self.ring, 1)
    }
    pub fn z(&self) -> MPoly {
        MPoly::var(&self.ring, 2)
    }

    /// `λ` as a scalar, when it is a constant polynomial.
    pub fn lambda_scalar(&self) -> Option<charp_core::FqElem> {
        if self.lambda.is_zero() || self.lambda.low_tdeg() == Some(0) {
            Some(self.lambda.constant_term())
        } else {
            None
        }
    }
}

fn fraction(num: MPoly, x_den: u32, y_den: u32) -> LocalFraction {
    LocalFraction {
        numerator: num,
        x_den,
        y_den,
    }
}

/// The covering data for a catalogued `(p, class, r)` tuple.
///
/// Catalogued tuples are: `(2, D_{4m}, 0 ≤ r ≤ m)` for every `m ≥ 1`;
/// `(2, E₈, r ∈ {0,1,2})`; `(3, E₆, r ∈ {0,1})`; `(5, E₈, r ∈ {0,1})`.
/// Everything else has no local covering model here.
pub fn rdp_local_data(p: u32, class: AdeClass, r: u32) -> Result<RdpLocalData, LocalModelError> {
    let outside = || {
        LocalModelError::OutsideCatalogue(format!(
            "p={p}, type {class}, coindex {r}: not in the covering catalogue"
        ))
    };
    let field = Fq::prime(u64::from(p)).expect("catalogue primes are supported");
    let ring = Ring::new(&field, &["x", "y", "z"]);
    let x = MPoly::var(&ring, 0);
    let y = MPoly::var(&ring, 1);
    let z = MPoly::var(&ring, 2);

    let (m, lambda, f, qbar1, qbar2) = match (p, class.family, class.index) {
        // z² + x²y + x y^{2m} + λ z x y^m, with λ = 0 (r = 0) or y^{m−r}.
        (2, AdeFamily::D, n) if n % 4 == 0 && n >= 4 => {
            let m = n / 4;
            if r > m {
                return Err(outside());
            }
            let lambda = if r == 0 {
                MPoly::constant(&ring, field.zero())
            } else {
                y.pow(m - r)
            };
            let f = z
                .pow(2)
                .add(&x.pow(2).mul(&y))
                .add(&x.mul(&y.pow(2 * m)))
                .add(&lambda.mul(&z).mul(&x).mul(&y.pow(m)));
            let q1 = fraction(MPoly::one(&ring), 1, 0);
            let q2 = fraction(MPoly::one(&ring), 0, 2 * m - 1);
            (m, lambda, f, q1, q2)
        }
        // z² + x³ + y⁵ + λ z x y², with λ = 0, y, 1 for r = 0, 1, 2.
        (2, AdeFamily::E, 8) => {
            let m = 2;
            if r > m {
                return Err(outside());
            }
            let lambda = if r == 0 {
                MPoly::constant(&ring, field.zero())
            } else {
                y.pow(m - r)
            };
            let f = z
                .pow(2)
                .add(&x.pow(3))
                .add(&y.pow(5))
                .add(&lambda.mul(&z).mul(&x).mul(&y.pow(2)));
            let q1 = fraction(y.clone(), 2, 0);
            let q2 = fraction(x.clone(), 0, 4);
            (m, lambda, f, q1, q2)
        }
        // −z² + x³ + y⁴ + λ x²y², with λ = 0, 1 for r = 0, 1.
        (3, AdeFamily::E, 6) => {
            let m = 1;
            if r > m {
                return Err(outside());
            }
            let lambda = MPoly::from_int(&ring, r as i64);
            let f = z
                .pow(2)
                .neg()
                .add(&x.pow(3))
                .add(&y.pow(4))
                .add(&lambda.mul(&x.pow(2)).mul(&y.pow(2)));
            let q1 = fraction(y.mul(&z), 3, 0);
            let q2 = fraction(z.neg(), 0, 3);
            (m, lambda, f, q1, q2)
        }
        // z² + x³ + y⁵ + (λ/2) x y⁴, with λ = 0, 2 for r = 0, 1.
        (5, AdeFamily::E, 8) => {
            let m = 1;
            if r > m {
                return Err(outside());
            }
            let lambda = MPoly::from_int(&ring, 2 * r as i64);
            let half = field.from_int(2).inv().expect("2 is a unit");
            let f = z
                .pow(2)
                .add(&x.pow(3))
                .add(&y.pow(5))
                .add(&lambda.scale(&half).mul(&x).mul(&y.pow(4)));
            // q̄₁ = x⁻⁵ (y⁵ + λ x y⁴ + (λ²/4) x² y³ + 2x³) z.
            let quarter = field.from_int(4).inv().expect("4 is a unit");
            let lambda_sq = lambda.mul(&lambda).scale(&quarter);
            let num = y
                .pow(5)
                .add(&lambda.mul(&x).mul(&y.pow(4)))
                .add(&lambda_sq.mul(&x.pow(2)).mul(&y.pow(3)))
                .add(&x.pow(3).scale(&field.from_int(2)))
                .mul(&z);
            let q1 = fraction(num, 5, 0);
            let q2 = fraction(x.mul(&z).neg(), 0, 5);
            (m, lambda, f, q1, q2)
        }
        _ => return Err(outside()),
    };

    let ideal_gens = [x.clone(), y.pow(m), z.clone()];
    let epsbar = fraction(z, 1, m);
    Ok(RdpLocalData {
        label: RdpType::with_coindex(class, r),
        p,
        r,
        m,
        ring,
        f,
        ideal_gens,
        lambda,
        qbar1,
        qbar2,
        epsbar,
    })
}

/// All catalogued tuples with `m ≤ max_m` (the `D` family is infinite; the
/// callers cap it).
pub fn catalogued_tuples(max_m: u32) -> Vec<(u32, AdeClass, u32)> {
    let mut out = Vec::new();
    for m in 1..=max_m {
        for r in 0..=m {
            out.push((2, AdeClass::d(4 * m), r));
        }
    }
    for r in 0..=2 {
        out.push((2, AdeClass::e(8), r));
    }
    for r in 0..=1 {
        out.push((3, AdeClass::e(6), r));
    }
    for r in 0..=1 {
        out.push((5, AdeClass::e(8), r));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_boundaries_are_enforced() {
        assert!(rdp_local_data(7, AdeClass::e(8), 0).is_err());
        assert!(rdp_local_data(2, AdeClass::d(6), 0).is_err());
        assert!(rdp_local_data(2, AdeClass::d(8), 3).is_err());
        assert!(rdp_local_data(2, AdeClass::e(8), 3).is_err());
        assert!(rdp_local_data(3, AdeClass::e(6), 2).is_err());
        assert!(rdp_local_data(5, AdeClass::e(8), 2).is_err());
        assert!(rdp_local_data(2, AdeClass::a(1), 0).is_err());
        assert!(rdp_local_data(2, AdeClass::e(7), 0).is_err());
    }

    #[test]
    fn data_shape_for_d8_coindex_one() {
        let data = rdp_local_data(2, AdeClass::d(8), 1).unwrap();
        assert_eq!(data.m, 2);
        // λ = y^{m−r} = y.
        assert_eq!(data.lambda, MPoly::var(&data.ring, 1));
        // F = z² + x²y + xy⁴ + zxy³.
        let f = MPoly::parse(&data.ring, "z^2 + x^2*y + x*y^4 + z*x*y^3").unwrap();
        assert_eq!(data.f, f);
        assert_eq!(data.epsbar.x_den, 1);
        assert_eq!(data.epsbar.y_den, 2);
        assert_eq!(data.qbar2.y_den, 3);
    }

    #[test]
    fn lambda_scalars_for_unit_regimes() {
        let d = rdp_local_data(5, AdeClass::e(8), 1).unwrap();
        assert_eq!(d.lambda_scalar().unwrap(), d.ring.field().from_int(2));
        let d = rdp_local_data(3, AdeClass::e(6), 1).unwrap();
        assert!(d.lambda_scalar().unwrap().is_one());
        let d = rdp_local_data(2, AdeClass::d(4), 1).unwrap();
        assert!(d.lambda_scalar().unwrap().is_one());
        // Non-constant λ for an intermediate coindex.
        let d = rdp_local_data(2, AdeClass::e(8), 1).unwrap();
        assert!(d.lambda_scalar().is_none());
    }

    #[test]
    fn catalogue_enumeration_counts() {
        // m ≤ 4: D-family 2+3+4+5 = 14 tuples, plus 3 + 2 + 2 = 7 E-family.
        assert_eq!(catalogued_tuples(4).len(), 21);
    }
}
