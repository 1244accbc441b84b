//! Cross-module checks of the integer-lattice layer.

use charp_lattice::*;

/// All lattices are negative definite and their discriminant orders agree
/// with the local Picard group of the corresponding Henselian RDP.
#[test]
fn definiteness_and_discriminants() {
    for class in (1..=24)
        .map(AdeClass::a)
        .chain((4..=24).map(AdeClass::d))
        .chain((6..=8).map(AdeClass::e))
    {
        let l = DynkinLattice::new(class);
        assert!(l.is_negative_definite(), "{class} not negative definite");
        assert_eq!(
            l.discriminant_order(),
            l.local_picard().order(),
            "{class} discriminant"
        );
    }
}

/// Every catalogued resolution fixed-locus entry satisfies both identities:
/// square -2n/(p-1) and isolated degree n(p-2)/(p-1), with no isolated
/// points in characteristic 2.
#[test]
fn resolution_fix_catalogue_verifies() {
    let pairs = ResolutionFixData::catalogue_pairs(24);
    assert!(pairs.len() >= 19, "catalogue unexpectedly small");
    for (p, class) in pairs {
        let data = ResolutionFixData::catalogue(p, class).unwrap();
        let report = data.verify();
        assert!(report.ok(), "({p}, {class}): {report:?}");
        if p == 2 {
            assert!(data.isolated.is_empty());
        }
    }
}

/// The f_n congruence holds exhaustively for n <= 30.
#[test]
fn f_n_congruence_exhaustive() {
    for n in 2..=30u64 {
        for h in 1..=n - 1 {
            for j in 1..=n - 1 {
                assert_eq!(f_n(n, h, j).unwrap() % n, (h * j) % n);
            }
        }
    }
}

/// Exactly one torsion class per supported l; the l = 11 analogue of the
/// search comes back empty.
#[test]
fn torsion_classes_unique_and_l11_empty() {
    let expected: &[(u32, &[u32])] = &[
        (2, &[1, 1, 1, 1, 1, 1, 1, 1]),
        (3, &[1, 1, 1, 1, 1, 1]),
        (5, &[1, 1, 2, 2]),
        (7, &[1, 2, 3]),
    ];
    for &(l, a) in expected {
        let sols = torsion_enumerate(l).unwrap();
        assert_eq!(sols.len(), 1, "l = {l}");
        assert_eq!(sols[0].a, a, "l = {l}");
        assert_eq!(sols[0].delta_sq, -4, "l = {l}");
    }
    assert!(torsion_search(11, 2).is_empty());
}

/// Expected configurations round-trip through JSON and have consistent
/// total indices.
#[test]
fn expected_configs_serialize_and_balance() {
    let rows = [
        (GroupScheme::MuP, 2),
        (GroupScheme::MuP, 3),
        (GroupScheme::MuP, 5),
        (GroupScheme::MuP, 7),
        (GroupScheme::AlphaP, 2),
        (GroupScheme::AlphaP, 3),
        (GroupScheme::AlphaP, 5),
        (GroupScheme::ZmodPWild, 2),
        (GroupScheme::ZmodPWild, 3),
        (GroupScheme::ZmodPWild, 5),
        (GroupScheme::ZmodL { l: 7 }, 0),
        (GroupScheme::ZmodL { l: 2 }, 3),
    ];
    for (group, p) in rows {
        let row = expected_config(group, p).unwrap();
        let json = serde_json::to_string(&row).unwrap();
        let back: ExpectedConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(row, back);
        for alt in &row.alternatives {
            // All rows of the table have total index 24(l-1)/(l+1) for the
            // order l of the group scheme.
            let l = match group {
                GroupScheme::ZmodL { l } => l,
                _ => p,
            };
            assert_eq!(alt.total_index(), 24 * (l - 1) / (l + 1), "{group} {alt}");
        }
    }
}

/// The sum over all RDPs of a quotient configuration of the per-point
/// Euler contributions matches the K3 Euler number 24: checked here for the
/// self-paired inseparable rows via `c2_balance`.
#[test]
fn inseparable_rows_balance() {
    for (group, p) in [
        (GroupScheme::MuP, 2),
        (GroupScheme::MuP, 3),
        (GroupScheme::MuP, 5),
        (GroupScheme::MuP, 7),
        (GroupScheme::AlphaP, 2),
        (GroupScheme::AlphaP, 3),
        (GroupScheme::AlphaP, 5),
    ] {
        let row = expected_config(group, p).unwrap();
        for alt in &row.alternatives {
            let idx = alt.indices();
            assert!(c2_balance(p, &idx, &idx), "{group} p = {p}, {alt}");
        }
    }
}
