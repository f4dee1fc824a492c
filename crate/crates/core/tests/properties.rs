//! Property tests of the structural invariants, at desk-scale grids so the
//! whole file stays fast.

use proptest::prelude::*;

use torusflux::field::{HarmonicForm, ScalarField};
use torusflux::flow;
use torusflux::generator::{self, Generator, Params};
use torusflux::grid::{GridSpec, TimeGrid, TorusDim};
use torusflux::scenarios::{build_rotation, RotationSpec};
use torusflux::symplectic;

fn grid(n: usize, pts: usize) -> GridSpec {
    GridSpec::new(TorusDim::new(n).unwrap(), pts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// sharp ∘ flat = id and flat ∘ sharp = id on constant forms in any
    /// dimension.
    #[test]
    fn sharp_flat_round_trip(n in 1usize..4, coeffs in prop::collection::vec(-5.0f64..5.0, 6)) {
        let h = HarmonicForm::new(coeffs[..2 * n].to_vec());
        let v = symplectic::sharp_harmonic(&h).unwrap();
        let back = symplectic::flat_constant(&v).unwrap();
        for i in 0..2 * n {
            prop_assert!((back.coeff(i) - h.coeff(i)).abs() < 1e-14);
        }
    }

    /// osc is translation-invariant and subadditive; |H|_0 ≤ |H|.
    #[test]
    fn osc_properties(a in -2.0f64..2.0, b in -2.0f64..2.0, shift in -10.0f64..10.0) {
        let g = grid(1, 16);
        let f = ScalarField::from_fn(g, move |c| a * (std::f64::consts::TAU * c[0]).sin());
        let h = ScalarField::from_fn(g, move |c| b * (std::f64::consts::TAU * (c[0] + c[1])).cos());
        let sum = f.add(&h).unwrap();
        prop_assert!(sum.osc() <= f.osc() + h.osc() + 1e-12);
        let shifted = f.add(&ScalarField::constant(g, shift)).unwrap();
        prop_assert!((shifted.osc() - f.osc()).abs() < 1e-12);

        let form = HarmonicForm::new(vec![a, b]);
        prop_assert!(form.sup_norm() <= form.norm() + 1e-14);
    }

    /// The wedge pairing is additive in both arguments and vanishes on zero.
    #[test]
    fn wedge_pairing_bilinearity(
        h1 in prop::collection::vec(-3.0f64..3.0, 4),
        h2 in prop::collection::vec(-3.0f64..3.0, 4),
        m in prop::collection::vec(-3i64..4, 4),
    ) {
        let a = HarmonicForm::new(h1);
        let b = HarmonicForm::new(h2);
        let va = symplectic::wedge_pair_top(&a, &m).unwrap();
        let vb = symplectic::wedge_pair_top(&b, &m).unwrap();
        let vsum = symplectic::wedge_pair_top(&a.add(&b), &m).unwrap();
        prop_assert!((vsum - va - vb).abs() < 1e-12);
    }

    /// Mass flow is additive in the class vector (exact linearity of the
    /// lift integral).
    #[test]
    fn mass_flow_additivity(
        vx in -0.4f64..0.4, vy in -0.4f64..0.4,
        m1 in prop::collection::vec(-2i64..3, 2),
        m2 in prop::collection::vec(-2i64..3, 2),
    ) {
        let p = Params::default();
        let g = grid(1, 8);
        let t = TimeGrid::unit(10).unwrap();
        let gen = build_rotation(&RotationSpec::new(vec![vx, vy]), g, t).unwrap();
        let phi = flow::integrate(&gen, &p.flow).unwrap();
        let sum: Vec<i64> = m1.iter().zip(&m2).map(|(a, b)| a + b).collect();
        let lhs = torusflux::flux::mass_flow_direct(&phi, &sum).unwrap();
        let rhs = torusflux::flux::mass_flow_direct(&phi, &m1).unwrap()
            + torusflux::flux::mass_flow_direct(&phi, &m2).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    /// Flux is a homomorphism: harmonic parts of products add exactly.
    #[test]
    fn flux_homomorphism(
        a in prop::collection::vec(-0.3f64..0.3, 2),
        b in prop::collection::vec(-0.3f64..0.3, 2),
    ) {
        let p = Params::default();
        let g = grid(1, 8);
        let t = TimeGrid::unit(10).unwrap();
        let ga = build_rotation(&RotationSpec::new(a), g, t).unwrap();
        let gb = build_rotation(&RotationSpec::new(b), g, t).unwrap();
        let prod = generator::group_product(&ga, &gb, &p).unwrap();
        let sum = torusflux::flux::flux(&ga).harmonic_rep
            .add(&torusflux::flux::flux(&gb).harmonic_rep);
        prop_assert!(torusflux::flux::flux(&prod).harmonic_rep.sub(&sum).norm() < 1e-13);
    }

    /// l^{(1,∞)} ≤ l^∞ for arbitrary sampled generators.
    #[test]
    fn length_ordering(amp in 0.0f64..0.5, hc in -0.5f64..0.5, phase in 0.0f64..6.2) {
        let g = grid(1, 8);
        let t = TimeGrid::unit(16).unwrap();
        let base = ScalarField::from_fn(g, |c| (std::f64::consts::TAU * c[1]).sin());
        let gen = Generator::new(
            g,
            t,
            (0..t.samples())
                .map(|k| base.scale(amp * (std::f64::consts::TAU * t.time(k) + phase).cos()))
                .collect(),
            (0..t.samples())
                .map(|k| HarmonicForm::new(vec![hc * (std::f64::consts::TAU * t.time(k)).sin(), 0.0]))
                .collect(),
        )
        .unwrap();
        prop_assert!(torusflux::hofer::length_l1inf(&gen) <= torusflux::hofer::length_linf(&gen) + 1e-13);
    }

    /// D² is symmetric and satisfies the triangle inequality on rotation
    /// generators (where it is exactly computable).
    #[test]
    fn d2_pseudometric(
        a in prop::collection::vec(-0.3f64..0.3, 2),
        b in prop::collection::vec(-0.3f64..0.3, 2),
        c in prop::collection::vec(-0.3f64..0.3, 2),
    ) {
        let p = Params::default();
        let g = grid(1, 8);
        let t = TimeGrid::unit(10).unwrap();
        let ga = build_rotation(&RotationSpec::new(a), g, t).unwrap();
        let gb = build_rotation(&RotationSpec::new(b), g, t).unwrap();
        let gc = build_rotation(&RotationSpec::new(c), g, t).unwrap();
        let ab = generator::d2_distance(&ga, &gb, &p).unwrap();
        let ba = generator::d2_distance(&gb, &ga, &p).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        let bc = generator::d2_distance(&gb, &gc, &p).unwrap();
        let ac = generator::d2_distance(&ga, &gc, &p).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    /// Field container round trip through disk.
    #[test]
    fn field_io_round_trip(coeff in -2.0f64..2.0, k in 1i32..3) {
        let dir = tempfile::tempdir().unwrap();
        let g = grid(1, 8);
        let f = ScalarField::from_fn(g, move |c| coeff * (std::f64::consts::TAU * k as f64 * c[0]).sin());
        let base = dir.path().join("f");
        torusflux::io::save_scalar(&base, &f).unwrap();
        let back = torusflux::io::load_scalar(&base).unwrap();
        prop_assert_eq!(back.values(), f.values());
    }
}
