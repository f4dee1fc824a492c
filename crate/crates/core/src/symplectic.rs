//! The symplectic structure ω = Σ_{i=1}^{n} dθ_i ∧ dθ_{i+n}: the sharp/flat
//! isomorphisms between 1-forms and vector fields, and the top-degree wedge
//! pairing behind the mass-flow formula.
//!
//! # Sign conventions
//!
//! `sharp` solves ι(Z)ω = α, i.e. ω(Z, ·) = α. With the block form of ω this
//! is the constant linear map
//!
//! ```text
//! (α_1, …, α_n, α_{n+1}, …, α_{2n}) ↦ (α_{n+1}, …, α_{2n}, -α_1, …, -α_n),
//! ```
//!
//! so a translation by v = (a, b) corresponds to the form Σ a_i dθ_{i+n} −
//! b_i dθ_i. The orientation of the pairing [`wedge_pair_top`] is fixed once,
//! by requiring that the pairing of that form against the class of
//! f(θ) = θ_1 reproduces the lift-integral mass flow of a positive
//! θ_1-translation (value +a_1); together with ω this pins every other sign.

use crate::error::{Error, Result};
use crate::field::{HarmonicForm, OneFormField, ScalarField, VectorFieldGrid};

/// ι(Z)ω = α solved for Z, pointwise. Exact constant linear map.
pub fn sharp(alpha: &OneFormField) -> VectorFieldGrid {
    let n = alpha.grid().dim().half();
    let mut comps: Vec<ScalarField> = Vec::with_capacity(2 * n);
    for i in 0..n {
        comps.push(alpha.component(i + n).clone());
    }
    for i in 0..n {
        comps.push(alpha.component(i).scale(-1.0));
    }
    VectorFieldGrid::new(comps).expect("component count preserved")
}

/// Sharp of a constant-coefficient form, as a coefficient vector.
pub fn sharp_harmonic(h: &HarmonicForm) -> Result<Vec<f64>> {
    let d = h.ambient();
    if !d.is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!(
            "harmonic form has odd length {d}"
        )));
    }
    let n = d / 2;
    let c = h.coeffs();
    let mut v = Vec::with_capacity(d);
    v.extend((0..n).map(|i| c[i + n]));
    v.extend((0..n).map(|i| -c[i]));
    Ok(v)
}

/// ι(Z)ω for a grid vector field; the inverse of [`sharp`].
pub fn flat(z: &VectorFieldGrid) -> OneFormField {
    let n = z.grid().dim().half();
    let mut comps: Vec<ScalarField> = Vec::with_capacity(2 * n);
    for i in 0..n {
        comps.push(z.component(i + n).scale(-1.0));
    }
    for i in 0..n {
        comps.push(z.component(i).clone());
    }
    OneFormField::new(comps).expect("component count preserved")
}

/// Flat of a constant vector, as a harmonic form.
pub fn flat_constant(v: &[f64]) -> Result<HarmonicForm> {
    let d = v.len();
    if !d.is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!(
            "vector has odd length {d}"
        )));
    }
    let n = d / 2;
    let mut c = Vec::with_capacity(d);
    c.extend((0..n).map(|i| -v[i + n]));
    c.extend((0..n).map(|i| v[i]));
    Ok(HarmonicForm::new(c))
}

/// The pairing (1/(n−1)!) ∫ H ∧ ω^{n−1} ∧ (Σ m_i dθ_i) over T^{2n},
/// evaluated exactly for constant-coefficient forms:
///
/// ```text
/// ⟨H, m⟩ = Σ_{i=1}^{n} ( h_{i+n} m_i − h_i m_{i+n} ).
/// ```
///
/// Bilinear in (H, m); vanishes when either factor is zero. The sign is the
/// calibrated orientation described in the module docs.
pub fn wedge_pair_top(h: &HarmonicForm, m: &[i64]) -> Result<f64> {
    let d = h.ambient();
    if m.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "class vector has {} entries, form has {}",
            m.len(),
            d
        )));
    }
    let n = d / 2;
    let c = h.coeffs();
    let mut acc = 0.0;
    for i in 0..n {
        acc += c[i + n] * m[i] as f64 - c[i] * m[i + n] as f64;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridSpec, TorusDim};

    fn grid(n: usize, pts: usize) -> GridSpec {
        GridSpec::new(TorusDim::new(n).unwrap(), pts).unwrap()
    }

    #[test]
    fn sharp_of_zero_is_zero() {
        let g = grid(1, 8);
        let z = sharp(&OneFormField::zeros(g));
        assert_eq!(z.sup_norm(), 0.0);
    }

    #[test]
    fn sharp_of_dtheta1_is_minus_dtheta2_direction() {
        // n = 1, ω = dθ1 ∧ dθ2: solve ω(Z, ·) = dθ1 by hand: Z = -∂θ2.
        let g = grid(1, 8);
        let h = HarmonicForm::new(vec![1.0, 0.0]);
        let v = sharp_harmonic(&h).unwrap();
        assert_eq!(v, vec![0.0, -1.0]);
        let alpha = OneFormField::from_harmonic(g, &h).unwrap();
        let z = sharp(&alpha);
        assert!((z.component(0).mean() - 0.0).abs() < 1e-15);
        assert!((z.component(1).mean() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn rotation_form_sharps_to_its_velocity() {
        // Σ a_i dθ_{i+n} − b_i dθ_i ↦ (a, b) for n = 2.
        let (a, b) = ([0.3, -0.1], [0.4, 0.25]);
        let h = HarmonicForm::new(vec![-b[0], -b[1], a[0], a[1]]);
        let v = sharp_harmonic(&h).unwrap();
        assert_eq!(v, vec![0.3, -0.1, 0.4, 0.25]);
        // and flat inverts it
        let back = flat_constant(&v).unwrap();
        assert_eq!(back.coeffs(), h.coeffs());
    }

    #[test]
    fn flat_sharp_round_trip_on_fields() {
        let g = grid(2, 4);
        let alpha = OneFormField::new(
            (0..4)
                .map(|i| {
                    ScalarField::from_fn(g, move |c| {
                        (std::f64::consts::TAU * c[i]).sin() + 0.3 * i as f64
                    })
                })
                .collect(),
        )
        .unwrap();
        let back = flat(&sharp(&alpha));
        for i in 0..4 {
            let err = back.component(i).sub(alpha.component(i)).unwrap().sup_norm();
            assert!(err < 1e-15);
        }
        let z = sharp(&alpha);
        let again = sharp(&flat(&z));
        for i in 0..4 {
            assert!(again.component(i).sub(z.component(i)).unwrap().sup_norm() < 1e-15);
        }
    }

    #[test]
    fn wedge_pairing_matches_hand_expansion_n1() {
        // H = a dθ2 − b dθ1, m = (1,0): the calibrated pairing gives +a.
        let (a, b) = (0.7, 0.2);
        let h = HarmonicForm::new(vec![-b, a]);
        let val = wedge_pair_top(&h, &[1, 0]).unwrap();
        assert!((val - a).abs() < 1e-15);
        let val2 = wedge_pair_top(&h, &[0, 1]).unwrap();
        assert!((val2 - b).abs() < 1e-15);
    }

    #[test]
    fn wedge_pairing_bilinear_and_degenerate() {
        let h = HarmonicForm::new(vec![0.1, -0.2, 0.3, 0.4]);
        let m = [2i64, -1, 0, 3];
        let v = wedge_pair_top(&h, &m).unwrap();
        let v2 = wedge_pair_top(&h.scale(2.0), &m).unwrap();
        assert!((v2 - 2.0 * v).abs() < 1e-15);
        assert_eq!(wedge_pair_top(&HarmonicForm::zero(4), &m).unwrap(), 0.0);
        assert_eq!(wedge_pair_top(&h, &[0, 0, 0, 0]).unwrap(), 0.0);
    }

    /// Independent exterior-algebra oracle: expand H ∧ ω^{n−1} ∧ σ_m in the
    /// basis of top forms by brute force, read off the coefficient of
    /// dθ_1 ∧ … ∧ dθ_{2n}, and integrate with the calibrated orientation
    /// μ_n = (−1)^{n(n−1)/2 + 1}.
    mod exterior_oracle {
        use super::*;

        /// k-form as a map from strictly increasing index tuples to coeffs.
        type Form = std::collections::HashMap<Vec<usize>, f64>;

        fn one_form(coeffs: &[f64]) -> Form {
            coeffs
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0.0)
                .map(|(i, &c)| (vec![i], c))
                .collect()
        }

        fn omega(n: usize) -> Form {
            (0..n).map(|i| (vec![i, i + n], 1.0)).collect()
        }

        fn wedge(a: &Form, b: &Form) -> Form {
            let mut out: Form = Form::new();
            for (ia, ca) in a {
                for (ib, cb) in b {
                    let mut idx: Vec<usize> = ia.iter().chain(ib.iter()).copied().collect();
                    if has_duplicates(&idx) {
                        continue;
                    }
                    let sign = sort_sign(&mut idx);
                    *out.entry(idx).or_insert(0.0) += sign * ca * cb;
                }
            }
            out
        }

        fn has_duplicates(v: &[usize]) -> bool {
            let mut s = v.to_vec();
            s.sort_unstable();
            s.windows(2).any(|w| w[0] == w[1])
        }

        /// Bubble sort, counting swaps.
        fn sort_sign(v: &mut [usize]) -> f64 {
            let mut sign = 1.0;
            for i in 0..v.len() {
                for j in 0..v.len() - 1 - i {
                    if v[j] > v[j + 1] {
                        v.swap(j, j + 1);
                        sign = -sign;
                    }
                }
            }
            sign
        }

        fn oracle(h: &HarmonicForm, m: &[i64]) -> f64 {
            let d = h.ambient();
            let n = d / 2;
            let mut acc = one_form(h.coeffs());
            for _ in 0..n - 1 {
                acc = wedge(&acc, &omega(n));
            }
            let sigma: Vec<f64> = m.iter().map(|&x| x as f64).collect();
            acc = wedge(&acc, &one_form(&sigma));
            let top: Vec<usize> = (0..d).collect();
            let coeff = acc.get(&top).copied().unwrap_or(0.0);
            let factorial: f64 = (1..n).map(|k| k as f64).product();
            let mu = if (n * (n - 1) / 2 + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
            mu * coeff / factorial
        }

        #[test]
        fn pairing_agrees_with_oracle_for_n_1_2_3() {
            let mut state = 0x9e37u64;
            let mut next = move || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
            };
            for n in 1..=3usize {
                for _ in 0..20 {
                    let h = HarmonicForm::new((0..2 * n).map(|_| next()).collect());
                    let m: Vec<i64> = (0..2 * n).map(|_| (next() * 3.0) as i64).collect();
                    let got = wedge_pair_top(&h, &m).unwrap();
                    let want = oracle(&h, &m);
                    assert!(
                        (got - want).abs() < 1e-12,
                        "n={n}: pairing {got} vs oracle {want}"
                    );
                }
            }
        }
    }
}
