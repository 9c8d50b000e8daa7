//! Invariant measures on the deformation invariants and the potential generated by the
//! substitution `Φ = √P·Ψ`.

/// `P_λ = Π_{i≠j} |sh(qⁱ − qʲ)|`, each unordered pair counted twice.
pub fn haar_weight(q: &[f64]) -> f64 {
    ordered_pair_product(q, |x| x.sinh().abs())
}

/// `P_ℓ = Π_{a≠b} |(Qᵃ)² − (Qᵇ)²|`.
pub fn lebesgue_weight(cap_q: &[f64]) -> f64 {
    let sq: Vec<f64> = cap_q.iter().map(|v| v * v).collect();
    ordered_pair_product(&sq, f64::abs)
}

/// Compact analogue `Π_{i≠j} |sin(qⁱ − qʲ)|` used by the unitary model.
pub fn trig_weight(q: &[f64]) -> f64 {
    ordered_pair_product(q, |x| x.sin().abs())
}

fn ordered_pair_product(v: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let mut p = 1.0;
    for a in 0..v.len() {
        for b in 0..v.len() {
            if a != b {
                p *= f(v[a] - v[b]);
            }
        }
    }
    p
}

/// `Δ√P / √P` for the hyperbolic (`sign = 1`) or trigonometric (`sign = −1`) measure.
/// `√P = Π_{a<b} |sh(qᵃ − qᵇ)|` is a Laplacian eigenfunction with eigenvalue `n(n²−1)/3`
/// (`−n(n²−1)/3` for `sin`).
pub fn amended_invariant_constant(n: usize, sign: f64) -> f64 {
    let n = n as f64;
    sign * n * (n * n - 1.0) / 3.0
}

/// `Δ√P / √P` for `√P = Π_{a<b} |Qᵃ² − Qᵇ²|`, via `|∇ ln √P|² + Δ ln √P`.
pub fn amended_lebesgue_ratio(cap_q: &[f64]) -> f64 {
    let n = cap_q.len();
    let mut total = 0.0;
    for a in 0..n {
        let mut grad = 0.0;
        for b in 0..n {
            if a == b {
                continue;
            }
            let (qa2, qb2) = (cap_q[a] * cap_q[a], cap_q[b] * cap_q[b]);
            let d = qa2 - qb2;
            grad += 2.0 * cap_q[a] / d;
            total += -2.0 * (qa2 + qb2) / (d * d);
        }
        total += grad * grad;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coincidences_vanish() {
        assert_eq!(haar_weight(&[0.3, 0.3, -1.0]), 0.0);
        assert_eq!(lebesgue_weight(&[2.0, 2.0]), 0.0);
    }

    #[test]
    fn two_body_values() {
        let p = haar_weight(&[1.0, 0.0]);
        assert!((p - 1f64.sinh().powi(2)).abs() < 1e-15);
        assert!((p - 1.381097845541817).abs() < 1e-12);
        assert_eq!(lebesgue_weight(&[2.0, 1.0]), 9.0);
    }

    fn laplacian_ratio(f: impl Fn(&[f64]) -> f64, q: &[f64]) -> f64 {
        let h = 1e-4;
        let f0 = f(q);
        let mut lap = 0.0;
        for a in 0..q.len() {
            let mut up = q.to_vec();
            let mut dn = q.to_vec();
            up[a] += h;
            dn[a] -= h;
            lap += (f(&up) - 2.0 * f0 + f(&dn)) / (h * h);
        }
        lap / f0
    }

    #[test]
    fn amended_constants_match_finite_differences() {
        let q2 = [0.7, -0.4];
        let q3 = [0.9, 0.2, -0.6];
        for q in [&q2[..], &q3[..]] {
            let n = q.len();
            let hyp = laplacian_ratio(|v| haar_weight(v).sqrt(), q);
            assert!((hyp - amended_invariant_constant(n, 1.0)).abs() < 1e-5, "{hyp}");
            let trig = laplacian_ratio(|v| trig_weight(v).sqrt(), q);
            assert!((trig - amended_invariant_constant(n, -1.0)).abs() < 1e-5, "{trig}");
        }
        for cap_q in [&[2.0, 1.3][..], &[2.0, 1.3, 0.6][..]] {
            let fd = laplacian_ratio(|v| lebesgue_weight(v).sqrt(), cap_q);
            assert!((fd - amended_lebesgue_ratio(cap_q)).abs() < 1e-5 * (1.0 + fd.abs()));
        }
    }
}
