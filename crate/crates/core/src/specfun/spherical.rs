/// Spherical Bessel functions `j_0(ω), …, j_{n-1}(ω)` for `ω >= 0`.
///
/// Forward recurrence is stable while `k < ω`; otherwise Miller's backward
/// recurrence is normalised with `Σ (2k+1) j_k² = 1`.
pub fn spherical_bessel_j_seq(n: usize, omega: f64, out: &mut [f64]) {
    let out = &mut out[..n];
    if n == 0 {
        return;
    }
    let w = omega.abs();
    if w == 0.0 {
        out.fill(0.0);
        out[0] = 1.0;
        return;
    }
    if w < 1e-8 {
        // two-term power series j_k ≈ w^k/(2k+1)!! · (1 − w²/(2(2k+3)))
        let mut lead = 1.0;
        for (k, v) in out.iter_mut().enumerate() {
            if k > 0 {
                lead *= w / (2 * k + 1) as f64;
            }
            *v = lead * (1.0 - w * w / (2.0 * (2 * k + 3) as f64));
        }
        apply_parity(omega, out);
        return;
    }
    let (s, c) = w.sin_cos();
    let j0 = if w < 1e-4 { 1.0 - w * w / 6.0 } else { s / w };
    let j1 = if w < 1e-3 { w / 3.0 - w * w * w / 30.0 } else { (s / w - c) / w };
    if w >= n as f64 {
        out[0] = j0;
        if n > 1 {
            out[1] = j1;
        }
        for k in 1..n.saturating_sub(1) {
            out[k + 1] = (2 * k + 1) as f64 / w * out[k] - out[k - 1];
        }
    } else {
        let top = n + 24 + (2.0 * (40.0 * n as f64).sqrt()) as usize;
        let mut next = 0.0;
        let mut cur = 1.0;
        let mut norm = 0.0;
        for k in (0..top).rev() {
            // cur holds j_k (unnormalised), next holds j_{k+1}
            if k < n {
                out[k] = cur;
            }
            norm += (2 * k + 1) as f64 * cur * cur;
            if k > 0 {
                let prev = (2 * k + 1) as f64 / w * cur - next;
                next = cur;
                cur = prev;
            }
            if cur.abs() > 1e100 {
                let f = 1e-100;
                cur *= f;
                next *= f;
                norm *= f * f;
                for v in out.iter_mut().skip(k.saturating_sub(1)) {
                    *v *= f;
                }
            }
        }
        let mut scale = 1.0 / norm.sqrt();
        let (reference, computed) = if j0.abs() >= j1.abs() || n == 1 {
            (j0, out[0])
        } else {
            (j1, out[1])
        };
        if reference * computed < 0.0 {
            scale = -scale;
        }
        for v in out.iter_mut() {
            *v *= scale;
        }
    }
    apply_parity(omega, out);
}

fn apply_parity(omega: f64, out: &mut [f64]) {
    if omega < 0.0 {
        for v in out.iter_mut().skip(1).step_by(2) {
            *v = -*v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders_match_closed_forms() {
        for &w in &[1e-6, 0.01, 0.7, 3.0, 9.5, 40.0, 300.0] {
            let mut out = [0.0; 12];
            spherical_bessel_j_seq(12, w, &mut out);
            let (s, c) = f64::sin_cos(w);
            let j2 = (3.0 / (w * w) - 1.0) * s / w - 3.0 * c / (w * w);
            assert!((out[0] - s / w).abs() < 1e-13, "w={w}");
            if w > 1e-2 {
                assert!((out[1] - (s / (w * w) - c / w)).abs() < 1e-12, "w={w}");
                assert!((out[2] - j2).abs() < 1e-10, "w={w}");
            }
        }
    }

    #[test]
    fn recurrence_branches_agree() {
        // at w just above n use forward, ask for more orders to force Miller
        let w = 10.5;
        let mut a = [0.0; 10];
        let mut b = [0.0; 30];
        spherical_bessel_j_seq(10, w, &mut a);
        spherical_bessel_j_seq(30, w, &mut b);
        for k in 0..10 {
            assert!((a[k] - b[k]).abs() < 1e-13, "k={k} {} {}", a[k], b[k]);
        }
    }

    #[test]
    fn negative_argument_parity() {
        let mut a = [0.0; 6];
        let mut b = [0.0; 6];
        spherical_bessel_j_seq(6, 2.5, &mut a);
        spherical_bessel_j_seq(6, -2.5, &mut b);
        for k in 0..6 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a[k] * sign - b[k]).abs() < 1e-15);
        }
    }
}
