//! Gauss–Legendre and tanh–sinh rules.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::Cplx;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (c + h * x, h * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    pub fn integrate_complex<F: FnMut(f64) -> Cplx>(&self, a: f64, b: f64, mut f: F) -> Cplx {
        self.mapped(a, b).map(|(x, w)| f(x) * w).sum()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Legendre polynomials `P_0..=P_{n-1}` at `x`.
pub fn legendre_all(n: usize, x: f64, out: &mut [f64]) {
    if n == 0 {
        return;
    }
    out[0] = 1.0;
    if n > 1 {
        out[1] = x;
    }
    for k in 2..n {
        let kf = k as f64;
        out[k] = ((2.0 * kf - 1.0) * x * out[k - 1] - (kf - 1.0) * out[k - 2]) / kf;
    }
}

/// Composite Gauss–Legendre nodes and weights on consecutive intervals of
/// `breaks`, `per_panel` nodes on each.
pub fn composite(breaks: &[f64], per_panel: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::new(per_panel);
    let mut x = Vec::with_capacity(per_panel * breaks.len());
    let mut w = Vec::with_capacity(per_panel * breaks.len());
    for pair in breaks.windows(2) {
        for (xi, wi) in rule.mapped(pair[0], pair[1]) {
            x.push(xi);
            w.push(wi);
        }
    }
    (x, w)
}

/// Result of an adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: Cplx,
    pub error: f64,
    pub evaluations: usize,
}

/// Double-exponential quadrature on a finite interval. `f` receives
/// `(x, x - a, b - x)` so integrands with endpoint singularities can use the
/// accurately computed distances.
pub fn tanh_sinh<F>(a: f64, b: f64, tol: f64, max_level: usize, mut f: F) -> Estimate
where
    F: FnMut(f64, f64, f64) -> Cplx,
{
    let half = 0.5 * (b - a);
    let tmax = 4.5;
    let eval = |t: f64, f: &mut F| -> Cplx {
        let s = FRAC_PI_2 * t.sinh();
        // 1 - tanh(s) and 1 + tanh(s) without cancellation
        let one_minus = 2.0 / ((2.0 * s).exp() + 1.0);
        let one_plus = 2.0 / ((-2.0 * s).exp() + 1.0);
        let w = FRAC_PI_2 * t.cosh() / (s.cosh() * s.cosh());
        let dl = half * one_plus;
        let dr = half * one_minus;
        if dl <= 0.0 || dr <= 0.0 {
            return Cplx::new(0.0, 0.0);
        }
        let x = if dl < dr { a + dl } else { b - dr };
        f(x, dl, dr) * (w * half)
    };
    let mut h = 1.0;
    let mut sum = eval(0.0, &mut f);
    let mut evaluations = 1;
    let mut k = 1;
    while k as f64 * h <= tmax {
        let t = k as f64 * h;
        sum += eval(t, &mut f) + eval(-t, &mut f);
        evaluations += 2;
        k += 1;
    }
    let mut value = sum * h;
    let mut error = f64::INFINITY;
    for _ in 0..max_level {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= tmax {
            let t = k as f64 * h;
            sum += eval(t, &mut f) + eval(-t, &mut f);
            evaluations += 2;
            k += 2;
        }
        let next = sum * h;
        error = (next - value).norm();
        value = next;
        if error <= tol * value.norm().max(1e-300) {
            break;
        }
    }
    Estimate { value, error, evaluations }
}
