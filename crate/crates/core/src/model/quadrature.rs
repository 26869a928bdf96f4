//! Product-integration weights for integrands of the form `|x|^e f(x)` on
//! cell-centred grids.
//!
//! `f` is replaced by its local quadratic interpolant through the node and
//! its two neighbours; the singular (or geometric) factor `|x|^e` is
//! integrated exactly over each cell. The resulting nodal weights make
//! `Σ_j w_j f(x_j)` accurate to fourth order away from the origin and keep
//! the weak singularity of `|x|^{-b}` from degrading the rule.

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const GL_POINTS: usize = 16;

/// `[∫ |x|^e, ∫ |x|^e (x - xc), ∫ |x|^e (x - xc)^2]` over `[xc - h/2, xc + h/2]`.
pub fn cell_moments(xc: f64, h: f64, e: f64, gl: &(Vec<f64>, Vec<f64>)) -> [f64; 3] {
    let lo = xc - 0.5 * h;
    let hi = xc + 0.5 * h;
    if lo.abs().min(hi.abs()) >= h && lo * hi > 0.0 {
        // smooth on the cell: Gauss–Legendre in the local variable
        let half = 0.5 * h;
        let mut m = [0.0; 3];
        for (t, w) in gl.0.iter().zip(&gl.1) {
            let s = half * t;
            let g = (xc + s).abs().powf(e) * w * half;
            m[0] += g;
            m[1] += g * s;
            m[2] += g * s * s;
        }
        return m;
    }
    let i0 = power_integral(0, lo, hi, e);
    let i1 = power_integral(1, lo, hi, e);
    let i2 = power_integral(2, lo, hi, e);
    [i0, i1 - xc * i0, i2 - 2.0 * xc * i1 + xc * xc * i0]
}

/// `∫_a^c |x|^e x^p dx` for `a < c`.
fn power_integral(p: i32, a: f64, c: f64, e: f64) -> f64 {
    let q = p as f64 + e + 1.0;
    let f = |t: f64| t.powf(q) / q;
    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
    if a >= 0.0 {
        f(c) - f(a)
    } else if c <= 0.0 {
        sign * (f(-a) - f(-c))
    } else {
        f(c) + sign * f(-a)
    }
}

/// Nodal weights for `∫ |x|^e f` on a periodic line grid with nodes `x`.
pub fn line_product_weights(x: &[f64], h: f64, e: f64) -> Vec<f64> {
    let n = x.len();
    let gl = gauss_legendre(GL_POINTS);
    let m: Vec<[f64; 3]> = x.iter().map(|&xc| cell_moments(xc, h, e, &gl)).collect();
    let mut w = vec![0.0; n];
    for j in 0..n {
        let [m0, m1, m2] = m[j];
        let left = (j + n - 1) % n;
        let right = (j + 1) % n;
        w[j] += m0 - m2 / (h * h);
        w[left] += -m1 / (2.0 * h) + m2 / (2.0 * h * h);
        w[right] += m1 / (2.0 * h) + m2 / (2.0 * h * h);
    }
    w
}

/// Nodal weights for `∫_0^R r^e f(r) dr` on cell-centred radial nodes, with
/// `f` even about the origin and vanishing beyond `R`.
pub fn radial_product_weights(r: &[f64], h: f64, e: f64) -> Vec<f64> {
    let n = r.len();
    let gl = gauss_legendre(GL_POINTS);
    let mut w = vec![0.0; n];
    for j in 0..n {
        let [m0, m1, m2] = cell_moments(r[j], h, e, &gl);
        w[j] += m0 - m2 / (h * h);
        let lower = -m1 / (2.0 * h) + m2 / (2.0 * h * h);
        let upper = m1 / (2.0 * h) + m2 / (2.0 * h * h);
        // node -r_0 mirrors node 0; the node beyond R carries no mass
        if j == 0 {
            w[0] += lower;
        } else {
            w[j - 1] += lower;
        }
        if j + 1 < n {
            w[j + 1] += upper;
        }
    }
    w
}
