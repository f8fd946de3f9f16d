//! Gauss-type quadrature on the reference triangle and the unit interval.

/// Quadrature on the reference triangle `{(x, y): x, y ≥ 0, x + y ≤ 1}`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    /// Reference coordinates `(x, y)`.
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    /// Barycentric coordinates `(1 - x - y, x, y)` of each point.
    pub fn barycentric(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        self.points.iter().map(|p| [1.0 - p[0] - p[1], p[0], p[1]])
    }

    pub fn integrate(&self, f: impl Fn([f64; 2]) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(*p))
            .sum()
    }
}

/// Rule on `[0, 1]`; weights sum to one.
#[derive(Clone, Debug)]
pub struct EdgeRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl EdgeRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(t, w)| w * f(*t))
            .sum()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, Newton on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre needs at least one point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * d * d);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

// (P_n(x), P_n'(x)) by the three-term recurrence
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss rule on `[0, 1]` with `n` points (exact to degree `2n - 1`).
pub fn edge_gauss(n: usize) -> EdgeRule {
    let (x, w) = gauss_legendre(n);
    EdgeRule {
        points: x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
        weights: w.iter().map(|w| 0.5 * w).collect(),
        degree: 2 * n - 1,
    }
}

/// Two-point Gauss on `[0, 1]`, exact for cubics.
pub fn edge_rule() -> EdgeRule {
    edge_gauss(2)
}

/// Collapsed (Duffy) tensor Gauss rule exact for polynomials of total
/// degree `degree` on the reference triangle.
pub fn triangle_rule(degree: usize) -> QuadratureRule {
    // the collapse adds one degree in the first variable
    let n = (degree + 2).div_ceil(2).max(1);
    let (x, w) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (xu, wu) in x.iter().zip(&w) {
        let u = 0.5 * (xu + 1.0);
        for (xv, wv) in x.iter().zip(&w) {
            let v = 0.5 * (xv + 1.0);
            points.push([u, v * (1.0 - u)]);
            weights.push(0.25 * wu * wv * (1.0 - u));
        }
    }
    QuadratureRule {
        points,
        weights,
        degree,
    }
}

/// Rule used for every volumetric integral.
pub fn default_triangle_rule() -> QuadratureRule {
    triangle_rule(6)
}
