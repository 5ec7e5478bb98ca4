//! Independent reference solvers for small box QPs with one sum constraint.
//!
//! `enumerate` tries every assignment of variables to {lower, upper, free}
//! (3^n cases), solves the equality-constrained stationarity system on the
//! free set with an SVD and keeps the best feasible candidate. For a strictly
//! convex problem the optimum is one of the candidates, so the result is
//! exact up to linear-algebra rounding.
//!
//! `grid` walks a step-`h` lattice over the first n−1 coordinates (n ≤ 3),
//! augmented with the bound values and the points that put the remaining
//! coordinates on a bound, and fixes the last coordinate from the sum.

use nalgebra::{DMatrix, DVector};

pub struct Problem {
    pub g: Vec<Vec<f64>>,
    pub q: Vec<f64>,
    pub l: Vec<f64>,
    pub u: Vec<f64>,
    pub s: f64,
}

impl Problem {
    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn objective(&self, c: &[f64]) -> f64 {
        let n = self.n();
        let mut v = 0.0;
        for i in 0..n {
            v += self.q[i] * c[i];
            for j in 0..n {
                v += 0.5 * c[i] * self.g[i][j] * c[j];
            }
        }
        v
    }

    fn feasible(&self, c: &[f64], tol: f64) -> bool {
        let sum: f64 = c.iter().sum();
        (sum - self.s).abs() <= tol
            && c.iter()
                .enumerate()
                .all(|(i, &v)| v >= self.l[i] - tol && v <= self.u[i] + tol)
    }
}

/// Exact minimum by active-set enumeration. Returns (objective, point).
pub fn enumerate(p: &Problem) -> (f64, Vec<f64>) {
    let n = p.n();
    assert!(n <= 10, "enumeration is exponential in n");
    let mut best = (f64::INFINITY, Vec::new());
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut state = vec![0u8; n];
        let mut k = code;
        for s in state.iter_mut() {
            *s = (k % 3) as u8;
            k /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let mut c = vec![0.0; n];
        for i in 0..n {
            match state[i] {
                0 => c[i] = p.l[i],
                1 => c[i] = p.u[i],
                _ => {}
            }
        }
        if free.is_empty() {
            if p.feasible(&c, 1e-10) {
                let obj = p.objective(&c);
                if obj < best.0 {
                    best = (obj, c);
                }
            }
            continue;
        }
        let m = free.len();
        // [G_FF  -1] [c_F]   [-q_F - G_FB c_B]
        // [1ᵀ     0] [ρ  ] = [s - Σ c_B       ]
        let mut a = DMatrix::<f64>::zeros(m + 1, m + 1);
        let mut b = DVector::<f64>::zeros(m + 1);
        let fixed_sum: f64 = (0..n).filter(|i| state[*i] != 2).map(|i| c[i]).sum();
        for (r, &i) in free.iter().enumerate() {
            for (k, &j) in free.iter().enumerate() {
                a[(r, k)] = p.g[i][j];
            }
            a[(r, m)] = -1.0;
            a[(m, r)] = 1.0;
            let mut rhs = -p.q[i];
            for j in 0..n {
                if state[j] != 2 {
                    rhs -= p.g[i][j] * c[j];
                }
            }
            b[r] = rhs;
        }
        b[m] = p.s - fixed_sum;
        let svd = a.clone().svd(true, true);
        let Ok(x) = svd.solve(&b, 1e-12) else {
            continue;
        };
        if (&a * &x - &b).amax() > 1e-9 {
            continue;
        }
        for (r, &i) in free.iter().enumerate() {
            c[i] = x[r];
        }
        if p.feasible(&c, 1e-10) {
            let obj = p.objective(&c);
            if obj < best.0 {
                best = (obj, c);
            }
        }
    }
    best
}

fn axis(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let mut v = Vec::new();
    let steps = ((hi - lo) / h).floor() as usize;
    for k in 0..=steps {
        v.push(lo + k as f64 * h);
    }
    v.push(hi);
    v
}

/// Lattice minimum with step `h` for n ∈ {1, 2, 3}.
pub fn grid(p: &Problem, h: f64) -> f64 {
    let n = p.n();
    assert!((1..=3).contains(&n), "grid oracle handles n ≤ 3");
    let last = n - 1;
    let mut best = f64::INFINITY;
    let mut consider = |c: &[f64]| {
        if p.feasible(c, 1e-12) {
            best = best.min(p.objective(c));
        }
    };
    match n {
        1 => consider(&[p.s]),
        2 => {
            let mut xs = axis(p.l[0], p.u[0], h);
            xs.push(p.s - p.l[1]);
            xs.push(p.s - p.u[1]);
            for x in xs {
                consider(&[x, p.s - x]);
            }
        }
        _ => {
            let mut xs = axis(p.l[0], p.u[0], h);
            for b1 in [p.l[1], p.u[1]] {
                for b2 in [p.l[last], p.u[last]] {
                    xs.push(p.s - b1 - b2);
                }
            }
            for x in xs {
                let mut ys = axis(p.l[1], p.u[1], h);
                ys.push(p.s - x - p.l[last]);
                ys.push(p.s - x - p.u[last]);
                for y in ys {
                    consider(&[x, y, p.s - x - y]);
                }
            }
        }
    }
    best
}
