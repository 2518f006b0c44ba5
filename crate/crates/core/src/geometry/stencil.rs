//! Finite-difference weights on arbitrary nodes (Fornberg's recursion).

/// Half-width of the curvature stencil. Seven points give sixth-order accuracy on
/// uniform nodes for both first and second derivatives.
pub const HALF_WIDTH: usize = 3;
pub const WIDTH: usize = 2 * HALF_WIDTH + 1;

/// Weights `w[k][j]` such that `f^{(k)}(x0) ~ sum_j w[k][j] f(nodes[j])`, for
/// derivative orders `k = 0..=max_order`.
pub fn fornberg_weights(x0: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// First- and second-derivative weights for the seven-point stencil, without allocating.
pub fn weights7(x0: f64, nodes: &[f64; WIDTH]) -> ([f64; WIDTH], [f64; WIDTH]) {
    let mut c = [[0.0; WIDTH]; 3];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..WIDTH {
        let mn = i.min(2);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    (c[1], c[2])
}

pub fn apply(w: &[f64; WIDTH], values: &[f64; WIDTH]) -> f64 {
    w.iter().zip(values).map(|(a, b)| a * b).sum()
}

/// First and second derivatives at `x0` from samples `values` at `nodes`.
pub fn first_second(x0: f64, nodes: &[f64], values: &[f64]) -> (f64, f64) {
    if let (Ok(n), Ok(v)) = (
        <&[f64; WIDTH]>::try_from(nodes),
        <&[f64; WIDTH]>::try_from(values),
    ) {
        let (w1, w2) = weights7(x0, n);
        return (apply(&w1, v), apply(&w2, v));
    }
    let w = fornberg_weights(x0, nodes, 2);
    let d1 = w[1].iter().zip(values).map(|(a, b)| a * b).sum();
    let d2 = w[2].iter().zip(values).map(|(a, b)| a * b).sum();
    (d1, d2)
}
