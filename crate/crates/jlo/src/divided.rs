//! Divided differences of `x -> exp(-T x)`.

/// Clusters whose scaled spread `T (x_max - x_min)` is at most this use the Taylor rule.
pub const TAYLOR_SPREAD: f64 = 1.0;

const TAYLOR_MAX_TERMS: usize = 80;

/// `g[x_0, ..., x_k]` for `g(x) = exp(-t x)`, symmetric in the points.
///
/// Sorted points are combined by the recursive table; any sub-interval with
/// scaled spread at most [`TAYLOR_SPREAD`] is evaluated by a Taylor expansion
/// about its midpoint, which also covers coincident points.
pub fn heat_divided_difference(points: &[f64], t: f64) -> f64 {
    let k = points.len();
    assert!(k > 0, "divided difference of no points");
    let mut x = points.to_vec();
    x.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
    // table[i] holds g[x_i .. x_{i+len-1}] for the current len
    let mut table: Vec<f64> = x.iter().map(|&xi| (-t * xi).exp()).collect();
    for len in 2..=k {
        let mut next = Vec::with_capacity(k - len + 1);
        for i in 0..=(k - len) {
            let j = i + len - 1;
            let spread = x[j] - x[i];
            let v = if t * spread <= TAYLOR_SPREAD {
                taylor_cluster(&x[i..=j], t)
            } else {
                (table[i + 1] - table[i]) / spread
            };
            next.push(v);
        }
        table = next;
    }
    table[0]
}

/// `g[y]` via `sum_m g^{(n+m)}(c) / (n+m)! h_m(y - c)` with complete homogeneous `h_m`.
fn taylor_cluster(x: &[f64], t: f64) -> f64 {
    let n = x.len() - 1;
    let c = 0.5 * (x[0] + x[n]);
    let y: Vec<f64> = x.iter().map(|&xi| xi - c).collect();
    // h[j] = h_m(y_0..y_j) for the current m, updated in place
    let mut h = vec![1.0; n + 1];
    // (-t)^(n+m) / (n+m)!
    let mut coef = (1..=n).fold(1.0, |acc, j| acc * (-t) / j as f64);
    let mut sum = coef * h[n];
    // |h_m| <= C(n+m, m) r^m, so the remainder after term m is below t^n/n! (t r)^m/m!
    let r = y.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut majorant = coef.abs();
    for m in 1..TAYLOR_MAX_TERMS {
        let mut acc = 0.0;
        for j in 0..=n {
            acc = y[j] * h[j] + acc;
            // acc now equals h_m(y_0..y_j) = h_m(y_0..y_{j-1}) + y_j h_{m-1}(y_0..y_j)
            h[j] = acc;
        }
        coef *= -t / (n + m) as f64;
        sum += coef * h[n];
        majorant *= t * r / m as f64;
        if majorant <= 1e-18 * sum.abs() {
            break;
        }
    }
    (-t * c).exp() * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let (a, b) = (0.3, 2.7);
        let expected = ((-b as f64).exp() - (-a as f64).exp()) / (b - a);
        assert!((heat_divided_difference(&[a, b], 1.0) - expected).abs() < 1e-15);
        assert!((heat_divided_difference(&[1.5, 1.5], 1.0) + (-1.5f64).exp()).abs() < 1e-15);
        assert!((heat_divided_difference(&[2.0], 3.0) - (-6.0f64).exp()).abs() < 1e-18);
        // g[x, x, x] = g''(x) / 2
        let v = heat_divided_difference(&[0.7, 0.7, 0.7], 2.0);
        assert!((v - 2.0 * (-1.4f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn symmetric_and_continuous() {
        let p = [0.1, 5.0, 0.1 + 1e-9, 3.0];
        let q = [3.0, 0.1, 5.0, 0.1 + 1e-9];
        assert_eq!(
            heat_divided_difference(&p, 1.0),
            heat_divided_difference(&q, 1.0)
        );
        let coincident = heat_divided_difference(&[0.1, 0.1, 3.0, 5.0], 1.0);
        assert!((heat_divided_difference(&p, 1.0) - coincident).abs() < 1e-9 * coincident.abs());
    }

    #[test]
    fn taylor_rule_matches_closed_form() {
        // symmetric about the midpoint, so odd Taylor terms vanish
        let (a, b, t) = (0.1f64, 1.3f64, 0.3f64);
        let exact = ((-t * b).exp() - (-t * a).exp()) / (b - a);
        assert!((heat_divided_difference(&[a, b], t) - exact).abs() < 1e-16);
        let g2 = (heat_divided_difference(&[1.3, 2.0], t) - heat_divided_difference(&[a, 1.3], t)) / (2.0 - a);
        assert!((heat_divided_difference(&[a, 1.3, 2.0], t) - g2).abs() < 1e-15);
    }

    #[test]
    fn agrees_with_recursion_where_stable() {
        // well separated points: plain recursion in extended spacing is accurate
        let pts = [0.0, 2.0, 4.5, 7.0];
        let direct = {
            let f = |x: f64| (-x).exp();
            let d01 = (f(2.0) - f(0.0)) / 2.0;
            let d12 = (f(4.5) - f(2.0)) / 2.5;
            let d23 = (f(7.0) - f(4.5)) / 2.5;
            let d012 = (d12 - d01) / 4.5;
            let d123 = (d23 - d12) / 5.0;
            (d123 - d012) / 7.0
        };
        assert!((heat_divided_difference(&pts, 1.0) - direct).abs() < 1e-15);
    }

    #[test]
    fn sign_pattern_of_completely_monotone_function() {
        for k in 0..8 {
            let pts: Vec<f64> = (0..=k).map(|j| 0.37 * j as f64 * j as f64).collect();
            let v = heat_divided_difference(&pts, 1.3);
            assert!(v * if k % 2 == 0 { 1.0 } else { -1.0 } > 0.0, "k={k} v={v}");
        }
    }
}
