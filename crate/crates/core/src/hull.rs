//! Monotone-chain lower hull for points sorted by abscissa.

/// Indices of the lower convex hull of `(xs[i], ys[i])`.
///
/// `xs` must be nondecreasing. Where several points share an abscissa only the
/// lowest one can lie on a lower hull, so the others are skipped. Collinear
/// interior points are dropped.
pub fn lower_hull(xs: &[f64], ys: &[f64]) -> Vec<usize> {
    debug_assert_eq!(xs.len(), ys.len());
    debug_assert!(xs.windows(2).all(|w| w[0] <= w[1]));

    // lowest point per abscissa
    let mut cand: Vec<usize> = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        match cand.last() {
            Some(&j) if xs[j] == xs[i] => {
                if ys[i] < ys[j] {
                    *cand.last_mut().unwrap() = i;
                }
            }
            _ => cand.push(i),
        }
    }

    let mut hull: Vec<usize> = Vec::with_capacity(cand.len());
    for &i in &cand {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // keep b only if a -> b -> i turns strictly left (counter-clockwise)
            let cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Indices of the upper hull, the mirror image of [`lower_hull`].
pub fn upper_hull(xs: &[f64], ys: &[f64]) -> Vec<usize> {
    let neg: Vec<f64> = ys.iter().map(|y| -y).collect();
    lower_hull(xs, &neg)
}
