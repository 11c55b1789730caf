/// Euclidean positions of the corners of a regular unit-side d-simplex, with
/// corner 0 at the origin.
///
/// Returns d+1 rows of length d. Rows 1..=d are the Cholesky factor of their
/// Gram matrix (diagonal 1, off-diagonal 1/2), which pins every pairwise
/// distance to 1.
pub fn simplex_corners(d: usize) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![0.0; d]; d + 1];
    // lower-triangular Cholesky of G where G[i][i] = 1, G[i][j] = 1/2
    for i in 0..d {
        for j in 0..=i {
            let g: f64 = if i == j { 1.0 } else { 0.5 };
            let mut s = g;
            for k in 0..j {
                s -= rows[i + 1][k] * rows[j + 1][k];
            }
            if i == j {
                rows[i + 1][j] = s.sqrt();
            } else {
                rows[i + 1][j] = s / rows[j + 1][j];
            }
        }
    }
    rows
}

/// Maps barycentric weights (summing to 1) to a point of the embedded simplex.
pub fn barycentric_to_euclidean(weights: &[f64], corners: &[Vec<f64>]) -> Vec<f64> {
    let d = corners[0].len();
    let mut p = vec![0.0; d];
    for (w, corner) in weights.iter().zip(corners.iter()) {
        for (pi, ci) in p.iter_mut().zip(corner.iter()) {
            *pi += w * ci;
        }
    }
    p
}

#[cfg(test)]
pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_corners_have_unit_side() {
        for d in 2..=6 {
            let q = simplex_corners(d);
            assert_eq!(q.len(), d + 1);
            for i in 0..=d {
                for j in (i + 1)..=d {
                    let dist = distance(&q[i], &q[j]);
                    assert!(
                        (dist - 1.0).abs() < 1e-12,
                        "corner pair ({i},{j}) at distance {dist} in d={d}"
                    );
                }
            }
        }
    }

    #[test]
    fn corner_zero_is_origin() {
        let q = simplex_corners(3);
        assert!(q[0].iter().all(|&c| c == 0.0));
    }
}
