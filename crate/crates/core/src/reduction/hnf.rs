//! Column Hermite normal form of integer lattices.

/// Canonical basis of the lattice spanned by the columns of `a` (`k` rows):
/// lower-triangular echelon columns with positive pivots, entries left of
/// each pivot reduced into `[0, pivot)`. Returned column-major.
pub fn column_hnf(rows: usize, columns: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut cols: Vec<Vec<i128>> = columns
        .iter()
        .map(|c| {
            assert_eq!(c.len(), rows, "column length must match the row count");
            c.iter().map(|&v| i128::from(v)).collect()
        })
        .collect();
    let m = cols.len();
    let mut r = 0;
    for row in 0..rows {
        if r == m {
            break;
        }
        for j in (r + 1)..m {
            if cols[j][row] == 0 {
                continue;
            }
            let (a, b) = (cols[r][row], cols[j][row]);
            let (g, x, y) = ext_gcd(a, b);
            let (ag, bg) = (a / g, b / g);
            let cr = cols[r].clone();
            let cj = cols[j].clone();
            for i in 0..rows {
                cols[r][i] = x * cr[i] + y * cj[i];
                cols[j][i] = bg * cr[i] - ag * cj[i];
            }
        }
        if cols[r][row] == 0 {
            continue;
        }
        if cols[r][row] < 0 {
            cols[r].iter_mut().for_each(|v| *v = -*v);
        }
        let pivot = cols[r][row];
        for j in 0..r {
            let q = cols[j][row].div_euclid(pivot);
            if q != 0 {
                let cr = cols[r].clone();
                for i in 0..rows {
                    cols[j][i] -= q * cr[i];
                }
            }
        }
        r += 1;
    }
    cols.truncate(r);
    cols.into_iter()
        .map(|c| {
            c.into_iter()
                .map(|v| i64::try_from(v).expect("HNF entries fit in i64"))
                .collect()
        })
        .collect()
}

/// `(g, x, y)` with `g = gcd(a, b) > 0` and `a x + b y = g`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_of_a_row() {
        assert_eq!(column_hnf(1, &[vec![4], vec![6]]), vec![vec![2]]);
        assert_eq!(column_hnf(1, &[vec![-1], vec![-1]]), vec![vec![1]]);
        assert_eq!(column_hnf(1, &[vec![0]]), Vec::<Vec<i64>>::new());
    }

    #[test]
    fn invariant_under_unimodular_change() {
        let a = vec![vec![1, 0], vec![1, 1], vec![1, -1]];
        let b = vec![vec![2, 1], vec![1, 0], vec![0, 1], vec![3, 2]];
        assert_eq!(column_hnf(2, &a), column_hnf(2, &b));
        assert_eq!(column_hnf(2, &a), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn index_two_sublattice() {
        let h = column_hnf(2, &[vec![1, 1], vec![1, -1]]);
        assert_eq!(h, vec![vec![1, 1], vec![0, 2]]);
    }
}
