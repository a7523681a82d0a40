//! Smith normal form over the integers by unimodular row and column operations.

/// Diagonal of the Smith normal form of a `rows x cols` matrix, as nonnegative
/// entries `d_1 | d_2 | ...` of length `min(rows, cols)`.
///
/// `cols` is passed separately so that a matrix with no rows still has a width.
pub fn smith_normal_form(matrix: &[Vec<i64>], cols: usize) -> Vec<i128> {
    let rows = matrix.len();
    let mut a: Vec<Vec<i128>> = matrix
        .iter()
        .map(|r| {
            assert_eq!(r.len(), cols, "ragged matrix");
            r.iter().map(|&x| x as i128).collect()
        })
        .collect();
    let dim = rows.min(cols);
    for t in 0..dim {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| (a[i][j].abs(), i, j));
            let Some((pi, pj)) = pivot else {
                return finish(&a, dim);
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }

            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let f = a[i][t] / p;
                if f != 0 {
                    for j in t..cols {
                        a[i][j] -= f * a[t][j];
                    }
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..cols {
                let f = a[t][j] / p;
                if f != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[j] -= f * row[t];
                    }
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into row t and go again
            let offending = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % p != 0));
            match offending {
                Some(i) => {
                    for j in t..cols {
                        a[t][j] += a[i][j];
                    }
                }
                None => break,
            }
        }
    }
    finish(&a, dim)
}

fn finish(a: &[Vec<i128>], dim: usize) -> Vec<i128> {
    (0..dim).map(|i| a[i][i].abs()).collect()
}
