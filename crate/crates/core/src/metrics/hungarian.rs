/// Minimum-cost perfect matching on a square cost matrix.
///
/// Shortest augmenting path with row/column potentials, `O(n³)`. Returns
/// `assignment[row] = column`.
pub fn min_cost_assignment(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    debug_assert!(cost.iter().all(|r| r.len() == n));
    const INF: i64 = i64::MAX / 4;
    // 1-based internally; index 0 is the virtual source column
    let mut row_pot = vec![0i64; n + 1];
    let mut col_pot = vec![0i64; n + 1];
    let mut col_owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for row in 1..=n {
        col_owner[0] = row;
        let mut col0 = 0usize;
        let mut min_slack = vec![INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r0 = col_owner[col0];
            let mut delta = INF;
            let mut col1 = 0usize;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let reduced = cost[r0 - 1][col - 1] - row_pot[r0] - col_pot[col];
                if reduced < min_slack[col] {
                    min_slack[col] = reduced;
                    way[col] = col0;
                }
                if min_slack[col] < delta {
                    delta = min_slack[col];
                    col1 = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    row_pot[col_owner[col]] += delta;
                    col_pot[col] -= delta;
                } else {
                    min_slack[col] -= delta;
                }
            }
            col0 = col1;
            if col_owner[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            col_owner[col0] = col_owner[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for col in 1..=n {
        if col_owner[col] > 0 {
            assignment[col_owner[col] - 1] = col - 1;
        }
    }
    assignment
}
