#![allow(dead_code)]

use std::collections::HashMap;

use fanobott_core::{FanoBottMatrix, Sign};

pub type Grid = Vec<Vec<i64>>;

pub fn grid(a: &FanoBottMatrix) -> Grid {
    a.to_rows()
}

pub fn fb(rows: &[&[i64]]) -> FanoBottMatrix {
    FanoBottMatrix::from_rows(rows).unwrap()
}

/// Row-template check: each row is zero, `e^q`, or `-e^q + row q`, with
/// `q` to the right of the diagonal.
pub fn oracle_is_fb(g: &Grid) -> bool {
    let d = g.len();
    if g.iter().any(|r| r.len() != d) {
        return false;
    }
    for p in 0..d {
        if (0..=p).any(|j| g[p][j] != 0) {
            return false;
        }
        let zero = g[p].iter().all(|&x| x == 0);
        let unit = (p + 1..d).any(|q| (0..d).all(|j| g[p][j] == i64::from(j == q)));
        let copy = (p + 1..d).any(|q| {
            (0..d).all(|j| g[p][j] == if j == q { -1 } else { g[q][j] })
        });
        if !(zero || unit || copy) {
            return false;
        }
    }
    true
}

/// Builds rows from the bottom up: a root row is zero, a `+` row is `e^q`,
/// a `-` row is `-e^q` plus row `q`.
pub fn oracle_from_parents(parents: &[Option<(usize, Sign)>]) -> Grid {
    let d = parents.len();
    let mut g = vec![vec![0; d]; d];
    for p in (0..d).rev() {
        match parents[p] {
            None => {}
            Some((q, Sign::Plus)) => g[p][q] = 1,
            Some((q, Sign::Minus)) => {
                let mut row = g[q].clone();
                row[q] = -1;
                g[p] = row;
            }
        }
    }
    g
}

/// `P A P^{-1}` with `P` the matrix whose column `j` is `e_{pi(j)}`.
pub fn oracle_op1(g: &Grid, pi: &[usize]) -> Grid {
    let d = g.len();
    let mut p = vec![vec![0i64; d]; d];
    for j in 0..d {
        p[pi[j]][j] = 1;
    }
    let pt: Grid = (0..d).map(|i| (0..d).map(|j| p[j][i]).collect()).collect();
    mul(&mul(&p, g), &pt)
}

fn mul(a: &Grid, b: &Grid) -> Grid {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).map(|t| a[i][t] * b[t][j]).sum())
                .collect()
        })
        .collect()
}

/// Column `k` negated, column `j` gains `A[k][j]` times the old column `k`.
pub fn oracle_op2(g: &Grid, k: usize) -> Grid {
    let d = g.len();
    let mut out = g.clone();
    for i in 0..d {
        for j in 0..d {
            out[i][j] = if j == k {
                -g[i][k]
            } else {
                g[i][j] + g[k][j] * g[i][k]
            };
        }
    }
    out
}

/// `None` unless row `l` is zero and row `k` is `+-e^l`.
pub fn oracle_op3(g: &Grid, k: usize, l: usize) -> Option<Grid> {
    let d = g.len();
    if k == l || g[l].iter().any(|&x| x != 0) {
        return None;
    }
    let unit = (0..d).all(|j| g[k][j].abs() == i64::from(j == l));
    if !unit {
        return None;
    }
    let mut out = g.clone();
    for i in 0..d {
        if i == k {
            out[i][l] = -g[k][l];
        } else if i != l && g[i][k] != 0 {
            out[i][l] = g[i][k] * g[i][l];
        }
    }
    Some(out)
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// All strictly upper triangular `{-1, 0, 1}` grids passing the template
/// check.
pub fn oracle_fb_list(d: usize) -> Vec<Grid> {
    let cells: Vec<(usize, usize)> = (0..d)
        .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
        .collect();
    let total = 3usize.pow(cells.len() as u32);
    let mut out = Vec::new();
    for mut code in 0..total {
        let mut g = vec![vec![0; d]; d];
        for &(i, j) in &cells {
            g[i][j] = (code % 3) as i64 - 1;
            code /= 3;
        }
        if oracle_is_fb(&g) {
            out.push(g);
        }
    }
    out
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Connected components of `items` under the given moves, as
/// first-occurrence class numbers.
pub fn oracle_components(items: &[Grid], with_op3: bool) -> Vec<usize> {
    let index: HashMap<&Grid, usize> = items.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut parent: Vec<usize> = (0..items.len()).collect();
    let d = items.first().map_or(0, |g| g.len());
    let perms = permutations(d);
    for (i, g) in items.iter().enumerate() {
        let mut next: Vec<Grid> = perms.iter().map(|p| oracle_op1(g, p)).collect();
        next.extend((0..d).map(|k| oracle_op2(g, k)));
        if with_op3 {
            for k in 0..d {
                for l in 0..d {
                    next.extend(oracle_op3(g, k, l));
                }
            }
        }
        for h in next {
            if let Some(&j) = index.get(&h) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let roots: Vec<usize> = (0..items.len()).map(|i| find(&mut parent, i)).collect();
    renumber(&roots)
}

/// Relabels class ids by first occurrence so two labelings of the same
/// list can be compared with `==`.
pub fn renumber<K: std::hash::Hash + Eq + Clone>(keys: &[K]) -> Vec<usize> {
    let mut ids: HashMap<K, usize> = HashMap::new();
    keys.iter()
        .map(|k| {
            let n = ids.len();
            *ids.entry(k.clone()).or_insert(n)
        })
        .collect()
}

pub fn double_factorial_odd(d: usize) -> u128 {
    (1..=d as u128).map(|i| 2 * i - 1).product()
}

/// Primitive vectors in `{-r..r}^d`, excluding zero.
pub fn primitive_vectors(d: usize, r: i64) -> Vec<Vec<i64>> {
    let width = (2 * r + 1) as usize;
    let total = width.pow(d as u32);
    let mut out = Vec::new();
    for mut code in 0..total {
        let mut v = vec![0; d];
        for x in v.iter_mut() {
            *x = (code % width) as i64 - r;
            code /= width;
        }
        let g = v.iter().fold(0i64, |g, &x| gcd(g, x.abs()));
        if g == 1 {
            out.push(v);
        }
    }
    out
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `(sum a_i x_i)^2` expanded term by term, then every `x_j^2` rewritten as
/// `sum_i n_ij x_i x_j`. Returns the coefficient of `x_i x_j`, `i < j`, in a
/// `d x d` table.
pub fn oracle_square(g: &Grid, a: &[i64]) -> Grid {
    let d = g.len();
    let mut sq = vec![0i64; d];
    let mut mixed = vec![vec![0i64; d]; d];
    for i in 0..d {
        for j in 0..d {
            if i == j {
                sq[i] += a[i] * a[i];
            } else {
                let (s, t) = (i.min(j), i.max(j));
                mixed[s][t] += a[i] * a[j];
            }
        }
    }
    for j in 0..d {
        for i in 0..j {
            mixed[i][j] += sq[j] * g[i][j];
        }
    }
    mixed
}

pub mod known {
    use super::fb;
    use fanobott_core::{FanoBottMatrix, PhiSigma, Sign, SignedRootedForest};
    use Sign::{Minus, Plus};

    /// Relations `v_i^+ + v_i^- = v_j^s` given as 1-based `(j, s)`, `None`
    /// for a zero right-hand side.
    pub fn relations(rel: &[Option<(usize, Sign)>]) -> PhiSigma {
        let d = rel.len();
        PhiSigma::new(
            rel.iter().map(|r| r.map_or(d, |(j, _)| j - 1)).collect(),
            rel.iter().map(|r| r.map(|(_, s)| s)).collect(),
        )
        .unwrap()
    }

    pub fn relations_first() -> PhiSigma {
        relations(&[
            Some((2, Plus)),
            Some((5, Minus)),
            Some((4, Minus)),
            Some((5, Plus)),
            None,
        ])
    }

    pub fn relations_second() -> PhiSigma {
        relations(&[
            Some((3, Plus)),
            Some((3, Minus)),
            None,
            Some((5, Plus)),
            None,
        ])
    }

    /// 1-based `(child, parent, sign)` edges.
    pub fn forest(d: usize, edges: &[(usize, usize, Sign)]) -> SignedRootedForest {
        let mut e = vec![None; d];
        for &(c, p, s) in edges {
            e[c - 1] = Some((p - 1, s));
        }
        SignedRootedForest::new(e).unwrap()
    }

    pub fn forest_first() -> SignedRootedForest {
        forest(5, &[(1, 2, Plus), (2, 5, Minus), (3, 4, Minus), (4, 5, Plus)])
    }

    pub fn forest_second() -> SignedRootedForest {
        forest(5, &[(1, 3, Plus), (2, 3, Minus), (4, 5, Plus)])
    }

    pub fn three_trees() -> [SignedRootedForest; 3] {
        let t = |s2, s4| forest(5, &[(1, 5, Plus), (2, 5, s2), (3, 4, Plus), (4, 5, s4)]);
        [t(Minus, Minus), t(Minus, Plus), t(Plus, Minus)]
    }

    pub fn op_example() -> FanoBottMatrix {
        fb(&[
            &[0, 0, 1, 0, 0, 0],
            &[0, 0, -1, 0, 0, -1],
            &[0, 0, 0, 0, 0, -1],
            &[0, 0, 0, 0, -1, 1],
            &[0, 0, 0, 0, 0, 1],
            &[0, 0, 0, 0, 0, 0],
        ])
    }

    pub fn op2_at_3() -> FanoBottMatrix {
        fb(&[
            &[0, 0, -1, 0, 0, -1],
            &[0, 0, 1, 0, 0, 0],
            &[0, 0, 0, 0, 0, -1],
            &[0, 0, 0, 0, -1, 1],
            &[0, 0, 0, 0, 0, 1],
            &[0, 0, 0, 0, 0, 0],
        ])
    }

    pub fn op2_at_5() -> FanoBottMatrix {
        fb(&[
            &[0, 0, 1, 0, 0, 0],
            &[0, 0, -1, 0, 0, -1],
            &[0, 0, 0, 0, 0, -1],
            &[0, 0, 0, 0, 1, 0],
            &[0, 0, 0, 0, 0, 1],
            &[0, 0, 0, 0, 0, 0],
        ])
    }

    pub fn op3_at_3_6() -> FanoBottMatrix {
        fb(&[
            &[0, 0, 1, 0, 0, 0],
            &[0, 0, -1, 0, 0, 1],
            &[0, 0, 0, 0, 0, 1],
            &[0, 0, 0, 0, -1, 1],
            &[0, 0, 0, 0, 0, 1],
            &[0, 0, 0, 0, 0, 0],
        ])
    }

    pub fn op3_at_5_6() -> FanoBottMatrix {
        fb(&[
            &[0, 0, 1, 0, 0, 0],
            &[0, 0, -1, 0, 0, -1],
            &[0, 0, 0, 0, 0, -1],
            &[0, 0, 0, 0, -1, -1],
            &[0, 0, 0, 0, 0, -1],
            &[0, 0, 0, 0, 0, 0],
        ])
    }

    /// Ray matrices of the seven-stage example: top half `E`, bottom half
    /// as printed.
    pub fn m_bottom() -> Vec<Vec<i64>> {
        vec![
            vec![-1, 0, 1, 0, 0, 0, 0],
            vec![0, -1, -1, 0, 0, 0, 1],
            vec![0, 0, -1, 0, 0, 0, 1],
            vec![0, 0, 0, -1, 0, 1, 0],
            vec![0, 0, 0, 0, -1, 1, 0],
            vec![0, 0, 0, 0, 0, -1, 1],
            vec![0, 0, 0, 0, 0, 0, -1],
        ]
    }

    pub fn m_double_prime_bottom() -> Vec<Vec<i64>> {
        vec![
            vec![-1, 0, -1, 0, 0, 0, 1],
            vec![0, -1, 1, 0, 0, 0, 0],
            vec![0, 0, -1, 0, 0, 0, 1],
            vec![0, 0, 0, -1, 0, -1, 1],
            vec![0, 0, 0, 0, -1, -1, 1],
            vec![0, 0, 0, 0, 0, -1, 1],
            vec![0, 0, 0, 0, 0, 0, -1],
        ]
    }

    pub fn m_prime_bottom() -> Vec<Vec<i64>> {
        vec![
            vec![-1, 0, -1, 0, 0, 0, 1],
            vec![0, -1, 1, 0, 0, 0, 0],
            vec![0, 0, -1, 0, 0, 0, 1],
            vec![0, 0, 0, -1, 0, -1, -1],
            vec![0, 0, 0, 0, -1, -1, -1],
            vec![0, 0, 0, 0, 0, -1, -1],
            vec![0, 0, 0, 0, 0, 0, -1],
        ]
    }

    /// Strips the `-E` diagonal off a printed bottom half.
    pub fn matrix_of_bottom(bottom: &[Vec<i64>]) -> FanoBottMatrix {
        let rows: Vec<Vec<i64>> = bottom
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut r = r.clone();
                r[i] += 1;
                r
            })
            .collect();
        FanoBottMatrix::from_rows(&rows).unwrap()
    }

    pub fn stack(bottom: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let d = bottom.len();
        let mut out: Vec<Vec<i64>> = (0..d)
            .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
            .collect();
        out.extend(bottom.iter().cloned());
        out
    }
}
