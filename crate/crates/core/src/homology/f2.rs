//! Rank over F2.

/// Dense column-major bit matrix over F2.
#[derive(Clone, Debug)]
pub struct BitMatrix {
    rows: usize,
    words: usize,
    cols: Vec<Vec<u64>>,
}

impl BitMatrix {
    pub fn new(rows: usize) -> Self {
        BitMatrix {
            rows,
            words: rows.div_ceil(64),
            cols: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn push_column(&mut self, entries: &[u32]) {
        let mut col = vec![0u64; self.words];
        for &r in entries {
            debug_assert!((r as usize) < self.rows);
            col[r as usize / 64] ^= 1 << (r % 64);
        }
        self.cols.push(col);
    }

    /// Gaussian elimination with a pivot-row table; consumes the matrix.
    pub fn rank(self) -> usize {
        let words = self.words;
        // basis[r] = reduced column whose lowest set row is r
        let mut basis: Vec<Option<Vec<u64>>> = vec![None; self.rows];
        let mut rank = 0;
        for mut col in self.cols {
            let mut w = 0;
            loop {
                while w < words && col[w] == 0 {
                    w += 1;
                }
                if w == words {
                    break;
                }
                let r = w * 64 + col[w].trailing_zeros() as usize;
                match &basis[r] {
                    Some(b) => {
                        for (x, y) in col[w..].iter_mut().zip(&b[w..]) {
                            *x ^= *y;
                        }
                    }
                    None => {
                        basis[r] = Some(col);
                        rank += 1;
                        break;
                    }
                }
            }
        }
        rank
    }
}

/// Rank of a sparse F2 matrix given as columns of row indices (duplicates cancel).
pub fn sparse_rank(rows: usize, columns: impl IntoIterator<Item = Vec<u32>>) -> usize {
    let mut pivot_of: Vec<u32> = vec![u32::MAX; rows];
    let mut store: Vec<Vec<u32>> = Vec::new();
    let mut scratch = Vec::new();
    for mut col in columns {
        col.sort_unstable();
        dedup_pairs(&mut col);
        while let Some(&low) = col.last() {
            let slot = pivot_of[low as usize];
            if slot == u32::MAX {
                pivot_of[low as usize] = store.len() as u32;
                store.push(std::mem::take(&mut col));
                break;
            }
            symmetric_difference(&col, &store[slot as usize], &mut scratch);
            std::mem::swap(&mut col, &mut scratch);
        }
    }
    store.len()
}

fn dedup_pairs(v: &mut Vec<u32>) {
    let mut out = 0;
    let mut k = 0;
    while k < v.len() {
        if k + 1 < v.len() && v[k] == v[k + 1] {
            k += 2;
        } else {
            v[out] = v[k];
            out += 1;
            k += 1;
        }
    }
    v.truncate(out);
}

fn symmetric_difference(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Rank of a sparse F2 matrix after removing all fill-free pivots.
///
/// A row or column with a single live entry is a pivot that creates no fill:
/// it raises the rank by one and both its row and column drop out. Such pivots
/// are taken greedily until none remain; the leftover block goes to
/// [`sparse_rank`] with columns ordered by their largest row.
pub fn peeled_rank(rows: usize, columns: &[Vec<u32>]) -> usize {
    let ncols = columns.len();
    let mut row_cols: Vec<Vec<u32>> = vec![Vec::new(); rows];
    let mut col_live: Vec<u32> = Vec::with_capacity(ncols);
    let mut cols: Vec<Vec<u32>> = Vec::with_capacity(ncols);
    for (c, col) in columns.iter().enumerate() {
        let mut col = col.clone();
        col.sort_unstable();
        dedup_pairs(&mut col);
        for &r in &col {
            row_cols[r as usize].push(c as u32);
        }
        col_live.push(col.len() as u32);
        cols.push(col);
    }
    let mut row_live: Vec<u32> = row_cols.iter().map(|v| v.len() as u32).collect();
    let mut row_alive = vec![true; rows];
    let mut col_alive = vec![true; ncols];
    let mut queue: Vec<(bool, u32)> = Vec::new();
    queue.extend((0..ncols as u32).filter(|&c| col_live[c as usize] <= 1).map(|c| (false, c)));
    queue.extend((0..rows as u32).filter(|&r| row_live[r as usize] <= 1).map(|r| (true, r)));
    let mut rank = 0;

    fn kill_row(
        r: usize,
        row_alive: &mut [bool],
        row_cols: &[Vec<u32>],
        col_alive: &[bool],
        col_live: &mut [u32],
        queue: &mut Vec<(bool, u32)>,
    ) {
        row_alive[r] = false;
        for &c in &row_cols[r] {
            if col_alive[c as usize] {
                col_live[c as usize] -= 1;
                if col_live[c as usize] <= 1 {
                    queue.push((false, c));
                }
            }
        }
    }

    fn kill_col(
        c: usize,
        col_alive: &mut [bool],
        cols: &[Vec<u32>],
        row_alive: &[bool],
        row_live: &mut [u32],
        queue: &mut Vec<(bool, u32)>,
    ) {
        col_alive[c] = false;
        for &r in &cols[c] {
            if row_alive[r as usize] {
                row_live[r as usize] -= 1;
                if row_live[r as usize] <= 1 {
                    queue.push((true, r));
                }
            }
        }
    }

    while let Some((is_row, k)) = queue.pop() {
        let k = k as usize;
        if is_row {
            if !row_alive[k] || row_live[k] > 1 {
                continue;
            }
            if row_live[k] == 0 {
                row_alive[k] = false;
                continue;
            }
            let c = row_cols[k]
                .iter()
                .map(|&c| c as usize)
                .find(|&c| col_alive[c])
                .expect("one live column");
            rank += 1;
            row_alive[k] = false;
            kill_col(c, &mut col_alive, &cols, &row_alive, &mut row_live, &mut queue);
        } else {
            if !col_alive[k] || col_live[k] > 1 {
                continue;
            }
            if col_live[k] == 0 {
                col_alive[k] = false;
                continue;
            }
            let r = cols[k]
                .iter()
                .map(|&r| r as usize)
                .find(|&r| row_alive[r])
                .expect("one live row");
            rank += 1;
            col_alive[k] = false;
            kill_row(r, &mut row_alive, &row_cols, &col_alive, &mut col_live, &mut queue);
        }
    }

    let mut rest: Vec<Vec<u32>> = (0..ncols)
        .filter(|&c| col_alive[c])
        .map(|c| cols[c].iter().copied().filter(|&r| row_alive[r as usize]).collect())
        .collect();
    rest.sort_by_key(|c: &Vec<u32>| c.last().copied());
    rank + sparse_rank(rows, rest)
}
