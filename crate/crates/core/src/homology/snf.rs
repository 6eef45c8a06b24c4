//! Integer Smith normal form.
//!
//! Unit pivots are eliminated on a sparse column representation first; what is
//! left (no entries of absolute value one) is diagonalized densely. All
//! arithmetic is checked and reports overflow instead of wrapping.

use crate::error::{Error, Result};

fn checked_axpy(a: i64, x: i64, y: i64) -> Result<i64> {
    // y - a * x
    a.checked_mul(x)
        .and_then(|ax| y.checked_sub(ax))
        .ok_or(Error::Overflow("smith normal form"))
}

/// Nonzero diagonal entries of the Smith normal form, in divisibility order.
///
/// `columns[c]` lists `(row, value)` pairs; repeated rows are summed.
pub fn invariant_factors(rows: usize, columns: &[Vec<(u32, i64)>]) -> Result<Vec<i64>> {
    let mut cols: Vec<Vec<(u32, i64)>> = columns.iter().map(|c| normalize(c.clone())).collect::<Result<_>>()?;
    let mut row_cols: Vec<Vec<u32>> = vec![Vec::new(); rows];
    for (c, col) in cols.iter().enumerate() {
        for &(r, _) in col {
            row_cols[r as usize].push(c as u32);
        }
    }
    let mut row_alive = vec![true; rows];
    let mut col_alive = vec![true; cols.len()];
    let mut units = 0usize;

    loop {
        let mut progressed = false;
        for c in 0..cols.len() {
            if !col_alive[c] {
                continue;
            }
            let pivot = cols[c]
                .iter()
                .filter(|&&(r, v)| v.abs() == 1 && row_alive[r as usize])
                .min_by_key(|&&(r, _)| row_cols[r as usize].len())
                .copied();
            let Some((r, v)) = pivot else { continue };
            let pivot_col = std::mem::take(&mut cols[c]);
            let others = std::mem::take(&mut row_cols[r as usize]);
            for &c2 in &others {
                let c2 = c2 as usize;
                if c2 == c || !col_alive[c2] {
                    continue;
                }
                let Some(a) = cols[c2].iter().find(|&&(rr, _)| rr == r).map(|&(_, a)| a) else {
                    continue;
                };
                // c2 -= (a / v) * c, with v = +-1
                let factor = a * v;
                let before: Vec<u32> = cols[c2].iter().map(|&(rr, _)| rr).collect();
                cols[c2] = combine(&cols[c2], &pivot_col, factor)?;
                for &(rr, _) in &cols[c2] {
                    if before.binary_search(&rr).is_err() {
                        row_cols[rr as usize].push(c2 as u32);
                    }
                }
            }
            row_alive[r as usize] = false;
            col_alive[c] = false;
            units += 1;
            progressed = true;
        }
        if !progressed {
            break;
        }
    }

    // Dense remainder.
    let live_rows: Vec<usize> = (0..rows).filter(|&r| row_alive[r]).collect();
    let mut row_pos = vec![usize::MAX; rows];
    for (k, &r) in live_rows.iter().enumerate() {
        row_pos[r] = k;
    }
    let mut dense: Vec<Vec<i64>> = Vec::new();
    for c in 0..cols.len() {
        if !col_alive[c] {
            continue;
        }
        let mut col = vec![0i64; live_rows.len()];
        let mut any = false;
        for &(r, v) in &cols[c] {
            if row_alive[r as usize] && v != 0 {
                col[row_pos[r as usize]] = v;
                any = true;
            }
        }
        if any {
            dense.push(col);
        }
    }
    let mut factors = vec![1i64; units];
    factors.extend(diagonalize(dense, live_rows.len())?);
    normalize_diagonal(&mut factors)?;
    Ok(factors)
}

fn normalize(mut col: Vec<(u32, i64)>) -> Result<Vec<(u32, i64)>> {
    col.sort_unstable_by_key(|&(r, _)| r);
    let mut out: Vec<(u32, i64)> = Vec::with_capacity(col.len());
    for (r, v) in col {
        match out.last_mut() {
            Some(last) if last.0 == r => {
                last.1 = last.1.checked_add(v).ok_or(Error::Overflow("smith normal form"))?;
            }
            _ => out.push((r, v)),
        }
    }
    out.retain(|&(_, v)| v != 0);
    Ok(out)
}

/// `a - factor * b` on sorted sparse columns.
fn combine(a: &[(u32, i64)], b: &[(u32, i64)], factor: i64) -> Result<Vec<(u32, i64)>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_b {
            out.push((b[j].0, checked_axpy(factor, b[j].1, 0)?));
            j += 1;
        } else {
            let v = checked_axpy(factor, b[j].1, a[i].1)?;
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Ok(out)
}

/// Diagonalizes a dense column-major matrix; returns the nonzero diagonal (absolute values).
fn diagonalize(mut m: Vec<Vec<i64>>, rows: usize) -> Result<Vec<i64>> {
    let cols = m.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize, i64)> = None;
        for (c, col) in m.iter().enumerate().skip(t) {
            for (r, &v) in col.iter().enumerate().skip(t) {
                if v != 0 && best.is_none_or(|(_, _, b)| v.abs() < b) {
                    best = Some((r, c, v.abs()));
                }
            }
        }
        let Some((r, c, _)) = best else { break };
        m.swap(t, c);
        for col in m.iter_mut() {
            col.swap(t, r);
        }
        loop {
            let mut dirty = false;
            // clear column t below the pivot with row operations
            for r in t + 1..rows {
                let v = m[t][r];
                if v == 0 {
                    continue;
                }
                let q = v.div_euclid(m[t][t]);
                for col in m.iter_mut().skip(t) {
                    col[r] = checked_axpy(q, col[t], col[r])?;
                }
                if m[t][r] != 0 {
                    dirty = true;
                }
            }
            // clear row t right of the pivot with column operations
            for c in t + 1..cols {
                let v = m[c][t];
                if v == 0 {
                    continue;
                }
                let q = v.div_euclid(m[t][t]);
                let (left, right) = m.split_at_mut(c);
                let pivot_col = &left[t];
                for (x, &y) in right[0].iter_mut().zip(pivot_col).skip(t) {
                    *x = checked_axpy(q, y, *x)?;
                }
                if m[c][t] != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
            // move the smallest remainder in row/column t onto the diagonal
            let mut best = (t, t, m[t][t].abs());
            for (r, x) in m[t].iter().enumerate().skip(t + 1) {
                let v = x.abs();
                if v != 0 && v < best.2 {
                    best = (r, t, v);
                }
            }
            for (c, col) in m.iter().enumerate().take(cols).skip(t + 1) {
                let v = col[t].abs();
                if v != 0 && v < best.2 {
                    best = (t, c, v);
                }
            }
            let (r, c, _) = best;
            if c != t {
                m.swap(t, c);
            }
            if r != t {
                for col in m.iter_mut() {
                    col.swap(t, r);
                }
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    Ok(diag)
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Turns any nonzero diagonal into invariant factors via `(a, b) -> (gcd, lcm)`.
fn normalize_diagonal(d: &mut [i64]) -> Result<()> {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = gcd(d[i], d[j]);
            let l = (d[i] / g)
                .checked_mul(d[j])
                .ok_or(Error::Overflow("smith normal form"))?;
            d[i] = g;
            d[j] = l.abs();
        }
    }
    Ok(())
}
