//! Small dense and graph kernels shared by the solvers.

/// Strongly connected components of a directed graph in CSR form.
///
/// Returns the component id of every node. Ids are assigned in the order
/// Tarjan's algorithm closes components, so sink components come first.
pub fn strongly_connected(n: usize, start: &[usize], targets: &[usize]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, start[root]));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if *edge < start[v + 1] {
                let w = targets[*edge];
                *edge += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, start[w]));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// Stationary distribution of an irreducible CTMC given as a dense generator
/// (row-major, off-diagonal rates only; the diagonal is ignored).
///
/// Uses the GTH elimination, which involves no subtractions and keeps high
/// relative accuracy for tiny probabilities.
pub fn stationary_gth(n: usize, rates: &mut [f64]) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let at = |i: usize, j: usize| i * n + j;
    for k in (1..n).rev() {
        let s: f64 = (0..k).map(|j| rates[at(k, j)]).sum();
        if s <= 0.0 {
            // State k cannot reach lower states: not irreducible. Leave it isolated.
            continue;
        }
        for i in 0..k {
            rates[at(i, k)] /= s;
        }
        for i in 0..k {
            let rik = rates[at(i, k)];
            if rik == 0.0 {
                continue;
            }
            for j in 0..k {
                if i != j {
                    rates[at(i, j)] += rik * rates[at(k, j)];
                }
            }
        }
    }
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    for k in 1..n {
        pi[k] = (0..k).map(|i| pi[i] * rates[at(i, k)]).sum();
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= total);
    pi
}

/// Solves `a x = b` in place by Gaussian elimination with partial pivoting.
/// `a` is row-major `n x n`; `b` holds `m` right-hand sides column-interleaved
/// as an `n x m` row-major block. Returns `None` on a zero pivot.
pub fn solve_dense(n: usize, a: &mut [f64], b: &mut [f64], m: usize) -> Option<()> {
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i * n + col]
                .abs()
                .total_cmp(&a[j * n + col].abs())
        })?;
        if a[pivot * n + col].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                a.swap(pivot * n + j, col * n + j);
            }
            for j in 0..m {
                b.swap(pivot * m + j, col * m + j);
            }
        }
        let d = a[col * n + col];
        for i in col + 1..n {
            let f = a[i * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[i * n + j] -= f * a[col * n + j];
            }
            for j in 0..m {
                b[i * m + j] -= f * b[col * m + j];
            }
        }
    }
    for col in (0..n).rev() {
        let d = a[col * n + col];
        for j in 0..m {
            let mut v = b[col * m + j];
            for k in col + 1..n {
                v -= a[col * n + k] * b[k * m + j];
            }
            b[col * m + j] = v / d;
        }
    }
    Some(())
}
