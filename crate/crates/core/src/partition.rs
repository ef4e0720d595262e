//! Integer partitions, used to index PBW monomials `L_{-λ₁}⋯L_{-λ_k}|h⟩`.

/// A partition with parts in non-increasing order.
pub type Partition = Vec<u32>;

/// All partitions of `n`, parts non-increasing, in reverse lexicographic order
/// (so `[n]` comes first and `[1, 1, …, 1]` last).
pub fn partitions(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fill(n, n, &mut current, &mut out);
    out
}

fn fill(remaining: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(current.clone());
        return;
    }
    for part in (1..=remaining.min(max_part)).rev() {
        current.push(part);
        fill(remaining - part, part, current, out);
        current.pop();
    }
}

/// Number of partitions of `n`.
pub fn partition_count(n: u32) -> usize {
    // Euler's recurrence is overkill at the sizes used here.
    let n = n as usize;
    let mut p = vec![0usize; n + 1];
    p[0] = 1;
    for part in 1..=n {
        for total in part..=n {
            p[total] += p[total - part];
        }
    }
    p[n]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_partitions() {
        assert_eq!(partitions(0), vec![Vec::<u32>::new()]);
        assert_eq!(partitions(3), vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
        assert_eq!(partitions(4).len(), 5);
    }

    #[test]
    fn counts_match_enumeration() {
        for n in 0..15 {
            assert_eq!(partitions(n).len(), partition_count(n));
        }
        assert_eq!(partition_count(14), 135);
    }
}
