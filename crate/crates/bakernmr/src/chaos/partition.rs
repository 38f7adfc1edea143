//! Set partitions as restricted growth strings.
//!
//! a[0] = 0 and a[i] <= 1 + max(a[..i]); group labels are the values.

/// Iterates over every partition of {0, .., n-1}, each exactly once.
#[derive(Debug, Clone)]
pub struct SetPartitions {
    a: Vec<usize>,
    // m[i] = max(a[..i]); a[i] may go up to m[i] + 1
    m: Vec<usize>,
    done: bool,
}

impl SetPartitions {
    pub fn new(n: usize) -> Self {
        Self { a: vec![0; n], m: vec![0; n], done: n == 0 }
    }
}

impl Iterator for SetPartitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.a.clone();
        let n = self.a.len();
        // find the rightmost position that can still grow
        let mut i = n;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.a[i] <= self.m[i] {
                self.a[i] += 1;
                let top = self.m[i].max(self.a[i]);
                for k in i + 1..n {
                    self.a[k] = 0;
                    self.m[k] = top;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Number of partitions of an n-element set.
pub fn bell_number(n: usize) -> u64 {
    // Bell triangle
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        row = next;
    }
    row[0]
}

/// Group count of a restricted growth string.
pub fn block_count(a: &[usize]) -> usize {
    a.iter().max().map_or(0, |m| m + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn counts_match_bell_numbers() {
        let bell = [1u64, 1, 2, 5, 15, 52, 203, 877, 4140, 21147];
        for (n, &b) in bell.iter().enumerate() {
            assert_eq!(bell_number(n), b);
            if n > 0 {
                assert_eq!(SetPartitions::new(n).count() as u64, b, "n = {n}");
            }
        }
    }

    #[test]
    fn strings_are_distinct_and_valid() {
        let all: Vec<_> = SetPartitions::new(6).collect();
        let set: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        for a in &all {
            assert_eq!(a[0], 0);
            let mut top = 0;
            for &v in &a[1..] {
                assert!(v <= top + 1);
                top = top.max(v);
            }
        }
    }
}
