//! Scoped single-letter variable allocation.
//!
//! Quantified variables are single letters drawn from a..z excluding x, y,
//! and n (the plane variables and the free machine-index variable). Scopes
//! nest; a letter in scope on the current path cannot be reallocated until
//! released. Running out of letters is a hard failure, never silent reuse.

/// Letters available for quantified variables, in allocation preference
/// order.
const POOL: [char; 23] = [
    'i', 'j', 'k', 'l', 'm', 'o', 'p', 'q', 'r', 's', 't', 'u', 'v', 'w', 'z', 'f', 'g', 'h',
    'a', 'b', 'c', 'd', 'e',
];

#[derive(Debug, Default)]
pub struct VarPool {
    in_scope: Vec<char>,
}

impl VarPool {
    pub fn new() -> VarPool {
        VarPool::default()
    }

    /// Start a pool with the given letters already bound (free variables of
    /// the predicate under construction).
    pub fn reserving(taken: &[char]) -> VarPool {
        VarPool {
            in_scope: taken.to_vec(),
        }
    }

    pub fn alloc(&mut self) -> char {
        for &c in POOL.iter() {
            if !self.in_scope.contains(&c) {
                self.in_scope.push(c);
                return c;
            }
        }
        panic!(
            "variable pool exhausted: all {} single letters are bound on this path",
            POOL.len()
        );
    }

    pub fn release(&mut self, c: char) {
        match self.in_scope.iter().rposition(|&x| x == c) {
            Some(i) => {
                self.in_scope.remove(i);
            }
            None => panic!("release of {c:?} which is not in scope"),
        }
    }

    pub fn depth(&self) -> usize {
        self.in_scope.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn allocates_distinct_and_releases() {
        let mut pool = VarPool::reserving(&['a', 'b']);
        let v1 = pool.alloc();
        let v2 = pool.alloc();
        assert_ne!(v1, v2);
        assert!(v1 != 'a' && v1 != 'b');
        pool.release(v2);
        let v3 = pool.alloc();
        assert_eq!(v3, v2);
    }

    #[test]
    #[should_panic(expected = "variable pool exhausted")]
    fn exhaustion_fails_loudly() {
        let mut pool = VarPool::new();
        for _ in 0..24 {
            pool.alloc();
        }
    }

    #[test]
    fn never_allocates_x_y_n() {
        let mut pool = VarPool::new();
        for _ in 0..23 {
            let c = pool.alloc();
            assert!(c != 'x' && c != 'y' && c != 'n');
        }
    }
}
