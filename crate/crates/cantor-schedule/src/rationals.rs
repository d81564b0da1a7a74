//! Enumeration of `ℚ ∩ [0, 1]`: `0`, `1`, then the Stern–Brocot tree breadth first.

use std::collections::VecDeque;

use rug::{Integer, Rational};

/// Yields `0, 1, 1/2, 1/3, 2/3, 1/4, 2/5, 3/5, 3/4, …`; every rational of `[0, 1]` appears once.
#[derive(Clone, Debug)]
pub struct RationalEnumeration {
    head: u8,
    // pairs of neighbours (a/b, c/d) whose mediant is the next tree node
    queue: VecDeque<(Integer, Integer, Integer, Integer)>,
}

impl Default for RationalEnumeration {
    fn default() -> Self {
        let mut queue = VecDeque::new();
        queue.push_back((Integer::from(0), Integer::from(1), Integer::from(1), Integer::from(1)));
        RationalEnumeration { head: 0, queue }
    }
}

impl RationalEnumeration {
    pub fn new() -> Self {
        Self::default()
    }

    /// `r_k` for `k ≥ 1`.
    pub fn nth_rational(k: usize) -> Rational {
        assert!(k >= 1, "rationals are numbered from 1");
        RationalEnumeration::new().nth(k - 1).expect("enumeration is infinite")
    }
}

impl Iterator for RationalEnumeration {
    type Item = Rational;

    fn next(&mut self) -> Option<Rational> {
        if self.head < 2 {
            self.head += 1;
            return Some(Rational::from(self.head as i32 - 1));
        }
        let (a, b, c, d) = self.queue.pop_front()?;
        let num = Integer::from(&a + &c);
        let den = Integer::from(&b + &d);
        self.queue.push_back((a, b, num.clone(), den.clone()));
        self.queue.push_back((num.clone(), den.clone(), c, d));
        Some(Rational::from((num, den)))
    }
}

/// `a/b` in lowest terms.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let (a, b) = s.split_once('/')?;
    let a: Integer = a.trim().parse().ok()?;
    let b: Integer = b.trim().parse().ok()?;
    if b == 0 {
        return None;
    }
    Some(Rational::from((a, b)))
}
