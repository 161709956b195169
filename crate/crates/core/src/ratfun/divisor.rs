use std::collections::BTreeMap;
use std::ops::{Add, Neg};

use crate::curve::{Point, TropicalCurve};

/// A finite formal sum of points with nonzero integer orders (positive = zero,
/// negative = pole).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Divisor {
    orders: BTreeMap<Point, i64>,
}

impl Divisor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_at(&mut self, p: Point, order: i64) {
        let total = self.order(&p) + order;
        if total == 0 {
            self.orders.remove(&p);
        } else {
            self.orders.insert(p, total);
        }
    }

    pub fn order(&self, p: &Point) -> i64 {
        self.orders.get(p).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> i64 {
        self.orders.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, i64)> {
        self.orders.iter().map(|(p, o)| (p, *o))
    }

    pub fn zeros(&self) -> impl Iterator<Item = (&Point, i64)> {
        self.iter().filter(|(_, o)| *o > 0)
    }

    pub fn poles(&self) -> impl Iterator<Item = (&Point, i64)> {
        self.iter().filter(|(_, o)| *o < 0)
    }

    /// Moves every support point along `map`.
    pub fn push_forward(&self, map: impl Fn(&Point) -> Point) -> Divisor {
        let mut out = Divisor::new();
        for (p, o) in self.iter() {
            out.add_at(map(p), o);
        }
        out
    }

    /// `[(point, order)]` with points rendered on `curve`.
    pub fn describe(&self, curve: &TropicalCurve) -> Vec<(String, i64)> {
        self.iter().map(|(p, o)| (curve.fmt_point(p), o)).collect()
    }
}

impl Add for &Divisor {
    type Output = Divisor;
    fn add(self, rhs: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (p, o) in rhs.iter() {
            out.add_at(p.clone(), o);
        }
        out
    }
}

impl Neg for &Divisor {
    type Output = Divisor;
    fn neg(self) -> Divisor {
        Divisor { orders: self.orders.iter().map(|(p, o)| (p.clone(), -o)).collect() }
    }
}
