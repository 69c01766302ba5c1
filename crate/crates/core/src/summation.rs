//! Compensated floating-point summation.
//!
//! All lattice sums in the crate are reduced in a fixed order with Neumaier's variant of
//! Kahan summation, so that results do not depend on the number of worker threads.

/// Running compensated sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Extend<f64> for Neumaier {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

/// Compensated sum of a sequence, in iteration order.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = Neumaier::new();
    acc.extend(iter);
    acc.value()
}
