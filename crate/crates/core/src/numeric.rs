//! Compensated accumulation.
//!
//! Neumaier's variant of Kahan summation: the running compensation also
//! captures the low-order bits lost when the incoming term is larger than
//! the partial sum, so mixed-sign streams (noise residuals) stay accurate.

#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of a slice.
pub fn sum(values: &[f64]) -> f64 {
    values.iter().copied().collect::<NeumaierSum>().value()
}

/// Plain sum and sum of squares of a slice, both compensated, in one pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub sum: f64,
    pub sum_sq: f64,
}

pub fn sum_and_sum_sq(values: &[f64]) -> Moments {
    sum_and_sum_sq_iter(values.iter().copied())
}

pub fn sum_and_sum_sq_iter(values: impl IntoIterator<Item = f64>) -> Moments {
    let mut s = NeumaierSum::new();
    let mut sq = NeumaierSum::new();
    for v in values {
        s.add(v);
        sq.add(v * v);
    }
    Moments {
        sum: s.value(),
        sum_sq: sq.value(),
    }
}
