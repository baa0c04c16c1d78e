use crate::level::Level;
use serde::Serialize;

/// Right-continuous step function on `[0, 1]`.
///
/// `values[i]` holds on `[starts[i], starts[i + 1])`; the last interval ends at 1
/// and is closed there.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepFunction {
    starts: Vec<Level>,
    values: Vec<f64>,
}

impl StepFunction {
    /// Builds a step function, dropping empty intervals and merging equal neighbours.
    ///
    /// Panics when `starts` is empty, does not begin at 0, or is decreasing.
    pub fn new(starts: Vec<Level>, values: Vec<f64>) -> StepFunction {
        assert_eq!(starts.len(), values.len(), "starts/values length mismatch");
        assert!(!starts.is_empty(), "step function needs at least one interval");
        assert_eq!(starts[0].value(), 0.0, "first interval must start at 0");
        let mut s: Vec<Level> = Vec::with_capacity(starts.len());
        let mut v: Vec<f64> = Vec::with_capacity(values.len());
        for (i, (&start, &value)) in starts.iter().zip(&values).enumerate() {
            let end = starts.get(i + 1).copied().unwrap_or(Level::ONE);
            assert!(end >= start, "interval starts must be nondecreasing");
            if end == start && !(i == 0 && starts.len() == 1) {
                continue;
            }
            if let Some(&last) = v.last() {
                if last == value {
                    continue;
                }
            }
            s.push(start);
            v.push(value);
        }
        if s.is_empty() {
            // every interval was empty; only possible for degenerate input
            s.push(Level::ZERO);
            v.push(values[0]);
        }
        if s[0].value() != 0.0 {
            s[0] = Level::ZERO;
        }
        StepFunction { starts: s, values: v }
    }

    pub fn constant(value: f64) -> StepFunction {
        StepFunction {
            starts: vec![Level::ZERO],
            values: vec![value],
        }
    }

    pub fn starts(&self) -> &[Level] {
        &self.starts
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// End of interval `i`.
    pub fn end(&self, i: usize) -> Level {
        self.starts.get(i + 1).copied().unwrap_or(Level::ONE)
    }

    pub fn width(&self, i: usize) -> f64 {
        self.starts[i].width_to(self.end(i))
    }

    /// `(start, end, value)` for every interval.
    pub fn intervals(&self) -> impl Iterator<Item = (Level, Level, f64)> + '_ {
        (0..self.len()).map(move |i| (self.starts[i], self.end(i), self.values[i]))
    }

    /// Value at `p` (right-continuous, last interval closed at 1).
    pub fn eval(&self, p: f64) -> f64 {
        let idx = self.starts.partition_point(|s| s.value() <= p);
        self.values[idx.saturating_sub(1)]
    }

    pub fn integral(&self) -> f64 {
        (0..self.len()).map(|i| self.values[i] * self.width(i)).sum()
    }

    /// `∫ (f - c)^2`.
    pub fn squared_deviation(&self, c: f64) -> f64 {
        (0..self.len())
            .map(|i| {
                let d = self.values[i] - c;
                d * d * self.width(i)
            })
            .sum()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> StepFunction {
        StepFunction::new(self.starts.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    /// `u ↦ f(1 - u)`, renormalised to the right-continuous convention.
    pub fn reflect(&self) -> StepFunction {
        let n = self.len();
        let mut starts = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        for i in (0..n).rev() {
            starts.push(self.end(i).flip());
            values.push(self.values[i]);
        }
        StepFunction::new(starts, values)
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sf(starts: &[f64], values: &[f64]) -> StepFunction {
        StepFunction::new(starts.iter().map(|&s| Level::new(s)).collect(), values.to_vec())
    }

    #[test]
    fn eval_is_right_continuous() {
        let f = sf(&[0.0, 0.5], &[0.5, 1.5]);
        assert_eq!(f.eval(0.0), 0.5);
        assert_eq!(f.eval(0.4999), 0.5);
        assert_eq!(f.eval(0.5), 1.5);
        assert_eq!(f.eval(1.0), 1.5);
        assert_eq!(f.integral(), 1.0);
    }

    #[test]
    fn merges_equal_neighbours_and_empty_intervals() {
        let f = sf(&[0.0, 0.2, 0.2, 0.6], &[1.0, 7.0, 1.0, 1.0]);
        assert_eq!(f.len(), 1);
        assert_eq!(f.values(), &[1.0]);
    }

    #[test]
    fn reflect_twice_is_identity() {
        let f = sf(&[0.0, 0.1, 0.95], &[0.0, 17.5, 30.0]);
        let r = f.reflect();
        assert_eq!(r.values(), &[30.0, 17.5, 0.0]);
        assert!((r.starts()[1].value() - 0.05).abs() < 1e-15);
        assert_eq!(r.reflect(), f);
    }

    #[test]
    fn squared_deviation_of_constant() {
        let f = StepFunction::constant(1.0);
        assert_eq!(f.squared_deviation(1.0), 0.0);
        assert_eq!(f.squared_deviation(0.0), 1.0);
    }
}
