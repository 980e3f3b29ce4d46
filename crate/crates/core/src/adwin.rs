//! Adaptive windowing (ADWIN) change detection.
//!
//! The detector keeps a window of the most recent observations. After every
//! new value it checks each way of cutting the window into an older prefix
//! `W1` and a newer suffix `W2`; whenever the two means differ by at least
//! the Hoeffding threshold [`epsilon_cut`], the prefix is dropped. Every
//! split is tested exactly using prefix sums, so one scan costs `O(|W|)`.

use crate::error::{Error, Result};

/// The additive Hoeffding cut threshold for a split of sizes `n1` and `n2`:
/// `sqrt(ln(1/delta) / (2 n1)) + sqrt(ln(1/delta) / (2 n2))`.
pub fn epsilon_cut(n1: usize, n2: usize, delta: f64) -> Result<f64> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::Domain(format!(
            "split sizes must be positive, got ({n1}, {n2})"
        )));
    }
    let log_inv_delta = log_inv_delta(delta)?;
    Ok(cut_term(log_inv_delta, n1) + cut_term(log_inv_delta, n2))
}

fn log_inv_delta(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!(
            "confidence delta must lie in (0, 1), got {delta}"
        )));
    }
    // -ln(delta) stays finite for tiny delta where 1/delta would overflow
    Ok(-delta.ln())
}

#[inline]
fn cut_term(log_inv_delta: f64, n: usize) -> f64 {
    (log_inv_delta / (2.0 * n as f64)).sqrt()
}

/// Cached per-count threshold terms for a fixed `delta`.
///
/// `term(n1) + term(n2)` is bit-identical to [`epsilon_cut`]`(n1, n2, delta)`.
#[derive(Clone, Debug)]
pub struct CutThreshold {
    delta: f64,
    log_inv_delta: f64,
    terms: Vec<f64>,
}

impl CutThreshold {
    pub fn new(delta: f64) -> Result<Self> {
        let log_inv_delta = log_inv_delta(delta)?;
        Ok(Self {
            delta,
            log_inv_delta,
            terms: vec![f64::INFINITY],
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Makes `term(n)` available for every `n <= max_count`.
    pub fn reserve(&mut self, max_count: usize) {
        let len = self.terms.len();
        if max_count >= len {
            let l = self.log_inv_delta;
            self.terms.extend((len..=max_count).map(|n| cut_term(l, n)));
        }
    }

    #[inline]
    pub fn term(&self, n: usize) -> f64 {
        self.terms[n]
    }

    #[inline]
    pub fn threshold(&self, n1: usize, n2: usize) -> f64 {
        self.terms[n1] + self.terms[n2]
    }

    pub fn capacity(&self) -> usize {
        self.terms.len() - 1
    }
}

/// A qualifying split found by a window scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Split {
    /// Number of elements in the older part `W1`.
    pub prefix_len: usize,
    /// Number of elements in the newer part `W2`.
    pub suffix_len: usize,
    /// `|mean(W1) - mean(W2)|`.
    pub gap: f64,
    /// The cut threshold the gap was compared against.
    pub threshold: f64,
}

/// Scans the splits of a sequence given its prefix sums
/// (`prefix[0] = 0`, `prefix[j]` = sum of the first `j` values) and returns
/// the first split, oldest prefix first, whose mean gap reaches the cut
/// threshold.
///
/// With `stride > 1` only prefix lengths divisible by `stride` are tested,
/// which is an approximation of the exact scan.
///
/// `threshold` must have been reserved for `prefix.len() - 1` elements.
pub fn first_split(prefix: &[f64], threshold: &CutThreshold, stride: usize) -> Option<Split> {
    let n = prefix.len().saturating_sub(1);
    if n < 2 {
        return None;
    }
    debug_assert!(threshold.capacity() >= n);
    let total = prefix[n];
    let stride = stride.max(1);
    let mut m = stride;
    while m < n {
        let head = prefix[m];
        let n2 = n - m;
        let gap = (head / m as f64 - (total - head) / n2 as f64).abs();
        let cut = threshold.threshold(m, n2);
        if gap >= cut {
            return Some(Split {
                prefix_len: m,
                suffix_len: n2,
                gap,
                threshold: cut,
            });
        }
        m += stride;
    }
    None
}

/// A contiguous run of observations with prefix sums.
///
/// The `k`-th stored value (0-based) was observed at round `start_time + k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    start_time: usize,
    values: Vec<f64>,
    prefix: Vec<f64>,
}

impl Window {
    pub fn new(start_time: usize) -> Self {
        Self {
            start_time,
            values: Vec::new(),
            prefix: vec![0.0],
        }
    }

    pub fn from_values(start_time: usize, values: &[f64]) -> Result<Self> {
        let mut window = Self::new(start_time);
        for &x in values {
            window.push(x)?;
        }
        Ok(window)
    }

    pub fn push(&mut self, x: f64) -> Result<()> {
        check_unit(x)?;
        let last = self.prefix[self.values.len()];
        self.values.push(x);
        self.prefix.push(last + x);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Round of the oldest retained observation.
    pub fn start_time(&self) -> usize {
        self.start_time
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn prefix_sums(&self) -> &[f64] {
        &self.prefix
    }

    pub fn sum(&self) -> f64 {
        self.prefix[self.values.len()]
    }

    /// Mean of the elements at positions `from..to`.
    pub fn segment_mean(&self, from: usize, to: usize) -> Option<f64> {
        if from >= to || to > self.values.len() {
            return None;
        }
        Some((self.prefix[to] - self.prefix[from]) / (to - from) as f64)
    }

    /// Drops the oldest `count` observations.
    pub fn drop_front(&mut self, count: usize) {
        let count = count.min(self.values.len());
        self.values.drain(..count);
        self.start_time += count;
        // rebuilt from scratch so rounding error does not accumulate
        self.prefix.clear();
        self.prefix.push(0.0);
        let mut acc = 0.0;
        for &x in &self.values {
            acc += x;
            self.prefix.push(acc);
        }
    }

    pub fn clear(&mut self, start_time: usize) {
        self.values.clear();
        self.prefix.truncate(1);
        self.start_time = start_time;
    }
}

/// Mean of the stored observations; an empty window is a usage error.
pub fn mean_estimate(window: &Window) -> Result<f64> {
    if window.is_empty() {
        return Err(Error::Usage("mean of an empty window".into()));
    }
    Ok(window.sum() / window.len() as f64)
}

pub(crate) fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "observation {x} lies outside [0, 1]"
        )))
    }
}

/// Outcome of feeding one value to [`Adwin::observe`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectionReport {
    pub detected: bool,
    /// Last round of the discarded prefix, i.e. every round up to and
    /// including it was dropped this step.
    pub breakpoint: Option<usize>,
    pub retained_size: usize,
}

/// Standalone ADWIN detector over a univariate stream in `[0, 1]`.
#[derive(Clone, Debug)]
pub struct Adwin {
    window: Window,
    threshold: CutThreshold,
    stride: usize,
    horizon: Option<usize>,
    round: usize,
    last_estimate: Option<f64>,
}

impl Adwin {
    pub fn new(delta: f64) -> Result<Self> {
        Ok(Self {
            window: Window::new(1),
            threshold: CutThreshold::new(delta)?,
            stride: 1,
            horizon: None,
            round: 0,
            last_estimate: None,
        })
    }

    /// Tests only every `stride`-th split point. `1` is the exact detector.
    pub fn with_stride(mut self, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::Domain("check stride must be at least 1".into()));
        }
        self.stride = stride;
        Ok(self)
    }

    /// Rejects observations after round `horizon` and preallocates for it.
    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.threshold.reserve(horizon);
        self.horizon = Some(horizon);
        self
    }

    pub fn delta(&self) -> f64 {
        self.threshold.delta()
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    /// Number of values observed so far.
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn observe(&mut self, x: f64) -> Result<DetectionReport> {
        check_unit(x)?;
        if let Some(horizon) = self.horizon {
            if self.round >= horizon {
                return Err(Error::Usage(format!(
                    "window overflow: more than {horizon} observations"
                )));
            }
        }
        self.round += 1;
        self.window.push(x)?;
        self.threshold.reserve(self.window.len());

        let mut detected = false;
        while let Some(split) = self.would_detect() {
            detected = true;
            self.window.drop_front(split.prefix_len);
        }
        self.last_estimate = Some(mean_estimate(&self.window)?);
        Ok(DetectionReport {
            detected,
            breakpoint: detected.then(|| self.window.start_time() - 1),
            retained_size: self.window.len(),
        })
    }

    /// First qualifying split of the current window, without shrinking it.
    pub fn would_detect(&self) -> Option<Split> {
        first_split(self.window.prefix_sums(), &self.threshold, self.stride)
    }

    /// Mean of the current window, or the last valid estimate when the
    /// window is empty (`None` before the first observation).
    pub fn estimate(&self) -> Option<f64> {
        if self.window.is_empty() {
            self.last_estimate
        } else {
            Some(self.window.sum() / self.window.len() as f64)
        }
    }
}
