//! Rainflow cycle counting with the four-point rule.

/// A counted cycle: `count` is 1.0 for a closed cycle and 0.5 for a
/// residual half cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cycle {
    pub range: f64,
    pub count: f64,
}

/// Reduces a series to its turning points. Plateaus collapse to a single
/// point and monotone runs keep only their endpoints; the first and last
/// samples are always kept.
pub fn reversals(series: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(series.len());
    for &x in series {
        if out.last() == Some(&x) {
            continue;
        }
        let n = out.len();
        if n >= 2 && (out[n - 1] - out[n - 2]) * (x - out[n - 1]) > 0.0 {
            out[n - 1] = x;
        } else {
            out.push(x);
        }
    }
    out
}

/// Four-point rainflow: whenever the inner range of the last four turning
/// points is no larger than both outer ranges, the inner pair closes a full
/// cycle and is removed. What remains is counted as half cycles.
pub fn rainflow(series: &[f64]) -> Vec<Cycle> {
    let mut cycles = Vec::new();
    let mut stack: Vec<f64> = Vec::new();
    for x in reversals(series) {
        stack.push(x);
        while stack.len() >= 4 {
            let n = stack.len();
            let (a, b, c, d) = (stack[n - 4], stack[n - 3], stack[n - 2], stack[n - 1]);
            let inner = (b - c).abs();
            if inner <= (a - b).abs() && inner <= (c - d).abs() {
                cycles.push(Cycle {
                    range: inner,
                    count: 1.0,
                });
                stack.drain(n - 3..n - 1);
            } else {
                break;
            }
        }
    }
    cycles.extend(stack.windows(2).map(|w| Cycle {
        range: (w[1] - w[0]).abs(),
        count: 0.5,
    }));
    cycles
}
