//! Small numeric helpers shared across modules.

/// Compensated (Neumaier) summation.
///
/// Keeps the running error of long probability sums near one ulp of the true
/// value, which the bound-gap identity `d_upper - d_lower = tail` relies on.
pub(crate) fn neumaier_sum<I>(values: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
