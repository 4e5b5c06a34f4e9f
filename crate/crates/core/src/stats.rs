//! Small order-statistics helpers shared across modules.

/// Median of the values; the mean of the two middle values for even counts.
pub(crate) fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

/// Mean that does not depend on the input order (values are summed sorted),
/// so permuting the samples, e.g. by rolling a panorama, is bit-exact.
pub(crate) fn order_free_mean(mut values: Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    Some(values.iter().sum::<f64>() / n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians() {
        assert_eq!(median(&mut []), None);
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }

    #[test]
    fn order_free() {
        let a = vec![0.1, 1e16, -1e16, 0.3, 0.7];
        let mut b = a.clone();
        b.reverse();
        assert_eq!(order_free_mean(a), order_free_mean(b));
        assert_eq!(order_free_mean(vec![]), None);
    }
}
