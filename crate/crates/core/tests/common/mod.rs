//! Statistical helpers shared by the integration and acceptance tests.
#![allow(dead_code, clippy::excessive_precision)]

/// `ln Gamma(x)` for `x > 0` (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

pub fn poisson_pmf(k: u64, mean: f64) -> f64 {
    (k as f64 * mean.ln() - mean - ln_gamma(k as f64 + 1.0)).exp()
}

/// Chi-square goodness of fit of Poisson counts. Adjacent counts are pooled
/// into cells of probability at least `min_prob`, the two tails included.
/// Returns `(statistic, degrees of freedom)`.
pub fn poisson_chi_square(counts: &[usize], mean: f64, min_prob: f64) -> (f64, usize) {
    let n = counts.len() as f64;
    let top = (mean + 12.0 * mean.sqrt() + 20.0) as u64;
    let mut edges = Vec::new(); // inclusive upper count of each cell
    let mut cell_prob = Vec::new();
    let mut acc = 0.0;
    let mut total = 0.0;
    for k in 0..=top {
        let p = poisson_pmf(k, mean);
        acc += p;
        total += p;
        if acc >= min_prob && 1.0 - total >= min_prob {
            edges.push(k);
            cell_prob.push(acc);
            acc = 0.0;
        }
    }
    // The final cell takes everything above the last edge.
    cell_prob.push(1.0 - cell_prob.iter().sum::<f64>());
    let mut observed = vec![0usize; cell_prob.len()];
    for &c in counts {
        let cell = edges.partition_point(|&e| e < c as u64);
        observed[cell] += 1;
    }
    let stat = observed
        .iter()
        .zip(&cell_prob)
        .map(|(&o, &p)| {
            let e = n * p;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    (stat, cell_prob.len() - 1)
}

/// Upper 1% point of the chi-square distribution (Wilson-Hilferty).
pub fn chi_square_critical_99(df: usize) -> f64 {
    const Z: f64 = 2.326_347_874_040_840_8;
    let k = df as f64;
    let h = 2.0 / (9.0 * k);
    k * (1.0 - h + Z * h.sqrt()).powi(3)
}

/// Kolmogorov-Smirnov distance between a sample and a continuous cdf.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn helpers_agree_with_known_values() {
    assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-12);
    assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-12);
    // chi-square 99% points: df 10 -> 23.209, df 50 -> 76.154
    assert!((chi_square_critical_99(10) - 23.209).abs() < 0.05);
    assert!((chi_square_critical_99(50) - 76.154).abs() < 0.05);
    let total: f64 = (0..60).map(|k| poisson_pmf(k, 12.5)).sum();
    assert!((total - 1.0).abs() < 1e-12);
}
