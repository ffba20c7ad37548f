use num_complex::Complex64;
use rustfft::FftPlanner;

/// In-place 3-D FFT of an x-fastest array. The inverse is normalised.
pub(crate) fn fft3(data: &mut [Complex64], n: [usize; 3], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let stride = [1, n[0], n[0] * n[1]];
    let total = n[0] * n[1] * n[2];
    for axis in 0..3 {
        let m = n[axis];
        let fft = if inverse { planner.plan_fft_inverse(m) } else { planner.plan_fft_forward(m) };
        let mut line = vec![Complex64::new(0.0, 0.0); m];
        let st = stride[axis];
        for start in 0..total {
            // first node of each line along `axis`
            if (start / st) % m != 0 {
                continue;
            }
            for (t, v) in line.iter_mut().enumerate() {
                *v = data[start + t * st];
            }
            fft.process(&mut line);
            for (t, v) in line.iter().enumerate() {
                data[start + t * st] = *v;
            }
        }
    }
    if inverse {
        let s = 1.0 / total as f64;
        for v in data.iter_mut() {
            *v *= s;
        }
    }
}

/// Fourier symbol of the centered first difference: `sin(2πm/n)/h`.
pub(crate) fn symbol(n: usize, h: f64) -> Vec<f64> {
    (0..n).map(|m| (2.0 * std::f64::consts::PI * m as f64 / n as f64).sin() / h).collect()
}
