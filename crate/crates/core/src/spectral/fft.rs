use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

/// Planned 3D real-to-complex transform for an `n^3` grid.
///
/// `forward` returns amplitudes (`u = Σ û_k e^{ik·x}`), so the forward pass
/// carries the `1/n^3` factor and `inverse` is unnormalized.
pub struct Fft3 {
    n: usize,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    fn plan(n: usize) -> Self {
        let mut real = RealFftPlanner::<f64>::new();
        let mut cplx = FftPlanner::<f64>::new();
        Self {
            n,
            r2c: real.plan_fft_forward(n),
            c2r: real.plan_fft_inverse(n),
            fwd: cplx.plan_fft_forward(n),
            inv: cplx.plan_fft_inverse(n),
        }
    }

    /// Shared plan for size `n`.
    pub fn get(n: usize) -> Arc<Fft3> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("fft plan cache poisoned");
        guard.entry(n).or_insert_with(|| Arc::new(Fft3::plan(n))).clone()
    }

    pub fn forward(&self, phys: &[f64]) -> Vec<Complex64> {
        let n = self.n;
        let nz = n / 2 + 1;
        assert_eq!(phys.len(), n * n * n);
        let mut spec = vec![Complex64::new(0.0, 0.0); n * n * nz];
        let mut row = vec![0.0; n];
        let mut scratch = self.r2c.make_scratch_vec();
        for (src, dst) in phys.chunks_exact(n).zip(spec.chunks_exact_mut(nz)) {
            row.copy_from_slice(src);
            self.r2c
                .process_with_scratch(&mut row, dst, &mut scratch)
                .expect("r2c length mismatch");
        }
        self.transform_xy(&mut spec, &*self.fwd);
        let norm = 1.0 / (n * n * n) as f64;
        spec.iter_mut().for_each(|c| *c *= norm);
        spec
    }

    pub fn inverse(&self, spec: &[Complex64]) -> Vec<f64> {
        let n = self.n;
        let nz = n / 2 + 1;
        assert_eq!(spec.len(), n * n * nz);
        let mut work = spec.to_vec();
        self.transform_xy(&mut work, &*self.inv);
        let mut phys = vec![0.0; n * n * n];
        let mut scratch = self.c2r.make_scratch_vec();
        for (src, dst) in work.chunks_exact_mut(nz).zip(phys.chunks_exact_mut(n)) {
            // c2r only represents real rows; drop the anti-Hermitian remainder.
            src[0].im = 0.0;
            src[nz - 1].im = 0.0;
            self.c2r
                .process_with_scratch(src, dst, &mut scratch)
                .expect("c2r length mismatch");
        }
        phys
    }

    fn transform_xy(&self, spec: &mut [Complex64], plan: &dyn Fft<f64>) {
        let n = self.n;
        let nz = n / 2 + 1;
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        // y axis
        for i in 0..n {
            let slab = &mut spec[i * n * nz..(i + 1) * n * nz];
            for l in 0..nz {
                for j in 0..n {
                    line[j] = slab[j * nz + l];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for j in 0..n {
                    slab[j * nz + l] = line[j];
                }
            }
        }
        // x axis
        for j in 0..n {
            for l in 0..nz {
                for i in 0..n {
                    line[i] = spec[(i * n + j) * nz + l];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for i in 0..n {
                    spec[(i * n + j) * nz + l] = line[i];
                }
            }
        }
    }
}
