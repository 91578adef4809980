//! Seeded random generation of polynomial data.
//!
//! Every polynomial has at most [`Sampler::max_terms`] terms, each with an
//! integer coefficient drawn uniformly from `[-3, 3]` and a monomial of total
//! degree at most `max_degree`. One ChaCha8 stream per trial keeps results
//! independent of evaluation order.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::foliated::{combinations, Chart, FVec, TForm};
use crate::qforms::QForm;
use crate::ring::{int, Poly};

pub const COEFF_BOUND: i64 = 3;

pub struct Sampler {
    rng: ChaCha8Rng,
    pub max_degree: u32,
    pub max_terms: usize,
}

impl Sampler {
    pub fn new(seed: u64, max_degree: u32) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), max_degree, max_terms: 3 }
    }

    /// Independent stream for trial `trial` under `seed`.
    pub fn for_trial(seed: u64, trial: u64, max_degree: u32) -> Self {
        let mut s = Self::new(seed, max_degree);
        s.rng.set_stream(trial);
        s
    }

    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random_range(0..2) == 1
    }

    pub fn coeff(&mut self) -> i64 {
        self.range(-COEFF_BOUND, COEFF_BOUND)
    }

    pub fn nonzero_coeff(&mut self) -> i64 {
        loop {
            let c = self.coeff();
            if c != 0 {
                return c;
            }
        }
    }

    /// Random polynomial in `nvars` variables.
    pub fn poly(&mut self, nvars: usize) -> Poly {
        let vars: Vec<usize> = (0..nvars).collect();
        self.poly_in(nvars, &vars)
    }

    /// Random polynomial involving only the listed variables.
    pub fn poly_in(&mut self, nvars: usize, vars: &[usize]) -> Poly {
        let terms = self.range(0, self.max_terms as i64) as usize;
        let mut p = Poly::zero(nvars);
        for _ in 0..terms {
            let mut e = vec![0u32; nvars];
            if !vars.is_empty() {
                let deg = self.range(0, self.max_degree as i64);
                for _ in 0..deg {
                    e[vars[self.index(vars.len())]] += 1;
                }
            }
            p += &Poly::monomial(nvars, e, int(self.coeff()));
        }
        p
    }

    pub fn fvec(&mut self, chart: Chart) -> FVec {
        let comps = (0..chart.k).map(|_| self.poly(chart.n)).collect();
        FVec::new(chart, comps).expect("shape")
    }

    pub fn tform(&mut self, chart: Chart, degree: usize) -> TForm {
        let mut w = TForm::zero(chart, degree);
        for idx in combinations(chart.k, degree) {
            let f = self.poly(chart.n);
            w = w.add(&TForm::basis(chart, &idx, f).expect("index")).expect("shape");
        }
        w
    }

    pub fn qform(&mut self, chart: Chart, dim: usize, degree: usize) -> QForm {
        let comps = (0..dim).map(|_| self.tform(chart, degree)).collect();
        QForm::new(chart, degree, comps).expect("shape")
    }

    pub fn section(&mut self, chart: Chart, dim: usize) -> QForm {
        self.qform(chart, dim, 0)
    }
}
