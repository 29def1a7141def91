//! Rough timings for the per-iteration hot paths.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use ragoose::gp::{fit, KernelConfig, TrainingSet};

fn main() { bench_inverse_route();
    let n = 205;
    // SPD matrix.
    let a = DMatrix::from_fn(n, n, |i, j| {
        let d = (i as f64 - j as f64) / 10.0;
        (-0.5 * d * d).exp() + if i == j { 0.1 } else { 0.0 }
    });
    let start = Instant::now();
    let reps = 200;
    for _ in 0..reps {
        let _ = a.clone().cholesky().unwrap();
    }
    println!(
        "cholesky n={n}: {:.3} ms/factorization",
        start.elapsed().as_secs_f64() * 1e3 / reps as f64
    );

    // Kernel matrix build (exp-heavy).
    let xs: Vec<DVector<f64>> = (0..n).map(|i| DVector::from_vec(vec![i as f64 * 0.05])).collect();
    let cfg = KernelConfig::new(1.0, vec![1.0], 0.0, 0.0);
    let start = Instant::now();
    for _ in 0..reps {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..=i {
                s += ragoose::gp::rbf_kernel(&xs[i], &xs[j], &cfg).unwrap();
            }
        }
        std::hint::black_box(s);
    }
    println!(
        "kernel matrix n={n}: {:.3} ms/build",
        start.elapsed().as_secs_f64() * 1e3 / reps as f64
    );

    // Single-point predictions on a fitted model.
    let mut train = TrainingSet::empty();
    for i in 0..n {
        train.push(DVector::from_vec(vec![i as f64 * 0.05]), (i as f64).sin(), 0.01);
    }
    let model = fit(train, cfg.clone()).unwrap();
    let q = DVector::from_vec(vec![3.3]);
    let start = Instant::now();
    let preds = 20_000;
    for _ in 0..preds {
        std::hint::black_box(model.predict_var(&q).unwrap());
    }
    println!(
        "predict_var n={n}: {:.1} us/call",
        start.elapsed().as_secs_f64() * 1e6 / preds as f64
    );

    // Batched predictions, 50 at a time.
    let batch: Vec<DVector<f64>> = (0..50).map(|i| DVector::from_vec(vec![i as f64 * 0.2])).collect();
    let start = Instant::now();
    let calls = 1000;
    for _ in 0..calls {
        std::hint::black_box(model.predict_many(&batch).unwrap());
    }
    println!(
        "predict_many 50 pts n={n}: {:.1} us/call ({:.2} us/pt)",
        start.elapsed().as_secs_f64() * 1e6 / calls as f64,
        start.elapsed().as_secs_f64() * 1e6 / calls as f64 / 50.0
    );
}

// Appended experiment: inverse-matrix route for variance.
fn bench_inverse_route() {
    use std::time::Instant;
    let n = 205;
    let a = DMatrix::from_fn(n, n, |i, j| {
        let d = (i as f64 - j as f64) / 10.0;
        (-0.5 * d * d).exp() + if i == j { 0.1 } else { 0.0 }
    });
    let inv = a.clone().try_inverse().unwrap();
    let kappa = DVector::from_fn(n, |i, _| ((i as f64) * 0.01).cos());
    let start = Instant::now();
    let reps = 20_000;
    for _ in 0..reps {
        let v = &inv * &kappa;
        std::hint::black_box(kappa.dot(&v));
    }
    println!(
        "inverse matvec n={n}: {:.1} us/call",
        start.elapsed().as_secs_f64() * 1e6 / reps as f64
    );
    // Symmetric rank-1 quadratic form by hand (cache-friendly, single pass).
    let start = Instant::now();
    for _ in 0..reps {
        let mut acc = 0.0;
        for j in 0..n {
            let col = inv.column(j);
            let kj = kappa[j];
            let mut s = 0.0;
            for i in 0..n {
                s += col[i] * kappa[i];
            }
            acc += kj * s;
        }
        std::hint::black_box(acc);
    }
    println!(
        "manual quadratic form n={n}: {:.1} us/call",
        start.elapsed().as_secs_f64() * 1e6 / reps as f64
    );
}
