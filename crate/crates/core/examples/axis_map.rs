//! Prints noise-free cost/constraint maps over the 2-d gain grid, plus seed
//! statistics; used to sanity-check the plant calibration.

use nalgebra::DVector;
use ragoose::benchmarks::axis::{axis_problem, axis_seeds, AxisBenchmark, AxisMode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let bench = AxisBenchmark::new(AxisMode::Numeric2d).unwrap();
    println!("== noise-free maps: rows kp, cols vki ==");
    let kps = [50.0, 125.0, 200.0, 275.0, 350.0, 425.0, 500.0];
    let vkis = [200.0, 500.0, 800.0, 1000.0, 1200.0, 1500.0, 1800.0, 2200.0];
    print!("{:>8}", "kp\\vki");
    for v in vkis {
        print!("{v:>10.0}");
    }
    println!();
    for kp in kps {
        print!("cost{kp:>5.0}");
        for vki in vkis {
            let x = DVector::from_vec(vec![kp, vki]);
            let (c, _) = bench.noise_free_features(&x).unwrap();
            print!("{c:>10.3}");
        }
        println!();
    }
    println!();
    for kp in kps {
        print!("qmet{kp:>5.0}");
        for vki in vkis {
            let x = DVector::from_vec(vec![kp, vki]);
            let (_, q) = bench.noise_free_features(&x).unwrap();
            print!("{q:>10.3}");
        }
        println!();
    }

    println!("\n== seeds (noise-free cost, metric) ==");
    for s in axis_seeds(AxisMode::Numeric2d) {
        let (c, q) = bench.noise_free_features(&s).unwrap();
        println!("seed {:?}: cost {c:.4} nm, metric {q:.4}", s.as_slice());
    }

    let problem = axis_problem(AxisMode::Numeric2d).unwrap();
    println!("calibrated threshold c = {:.4}", problem.threshold);

    println!("\n== noisy batches at seeds (k=10) ==");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for s in &problem.seeds {
        let b = problem.oracle.evaluate_batch(s, 10, &mut rng).unwrap();
        let mean = b.values.iter().sum::<f64>() / 10.0;
        let var = b.values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 9.0;
        println!(
            "seed {:?}: y_mean {mean:.4}, s2 {var:.3e}, m {:.4}",
            s.as_slice(),
            b.constraint
        );
    }
}
