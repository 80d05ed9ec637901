//! Scratch calibration runs for the acceptance thresholds (not shipped).

use nlm_spectral::chebyshev::{
    clenshaw_matvec, relative_truncation_error, truncation_error_bound, ChebyshevExpansion,
    ProbeAggregate,
};
use nlm_spectral::image::{add_gaussian_noise, psnr, sigma_for_snr, NoiseModel, PsnrMode};
use nlm_spectral::operator::{LinearOperator, NlmOperator};
use nlm_spectral::pipelines::{denoise_nlm, denoise_nlm_sb, denoise_nlm_sb2, Sb2Config};
use nlm_spectral::spectral::{decompose_nlm, decompose_nlm_with_cap, random_nlm_operator};
use nlm_spectral::synth::standard_set;
use nlm_spectral::FilterSpec;
use std::time::Instant;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "all".into());
    if which == "c7" || which == "all" {
        criterion7_probe();
    }
    if which == "c4" || which == "all" {
        criterion4_probe();
    }
    if which == "c3" || which == "all" {
        criterion3_probe();
    }
    if which == "c2" || which == "all" {
        criterion2_probe();
    }
    if which == "c6" || which == "all" {
        criterion6_probe();
    }
    if which == "c1" || which == "all" {
        criterion1_probe();
    }
}

fn criterion7_probe() {
    println!("=== criterion 7 probe: textures at 60x60, SNR=0.5, table preset ===");
    let cfg = Sb2Config::preset_for_snr(0.5).unwrap();
    let textures = standard_set(60, 60);
    let seeds = [11u64, 12, 13];
    let mut mean_nlm = 0.0;
    let mut mean_sb = 0.0;
    let mut mean_sb2 = 0.0;
    let mut count = 0.0;
    for (name, clean) in &textures {
        let sigma = sigma_for_snr(clean, 0.5).unwrap();
        for &seed in &seeds {
            let t0 = Instant::now();
            let noisy = add_gaussian_noise(clean, &NoiseModel::new(sigma, seed).unwrap()).unwrap();
            let out_nlm = denoise_nlm(&noisy, cfg.p, cfg.h1).unwrap();
            let out_sb =
                denoise_nlm_sb(&noisy, cfg.p, cfg.h1, cfg.omega1, cfg.d1, cfg.n_cheb).unwrap();
            let out_sb2 = denoise_nlm_sb2(&noisy, &cfg).unwrap();
            let p_noisy = psnr(clean, &noisy, PsnrMode::Standard).unwrap();
            let p_nlm = psnr(clean, &out_nlm, PsnrMode::Standard).unwrap();
            let p_sb = psnr(clean, &out_sb, PsnrMode::Standard).unwrap();
            let p_sb2 = psnr(clean, &out_sb2, PsnrMode::Standard).unwrap();
            println!(
                "{name:13} seed={seed}: noisy={p_noisy:6.2} nlm={p_nlm:6.2} sb={p_sb:6.2} sb2={p_sb2:6.2}  ({:.1}s)",
                t0.elapsed().as_secs_f64()
            );
            mean_nlm += p_nlm;
            mean_sb += p_sb;
            mean_sb2 += p_sb2;
            count += 1.0;
        }
    }
    println!(
        "MEANS: nlm={:.3} sb={:.3} sb2={:.3} | sb-nlm={:+.3} sb2-sb={:+.3}",
        mean_nlm / count,
        mean_sb / count,
        mean_sb2 / count,
        (mean_sb - mean_nlm) / count,
        (mean_sb2 - mean_sb) / count
    );
}

fn criterion4_probe() {
    println!("=== criterion 4 probe: n=400, M=50, omega=0.7 ===");
    let t0 = Instant::now();
    let m_ops = 50;
    let n = 400;
    let orders = [4u32, 8, 16];
    let degrees = [80usize, 100, 150, 200];
    let mut ops = Vec::new();
    for i in 0..m_ops {
        let op = random_nlm_operator(n, 9000 + i as u64, 5, 0.7).unwrap();
        let dec = decompose_nlm(&op).unwrap();
        ops.push((op, dec));
    }
    println!("built {} operators in {:.1}s", m_ops, t0.elapsed().as_secs_f64());
    for agg in [ProbeAggregate::Mean, ProbeAggregate::Max] {
        println!("aggregate = {agg:?}");
        for &d in &orders {
            let filter = FilterSpec::slanted_butterworth(0.7, d).unwrap();
            print!("  d={d:2}: ");
            for &nn in &degrees {
                let mut acc = 0.0;
                for (op, dec) in &ops {
                    acc += relative_truncation_error(op, dec, &filter, nn, agg).unwrap();
                }
                print!("N={nn}: {:.3e}  ", acc / m_ops as f64);
            }
            println!();
        }
    }
    println!("criterion 4 probe took {:.1}s", t0.elapsed().as_secs_f64());
}

fn criterion3_probe() {
    println!("=== criterion 3 probe: clenshaw oracle equivalence slack ===");
    let sizes = [144usize, 324, 484];
    let omegas = [0.3, 0.5, 0.7];
    let orders = [4u32, 15, 50];
    let mut worst_explicit = 0.0f64;
    let mut worst_exact_ratio = 0.0f64;
    for (idx, &n) in sizes.iter().enumerate() {
        let op = random_nlm_operator(n, 400 + idx as u64, 5, 0.7).unwrap();
        let dec = decompose_nlm(&op).unwrap();
        let y: Vec<f64> = {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
            (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        let y_inf = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for &omega in &omegas {
            for &d in &orders {
                let filter = FilterSpec::slanted_butterworth(omega, d).unwrap();
                let exp = ChebyshevExpansion::of_filter(&filter, 150).unwrap();
                let clen = clenshaw_matvec(&op, &exp, &y).unwrap();
                let explicit = explicit_cheb_apply(&op, exp.coeffs(), &y);
                let exact = dec.apply_filtered_exact(&filter, &y).unwrap();
                let scalar_err = dec
                    .eigenvalues()
                    .iter()
                    .map(|&l| {
                        let lc = l.clamp(0.0, 1.0);
                        (exp.eval(lc).unwrap() - filter.eval_unchecked(lc)).abs()
                    })
                    .fold(0.0f64, f64::max);
                let diff_explicit = clen
                    .iter()
                    .zip(&explicit)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                let diff_exact = clen
                    .iter()
                    .zip(&exact)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                worst_explicit = worst_explicit.max(diff_explicit / y_inf);
                let ratio = diff_exact / scalar_err.max(1e-300) / y_inf;
                worst_exact_ratio = worst_exact_ratio.max(ratio);
                if ratio > 5.0 || diff_explicit / y_inf > 1e-11 {
                    println!(
                        "  n={n} omega={omega} d={d}: explicit={:.2e} exact_diff={:.2e} scalar_err={:.2e} ratio={:.2}",
                        diff_explicit / y_inf, diff_exact, scalar_err, ratio
                    );
                }
            }
        }
    }
    println!("worst explicit-recursion mismatch (rel inf): {worst_explicit:.3e}");
    println!("worst exact-vs-clenshaw over scalar_err ratio: {worst_exact_ratio:.3}");
}

fn explicit_cheb_apply(op: &impl LinearOperator, coeffs: &[f64], y: &[f64]) -> Vec<f64> {
    // sum_j coeffs[j]·T_j(2A−I)·y by the forward three-term recursion.
    let n = y.len();
    let t_apply = |v: &[f64]| -> Vec<f64> {
        let mut av = op.apply_vec(v);
        for i in 0..n {
            av[i] = 2.0 * av[i] - v[i];
        }
        av
    };
    let mut t_prev: Vec<f64> = y.to_vec(); // T_0 y
    let mut t_curr = t_apply(y); // T_1 y
    let mut out: Vec<f64> = (0..n)
        .map(|i| coeffs[0] * t_prev[i] + coeffs.get(1).copied().unwrap_or(0.0) * t_curr[i])
        .collect();
    for c in coeffs.iter().skip(2) {
        let t_half = t_apply(&t_curr);
        let t_next: Vec<f64> = (0..n).map(|i| 2.0 * t_half[i] - t_prev[i]).collect();
        for i in 0..n {
            out[i] += c * t_next[i];
        }
        t_prev = t_curr;
        t_curr = t_next;
    }
    out
}

fn criterion2_probe() {
    println!("=== criterion 2 probe: lemma check at n<=1000 ===");
    let mut sets: Vec<(String, NlmOperator)> = Vec::new();
    for (name, img) in standard_set(24, 24) {
        let p = 3;
        for h in [0.3, 0.7] {
            sets.push((format!("{name}-24-h{h}"), NlmOperator::build(&img, p, h).unwrap()));
        }
    }
    for (name, img) in standard_set(31, 31).into_iter().take(3) {
        sets.push((format!("{name}-31-h0.7"), NlmOperator::build(&img, 5, 0.7).unwrap()));
    }
    sets.push(("noise-961".into(), random_nlm_operator(961, 5, 5, 1.5).unwrap()));
    for (name, op) in &sets {
        let t0 = Instant::now();
        let dec = decompose_nlm_with_cap(op, 2000).unwrap();
        let l1 = dec.eigenvalues()[0];
        let lmin = *dec.eigenvalues().last().unwrap();
        let ones = vec![1.0; op.n()];
        let a1 = op.apply(&ones).unwrap();
        let a1_err = a1.iter().map(|v| (v - 1.0).abs()).fold(0.0f64, f64::max);
        println!(
            "{name:22} n={:4}: l1-1={:+.2e} lmin={:+.3e} |A1-1|={:.2e}  ({:.1}s)",
            op.n(),
            l1 - 1.0,
            lmin,
            a1_err,
            t0.elapsed().as_secs_f64()
        );
    }
}

fn criterion6_probe() {
    println!("=== criterion 6 probe: bound dominates measured probe error ===");
    for &(n, seed) in &[(196usize, 21u64), (400, 22)] {
        let op = random_nlm_operator(n, seed, 5, 0.7).unwrap();
        let dec = decompose_nlm(&op).unwrap();
        let (kappa, _) = op.condition_numbers();
        for &d in &[4u32, 8, 16] {
            let filter = FilterSpec::slanted_butterworth(0.7, d).unwrap();
            let deriv_norm = chebyshev_weighted_second_derivative_norm(&filter);
            for &nn in &[50usize, 100, 150, 200, 250, 300] {
                let bound = truncation_error_bound(deriv_norm, 1, nn, kappa).unwrap();
                // Measured absolute probe error on unit vectors.
                let exp = ChebyshevExpansion::of_filter(&filter, nn).unwrap();
                let mut measured = 0.0f64;
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3141);
                for _ in 0..8 {
                    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0f64..1.0)).collect();
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    v.iter_mut().for_each(|x| *x /= norm);
                    let approx = clenshaw_matvec(&op, &exp, &v).unwrap();
                    let exact = dec.apply_filtered_exact(&filter, &v).unwrap();
                    let err = approx
                        .iter()
                        .zip(&exact)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    measured = measured.max(err);
                }
                let ok = bound >= measured;
                if !ok || nn == 50 {
                    println!(
                        "  n={n} d={d:2} N={nn:3}: bound={bound:9.3e} measured={measured:9.3e} {}",
                        if ok { "OK" } else { "VIOLATION" }
                    );
                }
            }
        }
    }
}

fn chebyshev_weighted_second_derivative_norm(filter: &FilterSpec) -> f64 {
    // ∫ |g''(t)|/sqrt(1−t²) dt on [−1,1] via t = cosθ midpoint rule,
    // g(t) = f((t+1)/2), g'' by central differences.
    let nodes = 10_000;
    let fd = 1e-5;
    let g = |t: f64| filter.eval_unchecked(((t + 1.0) / 2.0).clamp(0.0, 1.0));
    let mut acc = 0.0;
    for k in 0..nodes {
        let theta = std::f64::consts::PI * (k as f64 + 0.5) / nodes as f64;
        let t = theta.cos().clamp(-1.0 + 2.0 * fd, 1.0 - 2.0 * fd);
        let second = (g(t + fd) - 2.0 * g(t) + g(t - fd)) / (fd * fd);
        acc += second.abs();
    }
    acc * std::f64::consts::PI / nodes as f64
}

fn criterion1_probe() {
    println!("=== criterion 1 probe: filtered-operator admissibility timing ===");
    let t0 = Instant::now();
    let sizes = [100usize, 144, 196, 256];
    let mut total_checks = 0;
    for i in 0..20u64 {
        let n = sizes[i as usize % sizes.len()];
        let p = if i % 2 == 0 { 3 } else { 5 };
        let h = [0.3, 0.7, 1.5][i as usize % 3];
        let op = random_nlm_operator(n, 100 + i, p, h).unwrap();
        let dec = decompose_nlm(&op).unwrap();
        for &omega in &[0.3, 0.5, 0.7] {
            for &d in &[4u32, 15, 50] {
                let filter = FilterSpec::slanted_butterworth(omega, d).unwrap();
                let ones = vec![1.0; n];
                let b1 = dec.apply_filtered_exact(&filter, &ones).unwrap();
                let err = b1.iter().map(|v| (v - 1.0).abs()).fold(0.0f64, f64::max);
                assert!(err < 1e-8, "B1 err {err}");
                // Recompute the filtered spectrum through the symmetric form.
                let o = dec.vectors();
                let gains: Vec<f64> = dec
                    .eigenvalues()
                    .iter()
                    .map(|&l| filter.eval_unchecked(l.clamp(0.0, 1.0)))
                    .collect();
                let mut sb = ndarray::Array2::<f64>::zeros((n, n));
                for r in 0..n {
                    for c in 0..n {
                        let mut acc = 0.0;
                        for k in 0..n {
                            acc += o[[r, k]] * gains[k] * o[[c, k]];
                        }
                        sb[[r, c]] = acc;
                    }
                }
                // enforce exact symmetry against rounding
                for r in 0..n {
                    for c in 0..r {
                        let v = 0.5 * (sb[[r, c]] + sb[[c, r]]);
                        sb[[r, c]] = v;
                        sb[[c, r]] = v;
                    }
                }
                let (vals, _) = nlm_spectral::spectral::jacobi_eigh(&sb).unwrap();
                let lmax = vals[0];
                let lmin = *vals.last().unwrap();
                assert!(
                    lmax <= 1.0 + 1e-8 && lmin >= -1e-8,
                    "spectrum [{lmin}, {lmax}]"
                );
                total_checks += 1;
            }
        }
    }
    println!(
        "criterion 1 probe: {total_checks} checks in {:.1}s",
        t0.elapsed().as_secs_f64()
    );
}
