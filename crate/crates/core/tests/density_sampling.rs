use depthcore::density::{Component, PRESET_CRATER, PRESET_MIXTURE6};
use depthcore::DensityModel;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use statrs::function::erf::erf;

/// Composite Simpson on `[a, b]` with `m` (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Pearson statistic over bins `edges[i]..edges[i+1]` plus the two tails.
fn chi_square(samples: &[f64], edges: &[f64], cdf: impl Fn(f64) -> f64) -> (f64, usize) {
    let n = samples.len() as f64;
    let bins = edges.len() + 1;
    let mut observed = vec![0usize; bins];
    for &x in samples {
        observed[edges.partition_point(|&e| e <= x)] += 1;
    }
    let mut stat = 0.0;
    for b in 0..bins {
        let lo = if b == 0 { 0.0 } else { cdf(edges[b - 1]) };
        let hi = if b == edges.len() { 1.0 } else { cdf(edges[b]) };
        let expected = n * (hi - lo);
        assert!(expected >= 5.0, "bin {b} expects {expected}");
        stat += (observed[b] as f64 - expected).powi(2) / expected;
    }
    (stat, bins - 1)
}

fn critical(dof: usize) -> f64 {
    ChiSquared::new(dof as f64).unwrap().inverse_cdf(1.0 - 1e-3)
}

#[test]
fn mixture_sample_passes_chi_square() {
    let model = DensityModel::preset(PRESET_MIXTURE6).unwrap();
    let samples: Vec<f64> = model.sample(100_000, 2024).coords().to_vec();
    let cdf = |x: f64| -> f64 {
        model
            .components()
            .iter()
            .map(|c| match c {
                Component::Gaussian {
                    weight,
                    mean,
                    sigma,
                } => weight * Normal::new(mean[0], *sigma).unwrap().cdf(x),
                Component::Ring { .. } => unreachable!(),
            })
            .sum()
    };
    // 48 interior edges: 49 bins plus two tails would be 50 with one lumped.
    let edges: Vec<f64> = (0..49).map(|i| -7.5 + 14.0 * i as f64 / 48.0).collect();
    let (stat, dof) = chi_square(&samples, &edges, cdf);
    assert_eq!(dof + 1, 50);
    assert!(stat < critical(dof), "chi2 = {stat} with {dof} dof");
}

#[test]
fn crater_radius_passes_chi_square() {
    let model = DensityModel::preset(PRESET_CRATER).unwrap();
    let cloud = model.sample(100_000, 2025);
    let radii: Vec<f64> = cloud
        .points()
        .map(|p| (p[0] * p[0] + p[1] * p[1]).sqrt())
        .collect();
    // Both components are centred at the origin, so the law of |X| is radial.
    let radial = |rho: f64| 2.0 * std::f64::consts::PI * rho * model.value_at(&[rho, 0.0]);
    let cdf = |x: f64| simpson(radial, 0.0, x, 4000);
    let edges: Vec<f64> = (1..50).map(|i| 0.05 + 2.35 * i as f64 / 50.0).collect();
    let (stat, dof) = chi_square(&radii, &edges, cdf);
    assert!(stat < critical(dof), "chi2 = {stat} with {dof} dof");
}

#[test]
fn ring_normalizer_matches_closed_form() {
    let (rho0, sigma, weight) = (1.5, 0.25, 0.65);
    let model = DensityModel::new(
        2,
        vec![
            Component::Ring {
                weight,
                rho0,
                sigma,
            },
            Component::Gaussian {
                weight: 1.0 - weight,
                mean: vec![10.0, 10.0],
                sigma: 0.5,
            },
        ],
    )
    .unwrap();
    // 2 pi int_0^inf rho exp(-(rho - rho0)^2 / 2 sigma^2) d rho in closed form.
    let s2 = sigma * sigma;
    let z = 2.0
        * std::f64::consts::PI
        * (s2 * (-rho0 * rho0 / (2.0 * s2)).exp()
            + rho0
                * sigma
                * (std::f64::consts::PI / 2.0).sqrt()
                * (1.0 + erf(rho0 / (sigma * 2f64.sqrt()))));
    for rho in [0.0, 0.7, 1.5, 1.9, 2.6] {
        let expect = weight / z * (-(rho - rho0) * (rho - rho0) / (2.0 * s2)).exp();
        let got = model.value_at(&[rho * 0.6, rho * 0.8]);
        assert!(
            (got - expect).abs() <= 1e-9 * expect.max(1e-300),
            "rho {rho}: {got} vs {expect}"
        );
    }
    // Integrating the ring part over the plane gives back its weight.
    let mass = simpson(
        |rho| 2.0 * std::f64::consts::PI * rho * model.value_at(&[rho, 0.0]),
        0.0,
        4.0,
        8000,
    );
    assert!((mass - weight).abs() < 1e-6, "{mass}");
}

#[test]
fn presets_integrate_to_one_over_their_box() {
    for name in [PRESET_MIXTURE6, PRESET_CRATER] {
        let model = DensityModel::preset(name).unwrap();
        let b = model.support_box();
        let mass = if model.dim() == 1 {
            simpson(|x| model.value_at(&[x]), b.lo[0], b.hi[0], 20_000)
        } else {
            simpson(
                |x| simpson(|y| model.value_at(&[x, y]), b.lo[1], b.hi[1], 600),
                b.lo[0],
                b.hi[0],
                600,
            )
        };
        assert!((mass - 1.0).abs() < 1e-4, "{name}: {mass}");
        assert!(
            (model
                .components()
                .iter()
                .map(Component::weight)
                .sum::<f64>()
                - 1.0)
                .abs()
                < 1e-12
        );
    }
}

#[test]
fn gaussian_moments_and_determinism() {
    let model = DensityModel::gaussian(vec![0.0], 1.0).unwrap();
    let n = 100_000;
    let cloud = model.sample(n, 7);
    let xs = cloud.coords();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
    assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "{mean}");
    assert!((var - 1.0).abs() < 0.05, "{var}");
    assert_eq!(model.sample(500, 9).coords(), model.sample(500, 9).coords());
    assert_ne!(
        model.sample(500, 9).coords(),
        model.sample(500, 10).coords()
    );
}

/// Sup distance between the width-0.1 histogram density and f at bin centres.
fn histogram_sup_distance(model: &DensityModel, n: usize, seed: u64) -> f64 {
    let width = 0.1;
    let cloud = model.sample(n, seed);
    let b = model.support_box();
    let bins = ((b.hi[0] - b.lo[0]) / width).ceil() as usize;
    let mut counts = vec![0usize; bins];
    for &x in cloud.coords() {
        let i = ((x - b.lo[0]) / width).floor() as usize;
        counts[i.min(bins - 1)] += 1;
    }
    let mut worst = 0.0f64;
    for (i, &c) in counts.iter().enumerate() {
        let centre = b.lo[0] + (i as f64 + 0.5) * width;
        worst = worst.max((c as f64 / (n as f64 * width) - model.value_at(&[centre])).abs());
    }
    worst
}

// Fails for every seed tried (0 of 200): near the peak the count noise has
// standard deviation 0.075 max f, so the sup over ~180 bins sits near 0.155 max f.
#[test]
#[ignore = "unattainable at n = 1e4, run with --ignored to see the measured distance"]
fn mixture_histogram_tracks_density() {
    let model = DensityModel::preset(PRESET_MIXTURE6).unwrap();
    let worst = histogram_sup_distance(&model, 10_000, 31);
    assert!(
        worst < 0.1 * model.max_value(),
        "sup distance {worst} vs max {}",
        model.max_value()
    );
}

#[test]
fn mixture_histogram_tracks_density_at_larger_n() {
    let model = DensityModel::preset(PRESET_MIXTURE6).unwrap();
    for seed in 0..3 {
        let worst = histogram_sup_distance(&model, 100_000, seed);
        assert!(
            worst < 0.1 * model.max_value(),
            "seed {seed}: {worst} vs max {}",
            model.max_value()
        );
    }
}

#[test]
fn symmetric_mixture_is_symmetric() {
    let model = DensityModel::new(
        1,
        vec![
            Component::Gaussian {
                weight: 0.5,
                mean: vec![-1.25],
                sigma: 0.5,
            },
            Component::Gaussian {
                weight: 0.5,
                mean: vec![1.25],
                sigma: 0.5,
            },
        ],
    )
    .unwrap();
    for i in 0..200 {
        let x = i as f64 * 0.037;
        assert_eq!(model.value_at(&[x]), model.value_at(&[-x]));
    }
    assert!(model.value_at(&[60.0]) < 1e-300);
}
