//! The Gaussian kernel over all pairwise comparisons is the Mallows kernel:
//! `exp(-|phi(a) - phi(b)|^2 / (2 l^2)) = exp(-(2 / l^2) d_K(a, b))`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sortkernel::featurize::{feature_length, phi_enum, FeaturizerConfig, MapKind};
use sortkernel::kernel::{mallows_closed_form, mallows_lambda, rbf, KernelParams};
use sortkernel::perm::kendall_tau;
use sortkernel::Permutation;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 10;
    let l = 1.5;
    let params = KernelParams::new(l, 1.0).unwrap();
    println!("{:>4} {:>14} {:>14}", "d_K", "rbf(phi_enum)", "mallows");
    for _ in 0..8 {
        let a = Permutation::random(n, &mut rng).unwrap();
        let b = Permutation::random(n, &mut rng).unwrap();
        let via_features = rbf(&phi_enum(&a), &phi_enum(&b), &params).unwrap();
        let closed = mallows_closed_form(&a, &b, mallows_lambda(l)).unwrap();
        println!("{:>4} {via_features:>14.6e} {closed:>14.6e}", kendall_tau(&a, &b).unwrap());
    }

    let cfg = FeaturizerConfig::default();
    println!("\nfeature lengths (pairwise vs merge trace):");
    for n in [8, 15, 32, 64] {
        println!(
            "n = {n:>2}: {:>4} vs {:>3}",
            feature_length(n, &cfg, MapKind::Enum),
            feature_length(n, &cfg, MapKind::Merge)
        );
    }
}
