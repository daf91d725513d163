//! Fit a Gaussian process to QAP costs of random permutations, check it on
//! held-out points, and ask expected improvement for the next query.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sortkernel::acquire::{propose, AcquisitionConfig, History};
use sortkernel::featurize::{Featurizer, FeaturizerConfig};
use sortkernel::gp::{GpModel, SearchSpace};
use sortkernel::problems::{Objective, QapInstance};
use sortkernel::Permutation;

fn main() {
    let inst = QapInstance::random(9, 5).unwrap();
    let f = Featurizer::merge(FeaturizerConfig::default());
    let mut rng = ChaCha8Rng::seed_from_u64(0);

    let mut history = History::new();
    while history.len() < 40 {
        let p = Permutation::random(9, &mut rng).unwrap();
        if !history.contains(&p) {
            let v = inst.evaluate(&p).unwrap();
            history.push(p, v);
        }
    }
    let feats: Vec<_> = history.perms().iter().map(|p| f.apply(p).unwrap()).collect();
    let model = GpModel::fit(feats, history.values().to_vec(), &SearchSpace::default()).unwrap();
    println!(
        "lengthscale {:.3}, signal {:.3}, noise {:.2e}, log marginal likelihood {:.3}",
        model.params().lengthscale,
        model.params().signal_variance,
        model.noise_variance(),
        model.log_marginal_likelihood()
    );

    println!("\n{:>8} {:>10} {:>8}", "actual", "predicted", "std");
    for _ in 0..6 {
        let p = Permutation::random(9, &mut rng).unwrap();
        let (mu, var) = model.predict(&f.apply(&p).unwrap()).unwrap();
        println!("{:>8} {mu:>10.1} {:>8.1}", inst.evaluate(&p).unwrap(), var.sqrt());
    }

    let next = propose(&model, &f, &history, &AcquisitionConfig::default(), &mut rng).unwrap();
    let (mu, var) = model.predict(&f.apply(&next).unwrap()).unwrap();
    println!(
        "\nincumbent {:.0}; next query {next} predicted {mu:.1} ± {:.1}, actual {}",
        history.incumbent().unwrap().1,
        var.sqrt(),
        inst.evaluate(&next).unwrap()
    );
}
