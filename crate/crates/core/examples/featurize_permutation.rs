//! Every feature map applied to one permutation, and the merge trace decoded
//! back into the permutation.
//!
//! cargo run --example featurize_permutation -- 3,0,6,1,5,2,7,4

use sortkernel::featurize::{featurize, reconstruct_merge, phi_merge, FeaturizerConfig, MapKind};
use sortkernel::Permutation;

fn main() {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "3,0,6,1,5,2,7,4".into());
    let elems: Vec<usize> = arg.split(',').map(|t| t.trim().parse().expect("integer")).collect();
    let pi = Permutation::new(elems).expect("a permutation of 0..n");
    let cfg = FeaturizerConfig::default();

    println!("pi = {pi}");
    for kind in MapKind::ALL {
        match featurize(&pi, kind, &cfg) {
            Ok(v) => println!("{:>6} [{:>3}] {:?}", kind.name(), v.len(), v.0),
            Err(e) => println!("{:>6} unavailable: {e}", kind.name()),
        }
    }

    let trace = phi_merge(&pi);
    let back = reconstruct_merge(&trace, pi.len()).unwrap();
    println!("decoded from merge trace: {back}");
    assert_eq!(back, pi);
}
