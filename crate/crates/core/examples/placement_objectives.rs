//! The floor-planning and cell-placement objectives on a few orderings.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sortkernel::problems::{brute_force_optimum, CellPlacement, FloorPlan, Objective};
use sortkernel::Permutation;

fn main() {
    let fp = FloorPlan::random(7, 3).unwrap();
    let cp = CellPlacement::random(7, 3).unwrap();
    println!("floor plan blocks (w, h): {:?}, strip width {}", fp.blocks, fp.strip_width);
    println!("cell placement nets: {:?}", cp.netlist.nets);

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..4 {
        let p = Permutation::random(7, &mut rng).unwrap();
        println!("{p}: height {:>3}, wirelength {:>3}", fp.evaluate(&p).unwrap(), cp.evaluate(&p).unwrap());
    }
    for obj in [&fp as &dyn Objective, &cp] {
        let (p, v) = brute_force_optimum(obj).unwrap();
        println!("{} optimum {v} at {p}", obj.name());
    }
}
