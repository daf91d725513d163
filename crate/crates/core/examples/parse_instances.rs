//! Load the bundled QAPLIB and TSPLIB samples and brute-force their optima.

use sortkernel::problems::{brute_force_optimum, parse_qaplib, parse_tsplib, Objective};

fn main() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data");
    let read = |name: &str| std::fs::read_to_string(format!("{dir}/{name}")).unwrap();

    let objectives: Vec<Box<dyn Objective>> = vec![
        Box::new(parse_qaplib(&read("grid8.dat")).unwrap()),
        Box::new(parse_tsplib(&read("drill8.tsp")).unwrap()),
        Box::new(parse_tsplib(&read("square5.tsp")).unwrap()),
    ];
    for obj in &objectives {
        let (pi, v) = brute_force_optimum(obj.as_ref()).unwrap();
        println!("{:<10} n = {:>2}  optimum {v:>6} at {pi}", obj.name(), obj.size());
    }

    match parse_tsplib("NAME: broken\nTYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 x 1\n") {
        Ok(_) => println!("unexpectedly parsed"),
        Err(e) => println!("malformed file rejected: {e}"),
    }
}
