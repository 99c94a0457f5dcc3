use parafix::generate;
use parafix::graph::depth_first_forest;
use parafix::wpo::construct_wpo_bu;
use std::time::Instant;

fn main() {
    for n in [10_000u32, 100_000, 1_000_000] {
        let g = generate::nested_loops(n);
        let mut best_dff = f64::MAX;
        let mut best_bu = f64::MAX;
        for _ in 0..5 {
            let t = Instant::now();
            let f = depth_first_forest(&g);
            let dff = t.elapsed().as_secs_f64();
            let t = Instant::now();
            let w = construct_wpo_bu(&g, &f, false);
            let bu = t.elapsed().as_secs_f64();
            assert!(w.node_count() > 0);
            best_dff = best_dff.min(dff);
            best_bu = best_bu.min(bu);
        }
        println!("n={n}: dff {:.1}ms  bu {:.1}ms", best_dff * 1e3, best_bu * 1e3);
    }
}
