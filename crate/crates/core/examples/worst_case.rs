use trimsim::switch::{pipe_ratio, worst_case_check};
use trimsim::switch::SwitchConfig;

fn main() {
    let cfg = SwitchConfig::default();
    let layouts: [(&str, Vec<(u16, u16)>); 3] = [
        ("16 x 4:1", (0..64).map(|i| (i, i % 16)).collect()),
        ("63:1", (1..64).map(|i| (i, 0)).collect()),
        ("1:1", (0..64).map(|i| (i, (i + 16) % 64)).collect()),
    ];
    for (name, flows) in layouts {
        let a = worst_case_check(&cfg, &flows);
        let worst = (0..cfg.n_pipes as usize).map(|p| pipe_ratio(&a, p, cfg.line_rate())).fold(0.0, f64::max);
        println!(
            "{name:<9} offered {:>5.0}G, past ingress {:>5.0}G, recirculated {:>5.0}G, worst pipe {worst:.2}x line",
            a.offered_bps / 1e9,
            a.past_ingress_bps / 1e9,
            a.deflected_bps / 1e9
        );
    }
}
