use gicb_core::channel::*;
use gicb_core::region::*;
use gicb_core::two_user::*;
fn main() {
    let net = InterferenceNetwork::two_user(0.1, 19.378068217443317, 0.09765226700360513, 0.0).unwrap();
    for (l1, l2) in [(0.0, 1.0), (1.0, 0.0), (0.0, 0.0)] {
        let hps = hk_split_halfplanes(&net, l1, l2).unwrap();
        for h in &hps { println!("{} {}", h.name, h.c); }
        println!("max {}", halfplane_max_weighted(&hps, 1.0, 1.0));
    }
}
