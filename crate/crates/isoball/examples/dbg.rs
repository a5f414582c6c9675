use isoball::lens::*;
fn main() {
    let eps = 0.4999996170069232f64;
    for n in [2u32, 10] {
        // replicate the bisection manually
        let r = isoball::unit_volume_radius(n).unwrap();
        let vol = |lr: f64| LensShape::from_rho(n, lr.exp()).unwrap().volume();
        let mut lo = r.ln();
        while vol(lo) > eps { lo -= 2.0; }
        let mut hi = r.ln();
        while vol(hi) < eps { hi += 2.0; }
        println!("n={n} bracket [{lo:.3}, {hi:.3}] vol(lo)={} vol(hi)={}", vol(lo), vol(hi));
        for it in 0..200 {
            let mid = 0.5*(lo+hi);
            let v = vol(mid);
            if (v-eps).abs() <= 1e-12 { println!("  converged at iter {it}: rho={} v={v}", mid.exp()); break; }
            if v < eps { lo = mid; } else { hi = mid; }
            if it > 45 && it < 60 { println!("  it {it}: mid={mid:.17} v={v:.17} v-eps={:.3e}", v-eps); }
            if it == 199 { println!("  FAILED: v={v:.17} v-eps={:.3e} rho={}", v-eps, mid.exp()); }
        }
    }
}
