use num_complex::Complex64;
use skewgreen_core::algebra::{Poly1, Poly2, SkewProduct};
use skewgreen_core::coeff::ExactComplex as EC;
use skewgreen_core::escape::certified_region;
use skewgreen_core::green::green_g;
use skewgreen_core::weights::analyze;
use rand::{Rng, SeedableRng};

fn main() {
    let f = SkewProduct::new(
        Poly1::monomial(2, EC::from_int(1)),
        Poly2::monomial(1, 2, EC::from_int(1)),
    )
    .unwrap()
    .to_float();
    let spec = analyze(&f);
    let region = certified_region(&f, &spec).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    for i in 0..100 {
        let z = Complex64::from_polar(rng.gen_range(0.1..10.0), rng.gen_range(-3.1..3.1));
        let w = Complex64::from_polar(rng.gen_range(0.1..1000.0), rng.gen_range(-3.1..3.1));
        let expect = w.norm().ln();
        let g = green_g(&f, &region, z, w, 1e-9, 2000).unwrap();
        if g.error_bound > 1e-9 || (g.value.to_f64() - expect).abs() > g.error_bound + 1e-9 {
            println!("i={i} z={z} w={w} |z|={} |w|={} expect={expect} got={:?}", z.norm(), w.norm(), g);
        }
    }
}
