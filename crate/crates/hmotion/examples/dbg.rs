use hmotion::numkit::*;
use hmotion::weyl::*;

fn main() {
    let lambda = 1.0;
    let basis = Basis::hermite(1, 8);
    for (j, k, jp, kp) in [(2usize, 3usize, 3usize, 2usize), (1, 1, 2, 2), (8, 8, 8, 8)] {
        let a = DenseMatrix::unit(basis.clone(), j, k);
        let b = DenseMatrix::unit(basis.clone(), jp, kp);
        let fa = wigner_dequantize(&a, lambda, 12);
        let fb = wigner_dequantize(&b, lambda, 12);
        for order in [24usize, 48, 64] {
            let v = wigner_pairing(&fa, &fb, order, false).unwrap();
            let trace = if k == jp && j == kp { 1.0 } else { 0.0 };
            println!("({j},{k})x({jp},{kp}) order {order}: err {:.3e}", (v - hmotion::C64::new(trace, 0.0)).norm());
        }
    }
}
