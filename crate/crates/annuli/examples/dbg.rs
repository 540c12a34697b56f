fn main() {
    use annuli::fields::ScalarField;
    use annuli::maximal::radial_annulus_average;
    let f = ScalarField::counterexample(2).unwrap();
    let kind = f.as_radial().unwrap();
    for expo in [-14i32, -16] {
        let delta = 10f64.powi(expo);
        let v = radial_annulus_average(kind, 2, 1.5, 1.5, delta).unwrap();
        println!("delta=1e{expo}: m*R={:.6}", v * 1.5);
    }
    let reg = annuli::maximal::growth_regression(2, 1.5, &[1e-2, 1e-4, 1e-8, 1e-16], 8).unwrap();
    println!("slope={:.4} r2={:.6}", reg.slope, reg.r_squared);
}
