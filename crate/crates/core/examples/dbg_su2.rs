use cwt_core::algebra::{Factor, MatrixLieAlgebra, OrbitSample};
use cwt_core::constructor::*;

fn main() {
    let algebra = MatrixLieAlgebra::new(&[Factor::Su(2), Factor::Abelian]).unwrap();
    let (a, b, r, s, l) = (0.1, 0.2, 1.0, 0.7, 2.0);
    let (u1, u2) = su2_circle_units(&algebra).unwrap();
    let x = &u1 * r + &u2 * s;
    let v = &u1 * a + &u2 * b;
    let ansatz = AnsatzBasis::su2_circle(&algebra).unwrap();
    let assembly = OrbitSample::generate(&algebra, &x, 24, 17).unwrap();
    let problem = ConstructionProblem::new(&algebra, x.clone(), v, l, ansatz, assembly.points.clone()).unwrap();
    let (m, rhs) = build_constraint_system(&algebra, &problem).unwrap();

    let svd = m.clone().svd(true, true);
    println!("singular values: {:?}", svd.singular_values.as_slice());
    let rec = svd.u.as_ref().unwrap()
        * nalgebra::DMatrix::from_diagonal(&svd.singular_values)
        * svd.v_t.as_ref().unwrap();
    println!("reconstruction error: {:e}", (&rec - &m).norm());
    let sol = svd.solve(&rhs, 1e-10 * svd.singular_values.max()).unwrap();
    println!("lsq residual of svd solution: {:e}", (&m * &sol - &rhs).abs().max());
    // orthogonality of U and V
    let u = svd.u.as_ref().unwrap();
    println!("U'U-I: {:e}", (u.transpose()*u - nalgebra::DMatrix::identity(4,4)).norm());
    let vt = svd.v_t.as_ref().unwrap();
    println!("VV'-I: {:e}", (vt.transpose()*vt - nalgebra::DMatrix::identity(4,4)).norm());
}
