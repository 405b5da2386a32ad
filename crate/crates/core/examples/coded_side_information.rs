//! κ for an instance whose receivers hold linear combinations of messages,
//! and a check that its optimal encoder decodes.

use icbound::field::FieldSpec;
use icbound::instance::IccsiInstance;
use icbound::matrix::FqMatrix;
use icbound::minrank::{default_budget, kappa};

fn main() {
    let f = FieldSpec::prime(2).unwrap();
    // receiver 1 knows X1 + X2 and wants X1, receiver 2 knows nothing and wants X2
    let inst = IccsiInstance::new(
        f.clone(),
        1,
        FqMatrix::identity(&f, 2),
        vec![FqMatrix::from_rows(&f, 2, &[vec![1, 1]]), FqMatrix::zeros(&f, 0, 2)],
        FqMatrix::identity(&f, 2),
    )
    .unwrap();

    let k = kappa(&inst, default_budget()).unwrap();
    println!("kappa = {}", k.value);
    println!("A + R = {:?}", k.certificate.row_vecs());
    let validity = inst.validate_code(&k.encoder).unwrap();
    println!("encoder {:?} decodes for every receiver: {}", k.encoder.row_vecs(), validity.is_valid());
}
