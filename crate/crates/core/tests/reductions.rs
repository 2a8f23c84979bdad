use cspdich::algebra::library::{nand, neq};
use cspdich::algebra::num::ratio;
use cspdich::algebra::{Instance, Signature, Weight};
use cspdich::gen;
use cspdich::reduce::{simulate_hmax, two_simulate_equality, Relation};

#[test]
fn equality_triple_on_random_instances() {
    let r4 = Signature::relation_from_bitstrings(3, &["000", "111"]).unwrap();
    let mut rng = gen::rng(99);
    for _ in 0..100 {
        let family = [gen::random_signature(&mut rng, 2, 0.3), gen::random_signature(&mut rng, 3, 0.3)];
        let inst = gen::random_instance(&mut rng, &family, 6, 5, 5);
        let cert = two_simulate_equality(&inst, &r4).unwrap();
        assert!(cert.output.max_degree() <= 2);
        assert_eq!(cert.relation, Relation::Equal);
        assert!(cert.verify(&inst).unwrap());
    }
}

#[test]
fn neq_from_nand_by_hamming_weight() {
    let mut b = Instance::builder();
    b.signature("NEQ", neq());
    b.var("x", Weight::unit());
    b.var("y", Weight::unit());
    b.atom("NEQ", &["x", "y"]).unwrap();
    let inst = b.build().unwrap();
    let cert = simulate_hmax(&inst, "NEQ", &nand(), &[1, 1], &ratio(1, 10)).unwrap();
    assert_eq!(cert.relation.kind(), "approximate-with-threshold");
    assert!(cert.verify(&inst).unwrap());
}
