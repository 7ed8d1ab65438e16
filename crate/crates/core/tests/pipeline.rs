use markoff::bigfield::BigPrime;
use markoff::field::PrimeModulus;
use markoff::hash::{digest_decode, digest_encode, hash_bits, BitString, HashParams};
use markoff::lifting::{lift_path_attack, SignJoin};
use markoff::pathfinder::{random_vertex, verify_path, CertificateError, ClimbPolicy, PathCertificate, PathFinder};
use markoff::surface::{GraphKind, MarkoffTriple};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn certificates_survive_json() {
    let p = PrimeModulus::new(499).unwrap();
    let f = PathFinder::new(&p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for graph in [GraphKind::G, GraphKind::GHat] {
        for _ in 0..10 {
            let (x, y) = (random_vertex(&p, &mut rng), random_vertex(&p, &mut rng));
            let c = f.find_path(&x, &y, graph, &ClimbPolicy::default()).unwrap();
            for text in [c.to_json(), c.to_json_pretty()] {
                let back = PathCertificate::from_json(&text).unwrap();
                assert_eq!(back, c);
                assert_eq!(verify_path(&back), Ok(()));
            }
        }
    }
}

#[test]
fn certificate_parser_is_strict() {
    let p = PrimeModulus::new(17).unwrap();
    let c = PathFinder::new(&p)
        .unwrap()
        .find_path(&MarkoffTriple([15, 0, 8]), &MarkoffTriple([12, 5, 8]), GraphKind::G, &ClimbPolicy::greedy())
        .unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
    v["schema_version"] = "1.7".into();
    assert!(PathCertificate::from_json(&v.to_string()).is_ok());
    v["schema_version"] = "2.0".into();
    assert!(matches!(
        PathCertificate::from_json(&v.to_string()),
        Err(CertificateError::UnsupportedVersion(_))
    ));
    v["schema_version"] = "1.0".into();
    v["extra"] = 1.into();
    assert!(matches!(PathCertificate::from_json(&v.to_string()), Err(CertificateError::Malformed(_))));
    v.as_object_mut().unwrap().remove("extra");
    v["moves"][0]["index"] = 4.into();
    assert!(matches!(PathCertificate::from_json(&v.to_string()), Err(CertificateError::Malformed(_))));
}

#[test]
fn lift_attack_certificates_convert_to_rotations() {
    let p = PrimeModulus::new(13).unwrap();
    let join = SignJoin::new(&p).unwrap();
    let f = PathFinder::new(&p).unwrap();
    let x = MarkoffTriple([1, 2, 5]);
    for y in [MarkoffTriple([1, 12, 12]), MarkoffTriple([12, 1, 12]), MarkoffTriple([5, 2, 1])] {
        let c = lift_path_attack(&x, &y, &p, 100, &join).unwrap().unwrap();
        let rotations = f.convert_word(&c).unwrap();
        assert_eq!((rotations.graph, rotations.start, rotations.end), (GraphKind::GHat, x, y));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn digests_decode_to_the_walk_endpoint(bits in proptest::collection::vec(any::<bool>(), 0..200), k in 1u8..=3) {
        let p = PrimeModulus::new(65_537).unwrap();
        let params = HashParams::new(p, k).unwrap();
        let out = hash_bits(&BitString::new(bits), &params);
        let digest = digest_encode(&p, &out.vertex);
        prop_assert_eq!(digest_decode(&p, &digest).unwrap(), out.vertex);
    }

    #[test]
    fn word_and_big_fields_agree(bits in proptest::collection::vec(any::<bool>(), 0..200), k in 1u8..=3) {
        let small = PrimeModulus::new(1_000_003).unwrap();
        let big = BigPrime::new(BigUint::from(1_000_003u32)).unwrap();
        let bits = BitString::new(bits);
        let a = hash_bits(&bits, &HashParams::new(small, k).unwrap());
        let b = hash_bits(&bits, &HashParams::new(big.clone(), k).unwrap());
        prop_assert_eq!(&a.labels, &b.labels);
        prop_assert_eq!(digest_encode(&small, &a.vertex), digest_encode(&big, &b.vertex));
    }
}
