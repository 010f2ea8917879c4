//! Fuzzes the binary SVM model parser. Accepted models must be usable for
//! prediction and must round-trip bit-exactly.

#![no_main]

use laserdet::svm::SvmModel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(model) = SvmModel::from_bytes(data) {
        assert!(model.dim > 0);
        assert!(!model.support_vectors.is_empty());

        let query = vec![0.0; model.dim];
        let (label, score) = model.predict(&query).expect("prediction on zeros");
        assert!(label == 1 || label == -1);
        assert!(score.is_finite());

        let bytes = model.to_bytes().expect("accepted model serializes");
        let again = SvmModel::from_bytes(&bytes).expect("serializer output parses");
        let (label2, score2) = again.predict(&query).unwrap();
        assert_eq!(label, label2);
        assert_eq!(score.to_bits(), score2.to_bits());
    }
});
