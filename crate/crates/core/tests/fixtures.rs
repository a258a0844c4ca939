use pirarray::code::{load_code, load_code_document, save_code, save_code_document};
use pirarray::constructions::construction1;
use pirarray::verifier::{check_certificate, load_certificate, save_certificate, ViolationKind};
use pirarray::{example_7x4, Error};

const CODE: &[u8] = include_bytes!("../fixtures/paper_example_7x4.json");
const CERT: &[u8] = include_bytes!("../fixtures/paper_example_7x4.cert.json");

#[test]
fn bundled_code_round_trips_byte_for_byte() {
    let code = load_code(CODE).unwrap();
    assert_eq!(code, example_7x4());
    assert_eq!(save_code(&code), CODE);
}

#[test]
fn bundled_certificate_checks() {
    let code = load_code(CODE).unwrap();
    let cert = load_certificate(CERT).unwrap();
    assert_eq!(cert.claimed_k, 3);
    assert!(check_certificate(&code, &cert).is_ok());
    assert_eq!(save_certificate(&cert), CERT);
    // the two recoveries spelled out for the example
    assert!(cert.parts[4].contains(&vec![2, 3]));
    assert!(cert.parts[10].contains(&vec![0, 3]));
}

#[test]
fn mutated_certificate_is_located() {
    let code = load_code(CODE).unwrap();
    let mut cert = load_certificate(CERT).unwrap();
    cert.parts[4][2] = vec![3];
    let v = check_certificate(&code, &cert).unwrap_err();
    assert_eq!(v.part, Some(4));
    assert_eq!(v.set_index, Some(2));
    assert_eq!(v.kind, ViolationKind::NonSpanning);
}

#[test]
fn family_metadata_survives() {
    let out = construction1(2, 1).unwrap();
    let family = out.family.to_value();
    let bytes = save_code_document(&out.code, Some(&family));
    let doc = load_code_document(&bytes).unwrap();
    assert_eq!(doc.code, out.code);
    assert_eq!(doc.family, Some(family));
    assert_eq!(save_code_document(&doc.code, doc.family.as_ref()), bytes);
}

#[test]
fn corrupted_files_are_rejected() {
    let text = String::from_utf8(CODE.to_vec()).unwrap();
    assert!(matches!(load_code(text.replace("\"m\": 4", "\"m\": 5").as_bytes()), Err(Error::InvalidCode(_))));
    assert!(load_code(text.replace("[10, 11, 12]", "[10, 11, 13]").as_bytes()).is_err());
    assert!(load_code(&CODE[..CODE.len() / 2]).is_err());
    assert!(load_certificate(b"{\"claimed_k\": 1}").is_err());
}
