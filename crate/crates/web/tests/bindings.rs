//! The JSON entry points behind the demo page, exercised natively.

use semiadv_web::{region_json, trace_json, witness_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn region_grid_matches_known_corners() {
    let v = parse(region_json("IRS", 64, 16, 4, 1).unwrap());
    assert_eq!(v["max_radius"], 38);
    assert_eq!(v["cells"][38][10], true);
    assert_eq!(v["cells"][38][11], false);
    assert_eq!(v["cells"][24][24], true);
    assert_eq!(v["cells"][39][0], false);
    assert!(region_json("FRS", 32, 20, 8, 9).is_err());
    assert!(region_json("XYZ", 8, 2, 1, 1).is_err());
}

#[test]
fn trace_decodes_inside_the_region() {
    let v = parse(trace_json("IRS", 32, 8, 257, 3, 1, 4, 12, "singleComponent", 5).unwrap());
    assert_eq!(v["in_region"], true);
    assert_eq!(v["distance"], 12);
    assert_eq!(v["outcome"], "success");
    assert_eq!(v["correct"], true);
    assert_eq!(v["adversarial"].as_array().unwrap().len(), 4);
    assert!(trace_json("RS", 8, 2, 13, 1, 1, 5, 4, "burst", 0).is_err());
    assert!(trace_json("RS", 8, 2, 13, 1, 1, 0, 2, "nobody", 0).is_err());
}

#[test]
fn witness_ball_holds_every_codeword() {
    let v = parse(witness_json(12, 4, 17, 2, 6, 6).unwrap());
    assert_eq!(v["verified"], true);
    assert!(v["ball_size"].as_u64().unwrap() >= 3);
    assert!(witness_json(40, 4, 17, 2, 6, 6).is_err());
}
