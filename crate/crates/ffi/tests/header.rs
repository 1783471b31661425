use std::fs;
use std::path::Path;

#[test]
fn header_declares_every_export() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = fs::read_to_string(dir.join("include/mv2.h")).unwrap();
    let source = fs::read_to_string(dir.join("src/lib.rs")).unwrap();

    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15, "{exports:?}");
    for name in exports {
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
    for ty in [
        "Mv2Status",
        "Mv2Params",
        "Mv2Buffer",
        "Mv2ContainerInfo",
        "Mv2Codebook",
        "Mv2Container",
    ] {
        assert!(
            header.contains(&format!("typedef struct {ty}"))
                || header.contains(&format!("typedef enum {ty}")),
            "{ty}"
        );
    }
    assert!(header.contains("MV2_STATUS_CHECKSUM_MISMATCH = 7"));
    assert!(header.contains("#ifndef MV2_H"));
}
