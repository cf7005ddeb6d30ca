use std::path::Path;

use epscan_core::corpus;
use epscan_core::semantics::parse_structure;

#[test]
fn committed_corpus_matches_the_builders() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    for (name, contents) in corpus::files() {
        let on_disk = std::fs::read_to_string(dir.join(&name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(on_disk, contents, "{name} is stale; regenerate the corpus");
    }
}

#[test]
fn corpus_files_parse_back_to_the_same_structures() {
    for e in corpus::entries() {
        let text = epscan_core::semantics::write_structure(&e.structure);
        let back = parse_structure(&text).unwrap();
        assert_eq!(epscan_core::semantics::write_structure(&back), text, "{}", e.name);
    }
}
