use std::path::PathBuf;

use orbitkit::format::{load_instance, parse_instance, to_text, Instance, Item, Section, SECTION_KINDS};
use orbitkit::model::{graph_sections, pds_sections, resolve};
use proptest::prelude::*;

fn corpus(dir: &str) -> Vec<PathBuf> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(dir);
    let mut files: Vec<PathBuf> = std::fs::read_dir(root).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
}

fn key() -> impl Strategy<Value = String> {
    prop_oneof![Just("include".to_string()), "[a-z][a-z0-9_'-]{0,6}"]
}

fn value() -> impl Strategy<Value = String> {
    "([a-z0-9@{}^.,()$-]([a-z0-9@{}^.,()$ -]{0,10}[a-z0-9@{}^.,()$-])?)?"
}

fn target() -> impl Strategy<Value = String> {
    "[a-z0-9@{}^.,$-]{1,8}"
}

fn section() -> impl Strategy<Value = Section> {
    let kind = prop::sample::select(SECTION_KINDS.to_vec());
    let args = prop::collection::vec("[a-z0-9_-]{1,6}", 0..3);
    let entries = prop::collection::vec(prop_oneof![(key(), value(), Just(true)), (key(), target(), Just(false))], 0..6);
    (kind, args, entries).prop_map(|(kind, args, entries)| {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        entries.into_iter().fold(Section::new(kind, &args), |s, (k, v, pair)| if pair { s.pair(k, v) } else { s.map(k, v) })
    })
}

fn instance() -> impl Strategy<Value = Instance> {
    let item = prop_oneof![
        4 => section().prop_map(Item::Section),
        1 => "[a-z][a-z0-9_/.]{0,10}".prop_map(|path| Item::Include { line: 0, path }),
    ];
    prop::collection::vec(item, 0..6).prop_map(|items| Instance { items })
}

proptest! {
    #[test]
    fn text_round_trip(inst in instance()) {
        let text = to_text(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(to_text(&back), text);
    }

    #[test]
    fn comments_and_spacing_are_ignored(inst in instance(), pad in "[ \t]{0,3}") {
        let noisy: String = to_text(&inst)
            .lines()
            .map(|l| if l.is_empty() { "# note\n".to_string() } else { format!("{pad}{l}{pad}# trailing\n") })
            .collect();
        prop_assert_eq!(parse_instance(&noisy).unwrap(), inst);
    }
}

#[test]
fn corpus_is_canonical_after_one_pass() {
    for path in corpus("pass").into_iter().chain(corpus("fail")) {
        let inst = load_instance(&path).unwrap();
        let once = to_text(&inst);
        assert_eq!(to_text(&parse_instance(&once).unwrap()), once, "{}", path.display());
    }
}

#[test]
fn written_systems_resolve_to_themselves() {
    let mut checked = 0;
    for path in corpus("pass") {
        let model = resolve(&load_instance(&path).unwrap()).unwrap();
        for s in &model.systems {
            let Ok(sections) = pds_sections(&s.name, &s.value) else { continue };
            let again = resolve(&Instance::from_sections(sections)).unwrap();
            assert_eq!(again.systems[0].value, s.value, "{}", s.name);
            checked += 1;
        }
        for g in &model.graphs {
            let again = resolve(&Instance::from_sections(graph_sections(&g.name, &g.value))).unwrap();
            assert_eq!(again.graphs[0].value, g.value, "{}", g.name);
            checked += 1;
        }
    }
    assert!(checked >= 10);
}

#[test]
fn includes_resolve_relative_to_the_file() {
    let dir = std::env::temp_dir().join(format!("orbitkit-include-{}", std::process::id()));
    std::fs::create_dir_all(dir.join("sub")).unwrap();
    std::fs::write(dir.join("sub/space.inst"), "[space s]\npoints = x0, x1\n").unwrap();
    std::fs::write(dir.join("main.inst"), "include sub/space.inst\n[group]\nkind = cyclic 2\n").unwrap();
    std::fs::write(dir.join("a.inst"), "include b.inst\n").unwrap();
    std::fs::write(dir.join("b.inst"), "include a.inst\n").unwrap();
    let inst = load_instance(&dir.join("main.inst")).unwrap();
    assert_eq!(inst.sections().count(), 2);
    assert!(resolve(&inst).is_ok());
    assert!(load_instance(&dir.join("a.inst")).is_err());
    std::fs::remove_dir_all(&dir).unwrap();
}
