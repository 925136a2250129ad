use std::io::Write;

use serde_json::json;
use scratch_creativity::align::LabeledTree;
use scratch_creativity::measures::MeasureConfig;
use scratch_creativity::scratch::{
    code_creativity, code_project_distance, parse_sb3, parse_sb3_bytes, ParseOptions, ProjectSummary, Sb3Project,
};
use scratch_creativity::synth::{md5_hex, synthetic_project, ProjectBuilder, Script};
use scratch_creativity::Error;

fn archive(manifest: &serde_json::Value, members: &[(&str, &[u8])]) -> Vec<u8> {
    let mut zip = zip::ZipWriter::new(std::io::Cursor::new(Vec::new()));
    let opts = zip::write::SimpleFileOptions::default();
    zip.start_file("project.json", opts).unwrap();
    zip.write_all(manifest.to_string().as_bytes()).unwrap();
    for (name, bytes) in members {
        zip.start_file(*name, opts).unwrap();
        zip.write_all(bytes).unwrap();
    }
    zip.finish().unwrap().into_inner()
}

fn stage(blocks: serde_json::Value) -> serde_json::Value {
    json!({"isStage": true, "name": "Stage", "blocks": blocks, "costumes": [], "sounds": []})
}

fn parse(bytes: Vec<u8>) -> scratch_creativity::Result<Sb3Project> {
    parse_sb3_bytes("fixture", bytes, &ParseOptions::default())
}

fn labels(t: &LabeledTree) -> Vec<String> {
    t.labels().into_iter().map(|c| c.id.clone()).collect()
}

#[test]
fn hand_written_manifest() {
    let png = b"\x89PNG not really";
    let digest = md5_hex(png);
    let manifest = json!({
        "targets": [
            stage(json!({})),
            {
                "isStage": false,
                "name": "Cat",
                "blocks": {
                    "a": {"opcode": "event_whenflagclicked", "next": "b", "parent": null, "inputs": {}, "fields": {}, "shadow": false, "topLevel": true, "x": 0, "y": 0},
                    "b": {"opcode": "motion_movesteps", "next": "d", "parent": "a", "inputs": {"STEPS": [1, "c"]}, "fields": {}, "shadow": false, "topLevel": false},
                    "c": {"opcode": "math_number", "next": null, "parent": "b", "inputs": {}, "fields": {"NUM": ["10", null]}, "shadow": true, "topLevel": false},
                    "d": {"opcode": "looks_sayforsecs", "next": null, "parent": "b", "inputs": {"MESSAGE": [3, [12, "score", "v1"], [10, "hi"]], "SECS": [1, [4, "2"]]}, "fields": {}, "shadow": false, "topLevel": false},
                    "e": {"opcode": "pen_clear", "next": null, "parent": null, "inputs": {}, "fields": {}, "shadow": false, "topLevel": true, "x": 5, "y": 5}
                },
                "costumes": [{"assetId": digest, "md5ext": format!("{digest}.png"), "dataFormat": "png", "name": "c1"}],
                "sounds": []
            }
        ],
        "meta": {"semver": "3.0.0"}
    });
    let p = parse(archive(&manifest, &[(&format!("{digest}.png"), png)])).unwrap();
    assert_eq!(p.sprites.len(), 1);
    assert_eq!(p.images.len(), 1);
    assert_eq!(p.images[0].digest, digest);
    let scripts = &p.sprites[0].scripts;
    assert_eq!(scripts.len(), 2);
    // shadow literals are dropped, the inline variable stays as a leaf, and
    // `next` comes after the inputs
    assert_eq!(
        labels(&scripts[0]),
        ["event_whenflagclicked", "motion_movesteps", "looks_sayforsecs", "data_variable"]
    );
    assert_eq!(labels(&scripts[1]), ["pen_clear"]);
    assert_eq!(p.block_count(), 5);

    let with_shadow = parse_sb3_bytes(
        "fixture",
        archive(&manifest, &[(&format!("{digest}.png"), png)]),
        &ParseOptions {
            include_shadow: true,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(with_shadow.block_count(), 6);
}

#[test]
fn manifest_errors() {
    let no_manifest = {
        let mut zip = zip::ZipWriter::new(std::io::Cursor::new(Vec::new()));
        zip.start_file("other.txt", zip::write::SimpleFileOptions::default()).unwrap();
        zip.finish().unwrap().into_inner()
    };
    assert!(matches!(parse(no_manifest), Err(Error::MissingManifest(_))));

    let two_stages = json!({"targets": [stage(json!({})), stage(json!({}))]});
    assert!(parse(archive(&two_stages, &[])).is_err());

    let missing_asset = json!({"targets": [{
        "isStage": true, "name": "Stage", "blocks": {},
        "costumes": [{"assetId": "abcd", "md5ext": "abcd.png", "dataFormat": "png", "name": "x"}],
        "sounds": []
    }]});
    assert!(matches!(parse(archive(&missing_asset, &[])), Err(Error::UnknownAsset(_))));

    let bad_parent = json!({"targets": [stage(json!({
        "a": {"opcode": "event_whenflagclicked", "next": "b", "parent": null, "inputs": {}, "fields": {}, "shadow": false, "topLevel": true},
        "b": {"opcode": "looks_show", "next": null, "parent": "zzz", "inputs": {}, "fields": {}, "shadow": false, "topLevel": false}
    }))]});
    assert!(matches!(parse(archive(&bad_parent, &[])), Err(Error::MalformedBlocks { .. })));

    let dangling = json!({"targets": [stage(json!({
        "a": {"opcode": "event_whenflagclicked", "next": "nope", "parent": null, "inputs": {}, "fields": {}, "shadow": false, "topLevel": true}
    }))]});
    assert!(matches!(parse(archive(&dangling, &[])), Err(Error::MalformedBlocks { .. })));
}

#[test]
fn builder_round_trip_keeps_trees_and_assets() {
    for seed in 0..6 {
        let bytes = synthetic_project(seed, seed as usize + 3).to_bytes().unwrap();
        let p = parse(bytes).unwrap();
        let again = parse(ProjectBuilder::from_project(&p).unwrap().to_bytes().unwrap()).unwrap();
        assert_eq!(again.stage.scripts, p.stage.scripts);
        assert_eq!(again.sprites.len(), p.sprites.len());
        for (a, b) in again.sprites.iter().zip(&p.sprites) {
            assert_eq!(a.scripts, b.scripts);
        }
        let digests = |q: &Sb3Project| {
            let mut d: Vec<String> = q.images.iter().chain(&q.sounds).map(|a| a.digest.clone()).collect();
            d.sort();
            d
        };
        assert_eq!(digests(&again), digests(&p));
        assert_eq!(code_project_distance(&p, &again, &MeasureConfig::code()).unwrap(), 0.0);
    }
}

fn one_sprite(opcodes: &[&str]) -> Sb3Project {
    let mut b = ProjectBuilder::new();
    b.sprite("S").script(Script::stack(opcodes.iter().copied()));
    parse(b.to_bytes().unwrap()).unwrap()
}

#[test]
fn code_distance_fixtures() {
    let cfg = MeasureConfig::code();
    let p = one_sprite(&["event_whenflagclicked", "motion_movesteps", "looks_show"]);
    let q = one_sprite(&["event_whenflagclicked", "motion_movesteps"]);
    assert_eq!(code_project_distance(&p, &p, &cfg).unwrap(), 0.0);
    assert_eq!(code_project_distance(&p, &q, &cfg).unwrap(), 9.0);
    assert_eq!(code_project_distance(&q, &p, &cfg).unwrap(), 9.0);

    let empty = parse(ProjectBuilder::new().to_bytes().unwrap()).unwrap();
    assert_eq!(code_project_distance(&p, &empty, &cfg).unwrap(), 27.0);

    // two sprites, matched crosswise
    let mut b = ProjectBuilder::new();
    b.sprite("A").script(Script::stack(["event_whenflagclicked", "looks_show"]));
    b.sprite("B").script(Script::stack(["event_whenflagclicked", "motion_movesteps"]));
    let ab = parse(b.to_bytes().unwrap()).unwrap();
    let mut b = ProjectBuilder::new();
    b.sprite("B").script(Script::stack(["event_whenflagclicked", "motion_movesteps"]));
    b.sprite("A").script(Script::stack(["event_whenflagclicked", "looks_show"]));
    let ba = parse(b.to_bytes().unwrap()).unwrap();
    assert_eq!(code_project_distance(&ab, &ba, &cfg).unwrap(), 0.0);

    let s = code_creativity(&p, &[&p], &cfg).unwrap();
    assert_eq!(s.fluency, 27.0);
    assert_eq!(s.originality, Some(0.0));
}

#[test]
fn written_file_parses_with_stem_as_name() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("demo.sb3");
    synthetic_project(1, 4).write(&path).unwrap();
    let p = parse_sb3(&path).unwrap();
    assert_eq!(p.name, "demo");
    assert_eq!(p.path(), Some(path.as_path()));
    let text = ProjectSummary::of(&p).to_text();
    assert!(text.starts_with("project demo"));
}

#[test]
fn vector_costume_needs_a_sidecar() {
    use scratch_creativity::media::FeatureStore;
    let mut b = ProjectBuilder::new();
    b.sprite("S").costume_bytes("c", "svg", b"<svg xmlns=\"http://www.w3.org/2000/svg\"/>".to_vec());
    let p = parse(b.to_bytes().unwrap()).unwrap();
    let err = FeatureStore::baseline().project_features(&p).unwrap_err();
    assert!(matches!(&err, Error::Decode { digest, .. } if *digest == p.images[0].digest), "{err}");
    assert!(err.to_string().contains("sidecar"));
}
