//! Builders for `.sb3` archives: hand-made fixtures, re-emission of parsed
//! projects, and a seeded synthetic corpus.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Cursor, Write};
use std::path::{Path, PathBuf};

use image::{ImageFormat, Rgb, RgbImage};
use md5::{Digest, Md5};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use zip::write::SimpleFileOptions;
use zip::ZipWriter;

use crate::align::LabeledTree;
use crate::error::{Error, Result};
use crate::scratch::{AssetKind, BlockConcept, Sb3Project};

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    /// A reporter or a substack; a substack is a block with a `next` chain.
    Block(Block),
    Number(f64),
    Text(String),
    /// Dropdown stored as a shadow block.
    Menu {
        opcode: String,
        field: String,
        value: String,
    },
    Variable(String),
    List(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub opcode: String,
    pub proccode: Option<String>,
    pub inputs: Vec<(String, Input)>,
    pub next: Option<Box<Block>>,
}

impl Block {
    pub fn new(opcode: &str) -> Self {
        Self {
            opcode: opcode.to_string(),
            proccode: None,
            inputs: Vec::new(),
            next: None,
        }
    }

    pub fn call(proccode: &str) -> Self {
        Self {
            proccode: Some(proccode.to_string()),
            ..Self::new("procedures_call")
        }
    }

    /// `define <proccode>` hat; the prototype is stored as a shadow input.
    pub fn define(proccode: &str) -> Self {
        Self {
            proccode: Some(proccode.to_string()),
            ..Self::new("procedures_definition")
        }
    }

    pub fn input(mut self, name: &str, input: Input) -> Self {
        self.inputs.push((name.to_string(), input));
        self
    }

    pub fn substack(self, name: &str, body: Script) -> Self {
        self.input(name, Input::Block(body.0))
    }

    /// Appends `next` at the end of this block's `next` chain.
    pub fn then(mut self, next: Block) -> Self {
        let mut tail = &mut self;
        while tail.next.is_some() {
            tail = tail.next.as_mut().unwrap();
        }
        tail.next = Some(Box::new(next));
        self
    }
}

/// A top-level block stack.
#[derive(Debug, Clone, PartialEq)]
pub struct Script(pub Block);

impl Script {
    /// A plain stack of blocks linked by `next`.
    pub fn stack<'a>(opcodes: impl IntoIterator<Item = &'a str>) -> Self {
        let blocks: Vec<Block> = opcodes.into_iter().map(Block::new).collect();
        Self::chain(blocks).expect("stack needs at least one block")
    }

    pub fn chain(blocks: impl IntoIterator<Item = Block>) -> Option<Self> {
        let mut blocks: Vec<Block> = blocks.into_iter().collect();
        let mut tail = blocks.pop()?;
        while let Some(mut b) = blocks.pop() {
            b.next = Some(Box::new(tail));
            tail = b;
        }
        Some(Self(tail))
    }

    /// Emits a parsed syntax tree with every child as an input, so that
    /// parsing the result reproduces the tree exactly.
    pub fn from_tree(tree: &LabeledTree) -> Result<Self> {
        Ok(Self(tree_block(tree)?))
    }
}

fn tree_block(tree: &LabeledTree) -> Result<Block> {
    let concept = BlockConcept::from_concept(&tree.label)?;
    let mut block = Block {
        opcode: concept.opcode,
        proccode: concept.proccode,
        inputs: Vec::new(),
        next: None,
    };
    for (i, child) in tree.children.iter().enumerate() {
        block.inputs.push((format!("C{i}"), Input::Block(tree_block(child)?)));
    }
    Ok(block)
}

#[derive(Debug, Clone)]
struct Asset {
    name: String,
    digest: String,
    ext: String,
    bytes: Vec<u8>,
    rate: Option<u32>,
    sample_count: Option<u32>,
}

#[derive(Debug, Clone, Default)]
pub struct TargetBuilder {
    name: String,
    scripts: Vec<Script>,
    costumes: Vec<Asset>,
    sounds: Vec<Asset>,
}

pub fn md5_hex(bytes: &[u8]) -> String {
    format!("{:x}", Md5::digest(bytes))
}

impl TargetBuilder {
    pub fn script(&mut self, script: Script) -> &mut Self {
        self.scripts.push(script);
        self
    }

    /// Adds a costume from encoded image bytes (`ext` is the file
    /// extension, e.g. `png` or `svg`).
    pub fn costume_bytes(&mut self, name: &str, ext: &str, bytes: Vec<u8>) -> &mut Self {
        self.costumes.push(Asset {
            name: name.to_string(),
            digest: md5_hex(&bytes),
            ext: ext.to_string(),
            bytes,
            rate: None,
            sample_count: None,
        });
        self
    }

    pub fn costume_png(&mut self, name: &str, img: &RgbImage) -> &mut Self {
        let mut buf = Cursor::new(Vec::new());
        img.write_to(&mut buf, ImageFormat::Png)
            .expect("png encoding to memory cannot fail");
        self.costume_bytes(name, "png", buf.into_inner())
    }

    /// Adds a 16-bit mono WAV sound from samples in `[-1, 1]`.
    pub fn sound_wav(&mut self, name: &str, rate: u32, samples: &[f32]) -> &mut Self {
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: rate,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut buf = Cursor::new(Vec::new());
        {
            let mut w = hound::WavWriter::new(&mut buf, spec).expect("wav header");
            for &s in samples {
                w.write_sample((s.clamp(-1.0, 1.0) * i16::MAX as f32) as i16)
                    .expect("wav sample");
            }
            w.finalize().expect("wav finalize");
        }
        self.sound_bytes(name, "wav", buf.into_inner(), rate, samples.len() as u32)
    }

    pub fn sound_bytes(
        &mut self,
        name: &str,
        ext: &str,
        bytes: Vec<u8>,
        rate: u32,
        sample_count: u32,
    ) -> &mut Self {
        self.sounds.push(Asset {
            name: name.to_string(),
            digest: md5_hex(&bytes),
            ext: ext.to_string(),
            bytes,
            rate: Some(rate),
            sample_count: Some(sample_count),
        });
        self
    }
}

/// Assembles `project.json` and assets into an `.sb3` archive.
#[derive(Debug, Clone)]
pub struct ProjectBuilder {
    stage: TargetBuilder,
    sprites: Vec<TargetBuilder>,
}

impl Default for ProjectBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl ProjectBuilder {
    pub fn new() -> Self {
        Self {
            stage: TargetBuilder {
                name: "Stage".into(),
                ..Default::default()
            },
            sprites: Vec::new(),
        }
    }

    pub fn stage(&mut self) -> &mut TargetBuilder {
        &mut self.stage
    }

    pub fn sprite(&mut self, name: &str) -> &mut TargetBuilder {
        self.sprites.push(TargetBuilder {
            name: name.to_string(),
            ..Default::default()
        });
        self.sprites.last_mut().unwrap()
    }

    /// Rebuilds a parsed project, copying its assets.
    pub fn from_project(p: &Sb3Project) -> Result<Self> {
        let mut b = Self::new();
        let copy = |t: &mut TargetBuilder, code: &crate::scratch::SpriteCode| -> Result<()> {
            for s in &code.scripts {
                t.script(Script::from_tree(s)?);
            }
            Ok(())
        };
        copy(&mut b.stage, &p.stage)?;
        for s in &p.sprites {
            let t = b.sprite(&s.name);
            copy(t, s)?;
        }
        // assets go to the stage; target membership is not kept by parsing
        for a in p.images.iter().chain(&p.sounds) {
            let bytes = p.read_asset(a)?;
            let ext = a.extension().to_string();
            let asset = Asset {
                name: a.digest.clone(),
                digest: a.digest.clone(),
                ext,
                bytes,
                rate: a.sample_rate,
                sample_count: None,
            };
            match a.kind {
                AssetKind::Image => b.stage.costumes.push(asset),
                AssetKind::Sound => b.stage.sounds.push(asset),
            }
        }
        Ok(b)
    }

    pub fn to_json(&self) -> Value {
        let mut targets = vec![target_json(&self.stage, true, 0)];
        for (i, s) in self.sprites.iter().enumerate() {
            targets.push(target_json(s, false, i + 1));
        }
        json!({
            "targets": targets,
            "monitors": [],
            "extensions": [],
            "meta": {"semver": "3.0.0", "vm": "0.2.0", "agent": "scratch-creativity"}
        })
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Cursor::new(Vec::new());
        {
            let mut zip = ZipWriter::new(&mut buf);
            let opts = SimpleFileOptions::default()
                .compression_method(zip::CompressionMethod::Deflated)
                .last_modified_time(zip::DateTime::default());
            zip.start_file("project.json", opts)?;
            zip.write_all(serde_json::to_string(&self.to_json())?.as_bytes())?;
            let mut files = BTreeMap::new();
            for t in std::iter::once(&self.stage).chain(&self.sprites) {
                for a in t.costumes.iter().chain(&t.sounds) {
                    files.insert(format!("{}.{}", a.digest, a.ext), &a.bytes);
                }
            }
            for (name, bytes) in files {
                zip.start_file(name, opts)?;
                zip.write_all(bytes)?;
            }
            zip.finish()?;
        }
        Ok(buf.into_inner())
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_bytes()?)?;
        Ok(())
    }
}

struct Emitter {
    prefix: String,
    counter: usize,
    blocks: Map<String, Value>,
}

impl Emitter {
    fn fresh(&mut self) -> String {
        self.counter += 1;
        format!("{}b{}", self.prefix, self.counter)
    }

    fn emit(&mut self, block: &Block, parent: Option<&str>, top: Option<(i64, i64)>) -> String {
        let id = self.fresh();
        let mut inputs = Map::new();
        if block.opcode == "procedures_definition" {
            if let Some(p) = &block.proccode {
                let proto = self.fresh();
                self.blocks.insert(
                    proto.clone(),
                    json!({
                        "opcode": "procedures_prototype", "next": null, "parent": id,
                        "inputs": {}, "fields": {}, "shadow": true, "topLevel": false,
                        "mutation": mutation(p),
                    }),
                );
                inputs.insert("custom_block".into(), json!([1, proto]));
            }
        }
        for (name, input) in &block.inputs {
            let value = match input {
                Input::Block(b) => json!([2, self.emit(b, Some(&id), None)]),
                Input::Number(n) => json!([1, [4, n.to_string()]]),
                Input::Text(s) => json!([1, [10, s]]),
                Input::Menu {
                    opcode,
                    field,
                    value,
                } => {
                    let menu = self.fresh();
                    self.blocks.insert(
                        menu.clone(),
                        json!({
                            "opcode": opcode, "next": null, "parent": id, "inputs": {},
                            "fields": {field.as_str(): [value, null]},
                            "shadow": true, "topLevel": false,
                        }),
                    );
                    json!([1, menu])
                }
                Input::Variable(v) => json!([3, [12, v, format!("var-{v}")], [10, ""]]),
                Input::List(v) => json!([3, [13, v, format!("list-{v}")], [10, ""]]),
            };
            inputs.insert(name.clone(), value);
        }
        let next = block
            .next
            .as_ref()
            .map(|n| Value::String(self.emit(n, Some(&id), None)))
            .unwrap_or(Value::Null);
        let mut obj = json!({
            "opcode": block.opcode,
            "next": next,
            "parent": parent,
            "inputs": inputs,
            "fields": {},
            "shadow": false,
            "topLevel": top.is_some(),
        });
        if let Some((x, y)) = top {
            obj["x"] = json!(x);
            obj["y"] = json!(y);
        }
        if block.opcode != "procedures_definition" {
            if let Some(p) = &block.proccode {
                obj["mutation"] = mutation(p);
            }
        }
        self.blocks.insert(id.clone(), obj);
        id
    }
}

fn mutation(proccode: &str) -> Value {
    json!({"tagName": "mutation", "children": [], "proccode": proccode, "argumentids": "[]", "warp": "false"})
}

fn target_json(t: &TargetBuilder, is_stage: bool, index: usize) -> Value {
    let mut em = Emitter {
        prefix: format!("t{index}"),
        counter: 0,
        blocks: Map::new(),
    };
    for (i, s) in t.scripts.iter().enumerate() {
        em.emit(&s.0, None, Some((0, 100 * i as i64)));
    }
    let costumes: Vec<Value> = t
        .costumes
        .iter()
        .map(|a| {
            json!({
                "name": a.name, "assetId": a.digest, "md5ext": format!("{}.{}", a.digest, a.ext),
                "dataFormat": a.ext, "rotationCenterX": 0, "rotationCenterY": 0,
            })
        })
        .collect();
    let sounds: Vec<Value> = t
        .sounds
        .iter()
        .map(|a| {
            json!({
                "name": a.name, "assetId": a.digest, "md5ext": format!("{}.{}", a.digest, a.ext),
                "dataFormat": a.ext, "format": "", "rate": a.rate,
                "sampleCount": a.sample_count,
            })
        })
        .collect();
    json!({
        "isStage": is_stage,
        "name": t.name,
        "variables": {},
        "lists": {},
        "broadcasts": {},
        "blocks": em.blocks,
        "comments": {},
        "currentCostume": 0,
        "costumes": costumes,
        "sounds": sounds,
        "volume": 100,
        "layerOrder": index,
    })
}

const HATS: [&str; 4] = [
    "event_whenflagclicked",
    "event_whenkeypressed",
    "event_whenthisspriteclicked",
    "control_start_as_clone",
];

const STACK_BLOCKS: [&str; 18] = [
    "motion_movesteps",
    "motion_turnright",
    "motion_gotoxy",
    "motion_changexby",
    "looks_say",
    "looks_nextcostume",
    "looks_changesizeby",
    "sound_playuntildone",
    "sound_changevolumeby",
    "control_wait",
    "sensing_askandwait",
    "data_setvariableto",
    "data_changevariableby",
    "pen_penDown",
    "pen_clear",
    "music_playNoteForBeats",
    "videoSensing_videoToggle",
    "text2speech_speakAndWait",
];

const REPORTERS: [&str; 5] = [
    "operator_add",
    "operator_random",
    "sensing_mousex",
    "sensing_timer",
    "operator_join",
];

fn random_block(rng: &mut ChaCha8Rng, depth: usize, complexity: usize) -> Block {
    let roll = rng.gen_range(0..10);
    if depth < 2 && roll == 0 && complexity > 2 {
        let len = 1 + rng.gen_range(0..3);
        let body = random_chain(rng, depth + 1, complexity, len);
        return Block::new("control_repeat")
            .input("TIMES", Input::Number(rng.gen_range(2..10) as f64))
            .substack("SUBSTACK", body);
    }
    if depth < 2 && roll == 1 && complexity > 4 {
        let len = 1 + rng.gen_range(0..2);
        let body = random_chain(rng, depth + 1, complexity, len);
        return Block::new("control_if")
            .input("CONDITION", Input::Block(Block::new("sensing_mousedown")))
            .substack("SUBSTACK", body);
    }
    let upper = (6 + complexity * 2).min(STACK_BLOCKS.len());
    let mut b = Block::new(STACK_BLOCKS[rng.gen_range(0..upper)]);
    if rng.gen_bool(0.3) && complexity > 3 {
        b = b.input("VALUE", Input::Block(Block::new(REPORTERS[rng.gen_range(0..REPORTERS.len())])));
    } else if rng.gen_bool(0.2) {
        b = b.input("VALUE", Input::Variable("score".into()));
    } else {
        b = b.input("VALUE", Input::Number(rng.gen_range(1..100) as f64));
    }
    b
}

fn random_chain(rng: &mut ChaCha8Rng, depth: usize, complexity: usize, len: usize) -> Script {
    let blocks: Vec<Block> = (0..len.max(1))
        .map(|_| random_block(rng, depth, complexity))
        .collect();
    Script::chain(blocks).unwrap()
}

fn random_image(rng: &mut ChaCha8Rng) -> RgbImage {
    let a = Rgb(rng.gen::<[u8; 3]>());
    let b = Rgb(rng.gen::<[u8; 3]>());
    let split = rng.gen_range(1..16);
    RgbImage::from_fn(16, 16, |x, y| if (x + y) < split * 2 { a } else { b })
}

fn random_sound(rng: &mut ChaCha8Rng, rate: u32) -> Vec<f32> {
    let freq = rng.gen_range(120.0..2000.0f32);
    let amp = rng.gen_range(0.1..0.9f32);
    let len = rate as usize * rng.gen_range(5..20) / 100;
    (0..len)
        .map(|i| amp * (std::f32::consts::TAU * freq * i as f32 / rate as f32).sin())
        .collect()
}

/// One synthetic project whose size grows with `complexity` (0 to 9).
pub fn synthetic_project(seed: u64, complexity: usize) -> ProjectBuilder {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = ProjectBuilder::new();
    b.stage()
        .costume_png("backdrop", &random_image(&mut rng))
        .script(Script::stack(["event_whenflagclicked", "looks_switchbackdropto"]));
    let sprites = 1 + complexity / 3 + rng.gen_range(0..2);
    for s in 0..sprites {
        let t = b.sprite(&format!("Sprite{}", s + 1));
        let scripts = 1 + rng.gen_range(0..=complexity / 2);
        for _ in 0..scripts {
            let hat = Block::new(HATS[rng.gen_range(0..HATS.len())]);
            let len = 1 + rng.gen_range(0..=complexity + 1);
            let body = random_chain(&mut rng, 0, complexity, len);
            t.script(Script(hat.then(body.0)));
        }
        if complexity > 5 && rng.gen_bool(0.5) {
            let name = format!("jump {s}");
            t.script(Script(Block::define(&name).then(Block::new("motion_changeyby"))));
            t.script(Script::chain([Block::new("event_whenflagclicked"), Block::call(&name)]).unwrap());
        }
        for c in 0..1 + rng.gen_range(0..=complexity / 3) {
            t.costume_png(&format!("costume{}", c + 1), &random_image(&mut rng));
        }
        if s == 0 || rng.gen_bool(0.3) {
            let rate = [22050, 44100][rng.gen_range(0..2)];
            for k in 0..1 + rng.gen_range(0..=complexity / 4) {
                let samples = random_sound(&mut rng, rate);
                t.sound_wav(&format!("sound{}", k + 1), rate, &samples);
            }
        }
    }
    b
}

/// Writes `n` synthetic projects named `p00.sb3`, `p01.sb3`, ... into
/// `dir` and returns their paths in order.
pub fn write_synthetic_corpus(dir: impl AsRef<Path>, n: usize, seed: u64) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let width = n.saturating_sub(1).to_string().len().max(2);
    (0..n)
        .map(|i| {
            let path = dir.join(format!("p{i:0width$}.sb3"));
            let complexity = i * 10 / n.max(1);
            synthetic_project(seed.wrapping_mul(1_000_003).wrapping_add(i as u64), complexity)
                .write(&path)?;
            Ok(path)
        })
        .collect()
}

/// Fixed rater layout of the desk-scale protocol: five experts, four
/// rating 20 projects each and one rating 10, every project rated twice.
/// Returns `(expert_id, project_index)` pairs; needs exactly 45 projects.
pub fn expert_assignment(n_projects: usize, seed: u64) -> Result<Vec<(String, usize)>> {
    if n_projects != 45 {
        return Err(Error::Labels(format!(
            "the rater layout needs 45 projects, got {n_projects}"
        )));
    }
    let mut order: Vec<usize> = (0..n_projects).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let ranges: [(&str, Vec<usize>); 5] = [
        ("e1", (0..20).collect()),
        ("e2", (20..40).collect()),
        ("e3", (40..45).chain(0..15).collect()),
        ("e4", (15..35).collect()),
        ("e5", (35..45).collect()),
    ];
    let mut out = Vec::with_capacity(90);
    for (expert, slots) in ranges {
        let mut projects: Vec<usize> = slots.into_iter().map(|k| order[k]).collect();
        projects.sort_unstable();
        out.extend(projects.into_iter().map(|p| (expert.to_string(), p)));
    }
    Ok(out)
}
