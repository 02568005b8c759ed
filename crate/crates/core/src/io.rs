//! File formats: line-delimited proposal records, template files, scene
//! bundles and ground-truth tables.
//!
//! Proposal records are JSON objects, one per line, with fields
//! `{part, x, y, theta, s, score, source_id, descriptor?}`; `part` uses
//! lowercase snake-case names (`"left_forearm"`), `descriptor` holds the
//! histogram bins as a plain array under `hsv` plus an optional `aux` array.
//!
//! A scene bundle is a directory holding `proposals.jsonl`, `meta.json`
//! (image size), and optionally `truth.tsv`, `mask.pbm` and `render.ppm`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{empty_part_lists, Aabb, PartProposal, PartType, Scene, Template, PART_COUNT};
use crate::sim::{GroundTruth, PlacedTruth};

pub fn write_proposals_jsonl(props: &[PartProposal], w: &mut dyn Write) -> Result<()> {
    for p in props {
        let line = serde_json::to_string(p).map_err(|e| Error::Parse(e.to_string()))?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_proposals_jsonl(r: &mut dyn BufRead) -> Result<Vec<PartProposal>> {
    let mut out = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut p: PartProposal = serde_json::from_str(&line)
            .map_err(|e| Error::Parse(format!("proposal line {}: {e}", n + 1)))?;
        p.theta = crate::model::normalize_angle(p.theta);
        p.validate()?;
        out.push(p);
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct TemplateFile {
    person_height: f64,
    parts: BTreeMap<String, Vec<PartProposal>>,
}

pub fn write_template(t: &Template, w: &mut dyn Write) -> Result<()> {
    let parts = PartType::ALL
        .iter()
        .map(|&p| (p.name().to_string(), t.proposals_of(p).to_vec()))
        .collect();
    let file = TemplateFile {
        person_height: t.person_height,
        parts,
    };
    let text = serde_json::to_string_pretty(&file).map_err(|e| Error::Parse(e.to_string()))?;
    w.write_all(text.as_bytes())?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn read_template(r: &mut dyn BufRead) -> Result<Template> {
    let file: TemplateFile =
        serde_json::from_reader(r).map_err(|e| Error::Parse(format!("template: {e}")))?;
    let mut parts = empty_part_lists();
    for (name, list) in file.parts {
        let part = PartType::from_name(&name)
            .ok_or_else(|| Error::Parse(format!("unknown part name {name:?}")))?;
        parts[part.index()] = list;
    }
    let t = Template {
        parts,
        person_height: file.person_height,
    };
    t.validate()?;
    Ok(t)
}

/// Ground truth as tab-separated records: one `box` line per placed
/// individual followed by one `part` line per body part.
pub fn write_ground_truth(gt: &GroundTruth, w: &mut dyn Write) -> Result<()> {
    writeln!(w, "record\tplaced\tfield\tvalues")?;
    for (k, p) in gt.placed.iter().enumerate() {
        writeln!(
            w,
            "box\t{}\t{}\t{:.6} {:.6} {:.6} {:.6}",
            k, p.individual, p.bbox.min[0], p.bbox.min[1], p.bbox.max[0], p.bbox.max[1]
        )?;
        for &part in &PartType::ALL {
            let idx = p.part_proposal[part.index()]
                .map_or("-".to_string(), |i| i.to_string());
            writeln!(w, "part\t{}\t{}\t{}", k, part.name(), idx)?;
        }
    }
    Ok(())
}

pub fn read_ground_truth(r: &mut dyn BufRead) -> Result<GroundTruth> {
    let mut placed: Vec<PlacedTruth> = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        let fields: Vec<&str> = line.split('\t').collect();
        let bad = |msg: &str| Error::Parse(format!("truth line {}: {msg}", n + 1));
        match fields.first().copied() {
            Some("record") | None => {}
            Some("box") => {
                if fields.len() != 4 {
                    return Err(bad("box record needs 4 fields"));
                }
                let individual: u32 = fields[2].parse().map_err(|_| bad("bad individual id"))?;
                let vals: Vec<f64> = fields[3]
                    .split_whitespace()
                    .map(|v| v.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("bad box coordinates"))?;
                if vals.len() != 4 {
                    return Err(bad("box needs 4 coordinates"));
                }
                placed.push(PlacedTruth {
                    individual,
                    part_proposal: [None; PART_COUNT],
                    bbox: Aabb::from_corners([vals[0], vals[1]], [vals[2], vals[3]]),
                });
            }
            Some("part") => {
                if fields.len() != 4 {
                    return Err(bad("part record needs 4 fields"));
                }
                let k: usize = fields[1].parse().map_err(|_| bad("bad placement index"))?;
                let part = PartType::from_name(fields[2]).ok_or_else(|| bad("unknown part"))?;
                let entry = placed.get_mut(k).ok_or_else(|| bad("part before box"))?;
                entry.part_proposal[part.index()] = match fields[3] {
                    "-" => None,
                    v => Some(v.parse().map_err(|_| bad("bad proposal index"))?),
                };
            }
            Some(other) => return Err(bad(&format!("unknown record type {other:?}"))),
        }
    }
    Ok(GroundTruth { placed })
}

#[derive(Serialize, Deserialize)]
struct SceneMeta {
    width: u32,
    height: u32,
}

/// Write a scene bundle directory.
pub fn write_scene_bundle(
    dir: &Path,
    scene: &Scene,
    truth: Option<&GroundTruth>,
    render: Option<&crate::features::Raster>,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = BufWriter::new(fs::File::create(dir.join("proposals.jsonl"))?);
    let flat: Vec<PartProposal> = scene.proposals.iter().flatten().cloned().collect();
    write_proposals_jsonl(&flat, &mut w)?;
    w.flush()?;
    let meta = SceneMeta {
        width: scene.image_size.0,
        height: scene.image_size.1,
    };
    fs::write(
        dir.join("meta.json"),
        serde_json::to_string_pretty(&meta).map_err(|e| Error::Parse(e.to_string()))? + "\n",
    )?;
    if let Some(gt) = truth {
        let mut w = BufWriter::new(fs::File::create(dir.join("truth.tsv"))?);
        write_ground_truth(gt, &mut w)?;
        w.flush()?;
    }
    if let Some(img) = render {
        let mut w = BufWriter::new(fs::File::create(dir.join("render.ppm"))?);
        img.write_ppm(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

/// Read a scene bundle. Proposal order within each part follows file order,
/// so ground-truth indices stay aligned.
pub fn read_scene_bundle(dir: &Path) -> Result<(Scene, Option<GroundTruth>)> {
    let meta: SceneMeta = serde_json::from_str(&fs::read_to_string(dir.join("meta.json"))?)
        .map_err(|e| Error::Parse(format!("meta.json: {e}")))?;
    let mut r = BufReader::new(fs::File::open(dir.join("proposals.jsonl"))?);
    let flat = read_proposals_jsonl(&mut r)?;
    let mut scene = Scene::new((meta.width, meta.height));
    for p in flat {
        scene.proposals[p.part.index()].push(p);
    }
    let truth_path = dir.join("truth.tsv");
    let truth = if truth_path.exists() {
        let mut r = BufReader::new(fs::File::open(truth_path)?);
        Some(read_ground_truth(&mut r)?)
    } else {
        None
    };
    Ok((scene, truth))
}
