//! O*NET-style delimited input files, tokenization and vocabulary.
//!
//! Every input is UTF-8 CSV with a fixed header row:
//!
//! | file                      | header                |
//! |---------------------------|-----------------------|
//! | `occupations.csv`         | `soc_code,title`      |
//! | `task_statements.csv`     | `soc_code,task_text`  |
//! | `skills.csv`              | `skill_id,skill_name` |
//! | `occupation_skills.csv`   | `soc_code,skill_id`   |
//! | `labels.csv`              | `soc_code,label`      |
//!
//! Fields containing commas are double-quoted with embedded quotes doubled.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const OCCUPATIONS_FILE: &str = "occupations.csv";
pub const TASKS_FILE: &str = "task_statements.csv";
pub const SKILLS_FILE: &str = "skills.csv";
pub const LINKS_FILE: &str = "occupation_skills.csv";
pub const LABELS_FILE: &str = "labels.csv";

const OCCUPATIONS_HEADER: [&str; 2] = ["soc_code", "title"];
const TASKS_HEADER: [&str; 2] = ["soc_code", "task_text"];
const SKILLS_HEADER: [&str; 2] = ["skill_id", "skill_name"];
const LINKS_HEADER: [&str; 2] = ["soc_code", "skill_id"];
const LABELS_HEADER: [&str; 2] = ["soc_code", "label"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccupationRecord {
    pub soc_code: String,
    pub title: String,
    pub task_statements: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkillRecord {
    pub skill_id: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkRecord {
    pub soc_code: String,
    pub skill_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    NonAutomated = 0,
    Automated = 1,
}

impl Label {
    pub fn as_class(self) -> usize {
        self as usize
    }

    pub fn from_class(class: usize) -> Option<Label> {
        match class {
            0 => Some(Label::NonAutomated),
            1 => Some(Label::Automated),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::NonAutomated => "non-automated",
            Label::Automated => "automated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub soc_code: String,
    pub label: Label,
}

/// Links after validation, plus how many repeated pairs were dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedLinks {
    pub links: Vec<LinkRecord>,
    pub duplicates: usize,
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Opens a CSV file and checks the header row.
fn open_csv(path: &Path, header: &[&str]) -> Result<csv::Reader<File>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(file);
    let found = reader.headers().map_err(|e| Error::MalformedRow {
        file: file_label(path),
        line: 1,
        reason: e.to_string(),
    })?;
    let found: Vec<&str> = found.iter().map(str::trim).collect();
    if found != header {
        return Err(Error::MalformedRow {
            file: file_label(path),
            line: 1,
            reason: format!("expected header {:?}, found {:?}", header, found),
        });
    }
    Ok(reader)
}

/// Iterates two-field rows as `(line, a, b)`, rejecting rows with a wrong field
/// count or an empty field.
fn read_pairs(path: &Path, header: &[&str]) -> Result<Vec<(u64, String, String)>> {
    let mut reader = open_csv(path, header)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::MalformedRow {
            file: file_label(path),
            line: e.position().map(|p| p.line()).unwrap_or(0),
            reason: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != 2 {
            return Err(Error::MalformedRow {
                file: file_label(path),
                line,
                reason: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let a = record[0].trim();
        let b = record[1].trim();
        if a.is_empty() || b.is_empty() {
            return Err(Error::MalformedRow {
                file: file_label(path),
                line,
                reason: "empty field".into(),
            });
        }
        rows.push((line, a.to_string(), b.to_string()));
    }
    Ok(rows)
}

/// Parses occupations and groups their task statements under them, preserving
/// the row order of both files.
pub fn parse_occupations(occupations: &Path, tasks: &Path) -> Result<Vec<OccupationRecord>> {
    let mut records: Vec<OccupationRecord> = Vec::new();
    let mut position: HashMap<String, usize> = HashMap::new();
    for (_, soc_code, title) in read_pairs(occupations, &OCCUPATIONS_HEADER)? {
        if position.contains_key(&soc_code) {
            return Err(Error::DuplicateSocCode(soc_code));
        }
        position.insert(soc_code.clone(), records.len());
        records.push(OccupationRecord {
            soc_code,
            title,
            task_statements: Vec::new(),
        });
    }
    for (line, soc_code, text) in read_pairs(tasks, &TASKS_HEADER)? {
        let idx = *position.get(&soc_code).ok_or_else(|| {
            Error::UnresolvedReference(format!(
                "{} line {}: soc code {}",
                file_label(tasks),
                line,
                soc_code
            ))
        })?;
        records[idx].task_statements.push(text);
    }
    Ok(records)
}

pub fn parse_skills(path: &Path) -> Result<Vec<SkillRecord>> {
    let mut seen = HashSet::new();
    let mut skills = Vec::new();
    for (_, skill_id, name) in read_pairs(path, &SKILLS_HEADER)? {
        if !seen.insert(skill_id.clone()) {
            return Err(Error::DuplicateSkillId(skill_id));
        }
        skills.push(SkillRecord { skill_id, name });
    }
    Ok(skills)
}

/// Parses occupation-skill links. Both endpoints must resolve; repeated pairs
/// are dropped and counted.
pub fn parse_links(
    path: &Path,
    occupations: &[OccupationRecord],
    skills: &[SkillRecord],
) -> Result<ParsedLinks> {
    let socs: HashSet<&str> = occupations.iter().map(|o| o.soc_code.as_str()).collect();
    let skill_ids: HashSet<&str> = skills.iter().map(|s| s.skill_id.as_str()).collect();
    let mut seen = HashSet::new();
    let mut links = Vec::new();
    let mut duplicates = 0;
    for (line, soc_code, skill_id) in read_pairs(path, &LINKS_HEADER)? {
        if !socs.contains(soc_code.as_str()) {
            return Err(Error::UnresolvedReference(format!(
                "{} line {}: soc code {}",
                file_label(path),
                line,
                soc_code
            )));
        }
        if !skill_ids.contains(skill_id.as_str()) {
            return Err(Error::UnresolvedReference(format!(
                "{} line {}: skill id {}",
                file_label(path),
                line,
                skill_id
            )));
        }
        let link = LinkRecord { soc_code, skill_id };
        if seen.insert(link.clone()) {
            links.push(link);
        } else {
            duplicates += 1;
        }
    }
    if duplicates > 0 {
        warn!("{}: dropped {} duplicate links", file_label(path), duplicates);
    }
    Ok(ParsedLinks { links, duplicates })
}

pub fn parse_labels(path: &Path, occupations: &[OccupationRecord]) -> Result<Vec<LabelRecord>> {
    let socs: HashSet<&str> = occupations.iter().map(|o| o.soc_code.as_str()).collect();
    let mut seen = HashSet::new();
    let mut labels = Vec::new();
    for (line, soc_code, value) in read_pairs(path, &LABELS_HEADER)? {
        let label = match value.as_str() {
            "1" => Label::Automated,
            "0" => Label::NonAutomated,
            other => {
                return Err(Error::MalformedRow {
                    file: file_label(path),
                    line,
                    reason: format!("label must be 0 or 1, found {:?}", other),
                })
            }
        };
        if !socs.contains(soc_code.as_str()) {
            return Err(Error::UnresolvedReference(format!(
                "{} line {}: soc code {}",
                file_label(path),
                line,
                soc_code
            )));
        }
        if !seen.insert(soc_code.clone()) {
            return Err(Error::DuplicateLabel(soc_code));
        }
        labels.push(LabelRecord { soc_code, label });
    }
    Ok(labels)
}

fn write_pairs<'a>(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(header)?;
    for (a, b) in rows {
        writer.write_record([a, b])?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn write_occupations(occupations: &Path, tasks: &Path, records: &[OccupationRecord]) -> Result<()> {
    write_pairs(
        occupations,
        &OCCUPATIONS_HEADER,
        records.iter().map(|r| (r.soc_code.as_str(), r.title.as_str())),
    )?;
    write_pairs(
        tasks,
        &TASKS_HEADER,
        records.iter().flat_map(|r| {
            r.task_statements
                .iter()
                .map(move |t| (r.soc_code.as_str(), t.as_str()))
        }),
    )
}

pub fn write_skills(path: &Path, skills: &[SkillRecord]) -> Result<()> {
    write_pairs(
        path,
        &SKILLS_HEADER,
        skills.iter().map(|s| (s.skill_id.as_str(), s.name.as_str())),
    )
}

pub fn write_links(path: &Path, links: &[LinkRecord]) -> Result<()> {
    write_pairs(
        path,
        &LINKS_HEADER,
        links.iter().map(|l| (l.soc_code.as_str(), l.skill_id.as_str())),
    )
}

pub fn write_labels(path: &Path, labels: &[LabelRecord]) -> Result<()> {
    write_pairs(
        path,
        &LABELS_HEADER,
        labels.iter().map(|l| {
            let v = match l.label {
                Label::Automated => "1",
                Label::NonAutomated => "0",
            };
            (l.soc_code.as_str(), v)
        }),
    )
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn join(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Lowercases, splits on every non-alphanumeric character and drops tokens
/// shorter than two characters.
pub fn tokenize(text: &str) -> TokenSequence {
    let tokens = text
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2)
        .map(str::to_lowercase)
        .collect();
    TokenSequence { tokens }
}

/// Dense token index ordered by descending corpus frequency, ties broken
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    tokens: Vec<String>,
    counts: Vec<u64>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Index returned by [`Vocabulary::index_or_oov`] for unknown tokens.
    pub const OOV: usize = usize::MAX;

    pub fn build(sequences: &[TokenSequence], min_count: u64) -> Result<Vocabulary> {
        if min_count == 0 {
            return Err(Error::Config("min_count must be at least 1".into()));
        }
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for seq in sequences {
            for token in &seq.tokens {
                *counts.entry(token.as_str()).or_default() += 1;
            }
        }
        let mut kept: Vec<(&str, u64)> = counts.into_iter().filter(|&(_, c)| c >= min_count).collect();
        if kept.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        Ok(Vocabulary::from_entries(
            kept.into_iter().map(|(t, c)| (t.to_string(), c)).collect(),
        ))
    }

    /// Rebuilds from `(token, count)` pairs already in index order.
    pub fn from_entries(entries: Vec<(String, u64)>) -> Vocabulary {
        let (tokens, counts): (Vec<String>, Vec<u64>) = entries.into_iter().unzip();
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary {
            tokens,
            counts,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn index_or_oov(&self, token: &str) -> usize {
        self.get(token).unwrap_or(Self::OOV)
    }

    pub fn token(&self, index: usize) -> &str {
        &self.tokens[index]
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts[index]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Maps a sequence to indices, dropping out-of-vocabulary tokens.
    pub fn encode(&self, seq: &TokenSequence) -> Vec<usize> {
        seq.tokens.iter().filter_map(|t| self.get(t)).collect()
    }
}

/// Paths of the five input files inside a data directory.
#[derive(Debug, Clone)]
pub struct CorpusPaths {
    pub occupations: PathBuf,
    pub tasks: PathBuf,
    pub skills: PathBuf,
    pub links: PathBuf,
    pub labels: PathBuf,
}

impl CorpusPaths {
    pub fn in_dir(dir: &Path) -> CorpusPaths {
        CorpusPaths {
            occupations: dir.join(OCCUPATIONS_FILE),
            tasks: dir.join(TASKS_FILE),
            skills: dir.join(SKILLS_FILE),
            links: dir.join(LINKS_FILE),
            labels: dir.join(LABELS_FILE),
        }
    }

    pub fn all(&self) -> [&Path; 5] {
        [
            &self.occupations,
            &self.tasks,
            &self.skills,
            &self.links,
            &self.labels,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub soc_code: String,
    pub reason: String,
}

/// A fully parsed and admitted corpus: only occupations holding at least one
/// task statement and one skill link remain.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub occupations: Vec<OccupationRecord>,
    pub skills: Vec<SkillRecord>,
    pub links: Vec<LinkRecord>,
    pub labels: Vec<LabelRecord>,
    pub duplicate_links: usize,
    pub excluded: Vec<Exclusion>,
}

impl Corpus {
    pub fn load(dir: &Path) -> Result<Corpus> {
        let paths = CorpusPaths::in_dir(dir);
        let occupations = parse_occupations(&paths.occupations, &paths.tasks)?;
        let skills = parse_skills(&paths.skills)?;
        let parsed = parse_links(&paths.links, &occupations, &skills)?;
        let labels = parse_labels(&paths.labels, &occupations)?;
        Corpus::admit(occupations, skills, parsed.links, labels, parsed.duplicates)
    }

    /// Drops occupations without task statements or links. Labels pointing at
    /// a dropped occupation are an error.
    pub fn admit(
        occupations: Vec<OccupationRecord>,
        skills: Vec<SkillRecord>,
        links: Vec<LinkRecord>,
        labels: Vec<LabelRecord>,
        duplicate_links: usize,
    ) -> Result<Corpus> {
        let linked: BTreeSet<&str> = links.iter().map(|l| l.soc_code.as_str()).collect();
        let mut excluded = Vec::new();
        let mut admitted = Vec::new();
        for occ in occupations {
            let reason = if occ.task_statements.is_empty() {
                Some("no task statements")
            } else if !linked.contains(occ.soc_code.as_str()) {
                Some("no skill links")
            } else {
                None
            };
            match reason {
                Some(reason) => excluded.push(Exclusion {
                    soc_code: occ.soc_code.clone(),
                    reason: reason.into(),
                }),
                None => admitted.push(occ),
            }
        }
        if !excluded.is_empty() {
            info!(
                "excluded {} occupations: {}",
                excluded.len(),
                excluded
                    .iter()
                    .map(|e| format!("{} ({})", e.soc_code, e.reason))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
        }
        let kept: HashSet<&str> = admitted.iter().map(|o| o.soc_code.as_str()).collect();
        if let Some(bad) = labels.iter().find(|l| !kept.contains(l.soc_code.as_str())) {
            return Err(Error::UnresolvedReference(format!(
                "label for excluded occupation {}",
                bad.soc_code
            )));
        }
        let links = links
            .into_iter()
            .filter(|l| kept.contains(l.soc_code.as_str()))
            .collect();
        Ok(Corpus {
            occupations: admitted,
            skills,
            links,
            labels,
            duplicate_links,
            excluded,
        })
    }

    /// Tokenized task statements, one sequence per statement, in occupation order.
    pub fn task_sequences(&self) -> Vec<TokenSequence> {
        self.occupations
            .iter()
            .flat_map(|o| o.task_statements.iter().map(|t| tokenize(t)))
            .collect()
    }

    /// One document per admitted occupation: its tokenized task statements.
    pub fn task_documents(&self) -> Vec<Vec<TokenSequence>> {
        self.occupations
            .iter()
            .map(|o| o.task_statements.iter().map(|t| tokenize(t)).collect())
            .collect()
    }

    pub fn skill_sequences(&self) -> Vec<TokenSequence> {
        self.skills.iter().map(|s| tokenize(&s.name)).collect()
    }

    /// One sequence per admitted occupation: the names of its linked skills
    /// in link order, so co-listed skills share context.
    pub fn skill_profiles(&self) -> Vec<TokenSequence> {
        let by_id: HashMap<&str, &str> = self
            .skills
            .iter()
            .map(|s| (s.skill_id.as_str(), s.name.as_str()))
            .collect();
        let mut profiles: BTreeMap<&str, Vec<String>> = BTreeMap::new();
        for l in &self.links {
            if let Some(name) = by_id.get(l.skill_id.as_str()) {
                profiles
                    .entry(l.soc_code.as_str())
                    .or_default()
                    .extend(tokenize(name).tokens);
            }
        }
        self.occupations
            .iter()
            .filter_map(|o| profiles.remove(o.soc_code.as_str()))
            .map(|tokens| TokenSequence { tokens })
            .collect()
    }

    /// Sequences the word model trains on: every task statement, then every
    /// occupation's skill profile.
    pub fn training_sequences(&self) -> Vec<TokenSequence> {
        let mut seqs = self.task_sequences();
        seqs.extend(self.skill_profiles());
        seqs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let path = dir.join(name);
        let mut f = File::create(&path).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        path
    }

    fn toks(items: &[&str]) -> TokenSequence {
        TokenSequence {
            tokens: items.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn tokenizer_examples() {
        assert_eq!(
            tokenize("Compile, sort and verify data.").tokens,
            vec!["compile", "sort", "and", "verify", "data"]
        );
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("C++ 3D-modeling").tokens, vec!["3d", "modeling"]);
    }

    #[test]
    fn tokenizer_is_idempotent_on_normalized_text() {
        let t = tokenize("Record, file & retrieve X-ray documents (2nd copy).");
        assert_eq!(tokenize(&t.join()), t);
    }

    #[test]
    fn vocabulary_orders_by_count_then_token() {
        let vocab = Vocabulary::build(&[toks(&["a", "b", "a"]), toks(&["b", "c"])], 2).unwrap();
        assert_eq!(vocab.len(), 2);
        assert_eq!(vocab.get("a"), Some(0));
        assert_eq!(vocab.get("b"), Some(1));
        assert_eq!(vocab.get("c"), None);
        assert_eq!(vocab.index_or_oov("c"), Vocabulary::OOV);
    }

    #[test]
    fn vocabulary_singleton_and_empty() {
        let vocab = Vocabulary::build(&[toks(&["x"])], 1).unwrap();
        assert_eq!(vocab.get("x"), Some(0));
        assert!(matches!(
            Vocabulary::build(&[toks(&["x"])], 5),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn occupations_group_tasks() {
        let dir = tempfile::tempdir().unwrap();
        let occ = write(dir.path(), "o.csv", "soc_code,title\n11-1011.00,Chief Executives\n43-4071.00,File Clerks\n");
        let tasks = write(
            dir.path(),
            "t.csv",
            "soc_code,task_text\n11-1011.00,Direct operations.\n43-4071.00,\"File records, documents.\"\n11-1011.00,Set budgets.\n",
        );
        let recs = parse_occupations(&occ, &tasks).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].task_statements, vec!["Direct operations.", "Set budgets."]);
        assert_eq!(recs[1].task_statements, vec!["File records, documents."]);
    }

    #[test]
    fn header_only_yields_empty() {
        let dir = tempfile::tempdir().unwrap();
        let occ = write(dir.path(), "o.csv", "soc_code,title\n");
        let tasks = write(dir.path(), "t.csv", "soc_code,task_text\n");
        assert!(parse_occupations(&occ, &tasks).unwrap().is_empty());
    }

    #[test]
    fn occupation_errors() {
        let dir = tempfile::tempdir().unwrap();
        let tasks = write(dir.path(), "t.csv", "soc_code,task_text\n");
        let missing = dir.path().join("nope.csv");
        assert!(matches!(
            parse_occupations(&missing, &tasks),
            Err(Error::MissingFile(_))
        ));
        let dup = write(dir.path(), "d.csv", "soc_code,title\n1,A\n1,B\n");
        assert!(matches!(
            parse_occupations(&dup, &tasks),
            Err(Error::DuplicateSocCode(s)) if s == "1"
        ));
        let bad = write(dir.path(), "b.csv", "soc_code,title\n1,A\n2\n");
        assert!(matches!(
            parse_occupations(&bad, &tasks),
            Err(Error::MalformedRow { line: 3, .. })
        ));
        let header = write(dir.path(), "h.csv", "code,title\n");
        assert!(matches!(
            parse_occupations(&header, &tasks),
            Err(Error::MalformedRow { line: 1, .. })
        ));
    }

    #[test]
    fn links_deduplicate_and_resolve() {
        let dir = tempfile::tempdir().unwrap();
        let occs = vec![OccupationRecord {
            soc_code: "o1".into(),
            title: "O".into(),
            task_statements: vec!["t".into()],
        }];
        let skills = vec![SkillRecord {
            skill_id: "s1".into(),
            name: "Writing".into(),
        }];
        let path = write(dir.path(), "l.csv", "soc_code,skill_id\no1,s1\no1,s1\n");
        let parsed = parse_links(&path, &occs, &skills).unwrap();
        assert_eq!(parsed.links.len(), 1);
        assert_eq!(parsed.duplicates, 1);

        let path = write(dir.path(), "l2.csv", "soc_code,skill_id\no1,s9\n");
        assert!(matches!(
            parse_links(&path, &occs, &skills),
            Err(Error::UnresolvedReference(_))
        ));
    }

    #[test]
    fn labels_parse_and_reject_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let occs = vec![OccupationRecord {
            soc_code: "11-1011.00".into(),
            title: "Chief Executives".into(),
            task_statements: vec!["t".into()],
        }];
        let path = write(dir.path(), "l.csv", "soc_code,label\n11-1011.00,1\n");
        let labels = parse_labels(&path, &occs).unwrap();
        assert_eq!(labels.len(), 1);
        assert_eq!(labels[0].label, Label::Automated);

        let path = write(dir.path(), "l2.csv", "soc_code,label\n11-1011.00,1\n11-1011.00,0\n");
        assert!(matches!(parse_labels(&path, &occs), Err(Error::DuplicateLabel(_))));
        let path = write(dir.path(), "l3.csv", "soc_code,label\n11-1011.00,2\n");
        assert!(matches!(parse_labels(&path, &occs), Err(Error::MalformedRow { .. })));
        let path = write(dir.path(), "l4.csv", "soc_code,label\n99-9999.00,0\n");
        assert!(matches!(
            parse_labels(&path, &occs),
            Err(Error::UnresolvedReference(_))
        ));
    }

    #[test]
    fn admission_excludes_unlinked_and_taskless() {
        let occ = |code: &str, tasks: usize| OccupationRecord {
            soc_code: code.into(),
            title: code.into(),
            task_statements: (0..tasks).map(|i| format!("task {i}")).collect(),
        };
        let skills = vec![SkillRecord {
            skill_id: "s".into(),
            name: "s".into(),
        }];
        let link = |o: &str| LinkRecord {
            soc_code: o.into(),
            skill_id: "s".into(),
        };
        let corpus = Corpus::admit(
            vec![occ("a", 1), occ("b", 0), occ("c", 2)],
            skills,
            vec![link("a"), link("b")],
            vec![],
            0,
        )
        .unwrap();
        assert_eq!(corpus.occupations.len(), 1);
        assert_eq!(corpus.excluded.len(), 2);
        assert_eq!(corpus.links.len(), 1);
    }
}
