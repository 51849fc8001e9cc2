use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{is_wildcard, DomainError, Schema};

/// One bookable showing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MovieRecord {
    pub id: u32,
    pub values: BTreeMap<String, String>,
}

impl MovieRecord {
    pub fn get(&self, slot: &str) -> Option<&str> {
        self.values.get(slot).map(String::as_str)
    }

    /// True when every non-wildcard constraint on a slot this record carries is equal
    /// (ASCII case-insensitive). Constraints on slots outside the record are ignored.
    pub fn matches<'a, I>(&self, constraints: I) -> bool
    where
        I: IntoIterator<Item = (&'a String, &'a String)>,
    {
        constraints.into_iter().all(|(slot, want)| {
            if is_wildcard(want) {
                return true;
            }
            match self.values.get(slot) {
                Some(have) => have.eq_ignore_ascii_case(want),
                None => true,
            }
        })
    }
}

/// Movie showings plus the value vocabulary of every informable slot.
///
/// For record slots the vocabulary is exactly the set of values seen across records.
/// Booking parameters (informable-only slots) get their fixed value pool.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgeBase {
    records: Vec<MovieRecord>,
    vocabulary: BTreeMap<String, Vec<String>>,
}

impl KnowledgeBase {
    pub fn new(schema: &Schema, mut records: Vec<MovieRecord>) -> Result<Self, DomainError> {
        records.sort_by_key(|r| r.id);
        if records.windows(2).any(|w| w[0].id == w[1].id) {
            return Err(DomainError::KnowledgeBase("duplicate record id".into()));
        }
        let mut vocabulary: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for slot in schema.record_slots() {
            let mut seen = BTreeSet::new();
            for record in &records {
                let value = record.get(slot).ok_or_else(|| {
                    DomainError::KnowledgeBase(format!("record {} lacks slot `{slot}`", record.id))
                })?;
                seen.insert(value.to_string());
            }
            vocabulary.insert(slot.to_string(), seen.into_iter().collect());
        }
        for slot in schema.parameter_slots() {
            vocabulary.insert(slot.to_string(), value_pool(slot));
        }
        Ok(KnowledgeBase { records, vocabulary })
    }

    /// Deterministic synthetic knowledge base: each record draws every record slot
    /// independently and uniformly from that slot's value pool.
    pub fn synthesize(schema: &Schema, seed: u64, n_records: usize) -> Result<Self, DomainError> {
        if n_records == 0 {
            return Err(DomainError::KnowledgeBase("n_records must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pools: Vec<(String, Vec<String>)> =
            schema.record_slots().map(|s| (s.to_string(), value_pool(s))).collect();
        let records = (1..=n_records as u32)
            .map(|id| {
                let values = pools
                    .iter()
                    .map(|(slot, pool)| (slot.clone(), pool.choose(&mut rng).expect("non-empty pool").clone()))
                    .collect();
                MovieRecord { id, values }
            })
            .collect();
        KnowledgeBase::new(schema, records)
    }

    pub fn records(&self) -> &[MovieRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn record(&self, id: u32) -> Option<&MovieRecord> {
        self.records.binary_search_by_key(&id, |r| r.id).ok().map(|i| &self.records[i])
    }

    pub fn vocabulary(&self, slot: &str) -> &[String] {
        self.vocabulary.get(slot).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn vocabularies(&self) -> &BTreeMap<String, Vec<String>> {
        &self.vocabulary
    }

    pub fn count_matches(&self, constraints: &BTreeMap<String, String>) -> usize {
        self.records.iter().filter(|r| r.matches(constraints)).count()
    }

    /// Lowest-id match, the tie-break used for every offer and inform.
    pub fn first_match(&self, constraints: &BTreeMap<String, String>) -> Option<&MovieRecord> {
        self.records.iter().find(|r| r.matches(constraints))
    }

    pub fn write_csv<W: Write>(&self, schema: &Schema, out: W) -> Result<(), DomainError> {
        let mut w = csv::Writer::from_writer(out);
        let slots: Vec<&str> = schema.record_slots().collect();
        let mut header = vec!["id"];
        header.extend(&slots);
        w.write_record(&header).map_err(csv_err)?;
        for record in &self.records {
            let mut row = vec![record.id.to_string()];
            row.extend(slots.iter().map(|s| record.get(s).unwrap_or_default().to_string()));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| DomainError::Io(e.to_string()))
    }

    pub fn read_csv<R: Read>(schema: &Schema, input: R) -> Result<Self, DomainError> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        let id_col = header
            .iter()
            .position(|h| h == "id")
            .ok_or_else(|| DomainError::KnowledgeBase("missing `id` column".into()))?;
        let mut records = Vec::new();
        for row in r.records() {
            let row = row.map_err(csv_err)?;
            let id = row[id_col]
                .parse()
                .map_err(|_| DomainError::KnowledgeBase(format!("bad id `{}`", &row[id_col])))?;
            let values = header
                .iter()
                .zip(row.iter())
                .filter(|(h, _)| schema.is_record_slot(h))
                .map(|(h, v)| (h.clone(), v.to_string()))
                .collect();
            records.push(MovieRecord { id, values });
        }
        KnowledgeBase::new(schema, records)
    }
}

fn csv_err(e: csv::Error) -> DomainError {
    DomainError::Io(e.to_string())
}

/// Candidate values per slot. Unknown slot names get generic labelled values.
pub fn value_pool(slot: &str) -> Vec<String> {
    let fixed: &[&str] = match slot {
        "moviename" => &[
            "Titanic",
            "Zootopia",
            "Deadpool",
            "The Revenant",
            "Kung Fu Panda 3",
            "London Has Fallen",
            "The Witch",
            "Race",
            "Risen",
            "Eddie the Eagle",
            "Gods of Egypt",
            "The Big Short",
        ],
        "theater" => &[
            "AMC Pacific Place 11",
            "Regal Meridian 16",
            "Carmike 12",
            "Cinemark Tinseltown",
            "Century Rowland Plaza",
            "Big Picture",
        ],
        "starttime" => &["10:00am", "12:30pm", "3:15pm", "5pm", "7pm", "9:30pm"],
        "date" => &["friday", "saturday", "sunday", "tomorrow"],
        "city" => &["seattle", "portland", "san francisco"],
        "genre" => &["comedy", "drama", "action", "animation", "thriller"],
        "numberofpeople" => &["1", "2", "3", "4", "5", "6"],
        _ => &[],
    };
    if fixed.is_empty() {
        (1..=6).map(|k| format!("{slot}_{k}")).collect()
    } else {
        fixed.iter().map(|s| s.to_string()).collect()
    }
}

pub fn query_kb<'a>(kb: &'a KnowledgeBase, constraints: &BTreeMap<String, String>) -> Vec<&'a MovieRecord> {
    kb.records.iter().filter(|r| r.matches(constraints)).collect()
}
