use aho_corasick::AhoCorasick;

use super::PatentRecord;
use crate::error::{Error, Result};

/// The default AI technique patterns, one per line.
pub const DEFAULT_KEYWORDS: &str = include_str!("../../data/ai_keywords.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordRule {
    /// Text fragment matched anywhere in the title or abstract.
    pub pattern: String,
    pub label: String,
}

impl KeywordRule {
    pub fn new(pattern: impl Into<String>) -> Result<Self> {
        let pattern = pattern.into();
        if pattern.trim().is_empty() {
            return Err(Error::config("empty keyword pattern"));
        }
        Ok(KeywordRule {
            label: pattern.clone(),
            pattern,
        })
    }
}

/// Result of matching one record: indices of the rules that hit, ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeywordMatch {
    pub hits: Vec<usize>,
}

impl KeywordMatch {
    pub fn is_ai(&self) -> bool {
        !self.hits.is_empty()
    }

    pub fn labels<'a>(&self, rules: &'a KeywordSet) -> Vec<&'a str> {
        self.hits.iter().map(|&i| rules.rules[i].label.as_str()).collect()
    }
}

/// A compiled set of keyword rules.
///
/// Matching is case-insensitive substring containment: both the pattern and
/// the text are lower-cased before searching.
#[derive(Debug, Clone)]
pub struct KeywordSet {
    rules: Vec<KeywordRule>,
    automaton: AhoCorasick,
}

impl KeywordSet {
    pub fn new(rules: Vec<KeywordRule>) -> Result<Self> {
        let lowered: Vec<String> = rules.iter().map(|r| r.pattern.to_lowercase()).collect();
        let automaton =
            AhoCorasick::new(&lowered).map_err(|e| Error::config(format!("cannot compile keyword set: {e}")))?;
        Ok(KeywordSet { rules, automaton })
    }

    /// Parses a keyword file: one pattern per line, `#` starts a comment line,
    /// blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let rules = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(KeywordRule::new)
            .collect::<Result<Vec<_>>>()?;
        if rules.is_empty() {
            return Err(Error::config("keyword file contains no patterns"));
        }
        Self::new(rules)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn rules(&self) -> &[KeywordRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Matches title and abstract of a record.
    pub fn match_record(&self, record: &PatentRecord) -> KeywordMatch {
        self.match_texts(&[&record.title, &record.abstract_text])
    }

    pub fn match_texts(&self, texts: &[&str]) -> KeywordMatch {
        let mut hit = vec![false; self.rules.len()];
        for text in texts {
            if text.is_empty() {
                continue;
            }
            let lowered = if text.is_ascii() {
                text.to_ascii_lowercase()
            } else {
                text.to_lowercase()
            };
            for m in self.automaton.find_overlapping_iter(&lowered) {
                hit[m.pattern().as_usize()] = true;
            }
        }
        KeywordMatch {
            hits: hit.iter().enumerate().filter_map(|(i, &h)| h.then_some(i)).collect(),
        }
    }
}

impl Default for KeywordSet {
    fn default() -> Self {
        Self::parse(DEFAULT_KEYWORDS).expect("shipped keyword file is valid")
    }
}

/// Flags a record as AI when any rule matches its title or abstract.
/// Returns the flag and the labels of every matching rule.
pub fn match_ai<'a>(record: &PatentRecord, rules: &'a KeywordSet) -> (bool, Vec<&'a str>) {
    let m = rules.match_record(record);
    (m.is_ai(), m.labels(rules))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(title: &str, abstract_text: &str) -> PatentRecord {
        PatentRecord {
            id: "x".into(),
            year: 2000,
            title: title.into(),
            abstract_text: abstract_text.into(),
            countries: vec![],
            ipc_codes: vec![],
        }
    }

    // Lowercase both sides, then plain substring containment.
    fn oracle(rules: &KeywordSet, title: &str, abstract_text: &str) -> Vec<usize> {
        let (t, a) = (title.to_lowercase(), abstract_text.to_lowercase());
        rules
            .rules()
            .iter()
            .enumerate()
            .filter(|(_, r)| {
                let p = r.pattern.to_lowercase();
                t.contains(&p) || a.contains(&p)
            })
            .map(|(i, _)| i)
            .collect()
    }

    #[test]
    fn default_set_has_36_rules() {
        assert_eq!(KeywordSet::default().len(), 36);
    }

    #[test]
    fn neural_network_title() {
        let rules = KeywordSet::default();
        let (ai, hits) = match_ai(&record("Method for training a neural network", ""), &rules);
        assert!(ai);
        assert!(hits.contains(&"neural network"));
    }

    #[test]
    fn pervised_learn_covers_both_variants() {
        let rules = KeywordSet::default();
        for text in [
            "an unsupervised learning approach",
            "a supervised learner",
            "semi-supervised learning",
        ] {
            let (ai, hits) = match_ai(&record("", text), &rules);
            assert!(ai, "{text}");
            assert!(hits.contains(&"pervised learn"));
        }
    }

    #[test]
    fn empty_texts_never_match() {
        let rules = KeywordSet::default();
        assert_eq!(match_ai(&record("", ""), &rules), (false, vec![]));
    }

    #[test]
    fn case_insensitive() {
        let rules = KeywordSet::default();
        let (ai, hits) = match_ai(&record("FUZZY LOGIC system", ""), &rules);
        assert!(ai);
        assert_eq!(hits, vec!["Fuzzy logic"]);
        assert_eq!(
            rules.match_record(&record("FUZZY LOGIC system", "")).hits,
            oracle(&rules, "FUZZY LOGIC system", "")
        );
    }

    #[test]
    fn overlapping_patterns_all_reported() {
        let rules = KeywordSet::default();
        let (_, hits) = match_ai(&record("A probabilistic graphical model", ""), &rules);
        assert_eq!(hits, vec!["probabilistic graphical model", "graphical model"]);
        let (_, hits) = match_ai(&record("", "multitask learning"), &rules);
        assert_eq!(hits, vec!["task learn", "multitask learn"]);
    }

    #[test]
    fn parse_rejects_empty_file() {
        assert!(KeywordSet::parse("# only a comment\n\n").is_err());
    }

    #[test]
    fn duplicate_patterns_both_hit() {
        let rules = KeywordSet::parse("deep learn\nDeep Learn\n").unwrap();
        assert_eq!(rules.match_texts(&["deep learning"]).hits, vec![0, 1]);
    }

    proptest! {
        #[test]
        fn agrees_with_substring_oracle(title in "[a-zA-Z \\-]{0,60}", abs in "(neural network|Fuzzy|[a-zA-Z ]){0,20}") {
            let rules = KeywordSet::default();
            prop_assert_eq!(rules.match_record(&record(&title, &abs)).hits, oracle(&rules, &title, &abs));
        }

        #[test]
        fn invariant_under_case_changes(title in "[a-zA-Z \\-]{0,60}", upper in any::<bool>()) {
            let rules = KeywordSet::default();
            let changed = if upper { title.to_uppercase() } else { title.to_lowercase() };
            prop_assert_eq!(rules.match_record(&record(&title, "")), rules.match_record(&record(&changed, "")));
        }

        #[test]
        fn adding_a_rule_is_monotone(text in "[a-z ]{0,40}", extra in "[a-z]{1,6}") {
            let base = KeywordSet::default();
            let mut rules = base.rules().to_vec();
            rules.push(KeywordRule::new(extra).unwrap());
            let extended = KeywordSet::new(rules).unwrap();
            if base.match_texts(&[&text]).is_ai() {
                prop_assert!(extended.match_texts(&[&text]).is_ai());
            }
        }
    }
}
