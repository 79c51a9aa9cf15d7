use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    behavior_flags, classify_description_language, parse_tagged_segments, Conversation,
    CorpusError, DescriptionLanguage, Role,
};

pub const STATS_SCHEMA_VERSION: u32 = 1;

/// min / max / mean / median of a per-conversation count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountSummary {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
    pub median: f64,
}

impl CountSummary {
    fn of(values: &[usize]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2] as f64
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
        };
        Some(Self {
            min: sorted[0],
            max: sorted[n - 1],
            mean: sorted.iter().sum::<usize>() as f64 / n as f64,
            median,
        })
    }
}

/// Message length in Unicode scalar values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthSummary {
    pub messages: usize,
    pub min: usize,
    pub max: usize,
    pub mean: f64,
}

impl LengthSummary {
    fn of(lengths: &[usize]) -> Option<Self> {
        Some(Self {
            messages: lengths.len(),
            min: *lengths.iter().min()?,
            max: *lengths.iter().max()?,
            mean: lengths.iter().sum::<usize>() as f64 / lengths.len() as f64,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerRole<T> {
    pub user: T,
    pub model: T,
    pub tool: T,
}

impl<T> PerRole<T> {
    fn from_fn(mut f: impl FnMut(Role) -> T) -> Self {
        Self {
            user: f(Role::User),
            model: f(Role::Model),
            tool: f(Role::Tool),
        }
    }

    pub fn get(&self, role: Role) -> &T {
        match role {
            Role::User => &self.user,
            Role::Model => &self.model,
            Role::Tool => &self.tool,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BehaviorShares {
    pub tool_usage: f64,
    pub rejection: f64,
    pub clarification: f64,
    pub tool_usage_count: usize,
    pub rejection_count: usize,
    pub clarification_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LanguageShare {
    pub count: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LanguageDistribution {
    pub total: usize,
    pub english: LanguageShare,
    pub bulgarian: LanguageShare,
    pub mixed: LanguageShare,
}

impl LanguageDistribution {
    pub fn get(&self, lang: DescriptionLanguage) -> LanguageShare {
        match lang {
            DescriptionLanguage::English => self.english,
            DescriptionLanguage::Bulgarian => self.bulgarian,
            DescriptionLanguage::Mixed => self.mixed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub schema_version: u32,
    pub conversations: usize,
    pub messages_per_conversation: CountSummary,
    pub role_messages_per_conversation: PerRole<CountSummary>,
    pub role_value_length: PerRole<Option<LengthSummary>>,
    pub behavior: BehaviorShares,
    pub description_languages: LanguageDistribution,
    /// Messages whose tags could not be parsed; their tool definitions are not counted.
    pub unparsable_messages: usize,
}

fn percent(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 * 100.0 / whole as f64
    }
}

pub fn compute_corpus_stats(corpus: &[Conversation]) -> Result<CorpusStats, CorpusError> {
    if corpus.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let n = corpus.len();
    let sizes: Vec<usize> = corpus.iter().map(|c| c.messages.len()).collect();
    let messages_per_conversation = CountSummary::of(&sizes).expect("non-empty corpus");

    let role_messages_per_conversation = PerRole::from_fn(|role| {
        let counts: Vec<usize> = corpus.iter().map(|c| c.messages_from(role).count()).collect();
        CountSummary::of(&counts).expect("non-empty corpus")
    });
    let role_value_length = PerRole::from_fn(|role| {
        let lengths: Vec<usize> = corpus
            .iter()
            .flat_map(|c| c.messages_from(role))
            .map(|m| m.value.chars().count())
            .collect();
        LengthSummary::of(&lengths)
    });

    let (mut uses, mut rejects, mut clarifies) = (0, 0, 0);
    for conv in corpus {
        let flags = behavior_flags(conv);
        uses += flags.uses_tool as usize;
        rejects += flags.rejects as usize;
        clarifies += flags.clarifies as usize;
    }

    let mut lang_counts = [0usize; 3];
    let mut unparsable = 0;
    for msg in corpus.iter().flat_map(|c| c.messages.iter()) {
        if !msg.value.contains("<tools>") {
            continue;
        }
        match parse_tagged_segments(&msg.value) {
            Ok(seg) => {
                for def in &seg.tools {
                    let idx = match classify_description_language(&def.description) {
                        DescriptionLanguage::English => 0,
                        DescriptionLanguage::Bulgarian => 1,
                        DescriptionLanguage::Mixed => 2,
                    };
                    lang_counts[idx] += 1;
                }
            }
            Err(_) => unparsable += 1,
        }
    }
    let total_defs: usize = lang_counts.iter().sum();
    let share = |count: usize| LanguageShare {
        count,
        percent: percent(count, total_defs),
    };

    Ok(CorpusStats {
        schema_version: STATS_SCHEMA_VERSION,
        conversations: n,
        messages_per_conversation,
        role_messages_per_conversation,
        role_value_length,
        behavior: BehaviorShares {
            tool_usage: percent(uses, n),
            rejection: percent(rejects, n),
            clarification: percent(clarifies, n),
            tool_usage_count: uses,
            rejection_count: rejects,
            clarification_count: clarifies,
        },
        description_languages: LanguageDistribution {
            total: total_defs,
            english: share(lang_counts[0]),
            bulgarian: share(lang_counts[1]),
            mixed: share(lang_counts[2]),
        },
        unparsable_messages: unparsable,
    })
}

impl CorpusStats {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# Corpus statistics\n");
        let _ = writeln!(out, "Conversations: {}\n", self.conversations);
        let _ = writeln!(out, "| Metric | Min | Max | Mean | Median |");
        let _ = writeln!(out, "|---|---:|---:|---:|---:|");
        for (label, s) in self.count_rows() {
            let _ = writeln!(
                out,
                "| {label} | {} | {} | {:.2} | {:.2} |",
                s.min, s.max, s.mean, s.median
            );
        }
        let _ = writeln!(out, "\n| Role | Messages | Min length | Max length | Mean length |");
        let _ = writeln!(out, "|---|---:|---:|---:|---:|");
        for role in Role::ALL {
            match self.role_value_length.get(role) {
                Some(l) => {
                    let _ = writeln!(
                        out,
                        "| {role} | {} | {} | {} | {:.2} |",
                        l.messages, l.min, l.max, l.mean
                    );
                }
                None => {
                    let _ = writeln!(out, "| {role} | 0 | - | - | - |");
                }
            }
        }
        let b = &self.behavior;
        let _ = writeln!(out, "\n| Behavior | Conversations | Percent |");
        let _ = writeln!(out, "|---|---:|---:|");
        let _ = writeln!(out, "| Tool usage | {} | {:.2}% |", b.tool_usage_count, b.tool_usage);
        let _ = writeln!(out, "| Rejection | {} | {:.2}% |", b.rejection_count, b.rejection);
        let _ = writeln!(
            out,
            "| Clarification | {} | {:.2}% |",
            b.clarification_count, b.clarification
        );
        let _ = writeln!(out, "\n| Description language | Count | Percent |");
        let _ = writeln!(out, "|---|---:|---:|");
        for lang in DescriptionLanguage::ALL {
            let s = self.description_languages.get(lang);
            let _ = writeln!(out, "| {} | {} | {:.2}% |", lang.as_str(), s.count, s.percent);
        }
        out
    }

    /// One `metric,min,max,mean,median` row per statistic; lengths and shares
    /// leave the columns they do not have empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,min,max,mean,median\n");
        for (label, s) in self.count_rows() {
            let key = label.to_lowercase().replace(' ', "_");
            let _ = writeln!(out, "{key},{},{},{},{}", s.min, s.max, s.mean, s.median);
        }
        for role in Role::ALL {
            if let Some(l) = self.role_value_length.get(role) {
                let _ = writeln!(out, "{role}_value_length,{},{},{},", l.min, l.max, l.mean);
            }
        }
        let b = &self.behavior;
        let _ = writeln!(out, "tool_usage_percent,,,{},", b.tool_usage);
        let _ = writeln!(out, "rejection_percent,,,{},", b.rejection);
        let _ = writeln!(out, "clarification_percent,,,{},", b.clarification);
        for lang in DescriptionLanguage::ALL {
            let s = self.description_languages.get(lang);
            let _ = writeln!(out, "{}_descriptions_percent,,,{},", lang.as_str(), s.percent);
        }
        out
    }

    fn count_rows(&self) -> [(&'static str, CountSummary); 4] {
        let r = &self.role_messages_per_conversation;
        [
            ("Messages per conversation", self.messages_per_conversation),
            ("User messages per conversation", r.user),
            ("Model messages per conversation", r.model),
            ("Tool messages per conversation", r.tool),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Message;

    fn conv_of(n: usize) -> Conversation {
        Conversation {
            messages: (0..n)
                .map(|i| Message::new(if i % 2 == 0 { Role::User } else { Role::Model }, "ж"))
                .collect(),
            source_line: 1,
        }
    }

    #[test]
    fn singleton_corpus() {
        let s = compute_corpus_stats(&[conv_of(4)]).unwrap();
        let m = s.messages_per_conversation;
        assert_eq!((m.min, m.max), (4, 4));
        assert_eq!((m.mean, m.median), (4.0, 4.0));
    }

    #[test]
    fn two_point_corpus() {
        let s = compute_corpus_stats(&[conv_of(1), conv_of(15)]).unwrap();
        let m = s.messages_per_conversation;
        assert_eq!((m.min, m.max), (1, 15));
        assert_eq!(m.mean, 8.0);
        assert_eq!(m.median, 8.0);
    }

    #[test]
    fn empty_corpus_errors() {
        assert!(matches!(compute_corpus_stats(&[]), Err(CorpusError::EmptyCorpus)));
    }

    #[test]
    fn lengths_count_scalar_values_not_bytes() {
        let c = Conversation {
            messages: vec![Message::new(Role::User, "Здравей")],
            source_line: 1,
        };
        let s = compute_corpus_stats(&[c]).unwrap();
        let len = s.role_value_length.user.unwrap();
        assert_eq!(len.max, 7);
        assert!(s.role_value_length.tool.is_none());
    }

    #[test]
    fn language_counts_sum_to_definitions() {
        let user = Message::new(
            Role::User,
            concat!(
                r#"<tools>[{"name":"a","description":"Returns data"},"#,
                r#"{"name":"b","description":"Връща данни"},"#,
                r#"{"name":"c","description":"Връща JSON отговор от API"}]</tools>"#
            ),
        );
        let s = compute_corpus_stats(&[Conversation {
            messages: vec![user],
            source_line: 1,
        }])
        .unwrap();
        let d = s.description_languages;
        assert_eq!(d.total, 3);
        assert_eq!(d.english.count + d.bulgarian.count + d.mixed.count, 3);
        assert_eq!(d.mixed.count, 1);
        assert!(s.to_markdown().contains("| mixed | 1 | 33.33% |"));
        assert_eq!(s.to_csv().lines().count(), 1 + 4 + 1 + 3 + 3);
    }
}
