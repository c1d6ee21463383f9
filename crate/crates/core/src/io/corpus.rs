//! The shipped metric corpus, embedded at compile time.

use super::metric_spec::{parse_metric_json, NamedMetric};
use crate::error::Result;

pub const CORPUS: [(&str, &str); 6] = [
    ("flat-n1", include_str!("../../corpus/flat-n1.json")),
    ("flat-n2", include_str!("../../corpus/flat-n2.json")),
    ("flat-n3", include_str!("../../corpus/flat-n3.json")),
    ("quadratic-n2", include_str!("../../corpus/quadratic-n2.json")),
    ("log-k1m1-n2", include_str!("../../corpus/log-k1m1-n2.json")),
    ("log-k2m2-n3", include_str!("../../corpus/log-k2m2-n3.json")),
];

pub fn corpus() -> Result<Vec<NamedMetric>> {
    CORPUS.iter().map(|(_, text)| parse_metric_json(text)).collect()
}

pub fn corpus_metric(name: &str) -> Option<NamedMetric> {
    CORPUS
        .iter()
        .find(|(n, _)| *n == name)
        .and_then(|(_, t)| parse_metric_json(t).ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::metric_spec::canonicalize;

    #[test]
    fn corpus_parses_and_is_canonical() {
        let all = corpus().unwrap();
        assert_eq!(all.len(), 6);
        for ((name, text), m) in CORPUS.iter().zip(&all) {
            assert_eq!(&m.name, name);
            let canon = canonicalize(text).unwrap();
            assert_eq!(parse_metric_json(&canon).unwrap(), *m);
        }
    }
}
