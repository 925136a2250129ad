use crate::concept::{Concept, DistanceMetric};
use crate::error::Result;

/// Order-preserving edit distance between two concept sequences:
/// substitution costs `d(x, y)`, deletion `d(x, 0)`, insertion `d(0, y)`.
pub fn sequence_edit_distance<M: DistanceMetric + ?Sized>(
    a: &[Concept],
    b: &[Concept],
    metric: &M,
) -> Result<f64> {
    let del: Vec<f64> = a.iter().map(|x| metric.to_null(x)).collect::<Result<_>>()?;
    let ins: Vec<f64> = b.iter().map(|y| metric.to_null(y)).collect::<Result<_>>()?;

    // rolling rows over the (|a|+1) x (|b|+1) table
    let mut prev: Vec<f64> = std::iter::once(0.0)
        .chain(ins.iter().scan(0.0, |acc, c| {
            *acc += c;
            Some(*acc)
        }))
        .collect();
    let mut cur = vec![0.0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = prev[0] + del[i];
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + metric.distance(x, y)?;
            cur[j + 1] = sub.min(prev[j + 1] + del[i]).min(cur[j] + ins[j]);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[b.len()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::{DiscreteMetric, TableMetric};

    fn chars(s: &str) -> Vec<Concept> {
        s.chars().map(|c| Concept::symbol(c.to_string())).collect()
    }

    #[test]
    fn kitten_sitting() {
        let d = sequence_edit_distance(&chars("kitten"), &chars("sitting"), &DiscreteMetric);
        assert_eq!(d.unwrap(), 3.0);
    }

    #[test]
    fn identity_and_empty() {
        let a = chars("flexibility");
        assert_eq!(sequence_edit_distance(&a, &a, &DiscreteMetric).unwrap(), 0.0);
        assert_eq!(sequence_edit_distance(&a, &[], &DiscreteMetric).unwrap(), 11.0);
        assert_eq!(sequence_edit_distance(&[], &a, &DiscreteMetric).unwrap(), 11.0);
    }

    #[test]
    fn weighted_gaps() {
        let t = TableMetric::new([("a", "b", 5.0), ("a", "0", 1.0), ("b", "0", 2.0)]);
        // substituting a->b (5) is worse than delete a + insert b (3)
        let d = sequence_edit_distance(&chars("a"), &chars("b"), &t).unwrap();
        assert_eq!(d, 3.0);
        let d = sequence_edit_distance(&chars("ab"), &[], &t).unwrap();
        assert_eq!(d, 3.0);
    }
}
