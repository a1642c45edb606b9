use serde::Serialize;

use crate::statespace::RegisterShape;

/// Classical post-processing of the final standard-basis outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum AnswerMap {
    /// The measured index.
    Index,
    /// Always the same answer.
    Constant(u32),
    /// 1 if any workspace qubit reads 1, else 0.
    AnyWorkspaceOne,
    /// 1 if the measured index lies in the set, else 0.
    IndexInSet(Vec<usize>),
    /// Lookup by flat outcome position `i 2^ℓ + w`.
    Table(Vec<u32>),
}

impl AnswerMap {
    pub fn answer(&self, shape: RegisterShape, position: usize) -> u32 {
        let (i, w) = shape.split(position);
        match self {
            AnswerMap::Index => i as u32,
            AnswerMap::Constant(a) => *a,
            AnswerMap::AnyWorkspaceOne => u32::from(w != 0),
            AnswerMap::IndexInSet(set) => u32::from(set.contains(&i)),
            AnswerMap::Table(t) => t[position],
        }
    }

    /// Largest answer this map can produce on the given shape.
    pub fn max_answer(&self, shape: RegisterShape) -> u32 {
        match self {
            AnswerMap::Index => shape.n() as u32 - 1,
            AnswerMap::Constant(a) => *a,
            AnswerMap::AnyWorkspaceOne | AnswerMap::IndexInSet(_) => 1,
            AnswerMap::Table(t) => t.iter().copied().max().unwrap_or(0),
        }
    }

    pub fn validate(&self, shape: RegisterShape) -> std::result::Result<(), String> {
        match self {
            AnswerMap::Table(t) if t.len() != shape.dim() => Err(format!(
                "answer table has {} entries, final state has {} outcomes",
                t.len(),
                shape.dim()
            )),
            AnswerMap::IndexInSet(set) => match set.iter().find(|&&i| i >= shape.n()) {
                Some(i) => Err(format!("answer set index {i} out of range for n={}", shape.n())),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn answers_by_position() {
        let s = RegisterShape::new(3, 2).unwrap();
        let p = s.offset(2, 0b01);
        assert_eq!(AnswerMap::Index.answer(s, p), 2);
        assert_eq!(AnswerMap::AnyWorkspaceOne.answer(s, p), 1);
        assert_eq!(AnswerMap::AnyWorkspaceOne.answer(s, s.offset(2, 0)), 0);
        assert_eq!(AnswerMap::IndexInSet(vec![0, 2]).answer(s, p), 1);
        assert_eq!(AnswerMap::Constant(7).answer(s, p), 7);
        assert_eq!(AnswerMap::Index.max_answer(s), 2);
        assert!(AnswerMap::Table(vec![0; 5]).validate(s).is_err());
        assert!(AnswerMap::IndexInSet(vec![3]).validate(s).is_err());
    }
}
