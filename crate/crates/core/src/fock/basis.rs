use rustc_hash::FxHashMap;

use super::word::{Letter, Signature, Word};
use crate::error::{Error, Result};

pub type BlockId = usize;

/// Words of one level sharing a letter multiset, in lexicographic order.
#[derive(Debug, Clone)]
pub struct Block {
    pub signature: Signature,
    pub level: usize,
    pub words: Vec<Word>,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.words.len()
    }
}

/// All words of length `<= depth` over an alphabet, grouped into blocks.
/// Blocks are ordered by level, then by their first word.
#[derive(Debug, Clone)]
pub struct Basis {
    alphabet: Vec<Letter>,
    depth: usize,
    blocks: Vec<Block>,
    levels: Vec<Vec<BlockId>>,
    by_signature: FxHashMap<Signature, BlockId>,
    index: FxHashMap<Word, (BlockId, usize)>,
}

impl Basis {
    /// Enumerates the basis, refusing more than `max_words` words.
    pub fn build(alphabet: &[Letter], depth: usize, max_words: usize) -> Result<Basis> {
        let a = alphabet.len() as u128;
        let total: u128 = (0..=depth as u32).map(|l| a.pow(l)).sum();
        if total > max_words as u128 {
            return Err(Error::Budget(format!(
                "{total} basis words for {} letters at depth {depth}, budget is {max_words}",
                alphabet.len()
            )));
        }
        let mut alphabet = alphabet.to_vec();
        alphabet.sort();

        let mut blocks: Vec<Block> = Vec::new();
        let mut levels = Vec::with_capacity(depth + 1);
        let mut by_signature = FxHashMap::default();
        let mut index = FxHashMap::default();
        let mut layer = vec![Word::EMPTY];
        for level in 0..=depth {
            if level > 0 {
                // Extending a sorted layer letter by letter keeps it sorted.
                layer = layer
                    .iter()
                    .flat_map(|w| alphabet.iter().map(move |&l| w.push_back(l)))
                    .collect();
            }
            let mut ids = Vec::new();
            for &w in &layer {
                let sig = w.signature();
                let id = *by_signature.entry(sig).or_insert_with(|| {
                    blocks.push(Block {
                        signature: sig,
                        level,
                        words: Vec::new(),
                    });
                    ids.push(blocks.len() - 1);
                    blocks.len() - 1
                });
                index.insert(w, (id, blocks[id].words.len()));
                blocks[id].words.push(w);
            }
            levels.push(ids);
        }
        Ok(Basis {
            alphabet,
            depth,
            blocks,
            levels,
            by_signature,
            index,
        })
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, id: BlockId) -> &Block {
        &self.blocks[id]
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn num_words(&self) -> usize {
        self.index.len()
    }

    /// Blocks of one level; empty beyond the depth.
    pub fn level_blocks(&self, level: usize) -> &[BlockId] {
        self.levels.get(level).map_or(&[], |v| v.as_slice())
    }

    /// Blocks of levels `0..=max_level`.
    pub fn blocks_up_to(&self, max_level: usize) -> impl Iterator<Item = BlockId> + '_ {
        (0..=max_level.min(self.depth)).flat_map(move |l| self.levels[l].iter().copied())
    }

    pub fn block_of(&self, sig: Signature) -> Option<BlockId> {
        self.by_signature.get(&sig).copied()
    }

    /// Block and position of a word, if it is in the basis.
    pub fn locate(&self, w: Word) -> Option<(BlockId, usize)> {
        self.index.get(&w).copied()
    }

    pub fn contains_letter(&self, l: Letter) -> bool {
        self.alphabet.contains(&l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sizes(b: &Basis, level: usize) -> Vec<usize> {
        b.level_blocks(level).iter().map(|&id| b.block(id).dim()).collect()
    }

    #[test]
    fn block_sizes() {
        let two = [Letter::E, Letter::EBar];
        let b = Basis::build(&two, 3, 1000).unwrap();
        assert_eq!(sizes(&b, 0), vec![1]);
        assert_eq!(sizes(&b, 2), vec![1, 2, 1]);
        assert_eq!(sizes(&b, 3), vec![1, 3, 3, 1]);
        assert_eq!(b.num_words(), 15);
        let three = [Letter::E, Letter::EBar, Letter::Aux(1)];
        let b = Basis::build(&three, 2, 1000).unwrap();
        assert_eq!(b.num_words(), 13);
        assert!(Basis::build(&two, 12, 8000).is_err());
    }

    #[test]
    fn blocks_are_sorted() {
        let b = Basis::build(&[Letter::E, Letter::EBar, Letter::Aux(1)], 4, 1000).unwrap();
        for block in b.blocks() {
            assert!(block.words.windows(2).all(|w| w[0] < w[1]));
            assert!(block.words.iter().all(|w| w.signature() == block.signature));
        }
    }
}
