//! Fallback branching heuristic used once the branching sequence is exhausted.
//!
//! Every literal carries an activity score. Literals occurring in learned
//! clauses and in the antecedents resolved during conflict analysis are bumped;
//! all scores decay by a constant factor per conflict. The unassigned literal
//! with the highest score is made TRUE. Ties go to the lowest variable index,
//! negative literal first, so with no conflicts at all the heuristic assigns
//! variables FALSE in index order.
//!
//! Decay is implemented by growing the bump increment instead of touching every
//! score.

use crate::formula::Literal;

pub const ACTIVITY_DECAY: f64 = 0.95;
const RESCALE_LIMIT: f64 = 1e100;

pub struct Activity {
    score: Vec<f64>,
    increment: f64,
    /// Binary max-heap of literal codes.
    heap: Vec<usize>,
    /// Heap position of every literal code, if present.
    position: Vec<Option<usize>>,
}

impl Activity {
    pub fn new(num_vars: u32) -> Activity {
        let n = 2 * num_vars as usize;
        let mut a = Activity {
            score: vec![0.0; n],
            increment: 1.0,
            heap: Vec::with_capacity(n),
            position: vec![None; n],
        };
        for code in 0..n {
            a.insert(code);
        }
        a
    }

    pub fn score(&self, lit: Literal) -> f64 {
        self.score[lit.code()]
    }

    fn better(&self, a: usize, b: usize) -> bool {
        let (sa, sb) = (self.score[a], self.score[b]);
        if sa != sb {
            return sa > sb;
        }
        let (va, vb) = (a / 2, b / 2);
        if va != vb {
            return va < vb;
        }
        // odd codes are negative literals
        a & 1 > b & 1
    }

    pub fn bump(&mut self, lit: Literal) {
        let code = lit.code();
        self.score[code] += self.increment;
        if self.score[code] > RESCALE_LIMIT {
            for s in &mut self.score {
                *s /= RESCALE_LIMIT;
            }
            self.increment /= RESCALE_LIMIT;
        }
        if let Some(pos) = self.position[code] {
            self.sift_up(pos);
        }
    }

    /// Applies one conflict's worth of decay.
    pub fn decay(&mut self) {
        self.increment /= ACTIVITY_DECAY;
    }

    /// Makes both literals of a variable selectable again after it was unassigned.
    pub fn reinsert(&mut self, lit: Literal) {
        self.insert(lit.code());
        self.insert((!lit).code());
    }

    fn insert(&mut self, code: usize) {
        if self.position[code].is_some() {
            return;
        }
        self.heap.push(code);
        let pos = self.heap.len() - 1;
        self.position[code] = Some(pos);
        self.sift_up(pos);
    }

    /// Pops literals until one satisfies `is_free`, and returns it. Popped
    /// literals that are not free are dropped; they come back via `reinsert`.
    pub fn pick(&mut self, mut is_free: impl FnMut(Literal) -> bool) -> Option<Literal> {
        while let Some(&top) = self.heap.first() {
            let lit = Literal::from_code(top);
            if is_free(lit) {
                return Some(lit);
            }
            self.remove_top();
        }
        None
    }

    fn remove_top(&mut self) {
        let top = self.heap[0];
        let last = self.heap.pop().unwrap();
        self.position[top] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.position[last] = Some(0);
            self.sift_down(0);
        }
    }

    fn sift_up(&mut self, mut pos: usize) {
        while pos > 0 {
            let parent = (pos - 1) / 2;
            if !self.better(self.heap[pos], self.heap[parent]) {
                break;
            }
            self.swap(pos, parent);
            pos = parent;
        }
    }

    fn sift_down(&mut self, mut pos: usize) {
        loop {
            let (l, r) = (2 * pos + 1, 2 * pos + 2);
            let mut best = pos;
            if l < self.heap.len() && self.better(self.heap[l], self.heap[best]) {
                best = l;
            }
            if r < self.heap.len() && self.better(self.heap[r], self.heap[best]) {
                best = r;
            }
            if best == pos {
                break;
            }
            self.swap(pos, best);
            pos = best;
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.position[self.heap[a]] = Some(a);
        self.position[self.heap[b]] = Some(b);
    }
}
