use crate::engine::{Game, GameState, Move};
use crate::error::{Error, Result};

/// Depth-first iterator over every complete game, in canonical move order.
#[derive(Debug, Clone)]
pub struct Games {
    n: u64,
    state: GameState,
    path: Vec<Move>,
    saved: Vec<GameState>,
    frames: Vec<(Vec<Move>, usize)>,
    started: bool,
}

/// All complete games on `n`, provided `n <= cap`.
pub fn enumerate_games(n: u64, cap: u64) -> Result<Games> {
    if n > cap {
        return Err(Error::EnumerationCapExceeded { n, cap });
    }
    Ok(Games {
        n,
        state: GameState::initial(n)?,
        path: Vec::new(),
        saved: Vec::new(),
        frames: Vec::new(),
        started: false,
    })
}

impl Iterator for Games {
    type Item = Game;

    fn next(&mut self) -> Option<Game> {
        if !self.started {
            self.started = true;
            let legal = self.state.legal_moves();
            if legal.is_empty() {
                return Some(Game::from_trusted(self.n, Vec::new()));
            }
            self.frames.push((legal, 0));
        }
        while let Some((moves, idx)) = self.frames.last_mut() {
            if *idx == moves.len() {
                self.frames.pop();
                if let Some(prev) = self.saved.pop() {
                    self.state = prev;
                    self.path.pop();
                }
                continue;
            }
            let m = moves[*idx];
            *idx += 1;
            self.saved.push(self.state.clone());
            self.state.apply_unchecked(m);
            self.path.push(m);
            let legal = self.state.legal_moves();
            if legal.is_empty() {
                let g = Game::from_trusted(self.n, self.path.clone());
                self.state = self.saved.pop().expect("pushed above");
                self.path.pop();
                return Some(g);
            }
            self.frames.push((legal, 0));
        }
        None
    }
}
