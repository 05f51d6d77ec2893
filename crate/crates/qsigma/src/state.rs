/// Action identifier: an index below the environment's declared action count.
pub type ActionId = usize;

/// Agent-visible state handle: a tabular index or raw continuous coordinates,
/// plus a terminal flag. Terminal states carry no value and admit no actions;
/// they never appear as the origin of a transition.
#[derive(Clone, Debug, PartialEq)]
pub struct StateRef {
    repr: StateRepr,
    terminal: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateRepr {
    Tabular(usize),
    Continuous(Vec<f64>),
}

impl StateRef {
    pub fn tabular(index: usize) -> Self {
        Self {
            repr: StateRepr::Tabular(index),
            terminal: false,
        }
    }

    pub fn terminal_tabular(index: usize) -> Self {
        Self {
            repr: StateRepr::Tabular(index),
            terminal: true,
        }
    }

    pub fn continuous(coords: Vec<f64>) -> Self {
        Self {
            repr: StateRepr::Continuous(coords),
            terminal: false,
        }
    }

    pub fn terminal_continuous(coords: Vec<f64>) -> Self {
        Self {
            repr: StateRepr::Continuous(coords),
            terminal: true,
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal
    }

    pub fn repr(&self) -> &StateRepr {
        &self.repr
    }

    pub fn tabular_index(&self) -> Option<usize> {
        match self.repr {
            StateRepr::Tabular(i) => Some(i),
            StateRepr::Continuous(_) => None,
        }
    }

    pub fn coords(&self) -> Option<&[f64]> {
        match &self.repr {
            StateRepr::Tabular(_) => None,
            StateRepr::Continuous(c) => Some(c),
        }
    }
}
