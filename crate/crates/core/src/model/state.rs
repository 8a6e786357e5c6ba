use std::fmt;

/// Population fractions relative to the disease-free total.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub s: f64,
    pub e: f64,
    pub i: f64,
    pub r: f64,
}

impl State {
    pub const fn new(s: f64, e: f64, i: f64, r: f64) -> Self {
        Self { s, e, i, r }
    }

    pub fn total(&self) -> f64 {
        self.s + self.e + self.i + self.r
    }

    pub fn get(&self, c: Compartment) -> f64 {
        match c {
            Compartment::Susceptible => self.s,
            Compartment::Exposed => self.e,
            Compartment::Infectious => self.i,
            Compartment::Recovered => self.r,
        }
    }

    pub fn get_mut(&mut self, c: Compartment) -> &mut f64 {
        match c {
            Compartment::Susceptible => &mut self.s,
            Compartment::Exposed => &mut self.e,
            Compartment::Infectious => &mut self.i,
            Compartment::Recovered => &mut self.r,
        }
    }

    pub fn is_finite(&self) -> bool {
        Compartment::ALL.iter().all(|&c| self.get(c).is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Compartment {
    Susceptible,
    Exposed,
    Infectious,
    Recovered,
}

impl Compartment {
    pub const ALL: [Compartment; 4] = [
        Compartment::Susceptible,
        Compartment::Exposed,
        Compartment::Infectious,
        Compartment::Recovered,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Compartment::Susceptible => "S",
            Compartment::Exposed => "E",
            Compartment::Infectious => "I",
            Compartment::Recovered => "R",
        }
    }
}

impl fmt::Display for Compartment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}
