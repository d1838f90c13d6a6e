//! Team formation: workforce distributions, the countermonotone plan, a
//! discrete pairing optimizer and workforce value and disagreement.

mod csv_io;
mod pairing;
mod workforce;

pub use csv_io::{read_workforce_csv, write_pairs_csv};
pub use pairing::{
    countermonotone_pairs, exhaustive_pairing, optimal_pairing, Pair, PairingMode, PairingPlan,
    EXACT_LIMIT,
};
pub use workforce::{
    closed_form_match, workforce_disagreement, workforce_value, Workforce, VALUE_TOLERANCE,
};
