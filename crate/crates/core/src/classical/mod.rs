//! Discrete-variable companions: one-time pad, toy RSA, BB84 and Ekert91.

mod bb84;
mod ekert;
mod rsa;
mod vernam;

pub use bb84::{
    bb84_from_table, bb84_run, intercept_resend_qber, Basis, Bb84Config, Bb84Run, WORKED_ALICE_BASES,
    WORKED_ALICE_BITS, WORKED_BOB_BASES, WORKED_BOB_BITS, WORKED_SIFTED_POSITIONS,
};
pub use ekert::{
    chsh_classical_max, ekert91_run, singlet_correlation, EkertRun, ALICE_ANGLES, BOB_ANGLES,
    CHSH_SETTINGS, KEY_SETTINGS,
};
pub use rsa::{
    gcd, mod_inverse, mod_pow, rsa_decrypt, rsa_encrypt, rsa_keygen, RsaKeySet,
};
pub use vernam::{vernam, BitString};
