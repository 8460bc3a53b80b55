//! Arithmetization (under construction).
