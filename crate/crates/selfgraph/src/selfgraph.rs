//! Self-graphing pipeline (under construction).
