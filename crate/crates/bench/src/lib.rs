//! Shared fixtures for the benchmark suite.

/// Toy determiner-noun-verb grammar.
pub const DNV: &str = "cat D N V\nroot V\nleaf D\nleaf N\nrule N : D:DET *\nrule V : N:SUBJ *\nword the : D\nword dog : N\nword barks : V\n";

/// Grammar with attachment and arity ambiguity; short sentences already
/// carry several analyses.
pub const AMBIG: &str = "cat N V\nroot V\nleaf N\nrule V : * N:OBJ\nrule V : * N:OBJ N:OBJ2\nrule V : * N:OBJ N:OBJ2 N:OBJ3\nrule N : * N:MOD\nword v : V\nword a : N\nword b : N\nword c : N\n";

/// A grammar whose nouns chain freely, to stress the all-parses machinery.
pub const CHAIN: &str =
    "cat N V\nroot V\nleaf N\nrule N : * N:MOD\nrule V : N:SUBJ * N:OBJ\nword n : N\nword v : V\n";
