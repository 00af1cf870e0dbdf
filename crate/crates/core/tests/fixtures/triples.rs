// Adjacency tables for the nine triple kinds at their three smallest valid
// set sizes. Row j, column j' (both 1-based) is 1 when u^j v^j' is an edge.

pub const TRIPLE_TABLES: &[(&str, usize, &[&str])] = &[
    ("regular_matching", 1, &[
        "1",
    ]),
    ("regular_matching", 2, &[
        "10",
        "01",
    ]),
    ("regular_matching", 3, &[
        "100",
        "010",
        "001",
    ]),
    ("regular_antimatching", 1, &[
        "0",
    ]),
    ("regular_antimatching", 2, &[
        "01",
        "10",
    ]),
    ("regular_antimatching", 3, &[
        "011",
        "101",
        "110",
    ]),
    ("regular_crossing", 1, &[
        "1",
    ]),
    ("regular_crossing", 2, &[
        "01",
        "11",
    ]),
    ("regular_crossing", 3, &[
        "001",
        "011",
        "111",
    ]),
    ("expanding_matching", 1, &[
        "0",
    ]),
    ("expanding_matching", 2, &[
        "01",
        "00",
    ]),
    ("expanding_matching", 3, &[
        "011",
        "000",
        "000",
    ]),
    ("expanding_antimatching", 1, &[
        "1",
    ]),
    ("expanding_antimatching", 2, &[
        "10",
        "11",
    ]),
    ("expanding_antimatching", 3, &[
        "100",
        "111",
        "111",
    ]),
    ("expanding_crossing", 1, &[
        "0",
    ]),
    ("expanding_crossing", 2, &[
        "00",
        "01",
    ]),
    ("expanding_crossing", 3, &[
        "000",
        "000",
        "011",
    ]),
    ("skew_expanding_matching", 2, &[
        "00",
        "00",
    ]),
    ("skew_expanding_matching", 6, &[
        "011000",
        "000000",
        "000000",
        "000000",
        "000000",
        "000110",
    ]),
    ("skew_expanding_matching", 10, &[
        "0110000000",
        "0001100000",
        "0000000000",
        "0000000000",
        "0000000000",
        "0000000000",
        "0000000000",
        "0000000000",
        "0000011000",
        "0000000110",
    ]),
    ("skew_expanding_antimatching", 2, &[
        "11",
        "11",
    ]),
    ("skew_expanding_antimatching", 6, &[
        "011000",
        "111111",
        "111111",
        "111111",
        "111111",
        "000110",
    ]),
    ("skew_expanding_antimatching", 10, &[
        "0110000000",
        "0001100000",
        "1111111111",
        "1111111111",
        "1111111111",
        "1111111111",
        "1111111111",
        "1111111111",
        "0000011000",
        "0000000110",
    ]),
    ("skew_expanding_crossing", 2, &[
        "01",
        "11",
    ]),
    ("skew_expanding_crossing", 6, &[
        "000111",
        "000111",
        "000111",
        "011111",
        "011111",
        "011111",
    ]),
    ("skew_expanding_crossing", 10, &[
        "0000000111",
        "0000011111",
        "0000011111",
        "0000011111",
        "0000011111",
        "0001111111",
        "0001111111",
        "0001111111",
        "0001111111",
        "0111111111",
    ]),
];
