//! The shipped example corpus, embedded so that `selftest` and the command line can
//! refer to files by name.

pub const CORPUS: &[(&str, &str)] = &[
    ("bad_square_p2", include_str!("../../../corpus/bad_square_p2.toml")),
    ("graded_euler_quotient_p2", include_str!("../../../corpus/graded_euler_quotient_p2.toml")),
    ("graded_euler_o1_p1", include_str!("../../../corpus/graded_euler_o1_p1.toml")),
    ("graded_o1_p1", include_str!("../../../corpus/graded_o1_p1.toml")),
    ("graded_o_o2_p1", include_str!("../../../corpus/graded_o_o2_p1.toml")),
    ("graded_point_ideal_p1", include_str!("../../../corpus/graded_point_ideal_p1.toml")),
    ("graded_skyscraper_p1", include_str!("../../../corpus/graded_skyscraper_p1.toml")),
    ("hill_broken_f2", include_str!("../../../corpus/hill_broken_f2.toml")),
    ("hill_chain_f3", include_str!("../../../corpus/hill_chain_f3.toml")),
    ("hill_coordinates_f3", include_str!("../../../corpus/hill_coordinates_f3.toml")),
    ("hill_dependent_f2", include_str!("../../../corpus/hill_dependent_f2.toml")),
    ("hill_independent_f2", include_str!("../../../corpus/hill_independent_f2.toml")),
    ("hill_nilpotent_f2", include_str!("../../../corpus/hill_nilpotent_f2.toml")),
    ("hill_zero", include_str!("../../../corpus/hill_zero.toml")),
    ("matrix_diag_2_m1", include_str!("../../../corpus/matrix_diag_2_m1.toml")),
    ("matrix_identity3", include_str!("../../../corpus/matrix_identity3.toml")),
    ("matrix_mixed", include_str!("../../../corpus/matrix_mixed.toml")),
    ("matrix_s2_s", include_str!("../../../corpus/matrix_s2_s.toml")),
    ("o1_p1", include_str!("../../../corpus/o1_p1.toml")),
    ("o2_om1_p1", include_str!("../../../corpus/o2_om1_p1.toml")),
    ("sections_e01", include_str!("../../../corpus/sections_e01.toml")),
    ("sections_mixed_v0", include_str!("../../../corpus/sections_mixed_v0.toml")),
    ("sections_one_v0", include_str!("../../../corpus/sections_one_v0.toml")),
    ("sections_one_v01", include_str!("../../../corpus/sections_one_v01.toml")),
    ("sections_one_v1", include_str!("../../../corpus/sections_one_v1.toml")),
    ("sections_second_v0", include_str!("../../../corpus/sections_second_v0.toml")),
    ("structure_p1", include_str!("../../../corpus/structure_p1.toml")),
    ("structure_p2", include_str!("../../../corpus/structure_p2.toml")),
    ("subscheme_x0x1_p1", include_str!("../../../corpus/subscheme_x0x1_p1.toml")),
    ("twist_p1_k1", include_str!("../../../corpus/twist_p1_k1.toml")),
    ("twist_p1_k2", include_str!("../../../corpus/twist_p1_k2.toml")),
    ("twist_p1_k3", include_str!("../../../corpus/twist_p1_k3.toml")),
    ("twist_p1_km1", include_str!("../../../corpus/twist_p1_km1.toml")),
    ("twist_p1_km2", include_str!("../../../corpus/twist_p1_km2.toml")),
    ("twist_p1_km3", include_str!("../../../corpus/twist_p1_km3.toml")),
    ("twist_p2_k1", include_str!("../../../corpus/twist_p2_k1.toml")),
    ("twist_p2_k2", include_str!("../../../corpus/twist_p2_k2.toml")),
    ("twist_p2_k3", include_str!("../../../corpus/twist_p2_k3.toml")),
    ("twist_p2_km1", include_str!("../../../corpus/twist_p2_km1.toml")),
    ("twist_p2_km2", include_str!("../../../corpus/twist_p2_km2.toml")),
    ("twist_p2_km3", include_str!("../../../corpus/twist_p2_km3.toml")),
];

/// Text of a corpus entry, by name with or without the `.toml` suffix.
pub fn lookup(name: &str) -> Option<&'static str> {
    let key = name.strip_prefix("corpus:").unwrap_or(name);
    let key = key.strip_suffix(".toml").unwrap_or(key);
    CORPUS.iter().find(|(n, _)| *n == key).map(|(_, t)| *t)
}
