//! The bundled example corpus, compiled into the binary so `gradmod verify`
//! works without any files on disk. `--corpus DIR` overrides it.

pub const BUNDLED: &[(&str, &str)] = &[
    ("case1_1", include_str!("../corpus/case1_1.gm")),
    ("case1_2", include_str!("../corpus/case1_2.gm")),
    ("case1_3", include_str!("../corpus/case1_3.gm")),
    ("case1_4", include_str!("../corpus/case1_4.gm")),
    ("case2_1", include_str!("../corpus/case2_1.gm")),
    ("case2_2", include_str!("../corpus/case2_2.gm")),
    ("case2_3", include_str!("../corpus/case2_3.gm")),
    ("case2_4", include_str!("../corpus/case2_4.gm")),
    ("case2_5", include_str!("../corpus/case2_5.gm")),
    ("case2_6", include_str!("../corpus/case2_6.gm")),
    ("case2_7", include_str!("../corpus/case2_7.gm")),
    ("case3_1", include_str!("../corpus/case3_1.gm")),
    ("case3_2", include_str!("../corpus/case3_2.gm")),
    ("case3_3", include_str!("../corpus/case3_3.gm")),
    ("case3_4", include_str!("../corpus/case3_4.gm")),
    ("case3_5", include_str!("../corpus/case3_5.gm")),
    ("case4_1_r2", include_str!("../corpus/case4_1_r2.gm")),
    ("case4_1_r3", include_str!("../corpus/case4_1_r3.gm")),
    ("case4_1_r4", include_str!("../corpus/case4_1_r4.gm")),
    ("case4_1_r5", include_str!("../corpus/case4_1_r5.gm")),
    ("case4_2_r2", include_str!("../corpus/case4_2_r2.gm")),
    ("case4_2_r3", include_str!("../corpus/case4_2_r3.gm")),
    ("case4_2_r4", include_str!("../corpus/case4_2_r4.gm")),
    ("case4_2_r5", include_str!("../corpus/case4_2_r5.gm")),
    ("case5_1", include_str!("../corpus/case5_1.gm")),
    ("case5_2", include_str!("../corpus/case5_2.gm")),
];
