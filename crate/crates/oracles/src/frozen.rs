//! Reference values computed once in 40-digit arithmetic (mpmath) and frozen.
//! Complex values are `(re, im)`.

pub const U_1_1P5_1: f64 = 0.757_872_156_141_312_106_043_351_239_914_217_9;
/// `U(0.5, 1.3, 40)`.
pub const U_HALF_1P3_40: f64 = 0.157_727_110_689_202_386_999_582_942_950_930_7;
pub const U_0P8M0P3I_1P45_20: (f64, f64) = (0.054_996_502_095_612_933_804_638_765_874, 0.071_481_480_299_903_578_681_311_665_881_5);
pub const U_2P5P1P25I_5_6I: (f64, f64) = (0.058_980_083_002_712_005_501_960_839_791_4, -0.044_561_676_953_924_603_787_309_408_438);
/// `U(2.5 + 1.25i, 5, −2 + 3i)`.
pub const U_2P5P1P25I_5_M2P3I: (f64, f64) = (-0.072_791_073_508_731_692_147_030_938_626, -0.296_424_721_114_831_665_425_657_524_785);
/// `U(1.5, 3, 2)` (integer second parameter).
pub const U_1P5_3_2: f64 = 0.461_550_377_017_538_628_417_187_033_196_055_6;
/// `U(0.7 + 0.2i, 2, 0.5 + 4i)`.
pub const U_0P7P0P2I_2_0P5P4I: (f64, f64) = (0.109_470_340_925_546_153_628_561_099_736_275_5, -0.489_569_472_565_484_469_400_528_056_632_474_8);

pub const M_0P3_1P7_M12: f64 = 0.480_903_986_038_755_195_843_968_980_529_353_4;
/// `M(2 + i, 3.5, 4 − 2i)`.
pub const M_2P1I_3P5_4M2I: (f64, f64) = (18.631_824_326_826_837_616_309_924_340_990_03, -11.171_078_322_651_191_241_226_941_074_245_13);
pub const M_M1P5_2P2_25: f64 = 352_220.305_847_604_865_070_871_251_070_186_3;
pub const M_HALF_1P5_M40: f64 = 0.140_124_780_409_948_217_430_317_978_467_230_8;

pub const J0_1: f64 = 0.765_197_686_557_966_551_449_717_526_102_663_2;
pub const Y0_1: f64 = 0.088_256_964_215_676_957_982_926_766_023_515_16;
pub const J1_2_5: f64 = 0.497_094_102_464_274_038_010_816_276_264_422_2;
pub const Y1_2_5: f64 = 0.145_918_137_966_785_798_878_759_940_535_877_6;
pub const J0P5_3: f64 = 0.065_008_182_877_375_778_114_004_696_404_628_95;
pub const Y0P5_3: f64 = 0.456_048_820_794_633_178_846_833_260_211_615_3;
pub const J2P3_7P1: f64 = -0.306_033_816_324_409_309_510_222_682_521_380_4;
pub const Y2P3_7P1: f64 = 0.026_272_384_409_962_387_249_445_134_488_524_1;
pub const J5_30: f64 = -0.143_240_295_512_077_076_985_258_021_660_412_5;
pub const Y5_30: f64 = 0.031_627_359_289_264_433_312_292_268_887_655_23;
pub const J0P25_45: f64 = 0.117_372_383_366_401_510_769_149_563_802_758_3;
pub const Y0P25_45: f64 = -0.019_239_938_830_035_373_318_306_373_393_275_17;
