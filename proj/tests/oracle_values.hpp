// Generated by tests/oracle/oracle.py (mpmath, 40 digits). Do not edit.
#pragma once

namespace oracle {

inline constexpr double hadamard_2_0 = -0.1103178000763257967;
inline constexpr double w1_2_0_re = -0.1103178000763257967;
inline constexpr double w1_2_0_im = -0.25;
inline constexpr double w2_2_0_re = -0.050329982986319812044;
inline constexpr double w2_2_0_im = 0.055158900038162898349;
inline constexpr double grad_t_hadamard_2_0 = -0.079577471545947667884;

inline constexpr double k0_1 = 0.42102443824070833334;
inline constexpr double k0_0p05 = 3.1142340294719898939;
inline constexpr double k0_1p9 = 0.12884597927604747986;
inline constexpr double k0_3 = 0.034739504386279248072;
inline constexpr double k0_12 = 0.0000022008253973114914005;
inline constexpr double k0_2i_re = -0.80169623188369421543;
inline constexpr double k0_2i_im = -0.35168681347830044589;
inline constexpr double k0_c_re = 0.7606797786659565291;
inline constexpr double k0_c_im = -0.43410456982107326252;
inline constexpr double k0_far_re = -0.010476720645977332151;
inline constexpr double k0_far_im = 0.045482320463935371484;
inline constexpr double i0_c_re = 1.1144323468946911116;
inline constexpr double i0_c_im = 0.074002225510418234241;
inline constexpr double massive_feynman_0_1 = 0.067008120508497137191;
inline constexpr double massive_feynman_2_0_re = -0.1275939181624362799;
inline constexpr double massive_feynman_2_0_im = -0.055972694785308917013;
inline constexpr double massless_limit_constant_mu1 = 0.018451073777171806319;

inline constexpr double cv_n3_k1 = -4.5;
inline constexpr double cauchy_n4_k2 = 6.7132867132867132867;
inline constexpr double cv_n5_k1 = -4.3494152046783625731;
inline constexpr double cv_n8_k2 = 7.6187029314724135323;
inline constexpr double vandermonde_4 = 0.242352;
inline constexpr double w_minus_n3_k1_beta_half = 2.1213203435596425732;
inline constexpr double abs_det_n8_k2_pow_beta = 2.7601997991943288909;
inline constexpr double w_minus_n8_k2_beta_half = 2.7601997991943288909;

inline constexpr double tn3_re = 1.1652788711073925584;
inline constexpr double tn3_im = -1.2458643837126057171;
inline constexpr double tn4_re = 0.00000000000000000000000000000000000000038315941067393215828;
inline constexpr double tn4_im = -24.062260018550248434;

inline constexpr double bump_unit_integral_1d = 1.2069003224378761753;
inline constexpr double bound_constant_r02_beta_q = 0.21636728944968442776;
inline constexpr double bound_constant_r02_beta_h = 0.50243121386446671412;
inline constexpr double bound_constant_r02_beta_t = 1.6719621417019556444;
inline constexpr double explicit_bound_n4_r02_beta_h = 0.040608210769584728589;
inline constexpr double holder_lhs_n2_p2 = 1.5;
inline constexpr double holder_rhs_n2_p2 = 1.0;
inline constexpr double holder_lhs_n4_p2 = 0.68389519185475331112;
inline constexpr double holder_rhs_n4_p2 = 1.4142135623730950488;
inline constexpr double holder_lhs_n10_p3 = 0.0010042166425154301549;
inline constexpr double holder_rhs_n10_p3 = 0.20551767286087250846;

inline constexpr double conv_far_mu0 = 0.00042120779679825018901;
inline constexpr double conv_far_mu1 = -0.0062458739839344578585;

} // namespace oracle
