#pragma once
// Generated by tests/oracles/compute_oracles.py; do not edit.

namespace oracle {
inline constexpr double M1_A1 = -7.8681318681318681319e-6;
inline constexpr double M1_C = 1.0989010989010989011e-2;
inline constexpr double M1_G = 1.24875e-4;
inline constexpr double M1_A1_HAT = 1.2544426545786673091;
inline constexpr double M1_ALPHA1 = 2.5119248945534344992e-2;
inline constexpr double M1_H2_0 = -7.3242019652167816004e-6;
inline constexpr double M1_H2_HALF = -1.0941620920825536475e-5;
inline constexpr double M1_V_STAR_0 = -1.4648403930433563201e+6;
inline constexpr double M1_X_RATIO_T = 1.5147789074894381327e-2;
inline constexpr double M1_X_HALF = 4.2184027626896687015e+5;
inline constexpr double M1_POST_MEAN_1E6 = 2.7472527472527472527e+6;
inline constexpr double M1_POST_PREC = 9.1e-7;
inline constexpr double M1_H0_0 = 1.9650473809657980945e+5;
inline constexpr double M1_VALUE_0 = -3.4655962445118109907e+6;
inline constexpr double M2_ETA_TILDE = 1.6736263736263736264e-5;
inline constexpr double M2_A2 = 6.8681318681318681319e-6;
inline constexpr double M2_A2_HAT = 4.5297586101597600065e-1;
inline constexpr double M2_C_SHIFT = 1.3736263736263736264e-5;
inline constexpr double M2_ALPHA2 = 5.7608378280336874394e-2;
inline constexpr double M2_H2_0 = -1.8496384585108657392e-5;
inline constexpr double M2_V_STAR_0 = -9.629583050705475452e+5;
inline constexpr double M2_H0_0 = -2.3499688104483491788e+3;
inline constexpr double M2_X_RATIO_T = 1.0813092667791250116e-1;
inline constexpr double KL_PREC2_VS_1 = 9.6573590279972654709e-2;
}  // namespace oracle
