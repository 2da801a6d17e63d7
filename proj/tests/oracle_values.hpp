#pragma once

// Frozen output of tests/oracles/derive_oracles.py (mpmath / scipy).
// Regenerate with that script rather than editing by hand.

namespace oracle {

inline constexpr double kAbsNormal95 = 1.9599639845400540494;
inline constexpr double kSupTwoIid95 = 2.2364766445577894949;
inline constexpr double kChi2_399_lo = 329.9938759422802832;
inline constexpr double kChi2_399_hi = 475.51529105615327353;
inline constexpr double kExpTaylor6 = 2.7180555555555555556;
inline constexpr double kFredSmoothForcing0 = 0.63785243129202407281;
inline constexpr double kFredSmoothForcing1 = 0.81544756829024835524;
inline constexpr double kFredSmoothForcing2 = 0.85968480289721641827;
inline constexpr double kFredSmoothForcing3 = 0.80316136291261654843;
inline constexpr double kFredSmoothForcing4 = 0.69461345531116950697;
// brute(12,2) = [3, 9]
inline constexpr double kBruteZ_12_2 = 0.14814814814814814815;
// brute(100,2) = [9, 91]
inline constexpr double kBruteZ_100_2 = 0.012210012210012210012;
// brute(6,3) = [1, 2, 3]
inline constexpr double kBruteZ_6_3 = 0.66666666666666666667;
// brute(500,3) = [4, 24, 472]
inline constexpr double kBruteZ_500_3 = 0.0022289901129943502825;
inline constexpr double kVoltSmooth_t0_y0 = 1.057869171243056;  // tau=0.25, y=0.0
inline constexpr double kVoltSmooth_t0_y1 = 1.01841503608347;  // tau=0.25, y=0.5
inline constexpr double kVoltSmooth_t0_y2 = 0.7182119820032025;  // tau=0.25, y=1.0
inline constexpr double kVoltSmooth_t1_y0 = 1.1071292227572018;  // tau=0.5, y=0.0
inline constexpr double kVoltSmooth_t1_y1 = 1.1492730510634495;  // tau=0.5, y=0.5
inline constexpr double kVoltSmooth_t1_y2 = 0.8906247623706467;  // tau=0.5, y=1.0
inline constexpr double kVoltSmooth_t2_y0 = 1.1830921558414302;  // tau=1.0, y=0.0
inline constexpr double kVoltSmooth_t2_y1 = 1.382679594829339;  // tau=1.0, y=0.5
inline constexpr double kVoltSmooth_t2_y2 = 1.2179718337301317;  // tau=1.0, y=1.0

}  // namespace oracle
