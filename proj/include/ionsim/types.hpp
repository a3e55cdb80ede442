#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace ionsim {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Index over z-basis spin outcomes: bit n of the index is ion n, set = up.
using ZIndex = std::uint32_t;

// Index over x-basis spin configurations: bit n set means s_n = +1.
using XIndex = std::uint32_t;

inline int spin_sign(XIndex config, int ion) {
    return (config >> ion) & 1u ? +1 : -1;
}

}  // namespace ionsim
