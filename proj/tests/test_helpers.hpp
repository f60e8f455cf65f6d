#pragma once

// Shared helpers for the unit tests: reproducible random states/angles and a
// Euclidean distance between kets on the same space.

#include <cmath>

#include "wfsim/agents.hpp"
#include "wfsim/qstate.hpp"
#include "wfsim/rng.hpp"

namespace wfsim::testing {

inline Ket random_ket(const SpacePtr& space, RngStream& rng) {
    Ket ket{space, std::vector<Cx>(static_cast<std::size_t>(space->total_dim()))};
    for (Cx& a : ket.amplitudes)
        a = Cx(rng.next_double() - 0.5, rng.next_double() - 0.5);
    const double n = ket.norm();
    for (Cx& a : ket.amplitudes) a /= n;
    return ket;
}

inline double distance(const Ket& x, const Ket& y) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.amplitudes.size(); ++i)
        sum += std::norm(x.amplitudes[i] - y.amplitudes[i]);
    return std::sqrt(sum);
}

inline Angle random_angle(RngStream& rng) {
    return Angle(rng.next_double() * 2.0 * M_PI);
}

}  // namespace wfsim::testing
