#include "wfsim/chsh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wfsim {

const char* zero_tag_name(ZeroTag t) {
    switch (t) {
        case ZeroTag::None: return "none";
        case ZeroTag::FrameZeroAlice: return "frame-zero-alice";
        case ZeroTag::FrameZeroBob: return "frame-zero-bob";
    }
    return "?";
}

const char* chsh_class_name(ChshClass c) {
    return c == ChshClass::Violation ? "violation" : "no-violation";
}

double chsh_value(const CorrelationTable& table) {
    const auto& pairs = standard_pairs();  // ab, cb, cd, ad
    return std::abs(table.at(pairs[0]).value + table.at(pairs[1]).value +
                    table.at(pairs[2]).value - table.at(pairs[3]).value);
}

ChshReport substitute_and_evaluate(const CorrelationTable& table,
                                   const std::vector<PairId>& zero_pairs) {
    ChshReport report;
    report.correlations_used = table;
    for (const PairId& raw : zero_pairs) {
        const PairId id = canonical_pair(raw.first, raw.second);
        const bool already = std::any_of(
            report.substitutions.begin(), report.substitutions.end(),
            [&](const Substitution& s) { return s.pair == id; });
        if (already) continue;
        ZeroTag tag = ZeroTag::None;
        if (id == PairId{PairLabel::c, PairLabel::b}) tag = ZeroTag::FrameZeroAlice;
        if (id == PairId{PairLabel::a, PairLabel::d}) tag = ZeroTag::FrameZeroBob;
        long long n = report.correlations_used.has(id)
                          ? report.correlations_used.at(id).n_runs
                          : 0;
        report.correlations_used.set(id, {0.0, 0.0, n, CorrelationSource::Assigned});
        report.substitutions.push_back({id, 0.0, tag});
    }
    report.value = chsh_value(report.correlations_used);
    report.combined_std_error = report.correlations_used.combined_std_error();
    report.classification =
        report.value > kClassicalBound + 3.0 * report.combined_std_error
            ? ChshClass::Violation
            : ChshClass::NoViolation;
    return report;
}

double lhv_bound() {
    double best = 0.0;
    for (int mask = 0; mask < 16; ++mask) {
        const double a = (mask & 1) ? 1.0 : -1.0;
        const double b = (mask & 2) ? 1.0 : -1.0;
        const double c = (mask & 4) ? 1.0 : -1.0;
        const double d = (mask & 8) ? 1.0 : -1.0;
        best = std::max(best, std::abs(a * b + b * c + c * d - a * d));
    }
    return best;
}

AngleSearchResult optimal_angles(Angle grid_step) {
    const double step = grid_step.radians();
    if (step <= 0.0)
        throw std::invalid_argument("optimal_angles: grid step must be positive");
    constexpr double two_pi = 2.0 * M_PI;
    std::vector<double> grid;
    for (double v = 0.0; v < two_pi - 1e-9; v += step) grid.push_back(v);
    const int m = static_cast<int>(grid.size());

    // Pair-correlation matrix via the Born route, so the search exercises the
    // same machinery the reported tables use.
    std::vector<double> corr(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            corr[static_cast<std::size_t>(i) * m + j] =
                exact_pair_correlation(Angle{grid[i]}, Angle{grid[j]});
    auto e = [&](int x, int y) { return corr[static_cast<std::size_t>(x) * m + y]; };

    AngleSearchResult best;
    best.value = -1.0;
    for (int ka = 0; ka < m; ++ka)
        for (int kb = 0; kb < m; ++kb)
            for (int kc = 0; kc < m; ++kc)
                for (int kd = 0; kd < m; ++kd) {
                    const double v =
                        std::abs(e(ka, kb) + e(kc, kb) + e(kc, kd) - e(ka, kd));
                    if (v > best.value) {
                        best.value = v;
                        best.angles = {Angle{grid[ka]}, Angle{grid[kb]}, Angle{grid[kc]},
                                       Angle{grid[kd]}};
                    }
                }
    return best;
}

}  // namespace wfsim
