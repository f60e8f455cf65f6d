#pragma once

#include <numbers>
#include <vector>

#include "wfsim/correlations.hpp"

namespace wfsim {

constexpr double kClassicalBound = 2.0;
constexpr double kTsirelsonBound = 2.0 * std::numbers::sqrt2_v<double>;

// Why a cross-frame correlation may be assigned zero: after an undo, the
// friend's register is back in Ready, so in Alice's frame E(c,b) vanishes at
// all times; symmetrically for E(a,d) in Bob's frame.
enum class ZeroTag { None, FrameZeroAlice, FrameZeroBob };

const char* zero_tag_name(ZeroTag t);

struct Substitution {
    PairId pair;
    double assigned;
    ZeroTag tag;
};

enum class ChshClass { NoViolation, Violation };

const char* chsh_class_name(ChshClass c);

struct ChshReport {
    CorrelationTable correlations_used;  // table after substitutions
    std::vector<Substitution> substitutions;
    double value = 0.0;
    double classical_bound = kClassicalBound;
    double tsirelson_bound = kTsirelsonBound;
    double combined_std_error = 0.0;
    ChshClass classification = ChshClass::NoViolation;
};

// |E(a,b) + E(c,b) + E(c,d) − E(a,d)|; all four pairs must be present.
double chsh_value(const CorrelationTable& table);

// Overwrites the listed pairs with 0 (source becomes Assigned), evaluates the
// combination and classifies it: Violation iff the value exceeds the
// classical bound by more than three combined standard errors.  Zeroing
// (c,b) carries the Alice-frame tag, (a,d) the Bob-frame tag.
ChshReport substitute_and_evaluate(const CorrelationTable& table,
                                   const std::vector<PairId>& zero_pairs);

// Maximum of |ab + bc + cd − ad| over all 16 deterministic assignments
// (a,b,c,d) ∈ {±1}⁴ — exhaustively enumerated, and exactly 2.
double lhv_bound();

struct AngleSearchResult {
    AngleBindings angles;
    double value = 0.0;
};

// Grid search over angle 4-tuples (multiples of grid_step in [0, 2π))
// maximizing the exact-table combination; ties break toward the
// lexicographically first tuple.
AngleSearchResult optimal_angles(Angle grid_step);

}  // namespace wfsim
