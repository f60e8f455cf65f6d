#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>

#include "wfsim/protocol.hpp"

namespace wfsim {

// ── pair identifiers ──────────────────────────────────────────────────────
// Correlations are labeled by the two measurement directions involved.  The
// four pairs of interest are (a,b), (c,b), (c,d) and (a,d); (b,c) means the
// same thing as (c,b) and is canonicalized to it.
enum class PairLabel { a, b, c, d };

const char* pair_label_name(PairLabel l);

struct PairId {
    PairLabel first;
    PairLabel second;

    friend bool operator==(const PairId& x, const PairId& y) {
        return x.first == y.first && x.second == y.second;
    }
    friend bool operator<(const PairId& x, const PairId& y) {
        return x.first != y.first ? x.first < y.first : x.second < y.second;
    }
};

// Canonical orientation: the four standard pairs keep their conventional
// spelling (ab, cb, cd, ad); anything else is ordered by label.
PairId canonical_pair(PairLabel x, PairLabel y);
// The standard pairs in fixed reporting order: ab, cb, cd, ad.
const std::array<PairId, 4>& standard_pairs();
std::string pair_name(PairId id);                        // "ab", "cb", …
std::optional<PairId> pair_from_name(const std::string&);  // inverse, any orientation

Angle angle_of(PairLabel l, const AngleBindings& angles);

// ── correlation tables ────────────────────────────────────────────────────

enum class CorrelationSource { Exact, MonteCarlo, Assigned };
const char* source_name(CorrelationSource s);

struct CorrelationEntry {
    double value = 0.0;
    double std_error = 0.0;
    long long n_runs = 0;
    CorrelationSource source = CorrelationSource::Exact;
};

struct CorrelationTable {
    std::map<PairId, CorrelationEntry> entries;

    bool has(PairId id) const;
    const CorrelationEntry& at(PairId id) const;  // throws on missing pair
    void set(PairId id, CorrelationEntry e);
    // Root-sum-square of the entry standard errors (independent estimates).
    double combined_std_error() const;
};

// ── exact correlations ────────────────────────────────────────────────────

// ⟨singlet| σ(θ_x) ⊗ σ(θ_y) |singlet⟩, computed through the Born rule on the
// full composite state — the closed form −cos(θ_x − θ_y) stays a test oracle
// rather than becoming the implementation.
double exact_pair_correlation(Angle theta_x, Angle theta_y);

// Expectation of Z_x ⊗ Z_y on the registers of two distinct agents, where Z
// maps SawUp → +1, SawDown → −1 and Ready → ready_value.
double register_correlation(const Ket& ket, AgentId x, AgentId y, double ready_value);

// ── Monte Carlo estimation ────────────────────────────────────────────────

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// Runs the choice-resolved modified protocol n_runs times in Hybrid mode and
// averages the product of the two ±1 outcomes per run.  Standard error is
// sqrt((1 − mean²)/n), exact for ±1-valued products.  Run i draws from
// rng.child(i), so results do not depend on scheduling.
McEstimate mc_estimate_pair(SuperChoice alice_choice, SuperChoice bob_choice,
                            const AngleBindings& angles, long long n_runs,
                            const RngStream& rng);

// The pair exposed by a choice combination: (Undo,Undo) → (a,b),
// (Keep,Undo) → (c,b), (Undo,Keep) → (a,d), (Keep,Keep) → (c,d).
PairId exposed_pair(SuperChoice alice_choice, SuperChoice bob_choice);

enum class TableMode { Exact, MonteCarlo };

// Four-pair table over ab, cb, cd, ad.  Exact mode evaluates the Born-rule
// correlation; MonteCarlo runs the corresponding choice combination with an
// independent child stream per pair.
CorrelationTable build_table(const AngleBindings& angles, long long n_runs_per_pair,
                             const RngStream& rng, TableMode mode);

// Every run measures all four observables projectively in sequence (Dan at
// d, Carol at c, Alice at a, Bob at b — no undos), yielding four definite ±1
// outcomes whose pairwise products feed all four correlations of one table.
CorrelationTable sequential_projective_table(const AngleBindings& angles,
                                             long long n_runs, const RngStream& rng);

}  // namespace wfsim
