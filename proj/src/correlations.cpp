#include "wfsim/correlations.hpp"

#include <cmath>
#include <stdexcept>

namespace wfsim {

// ── pair identifiers ──────────────────────────────────────────────────────

const char* pair_label_name(PairLabel l) {
    switch (l) {
        case PairLabel::a: return "a";
        case PairLabel::b: return "b";
        case PairLabel::c: return "c";
        case PairLabel::d: return "d";
    }
    return "?";
}

PairId canonical_pair(PairLabel x, PairLabel y) {
    if (x == y) throw std::invalid_argument("canonical_pair: labels must differ");
    for (const PairId& std_pair : standard_pairs())
        if ((std_pair.first == x && std_pair.second == y) ||
            (std_pair.first == y && std_pair.second == x))
            return std_pair;
    return x < y ? PairId{x, y} : PairId{y, x};
}

const std::array<PairId, 4>& standard_pairs() {
    static const std::array<PairId, 4> pairs = {
        PairId{PairLabel::a, PairLabel::b},
        PairId{PairLabel::c, PairLabel::b},
        PairId{PairLabel::c, PairLabel::d},
        PairId{PairLabel::a, PairLabel::d},
    };
    return pairs;
}

std::string pair_name(PairId id) {
    return std::string(pair_label_name(id.first)) + pair_label_name(id.second);
}

std::optional<PairId> pair_from_name(const std::string& name) {
    if (name.size() != 2) return std::nullopt;
    auto label = [](char ch) -> std::optional<PairLabel> {
        switch (ch) {
            case 'a': return PairLabel::a;
            case 'b': return PairLabel::b;
            case 'c': return PairLabel::c;
            case 'd': return PairLabel::d;
        }
        return std::nullopt;
    };
    const auto x = label(name[0]), y = label(name[1]);
    if (!x || !y || *x == *y) return std::nullopt;
    return canonical_pair(*x, *y);
}

Angle angle_of(PairLabel l, const AngleBindings& angles) {
    switch (l) {
        case PairLabel::a: return angles.a;
        case PairLabel::b: return angles.b;
        case PairLabel::c: return angles.c;
        case PairLabel::d: return angles.d;
    }
    throw std::invalid_argument("angle_of: unknown label");
}

// ── correlation tables ────────────────────────────────────────────────────

const char* source_name(CorrelationSource s) {
    switch (s) {
        case CorrelationSource::Exact: return "exact";
        case CorrelationSource::MonteCarlo: return "montecarlo";
        case CorrelationSource::Assigned: return "assigned";
    }
    return "?";
}

bool CorrelationTable::has(PairId id) const { return entries.count(id) > 0; }

const CorrelationEntry& CorrelationTable::at(PairId id) const {
    const auto it = entries.find(id);
    if (it == entries.end())
        throw std::out_of_range("CorrelationTable: missing pair " + pair_name(id));
    return it->second;
}

void CorrelationTable::set(PairId id, CorrelationEntry e) { entries[id] = e; }

double CorrelationTable::combined_std_error() const {
    double sum_sq = 0.0;
    for (const auto& [id, e] : entries) sum_sq += e.std_error * e.std_error;
    return std::sqrt(sum_sq);
}

// ── exact correlations ────────────────────────────────────────────────────

double exact_pair_correlation(Angle theta_x, Angle theta_y) {
    const Ket psi = prepared_state();
    const LocalOperator obs = tensor(spin_observable(theta_x, Factor::S1),
                                     spin_observable(theta_y, Factor::S2));
    return expectation(obs, psi);
}

double register_correlation(const Ket& ket, AgentId x, AgentId y, double ready_value) {
    if (x == y)
        throw std::invalid_argument("register_correlation: agents must differ");
    auto record_z = [&](AgentId agent) {
        // Z = diag(ready_value, +1, −1) in the {Ready, SawUp, SawDown} basis.
        return LocalOperator({register_of(agent)},
                             {Cx{ready_value, 0}, Cx{0, 0}, Cx{0, 0},
                              Cx{0, 0}, Cx{1, 0}, Cx{0, 0},
                              Cx{0, 0}, Cx{0, 0}, Cx{-1, 0}},
                             false);
    };
    return expectation(tensor(record_z(x), record_z(y)), ket);
}

// ── Monte Carlo estimation ────────────────────────────────────────────────

PairId exposed_pair(SuperChoice alice_choice, SuperChoice bob_choice) {
    const PairLabel alice_label =
        alice_choice == SuperChoice::Undo ? PairLabel::a : PairLabel::c;
    const PairLabel bob_label =
        bob_choice == SuperChoice::Undo ? PairLabel::b : PairLabel::d;
    return canonical_pair(alice_label, bob_label);
}

namespace {

double mean_std_error(double mean, long long n) {
    return std::sqrt(std::max(0.0, (1.0 - mean * mean) / static_cast<double>(n)));
}

}  // namespace

McEstimate mc_estimate_pair(SuperChoice alice_choice, SuperChoice bob_choice,
                            const AngleBindings& angles, long long n_runs,
                            const RngStream& rng) {
    if (n_runs < 1) throw std::invalid_argument("mc_estimate_pair: n_runs must be >= 1");
    const Protocol p = modified_protocol(alice_choice, bob_choice, angles);
    double sum = 0.0;
    for (long long i = 0; i < n_runs; ++i) {
        RngStream stream = rng.child(static_cast<std::uint64_t>(i));
        const OutcomeRecord rec = run(p, RunMode::Hybrid, stream);
        if (rec.entries.size() != 2)
            throw std::logic_error("mc_estimate_pair: expected exactly two outcomes per run");
        double product = 1.0;
        for (const OutcomeEntry& e : rec.entries) {
            if (e.outcome == Outcome::Ready)
                throw std::logic_error("mc_estimate_pair: read register produced no record");
            product *= outcome_value(e.outcome);
        }
        sum += product;
    }
    const double mean = sum / static_cast<double>(n_runs);
    return {mean, mean_std_error(mean, n_runs)};
}

CorrelationTable build_table(const AngleBindings& angles, long long n_runs_per_pair,
                             const RngStream& rng, TableMode mode) {
    CorrelationTable table;
    if (mode == TableMode::Exact) {
        for (const PairId& id : standard_pairs()) {
            const double v = exact_pair_correlation(angle_of(id.first, angles),
                                                    angle_of(id.second, angles));
            table.set(id, {v, 0.0, 0, CorrelationSource::Exact});
        }
        return table;
    }
    // One choice combination per pair, each with its own child stream so the
    // four estimates are independent and scheduling-invariant.
    static const std::pair<SuperChoice, SuperChoice> choices[4] = {
        {SuperChoice::Undo, SuperChoice::Undo},          // (a,b)
        {SuperChoice::KeepAndRead, SuperChoice::Undo},   // (c,b)
        {SuperChoice::KeepAndRead, SuperChoice::KeepAndRead},  // (c,d)
        {SuperChoice::Undo, SuperChoice::KeepAndRead},   // (a,d)
    };
    for (int k = 0; k < 4; ++k) {
        const PairId id = exposed_pair(choices[k].first, choices[k].second);
        const McEstimate est = mc_estimate_pair(choices[k].first, choices[k].second, angles,
                                                n_runs_per_pair,
                                                rng.child(static_cast<std::uint64_t>(k)));
        table.set(id, {est.value, est.std_error, n_runs_per_pair,
                       CorrelationSource::MonteCarlo});
    }
    return table;
}

CorrelationTable sequential_projective_table(const AngleBindings& angles,
                                             long long n_runs, const RngStream& rng) {
    if (n_runs < 1)
        throw std::invalid_argument("sequential_projective_table: n_runs must be >= 1");
    Protocol p;
    p.name = "sequential-projective";
    p.angles = angles;
    p.steps.push_back({StepKind::PrepareSinglet, AgentId::Carol, AgentId::Carol, Angle{}});
    p.steps.push_back({StepKind::ProjectiveSpin, AgentId::Dan, AgentId::Dan, angles.d});
    p.steps.push_back({StepKind::ProjectiveSpin, AgentId::Carol, AgentId::Carol, angles.c});
    p.steps.push_back({StepKind::ProjectiveSpin, AgentId::Alice, AgentId::Alice, angles.a});
    p.steps.push_back({StepKind::ProjectiveSpin, AgentId::Bob, AgentId::Bob, angles.b});

    double sum_ab = 0.0, sum_cb = 0.0, sum_cd = 0.0, sum_ad = 0.0;
    for (long long i = 0; i < n_runs; ++i) {
        RngStream stream = rng.child(static_cast<std::uint64_t>(i));
        const OutcomeRecord rec = run(p, RunMode::Projective, stream);
        double va = 0, vb = 0, vc = 0, vd = 0;
        for (const OutcomeEntry& e : rec.entries) {
            if (e.outcome == Outcome::Ready)
                throw std::logic_error("sequential_projective_table: indefinite outcome");
            const double v = outcome_value(e.outcome);
            switch (e.agent) {
                case AgentId::Alice: va = v; break;
                case AgentId::Bob: vb = v; break;
                case AgentId::Carol: vc = v; break;
                case AgentId::Dan: vd = v; break;
            }
        }
        sum_ab += va * vb;
        sum_cb += vc * vb;
        sum_cd += vc * vd;
        sum_ad += va * vd;
    }
    const double n = static_cast<double>(n_runs);
    CorrelationTable table;
    const double means[4] = {sum_ab / n, sum_cb / n, sum_cd / n, sum_ad / n};
    for (int k = 0; k < 4; ++k)
        table.set(standard_pairs()[k], {means[k], mean_std_error(means[k], n_runs), n_runs,
                                        CorrelationSource::MonteCarlo});
    return table;
}

}  // namespace wfsim
