#include "wfsim/agents.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wfsim {

// ── Angle ─────────────────────────────────────────────────────────────────

Angle::Angle(double radians) {
    if (!std::isfinite(radians))
        throw std::invalid_argument("Angle: value must be finite");
    constexpr double two_pi = 2.0 * M_PI;
    double r = std::fmod(radians, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;  // guards the r = -eps + 2π rounding corner
    radians_ = r;
}

// ── agents ────────────────────────────────────────────────────────────────

const char* agent_name(AgentId a) {
    switch (a) {
        case AgentId::Alice: return "Alice";
        case AgentId::Bob: return "Bob";
        case AgentId::Carol: return "Carol";
        case AgentId::Dan: return "Dan";
    }
    return "?";
}

bool is_friend_agent(AgentId a) { return a == AgentId::Carol || a == AgentId::Dan; }

bool is_superobserver(AgentId a) { return a == AgentId::Alice || a == AgentId::Bob; }

Factor system_of(AgentId a) {
    switch (a) {
        case AgentId::Alice:
        case AgentId::Carol: return Factor::S1;
        case AgentId::Bob:
        case AgentId::Dan: return Factor::S2;
    }
    throw std::invalid_argument("system_of: unknown agent");
}

Factor register_of(AgentId a) {
    switch (a) {
        case AgentId::Alice: return Factor::A;
        case AgentId::Bob: return Factor::B;
        case AgentId::Carol: return Factor::C;
        case AgentId::Dan: return Factor::D;
    }
    throw std::invalid_argument("register_of: unknown agent");
}

AgentId partner_friend(AgentId superobserver) {
    switch (superobserver) {
        case AgentId::Alice: return AgentId::Carol;
        case AgentId::Bob: return AgentId::Dan;
        default:
            throw std::invalid_argument("partner_friend: agent is not a superobserver");
    }
}

// ── outcomes ──────────────────────────────────────────────────────────────

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Plus: return "+1";
        case Outcome::Minus: return "-1";
        case Outcome::Ready: return "ready";
    }
    return "?";
}

double outcome_value(Outcome o, double ready_value) {
    switch (o) {
        case Outcome::Plus: return 1.0;
        case Outcome::Minus: return -1.0;
        case Outcome::Ready: return ready_value;
    }
    throw std::invalid_argument("outcome_value: unknown outcome");
}

// ── observables and dilations ─────────────────────────────────────────────

LocalOperator spin_observable(Angle theta, Factor system) {
    if (factor_dim(system) != 2)
        throw std::invalid_argument("spin_observable: target must be a system qubit");
    const double c = std::cos(theta.radians());
    const double s = std::sin(theta.radians());
    // cos θ·σ_z + sin θ·σ_x = [[cos θ, sin θ], [sin θ, −cos θ]]
    return LocalOperator({system}, {Cx{c, 0}, Cx{s, 0}, Cx{s, 0}, Cx{-c, 0}}, false);
}

namespace {

// U = P↑_θ ⊗ Π_u + P↓_θ ⊗ Π_d on system ⊗ register, where Π_u swaps
// Ready ↔ SawUp (SawDown fixed) and Π_d swaps Ready ↔ SawDown (SawUp fixed).
// The cross terms of U² vanish (P↑P↓ = 0) and the permutations square to the
// identity, so U² = I: measuring twice is the same as not measuring.
LocalOperator measurement_dilation(AgentId agent, Angle theta) {
    const double half = theta.radians() / 2.0;
    const double cu = std::cos(half), su = std::sin(half);
    // |↑_θ⟩ = (cu, su), |↓_θ⟩ = (−su, cu)
    const double p_up[2][2] = {{cu * cu, cu * su}, {su * cu, su * su}};
    const double p_dn[2][2] = {{su * su, -su * cu}, {-cu * su, cu * cu}};
    const double perm_u[3][3] = {{0, 1, 0}, {1, 0, 0}, {0, 0, 1}};
    const double perm_d[3][3] = {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}};
    std::vector<Cx> m(36, Cx{0.0, 0.0});
    for (int s = 0; s < 2; ++s)
        for (int sp = 0; sp < 2; ++sp)
            for (int r = 0; r < 3; ++r)
                for (int rp = 0; rp < 3; ++rp)
                    m[static_cast<std::size_t>(s * 3 + r) * 6 + (sp * 3 + rp)] =
                        Cx{p_up[s][sp] * perm_u[r][rp] + p_dn[s][sp] * perm_d[r][rp], 0.0};
    return LocalOperator({system_of(agent), register_of(agent)}, std::move(m), true);
}

// Cumulative sampling over branch probabilities; returns the index of the
// branch containing u, falling back to the last non-empty branch when
// rounding pushes the cumulative sum below 1.
int sample_branch(const double* probs, int count, RngStream& rng) {
    const double u = rng.next_double();
    double cum = 0.0;
    int last_nonzero = -1;
    for (int b = 0; b < count; ++b) {
        if (probs[b] > 0.0) last_nonzero = b;
        cum += probs[b];
        if (u < cum) return b;
    }
    return last_nonzero >= 0 ? last_nonzero : count - 1;
}

}  // namespace

LocalOperator friend_unitary(AgentId agent, Angle theta) {
    if (!is_friend_agent(agent))
        throw std::invalid_argument("friend_unitary: agent is a superobserver");
    return measurement_dilation(agent, theta);
}

LocalOperator super_unitary(AgentId agent, Angle theta) {
    if (!is_superobserver(agent))
        throw std::invalid_argument("super_unitary: agent is a friend");
    return measurement_dilation(agent, theta);
}

// ── projective measurement ────────────────────────────────────────────────

std::pair<Outcome, Ket> projective_measure(const Ket& ket, Factor target,
                                           const LocalOperator& obs, RngStream& rng) {
    if (obs.targets.size() != 1 || obs.targets[0] != target)
        throw std::invalid_argument("projective_measure: observable must act on the target factor");
    if (hermiticity_error(obs.matrix, obs.dim) > kInvariantTol)
        throw std::invalid_argument("projective_measure: observable is not Hermitian");
    const int d = obs.dim;
    // ±1 eigenvalues ⇔ M² = I for a Hermitian M.
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Cx s{0.0, 0.0};
            for (int k = 0; k < d; ++k)
                s += obs.matrix[static_cast<std::size_t>(i) * d + k] *
                     obs.matrix[static_cast<std::size_t>(k) * d + j];
            if (std::abs(s - Cx{i == j ? 1.0 : 0.0, 0.0}) > kInvariantTol)
                throw std::invalid_argument("projective_measure: observable must square to identity");
        }
    // Projectors P± = (I ± M)/2.
    auto projector = [&](double sign) {
        std::vector<Cx> p(static_cast<std::size_t>(d) * d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                p[static_cast<std::size_t>(i) * d + j] =
                    (Cx{i == j ? 1.0 : 0.0, 0.0} +
                     sign * obs.matrix[static_cast<std::size_t>(i) * d + j]) *
                    0.5;
        return LocalOperator({target}, std::move(p), false);
    };
    const Ket plus = apply(projector(+1.0), ket);
    const Ket minus = apply(projector(-1.0), ket);
    const double probs[2] = {plus.norm_sq(), minus.norm_sq()};
    const int branch = sample_branch(probs, 2, rng);
    if (probs[branch] < 1e-14)
        throw std::logic_error("projective_measure: sampled branch has degenerate probability");
    const Ket& chosen = branch == 0 ? plus : minus;
    Ket out{ket.space, chosen.amplitudes};
    const double scale = 1.0 / std::sqrt(probs[branch]);
    for (Cx& a : out.amplitudes) a *= scale;
    return {branch == 0 ? Outcome::Plus : Outcome::Minus, std::move(out)};
}

std::array<double, 3> register_probabilities(const Ket& ket, AgentId agent) {
    if (!ket.space) throw std::invalid_argument("register_probabilities: ket has no space");
    const Factor reg = register_of(agent);
    const int stride = ket.space->stride(reg);
    std::array<double, 3> probs{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < ket.amplitudes.size(); ++i)
        probs[(i / stride) % 3] += std::norm(ket.amplitudes[i]);
    return probs;
}

std::pair<Outcome, Ket> read_register(const Ket& ket, AgentId agent, RngStream& rng) {
    const std::array<double, 3> probs = register_probabilities(ket, agent);
    const int branch = sample_branch(probs.data(), 3, rng);
    if (probs[branch] < 1e-14)
        throw std::logic_error("read_register: sampled branch has degenerate probability");
    const Factor reg = register_of(agent);
    const int stride = ket.space->stride(reg);
    Ket out{ket.space, std::vector<Cx>(ket.amplitudes.size(), Cx{0.0, 0.0})};
    const double scale = 1.0 / std::sqrt(probs[branch]);
    for (std::size_t i = 0; i < ket.amplitudes.size(); ++i)
        if (static_cast<int>((i / stride) % 3) == branch)
            out.amplitudes[i] = ket.amplitudes[i] * scale;
    static const Outcome map[3] = {Outcome::Ready, Outcome::Plus, Outcome::Minus};
    return {map[branch], std::move(out)};
}

}  // namespace wfsim
