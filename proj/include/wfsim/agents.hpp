#pragma once

#include <array>
#include <utility>

#include "wfsim/qstate.hpp"
#include "wfsim/rng.hpp"

namespace wfsim {

// ── measurement directions ────────────────────────────────────────────────
// Directions live in the x–z plane, so one angle parameterizes them; all
// correlation functions depend only on angle differences.  Values are
// normalized into [0, 2π) on construction (exact for inputs already in
// range, since fmod is exact).
class Angle {
public:
    Angle() = default;
    Angle(double radians);  // implicit: angle bindings read naturally
    double radians() const { return radians_; }

private:
    double radians_ = 0.0;
};

// The four measurement directions of one experiment: a and b belong to the
// superobservers Alice and Bob, c and d to the friends Carol and Dan.
struct AngleBindings {
    Angle a, b, c, d;
};

// ── agents ────────────────────────────────────────────────────────────────
// Fixed wiring: Carol and Alice act on system S1 (registers C and A); Dan
// and Bob act on system S2 (registers D and B).  Alice is the superobserver
// over Carol's laboratory, Bob over Dan's.
enum class AgentId { Alice, Bob, Carol, Dan };

const char* agent_name(AgentId a);
bool is_friend_agent(AgentId a);   // Carol, Dan
bool is_superobserver(AgentId a);  // Alice, Bob
Factor system_of(AgentId a);
Factor register_of(AgentId a);
AgentId partner_friend(AgentId superobserver);  // Alice → Carol, Bob → Dan

// ── outcomes ──────────────────────────────────────────────────────────────
// Ready marks a register read that found no record (unmeasured or erased).
enum class Outcome { Plus, Minus, Ready };

const char* outcome_name(Outcome o);  // "+1", "-1", "ready"
// Numeric value used in correlation arithmetic; Ready maps to ready_value
// (default 0), and the independence of results from that choice is itself a
// tested property.
double outcome_value(Outcome o, double ready_value = 0.0);

// ── observables and dilations ─────────────────────────────────────────────

// σ(θ) = cos θ·σ_z + sin θ·σ_x on the given system qubit.  Eigenvectors
// (the pinned sign convention):
//   |↑_θ⟩ =  cos(θ/2)|↑⟩ + sin(θ/2)|↓⟩   (eigenvalue +1)
//   |↓_θ⟩ = −sin(θ/2)|↑⟩ + cos(θ/2)|↓⟩   (eigenvalue −1)
LocalOperator spin_observable(Angle theta, Factor system = Factor::S1);

// Measurement dilation of a friend: a unitary on system ⊗ own register that,
// controlled on |↑_θ⟩, swaps Ready ↔ SawUp and, controlled on |↓_θ⟩, swaps
// Ready ↔ SawDown.  Both register permutations are transpositions, so the
// whole operator is an involution: applying it again undoes the measurement.
LocalOperator friend_unitary(AgentId agent, Angle theta);

// Identical construction for a superobserver, targeting their own register
// (Alice on S1⊗A, Bob on S2⊗B).
LocalOperator super_unitary(AgentId agent, Angle theta);

// ── projective measurement ────────────────────────────────────────────────

// Samples an outcome of the Hermitian ±1-valued observable on the target
// factor with Born probabilities and returns the renormalized collapsed ket.
// Deterministic given the rng stream.  Throws std::logic_error if the
// sampled branch has probability below 1e-14 (internal inconsistency).
std::pair<Outcome, Ket> projective_measure(const Ket& ket, Factor target,
                                           const LocalOperator& obs, RngStream& rng);

// Probabilities of finding the agent's register in Ready / SawUp / SawDown.
std::array<double, 3> register_probabilities(const Ket& ket, AgentId agent);

// Projective read of the agent's register in the {Ready, SawUp, SawDown}
// basis; SawUp ↦ Plus, SawDown ↦ Minus.
std::pair<Outcome, Ket> read_register(const Ket& ket, AgentId agent, RngStream& rng);

}  // namespace wfsim
