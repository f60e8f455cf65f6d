#include "wfsim/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace wfsim {

const char* step_kind_name(StepKind k) {
    switch (k) {
        case StepKind::PrepareSinglet: return "prepare";
        case StepKind::FriendMeasure: return "umeasure";
        case StepKind::SuperMeasure: return "smeasure";
        case StepKind::Undo: return "undo";
        case StepKind::ProjectiveRead: return "pread";
        case StepKind::ProjectiveSpin: return "pmeasure";
    }
    return "?";
}

const char* frame_name(Frame f) {
    return f == Frame::AliceFrame ? "alice" : "bob";
}

const char* super_choice_name(SuperChoice c) {
    return c == SuperChoice::Undo ? "undo" : "keep";
}

const char* run_mode_name(RunMode m) {
    switch (m) {
        case RunMode::Unitary: return "unitary";
        case RunMode::Hybrid: return "hybrid";
        case RunMode::Projective: return "projective";
    }
    return "?";
}

const char* violation_name(ViolationKind k) {
    switch (k) {
        case ViolationKind::MissingPreparation: return "MissingPreparation";
        case ViolationKind::PreparationNotFirst: return "PreparationNotFirst";
        case ViolationKind::DuplicatePreparation: return "DuplicatePreparation";
        case ViolationKind::RoleMismatch: return "RoleMismatch";
        case ViolationKind::WiringMismatch: return "WiringMismatch";
        case ViolationKind::UndoWithoutMeasurement: return "UndoWithoutMeasurement";
        case ViolationKind::UndoAfterRead: return "UndoAfterRead";
    }
    return "?";
}

// ── validation ────────────────────────────────────────────────────────────

std::vector<Violation> validate(const Protocol& p) {
    std::vector<Violation> out;
    const int n = static_cast<int>(p.steps.size());

    int first_prepare = -1;
    for (int i = 0; i < n; ++i)
        if (p.steps[i].kind == StepKind::PrepareSinglet) { first_prepare = i; break; }
    if (first_prepare == -1) {
        out.push_back({ViolationKind::MissingPreparation, -1, -1,
                       "protocol must begin with 'prepare singlet'"});
    } else if (first_prepare != 0) {
        out.push_back({ViolationKind::PreparationNotFirst, first_prepare, -1,
                       "'prepare singlet' must be the first step"});
    }
    for (int i = first_prepare + 1; i >= 0 && i < n; ++i)
        if (p.steps[i].kind == StepKind::PrepareSinglet)
            out.push_back({ViolationKind::DuplicatePreparation, i, -1,
                           "'prepare singlet' appears more than once"});

    // Per-friend bookkeeping: the pending (not yet undone) measurement and
    // the step at which the friend's register was projectively read.
    auto friend_slot = [](AgentId f) { return f == AgentId::Carol ? 0 : 1; };
    int pending[2] = {-1, -1};
    int read_at[2] = {-1, -1};

    for (int i = 0; i < n; ++i) {
        const ProtocolStep& st = p.steps[i];
        switch (st.kind) {
            case StepKind::PrepareSinglet:
                break;
            case StepKind::FriendMeasure:
                if (!is_friend_agent(st.agent)) {
                    out.push_back({ViolationKind::RoleMismatch, i, -1,
                                   std::string(agent_name(st.agent)) +
                                       " is a superobserver and cannot take a friend measurement"});
                } else {
                    pending[friend_slot(st.agent)] = i;
                }
                break;
            case StepKind::SuperMeasure:
                if (!is_superobserver(st.agent))
                    out.push_back({ViolationKind::RoleMismatch, i, -1,
                                   std::string(agent_name(st.agent)) +
                                       " is a friend and cannot take a superobserver measurement"});
                break;
            case StepKind::Undo: {
                if (!is_superobserver(st.agent) || !is_friend_agent(st.target)) {
                    out.push_back({ViolationKind::RoleMismatch, i, -1,
                                   "undo requires a superobserver acting on a friend"});
                    break;
                }
                if (system_of(st.agent) != system_of(st.target)) {
                    out.push_back({ViolationKind::WiringMismatch, i, -1,
                                   std::string(agent_name(st.agent)) + " cannot undo " +
                                       agent_name(st.target) +
                                       ": they act on different systems"});
                    break;
                }
                const int slot = friend_slot(st.target);
                if (read_at[slot] >= 0)
                    out.push_back({ViolationKind::UndoAfterRead, i, read_at[slot],
                                   std::string("register ") + factor_name(register_of(st.target)) +
                                       " was projectively read at step " +
                                       std::to_string(read_at[slot]) +
                                       "; its record cannot be erased unitarily"});
                if (pending[slot] < 0)
                    out.push_back({ViolationKind::UndoWithoutMeasurement, i, -1,
                                   std::string(agent_name(st.target)) +
                                       " has no pending measurement to undo"});
                else
                    pending[slot] = -1;
                break;
            }
            case StepKind::ProjectiveRead:
                if (is_friend_agent(st.agent) && read_at[friend_slot(st.agent)] < 0)
                    read_at[friend_slot(st.agent)] = i;
                break;
            case StepKind::ProjectiveSpin:
                break;
        }
    }
    return out;
}

// ── construction ──────────────────────────────────────────────────────────

Protocol healey_protocol(Frame frame, const AngleBindings& angles) {
    Protocol p;
    p.angles = angles;
    auto fm = [](AgentId agent, Angle t) {
        return ProtocolStep{StepKind::FriendMeasure, agent, agent, t};
    };
    auto sm = [](AgentId agent, Angle t) {
        return ProtocolStep{StepKind::SuperMeasure, agent, agent, t};
    };
    auto undo = [](AgentId super, AgentId friend_agent) {
        return ProtocolStep{StepKind::Undo, super, friend_agent, Angle{}};
    };
    p.steps.push_back({StepKind::PrepareSinglet, AgentId::Carol, AgentId::Carol, Angle{}});
    if (frame == Frame::AliceFrame) {
        p.name = "healey-alice";
        p.steps.push_back(fm(AgentId::Dan, angles.d));
        p.steps.push_back(fm(AgentId::Carol, angles.c));
        p.steps.push_back(undo(AgentId::Alice, AgentId::Carol));
        p.steps.push_back(sm(AgentId::Alice, angles.a));
        p.steps.push_back(undo(AgentId::Bob, AgentId::Dan));
        p.steps.push_back(sm(AgentId::Bob, angles.b));
    } else {
        p.name = "healey-bob";
        p.steps.push_back(fm(AgentId::Carol, angles.c));
        p.steps.push_back(fm(AgentId::Dan, angles.d));
        p.steps.push_back(undo(AgentId::Bob, AgentId::Dan));
        p.steps.push_back(sm(AgentId::Bob, angles.b));
        p.steps.push_back(undo(AgentId::Alice, AgentId::Carol));
        p.steps.push_back(sm(AgentId::Alice, angles.a));
    }
    return p;
}

Protocol modified_protocol(SuperChoice alice_choice, SuperChoice bob_choice,
                           const AngleBindings& angles) {
    Protocol p;
    p.name = std::string("modified:") + super_choice_name(alice_choice) + "," +
             super_choice_name(bob_choice);
    p.angles = angles;
    p.steps.push_back({StepKind::PrepareSinglet, AgentId::Carol, AgentId::Carol, Angle{}});
    p.steps.push_back({StepKind::FriendMeasure, AgentId::Dan, AgentId::Dan, angles.d});
    p.steps.push_back({StepKind::FriendMeasure, AgentId::Carol, AgentId::Carol, angles.c});
    if (alice_choice == SuperChoice::Undo) {
        p.steps.push_back({StepKind::Undo, AgentId::Alice, AgentId::Carol, Angle{}});
        p.steps.push_back({StepKind::SuperMeasure, AgentId::Alice, AgentId::Alice, angles.a});
    } else {
        p.steps.push_back({StepKind::ProjectiveRead, AgentId::Carol, AgentId::Carol, Angle{}});
    }
    if (bob_choice == SuperChoice::Undo) {
        p.steps.push_back({StepKind::Undo, AgentId::Bob, AgentId::Dan, Angle{}});
        p.steps.push_back({StepKind::SuperMeasure, AgentId::Bob, AgentId::Bob, angles.b});
    } else {
        p.steps.push_back({StepKind::ProjectiveRead, AgentId::Dan, AgentId::Dan, Angle{}});
    }
    return p;
}

Ket prepared_state() {
    const SpacePtr space = make_canonical_space();
    Ket psi{space, std::vector<Cx>(space->total_dim(), Cx{0.0, 0.0})};
    const double w = 1.0 / std::sqrt(2.0);
    psi.amplitudes[flat_index(*space, {0, 1, 0, 0, 0, 0})] = Cx{w, 0.0};
    psi.amplitudes[flat_index(*space, {1, 0, 0, 0, 0, 0})] = Cx{-w, 0.0};
    return psi;
}

// ── execution ─────────────────────────────────────────────────────────────

namespace {

struct Executor {
    RunMode mode;
    RngStream* rng;  // null in pure-unitary execution (state_after)
    Ket psi;
    std::optional<Angle> pending[2];  // Carol, Dan
    std::vector<OutcomeEntry> entries;

    static int friend_slot(AgentId f) { return f == AgentId::Carol ? 0 : 1; }

    void record(int step_index, AgentId agent, Outcome o) {
        entries.push_back({step_index, agent, o});
    }

    void read(int step_index, AgentId agent) {
        auto [o, collapsed] = read_register(psi, agent, *rng);
        psi = std::move(collapsed);
        record(step_index, agent, o);
    }

    void execute(const ProtocolStep& st, int i) {
        switch (st.kind) {
            case StepKind::PrepareSinglet:
                psi = prepared_state();
                break;
            case StepKind::FriendMeasure:
                psi = apply(friend_unitary(st.agent, st.angle), psi);
                pending[friend_slot(st.agent)] = st.angle;
                if (mode == RunMode::Projective) read(i, st.agent);
                break;
            case StepKind::SuperMeasure:
                psi = apply(super_unitary(st.agent, st.angle), psi);
                if (mode != RunMode::Unitary) read(i, st.agent);
                break;
            case StepKind::Undo: {
                std::optional<Angle>& pend = pending[friend_slot(st.target)];
                if (!pend)
                    throw std::logic_error("run: undo with no pending measurement");
                psi = apply(friend_unitary(st.target, *pend), psi);
                pend.reset();
                break;
            }
            case StepKind::ProjectiveRead:
                if (mode == RunMode::Unitary)
                    throw std::invalid_argument("run: projective read in unitary mode");
                read(i, st.agent);
                break;
            case StepKind::ProjectiveSpin: {
                if (mode == RunMode::Unitary)
                    throw std::invalid_argument("run: projective spin measurement in unitary mode");
                const Factor sys = system_of(st.agent);
                auto [o, collapsed] =
                    projective_measure(psi, sys, spin_observable(st.angle, sys), *rng);
                psi = std::move(collapsed);
                record(i, st.agent, o);
                break;
            }
        }
    }
};

void require_valid(const Protocol& p, const char* who) {
    const std::vector<Violation> v = validate(p);
    if (!v.empty())
        throw std::invalid_argument(std::string(who) + ": protocol is invalid: " +
                                    v.front().message);
}

}  // namespace

OutcomeRecord run(const Protocol& p, RunMode mode, RngStream& rng, bool keep_final_state) {
    require_valid(p, "run");
    Executor ex{mode, &rng, Ket{}, {}, {}};
    for (int i = 0; i < static_cast<int>(p.steps.size()); ++i) ex.execute(p.steps[i], i);
    OutcomeRecord rec;
    rec.entries = std::move(ex.entries);
    if (mode == RunMode::Unitary || keep_final_state) rec.final_state = std::move(ex.psi);
    return rec;
}

Ket state_after(const Protocol& p, int step_index) {
    for (const ProtocolStep& st : p.steps)
        if (st.kind == StepKind::ProjectiveRead || st.kind == StepKind::ProjectiveSpin)
            throw std::invalid_argument("state_after: protocol contains projective steps");
    require_valid(p, "state_after");
    const int n = static_cast<int>(p.steps.size());
    if (step_index < 0 || step_index > n)
        throw std::out_of_range("state_after: step index out of range");
    if (step_index == n) step_index = n - 1;  // final-state alias
    Executor ex{RunMode::Unitary, nullptr, Ket{}, {}, {}};
    for (int i = 0; i <= step_index; ++i) ex.execute(p.steps[i], i);
    return std::move(ex.psi);
}

}  // namespace wfsim
