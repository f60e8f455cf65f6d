#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wfsim/agents.hpp"

namespace wfsim {

// ── protocol steps ────────────────────────────────────────────────────────
// Only executable step kinds exist at runtime; the per-run choices of the
// modified protocol are resolved at construction time (modified_protocol
// takes them as parameters), which keeps the runner branch-free.
enum class StepKind {
    PrepareSinglet,   // singlet on S1⊗S2, all registers Ready; always first
    FriendMeasure,    // friend's unitary dilation at an angle
    SuperMeasure,     // superobserver's unitary dilation at an angle
    Undo,             // superobserver re-applies the friend's involution
    ProjectiveRead,   // collapse an agent's register in the record basis
    ProjectiveSpin,   // collapse the agent's system qubit along an angle
};

const char* step_kind_name(StepKind k);

struct ProtocolStep {
    StepKind kind = StepKind::PrepareSinglet;
    AgentId agent = AgentId::Carol;   // the actor; unused for PrepareSinglet
    AgentId target = AgentId::Carol;  // Undo only: the friend being undone
    Angle angle;                      // measure steps only
};

struct Protocol {
    std::string name;
    std::vector<ProtocolStep> steps;
    AngleBindings angles;
};

// The two relativistic orderings of the same commuting operations, plus the
// choice-resolved modified experiment.
enum class Frame { AliceFrame, BobFrame };
enum class SuperChoice { Undo, KeepAndRead };

// Unitary: every measurement stays a dilation, nothing collapses.
// Hybrid: friends stay unitary; superobserver measurements and explicit
// register reads collapse.  Projective: every measurement collapses.
enum class RunMode { Unitary, Hybrid, Projective };

const char* frame_name(Frame f);
const char* super_choice_name(SuperChoice c);
const char* run_mode_name(RunMode m);

// ── validation ────────────────────────────────────────────────────────────

enum class ViolationKind {
    MissingPreparation,
    PreparationNotFirst,
    DuplicatePreparation,
    RoleMismatch,            // e.g. a friend issued as superobserver
    WiringMismatch,          // undo across laboratories (Alice on Dan)
    UndoWithoutMeasurement,  // nothing pending to reverse
    UndoAfterRead,           // the register's record was already projected
};

const char* violation_name(ViolationKind k);

struct Violation {
    ViolationKind kind;
    int step_index;         // offending step; −1 for protocol-level issues
    int other_index = -1;   // UndoAfterRead: the earlier read step
    std::string message;
};

// Empty iff the protocol is structurally sound.  Violations are data, not
// exceptions: the DSL layer turns them into positioned diagnostics.
std::vector<Violation> validate(const Protocol& p);

// ── construction ──────────────────────────────────────────────────────────

Protocol healey_protocol(Frame frame, const AngleBindings& angles);

// KeepAndRead replaces a superobserver's undo + own measurement with a
// projective read of the friend's register, so the four choice combinations
// expose the pairs (a,b), (c,b), (a,d), (c,d).
Protocol modified_protocol(SuperChoice alice_choice, SuperChoice bob_choice,
                           const AngleBindings& angles);

// The singlet (|↑↓⟩ − |↓↑⟩)/√2 with all four registers Ready.
Ket prepared_state();

// ── execution ─────────────────────────────────────────────────────────────

struct OutcomeEntry {
    int step_index;
    AgentId agent;
    Outcome outcome;
};

struct OutcomeRecord {
    std::vector<OutcomeEntry> entries;       // one per projective step executed
    std::optional<Ket> final_state;          // always set in Unitary mode
};

// Executes the steps in order; requires validate(p) to be empty.  In Unitary
// mode no entries are produced and the final state is returned; in the
// sampling modes, projective steps sample and collapse (deterministically
// for a given rng stream).  keep_final_state forces the final state into the
// record in sampling modes too.
OutcomeRecord run(const Protocol& p, RunMode mode, RngStream& rng,
                  bool keep_final_state = false);

// Exact ket after executing steps 0..step_index inclusive, so index 0 is the
// state right after preparation.  step_index == step count is accepted as an
// alias for the final state.  Only for protocols without projective steps.
Ket state_after(const Protocol& p, int step_index);

}  // namespace wfsim
