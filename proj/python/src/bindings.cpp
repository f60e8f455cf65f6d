// Python surface of the simulator.  The binding layer stays deliberately
// thin: enums travel as lowercase strings, tables and reports come back as
// plain dicts, and Protocol is the only exposed class.  All numerics live in
// the C++ core; nothing is recomputed here.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "wfsim/chsh.hpp"
#include "wfsim/correlations.hpp"
#include "wfsim/protocol.hpp"
#include "wfsim/protofile.hpp"
#include "wfsim/rng.hpp"

namespace py = pybind11;
using namespace wfsim;

namespace {

// ── string ↔ enum plumbing ────────────────────────────────────────────────

std::string lowered(std::string s) {
    for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

Frame frame_from(const std::string& s) {
    const std::string f = lowered(s);
    if (f == "alice") return Frame::AliceFrame;
    if (f == "bob") return Frame::BobFrame;
    throw std::invalid_argument("frame must be 'alice' or 'bob', got '" + s + "'");
}

SuperChoice choice_from(const std::string& s) {
    const std::string c = lowered(s);
    if (c == "undo") return SuperChoice::Undo;
    if (c == "keep") return SuperChoice::KeepAndRead;
    throw std::invalid_argument("choice must be 'undo' or 'keep', got '" + s + "'");
}

RunMode mode_from(const std::string& s) {
    const std::string m = lowered(s);
    if (m == "unitary") return RunMode::Unitary;
    if (m == "hybrid") return RunMode::Hybrid;
    if (m == "projective") return RunMode::Projective;
    throw std::invalid_argument("mode must be 'unitary', 'hybrid' or 'projective', got '" +
                                s + "'");
}

AgentId agent_from(const std::string& s) {
    const std::string a = lowered(s);
    if (a == "alice") return AgentId::Alice;
    if (a == "bob") return AgentId::Bob;
    if (a == "carol") return AgentId::Carol;
    if (a == "dan") return AgentId::Dan;
    throw std::invalid_argument("unknown agent '" + s + "'");
}

TableMode table_mode_from(const std::string& s) {
    const std::string m = lowered(s);
    if (m == "exact") return TableMode::Exact;
    if (m == "montecarlo") return TableMode::MonteCarlo;
    throw std::invalid_argument("mode must be 'exact' or 'montecarlo', got '" + s + "'");
}

// None means the canonical tuple (0, π/4, π/2, 3π/4); otherwise a sequence
// of four radian values in the order a, b, c, d.
AngleBindings bindings_from(const py::object& angles) {
    if (angles.is_none())
        return {Angle(0.0), Angle(M_PI / 4), Angle(M_PI / 2), Angle(3 * M_PI / 4)};
    const auto seq = angles.cast<std::vector<double>>();
    if (seq.size() != 4)
        throw std::invalid_argument("angles must hold exactly four values (a, b, c, d)");
    return {Angle(seq[0]), Angle(seq[1]), Angle(seq[2]), Angle(seq[3])};
}

// ── result shaping ────────────────────────────────────────────────────────

py::dict entry_dict(const CorrelationEntry& e) {
    py::dict d;
    d["value"] = e.value;
    d["stderr"] = e.std_error;
    d["n_runs"] = e.n_runs;
    d["source"] = source_name(e.source);
    return d;
}

py::dict table_dict(const CorrelationTable& t) {
    py::dict d;
    for (const PairId& id : standard_pairs())
        d[pair_name(id).c_str()] = entry_dict(t.at(id));
    return d;
}

py::dict report_dict(const ChshReport& r) {
    py::list subs;
    for (const Substitution& s : r.substitutions) {
        py::dict sub;
        sub["pair"] = pair_name(s.pair);
        sub["value"] = s.assigned;
        sub["tag"] = zero_tag_name(s.tag);
        subs.append(sub);
    }
    py::dict d;
    d["value"] = r.value;
    d["classical_bound"] = r.classical_bound;
    d["tsirelson_bound"] = r.tsirelson_bound;
    d["combined_stderr"] = r.combined_std_error;
    d["classification"] = chsh_class_name(r.classification);
    d["substitutions"] = subs;
    d["correlations"] = table_dict(r.correlations_used);
    return d;
}

// Only the two cross-frame pairs have a frame argument behind a zero
// assignment; the CLI enforces the same restriction.
std::vector<PairId> pairs_from(const std::vector<std::string>& names) {
    std::vector<PairId> ids;
    for (const std::string& n : names) {
        const std::optional<PairId> id = pair_from_name(n);
        const PairId ad = canonical_pair(PairLabel::a, PairLabel::d);
        const PairId cb = canonical_pair(PairLabel::c, PairLabel::b);
        if (!id || (*id != ad && *id != cb))
            throw std::invalid_argument("zeros must name 'ad' or 'cb', got '" + n + "'");
        ids.push_back(*id);
    }
    return ids;
}

// Parse failures surface as a ValueError carrying every diagnostic.
Protocol parse_or_raise(const std::string& text) {
    const ParseResult r = parse_protocol_text(text);
    if (r.protocol) return *r.protocol;
    std::string msg = "invalid protocol";
    for (const ParseDiagnostic& d : r.diagnostics)
        msg += "\n  line " + std::to_string(d.line) + ", column " +
               std::to_string(d.column) + ": " + d.message;
    throw std::invalid_argument(msg);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "exact statevector simulator for extended Wigner's-friend experiments";
    m.attr("__version__") = "1.0.0";
    m.attr("CLASSICAL_BOUND") = kClassicalBound;
    m.attr("TSIRELSON_BOUND") = kTsirelsonBound;

    py::class_<Protocol>(m, "Protocol")
        .def_readonly("name", &Protocol::name)
        .def_property_readonly("angles",
                               [](const Protocol& p) {
                                   return py::make_tuple(p.angles.a.radians(),
                                                         p.angles.b.radians(),
                                                         p.angles.c.radians(),
                                                         p.angles.d.radians());
                               })
        .def_property_readonly("steps",
                               [](const Protocol& p) {
                                   py::list steps;
                                   for (const ProtocolStep& s : p.steps) {
                                       py::dict d;
                                       d["kind"] = step_kind_name(s.kind);
                                       if (s.kind != StepKind::PrepareSinglet)
                                           d["agent"] = agent_name(s.agent);
                                       if (s.kind == StepKind::Undo)
                                           d["target"] = agent_name(s.target);
                                       if (s.kind == StepKind::FriendMeasure ||
                                           s.kind == StepKind::SuperMeasure ||
                                           s.kind == StepKind::ProjectiveSpin)
                                           d["angle"] = s.angle.radians();
                                       steps.append(d);
                                   }
                                   return steps;
                               })
        .def("serialize", [](const Protocol& p) { return serialize_protocol(p); })
        .def("__str__", [](const Protocol& p) { return serialize_protocol(p); })
        .def("__repr__", [](const Protocol& p) {
            return "<Protocol '" + p.name + "', " + std::to_string(p.steps.size()) +
                   " steps>";
        });

    m.def(
        "healey",
        [](const std::string& frame, const py::object& angles) {
            return healey_protocol(frame_from(frame), bindings_from(angles));
        },
        py::arg("frame") = "alice", py::arg("angles") = py::none(),
        "Original two-superobserver protocol in the given frame ordering.");

    m.def(
        "modified",
        [](const std::string& alice, const std::string& bob, const py::object& angles) {
            return modified_protocol(choice_from(alice), choice_from(bob),
                                     bindings_from(angles));
        },
        py::arg("alice") = "undo", py::arg("bob") = "undo",
        py::arg("angles") = py::none(),
        "Choice-resolved modified protocol; each superobserver either undoes "
        "their friend or keeps and reads the friend's record.");

    m.def("parse", &parse_or_raise, py::arg("text"),
          "Parse protocol text; raises ValueError with positioned diagnostics.");

    m.def(
        "diagnostics",
        [](const std::string& text) {
            py::list out;
            for (const ParseDiagnostic& d : parse_protocol_text(text).diagnostics) {
                py::dict item;
                item["line"] = d.line;
                item["column"] = d.column;
                item["severity"] = severity_name(d.severity);
                item["message"] = d.message;
                out.append(item);
            }
            return out;
        },
        py::arg("text"), "All parse and validation diagnostics for protocol text.");

    m.def(
        "run",
        [](const Protocol& p, const std::string& mode, std::uint64_t seed) {
            RngStream rng(seed);
            const OutcomeRecord rec = run(p, mode_from(mode), rng, true);
            py::list outcomes;
            for (const OutcomeEntry& e : rec.entries) {
                py::dict o;
                o["step"] = e.step_index;
                o["agent"] = agent_name(e.agent);
                o["value"] = static_cast<int>(outcome_value(e.outcome));
                outcomes.append(o);
            }
            py::dict registers;
            for (AgentId a : {AgentId::Carol, AgentId::Dan, AgentId::Alice, AgentId::Bob}) {
                const std::array<double, 3> probs =
                    register_probabilities(*rec.final_state, a);
                py::dict r;
                r["ready"] = probs[0];
                r["up"] = probs[1];
                r["down"] = probs[2];
                registers[agent_name(a)] = r;
            }
            py::dict d;
            d["outcomes"] = outcomes;
            d["registers"] = registers;
            d["norm"] = rec.final_state->norm();
            return d;
        },
        py::arg("protocol"), py::arg("mode") = "hybrid", py::arg("seed") = 0,
        "Execute a protocol once; returns sampled outcomes and the final "
        "register probabilities.");

    m.def(
        "state_after",
        [](const Protocol& p, int step_index) {
            return state_after(p, step_index).amplitudes;
        },
        py::arg("protocol"), py::arg("step_index"),
        "Exact composite-state amplitudes after the given step (row-major over "
        "S1, S2, C, D, A, B).");

    m.def(
        "register_probabilities",
        [](const Protocol& p, int step_index, const std::string& agent) {
            const std::array<double, 3> probs =
                register_probabilities(state_after(p, step_index), agent_from(agent));
            return py::make_tuple(probs[0], probs[1], probs[2]);
        },
        py::arg("protocol"), py::arg("step_index"), py::arg("agent"),
        "(ready, up, down) probabilities of an agent's register after a step.");

    m.def(
        "register_correlation",
        [](const Protocol& p, int step_index, const std::string& x, const std::string& y,
           double ready_value) {
            return register_correlation(state_after(p, step_index), agent_from(x),
                                        agent_from(y), ready_value);
        },
        py::arg("protocol"), py::arg("step_index"), py::arg("x") = "carol",
        py::arg("y") = "bob", py::arg("ready_value") = 0.0,
        "Expectation of the two-register record product, Ready mapping to "
        "ready_value.");

    m.def(
        "exact_correlation",
        [](double x, double y) { return exact_pair_correlation(Angle(x), Angle(y)); },
        py::arg("x"), py::arg("y"),
        "Born-rule singlet correlation for directions x and y (equals "
        "-cos(x - y)).");

    m.def(
        "correlations",
        [](const py::object& angles, const std::string& mode, long long n_runs,
           std::uint64_t seed) {
            return table_dict(build_table(bindings_from(angles), n_runs, RngStream(seed),
                                          table_mode_from(mode)));
        },
        py::arg("angles") = py::none(), py::arg("mode") = "exact",
        py::arg("n_runs") = 100000, py::arg("seed") = 42,
        "Correlation table over the pairs ab, cb, cd, ad.");

    m.def(
        "sequential_correlations",
        [](const py::object& angles, long long n_runs, std::uint64_t seed) {
            return table_dict(
                sequential_projective_table(bindings_from(angles), n_runs, RngStream(seed)));
        },
        py::arg("angles") = py::none(), py::arg("n_runs") = 100000, py::arg("seed") = 42,
        "Table from runs where all four observables are measured projectively "
        "in sequence.");

    m.def(
        "chsh",
        [](const py::object& angles, const std::vector<std::string>& zeros,
           const std::string& mode, long long n_runs, std::uint64_t seed) {
            const CorrelationTable t = build_table(bindings_from(angles), n_runs,
                                                   RngStream(seed), table_mode_from(mode));
            return report_dict(substitute_and_evaluate(t, pairs_from(zeros)));
        },
        py::arg("angles") = py::none(), py::arg("zeros") = std::vector<std::string>{},
        py::arg("mode") = "exact", py::arg("n_runs") = 100000, py::arg("seed") = 42,
        "CHSH combination with optional frame-motivated zero substitutions.");

    m.def("lhv_bound", &lhv_bound,
          "Maximum CHSH combination over deterministic +/-1 assignments (exactly 2).");

    m.def(
        "optimal_angles",
        [](double grid_step) {
            const AngleSearchResult r = optimal_angles(Angle(grid_step));
            return py::make_tuple(py::make_tuple(r.angles.a.radians(), r.angles.b.radians(),
                                                 r.angles.c.radians(), r.angles.d.radians()),
                                  r.value);
        },
        py::arg("grid_step"),
        "Grid search maximizing the exact CHSH combination; returns "
        "((a, b, c, d), value).");
}
