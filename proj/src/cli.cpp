#include "wfsim/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "wfsim/chsh.hpp"
#include "wfsim/correlations.hpp"
#include "wfsim/protofile.hpp"
#include "wfsim/rng.hpp"

namespace wfsim {

namespace {

using json = nlohmann::ordered_json;

// All reported numbers are rounded to 10 significant digits before they are
// printed, so identical flags give byte-identical output across platforms.
// Magnitudes below 1e-15 are floating-point residue from exact cancellations
// (%.10g would otherwise print them at full relative precision) and are
// flushed to zero.
double round10(double v) {
    if (!std::isfinite(v)) throw std::logic_error("cli: non-finite value in report");
    if (std::abs(v) < 1e-15) return 0.0;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::strtod(buf, nullptr);
}

std::string format10(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", round10(v));
    return buf;
}

// ── shared option plumbing ────────────────────────────────────────────────

struct Options {
    std::string protocol_path;
    std::string builtin;
    std::string frame;
    std::string angles_text;
    std::string mode;
    std::string output = "json";
    std::uint64_t seed = 42;
    long long n_runs = 100000;
    std::vector<std::string> zeros;
};

void add_source_flags(CLI::App* sub, Options& o) {
    auto* p = sub->add_option("--protocol", o.protocol_path, "protocol file (.wfp)");
    auto* b = sub->add_option(
        "--builtin", o.builtin,
        "builtin protocol: healey-alice, healey-bob, modified:<undo|keep>,<undo|keep>");
    auto* f = sub->add_option("--frame", o.frame, "shorthand for --builtin healey-<frame>")
                  ->check(CLI::IsMember({"alice", "bob"}));
    p->excludes(b);
    p->excludes(f);
    b->excludes(f);
}

void add_angles_flag(CLI::App* sub, Options& o) {
    sub->add_option("--angles", o.angles_text,
                    "comma-separated bindings, e.g. a=0,b=pi/4,c=pi/2,d=3pi/4 "
                    "(default: exactly that canonical tuple)");
}

void add_seed_flag(CLI::App* sub, Options& o) {
    sub->add_option("--seed", o.seed, "rng seed, used verbatim (default 42)");
}

void add_n_runs_flag(CLI::App* sub, Options& o) {
    sub->add_option("--n-runs", o.n_runs, "number of runs (default 100000)")
        ->check(CLI::PositiveNumber);
}

std::vector<AngleOverride> parse_angle_overrides(const std::string& text) {
    std::vector<AngleOverride> overrides;
    if (text.empty()) return overrides;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= item.size())
            throw std::invalid_argument("--angles: expected <symbol>=<angle>, got '" +
                                        item + "'");
        std::string sym = item.substr(0, eq);
        if (sym.size() == 1 && sym[0] >= 'A' && sym[0] <= 'D')
            sym[0] = static_cast<char>(sym[0] - 'A' + 'a');
        if (sym.size() != 1 || sym[0] < 'a' || sym[0] > 'd')
            throw std::invalid_argument("--angles: unknown symbol '" +
                                        item.substr(0, eq) + "' (expected a, b, c or d)");
        const std::string expr = item.substr(eq + 1);
        const auto value = parse_angle_literal(expr);
        if (!value)
            throw std::invalid_argument("--angles: bad angle expression '" + expr + "'");
        for (const AngleOverride& prev : overrides)
            if (prev.symbol == sym[0])
                throw std::invalid_argument(std::string("--angles: duplicate binding for '") +
                                            sym[0] + "'");
        overrides.push_back({sym[0], Angle(*value)});
    }
    return overrides;
}

AngleBindings canonical_angles() {
    return AngleBindings{Angle(0.0), Angle(M_PI / 4), Angle(M_PI / 2), Angle(3 * M_PI / 4)};
}

AngleBindings make_bindings(const std::vector<AngleOverride>& overrides) {
    AngleBindings b = canonical_angles();
    for (const AngleOverride& ov : overrides) {
        switch (ov.symbol) {
            case 'a': b.a = ov.value; break;
            case 'b': b.b = ov.value; break;
            case 'c': b.c = ov.value; break;
            case 'd': b.d = ov.value; break;
        }
    }
    return b;
}

Protocol builtin_protocol(const std::string& name, const AngleBindings& angles) {
    if (name == "healey-alice") return healey_protocol(Frame::AliceFrame, angles);
    if (name == "healey-bob") return healey_protocol(Frame::BobFrame, angles);
    if (name.rfind("modified:", 0) == 0) {
        const std::string rest = name.substr(9);
        const std::size_t comma = rest.find(',');
        auto choice = [](const std::string& s) -> SuperChoice {
            if (s == "undo") return SuperChoice::Undo;
            if (s == "keep") return SuperChoice::KeepAndRead;
            throw std::invalid_argument("--builtin: choice must be 'undo' or 'keep', got '" +
                                        s + "'");
        };
        if (comma == std::string::npos)
            throw std::invalid_argument(
                "--builtin: expected modified:<alice_choice>,<bob_choice>");
        return modified_protocol(choice(rest.substr(0, comma)),
                                 choice(rest.substr(comma + 1)), angles);
    }
    throw std::invalid_argument("--builtin: unknown protocol '" + name +
                                "' (expected healey-alice, healey-bob, or "
                                "modified:<undo|keep>,<undo|keep>)");
}

// 0 on success; 2 after printing diagnostics.  Files get positioned
// file:line:col diagnostics; builtins get the canonical angles overlaid with
// any --angles overrides.
int load_protocol(const Options& o, std::ostream& err, Protocol& proto) {
    const int sources = (o.protocol_path.empty() ? 0 : 1) + (o.builtin.empty() ? 0 : 1) +
                        (o.frame.empty() ? 0 : 1);
    if (sources == 0) {
        err << "error: one of --protocol, --builtin, --frame is required\n";
        return 2;
    }
    const std::vector<AngleOverride> overrides = parse_angle_overrides(o.angles_text);
    if (!o.protocol_path.empty()) {
        std::ifstream in(o.protocol_path, std::ios::binary);
        if (!in) {
            err << "error: cannot open '" << o.protocol_path << "'\n";
            return 2;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        const ParseResult result = parse_protocol_text(ss.str(), o.protocol_path, overrides);
        for (const ParseDiagnostic& d : result.diagnostics)
            err << o.protocol_path << ":" << d.line << ":" << d.column << ": "
                << severity_name(d.severity) << ": " << d.message << "\n";
        if (!result.protocol) return 2;
        proto = *result.protocol;
        return 0;
    }
    const AngleBindings bindings = make_bindings(overrides);
    proto = builtin_protocol(o.builtin.empty() ? "healey-" + o.frame : o.builtin, bindings);
    return 0;
}

RunMode parse_run_mode(const std::string& name) {
    if (name == "unitary") return RunMode::Unitary;
    if (name == "hybrid") return RunMode::Hybrid;
    if (name == "projective") return RunMode::Projective;
    throw std::invalid_argument("--mode: unknown mode '" + name + "'");
}

json angles_json(const AngleBindings& b) {
    return json{{"a", round10(b.a.radians())},
                {"b", round10(b.b.radians())},
                {"c", round10(b.c.radians())},
                {"d", round10(b.d.radians())}};
}

json outcomes_json(const std::vector<OutcomeEntry>& entries) {
    json arr = json::array();
    for (const OutcomeEntry& e : entries)
        arr.push_back(json{{"step", e.step_index},
                           {"agent", agent_name(e.agent)},
                           {"outcome", outcome_name(e.outcome)}});
    return arr;
}

json table_json(const CorrelationTable& table) {
    json pairs = json::object();
    for (const PairId& id : standard_pairs()) {
        const CorrelationEntry& e = table.at(id);
        pairs[pair_name(id)] = json{{"value", round10(e.value)},
                                    {"stderr", round10(e.std_error)},
                                    {"n_runs", e.n_runs},
                                    {"source", source_name(e.source)}};
    }
    return pairs;
}

void table_csv(const CorrelationTable& table, std::ostream& out) {
    out << "pair,value,stderr,n_runs,source\n";
    for (const PairId& id : standard_pairs()) {
        const CorrelationEntry& e = table.at(id);
        out << pair_name(id) << "," << format10(e.value) << "," << format10(e.std_error)
            << "," << e.n_runs << "," << source_name(e.source) << "\n";
    }
}

// ── subcommand bodies ─────────────────────────────────────────────────────

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.output != "json") {
        err << "error: run supports only --output json\n";
        return 2;
    }
    Protocol proto;
    if (const int rc = load_protocol(o, err, proto)) return rc;
    const RunMode mode = parse_run_mode(o.mode);

    json report{{"command", "run"}, {"protocol", proto.name}, {"mode", run_mode_name(mode)}};
    if (mode == RunMode::Unitary) {
        RngStream rng(o.seed);  // never drawn from in unitary mode
        const OutcomeRecord record = run(proto, mode, rng, true);
        const Ket& psi = *record.final_state;
        json registers = json::object();
        for (AgentId agent : {AgentId::Carol, AgentId::Dan, AgentId::Alice, AgentId::Bob}) {
            const std::array<double, 3> p = register_probabilities(psi, agent);
            registers[agent_name(agent)] = json{{"ready", round10(p[0])},
                                                {"up", round10(p[1])},
                                                {"down", round10(p[2])}};
        }
        report["final_state"] = json{{"norm", round10(psi.norm())}, {"registers", registers}};
    } else {
        // Matches the first record of `sample` at the same seed.
        RngStream rng = RngStream(o.seed).child(0);
        const OutcomeRecord record = run(proto, mode, rng);
        report["seed"] = o.seed;
        report["outcomes"] = outcomes_json(record.entries);
    }
    out << report.dump(2) << "\n";
    return 0;
}

int cmd_sample(const Options& o, std::ostream& out, std::ostream& err) {
    Protocol proto;
    if (const int rc = load_protocol(o, err, proto)) return rc;
    const RunMode mode = parse_run_mode(o.mode);
    if (mode == RunMode::Unitary) {
        err << "error: sample needs a sampling mode (hybrid or projective)\n";
        return 2;
    }
    const RngStream master(o.seed);
    if (o.output == "csv") {
        out << "run,step,agent,outcome\n";
        for (long long i = 0; i < o.n_runs; ++i) {
            RngStream rng = master.child(static_cast<std::uint64_t>(i));
            const OutcomeRecord record = run(proto, mode, rng);
            for (const OutcomeEntry& e : record.entries)
                out << i << "," << e.step_index << "," << agent_name(e.agent) << ","
                    << outcome_name(e.outcome) << "\n";
        }
        return 0;
    }
    json runs = json::array();
    for (long long i = 0; i < o.n_runs; ++i) {
        RngStream rng = master.child(static_cast<std::uint64_t>(i));
        const OutcomeRecord record = run(proto, mode, rng);
        runs.push_back(json{{"run", i}, {"outcomes", outcomes_json(record.entries)}});
    }
    json report{{"command", "sample"}, {"protocol", proto.name},
                {"mode", run_mode_name(mode)}, {"seed", o.seed},
                {"n_runs", o.n_runs},          {"runs", std::move(runs)}};
    out << report.dump(2) << "\n";
    return 0;
}

int cmd_correlate(const Options& o, std::ostream& out, std::ostream&) {
    const AngleBindings bindings = make_bindings(parse_angle_overrides(o.angles_text));
    const TableMode mode = o.mode == "montecarlo" ? TableMode::MonteCarlo : TableMode::Exact;
    const CorrelationTable table =
        build_table(bindings, o.n_runs, RngStream(o.seed), mode);
    if (o.output == "csv") {
        table_csv(table, out);
        return 0;
    }
    json report{{"command", "correlate"},
                {"mode", o.mode},
                {"angles", angles_json(bindings)},
                {"seed", o.seed},
                {"n_runs", o.n_runs},
                {"pairs", table_json(table)}};
    out << report.dump(2) << "\n";
    return 0;
}

int cmd_chsh(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.output != "json") {
        err << "error: chsh supports only --output json\n";
        return 2;
    }
    const AngleBindings bindings = make_bindings(parse_angle_overrides(o.angles_text));
    const TableMode mode = o.mode == "montecarlo" ? TableMode::MonteCarlo : TableMode::Exact;
    const CorrelationTable table =
        build_table(bindings, o.n_runs, RngStream(o.seed), mode);
    std::vector<PairId> zero_pairs;
    for (const std::string& z : o.zeros) {
        const auto id = pair_from_name(z);
        if (!id) throw std::invalid_argument("--zero: unknown pair '" + z + "'");
        zero_pairs.push_back(*id);
    }
    const ChshReport result = substitute_and_evaluate(table, zero_pairs);

    json subs = json::array();
    for (const Substitution& s : result.substitutions)
        subs.push_back(json{{"pair", pair_name(s.pair)},
                            {"value", round10(s.assigned)},
                            {"tag", zero_tag_name(s.tag)}});
    json report{{"command", "chsh"},
                {"mode", o.mode},
                {"angles", angles_json(bindings)},
                {"seed", o.seed},
                {"n_runs", o.n_runs},
                {"value", round10(result.value)},
                {"classical_bound", round10(result.classical_bound)},
                {"tsirelson_bound", round10(result.tsirelson_bound)},
                {"combined_stderr", round10(result.combined_std_error)},
                {"classification", chsh_class_name(result.classification)},
                {"substitutions", std::move(subs)},
                {"correlations", table_json(result.correlations_used)}};
    out << report.dump(2) << "\n";
    return 0;
}

// ── invariant checks ──────────────────────────────────────────────────────

void require(bool ok, const std::string& message) {
    if (!ok) throw std::runtime_error(message);
}

double ket_distance(const Ket& x, const Ket& y) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.amplitudes.size(); ++i)
        sum += std::norm(x.amplitudes[i] - y.amplitudes[i]);
    return std::sqrt(sum);
}

void check_dilation_unitarity() {
    for (double theta : {0.0, 0.3, M_PI / 4, 1.0, M_PI / 2, 2.5, 3 * M_PI / 4})
        for (AgentId agent : {AgentId::Carol, AgentId::Dan, AgentId::Alice, AgentId::Bob}) {
            const LocalOperator u = is_friend_agent(agent)
                                        ? friend_unitary(agent, Angle(theta))
                                        : super_unitary(agent, Angle(theta));
            require(unitarity_error(u.matrix, u.dim) <= kInvariantTol,
                    "dilation is not unitary");
        }
}

void check_dilation_involution() {
    const Ket psi = prepared_state();
    for (double theta : {0.0, 0.7, M_PI / 4, 2.0}) {
        const LocalOperator u = friend_unitary(AgentId::Carol, Angle(theta));
        const Ket twice = apply(u, apply(u, psi));
        require(ket_distance(twice, psi) <= kInvariantTol, "applying twice is not identity");
    }
}

void check_undo_identity() {
    for (Frame frame : {Frame::AliceFrame, Frame::BobFrame}) {
        const Protocol p = healey_protocol(frame, canonical_angles());
        const Cx overlap = inner(state_after(p, 1), state_after(p, 3));
        require(std::abs(std::abs(overlap) - 1.0) <= kInvariantTol,
                "undo does not restore the pre-measurement state");
    }
}

void check_frame_equivalence() {
    const AngleBindings tuples[] = {canonical_angles(),
                                    {Angle(0.3), Angle(1.1), Angle(2.0), Angle(4.5)}};
    for (const AngleBindings& angles : tuples) {
        const Protocol pa = healey_protocol(Frame::AliceFrame, angles);
        const Protocol pb = healey_protocol(Frame::BobFrame, angles);
        const int last = static_cast<int>(pa.steps.size()) - 1;
        require(ket_distance(state_after(pa, last), state_after(pb, last)) <= kInvariantTol,
                "frames disagree on the final state");
    }
}

void check_correlation_closed_form() {
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const double x = 2 * M_PI * i / 5, y = 2 * M_PI * j / 5;
            require(std::abs(exact_pair_correlation(Angle(x), Angle(y)) + std::cos(x - y)) <=
                        kExactTol,
                    "correlation deviates from -cos(dx)");
        }
}

void check_record_zero() {
    const Protocol p = healey_protocol(Frame::AliceFrame, canonical_angles());
    for (int k : {2, 6}) {
        const Ket psi = state_after(p, k);
        for (double v : {-1.0, -0.5, 0.0, 0.5, 1.0})
            require(std::abs(register_correlation(psi, AgentId::Carol, AgentId::Bob, v)) <=
                        kExactTol,
                    "E(c,b) is not zero");
    }
}

void check_chsh_trichotomy() {
    const CorrelationTable table =
        build_table(canonical_angles(), 0, RngStream(0), TableMode::Exact);
    const double no_subs = substitute_and_evaluate(table, {}).value;
    require(std::abs(no_subs - kTsirelsonBound) <= kExactTol, "no-substitution value");
    const PairId ad = canonical_pair(PairLabel::a, PairLabel::d);
    const PairId cb = canonical_pair(PairLabel::c, PairLabel::b);
    const double one = substitute_and_evaluate(table, {ad}).value;
    require(std::abs(one - 3.0 / std::sqrt(2.0)) <= kExactTol, "one-substitution value");
    const ChshReport both = substitute_and_evaluate(table, {ad, cb});
    require(std::abs(both.value - std::sqrt(2.0)) <= kExactTol, "two-substitution value");
    require(both.classification == ChshClass::NoViolation,
            "two substitutions still classified as violation");
}

void check_lhv_bound() {
    require(lhv_bound() == 2.0, "brute-force bound is not exactly 2");
}

int cmd_check(const Options&, std::ostream& out, std::ostream&) {
    // Every check is exact and rng-free, so the pass/fail set cannot depend
    // on --seed.
    const std::pair<const char*, std::function<void()>> checks[] = {
        {"dilation-unitarity", check_dilation_unitarity},
        {"dilation-involution", check_dilation_involution},
        {"undo-identity", check_undo_identity},
        {"frame-equivalence", check_frame_equivalence},
        {"correlation-closed-form", check_correlation_closed_form},
        {"record-zero", check_record_zero},
        {"chsh-trichotomy", check_chsh_trichotomy},
        {"lhv-bound=2", check_lhv_bound},
    };
    int passed = 0;
    for (const auto& [name, body] : checks) {
        try {
            body();
            out << "[ok] " << name << "\n";
            ++passed;
        } catch (const std::exception& e) {
            out << "[FAIL] " << name << ": " << e.what() << "\n";
        }
    }
    const int total = static_cast<int>(std::size(checks));
    out << passed << "/" << total << " checks passed\n";
    return passed == total ? 0 : 1;
}

}  // namespace

// ── dispatch ──────────────────────────────────────────────────────────────

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"extended Wigner's-friend statevector simulator"};
    app.require_subcommand(1);

    Options run_o, sample_o, corr_o, chsh_o, check_o;

    CLI::App* run_cmd = app.add_subcommand("run", "execute a protocol once and report");
    add_source_flags(run_cmd, run_o);
    add_angles_flag(run_cmd, run_o);
    add_seed_flag(run_cmd, run_o);
    run_o.mode = "unitary";
    run_cmd->add_option("--mode", run_o.mode, "unitary, hybrid or projective")
        ->check(CLI::IsMember({"unitary", "hybrid", "projective"}));
    run_cmd->add_option("--output", run_o.output, "json")->check(CLI::IsMember({"json", "csv"}));

    CLI::App* sample_cmd =
        app.add_subcommand("sample", "execute a protocol repeatedly, one record per run");
    add_source_flags(sample_cmd, sample_o);
    add_angles_flag(sample_cmd, sample_o);
    add_seed_flag(sample_cmd, sample_o);
    add_n_runs_flag(sample_cmd, sample_o);
    sample_o.mode = "hybrid";
    sample_cmd->add_option("--mode", sample_o.mode, "hybrid or projective")
        ->check(CLI::IsMember({"unitary", "hybrid", "projective"}));
    sample_cmd->add_option("--output", sample_o.output, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI::App* corr_cmd =
        app.add_subcommand("correlate", "four-pair correlation table (exact or sampled)");
    add_angles_flag(corr_cmd, corr_o);
    add_seed_flag(corr_cmd, corr_o);
    add_n_runs_flag(corr_cmd, corr_o);
    corr_o.mode = "exact";
    corr_cmd->add_option("--mode", corr_o.mode, "exact or montecarlo")
        ->check(CLI::IsMember({"exact", "montecarlo"}));
    corr_cmd->add_option("--output", corr_o.output, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI::App* chsh_cmd = app.add_subcommand("chsh", "CHSH combination and classification");
    add_angles_flag(chsh_cmd, chsh_o);
    add_seed_flag(chsh_cmd, chsh_o);
    add_n_runs_flag(chsh_cmd, chsh_o);
    chsh_o.mode = "exact";
    chsh_cmd->add_option("--mode", chsh_o.mode, "exact or montecarlo")
        ->check(CLI::IsMember({"exact", "montecarlo"}));
    chsh_cmd->add_option("--zero", chsh_o.zeros, "zero out a pair: ad and/or cb")
        ->check(CLI::IsMember({"ad", "cb"}));
    chsh_cmd->add_option("--output", chsh_o.output, "json")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI::App* check_cmd = app.add_subcommand("check", "run the exact invariant suite");
    add_seed_flag(check_cmd, check_o);

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("wfsim");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run_o, out, err);
        if (sample_cmd->parsed()) return cmd_sample(sample_o, out, err);
        if (corr_cmd->parsed()) return cmd_correlate(corr_o, out, err);
        if (chsh_cmd->parsed()) return cmd_chsh(chsh_o, out, err);
        if (check_cmd->parsed()) return cmd_check(check_o, out, err);
        err << "error: no subcommand given\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace wfsim
