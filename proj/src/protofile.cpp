#include "wfsim/protofile.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace wfsim {

const char* severity_name(Severity s) {
    return s == Severity::Error ? "error" : "warning";
}

bool ParseResult::ok() const {
    for (const ParseDiagnostic& d : diagnostics)
        if (d.severity == Severity::Error) return false;
    return true;
}

// ── angle literals ────────────────────────────────────────────────────────

namespace {

std::string to_lower(std::string s) {
    for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

bool parse_ll(std::string_view s, long long& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

std::optional<double> parse_angle_literal(const std::string& token) {
    if (token.empty()) return std::nullopt;
    const std::string t = to_lower(token);
    // pi fraction: [k]pi[/n], k integer (default 1, "-" means −1), n positive.
    if (const std::size_t pos = t.find("pi"); pos != std::string::npos) {
        long long k = 1;
        const std::string coef = t.substr(0, pos);
        if (coef == "-") {
            k = -1;
        } else if (!coef.empty() && !parse_ll(coef, k)) {
            return std::nullopt;
        }
        long long n = 1;
        const std::string rest = t.substr(pos + 2);
        if (!rest.empty()) {
            if (rest.front() != '/' || !parse_ll(rest.substr(1), n) || n <= 0)
                return std::nullopt;
        }
        // Evaluated exactly as the serializer renders fractions, so the forms
        // round-trip bitwise.
        return (static_cast<double>(k) * M_PI) / static_cast<double>(n);
    }
    if (t.size() > 3 && t.compare(t.size() - 3, 3, "deg") == 0) {
        double deg = 0.0;
        if (!parse_double(std::string_view(t).substr(0, t.size() - 3), deg))
            return std::nullopt;
        return deg * M_PI / 180.0;
    }
    double radians = 0.0;
    if (!parse_double(t, radians)) return std::nullopt;
    return radians;
}

std::string format_angle(double radians) {
    if (radians == 0.0) return "0";
    constexpr double two_pi = 2.0 * M_PI;
    auto try_denominator = [&](int n) -> std::optional<std::string> {
        for (int k = 1;; ++k) {
            const double v = (static_cast<double>(k) * M_PI) / static_cast<double>(n);
            if (v >= two_pi) return std::nullopt;
            if (v == radians) {
                std::string s = k == 1 ? "pi" : std::to_string(k) + "pi";
                if (n > 1) s += "/" + std::to_string(n);
                return s;
            }
        }
    };
    for (int n = 1; n <= 16; ++n)
        if (auto s = try_denominator(n)) return *s;
    for (int n : {18, 20, 24, 32, 36, 45, 60, 90, 180})
        if (auto s = try_denominator(n)) return *s;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", radians);
    return buf;
}

// ── parser ────────────────────────────────────────────────────────────────

namespace {

struct Token {
    std::string text;
    int column;  // 1-based
};

std::vector<Token> tokenize_line(const std::string& line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        const unsigned char ch = static_cast<unsigned char>(line[i]);
        if (ch == '#') break;
        if (std::isspace(ch)) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != '#' &&
               !std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return tokens;
}

std::optional<AgentId> agent_from_name(const std::string& name) {
    const std::string n = to_lower(name);
    if (n == "alice") return AgentId::Alice;
    if (n == "bob") return AgentId::Bob;
    if (n == "carol") return AgentId::Carol;
    if (n == "dan") return AgentId::Dan;
    return std::nullopt;
}

const char* system_token(AgentId agent) {
    return system_of(agent) == Factor::S1 ? "system1" : "system2";
}

struct Parser {
    std::vector<ParseDiagnostic>& diags;
    std::optional<double> bound[4];  // a..d, normalized radians
    bool declared[4] = {false, false, false, false};
    bool overridden[4] = {false, false, false, false};
    std::vector<DocStep> steps;

    void error(int line, int col, std::string msg) {
        diags.push_back({line, col, Severity::Error, std::move(msg)});
    }
    void warning(int line, int col, std::string msg) {
        diags.push_back({line, col, Severity::Warning, std::move(msg)});
    }

    // Normalizes a literal, warning when the value had to be wrapped.
    double normalized(double raw, int line, int col) {
        const double norm = Angle(raw).radians();
        if (norm != raw)
            warning(line, col, "angle normalized into [0, 2pi)");
        return norm;
    }

    void handle_angles(const std::vector<Token>& toks, int line) {
        if (toks.size() == 1) {
            error(line, toks[0].column, "angles directive needs at least one <symbol>=<angle> binding");
            return;
        }
        for (std::size_t k = 1; k < toks.size(); ++k) {
            const Token& t = toks[k];
            const std::size_t eq = t.text.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 >= t.text.size()) {
                error(line, t.column, "expected <symbol>=<angle>, got '" + t.text + "'");
                continue;
            }
            const std::string sym = to_lower(t.text.substr(0, eq));
            if (sym.size() != 1 || sym[0] < 'a' || sym[0] > 'd') {
                error(line, t.column, "unknown angle symbol '" + t.text.substr(0, eq) +
                                          "' (expected a, b, c or d)");
                continue;
            }
            const int slot = sym[0] - 'a';
            if (declared[slot]) {
                error(line, t.column, "duplicate binding for angle '" + sym + "'");
                continue;
            }
            const std::string expr = t.text.substr(eq + 1);
            const auto value = parse_angle_literal(expr);
            if (!value) {
                error(line, t.column + static_cast<int>(eq) + 1,
                      "bad angle expression '" + expr + "'");
                continue;
            }
            declared[slot] = true;
            if (!overridden[slot])
                bound[slot] = normalized(*value, line, t.column + static_cast<int>(eq) + 1);
        }
    }

    std::optional<double> resolve_angle(const Token& t, int line) {
        const std::string lowered = to_lower(t.text);
        if (lowered.rfind("angle=", 0) != 0) {
            error(line, t.column, "expected angle=<expr>, got '" + t.text + "'");
            return std::nullopt;
        }
        const std::string expr = lowered.substr(6);
        const int expr_col = t.column + 6;
        if (expr.size() == 1 && expr[0] >= 'a' && expr[0] <= 'd') {
            const int slot = expr[0] - 'a';
            if (!bound[slot]) {
                error(line, expr_col, "angle symbol '" + expr + "' is not bound");
                return std::nullopt;
            }
            return *bound[slot];
        }
        const auto value = parse_angle_literal(expr);
        if (!value) {
            error(line, expr_col, "bad angle expression '" + expr + "'");
            return std::nullopt;
        }
        return normalized(*value, line, expr_col);
    }

    void handle_measure(const std::string& directive, const std::vector<Token>& toks,
                        int line) {
        if (toks.size() != 4) {
            error(line, toks[0].column, directive + " expects: <agent> <system> angle=<expr>");
            return;
        }
        const auto agent = agent_from_name(toks[1].text);
        if (!agent) {
            error(line, toks[1].column, "unknown agent '" + toks[1].text + "'");
            return;
        }
        if (directive == "umeasure" && !is_friend_agent(*agent)) {
            error(line, toks[1].column, std::string(agent_name(*agent)) +
                                            " is a superobserver; use smeasure");
            return;
        }
        if (directive == "smeasure" && !is_superobserver(*agent)) {
            error(line, toks[1].column,
                  std::string(agent_name(*agent)) + " is a friend; use umeasure");
            return;
        }
        const std::string sys = to_lower(toks[2].text);
        if (sys != "system1" && sys != "system2") {
            error(line, toks[2].column,
                  "unknown system '" + toks[2].text + "' (expected system1 or system2)");
            return;
        }
        const Factor sysf = sys == "system1" ? Factor::S1 : Factor::S2;
        if (system_of(*agent) != sysf) {
            error(line, toks[2].column, std::string(agent_name(*agent)) + " acts on " +
                                            system_token(*agent) + ", not " + sys);
            return;
        }
        const auto value = resolve_angle(toks[3], line);
        if (!value) return;
        StepKind kind = StepKind::FriendMeasure;
        if (directive == "smeasure") kind = StepKind::SuperMeasure;
        if (directive == "pmeasure") kind = StepKind::ProjectiveSpin;
        steps.push_back({{kind, *agent, *agent, Angle(*value)}, line, toks[0].column});
    }

    void handle_undo(const std::vector<Token>& toks, int line) {
        if (toks.size() != 3) {
            error(line, toks[0].column, "undo expects: <superobserver> <friend>");
            return;
        }
        const auto super = agent_from_name(toks[1].text);
        if (!super) {
            error(line, toks[1].column, "unknown agent '" + toks[1].text + "'");
            return;
        }
        const auto fr = agent_from_name(toks[2].text);
        if (!fr) {
            error(line, toks[2].column, "unknown agent '" + toks[2].text + "'");
            return;
        }
        if (!is_superobserver(*super)) {
            error(line, toks[1].column,
                  std::string(agent_name(*super)) + " is not a superobserver");
            return;
        }
        if (!is_friend_agent(*fr)) {
            error(line, toks[2].column, std::string(agent_name(*fr)) + " is not a friend");
            return;
        }
        if (system_of(*super) != system_of(*fr)) {
            error(line, toks[2].column, std::string(agent_name(*super)) + " cannot undo " +
                                            agent_name(*fr) +
                                            ": they act on different systems");
            return;
        }
        steps.push_back({{StepKind::Undo, *super, *fr, Angle{}}, line, toks[0].column});
    }

    void handle_pread(const std::vector<Token>& toks, int line) {
        if (toks.size() != 2) {
            error(line, toks[0].column, "pread expects: <agent>");
            return;
        }
        const auto agent = agent_from_name(toks[1].text);
        if (!agent) {
            error(line, toks[1].column, "unknown agent '" + toks[1].text + "'");
            return;
        }
        steps.push_back({{StepKind::ProjectiveRead, *agent, *agent, Angle{}}, line,
                         toks[0].column});
    }

    void handle_line(const std::string& line_text, int line) {
        const std::vector<Token> toks = tokenize_line(line_text);
        if (toks.empty()) return;
        const std::string directive = to_lower(toks[0].text);
        if (directive == "angles") {
            handle_angles(toks, line);
        } else if (directive == "prepare") {
            if (toks.size() != 2 || to_lower(toks[1].text) != "singlet")
                error(line, toks[0].column, "prepare expects the single argument 'singlet'");
            else
                steps.push_back({{StepKind::PrepareSinglet, AgentId::Carol, AgentId::Carol,
                                  Angle{}},
                                 line, toks[0].column});
        } else if (directive == "umeasure" || directive == "smeasure" ||
                   directive == "pmeasure") {
            handle_measure(directive, toks, line);
        } else if (directive == "undo") {
            handle_undo(toks, line);
        } else if (directive == "pread") {
            handle_pread(toks, line);
        } else {
            error(line, toks[0].column, "unknown directive '" + toks[0].text + "'");
        }
    }
};

}  // namespace

ParseResult parse_protocol_text(const std::string& text, const std::string& source_name,
                                const std::vector<AngleOverride>& overrides) {
    ParseResult result;
    Parser parser{result.diagnostics, {}, {}, {}, {}};
    for (const AngleOverride& ov : overrides) {
        if (ov.symbol < 'a' || ov.symbol > 'd')
            throw std::invalid_argument("parse_protocol_text: override symbol must be a..d");
        const int slot = ov.symbol - 'a';
        parser.bound[slot] = ov.value.radians();
        parser.overridden[slot] = true;
    }

    int line_no = 0;
    std::size_t pos = 0;
    while (true) {
        const std::size_t nl = text.find('\n', pos);
        std::string line =
            nl == std::string::npos ? text.substr(pos) : text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++line_no;
        parser.handle_line(line, line_no);
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }

    if (!result.ok()) return result;  // syntax errors: no document

    ProtocolDocument doc;
    doc.source_name = source_name;
    doc.declared_angles = AngleBindings{Angle(parser.bound[0].value_or(0.0)),
                                        Angle(parser.bound[1].value_or(0.0)),
                                        Angle(parser.bound[2].value_or(0.0)),
                                        Angle(parser.bound[3].value_or(0.0))};
    doc.steps = std::move(parser.steps);
    result.document = doc;

    Protocol proto;
    proto.name = source_name;
    proto.angles = doc.declared_angles;
    for (const DocStep& ds : doc.steps) proto.steps.push_back(ds.step);

    for (const Violation& v : validate(proto)) {
        int line = 1, col = 1;
        if (v.step_index >= 0 && v.step_index < static_cast<int>(doc.steps.size())) {
            line = doc.steps[v.step_index].line;
            col = doc.steps[v.step_index].column;
        }
        std::string msg;
        if (v.kind == ViolationKind::UndoAfterRead && v.other_index >= 0 &&
            v.other_index < static_cast<int>(doc.steps.size())) {
            const ProtocolStep& undo = proto.steps[v.step_index];
            msg = std::string("register ") + factor_name(register_of(undo.target)) +
                  " was projectively read at line " +
                  std::to_string(doc.steps[v.other_index].line) +
                  "; its record cannot be erased unitarily";
        } else {
            msg = v.message;
        }
        result.diagnostics.push_back({line, col, Severity::Error, std::move(msg)});
    }
    if (result.ok()) result.protocol = std::move(proto);
    return result;
}

// ── serializer ────────────────────────────────────────────────────────────

namespace {

// Emit a bound symbol when the value matches one bitwise, preferring the
// acting agent's own conventional letter (Alice→a, Bob→b, Carol→c, Dan→d).
std::string angle_token(Angle angle, const AngleBindings& bindings, AgentId agent) {
    const double r = angle.radians();
    const double values[4] = {bindings.a.radians(), bindings.b.radians(),
                              bindings.c.radians(), bindings.d.radians()};
    int preferred = -1;
    switch (agent) {
        case AgentId::Alice: preferred = 0; break;
        case AgentId::Bob: preferred = 1; break;
        case AgentId::Carol: preferred = 2; break;
        case AgentId::Dan: preferred = 3; break;
    }
    if (preferred >= 0 && values[preferred] == r)
        return std::string(1, static_cast<char>('a' + preferred));
    for (int s = 0; s < 4; ++s)
        if (values[s] == r) return std::string(1, static_cast<char>('a' + s));
    return format_angle(r);
}

}  // namespace

std::string serialize_protocol(const Protocol& p) {
    std::string out = "angles a=" + format_angle(p.angles.a.radians()) +
                      " b=" + format_angle(p.angles.b.radians()) +
                      " c=" + format_angle(p.angles.c.radians()) +
                      " d=" + format_angle(p.angles.d.radians()) + "\n";
    for (const ProtocolStep& st : p.steps) {
        switch (st.kind) {
            case StepKind::PrepareSinglet:
                out += "prepare singlet\n";
                break;
            case StepKind::FriendMeasure:
            case StepKind::SuperMeasure:
            case StepKind::ProjectiveSpin:
                out += std::string(step_kind_name(st.kind)) + " " + agent_name(st.agent) +
                       " " + system_token(st.agent) +
                       " angle=" + angle_token(st.angle, p.angles, st.agent) + "\n";
                break;
            case StepKind::Undo:
                out += std::string("undo ") + agent_name(st.agent) + " " +
                       agent_name(st.target) + "\n";
                break;
            case StepKind::ProjectiveRead:
                out += std::string("pread ") + agent_name(st.agent) + "\n";
                break;
        }
    }
    return out;
}

}  // namespace wfsim
