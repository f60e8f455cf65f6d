#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wfsim/protocol.hpp"

namespace wfsim {

// ── protocol text format (.wfp) ───────────────────────────────────────────
// Line-oriented, one step per line, '#' starts a comment, directives are
// case-insensitive:
//
//   angles a=<expr> b=<expr> c=<expr> d=<expr>
//   prepare singlet
//   umeasure <friend> <system> angle=<expr>
//   smeasure <superobserver> <system> angle=<expr>
//   undo <superobserver> <friend>
//   pread <agent>
//   pmeasure <agent> <system> angle=<expr>
//
// Angle expressions are a bound symbol (a–d), decimal radians, a pi fraction
// (`pi/2`, `3pi/4`, `2pi`) or degrees (`45deg`).

enum class Severity { Warning, Error };

const char* severity_name(Severity s);

struct ParseDiagnostic {
    int line = 0;    // 1-based
    int column = 0;  // 1-based
    Severity severity = Severity::Error;
    std::string message;
};

// One parsed step line with its source position.
struct DocStep {
    ProtocolStep step;
    int line = 0;
    int column = 0;
};

struct ProtocolDocument {
    std::string source_name;
    AngleBindings declared_angles;  // unbound symbols default to 0
    std::vector<DocStep> steps;
};

struct ParseResult {
    std::vector<ParseDiagnostic> diagnostics;
    std::optional<ProtocolDocument> document;  // absent on syntax errors
    std::optional<Protocol> protocol;          // absent whenever an Error exists

    bool ok() const;  // no Error-severity diagnostics
};

// Caller-supplied binding that takes precedence over the document's own
// `angles` header (how --angles overrides a file).
struct AngleOverride {
    char symbol;  // 'a'..'d'
    Angle value;
};

// Total over arbitrary input: every failure becomes a positioned diagnostic,
// never an exception.  Structural violations found by validate() are
// surfaced as Error diagnostics at the offending line.
ParseResult parse_protocol_text(const std::string& text,
                                const std::string& source_name = "<input>",
                                const std::vector<AngleOverride>& overrides = {});

// Canonical text form; parse ∘ serialize is the identity on structure.
// Angles that bitwise-match a binding are emitted as its symbol (the acting
// agent's own letter is preferred); exact (k·π)/n values are emitted as pi
// fractions; everything else as %.17g decimal radians (lossless).
std::string serialize_protocol(const Protocol& p);

// Numeric angle forms only (no symbols): decimal radians, pi fraction,
// degrees.  Shared by the parser and the CLI's --angles option.
std::optional<double> parse_angle_literal(const std::string& token);

// Canonical numeric rendering used by serialize_protocol.
std::string format_angle(double radians);

}  // namespace wfsim
