#ifndef CHAINDECOMP_SERIALIZE_HPP
#define CHAINDECOMP_SERIALIZE_HPP

#include <string>
#include <vector>

#include "chaindecomp/model.hpp"
#include "chaindecomp/validate.hpp"

namespace chaindecomp {

/// Parses the JSON interchange format. All references (edges, read/write
/// sets, actors, conditions) are resolved; dangling ids raise
/// ReferenceError, malformed documents raise ParseError.
ProcessModel parse_model(const std::string& text);

/// Canonical serialization: keys sorted, nodes/edges/objects sorted by id,
/// two-space indentation, trailing newline. parse ∘ emit is the identity.
std::string emit_model(const ProcessModel& model);

/// Graphviz export: one cluster per actor lane, chain involvement encoded
/// as node attributes, sub-process bodies flattened with dashed
/// containment edges. Deterministic byte output.
std::string emit_dot(const ProcessModel& model);

std::string emit_diagnostics(const std::vector<Diagnostic>& diagnostics);

} // namespace chaindecomp

#endif
