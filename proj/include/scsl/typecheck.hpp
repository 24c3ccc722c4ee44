#pragma once

#include "scsl/ast.hpp"
#include "scsl/source.hpp"

namespace scsl {

// Static checks over a parsed Specification: name resolution, expression
// typing, auxiliary-variable type inference, frame/interface/schedule rules,
// and constant-constraint validation. Returns an empty list iff the
// specification is well-formed.
Diagnostics typecheck(const Specification& spec);

} // namespace scsl
