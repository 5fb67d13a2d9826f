#pragma once

#include <string>

#include "sirp/milp.hpp"

namespace sirp {

// Fixed-format MPS with the OBJSENSE extension (the in-memory problem is
// a maximization and is exported as such; readers without OBJSENSE
// support would flip the sign of the optimum). Names longer than eight
// characters are replaced deterministically (C0000001 / R0000001, in
// declaration order) and the mapping is written to `<path>.names`; the
// sidecar is omitted when every name fits.
void export_mps(const MilpProblem& p, const std::string& path);

// `<name> <value>` per line, '#' comments allowed. Names may be original
// or MPS names when a sidecar mapping is given; unknown names are errors.
// Unmentioned variables default to 0. The assignment is re-validated
// against the problem (1e-6) before it is accepted.
MilpSolution import_solution(const std::string& path, const MilpProblem& p,
                             const std::string& name_map_path = "");

} // namespace sirp
