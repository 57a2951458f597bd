#pragma once

#include <string>

#include "ymlab/surface.hpp"

namespace ymlab {

// Representation files: JSON with group id, genus, x_xi coordinates, an
// optional discrete central twist, and the 2g image matrices row-major as
// [re, im] pairs. The writer is canonical (fixed key order, shortest
// round-trip doubles), so write(read(f)) reproduces f byte for byte.
std::string rep_to_string(const CentralRep& rep);
CentralRep rep_from_string(const std::string& text, double defect_tol = 1e-10);

void write_rep_file(const CentralRep& rep, const std::string& path);
CentralRep read_rep_file(const std::string& path, double defect_tol = 1e-10);

// Reconstructs c from x_xi and the twist sign (-1 selects the discrete
// central element, su(2) only).
GroupElement central_element(const LieContext& ctx, const AlgebraElement& x_xi, int twist);

int central_twist_of(const CentralRep& rep);

}  // namespace ymlab
