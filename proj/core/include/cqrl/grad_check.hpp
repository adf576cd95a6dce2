#pragma once

#include "cqrl/graph.hpp"

namespace cqrl {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  long worst_elem = -1;
  long checked = 0;
  long skipped = 0;  // elements sitting on an activation kink at every step size
};

// Compares the float32 backward pass of a scalar-output graph against central
// finite differences evaluated in double precision (step h on each parameter
// element, adaptively shrunk when the stencil straddles an activation kink).
// Relative error uses max(|analytic|, |numeric|, floor) as the denominator.
// Never mutates graph or stores.
GradCheckResult gradient_check(Graph& graph, int out_id,
                               const std::vector<ParameterStorePtr>& stores, double h = 1e-3,
                               double denom_floor = 1e-2);

}  // namespace cqrl
