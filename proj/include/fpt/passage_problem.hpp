#pragma once

#include "fpt/innovations.hpp"

namespace fpt {

/// AR(1) recursion X_n = lambda X_{n-1} + eta_n from X_0 = x, observed until
/// the first n with X_n > a.
struct PassageProblem {
  double lambda = 0.5;
  double x = 0.0;
  double a = 1.0;
  InnovationSpec spec = InnovationSpec::gaussian(0.0, 1.0);
};

/// Throws a precondition error unless 0 < lambda < 1 and a >= x.
void validate(const PassageProblem& p);

}  // namespace fpt
