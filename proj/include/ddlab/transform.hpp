#pragma once

#include <cstddef>
#include <vector>

#include "ddlab/market.hpp"
#include "ddlab/path.hpp"

namespace ddlab {

// Floor fraction of the running maximum. Valid range [0,1); alpha = 0 means
// unconstrained.
struct DrawdownParam {
    double value;
    DrawdownParam(double alpha);  // validates, implicit by design
};

// Pathwise map x -> alpha*(x*)^(1-alpha) + (1-alpha)*x*(x*)^(-alpha).
// Bijects wealth paths onto paths satisfying the alpha-drawdown constraint;
// the constraint holds exactly on the grid. Requires x[0] = 1.
//
// At indices where x equals its running maximum the output is forced to
// (x*)^(1-alpha) and every other value is capped by it, so the running-max
// intertwining az_forward(x)* = (x*)^(1-alpha) holds bitwise.
SampledPath az_forward(const SampledPath& x, DrawdownParam alpha);

// Inverse map chi -> (1/(1-alpha))*(chi*)^(alpha/(1-alpha))*(chi - alpha*chi*).
// Requires chi[0] = 1 and chi within `tol` (relative) of its drawdown floor;
// the first offending index is reported otherwise.
SampledPath az_inverse(const SampledPath& chi, DrawdownParam alpha, double tol = 1e-9);

// Fraction of wealth invested in the underlying fund by the constrained
// strategy: (1-alpha)*r / (alpha + (1-alpha)*r) for relative drawdown r.
// Lies in [0, 1-alpha] and is increasing in r.
double kelly_fraction(double rel_dd, DrawdownParam alpha);

// Trading realization of the transform: at every step a fraction
// kelly_fraction(current relative drawdown of the base wealth, alpha) of the
// constrained wealth follows the base strategy, the rest sits in the
// baseline. Agrees with az_forward of the base wealth up to discretization
// error; with alpha = 0 it reproduces the base wealth bit-exactly.
SampledPath constrained_wealth_direct(const PathRecord& record,
                                      const ProportionRule& base_rule,
                                      DrawdownParam alpha);
SampledPath constrained_wealth_direct(const SimBatch& batch, std::size_t path_index,
                                      const ProportionRule& base_rule,
                                      DrawdownParam alpha);

struct DrawdownReport {
    std::vector<std::size_t> violations;  // indices with path < alpha*max - tol
    bool ok() const { return violations.empty(); }
};

// Checks path >= alpha*running_max - tol at every index.
DrawdownReport verify_drawdown(const SampledPath& path, DrawdownParam alpha,
                               double tol = 0.0);

}  // namespace ddlab
