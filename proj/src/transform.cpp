#include "ddlab/transform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ddlab/errors.hpp"

namespace ddlab {

DrawdownParam::DrawdownParam(double alpha) : value(alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) {
        throw invalid_input("DrawdownParam: alpha must lie in [0,1)");
    }
}

SampledPath az_forward(const SampledPath& x, DrawdownParam alpha) {
    if (x.values.empty()) throw invalid_input("az_forward: empty path");
    if (x.values[0] != 1.0) {
        throw invalid_input("az_forward: path must be normalized to x[0] = 1");
    }
    const double a = alpha.value;
    if (a == 0.0) return x;

    std::vector<double> out(x.values.size());
    double m = x.values[0];
    double p = 1.0;  // m^(1-a)
    double q = 1.0;  // m^(-a)
    for (std::size_t k = 0; k < x.values.size(); ++k) {
        const double v = x.values[k];
        if (v >= m) {
            if (v > m) {
                m = v;
                p = std::pow(m, 1.0 - a);
                q = std::pow(m, -a);
            }
            out[k] = p;  // at a time of maximum the value is exactly m^(1-a)
        } else {
            out[k] = std::min(a * p + (1.0 - a) * v * q, p);
        }
    }
    return SampledPath(x.grid, std::move(out));
}

SampledPath az_inverse(const SampledPath& chi, DrawdownParam alpha, double tol) {
    if (chi.values.empty()) throw invalid_input("az_inverse: empty path");
    if (chi.values[0] != 1.0) {
        throw invalid_input("az_inverse: path must be normalized to chi[0] = 1");
    }
    const double a = alpha.value;
    if (a == 0.0) return chi;

    std::vector<double> out(chi.values.size());
    double m = chi.values[0];
    double w = 1.0;  // m^(a/(1-a))
    for (std::size_t k = 0; k < chi.values.size(); ++k) {
        const double v = chi.values[k];
        if (v > m) {
            m = v;
            w = std::pow(m, a / (1.0 - a));
        }
        if (v < a * m - tol * m) {
            throw constraint_violation_error(
                "az_inverse: input violates the drawdown constraint at index " +
                    std::to_string(k),
                k);
        }
        out[k] = std::max(w * (v - a * m) / (1.0 - a), 0.0);
    }
    return SampledPath(chi.grid, std::move(out));
}

double kelly_fraction(double rel_dd, DrawdownParam alpha) {
    if (!(rel_dd >= 0.0 && rel_dd <= 1.0)) {
        throw invalid_input("kelly_fraction: relative drawdown must lie in [0,1]");
    }
    const double a = alpha.value;
    const double num = (1.0 - a) * rel_dd;
    const double den = a + num;
    if (den == 0.0) return 0.0;  // bankrupt state, nothing to invest
    return num / den;
}

SampledPath constrained_wealth_direct(const PathRecord& rec,
                                      const ProportionRule& base_rule,
                                      DrawdownParam alpha) {
    const int d = rec.d;
    const std::size_t n = rec.grid.n_steps;
    std::vector<double> out(n + 1);
    out[0] = 1.0;
    double x = 1.0;       // base wealth
    double x_max = 1.0;   // its running maximum
    double y = 1.0;       // constrained wealth
    std::vector<double> pi(d);
    for (std::size_t k = 0; k < n; ++k) {
        const double rel = x > 0.0 ? x / x_max : 0.0;
        const double f = kelly_fraction(std::min(rel, 1.0), alpha);
        const std::span<const double> state(&rec.prices[k * static_cast<std::size_t>(d)],
                                            static_cast<std::size_t>(d));
        base_rule(k, rec.grid.time_at(k), state, pi);
        double ret = 0.0;
        for (int i = 0; i < d; ++i) {
            const double sk = rec.price(k, i);
            const double sk1 = rec.price(k + 1, i);
            ret += pi[static_cast<std::size_t>(i)] * ((sk1 - sk) / sk);
        }
        if (!std::isfinite(ret)) {
            throw simulation_error("non-finite base strategy return", 0, k);
        }
        if (x > 0.0) {
            x *= (1.0 + ret);
            if (x < 0.0) x = 0.0;
            if (x > x_max) x_max = x;
        }
        if (y > 0.0) {
            y *= (1.0 + f * ret);
            if (y < 0.0) y = 0.0;
        }
        out[k + 1] = y;
    }
    return SampledPath(rec.grid, std::move(out));
}

SampledPath constrained_wealth_direct(const SimBatch& batch, std::size_t path_index,
                                      const ProportionRule& base_rule,
                                      DrawdownParam alpha) {
    const PathRecord rec = generate_path(batch, path_index);
    return constrained_wealth_direct(rec, base_rule, alpha);
}

DrawdownReport verify_drawdown(const SampledPath& path, DrawdownParam alpha,
                               double tol) {
    DrawdownReport report;
    if (path.values.empty()) return report;
    const double a = alpha.value;
    double m = path.values[0];
    for (std::size_t k = 0; k < path.values.size(); ++k) {
        if (path.values[k] > m) m = path.values[k];
        if (path.values[k] < a * m - tol) {
            report.violations.push_back(k);
        }
    }
    return report;
}

}  // namespace ddlab
