#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ddlab/path.hpp"

namespace ddlab {

// Writes the excess-rate vector b (length d) for state (t, prices).
using DriftFn = std::function<void(double t, std::span<const double> prices,
                                   std::span<double> b_out)>;
// Writes the d x m volatility matrix (row-major) for state (t, prices).
using VolFn = std::function<void(double t, std::span<const double> prices,
                                 std::span<double> sigma_out)>;

// Ito-diffusion market: dS^i/S^i = b^i dt + sum_j sigma^{ij} dW^j.
// The covariance c = sigma*sigma^T must be PSD with b in its range at every
// evaluation point, otherwise the growth-optimal portfolio does not exist.
struct MarketModel {
    enum class Kind {
        Custom,         // state-dependent coefficients via drift/vol callbacks
        ConstantCoeff,  // constant b, sigma
        DdsDirect,      // one-asset exp(t/2 + beta_t); the asset is the numeraire
    };

    Kind kind = Kind::ConstantCoeff;
    int d = 0;  // assets
    int m = 0;  // Brownian drivers
    std::vector<double> s0;
    std::vector<double> b_const;      // d (constant-coefficient kinds)
    std::vector<double> sigma_const;  // d*m row-major
    DriftFn drift;                    // Custom kind only
    VolFn vol;
    double pinv_tol = 1e-10;

    static MarketModel constant(std::vector<double> b,
                                std::vector<double> sigma_rowmajor, int m,
                                std::vector<double> s0);
    static MarketModel custom(int d, int m, std::vector<double> s0, DriftFn drift,
                              VolFn vol);
    // One asset, b = 0.2, sigma = 0.2; squared Sharpe ratio 1, so the growth
    // process is G_t = t/2 and the optimal fraction is 5.
    static MarketModel gbm_preset();
    // Degenerate one-asset preset whose price itself is the growth-optimal
    // wealth exp(t/2 + beta_t); log-Euler is exact in law for it.
    static MarketModel dds_preset();

    void eval(double t, std::span<const double> prices, std::span<double> b_out,
              std::span<double> sigma_out) const;
    void validate() const;
};

// Minimum-norm solution rho of c*rho = b via spectral decomposition,
// eigenvalues below tol*lambda_max treated as zero. Throws
// no_numeraire_error when the residual exceeds tol*|b| (b not in range(c)).
std::vector<double> pseudo_inverse_drift_solve(std::span<const double> c_rowmajor,
                                               std::span<const double> b,
                                               double tol = 1e-10);

// Lazy batch descriptor: path i is a pure function of (seed, i) and can be
// regenerated in any order, on any thread.
struct SimBatch {
    MarketModel model;
    TimeGrid grid;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

SimBatch simulate_batch(MarketModel model, TimeGrid grid, std::size_t n_paths,
                        std::uint64_t seed);

// One realized path: asset prices on the grid plus the Brownian increments
// that generated them.
struct PathRecord {
    TimeGrid grid;
    int d = 0;
    int m = 0;
    std::vector<double> prices;  // (n_steps+1) * d, row-major
    std::vector<double> dw;      // n_steps * m, row-major

    double price(std::size_t k, int asset) const {
        return prices[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(asset)];
    }
    SampledPath asset_path(int asset) const;
};

// Log-Euler step: log S_{k+1} = log S_k + (b - diag(c)/2) dt + sigma dW.
// Exact in law for constant coefficients.
PathRecord generate_path(const SimBatch& batch, std::size_t path_index);

// Growth-optimal wealth along one path: fraction vector rho = c^+ b per
// step, multiplicative update clamped at zero, and the growth process
// G_{k+1} = G_k + (b, rho)/2 * dt.
struct NumerairePath {
    SampledPath wealth;  // X^, starts at 1
    SampledPath growth;  // G, nondecreasing, starts at 0
    std::vector<double> rho;  // n_steps * d, row-major; also the invested fractions
    const std::vector<double>& proportions() const { return rho; }
};

NumerairePath numeraire_path(const SimBatch& batch, std::size_t path_index);
NumerairePath numeraire_path(const MarketModel& model, const PathRecord& record,
                             std::size_t path_index);

// Per-step proportions rule: fills pi (length d) for step k.
using ProportionRule = std::function<void(
    std::size_t k, double t, std::span<const double> prices, std::span<double> pi)>;

// Wealth of the proportional strategy pi along one recorded path:
// X_{k+1} = X_k * (1 + (pi_k, dS_k/S_k)), clamped at zero and absorbing.
SampledPath wealth_from_proportions(const PathRecord& record, const ProportionRule& rule);
SampledPath wealth_from_proportions(const PathRecord& record,
                                    std::span<const double> constant_pi);
SampledPath wealth_from_proportions(const SimBatch& batch, std::size_t path_index,
                                    const ProportionRule& rule);

// Batch dump: header path_id,t,asset_1..asset_d,xhat,growth.
void write_batch_csv(const SimBatch& batch, std::ostream& os);

}  // namespace ddlab
