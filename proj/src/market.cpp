#include "ddlab/market.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "ddlab/errors.hpp"
#include "ddlab/rng.hpp"

namespace ddlab {

MarketModel MarketModel::constant(std::vector<double> b,
                                  std::vector<double> sigma_rowmajor, int m,
                                  std::vector<double> s0) {
    MarketModel model;
    model.kind = Kind::ConstantCoeff;
    model.d = static_cast<int>(b.size());
    model.m = m;
    model.b_const = std::move(b);
    model.sigma_const = std::move(sigma_rowmajor);
    model.s0 = std::move(s0);
    model.validate();
    return model;
}

MarketModel MarketModel::custom(int d, int m, std::vector<double> s0, DriftFn drift,
                                VolFn vol) {
    MarketModel model;
    model.kind = Kind::Custom;
    model.d = d;
    model.m = m;
    model.s0 = std::move(s0);
    model.drift = std::move(drift);
    model.vol = std::move(vol);
    model.validate();
    return model;
}

MarketModel MarketModel::gbm_preset() {
    return constant({0.2}, {0.2}, 1, {1.0});
}

MarketModel MarketModel::dds_preset() {
    MarketModel model = constant({1.0}, {1.0}, 1, {1.0});
    model.kind = Kind::DdsDirect;
    return model;
}

void MarketModel::validate() const {
    if (d <= 0 || m <= 0) throw invalid_input("MarketModel: d and m must be positive");
    if (static_cast<int>(s0.size()) != d) {
        throw invalid_input("MarketModel: s0 must have length d");
    }
    for (double s : s0) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw invalid_input("MarketModel: initial prices must be positive");
        }
    }
    if (kind == Kind::Custom) {
        if (!drift || !vol) throw invalid_input("MarketModel: missing coefficient callbacks");
    } else {
        if (static_cast<int>(b_const.size()) != d ||
            static_cast<int>(sigma_const.size()) != d * m) {
            throw invalid_input("MarketModel: coefficient dimensions do not match d, m");
        }
    }
}

void MarketModel::eval(double t, std::span<const double> prices,
                       std::span<double> b_out, std::span<double> sigma_out) const {
    if (kind == Kind::Custom) {
        drift(t, prices, b_out);
        vol(t, prices, sigma_out);
    } else {
        std::copy(b_const.begin(), b_const.end(), b_out.begin());
        std::copy(sigma_const.begin(), sigma_const.end(), sigma_out.begin());
    }
}

std::vector<double> pseudo_inverse_drift_solve(std::span<const double> c_rowmajor,
                                               std::span<const double> b,
                                               double tol) {
    const auto d = static_cast<Eigen::Index>(b.size());
    if (c_rowmajor.size() != static_cast<std::size_t>(d * d)) {
        throw invalid_input("pseudo_inverse_drift_solve: c must be d x d");
    }
    if (!(tol > 0.0)) throw invalid_input("pseudo_inverse_drift_solve: tol must be positive");

    Eigen::MatrixXd c(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            c(i, j) = c_rowmajor[static_cast<std::size_t>(i * d + j)];
    // symmetrize against representation noise
    c = 0.5 * (c + c.transpose()).eval();
    Eigen::Map<const Eigen::VectorXd> bv(b.data(), d);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
    if (eig.info() != Eigen::Success) {
        throw no_numeraire_error("pseudo_inverse_drift_solve: eigendecomposition failed");
    }
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double cutoff = tol * std::max(lambda.cwiseAbs().maxCoeff(), 0.0);

    Eigen::VectorXd rho = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        if (lambda(i) > cutoff) {
            const Eigen::VectorXd v = eig.eigenvectors().col(i);
            rho += v * (v.dot(bv) / lambda(i));
        }
    }
    const double resid = (c * rho - bv).norm();
    if (resid > tol * bv.norm()) {
        throw no_numeraire_error(
            "drift not in the range of the covariance: no growth-optimal "
            "portfolio (arbitrage of the first kind)");
    }
    return std::vector<double>(rho.data(), rho.data() + d);
}

SimBatch simulate_batch(MarketModel model, TimeGrid grid, std::size_t n_paths,
                        std::uint64_t seed) {
    if (n_paths == 0) throw invalid_input("simulate_batch: n_paths must be >= 1");
    model.validate();
    return SimBatch{std::move(model), grid, n_paths, seed};
}

SampledPath PathRecord::asset_path(int asset) const {
    std::vector<double> v(grid.n_points());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = price(k, asset);
    return SampledPath(grid, std::move(v));
}

PathRecord generate_path(const SimBatch& batch, std::size_t path_index) {
    if (path_index >= batch.n_paths) {
        throw invalid_input("generate_path: path index out of range");
    }
    const MarketModel& model = batch.model;
    const int d = model.d;
    const int m = model.m;
    const std::size_t n = batch.grid.n_steps;
    const double dt = batch.grid.dt;
    const double sqdt = std::sqrt(dt);

    PathRecord rec;
    rec.grid = batch.grid;
    rec.d = d;
    rec.m = m;
    rec.prices.resize((n + 1) * static_cast<std::size_t>(d));
    rec.dw.resize(n * static_cast<std::size_t>(m));

    std::vector<double> logs(d);
    for (int i = 0; i < d; ++i) {
        logs[static_cast<std::size_t>(i)] = std::log(model.s0[static_cast<std::size_t>(i)]);
        rec.prices[static_cast<std::size_t>(i)] = model.s0[static_cast<std::size_t>(i)];
    }

    CounterRng rng(batch.seed, path_index);
    std::vector<double> b(d), sigma(static_cast<std::size_t>(d) * m);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = batch.grid.time_at(k);
        const std::span<const double> state(&rec.prices[k * static_cast<std::size_t>(d)],
                                            static_cast<std::size_t>(d));
        model.eval(t, state, b, sigma);
        double* dwk = &rec.dw[k * static_cast<std::size_t>(m)];
        for (int j = 0; j < m; ++j) dwk[j] = sqdt * rng.next_normal();
        for (int i = 0; i < d; ++i) {
            const double* srow = &sigma[static_cast<std::size_t>(i) * m];
            double cii = 0.0, diff = 0.0;
            for (int j = 0; j < m; ++j) {
                cii += srow[j] * srow[j];
                diff += srow[j] * dwk[j];
            }
            const double step = (b[static_cast<std::size_t>(i)] - 0.5 * cii) * dt + diff;
            if (!std::isfinite(step)) {
                throw simulation_error("non-finite coefficient evaluation", path_index, k);
            }
            logs[static_cast<std::size_t>(i)] += step;
            rec.prices[(k + 1) * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] =
                std::exp(logs[static_cast<std::size_t>(i)]);
        }
    }
    return rec;
}

namespace {

// Shared multiplicative wealth recursion so that the growth-optimal wealth
// and wealth_from_proportions with the same fractions agree bitwise.
SampledPath wealth_recursion(const PathRecord& rec,
                             const std::function<const double*(std::size_t)>& pi_at) {
    const int d = rec.d;
    const std::size_t n = rec.grid.n_steps;
    std::vector<double> wealth(n + 1);
    wealth[0] = 1.0;
    double x = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (x > 0.0) {
            const double* pi = pi_at(k);
            double rel = 0.0;
            for (int i = 0; i < d; ++i) {
                const double sk = rec.price(k, i);
                const double sk1 = rec.price(k + 1, i);
                rel += pi[i] * ((sk1 - sk) / sk);
            }
            if (!std::isfinite(rel)) {
                throw simulation_error("non-finite proportions or returns", 0, k);
            }
            x *= (1.0 + rel);
            if (x < 0.0) x = 0.0;  // clamp; absorbing from here on
        }
        wealth[k + 1] = x;
    }
    return SampledPath(rec.grid, std::move(wealth));
}

}  // namespace

NumerairePath numeraire_path(const MarketModel& model, const PathRecord& rec,
                             std::size_t path_index) {
    const int d = rec.d;
    const int m = rec.m;
    const std::size_t n = rec.grid.n_steps;
    const double dt = rec.grid.dt;

    NumerairePath out;
    out.rho.resize(n * static_cast<std::size_t>(d));
    std::vector<double> growth(n + 1);
    growth[0] = 0.0;

    std::vector<double> b(d), sigma(static_cast<std::size_t>(d) * m),
        c(static_cast<std::size_t>(d) * d);
    const bool constant_coeffs = model.kind != MarketModel::Kind::Custom;
    std::vector<double> rho_cached;

    double g = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::span<const double> state(&rec.prices[k * static_cast<std::size_t>(d)],
                                            static_cast<std::size_t>(d));
        double* rho_k = &out.rho[k * static_cast<std::size_t>(d)];
        if (constant_coeffs && !rho_cached.empty()) {
            std::copy(rho_cached.begin(), rho_cached.end(), rho_k);
        } else {
            model.eval(rec.grid.time_at(k), state, b, sigma);
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j <= i; ++j) {
                    double cij = 0.0;
                    for (int l = 0; l < m; ++l) {
                        cij += sigma[static_cast<std::size_t>(i) * m + l] *
                               sigma[static_cast<std::size_t>(j) * m + l];
                    }
                    c[static_cast<std::size_t>(i) * d + j] = cij;
                    c[static_cast<std::size_t>(j) * d + i] = cij;
                }
            }
            std::vector<double> rho;
            try {
                rho = pseudo_inverse_drift_solve(c, b, model.pinv_tol);
            } catch (const no_numeraire_error& e) {
                throw no_numeraire_error(std::string(e.what()) + " (at step " +
                                             std::to_string(k) + ")",
                                         k);
            }
            std::copy(rho.begin(), rho.end(), rho_k);
            if (constant_coeffs) rho_cached = rho;
        }
        double rate = 0.0;  // (b, rho): twice the growth rate
        if (constant_coeffs) {
            for (int i = 0; i < d; ++i) rate += model.b_const[static_cast<std::size_t>(i)] * rho_k[i];
        } else {
            for (int i = 0; i < d; ++i) rate += b[static_cast<std::size_t>(i)] * rho_k[i];
        }
        g += 0.5 * rate * dt;
        growth[k + 1] = g;
    }

    const double* rho_data = out.rho.data();
    out.wealth = wealth_recursion(
        rec, [rho_data, d](std::size_t k) { return rho_data + k * static_cast<std::size_t>(d); });
    out.growth = SampledPath(rec.grid, std::move(growth));
    (void)path_index;
    return out;
}

NumerairePath numeraire_path(const SimBatch& batch, std::size_t path_index) {
    const PathRecord rec = generate_path(batch, path_index);
    return numeraire_path(batch.model, rec, path_index);
}

SampledPath wealth_from_proportions(const PathRecord& rec, const ProportionRule& rule) {
    const int d = rec.d;
    std::vector<double> pi(d);
    return wealth_recursion(rec, [&](std::size_t k) -> const double* {
        const std::span<const double> state(&rec.prices[k * static_cast<std::size_t>(d)],
                                            static_cast<std::size_t>(d));
        rule(k, rec.grid.time_at(k), state, pi);
        return pi.data();
    });
}

SampledPath wealth_from_proportions(const PathRecord& rec,
                                    std::span<const double> constant_pi) {
    if (constant_pi.size() != static_cast<std::size_t>(rec.d)) {
        throw invalid_input("wealth_from_proportions: proportions must have length d");
    }
    const double* data = constant_pi.data();
    return wealth_recursion(rec, [data](std::size_t) { return data; });
}

SampledPath wealth_from_proportions(const SimBatch& batch, std::size_t path_index,
                                    const ProportionRule& rule) {
    const PathRecord rec = generate_path(batch, path_index);
    return wealth_from_proportions(rec, rule);
}

void write_batch_csv(const SimBatch& batch, std::ostream& os) {
    os << "path_id,t";
    for (int i = 1; i <= batch.model.d; ++i) os << ",asset_" << i;
    os << ",xhat,growth\n";
    char buf[64];
    for (std::size_t p = 0; p < batch.n_paths; ++p) {
        const PathRecord rec = generate_path(batch, p);
        const NumerairePath num = numeraire_path(batch.model, rec, p);
        for (std::size_t k = 0; k <= batch.grid.n_steps; ++k) {
            os << p;
            std::snprintf(buf, sizeof(buf), ",%.15g", batch.grid.time_at(k));
            os << buf;
            for (int i = 0; i < batch.model.d; ++i) {
                std::snprintf(buf, sizeof(buf), ",%.17g", rec.price(k, i));
                os << buf;
            }
            std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", num.wealth[k],
                          num.growth[k]);
            os << buf;
        }
    }
}

}  // namespace ddlab
