#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace ddlab {

// Uniform grid t_k = k*dt, k = 0..n_steps.
struct TimeGrid {
    double dt = 0.0;
    std::size_t n_steps = 0;

    TimeGrid() = default;
    TimeGrid(double dt_, std::size_t n_steps_);

    double time_at(std::size_t k) const { return static_cast<double>(k) * dt; }
    std::size_t n_points() const { return n_steps + 1; }
    double t_max() const { return time_at(n_steps); }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

// Grid index of a stopping time. The sentinel value makes stopping-time
// arithmetic (min, comparison) total: "never hit" compares above every
// finite index.
struct StopIndex {
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
    std::size_t index = npos;

    StopIndex() = default;
    explicit constexpr StopIndex(std::size_t k) : index(k) {}
    static constexpr StopIndex infinity() { return StopIndex(); }
    static constexpr StopIndex at(std::size_t k) { return StopIndex(k); }

    bool is_finite() const { return index != npos; }
    friend constexpr auto operator<=>(StopIndex a, StopIndex b) = default;
};

constexpr StopIndex min(StopIndex a, StopIndex b) { return a <= b ? a : b; }

// A nonnegative sampled process on a uniform grid. Wealth paths are
// normalized to start at 1; that invariant is enforced by the operations
// that need it, not by the container.
struct SampledPath {
    TimeGrid grid;
    std::vector<double> values;

    SampledPath() = default;
    SampledPath(TimeGrid g, std::vector<double> v);

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t k) const { return values[k]; }
    double front() const { return values.front(); }
    double back() const { return values.back(); }
};

// Prefix maximum: output[k] = max(values[0..k]). Nondecreasing, >= input.
SampledPath running_max(const SampledPath& path);

// values[k] / running_max[k], in [0,1], equal to 1 at every time of maximum.
// Requires path[0] > 0.
SampledPath relative_drawdown(const SampledPath& path);

// Smallest index k > after with values[k] >= level, else infinity.
// With level = exp(l) this realizes the log-scale hitting time of l.
StopIndex first_hit_level(const SampledPath& path, double level,
                          StopIndex after = StopIndex::at(0));

// Smallest index k > after where the relative drawdown is <= alpha, else
// infinity. Requires 0 < alpha < 1.
StopIndex first_drawdown_hit(const SampledPath& path, double alpha,
                             StopIndex after = StopIndex::at(0));

// True iff values[t] is within tol (relative) of the running maximum at t.
// t = infinity counts as a time of maximum by convention.
bool is_time_of_maximum(const SampledPath& path, StopIndex t, double tol = 1e-12);

// CSV with header "t,value", one row per grid point, >= 12 significant
// digits (values are written round-trip exact).
void write_path_csv(const SampledPath& path, std::ostream& os);
void write_path_csv(const SampledPath& path, const std::string& filename);
SampledPath read_path_csv(std::istream& is);
SampledPath read_path_csv(const std::string& filename);

}  // namespace ddlab
