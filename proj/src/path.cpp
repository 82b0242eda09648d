#include "ddlab/path.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ddlab/errors.hpp"

namespace ddlab {

TimeGrid::TimeGrid(double dt_, std::size_t n_steps_) : dt(dt_), n_steps(n_steps_) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw invalid_input("TimeGrid: dt must be positive and finite");
    }
    if (n_steps == 0) {
        throw invalid_input("TimeGrid: n_steps must be positive");
    }
}

SampledPath::SampledPath(TimeGrid g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
    if (values.size() != grid.n_points()) {
        throw invalid_input("SampledPath: values length must be n_steps+1");
    }
    for (double x : values) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw invalid_input("SampledPath: values must be finite and nonnegative");
        }
    }
}

SampledPath running_max(const SampledPath& path) {
    if (path.values.empty()) {
        throw invalid_input("running_max: empty path");
    }
    std::vector<double> out(path.values.size());
    double m = path.values[0];
    for (std::size_t k = 0; k < path.values.size(); ++k) {
        if (path.values[k] > m) m = path.values[k];
        out[k] = m;
    }
    return SampledPath(path.grid, std::move(out));
}

SampledPath relative_drawdown(const SampledPath& path) {
    if (path.values.empty()) {
        throw invalid_input("relative_drawdown: empty path");
    }
    if (!(path.values[0] > 0.0)) {
        throw invalid_input("relative_drawdown: path[0] must be positive");
    }
    std::vector<double> out(path.values.size());
    double m = path.values[0];
    for (std::size_t k = 0; k < path.values.size(); ++k) {
        const double v = path.values[k];
        if (v >= m) {
            m = v;
            out[k] = 1.0;
        } else {
            out[k] = v / m;
        }
    }
    return SampledPath(path.grid, std::move(out));
}

StopIndex first_hit_level(const SampledPath& path, double level, StopIndex after) {
    if (!(level > 0.0)) {
        throw invalid_input("first_hit_level: level must be positive");
    }
    if (!after.is_finite()) return StopIndex::infinity();
    for (std::size_t k = after.index + 1; k < path.values.size(); ++k) {
        if (path.values[k] >= level) return StopIndex::at(k);
    }
    return StopIndex::infinity();
}

StopIndex first_drawdown_hit(const SampledPath& path, double alpha, StopIndex after) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw invalid_input("first_drawdown_hit: alpha must lie in (0,1)");
    }
    if (!after.is_finite()) return StopIndex::infinity();
    double m = 0.0;
    const std::size_t n = path.values.size();
    for (std::size_t k = 0; k < n; ++k) {
        if (path.values[k] > m) m = path.values[k];
        if (k > after.index && path.values[k] <= alpha * m) return StopIndex::at(k);
    }
    return StopIndex::infinity();
}

bool is_time_of_maximum(const SampledPath& path, StopIndex t, double tol) {
    if (!t.is_finite()) return true;  // the infinite horizon is a time of maximum
    if (t.index >= path.values.size()) {
        throw invalid_input("is_time_of_maximum: index beyond grid");
    }
    double m = path.values[0];
    for (std::size_t k = 1; k <= t.index; ++k) {
        if (path.values[k] > m) m = path.values[k];
    }
    return std::fabs(path.values[t.index] - m) <= tol * m;
}

void write_path_csv(const SampledPath& path, std::ostream& os) {
    os << "t,value\n";
    char buf[64];
    for (std::size_t k = 0; k < path.values.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.15g,%.17g\n", path.grid.time_at(k),
                      path.values[k]);
        os << buf;
    }
}

void write_path_csv(const SampledPath& path, const std::string& filename) {
    std::ofstream os(filename);
    if (!os) throw io_error("cannot open for writing: " + filename);
    write_path_csv(path, os);
    if (!os) throw io_error("write failed: " + filename);
}

SampledPath read_path_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw io_error("path csv: empty input");
    // header "t,value"
    std::vector<double> times;
    std::vector<double> values;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw io_error("path csv: malformed row: " + line);
        times.push_back(std::stod(line.substr(0, comma)));
        values.push_back(std::stod(line.substr(comma + 1)));
    }
    if (values.size() < 2) throw io_error("path csv: need at least two rows");
    const double dt = times[1] - times[0];
    if (!(dt > 0.0)) throw io_error("path csv: times must be increasing");
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double expect = static_cast<double>(k) * dt;
        if (std::fabs(times[k] - expect) > 1e-9 * (1.0 + std::fabs(expect))) {
            throw io_error("path csv: grid must be uniform starting at 0");
        }
    }
    TimeGrid grid(dt, values.size() - 1);
    return SampledPath(grid, std::move(values));
}

SampledPath read_path_csv(const std::string& filename) {
    std::ifstream is(filename);
    if (!is) throw io_error("cannot open: " + filename);
    return read_path_csv(is);
}

}  // namespace ddlab
