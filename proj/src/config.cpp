#include "ddlab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ddlab/errors.hpp"

namespace ddlab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_vector(const std::string& text, const char* key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw config_error(std::string("bad numeric entry for ") + key + ": " + item);
        }
    }
    if (out.empty()) throw config_error(std::string("empty vector for ") + key);
    return out;
}

std::vector<double> parse_matrix(const std::string& text, int* rows_out) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string row;
    int rows = 0;
    std::size_t cols = 0;
    while (std::getline(ss, row, ';')) {
        const std::vector<double> r = parse_vector(row, "sigma");
        if (rows == 0) {
            cols = r.size();
        } else if (r.size() != cols) {
            throw config_error("sigma rows must all have the same length");
        }
        out.insert(out.end(), r.begin(), r.end());
        ++rows;
    }
    *rows_out = rows;
    return out;
}

double parse_double(const std::string& v, const char* key) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw config_error(std::string("bad numeric value for ") + key + ": " + v);
    }
}

std::uint64_t parse_u64(const std::string& v, const char* key) {
    try {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return static_cast<std::uint64_t>(x);
    } catch (const std::exception&) {
        throw config_error(std::string("bad integer value for ") + key + ": " + v);
    }
}

bool parse_bool(const std::string& v, const char* key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw config_error(std::string("bad boolean value for ") + key + ": " + v);
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (key == "preset") {
        if (value != "custom" && value != "gbm" && value != "dds") {
            throw config_error("preset must be one of custom|gbm|dds");
        }
        preset = value;
    } else if (key == "d") {
        d = static_cast<int>(parse_u64(value, "d"));
    } else if (key == "mu") {
        mu = parse_vector(value, "mu");
    } else if (key == "sigma") {
        int rows = 0;
        sigma = parse_matrix(value, &rows);
    } else if (key == "s0") {
        s0 = parse_vector(value, "s0");
    } else if (key == "pinv_tol") {
        pinv_tol = parse_double(value, "pinv_tol");
        if (!(pinv_tol > 0.0)) throw config_error("pinv_tol must be positive");
    } else if (key == "dt") {
        dt = parse_double(value, "dt");
        if (!(dt > 0.0) || !std::isfinite(dt)) throw config_error("dt must be positive");
    } else if (key == "t_max") {
        t_max = parse_double(value, "t_max");
        if (!(t_max > 0.0)) throw config_error("t_max must be positive");
    } else if (key == "n_paths") {
        n_paths = parse_u64(value, "n_paths");
        if (n_paths < 1) throw config_error("n_paths must be >= 1");
    } else if (key == "seed") {
        seed = parse_u64(value, "seed");
    } else if (key == "alpha") {
        alpha = parse_double(value, "alpha");
        if (!(alpha >= 0.0 && alpha < 1.0)) throw config_error("alpha must lie in [0,1)");
    } else if (key == "level") {
        level = parse_double(value, "level");
        if (!(level > 0.0)) throw config_error("level must be positive");
    } else if (key == "threads") {
        threads = static_cast<int>(parse_u64(value, "threads"));
        if (threads < 1 || threads > 256) throw config_error("threads must lie in [1,256]");
    } else if (key == "max_n") {
        max_n = parse_u64(value, "max_n");
        if (max_n < 1) throw config_error("max_n must be >= 1");
    } else if (key == "n_list") {
        n_list.clear();
        for (double v : parse_vector(value, "n_list")) {
            if (!(v >= 1.0) || v != std::floor(v)) {
                throw config_error("n_list entries must be positive integers");
            }
            n_list.push_back(static_cast<std::size_t>(v));
        }
    } else if (key == "eps") {
        eps = parse_double(value, "eps");
    } else if (key == "strategy") {
        strategy = value;
    } else if (key == "out_dir") {
        out_dir = value;
    } else if (key == "dump_samples") {
        dump_samples = parse_bool(value, "dump_samples");
    } else {
        throw config_error("unknown config key: " + key);
    }
}

void ExperimentConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw config_error("dt must be positive");
    if (!(t_max > dt)) throw config_error("t_max must exceed dt");
    if (n_paths < 1) throw config_error("n_paths must be >= 1");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw config_error("alpha must lie in [0,1)");
    if (!(level > 0.0)) throw config_error("level must be positive");
    if (threads < 1 || threads > 256) throw config_error("threads must lie in [1,256]");
    if (!(pinv_tol > 0.0)) throw config_error("pinv_tol must be positive");
    if (max_n < 1) throw config_error("max_n must be >= 1");
    if (n_list.empty()) throw config_error("n_list must not be empty");
    if (!(eps > 0.0 && eps < 0.5)) throw config_error("eps must lie in (0,0.5)");
    if (preset == "custom") {
        const int dd = static_cast<int>(mu.size());
        if (dd != d) throw config_error("mu must have length d");
        if (static_cast<int>(s0.size()) != d) throw config_error("s0 must have length d");
        if (sigma.size() % static_cast<std::size_t>(d) != 0 || sigma.empty()) {
            throw config_error("sigma must be a d-row matrix");
        }
    }
}

MarketModel ExperimentConfig::build_model() const {
    validate();
    if (preset == "gbm") return MarketModel::gbm_preset();
    if (preset == "dds") return MarketModel::dds_preset();
    const int m = static_cast<int>(sigma.size() / static_cast<std::size_t>(d));
    MarketModel model = MarketModel::constant(mu, sigma, m, s0);
    model.pinv_tol = pinv_tol;
    return model;
}

std::size_t ExperimentConfig::n_steps() const {
    const double steps = t_max / dt;
    const auto n = static_cast<std::size_t>(std::llround(steps));
    return n < 1 ? 1 : n;
}

TimeGrid ExperimentConfig::build_grid() const {
    validate();
    return TimeGrid(dt, n_steps());
}

std::string ExperimentConfig::echo() const {
    std::ostringstream os;
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    os << "preset=" << preset << ";d=" << d << ";mu=";
    for (std::size_t i = 0; i < mu.size(); ++i) os << (i ? "," : "") << num(mu[i]);
    os << ";sigma=";
    for (std::size_t i = 0; i < sigma.size(); ++i) os << (i ? "," : "") << num(sigma[i]);
    os << ";s0=";
    for (std::size_t i = 0; i < s0.size(); ++i) os << (i ? "," : "") << num(s0[i]);
    os << ";pinv_tol=" << num(pinv_tol) << ";dt=" << num(dt) << ";t_max=" << num(t_max)
       << ";n_paths=" << n_paths << ";seed=" << seed << ";alpha=" << num(alpha)
       << ";level=" << num(level) << ";max_n=" << max_n << ";eps=" << num(eps)
       << ";n_list=";
    for (std::size_t i = 0; i < n_list.size(); ++i) os << (i ? "," : "") << n_list[i];
    os << ";strategy=" << strategy;
    return os.str();
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw config_error("line " + std::to_string(lineno) + ": expected key = value");
        }
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config_file(const std::string& filename) {
    std::ifstream is(filename);
    if (!is) throw config_error("cannot open config file: " + filename);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace ddlab
