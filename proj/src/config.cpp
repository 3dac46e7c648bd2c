#include "config.hpp"

#include <cctype>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <map>

#include "error.hpp"

namespace shum {

namespace {

std::string trim(const std::string& text) {
    size_t begin = 0, end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return text.substr(begin, end - begin);
}

double parse_double(const std::string& value, const std::string& where, const std::string& key) {
    try {
        size_t used = 0;
        double parsed = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        fail_config(fmt::format("{}: key '{}' expects a number, got '{}'", where, key, value));
    }
}

long parse_long(const std::string& value, const std::string& where, const std::string& key) {
    try {
        size_t used = 0;
        long parsed = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        fail_config(fmt::format("{}: key '{}' expects an integer, got '{}'", where, key, value));
    }
}

Interval parse_interval(const std::string& value, const std::string& where,
                        const std::string& key) {
    size_t comma = value.find(',');
    require(comma != std::string::npos, errc::config,
            fmt::format("{}: key '{}' expects 'lo,hi', got '{}'", where, key, value));
    double lo = parse_double(trim(value.substr(0, comma)), where, key);
    double hi = parse_double(trim(value.substr(comma + 1)), where, key);
    require(lo < hi, errc::config,
            fmt::format("{}: key '{}' needs lo < hi, got '{}'", where, key, value));
    return Interval{lo, hi};
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& value, const std::string& where,
                          const std::string& key, Parse parse) {
    std::vector<T> out;
    size_t begin = 0;
    while (begin <= value.size()) {
        size_t comma = value.find(',', begin);
        std::string item = trim(value.substr(begin, comma == std::string::npos
                                                        ? std::string::npos
                                                        : comma - begin));
        require(!item.empty(), errc::config,
                fmt::format("{}: key '{}' has an empty list entry in '{}'", where, key, value));
        out.push_back(parse(item, where, key));
        if (comma == std::string::npos) break;
        begin = comma + 1;
    }
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"N", [](auto& c, auto& v, auto& w) { c.N = parse_long(v, w, "N"); }},
        {"K", [](auto& c, auto& v, auto& w) { c.K = static_cast<int>(parse_long(v, w, "K")); }},
        {"T", [](auto& c, auto& v, auto& w) { c.T = parse_double(v, w, "T"); }},
        {"delta", [](auto& c, auto& v, auto& w) { c.delta = parse_double(v, w, "delta"); }},
        {"lambda", [](auto& c, auto& v, auto& w) { c.lambda = parse_double(v, w, "lambda"); }},
        {"mu", [](auto& c, auto& v, auto& w) { c.mu = parse_double(v, w, "mu"); }},
        {"C", [](auto& c, auto& v, auto& w) { c.C = parse_double(v, w, "C"); }},
        {"eps", [](auto& c, auto& v, auto& w) { c.eps = parse_double(v, w, "eps"); }},
        {"eps_T", [](auto& c, auto& v, auto& w) { c.eps_T = parse_double(v, w, "eps_T"); }},
        {"G0", [](auto& c, auto& v, auto& w) { c.G0 = parse_interval(v, w, "G0"); }},
        {"G1", [](auto& c, auto& v, auto& w) { c.G1 = parse_interval(v, w, "G1"); }},
        {"G2", [](auto& c, auto& v, auto& w) { c.G2 = parse_interval(v, w, "G2"); }},
        {"margin", [](auto& c, auto& v, auto& w) { c.margin = parse_double(v, w, "margin"); }},
        {"a1", [](auto& c, auto& v, auto&) { c.a1_text = v; }},
        {"a2", [](auto& c, auto& v, auto&) { c.a2_text = v; }},
        {"y0", [](auto& c, auto& v, auto&) { c.y0_text = v; }},
        {"tol", [](auto& c, auto& v, auto& w) { c.tol = parse_double(v, w, "tol"); }},
        {"seed", [](auto& c, auto& v, auto& w) {
             c.seed = static_cast<unsigned long>(parse_long(v, w, "seed"));
         }},
        {"trials", [](auto& c, auto& v, auto& w) { c.trials = parse_long(v, w, "trials"); }},
        {"t_samples", [](auto& c, auto& v, auto& w) { c.t_samples = parse_long(v, w, "t_samples"); }},
        {"max_iter", [](auto& c, auto& v, auto& w) { c.max_iter = parse_long(v, w, "max_iter"); }},
        {"workers", [](auto& c, auto& v, auto& w) { c.workers = parse_long(v, w, "workers"); }},
        {"lambda0", [](auto& c, auto& v, auto& w) { c.lambda0 = parse_double(v, w, "lambda0"); }},
        {"eps0", [](auto& c, auto& v, auto& w) { c.eps0 = parse_double(v, w, "eps0"); }},
        {"h0", [](auto& c, auto& v, auto& w) { c.h0 = parse_double(v, w, "h0"); }},
        {"N_list", [](auto& c, auto& v, auto& w) {
             c.N_list = parse_list<long>(v, w, "N_list", parse_long);
         }},
        {"T_list", [](auto& c, auto& v, auto& w) {
             c.T_list = parse_list<double>(v, w, "T_list", parse_double);
         }},
    };
    return table;
}

} // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& [key, setter] : setters()) out.push_back(key);
        return out;
    }();
    return keys;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                   const std::string& where) {
    auto it = setters().find(key);
    require(it != setters().end(), errc::config,
            fmt::format("{}: unknown configuration key '{}'", where, key));
    it->second(cfg, value, where);
}

void load_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    require(in.good(), errc::config, fmt::format("cannot open config file '{}'", path));
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::string stripped = trim(line);
        if (stripped.empty()) continue;
        std::string where = fmt::format("{}:{}", path, line_no);
        size_t equals = stripped.find('=');
        require(equals != std::string::npos, errc::config,
                fmt::format("{}: expected key=value, got '{}'", where, stripped));
        std::string key = trim(stripped.substr(0, equals));
        std::string value = trim(stripped.substr(equals + 1));
        require(!key.empty(), errc::config, fmt::format("{}: missing key before '='", where));
        apply_setting(cfg, key, value, where);
    }
}

void finalize_config(ExperimentConfig& cfg) {
    require(cfg.N >= 4, errc::config,
            fmt::format("N = {} is too small; the fourth-difference stencil needs N >= 4", cfg.N));
    require(cfg.K >= 1 && cfg.K <= 16, errc::config,
            fmt::format("K = {} must be in 1..16", cfg.K));
    require(cfg.T > 0.0, errc::config, fmt::format("T = {} must be positive", cfg.T));
    require(cfg.delta > 0.0 && cfg.delta < 0.5, errc::config,
            fmt::format("delta = {} violates the constraint delta in (0, 1/2)", cfg.delta));
    require(cfg.lambda > 0.0, errc::config,
            fmt::format("lambda = {} must be positive", cfg.lambda));
    require(cfg.mu > 0.0, errc::config, fmt::format("mu = {} must be positive", cfg.mu));
    require(cfg.C > 0.0, errc::config,
            fmt::format("penalty rule constant C = {} must be positive", cfg.C));
    require(cfg.eps >= 0.0, errc::config,
            fmt::format("eps = {} must be zero (rule) or positive (fixed)", cfg.eps));
    require(cfg.eps_T >= 0.0, errc::config,
            fmt::format("eps_T = {} must be zero (rule) or positive (fixed)", cfg.eps_T));
    require(cfg.margin > 0.0, errc::config,
            fmt::format("margin = {} must be positive", cfg.margin));
    require(cfg.tol > 0.0, errc::config, fmt::format("tol = {} must be positive", cfg.tol));
    require(cfg.trials >= 1, errc::config,
            fmt::format("trials = {} must be at least 1", cfg.trials));
    require(cfg.t_samples >= 2, errc::config,
            fmt::format("t_samples = {} must be at least 2", cfg.t_samples));
    require(cfg.max_iter >= 0, errc::config,
            fmt::format("max_iter = {} must be nonnegative", cfg.max_iter));
    require(cfg.workers >= 0, errc::config,
            fmt::format("workers = {} must be nonnegative", cfg.workers));
    require(!cfg.N_list.empty(), errc::config, "N_list must not be empty");
    require(!cfg.T_list.empty(), errc::config, "T_list must not be empty");
    for (long n : cfg.N_list)
        require(n >= 4, errc::config, fmt::format("N_list entry {} is too small; need N >= 4", n));
    for (double t : cfg.T_list)
        require(t > 0.0, errc::config, fmt::format("T_list entry {} must be positive", t));

    bool nested = 0.0 <= cfg.G0.lo && cfg.G0.lo < cfg.G1.lo && cfg.G1.lo < cfg.G2.lo
                  && cfg.G2.lo < cfg.G2.hi && cfg.G2.hi < cfg.G1.hi && cfg.G1.hi < cfg.G0.hi
                  && cfg.G0.hi <= 1.0;
    require(nested, errc::config,
            fmt::format("control regions must satisfy G2 compactly inside G1, G1 compactly "
                        "inside G0, and G0 inside (0,1); got G0=({},{}), G1=({},{}), G2=({},{})",
                        cfg.G0.lo, cfg.G0.hi, cfg.G1.lo, cfg.G1.hi, cfg.G2.lo, cfg.G2.hi));

    cfg.a1_expr = parse_expression(cfg.a1_text);
    cfg.a2_expr = parse_expression(cfg.a2_text);
    cfg.y0_expr = parse_expression(cfg.y0_text);
}

} // namespace shum
