#include "kirchhoff/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace kirchhoff {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) throw ConfigError(lineno, "expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw ConfigError(lineno, "empty key");
        cfg.entries_[key] = Entry{value, lineno};
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) != 0; }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
}

std::string KeyValueConfig::require_string(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(0, "missing required key '" + key + "'");
    return it->second.value;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second.value, &pos);
        if (pos != it->second.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(it->second.line, "malformed numeric value for '" + key + "'");
    }
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const std::int64_t v = std::stoll(it->second.value, &pos);
        if (pos != it->second.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(it->second.line, "malformed integer value for '" + key + "'");
    }
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return {};
    std::vector<double> out;
    std::istringstream ss(it->second.value);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(trim(tok)));
        } catch (const std::exception&) {
            throw ConfigError(it->second.line, "malformed list entry for '" + key + "'");
        }
    }
    return out;
}

RunConfig RunConfig::from_config(const KeyValueConfig& kv) {
    RunConfig rc;

    const std::string kind = kv.get_string("domain.kind", "interval");
    const double length = kv.get_double("domain.length", M_PI);
    const std::size_t n_modes = std::size_t(kv.get_int("domain.n_modes", 64));
    const std::size_t n_quad = std::size_t(kv.get_int("domain.n_quad", std::int64_t(2 * n_modes + 2)));
    if (kind == "interval") {
        rc.domain = DomainSpec::interval(length, n_modes, n_quad);
    } else if (kind == "rectangle") {
        rc.domain = DomainSpec::rectangle(length, kv.get_double("domain.length_y", length),
                                          n_modes, n_quad);
    } else {
        throw ConfigError(0, "domain.kind must be 'interval' or 'rectangle'");
    }

    rc.model.a = kv.get_double("model.a", 1.0);
    rc.model.b = kv.get_double("model.b", 1.0);
    rc.model.q = kv.get_double("model.q", 5.0);

    rc.solver.dt_init = kv.get_double("solver.dt_init", 1e-4);
    rc.solver.dt_min = kv.get_double("solver.dt_min", 1e-12);
    rc.solver.dt_max = kv.get_double("solver.dt_max", 1e-2);
    rc.solver.t_max = kv.get_double("solver.t_max", 50.0);
    rc.solver.rel_tol = kv.get_double("solver.rel_tol", 1e-8);
    rc.solver.norm_cap = kv.get_double("solver.norm_cap", 1e8);
    rc.solver.decay_floor = kv.get_double("solver.decay_floor", 1e-12);
    rc.solver.snapshot_stride = std::size_t(kv.get_int("solver.snapshot_stride", 10));

    if (kv.has("initial.coeffs")) {
        rc.initial.kind = InitialKind::Coefficients;
        rc.initial.coeffs = kv.get_double_list("initial.coeffs");
    } else if (kv.has("initial.mode_mix")) {
        rc.initial.kind = InitialKind::ModeMix;
        const std::vector<double> flat = kv.get_double_list("initial.mode_mix");
        if (flat.size() % 2 != 0)
            throw ConfigError(0, "initial.mode_mix needs mode,weight pairs");
        for (std::size_t i = 0; i + 1 < flat.size(); i += 2)
            rc.initial.mode_mix.emplace_back(std::size_t(flat[i]), flat[i + 1]);
    } else if (kv.has("initial.energy")) {
        rc.initial.kind = InitialKind::ScaledShape;
        rc.initial.shape_mode = std::size_t(kv.get_int("initial.shape_mode", 1));
        rc.initial.target_energy = kv.get_double("initial.energy", 0.0);
        const std::string branch = kv.get_string("initial.branch", "ascending");
        if (branch != "ascending" && branch != "descending")
            throw ConfigError(0, "initial.branch must be 'ascending' or 'descending'");
        rc.initial.ascending = (branch == "ascending");
    } else {
        rc.initial.kind = InitialKind::Preset;
        rc.initial.preset = kv.get_string("initial.preset", "small-groundstate");
    }

    rc.seed = std::uint64_t(kv.get_int("seed", 1234));
    rc.geometry_restarts = std::size_t(kv.get_int("geometry.restarts", 6));
    rc.geometry_iters = std::size_t(kv.get_int("geometry.iters", 600));
    rc.bounds_samples = std::size_t(kv.get_int("geometry.bounds_samples", 2000));
    return rc;
}

}  // namespace kirchhoff
