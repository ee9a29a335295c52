#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kirchhoff/domain.hpp"
#include "kirchhoff/dynamics.hpp"
#include "kirchhoff/functionals.hpp"

namespace kirchhoff {

struct ConfigError : std::runtime_error {
    int line;
    ConfigError(int line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

// Flat key-value configuration with dotted section prefixes; one config fully
// determines a run.
class KeyValueConfig {
  public:
    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_string(const std::string& text);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::vector<double> get_double_list(const std::string& key) const;

  private:
    struct Entry {
        std::string value;
        int line = 0;
    };
    std::map<std::string, Entry> entries_;
};

enum class InitialKind { Preset, Coefficients, ModeMix, ScaledShape };

struct InitialDatum {
    InitialKind kind = InitialKind::Preset;
    std::string preset;                           // Preset
    std::vector<double> coeffs;                   // Coefficients
    std::vector<std::pair<std::size_t, double>> mode_mix;  // ModeMix: (mode, weight)
    std::size_t shape_mode = 1;                   // ScaledShape
    double target_energy = 0.0;
    bool ascending = true;
};

struct RunConfig {
    DomainSpec domain;
    ModelParams model;
    SolverControls solver;
    InitialDatum initial;
    std::uint64_t seed = 1234;
    std::size_t geometry_restarts = 6;
    std::size_t geometry_iters = 600;
    std::size_t bounds_samples = 2000;

    static RunConfig from_config(const KeyValueConfig& kv);
};

}  // namespace kirchhoff
