#pragma once

#include "hkflow/flow_kind.hpp"
#include "hkflow/grid.hpp"
#include "hkflow/transport.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace hkcli {

// Raised for anything wrong in the configuration document; maps to exit code 2.
class ConfigError : public hkflow::UsageError {
public:
    ConfigError(const std::string& path, const std::string& what)
        : hkflow::UsageError(path + ": " + what), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

struct DomainConfig {
    hkflow::DomainKind kind = hkflow::DomainKind::Circle;
    double length = 1.0;
    std::size_t n_cells = 128;
};

struct ModelConfig {
    std::string name = "power_law"; // power_law | log | arctangential
    double alpha = 1.0;
    std::string potential = "0";
};

struct FlowConfig {
    hkflow::FlowKind kind = hkflow::FlowKind::Spherical;
    double t_end = 1.0;
    double dt_init = 1e-4;
    double snapshot_every = 0.01;
    double cfl_safety = 0.45;
    bool mass_recovery = false;
    double initial_mass = 1.0; // M0 for the recovery
};

// A density given by an expression of x or by a CSV file with columns x,u.
struct DensitySpec {
    std::optional<std::string> expression;
    std::optional<std::string> csv;
    std::optional<double> mass; // rescale to this mass when present
};

struct TransportConfig {
    int n_time = 32;
    double tol = 1e-6;
    int max_iters = 20000;
    double step_ratio = 1.0;
    std::vector<hkflow::TransportKind> kinds{hkflow::TransportKind::HK};
    bool interpolation = false;
};

struct VerifyConfig {
    std::string suite = "all";
    std::size_t eep_members = 9;
    std::size_t talagrand_members = 20;
    std::size_t ordering_pairs = 10;
    std::size_t transport_cells = 64;
    std::size_t dissipation_cells = 256;
    std::size_t run_cells = 128;
};

struct OutputConfig {
    std::string directory = "out";
    std::vector<std::string> formats{"csv", "json"};
    bool wants(const std::string& f) const;
};

struct RunConfig {
    DomainConfig domain;
    ModelConfig model;
    FlowConfig flow;
    std::optional<DensitySpec> initial;
    std::optional<DensitySpec> rho0;
    std::optional<DensitySpec> rho1;
    TransportConfig transport;
    VerifyConfig verify;
    OutputConfig output;
    std::uint64_t seed = 20240601;
};

// Strict parse: unknown keys and out-of-range values raise ConfigError with a
// JSON-pointer-like path such as "$.flow.t_end".
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& cfg);

} // namespace hkcli
