#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavegame/cost.hpp"
#include "wavegame/phase_plane.hpp"

namespace wavegame {

struct GridConfig {
    double dx = 0.05;
    double dt = 0.025;
    double x_lo = -60.0;
    double x_hi = 60.0;
    bool implicit = true;
};

struct SpeedMapsConfig {
    std::vector<double> lambdas{0.1, 0.2, 0.39, 0.79, 2.0, 5.0};
    int k_max = 2;
};

struct SimulateConfig {
    std::string mode = "both";  ///< baseline | reversed | both
    double level = 0.5;
    double record_every = 0.5;
    double snapshot_every = 10.0;  ///< time between snapshot CSV frames (0: none)
    std::size_t node_stride = 4;
    bool contrast = true;  ///< reversed runs also do the m ≡ 0 restart
};

struct CooperateConfig {
    double c = 1.0;
    std::optional<double> lambda0;  ///< null: first certified candidate
    std::vector<double> lambda0_candidates{0.13, 0.12, 0.1, 0.08, 0.05};
    double q = 8.0;
    double delta = 0.05;
    std::size_t samples = 20;
    double dx = 0.1;
    double dt = 0.05;
    double csv_every = 10.0;
    std::size_t csv_node_stride = 20;
};

struct ExperimentConfig {
    std::string nonlinearity_kind = "cubic";
    double eta = 0.3;
    std::string lagrangian_kind = "power";
    double kappa = 0.5;
    double exponent = 2.0;
    double lambda = 0.79;
    double c = 0.05;
    int k = 0;
    bool periodic = false;
    GridConfig grid;
    double T = 0.0;  ///< 0: 20/c for reversed runs, 60 for baseline runs
    std::string output = "out";
    SpeedMapsConfig speed_maps;
    SimulateConfig simulate;
    CooperateConfig cooperate;

    BistableNonlinearity nonlinearity() const;
    Lagrangian lagrangian() const;
    nlohmann::json to_json() const;
};

/// Embedded defaults overlaid with `doc`. Unknown keys, wrong types and
/// out-of-range values throw ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace wavegame
