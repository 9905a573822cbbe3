#include "wavegame/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "wavegame/error.hpp"

namespace wavegame {

namespace {

using nlohmann::json;

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

void positive(double v, const std::string& name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(name + " must be positive and finite");
}

}  // namespace

BistableNonlinearity ExperimentConfig::nonlinearity() const {
    try {
        return cubic(eta);
    } catch (const WaveError& e) {
        throw ConfigError(e.what());
    }
}

Lagrangian ExperimentConfig::lagrangian() const { return Lagrangian::power_law(kappa, exponent); }

nlohmann::json ExperimentConfig::to_json() const {
    json j;
    j["nonlinearity"] = {{"kind", nonlinearity_kind}, {"eta", eta}};
    j["lagrangian"] = {{"kind", lagrangian_kind}, {"kappa", kappa}, {"exponent", exponent}};
    j["lambda"] = lambda;
    j["c"] = c;
    j["k"] = k;
    j["periodic"] = periodic;
    j["grid"] = {{"dx", grid.dx}, {"dt", grid.dt}, {"x_lo", grid.x_lo}, {"x_hi", grid.x_hi}, {"implicit", grid.implicit}};
    j["T"] = T;
    j["output"] = output;
    j["speed_maps"] = {{"lambdas", speed_maps.lambdas}, {"k_max", speed_maps.k_max}};
    j["simulate"] = {{"mode", simulate.mode},
                     {"level", simulate.level},
                     {"record_every", simulate.record_every},
                     {"snapshot_every", simulate.snapshot_every},
                     {"node_stride", simulate.node_stride},
                     {"contrast", simulate.contrast}};
    j["cooperate"] = {{"c", cooperate.c},
                      {"lambda0", cooperate.lambda0 ? json(*cooperate.lambda0) : json(nullptr)},
                      {"lambda0_candidates", cooperate.lambda0_candidates},
                      {"q", cooperate.q},
                      {"delta", cooperate.delta},
                      {"samples", cooperate.samples},
                      {"dx", cooperate.dx},
                      {"dt", cooperate.dt},
                      {"csv_every", cooperate.csv_every},
                      {"csv_node_stride", cooperate.csv_node_stride}};
    return j;
}

ExperimentConfig parse_config(const nlohmann::json& doc) {
    ExperimentConfig cfg;
    only_keys(doc, "config",
              {"nonlinearity", "lagrangian", "lambda", "c", "k", "periodic", "grid", "T", "output", "speed_maps",
               "simulate", "cooperate"});
    if (doc.contains("nonlinearity")) {
        const auto& n = doc["nonlinearity"];
        only_keys(n, "nonlinearity", {"kind", "eta"});
        read(n, "kind", cfg.nonlinearity_kind, "nonlinearity");
        read(n, "eta", cfg.eta, "nonlinearity");
    }
    if (doc.contains("lagrangian")) {
        const auto& l = doc["lagrangian"];
        only_keys(l, "lagrangian", {"kind", "kappa", "exponent"});
        read(l, "kind", cfg.lagrangian_kind, "lagrangian");
        read(l, "kappa", cfg.kappa, "lagrangian");
        read(l, "exponent", cfg.exponent, "lagrangian");
    }
    read(doc, "lambda", cfg.lambda, "config");
    read(doc, "c", cfg.c, "config");
    read(doc, "k", cfg.k, "config");
    read(doc, "periodic", cfg.periodic, "config");
    read(doc, "T", cfg.T, "config");
    read(doc, "output", cfg.output, "config");
    if (doc.contains("grid")) {
        const auto& g = doc["grid"];
        only_keys(g, "grid", {"dx", "dt", "x_lo", "x_hi", "implicit"});
        read(g, "dx", cfg.grid.dx, "grid");
        read(g, "dt", cfg.grid.dt, "grid");
        read(g, "x_lo", cfg.grid.x_lo, "grid");
        read(g, "x_hi", cfg.grid.x_hi, "grid");
        read(g, "implicit", cfg.grid.implicit, "grid");
    }
    if (doc.contains("speed_maps")) {
        const auto& s = doc["speed_maps"];
        only_keys(s, "speed_maps", {"lambdas", "k_max"});
        read(s, "lambdas", cfg.speed_maps.lambdas, "speed_maps");
        read(s, "k_max", cfg.speed_maps.k_max, "speed_maps");
    }
    if (doc.contains("simulate")) {
        const auto& s = doc["simulate"];
        only_keys(s, "simulate", {"mode", "level", "record_every", "snapshot_every", "node_stride", "contrast"});
        read(s, "mode", cfg.simulate.mode, "simulate");
        read(s, "level", cfg.simulate.level, "simulate");
        read(s, "record_every", cfg.simulate.record_every, "simulate");
        read(s, "snapshot_every", cfg.simulate.snapshot_every, "simulate");
        read(s, "node_stride", cfg.simulate.node_stride, "simulate");
        read(s, "contrast", cfg.simulate.contrast, "simulate");
    }
    if (doc.contains("cooperate")) {
        const auto& s = doc["cooperate"];
        only_keys(s, "cooperate",
                  {"c", "lambda0", "lambda0_candidates", "q", "delta", "samples", "dx", "dt", "csv_every", "csv_node_stride"});
        if (s.contains("lambda0") && !s["lambda0"].is_null()) {
            double v = 0.0;
            read(s, "lambda0", v, "cooperate");
            cfg.cooperate.lambda0 = v;
        }
        read(s, "c", cfg.cooperate.c, "cooperate");
        read(s, "lambda0_candidates", cfg.cooperate.lambda0_candidates, "cooperate");
        read(s, "q", cfg.cooperate.q, "cooperate");
        read(s, "delta", cfg.cooperate.delta, "cooperate");
        read(s, "samples", cfg.cooperate.samples, "cooperate");
        read(s, "dx", cfg.cooperate.dx, "cooperate");
        read(s, "dt", cfg.cooperate.dt, "cooperate");
        read(s, "csv_every", cfg.cooperate.csv_every, "cooperate");
        read(s, "csv_node_stride", cfg.cooperate.csv_node_stride, "cooperate");
    }

    if (cfg.nonlinearity_kind != "cubic") throw ConfigError("nonlinearity.kind must be \"cubic\"");
    if (!(cfg.eta > 0.0 && cfg.eta < 1.0)) throw ConfigError("nonlinearity.eta must lie in (0, 1)");
    if (cfg.lagrangian_kind != "power") throw ConfigError("lagrangian.kind must be \"power\"");
    positive(cfg.kappa, "lagrangian.kappa");
    if (!(cfg.exponent > 1.0)) throw ConfigError("lagrangian.exponent must exceed 1");
    positive(cfg.lambda, "lambda");
    positive(cfg.c, "c");
    if (cfg.k < 0) throw ConfigError("k must be >= 0");
    positive(cfg.grid.dx, "grid.dx");
    positive(cfg.grid.dt, "grid.dt");
    if (!(cfg.grid.x_hi > cfg.grid.x_lo)) throw ConfigError("grid.x_hi must exceed grid.x_lo");
    if (cfg.T < 0.0) throw ConfigError("T must be >= 0");
    if (cfg.speed_maps.lambdas.empty()) throw ConfigError("speed_maps.lambdas must not be empty");
    for (double l : cfg.speed_maps.lambdas) positive(l, "speed_maps.lambdas entry");
    if (cfg.speed_maps.k_max < 0) throw ConfigError("speed_maps.k_max must be >= 0");
    const auto& m = cfg.simulate.mode;
    if (m != "baseline" && m != "reversed" && m != "both") throw ConfigError("simulate.mode must be baseline, reversed or both");
    if (!(cfg.simulate.level > 0.0 && cfg.simulate.level < 1.0)) throw ConfigError("simulate.level must lie in (0, 1)");
    positive(cfg.simulate.record_every, "simulate.record_every");
    if (cfg.simulate.snapshot_every < 0.0) throw ConfigError("simulate.snapshot_every must be >= 0");
    if (cfg.simulate.node_stride == 0) throw ConfigError("simulate.node_stride must be >= 1");
    positive(cfg.cooperate.c, "cooperate.c");
    if (cfg.cooperate.lambda0) positive(*cfg.cooperate.lambda0, "cooperate.lambda0");
    if (!(cfg.cooperate.q >= 1.0)) throw ConfigError("cooperate.q must be >= 1");
    if (!(cfg.cooperate.delta > 0.0 && cfg.cooperate.delta < 0.5)) throw ConfigError("cooperate.delta must lie in (0, 1/2)");
    if (cfg.cooperate.samples == 0) throw ConfigError("cooperate.samples must be >= 1");
    positive(cfg.cooperate.dx, "cooperate.dx");
    positive(cfg.cooperate.dt, "cooperate.dt");
    if (cfg.cooperate.csv_node_stride == 0) throw ConfigError("cooperate.csv_node_stride must be >= 1");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(doc);
}

}  // namespace wavegame
