#include "config.hpp"

#include "hkflow/expression.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hkcli {

using nlohmann::json;

bool OutputConfig::wants(const std::string& f) const
{
    return std::find(formats.begin(), formats.end(), f) != formats.end();
}

namespace {

std::string type_name(const json& j)
{
    return j.type_name();
}

void require_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed)
{
    if (!j.is_object())
        throw ConfigError(path, std::string("expected an object, got ") + type_name(j));
    std::set<std::string> keys(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!keys.count(it.key()))
            throw ConfigError(path + "." + it.key(), "unknown key");
}

double get_number(const json& obj, const char* key, const std::string& path, double fallback)
{
    if (!obj.contains(key))
        return fallback;
    const json& v = obj.at(key);
    if (!v.is_number())
        throw ConfigError(path + "." + key, std::string("expected a number, got ") + type_name(v));
    const double d = v.get<double>();
    if (!std::isfinite(d))
        throw ConfigError(path + "." + key, "must be finite");
    return d;
}

double positive(const json& obj, const char* key, const std::string& path, double fallback)
{
    const double d = get_number(obj, key, path, fallback);
    if (!(d > 0.0))
        throw ConfigError(path + "." + key, "must be positive");
    return d;
}

std::size_t count(const json& obj, const char* key, const std::string& path, std::size_t fallback,
                  std::size_t lo, std::size_t hi)
{
    if (!obj.contains(key))
        return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw ConfigError(path + "." + key, std::string("expected an integer, got ") + type_name(v));
    const long long n = v.get<long long>();
    if (n < static_cast<long long>(lo) || n > static_cast<long long>(hi)) {
        std::ostringstream os;
        os << "must lie in [" << lo << ", " << hi << "]";
        throw ConfigError(path + "." + key, os.str());
    }
    return static_cast<std::size_t>(n);
}

std::string get_string(const json& obj, const char* key, const std::string& path, const std::string& fallback)
{
    if (!obj.contains(key))
        return fallback;
    const json& v = obj.at(key);
    if (!v.is_string())
        throw ConfigError(path + "." + key, std::string("expected a string, got ") + type_name(v));
    return v.get<std::string>();
}

bool get_bool(const json& obj, const char* key, const std::string& path, bool fallback)
{
    if (!obj.contains(key))
        return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean())
        throw ConfigError(path + "." + key, std::string("expected a boolean, got ") + type_name(v));
    return v.get<bool>();
}

template <class F>
auto rethrow_as_config(const std::string& path, F&& fn)
{
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const hkflow::Error& e) {
        throw ConfigError(path, e.what());
    }
}

DensitySpec parse_density(const json& j, const std::string& path)
{
    require_object(j, path, {"expression", "csv", "mass"});
    DensitySpec d;
    if (j.contains("expression")) {
        d.expression = get_string(j, "expression", path, "");
        rethrow_as_config(path + ".expression", [&] { return hkflow::Expression::parse(*d.expression); });
    }
    if (j.contains("csv"))
        d.csv = get_string(j, "csv", path, "");
    if (d.expression.has_value() == d.csv.has_value())
        throw ConfigError(path, "give exactly one of 'expression' or 'csv'");
    if (j.contains("mass"))
        d.mass = positive(j, "mass", path, 1.0);
    return d;
}

} // namespace

RunConfig parse_config(const json& doc)
{
    const std::string root = "$";
    require_object(doc, root,
                   {"domain", "model", "flow", "initial", "endpoints", "transport", "verify", "output", "seed"});
    RunConfig cfg;

    if (doc.contains("domain")) {
        const json& d = doc["domain"];
        const std::string p = root + ".domain";
        require_object(d, p, {"kind", "length", "n_cells"});
        const std::string kind = get_string(d, "kind", p, "circle");
        if (kind == "circle")
            cfg.domain.kind = hkflow::DomainKind::Circle;
        else if (kind == "interval")
            cfg.domain.kind = hkflow::DomainKind::Interval;
        else
            throw ConfigError(p + ".kind", "expected 'circle' or 'interval', got '" + kind + "'");
        cfg.domain.length = positive(d, "length", p, 1.0);
        cfg.domain.n_cells = count(d, "n_cells", p, 128, 4, 1 << 16);
    }

    if (doc.contains("model")) {
        const json& m = doc["model"];
        const std::string p = root + ".model";
        require_object(m, p, {"name", "parameters"});
        cfg.model.name = get_string(m, "name", p, "power_law");
        const json params = m.contains("parameters") ? m["parameters"] : json::object();
        const std::string pp = p + ".parameters";
        if (cfg.model.name == "power_law") {
            require_object(params, pp, {"alpha"});
            cfg.model.alpha = get_number(params, "alpha", pp, 1.0);
            if (cfg.model.alpha == 0.0)
                throw ConfigError(pp + ".alpha", "must be nonzero");
        } else if (cfg.model.name == "log") {
            require_object(params, pp, {"potential"});
            cfg.model.potential = get_string(params, "potential", pp, "0");
            rethrow_as_config(pp + ".potential", [&] { return hkflow::Expression::parse(cfg.model.potential); });
        } else if (cfg.model.name == "arctangential") {
            require_object(params, pp, {});
        } else {
            throw ConfigError(p + ".name", "expected 'power_law', 'log' or 'arctangential', got '" +
                                               cfg.model.name + "'");
        }
    }

    if (doc.contains("flow")) {
        const json& f = doc["flow"];
        const std::string p = root + ".flow";
        require_object(f, p, {"kind", "t_end", "dt_init", "snapshot_every", "cfl_safety", "mass_recovery", "initial_mass"});
        cfg.flow.kind = rethrow_as_config(p + ".kind", [&] {
            return hkflow::parse_flow_kind(get_string(f, "kind", p, "spherical"));
        });
        cfg.flow.t_end = positive(f, "t_end", p, cfg.flow.t_end);
        cfg.flow.dt_init = positive(f, "dt_init", p, cfg.flow.dt_init);
        cfg.flow.snapshot_every = positive(f, "snapshot_every", p, cfg.flow.snapshot_every);
        cfg.flow.cfl_safety = positive(f, "cfl_safety", p, cfg.flow.cfl_safety);
        if (cfg.flow.cfl_safety > 0.5)
            throw ConfigError(p + ".cfl_safety", "must not exceed 0.5");
        cfg.flow.mass_recovery = get_bool(f, "mass_recovery", p, false);
        cfg.flow.initial_mass = positive(f, "initial_mass", p, 1.0);
        if (cfg.flow.mass_recovery && cfg.flow.kind != hkflow::FlowKind::Spherical)
            throw ConfigError(p + ".mass_recovery", "needs a spherical flow");
    }

    if (doc.contains("initial"))
        cfg.initial = parse_density(doc["initial"], root + ".initial");

    if (doc.contains("endpoints")) {
        const json& e = doc["endpoints"];
        const std::string p = root + ".endpoints";
        require_object(e, p, {"rho0", "rho1"});
        if (!e.contains("rho0") || !e.contains("rho1"))
            throw ConfigError(p, "needs both 'rho0' and 'rho1'");
        cfg.rho0 = parse_density(e["rho0"], p + ".rho0");
        cfg.rho1 = parse_density(e["rho1"], p + ".rho1");
    }

    if (doc.contains("transport")) {
        const json& t = doc["transport"];
        const std::string p = root + ".transport";
        require_object(t, p, {"n_time", "tol", "max_iters", "step_ratio", "kinds", "interpolation"});
        cfg.transport.n_time = static_cast<int>(count(t, "n_time", p, 32, 2, 1024));
        cfg.transport.tol = positive(t, "tol", p, cfg.transport.tol);
        cfg.transport.max_iters = static_cast<int>(count(t, "max_iters", p, 20000, 1, 100000000));
        cfg.transport.step_ratio = positive(t, "step_ratio", p, 1.0);
        cfg.transport.interpolation = get_bool(t, "interpolation", p, false);
        if (t.contains("kinds")) {
            const json& k = t["kinds"];
            if (!k.is_array() || k.empty())
                throw ConfigError(p + ".kinds", "expected a nonempty array");
            cfg.transport.kinds.clear();
            for (std::size_t i = 0; i < k.size(); ++i) {
                const std::string ip = p + ".kinds[" + std::to_string(i) + "]";
                if (!k[i].is_string())
                    throw ConfigError(ip, "expected a string");
                cfg.transport.kinds.push_back(
                    rethrow_as_config(ip, [&] { return hkflow::parse_transport_kind(k[i].get<std::string>()); }));
            }
        }
    }

    if (doc.contains("verify")) {
        const json& v = doc["verify"];
        const std::string p = root + ".verify";
        require_object(v, p, {"suite", "eep_members", "talagrand_members", "ordering_pairs", "transport_cells",
                              "dissipation_cells", "run_cells"});
        cfg.verify.suite = get_string(v, "suite", p, "all");
        static const std::set<std::string> suites{"dissipation", "eep", "logsobolev", "talagrand",
                                                  "ordering", "maxprinciple", "comparison", "all"};
        if (!suites.count(cfg.verify.suite))
            throw ConfigError(p + ".suite", "unknown suite '" + cfg.verify.suite + "'");
        cfg.verify.eep_members = count(v, "eep_members", p, 9, 1, 18);
        cfg.verify.talagrand_members = count(v, "talagrand_members", p, 20, 1, 1000);
        cfg.verify.ordering_pairs = count(v, "ordering_pairs", p, 10, 1, 1000);
        cfg.verify.transport_cells = count(v, "transport_cells", p, 64, 8, 512);
        cfg.verify.dissipation_cells = count(v, "dissipation_cells", p, 256, 16, 2048);
        cfg.verify.run_cells = count(v, "run_cells", p, 128, 16, 2048);
    }

    if (doc.contains("output")) {
        const json& o = doc["output"];
        const std::string p = root + ".output";
        require_object(o, p, {"directory", "formats"});
        cfg.output.directory = get_string(o, "directory", p, cfg.output.directory);
        if (o.contains("formats")) {
            const json& f = o["formats"];
            if (!f.is_array())
                throw ConfigError(p + ".formats", "expected an array");
            cfg.output.formats.clear();
            for (std::size_t i = 0; i < f.size(); ++i) {
                const std::string ip = p + ".formats[" + std::to_string(i) + "]";
                if (!f[i].is_string() || (f[i] != "csv" && f[i] != "json"))
                    throw ConfigError(ip, "expected \"csv\" or \"json\"");
                cfg.output.formats.push_back(f[i].get<std::string>());
            }
        }
    }

    if (doc.contains("seed")) {
        const json& s = doc["seed"];
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            throw ConfigError(root + ".seed", "expected a nonnegative integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("$", "cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("$", std::string("malformed document: ") + e.what());
    }
    return parse_config(doc);
}

nlohmann::json to_json(const RunConfig& cfg)
{
    json j;
    j["domain"] = {{"kind", cfg.domain.kind == hkflow::DomainKind::Circle ? "circle" : "interval"},
                   {"length", cfg.domain.length},
                   {"n_cells", cfg.domain.n_cells}};
    json params = json::object();
    if (cfg.model.name == "power_law")
        params["alpha"] = cfg.model.alpha;
    else if (cfg.model.name == "log")
        params["potential"] = cfg.model.potential;
    j["model"] = {{"name", cfg.model.name}, {"parameters", params}};
    j["flow"] = {{"kind", std::string(hkflow::to_string(cfg.flow.kind))},
                 {"t_end", cfg.flow.t_end},
                 {"dt_init", cfg.flow.dt_init},
                 {"snapshot_every", cfg.flow.snapshot_every},
                 {"cfl_safety", cfg.flow.cfl_safety},
                 {"mass_recovery", cfg.flow.mass_recovery},
                 {"initial_mass", cfg.flow.initial_mass}};
    json kinds = json::array();
    for (auto k : cfg.transport.kinds)
        kinds.push_back(std::string(hkflow::to_string(k)));
    j["transport"] = {{"n_time", cfg.transport.n_time},     {"tol", cfg.transport.tol},
                      {"max_iters", cfg.transport.max_iters}, {"step_ratio", cfg.transport.step_ratio},
                      {"kinds", kinds},                       {"interpolation", cfg.transport.interpolation}};
    j["verify"] = {{"suite", cfg.verify.suite},
                   {"eep_members", cfg.verify.eep_members},
                   {"talagrand_members", cfg.verify.talagrand_members},
                   {"ordering_pairs", cfg.verify.ordering_pairs},
                   {"transport_cells", cfg.verify.transport_cells},
                   {"dissipation_cells", cfg.verify.dissipation_cells},
                   {"run_cells", cfg.verify.run_cells}};
    j["output"] = {{"directory", cfg.output.directory}, {"formats", cfg.output.formats}};
    j["seed"] = cfg.seed;
    return j;
}

} // namespace hkcli
