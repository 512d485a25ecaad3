#include "setup.hpp"

#include "io.hpp"

#include "hkflow/expression.hpp"
#include "hkflow/families.hpp"

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace hkcli {

hkflow::Grid make_grid(const DomainConfig& d)
{
    return hkflow::Grid(d.kind, d.n_cells, d.length);
}

hkflow::EntropyModel make_model(const ModelConfig& m)
{
    if (m.name == "power_law")
        return hkflow::make_power_law(m.alpha);
    if (m.name == "log") {
        const hkflow::Expression V = hkflow::Expression::parse(m.potential);
        return hkflow::make_log_potential({[V](double x) { return V(x); }, [V](double x) { return V.derivative(x); }},
                                          m.potential);
    }
    if (m.name == "arctangential")
        return hkflow::make_arctangential();
    throw ConfigError("$.model.name", "unknown model '" + m.name + "'");
}

hkflow::DensityField load_density(const DensitySpec& spec, const hkflow::Grid& grid, const std::string& path)
{
    std::vector<double> v;
    if (spec.expression) {
        const hkflow::Expression e = hkflow::Expression::parse(*spec.expression);
        v = grid.sample([&](double x) { return e(x); });
    } else {
        v = read_density_csv(*spec.csv, grid);
    }
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!(v[i] >= 0.0) || !std::isfinite(v[i]))
            throw ConfigError(path, "density must be finite and nonnegative (cell " + std::to_string(i) + ")");
    if (spec.mass)
        return hkflow::normalized(grid, std::move(v), *spec.mass);
    return hkflow::DensityField(grid, std::move(v));
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn)
{
    std::vector<std::exception_ptr> errors(n);
    auto guarded = [&](std::size_t i) {
        try {
            fn(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i)
            guarded(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < jobs; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++)
                    guarded(i);
            });
        for (auto& t : pool)
            t.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace hkcli
