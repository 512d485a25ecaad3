#pragma once

#include <string>
#include <string_view>

namespace hkflow {

// Spherical: reaction u (f - fbar), mass 1 conserved.
// Conic: reaction u f, any positive mass.
// Wasserstein: no reaction, mass 1.
// Fitness: the population model dU = div(U grad F) + U F with F = f(x, U / int U);
//          its normalized profile follows the spherical flow.
enum class FlowKind { Spherical, Conic, Wasserstein, Fitness };

std::string_view to_string(FlowKind kind);
// Accepts "spherical", "conic", "wasserstein", "fitness"; throws UsageError otherwise.
FlowKind parse_flow_kind(std::string_view name);

inline bool requires_unit_mass(FlowKind kind)
{
    return kind == FlowKind::Spherical || kind == FlowKind::Wasserstein;
}

} // namespace hkflow
