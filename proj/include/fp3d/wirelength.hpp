#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "fp3d/eo.hpp"
#include "fp3d/hypergraph.hpp"
#include "fp3d/squeeze.hpp"

namespace fp3d {

struct NetEndpoint {
    ComponentId component = -1;
    double cx = 0;  // box center
    double cy = 0;
    double cz = 0;  // layer index * die height
};

// 3D half-perimeter wire-length: per-axis max extent over the endpoints.
// Throws EmptyNet.
double net_hpwl(std::span<const NetEndpoint> endpoints);

struct WirelengthReport {
    std::map<std::string, double> per_net;
    double total = 0;
    double die_height = 1.0;
};

// HPWL over each relation edge's component centers. Throws UnplacedComponent.
WirelengthReport total_wirelength(const LayoutHypergraph& h, const GeometricPlacement& g,
                                  double die_height = 1.0);

// HPWL with integer grid cells as positions; run_eo's tie-break metric.
double grid_wirelength(const LayoutHypergraph& h, const GridPlacement& p);

}  // namespace fp3d
