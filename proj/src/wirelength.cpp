#include "fp3d/wirelength.hpp"

#include <algorithm>
#include <unordered_map>

#include "fp3d/errors.hpp"

namespace fp3d {

double net_hpwl(std::span<const NetEndpoint> endpoints) {
    if (endpoints.empty()) throw EmptyNet();
    double minx = endpoints[0].cx, maxx = minx;
    double miny = endpoints[0].cy, maxy = miny;
    double minz = endpoints[0].cz, maxz = minz;
    for (const auto& e : endpoints) {
        minx = std::min(minx, e.cx);
        maxx = std::max(maxx, e.cx);
        miny = std::min(miny, e.cy);
        maxy = std::max(maxy, e.cy);
        minz = std::min(minz, e.cz);
        maxz = std::max(maxz, e.cz);
    }
    return (maxx - minx) + (maxy - miny) + (maxz - minz);
}

WirelengthReport total_wirelength(const LayoutHypergraph& h, const GeometricPlacement& g,
                                  double die_height) {
    // component centers, matched by label so JSON-loaded layouts work too
    std::unordered_map<std::string, const PlacedBox*> by_name;
    for (const auto& b : g.boxes) by_name[b.name] = &b;

    std::vector<NetEndpoint> centers(static_cast<std::size_t>(h.component_count()));
    for (ComponentId c = 0; c < h.component_count(); ++c) {
        const auto it = by_name.find(h.component(c).label);
        if (it == by_name.end()) throw UnplacedComponent(h.component(c).label);
        const PlacedBox& b = *it->second;
        centers[static_cast<std::size_t>(c)] = {c, b.x + b.w / 2, b.y + b.h / 2,
                                                b.layer * die_height};
    }

    WirelengthReport report;
    report.die_height = die_height;
    std::vector<NetEndpoint> pts;
    for (RelationId r = 0; r < h.relation_count(); ++r) {
        pts.clear();
        for (const ComponentId c : h.relation_members(r)) {
            pts.push_back(centers[static_cast<std::size_t>(c)]);
        }
        const double w = net_hpwl(pts);
        report.per_net[h.relation(r).label] = w;
        report.total += w;
    }
    return report;
}

double grid_wirelength(const LayoutHypergraph& h, const GridPlacement& p) {
    if (p.component_count() < h.component_count()) {
        throw UnplacedComponent("grid placement holds fewer components than the hypergraph");
    }
    double total = 0;
    std::vector<NetEndpoint> pts;
    for (RelationId r = 0; r < h.relation_count(); ++r) {
        pts.clear();
        for (const ComponentId c : h.relation_members(r)) {
            const Cell cell = p.cell_of(c);
            pts.push_back({c, static_cast<double>(cell.x), static_cast<double>(cell.y),
                           static_cast<double>(cell.z)});
        }
        total += net_hpwl(pts);
    }
    return total;
}

}  // namespace fp3d
