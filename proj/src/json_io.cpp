#include "fp3d/json_io.hpp"

#include <fstream>

#include "fp3d/errors.hpp"

namespace fp3d {

json stats_json(const NeighborStats& s) {
    return json{{"blocks", s.blocks},
                {"nets", s.nets},
                {"neighbors",
                 {{"min", s.neighbor_min},
                  {"max", s.neighbor_max},
                  {"avg", s.neighbor_avg_rounded()},
                  {"avg_exact", s.neighbor_avg}}}};
}

json grid_placement_json(const LayoutHypergraph& h, const GridPlacement& p, double fitness) {
    json cells = json::object();
    for (ComponentId c = 0; c < h.component_count(); ++c) {
        const Cell cell = p.cell_of(c);
        cells[h.component(c).label] = json::array({cell.x, cell.y, cell.z});
    }
    const GridShape s = p.shape();
    return json{{"shape", {s.nx, s.ny, s.nz}}, {"cells", cells}, {"fitness", fitness}};
}

GridPlacement grid_placement_from_json(const LayoutHypergraph& h, const json& j) {
    try {
        const auto shape_arr = j.at("shape");
        const GridShape shape{shape_arr.at(0).get<int>(), shape_arr.at(1).get<int>(),
                              shape_arr.at(2).get<int>()};
        GridPlacement p = GridPlacement::initial(shape, h.component_count());
        // clear the lexicographic seed by swapping every component into place
        const auto& cells = j.at("cells");
        for (ComponentId c = 0; c < h.component_count(); ++c) {
            const std::string& label = h.component(c).label;
            if (!cells.contains(label)) throw UnplacedComponent(label);
            const auto& arr = cells.at(label);
            const Cell want{arr.at(0).get<int>(), arr.at(1).get<int>(), arr.at(2).get<int>()};
            if (!p.in_bounds(want)) throw InputError("cell out of bounds for '" + label + "'");
            p.swap_cells(p.cell_of(c), want);
        }
        return p;
    } catch (const json::exception& e) {
        throw InputError(std::string("bad grid placement JSON: ") + e.what());
    }
}

json geometry_json(const GeometricPlacement& g) {
    json boxes = json::array();
    for (const auto& b : g.boxes) {
        boxes.push_back(json{{"name", b.name},
                             {"x", b.x},
                             {"y", b.y},
                             {"layer", b.layer},
                             {"w", b.w},
                             {"h", b.h}});
    }
    return json{{"layers", g.layers}, {"rally", {g.rally.px, g.rally.py}}, {"boxes", boxes}};
}

GeometricPlacement geometry_from_json(const json& j) {
    try {
        GeometricPlacement g;
        g.layers = j.at("layers").get<int>();
        g.rally.px = j.at("rally").at(0).get<double>();
        g.rally.py = j.at("rally").at(1).get<double>();
        int next_id = 0;
        for (const auto& bj : j.at("boxes")) {
            PlacedBox b;
            b.component = next_id++;
            b.name = bj.at("name").get<std::string>();
            b.x = bj.at("x").get<double>();
            b.y = bj.at("y").get<double>();
            b.layer = bj.at("layer").get<int>();
            b.w = bj.at("w").get<double>();
            b.h = bj.at("h").get<double>();
            g.boxes.push_back(std::move(b));
        }
        return g;
    } catch (const json::exception& e) {
        throw InputError(std::string("bad layout JSON: ") + e.what());
    }
}

json wirelength_json(const WirelengthReport& r, bool per_net) {
    json out{{"total", r.total}, {"die_height", r.die_height}};
    if (per_net) {
        json nets = json::object();
        for (const auto& [name, w] : r.per_net) nets[name] = w;
        out["per_net"] = nets;
    }
    return out;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError("bad JSON in '" + path + "': " + e.what());
    }
}

}  // namespace fp3d
