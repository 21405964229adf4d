#include "fp3d/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fp3d/errors.hpp"
#include "fp3d/json_io.hpp"
#include "fp3d/rng.hpp"

namespace fp3d {

RallySpec RallySpec::parse(const std::string& text) {
    RallySpec spec;
    if (text == "corner") {
        spec.mode = Mode::corner;
    } else if (text == "center") {
        spec.mode = Mode::center;
    } else {
        const auto comma = text.find(',');
        if (comma == std::string::npos) {
            throw ConfigInvalid("rally must be 'corner', 'center' or 'X,Y', got '" + text + "'");
        }
        try {
            spec.mode = Mode::point;
            spec.px = std::stod(text.substr(0, comma));
            spec.py = std::stod(text.substr(comma + 1));
        } catch (const std::exception&) {
            throw ConfigInvalid("bad rally coordinates '" + text + "'");
        }
    }
    return spec;
}

std::string RallySpec::to_string() const {
    switch (mode) {
        case Mode::corner: return "corner";
        case Mode::center: return "center";
        case Mode::point: return std::to_string(px) + "," + std::to_string(py);
    }
    return "corner";
}

namespace {

RallyPoint resolve_rally(const RallySpec& spec, const GeometricPlacement& g) {
    switch (spec.mode) {
        case RallySpec::Mode::corner: return {0, 0};
        case RallySpec::Mode::center: {
            const BoundingVolume v = bounding_volume(g);
            return {v.vx / 2, v.vy / 2};
        }
        case RallySpec::Mode::point: return {spec.px, spec.py};
    }
    return {0, 0};
}

}  // namespace

PipelineOutcome run_pipeline(const LayoutHypergraph& h, const PipelineJob& job) {
    EoParams eo_params;
    eo_params.shape = job.grid;
    eo_params.tau = job.tau;
    eo_params.max_iters = job.max_iters;
    eo_params.seed = job.seed;
    EoResult eo = run_eo(h, eo_params);

    std::vector<ComponentDims> dims;
    dims.reserve(static_cast<std::size_t>(h.component_count()));
    for (ComponentId c = 0; c < h.component_count(); ++c) {
        const ComponentEdge& e = h.component(c);
        dims.push_back({e.label, e.width, e.height});
    }
    GeometricPlacement seeded = seed_geometry(eo.best, dims, {0, 0});
    seeded.rally = resolve_rally(job.rally, seeded);

    SqueezeParams sq;
    sq.p1 = job.p1;
    sq.p2 = 1.0 - job.p1;
    sq.seed = mix_seed(job.seed);
    sq.bundles = job.bundles;
    SqueezeResult squeezed = job.bundles ? squeeze_bundles(seeded, sq) : squeeze(seeded, sq);

    PipelineOutcome out;
    out.grid_placement = std::move(eo.best);
    out.grid_fitness = eo.best_fitness;
    out.eo_iters = eo.iters;
    out.wirelength = total_wirelength(h, squeezed.placement, job.die_height);
    out.volume = bounding_volume(squeezed.placement);
    out.squeeze_moves = squeezed.moves;
    out.squeeze_passes = squeezed.passes;
    out.geometry = std::move(squeezed.placement);
    return out;
}

GridShape default_grid(const std::string& instance_name, int component_count) {
    // published grid shapes for the MCNC set
    if (instance_name == "apte" || instance_name == "xerox" || instance_name == "hp") {
        return {2, 2, 3};
    }
    if (instance_name == "ami33") return {3, 3, 4};
    if (instance_name == "ami49") return {4, 4, 4};

    GridShape best{component_count, 1, 1};
    long best_volume = static_cast<long>(component_count);
    for (int nz = 1; nz <= 4; ++nz) {
        for (int ny = 1; ny <= component_count; ++ny) {
            if (ny < nz) continue;
            const int nx = static_cast<int>((component_count + static_cast<long>(ny) * nz - 1) /
                                            (static_cast<long>(ny) * nz));
            if (nx < ny) continue;
            const long volume = static_cast<long>(nx) * ny * nz;
            // smallest volume; ties go to the most compact cuboid
            if (volume < best_volume ||
                (volume == best_volume &&
                 (nz > best.nz || (nz == best.nz && ny > best.ny)))) {
                best = {nx, ny, nz};
                best_volume = volume;
            }
        }
    }
    return best;
}

nlohmann::json pipeline_payload(const PipelineJob& job, const std::string& yal_path,
                                bool inline_text) {
    nlohmann::json payload{{"kind", "pipeline"},
                           {"grid", {job.grid.nx, job.grid.ny, job.grid.nz}},
                           {"tau", job.tau},
                           {"max_iters", job.max_iters},
                           {"rally", job.rally.to_string()},
                           {"p1", job.p1},
                           {"seed", job.seed},
                           {"bundles", job.bundles},
                           {"die_height", job.die_height}};
    if (inline_text) {
        std::ifstream in(yal_path, std::ios::binary);
        if (!in) throw IoError("cannot read '" + yal_path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        payload["yal"] = ss.str();
    } else {
        payload["yal_path"] = yal_path;
    }
    return payload;
}

PipelineJob job_from_payload(const nlohmann::json& payload) {
    try {
        PipelineJob job;
        const auto& grid = payload.at("grid");
        job.grid = {grid.at(0).get<int>(), grid.at(1).get<int>(), grid.at(2).get<int>()};
        job.tau = payload.value("tau", 1.5);
        job.max_iters = payload.value("max_iters", -1L);
        job.seed = payload.value("seed", std::uint64_t{1});
        job.rally = RallySpec::parse(payload.value("rally", std::string("corner")));
        job.p1 = payload.value("p1", 0.5);
        job.bundles = payload.value("bundles", false);
        job.die_height = payload.value("die_height", 1.0);
        return job;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("bad pipeline payload: ") + e.what());
    }
}

nlohmann::json execute_pipeline_payload(const nlohmann::json& payload) {
    Netlist netlist;
    if (payload.contains("yal")) {
        netlist = parse_yal(payload.at("yal").get<std::string>());
    } else if (payload.contains("yal_path")) {
        netlist = parse_yal_file(payload.at("yal_path").get<std::string>());
    } else {
        throw ConfigInvalid("pipeline payload needs 'yal' or 'yal_path'");
    }
    const LayoutHypergraph h = LayoutHypergraph::from_netlist(netlist);
    const PipelineJob job = job_from_payload(payload);
    const PipelineOutcome outcome = run_pipeline(h, job);
    return nlohmann::json{{"total_wirelength", outcome.wirelength.total},
                          {"volume",
                           {outcome.volume.vx, outcome.volume.vy, outcome.volume.layers}},
                          {"placement", geometry_json(outcome.geometry)},
                          {"fitness", outcome.grid_fitness},
                          {"seed", job.seed}};
}

}  // namespace fp3d
