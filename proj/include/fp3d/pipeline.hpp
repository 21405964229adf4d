#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "fp3d/eo.hpp"
#include "fp3d/hypergraph.hpp"
#include "fp3d/squeeze.hpp"
#include "fp3d/wirelength.hpp"
#include "fp3d/yal.hpp"

namespace fp3d {

struct RallySpec {
    enum class Mode { corner, center, point };
    Mode mode = Mode::corner;
    double px = 0;
    double py = 0;

    static RallySpec parse(const std::string& text);  // "corner" | "center" | "X,Y"
    std::string to_string() const;
};

struct PipelineJob {
    GridShape grid;
    double tau = 1.5;
    long max_iters = -1;  // -1: 100 * m^2
    std::uint64_t seed = 1;
    RallySpec rally;
    double p1 = 0.5;
    bool bundles = false;
    double die_height = 1.0;
};

struct PipelineOutcome {
    GridPlacement grid_placement;
    double grid_fitness = 0;
    GeometricPlacement geometry;
    WirelengthReport wirelength;
    BoundingVolume volume;
    long eo_iters = 0;
    long squeeze_moves = 0;
    long squeeze_passes = 0;
};

// place -> seed geometry -> squeeze -> wire-length, for one seed
PipelineOutcome run_pipeline(const LayoutHypergraph& h, const PipelineJob& job);

// Smallest grid with nx >= ny >= nz, nz <= 4, volume >= component count;
// known MCNC instances get their published shapes.
GridShape default_grid(const std::string& instance_name, int component_count);

// --- task payloads (distributed runner / in-process fan-out) ---

// {"kind":"pipeline","yal":...|"yal_path":...,"grid":[...],"tau":...,
//  "max_iters":...,"rally":...,"p1":...,"seed":...,"bundles":...,
//  "die_height":...}
nlohmann::json pipeline_payload(const PipelineJob& job, const std::string& yal_path,
                                bool inline_text);
PipelineJob job_from_payload(const nlohmann::json& payload);

// Executes a pipeline payload; returns
// {"total_wirelength":..,"volume":[vx,vy,layers],"placement":{...},"fitness":..,"seed":..}
nlohmann::json execute_pipeline_payload(const nlohmann::json& payload);

}  // namespace fp3d
