#pragma once

#include <cstdint>
#include <cstdlib>
#include <utility>
#include <vector>

#include "fp3d/hypergraph.hpp"
#include "fp3d/rng.hpp"

namespace fp3d {

struct GridShape {
    int nx = 1;
    int ny = 1;
    int nz = 1;

    long cells() const { return static_cast<long>(nx) * ny * nz; }
    bool operator==(const GridShape&) const = default;
};

struct Cell {
    int x = 0;
    int y = 0;
    int z = 0;

    bool operator==(const Cell&) const = default;
};

inline int manhattan(Cell a, Cell b) {
    return std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.z - b.z);
}

// Bijective-ish assignment of components to grid cells; empty cells allowed,
// no cell holds two components.
class GridPlacement {
public:
    static constexpr int kEmpty = -1;

    // empty 1x1x1 placement with no components
    GridPlacement() : occupant_(1, kEmpty) {}

    // components 0..m-1 assigned to the first m cells in lexicographic
    // (x, y, z) order. Throws GridTooSmall.
    static GridPlacement initial(GridShape shape, int component_count);

    GridShape shape() const { return shape_; }
    int component_count() const { return static_cast<int>(cell_of_.size()); }

    Cell cell_of(ComponentId c) const { return cell_of_.at(static_cast<std::size_t>(c)); }
    int occupant(Cell cell) const { return occupant_[index(cell)]; }
    bool in_bounds(Cell cell) const;

    // Exchange the contents of two cells (either may be empty).
    void swap_cells(Cell a, Cell b);

    // Invariant check: injective cell_of, exact inverse occupant, in-bounds.
    bool valid() const;

    bool operator==(const GridPlacement&) const = default;

private:
    std::size_t index(Cell cell) const;

    GridShape shape_;
    std::vector<Cell> cell_of_;
    std::vector<int> occupant_;
};

// Smallest r >= 0 such that the 3D von Neumann ball of radius r on the
// infinite lattice holds at least neighbor_count cells besides the center.
int min_range(int neighbor_count);

struct ComponentFitness {
    ComponentId component = -1;
    int actual_range = 0;  // max Manhattan distance to any neighbor's cell
    int min_range = 0;
    double lambda = 1.0;  // min_range / max(actual_range, min_range); 1 when isolated
};

ComponentFitness fitness(const LayoutHypergraph& h, const GridPlacement& p, ComponentId c);

// Sum of per-component lambdas; equals component_count at the optimum.
double total_fitness(const LayoutHypergraph& h, const GridPlacement& p);

struct EoParams {
    GridShape shape;
    double tau = 1.5;
    long max_iters = -1;  // -1: 100 * m^2
    std::uint64_t seed = 1;
};

// Rank draw with P(k) proportional to k^-tau, k in 1..m.
class RankSampler {
public:
    RankSampler(int m, double tau);
    int draw(Rng& rng) const;  // 1-based rank
    double probability(int k) const;

private:
    std::vector<double> cdf_;
};

// Precomputed per-run data: adjacency, minimal ranges, rank distribution.
class EoContext {
public:
    EoContext(const LayoutHypergraph& h, double tau);

    const std::vector<ComponentId>& neighbors(ComponentId c) const {
        return neighbors_[static_cast<std::size_t>(c)];
    }
    int min_range_of(ComponentId c) const { return min_range_[static_cast<std::size_t>(c)]; }
    int component_count() const { return static_cast<int>(neighbors_.size()); }

    double lambda(const GridPlacement& p, ComponentId c) const;
    double total(const GridPlacement& p) const;

    // One EO move: rank-select a component, swap it with a cell drawn from
    // the von Neumann ball around its neighbors' centroid. Always accepted.
    void step(GridPlacement& p, Rng& rng) const;

private:
    std::vector<std::vector<ComponentId>> neighbors_;
    std::vector<int> min_range_;
    RankSampler sampler_;
};

// Spec-shaped single step; builds a transient context. run_eo keeps one.
void eo_step(const LayoutHypergraph& h, GridPlacement& p, const EoParams& params, Rng& rng);

struct EoResult {
    GridPlacement best;
    double best_fitness = 0;
    double best_grid_wirelength = 0;
    long iters = 0;
    // (iteration, best-so-far total fitness); entry 0 is the initial value,
    // later entries record strict improvements.
    std::vector<std::pair<long, double>> trace;
};

// Evolve a single placement for up to max_iters moves, early-stopping at the
// optimum. Best-so-far ranked by (total fitness desc, grid wire-length asc).
// Bit-reproducible for a fixed seed. Throws GridTooSmall, ConfigInvalid.
EoResult run_eo(const LayoutHypergraph& h, const EoParams& params);

}  // namespace fp3d
