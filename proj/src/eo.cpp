#include "fp3d/eo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fp3d/errors.hpp"
#include "fp3d/wirelength.hpp"

namespace fp3d {

GridPlacement GridPlacement::initial(GridShape shape, int component_count) {
    if (shape.nx < 1 || shape.ny < 1 || shape.nz < 1) {
        throw ConfigInvalid("grid shape axes must be >= 1");
    }
    if (shape.cells() < component_count) throw GridTooSmall(shape.cells(), component_count);

    GridPlacement p;
    p.shape_ = shape;
    p.occupant_.assign(static_cast<std::size_t>(shape.cells()), kEmpty);
    p.cell_of_.resize(static_cast<std::size_t>(component_count));
    int c = 0;
    for (int x = 0; x < shape.nx && c < component_count; ++x) {
        for (int y = 0; y < shape.ny && c < component_count; ++y) {
            for (int z = 0; z < shape.nz && c < component_count; ++z) {
                const Cell cell{x, y, z};
                p.cell_of_[static_cast<std::size_t>(c)] = cell;
                p.occupant_[p.index(cell)] = c;
                ++c;
            }
        }
    }
    return p;
}

bool GridPlacement::in_bounds(Cell cell) const {
    return cell.x >= 0 && cell.x < shape_.nx && cell.y >= 0 && cell.y < shape_.ny &&
           cell.z >= 0 && cell.z < shape_.nz;
}

std::size_t GridPlacement::index(Cell cell) const {
    return static_cast<std::size_t>((static_cast<long>(cell.x) * shape_.ny + cell.y) * shape_.nz +
                                    cell.z);
}

void GridPlacement::swap_cells(Cell a, Cell b) {
    const std::size_t ia = index(a);
    const std::size_t ib = index(b);
    std::swap(occupant_[ia], occupant_[ib]);
    if (occupant_[ia] != kEmpty) cell_of_[static_cast<std::size_t>(occupant_[ia])] = a;
    if (occupant_[ib] != kEmpty) cell_of_[static_cast<std::size_t>(occupant_[ib])] = b;
}

bool GridPlacement::valid() const {
    std::vector<int> seen(occupant_.size(), 0);
    for (std::size_t c = 0; c < cell_of_.size(); ++c) {
        const Cell cell = cell_of_[c];
        if (!in_bounds(cell)) return false;
        const std::size_t i = index(cell);
        if (occupant_[i] != static_cast<int>(c)) return false;
        if (seen[i]++) return false;
    }
    long occupied = 0;
    for (const int o : occupant_) {
        if (o != kEmpty) ++occupied;
    }
    return occupied == static_cast<long>(cell_of_.size());
}

namespace {

// cells at Manhattan distance <= r from the origin in Z^3
long ball_size(long r) { return (4 * r * r * r + 6 * r * r + 8 * r + 3) / 3; }

}  // namespace

int min_range(int neighbor_count) {
    int r = 0;
    while (ball_size(r) - 1 < neighbor_count) ++r;
    return r;
}

ComponentFitness fitness(const LayoutHypergraph& h, const GridPlacement& p, ComponentId c) {
    const std::vector<ComponentId> nbrs = h.neighbors(c);  // validates c
    ComponentFitness f;
    f.component = c;
    f.min_range = min_range(static_cast<int>(nbrs.size()));
    const Cell own = p.cell_of(c);
    for (const ComponentId n : nbrs) f.actual_range = std::max(f.actual_range, manhattan(own, p.cell_of(n)));
    f.lambda = nbrs.empty()
                   ? 1.0
                   : static_cast<double>(f.min_range) / std::max(f.actual_range, f.min_range);
    return f;
}

double total_fitness(const LayoutHypergraph& h, const GridPlacement& p) {
    double sum = 0;
    for (ComponentId c = 0; c < h.component_count(); ++c) sum += fitness(h, p, c).lambda;
    return sum;
}

RankSampler::RankSampler(int m, double tau) {
    if (m < 1) throw ConfigInvalid("rank sampler needs at least one rank");
    if (!(tau > 1.0)) throw ConfigInvalid("tau must be > 1");
    cdf_.resize(static_cast<std::size_t>(m));
    double acc = 0;
    for (int k = 1; k <= m; ++k) {
        acc += std::pow(static_cast<double>(k), -tau);
        cdf_[static_cast<std::size_t>(k - 1)] = acc;
    }
    for (double& v : cdf_) v /= acc;
    cdf_.back() = 1.0;
}

int RankSampler::draw(Rng& rng) const {
    const double u = rng.next_double();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<int>(it - cdf_.begin()) + 1;
}

double RankSampler::probability(int k) const {
    const std::size_t i = static_cast<std::size_t>(k - 1);
    return i == 0 ? cdf_[0] : cdf_[i] - cdf_[i - 1];
}

EoContext::EoContext(const LayoutHypergraph& h, double tau)
    : sampler_(std::max(h.component_count(), 1), tau) {
    const int m = h.component_count();
    neighbors_.resize(static_cast<std::size_t>(m));
    min_range_.resize(static_cast<std::size_t>(m));
    for (ComponentId c = 0; c < m; ++c) {
        neighbors_[static_cast<std::size_t>(c)] = h.neighbors(c);
        min_range_[static_cast<std::size_t>(c)] =
            min_range(static_cast<int>(neighbors_[static_cast<std::size_t>(c)].size()));
    }
}

double EoContext::lambda(const GridPlacement& p, ComponentId c) const {
    const auto& nbrs = neighbors_[static_cast<std::size_t>(c)];
    if (nbrs.empty()) return 1.0;
    const Cell own = p.cell_of(c);
    int actual = 0;
    for (const ComponentId n : nbrs) actual = std::max(actual, manhattan(own, p.cell_of(n)));
    const int rmin = min_range_[static_cast<std::size_t>(c)];
    return static_cast<double>(rmin) / std::max(actual, rmin);
}

double EoContext::total(const GridPlacement& p) const {
    double sum = 0;
    for (ComponentId c = 0; c < component_count(); ++c) sum += lambda(p, c);
    return sum;
}

void EoContext::step(GridPlacement& p, Rng& rng) const {
    const int m = component_count();
    if (m < 1) return;

    // rank ascending by lambda, rank 1 = worst; ties by id for determinism
    std::vector<std::pair<double, ComponentId>> ranked(static_cast<std::size_t>(m));
    for (ComponentId c = 0; c < m; ++c) ranked[static_cast<std::size_t>(c)] = {lambda(p, c), c};
    std::sort(ranked.begin(), ranked.end());

    const int k = sampler_.draw(rng);
    const ComponentId chosen = ranked[static_cast<std::size_t>(k - 1)].second;

    const auto& nbrs = neighbors_[static_cast<std::size_t>(chosen)];
    Cell target = p.cell_of(chosen);
    if (!nbrs.empty()) {
        double sx = 0, sy = 0, sz = 0;
        for (const ComponentId n : nbrs) {
            const Cell cell = p.cell_of(n);
            sx += cell.x;
            sy += cell.y;
            sz += cell.z;
        }
        const double inv = 1.0 / static_cast<double>(nbrs.size());
        const GridShape shape = p.shape();
        Cell centroid{
            std::clamp(static_cast<int>(std::llround(sx * inv)), 0, shape.nx - 1),
            std::clamp(static_cast<int>(std::llround(sy * inv)), 0, shape.ny - 1),
            std::clamp(static_cast<int>(std::llround(sz * inv)), 0, shape.nz - 1)};

        // candidate cells: von Neumann ball around the centroid, inside the grid
        const int r = min_range_[static_cast<std::size_t>(chosen)];
        std::vector<Cell> candidates;
        for (int dx = -r; dx <= r; ++dx) {
            for (int dy = -(r - std::abs(dx)); dy <= r - std::abs(dx); ++dy) {
                const int rem = r - std::abs(dx) - std::abs(dy);
                for (int dz = -rem; dz <= rem; ++dz) {
                    const Cell cand{centroid.x + dx, centroid.y + dy, centroid.z + dz};
                    if (p.in_bounds(cand)) candidates.push_back(cand);
                }
            }
        }
        target = candidates[static_cast<std::size_t>(rng.below(candidates.size()))];
    }

    const Cell own = p.cell_of(chosen);
    if (!(target == own)) p.swap_cells(own, target);
}

void eo_step(const LayoutHypergraph& h, GridPlacement& p, const EoParams& params, Rng& rng) {
    EoContext(h, params.tau).step(p, rng);
}

EoResult run_eo(const LayoutHypergraph& h, const EoParams& params) {
    const int m = h.component_count();
    const EoContext ctx(h, params.tau);
    const long max_iters =
        params.max_iters >= 0 ? params.max_iters : 100L * static_cast<long>(m) * m;

    GridPlacement current = GridPlacement::initial(params.shape, m);
    Rng rng(params.seed);

    EoResult result{current, ctx.total(current), grid_wirelength(h, current), 0, {}};
    result.trace.emplace_back(0, result.best_fitness);

    const double optimum = static_cast<double>(m);
    for (long iter = 1; iter <= max_iters; ++iter) {
        if (result.best_fitness >= optimum - 1e-9) break;
        ctx.step(current, rng);
        result.iters = iter;

        const double total = ctx.total(current);
        if (total > result.best_fitness + 1e-12) {
            result.best = current;
            result.best_fitness = total;
            result.best_grid_wirelength = grid_wirelength(h, current);
            result.trace.emplace_back(iter, total);
        } else if (std::abs(total - result.best_fitness) <= 1e-12) {
            const double gw = grid_wirelength(h, current);
            if (gw < result.best_grid_wirelength) {
                result.best = current;
                result.best_grid_wirelength = gw;
            }
        }
    }
    return result;
}

}  // namespace fp3d
