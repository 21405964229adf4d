#include "fp3d/squeeze.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>

#include "fp3d/errors.hpp"
#include "fp3d/rng.hpp"

namespace fp3d {

bool boxes_overlap(const PlacedBox& a, const PlacedBox& b) {
    if (a.layer != b.layer) return false;
    return a.x < b.x2() && b.x < a.x2() && a.y < b.y2() && b.y < a.y2();
}

bool GeometricPlacement::overlap_free() const { return !first_overlap().has_value(); }

std::optional<std::pair<std::size_t, std::size_t>> GeometricPlacement::first_overlap() const {
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        for (std::size_t j = i + 1; j < boxes.size(); ++j) {
            if (boxes_overlap(boxes[i], boxes[j])) return std::make_pair(i, j);
        }
    }
    return std::nullopt;
}

const PlacedBox* GeometricPlacement::find(const std::string& name) const {
    for (const auto& b : boxes) {
        if (b.name == name) return &b;
    }
    return nullptr;
}

GeometricPlacement seed_geometry(const GridPlacement& p, const std::vector<ComponentDims>& dims,
                                 RallyPoint rally) {
    const int m = p.component_count();
    if (static_cast<int>(dims.size()) < m) {
        throw MissingDimensions("component " + std::to_string(dims.size()));
    }
    double pitch_x = 0, pitch_y = 0;
    for (int c = 0; c < m; ++c) {
        const auto& d = dims[static_cast<std::size_t>(c)];
        if (!(d.w > 0) || !(d.h > 0)) throw MissingDimensions(d.name.empty() ? std::to_string(c) : d.name);
        pitch_x = std::max(pitch_x, d.w);
        pitch_y = std::max(pitch_y, d.h);
    }

    GeometricPlacement g;
    g.layers = p.shape().nz;
    g.rally = rally;
    g.boxes.reserve(static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c) {
        const Cell cell = p.cell_of(c);
        const auto& d = dims[static_cast<std::size_t>(c)];
        g.boxes.push_back({c, d.name, cell.x * pitch_x, cell.y * pitch_y, cell.z, d.w, d.h});
    }
    return g;
}

namespace {

double coord(const PlacedBox& b, Axis a) { return a == Axis::X ? b.x : b.y; }
double extent(const PlacedBox& b, Axis a) { return a == Axis::X ? b.w : b.h; }
double far_edge(const PlacedBox& b, Axis a) { return a == Axis::X ? b.x2() : b.y2(); }
double rally_coord(const RallyPoint& r, Axis a) { return a == Axis::X ? r.px : r.py; }

void set_coord(PlacedBox& b, Axis a, double v) {
    if (a == Axis::X) {
        b.x = v;
    } else {
        b.y = v;
    }
}

// open-interval overlap on the axis orthogonal to the move axis
bool ortho_overlap(const PlacedBox& a, const PlacedBox& b, Axis move_axis) {
    if (move_axis == Axis::X) return a.y < b.y2() && b.y < a.y2();
    return a.x < b.x2() && b.x < a.x2();
}

// -1 / +1: moving that way strictly approaches the rally; 0: the near edge is
// at the rally coordinate or the box straddles it.
int direction_toward(const PlacedBox& b, Axis a, const RallyPoint& r) {
    const double rc = rally_coord(r, a);
    if (rc < coord(b, a)) return -1;
    if (rc > far_edge(b, a)) return +1;
    return 0;
}

// Largest ulp-safe origin for a box of the given extent whose far edge must
// not pass `limit`.
double snap_below(double origin, double ext, double limit) {
    while (origin + ext > limit) {
        origin = std::nextafter(origin, -std::numeric_limits<double>::infinity());
    }
    return origin;
}

struct SlideLimit {
    double target = 0;  // new origin coordinate of the box on the move axis
    std::optional<std::size_t> blocker;  // index of the contacted box
};

// Collision- and rally-limited slide target for box i moving `dir` along
// `axis`. `skip` marks boxes ignored as obstacles (bundle members).
SlideLimit slide_limit(const std::vector<PlacedBox>& boxes, std::size_t i, Axis axis, int dir,
                       const RallyPoint& rally, const std::vector<char>* skip = nullptr) {
    const PlacedBox& c = boxes[i];
    const double rc = rally_coord(rally, axis);
    SlideLimit out;
    if (dir < 0) {
        double target = rc;
        std::optional<std::size_t> blocker;
        for (std::size_t j = 0; j < boxes.size(); ++j) {
            if (j == i || (skip && (*skip)[j])) continue;
            const PlacedBox& o = boxes[j];
            if (o.layer != c.layer || !ortho_overlap(c, o, axis)) continue;
            const double edge = far_edge(o, axis);
            if (edge > coord(c, axis)) continue;  // on the far side
            if (edge > target || (edge == target && !blocker)) {
                target = edge;
                blocker = j;
            }
        }
        out.target = target;
        out.blocker = blocker;
    } else {
        const double ext = extent(c, axis);
        double limit = rc;  // far edge must stop here
        std::optional<std::size_t> blocker;
        for (std::size_t j = 0; j < boxes.size(); ++j) {
            if (j == i || (skip && (*skip)[j])) continue;
            const PlacedBox& o = boxes[j];
            if (o.layer != c.layer || !ortho_overlap(c, o, axis)) continue;
            const double edge = coord(o, axis);
            if (edge < far_edge(c, axis)) continue;
            if (edge < limit || (edge == limit && !blocker)) {
                limit = edge;
                blocker = j;
            }
        }
        out.target = snap_below(limit - ext, ext, limit);
        out.blocker = blocker;
    }
    return out;
}

struct Engine {
    std::vector<PlacedBox> boxes;
    RallyPoint rally;
    MoveQueue queue;
    Rng rng;
    const SqueezeParams& params;
    long moves = 0;
    long passes = 0;

    Engine(const GeometricPlacement& g, const SqueezeParams& p)
        : boxes(g.boxes), rally(g.rally), rng(p.seed), params(p) {}

    bool blocked(std::size_t i, Axis a) const { return queue.blocked(boxes[i].component, a); }
    bool fully_immobile(std::size_t i) const { return queue.fully_immobile(boxes[i].component); }
    bool retired(std::size_t i) const { return queue.retired(boxes[i].component); }

    void block(std::size_t i, Axis a, bool positional = false) {
        queue.block(boxes[i].component, a, positional);
    }

    void emit(std::size_t i, Axis a, double from, bool bundle) {
        if (params.observer) {
            params.observer({boxes[i].component, a, from, coord(boxes[i], a), boxes[i].layer, bundle});
        }
    }

    void check_overlaps() const {
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            for (std::size_t j = i + 1; j < boxes.size(); ++j) {
                if (boxes_overlap(boxes[i], boxes[j])) {
                    throw Error("squeeze produced overlapping boxes '" + boxes[i].name + "' and '" +
                                boxes[j].name + "'");
                }
            }
        }
    }

    // maximal same-layer chain of mutually touching, still-live boxes through
    // i, along axis; a dead box does not transmit motion
    std::vector<std::size_t> contact_chain(std::size_t i, Axis axis) const {
        std::vector<std::size_t> chain{i};
        std::vector<char> in_chain(boxes.size(), 0);
        in_chain[i] = 1;
        for (std::size_t head = 0; head < chain.size(); ++head) {
            const PlacedBox& a = boxes[chain[head]];
            for (std::size_t j = 0; j < boxes.size(); ++j) {
                if (in_chain[j] || fully_immobile(j)) continue;
                const PlacedBox& b = boxes[j];
                if (b.layer != a.layer || !ortho_overlap(a, b, axis)) continue;
                const bool touching = axis == Axis::X ? (a.x2() == b.x || b.x2() == a.x)
                                                      : (a.y2() == b.y || b.y2() == a.y);
                if (touching) {
                    in_chain[j] = 1;
                    chain.push_back(j);
                }
            }
        }
        std::sort(chain.begin(), chain.end());
        return chain;
    }

    // Returns true when a move happened.
    bool process_single(std::size_t i, Axis axis, int dir, std::deque<std::pair<std::size_t, Axis>>& current) {
        const SlideLimit lim = slide_limit(boxes, i, axis, dir, rally);
        const double from = coord(boxes[i], axis);
        const double d = dir < 0 ? from - lim.target : lim.target - from;
        if (!(d > 0)) {
            if (!lim.blocker) {
                block(i, axis);  // nothing to contact and no room toward the rally
            } else if (fully_immobile(*lim.blocker)) {
                block(i, axis);
            }
            // mobile blocker: neglected for now, reconsidered in a later pass
            return false;
        }
        set_coord(boxes[i], axis, lim.target);
        // the geometry changed: contact-based markers on either axis may be stale
        queue.unblock(boxes[i].component, Axis::X);
        queue.unblock(boxes[i].component, Axis::Y);
        ++moves;
        emit(i, axis, from, false);
        if (params.check_each_move) check_overlaps();
        requeue(i, axis, current);
        return true;
    }

    bool process_bundle(std::size_t i, Axis axis, int dir, std::deque<std::pair<std::size_t, Axis>>& current) {
        const std::vector<std::size_t> chain = contact_chain(i, axis);
        bool viable = true;
        for (const std::size_t j : chain) {
            if (direction_toward(boxes[j], axis, rally) != dir) {
                viable = false;
                break;
            }
        }
        if (!viable || chain.size() == 1) return false;  // caller falls back to the single move

        std::vector<char> skip(boxes.size(), 0);
        for (const std::size_t j : chain) skip[j] = 1;

        double d = std::numeric_limits<double>::infinity();
        std::optional<std::size_t> blocker;
        for (const std::size_t j : chain) {
            const SlideLimit lim = slide_limit(boxes, j, axis, dir, rally, &skip);
            const double from = coord(boxes[j], axis);
            const double dj = dir < 0 ? from - lim.target : lim.target - from;
            if (dj < d) {
                d = dj;
                blocker = lim.blocker;
            }
        }
        if (!(d > 0)) {
            if (blocker && fully_immobile(*blocker)) {
                // a chain packed tight against something that can never move is
                // dead as a whole; if any member still has individual slack the
                // single-component move must get its chance instead
                bool packed = true;
                for (const std::size_t j : chain) {
                    const SlideLimit own = slide_limit(boxes, j, axis, dir, rally);
                    const double from = coord(boxes[j], axis);
                    if ((dir < 0 ? from - own.target : own.target - from) > 0) {
                        packed = false;
                        break;
                    }
                }
                if (packed) {
                    for (const std::size_t j : chain) block(j, axis);
                    return true;
                }
            }
            return false;  // fall back to the single-component move
        }
        for (const std::size_t j : chain) {
            const double from = coord(boxes[j], axis);
            set_coord(boxes[j], axis, dir < 0 ? from - d : from + d);
            queue.unblock(boxes[j].component, Axis::X);
            queue.unblock(boxes[j].component, Axis::Y);
            emit(j, axis, from, true);
        }
        ++moves;
        if (params.check_each_move) check_overlaps();
        requeue(i, axis, current);
        made_move = true;
        return true;
    }

    void requeue(std::size_t i, Axis axis, std::deque<std::pair<std::size_t, Axis>>& current) {
        if (rng.bernoulli(params.p1)) {
            current.emplace_front(i, axis);
        } else {
            current.emplace_back(i, axis);
        }
    }

    bool made_move = false;

    SqueezeResult run() {
        std::unordered_map<ComponentId, std::size_t> index_of;
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            queue.entries.emplace_back(boxes[i].component, Axis::X);
            queue.entries.emplace_back(boxes[i].component, Axis::Y);
            index_of[boxes[i].component] = i;
        }

        for (;;) {
            if (++passes > params.max_passes) {
                throw Error("squeeze did not settle within " + std::to_string(params.max_passes) +
                            " passes");
            }
            rng.shuffle(queue.entries);
            std::deque<std::pair<std::size_t, Axis>> current;
            for (const auto& [c, a] : queue.entries) current.emplace_back(index_of.at(c), a);

            made_move = false;
            while (!current.empty()) {
                const auto [i, axis] = current.front();
                current.pop_front();
                if (retired(i)) continue;  // its entries left the queue mid-pass

                const int dir = direction_toward(boxes[i], axis, rally);
                if (dir == 0) {
                    // at or astride the rally coordinate: permanently dead axis
                    block(i, axis, true);
                    continue;
                }
                if (params.bundles && process_bundle(i, axis, dir, current)) continue;
                if (process_single(i, axis, dir, current)) made_move = true;
            }
            if (!made_move) break;
        }

        check_overlaps();
        SqueezeResult result;
        result.placement.boxes = std::move(boxes);
        result.placement.rally = rally;
        result.moves = moves;
        result.passes = passes;
        result.immobile_x = queue.immobile_x;
        result.immobile_y = queue.immobile_y;
        return result;
    }
};

void validate_squeeze_input(const GeometricPlacement& g, const SqueezeParams& params) {
    if (!(params.p1 >= 0 && params.p1 <= 1) || !(params.p2 >= 0 && params.p2 <= 1) ||
        std::abs(params.p1 + params.p2 - 1.0) > 1e-9) {
        throw ConfigInvalid("requeue probabilities must satisfy p1 + p2 = 1");
    }
    if (!std::isfinite(g.rally.px) || !std::isfinite(g.rally.py) || g.rally.px < 0 ||
        g.rally.py < 0) {
        throw ConfigInvalid("rally point must be finite and non-negative");
    }
    std::set<ComponentId> ids;
    for (const auto& b : g.boxes) {
        if (b.component < 0 || !ids.insert(b.component).second) {
            throw ConfigInvalid("boxes need distinct non-negative component ids");
        }
        if (!(b.w > 0) || !(b.h > 0)) throw MissingDimensions(b.name);
        if (b.x < 0 || b.y < 0) throw ConfigInvalid("box coordinates must be non-negative");
    }
    if (const auto overlap = g.first_overlap()) {
        throw OverlappingInput(g.boxes[overlap->first].name, g.boxes[overlap->second].name);
    }
}

}  // namespace

void MoveQueue::block(ComponentId c, Axis axis, bool positional) {
    (axis == Axis::X ? immobile_x : immobile_y).insert(c);
    if (positional) (axis == Axis::X ? dead_x : dead_y).insert(c);
    if (retired(c)) {
        entries.erase(std::remove_if(entries.begin(), entries.end(),
                                     [c](const std::pair<ComponentId, Axis>& e) {
                                         return e.first == c;
                                     }),
                      entries.end());
    }
}

void MoveQueue::unblock(ComponentId c, Axis axis) {
    if ((axis == Axis::X ? dead_x : dead_y).count(c)) return;  // positional, cannot be disproven
    (axis == Axis::X ? immobile_x : immobile_y).erase(c);
}

bool MoveQueue::blocked(ComponentId c, Axis axis) const {
    return (axis == Axis::X ? immobile_x : immobile_y).count(c) > 0;
}

bool MoveQueue::fully_immobile(ComponentId c) const {
    return immobile_x.count(c) > 0 && immobile_y.count(c) > 0;
}

bool MoveQueue::retired(ComponentId c) const {
    return dead_x.count(c) > 0 && dead_y.count(c) > 0;
}

SlideResult max_slide(const GeometricPlacement& g, ComponentId c, Axis axis) {
    std::size_t idx = g.boxes.size();
    for (std::size_t i = 0; i < g.boxes.size(); ++i) {
        if (g.boxes[i].component == c) {
            idx = i;
            break;
        }
    }
    if (idx == g.boxes.size()) throw UnknownComponent("component id " + std::to_string(c));

    const int dir = direction_toward(g.boxes[idx], axis, g.rally);
    if (dir == 0) return {0.0, std::nullopt};
    const SlideLimit lim = slide_limit(g.boxes, idx, axis, dir, g.rally);
    const double from = coord(g.boxes[idx], axis);
    const double d = dir < 0 ? from - lim.target : lim.target - from;
    SlideResult out;
    out.distance = d;
    if (lim.blocker) out.blocker = g.boxes[*lim.blocker].component;
    return out;
}

SqueezeResult squeeze(const GeometricPlacement& g, const SqueezeParams& params) {
    validate_squeeze_input(g, params);
    Engine engine(g, params);
    SqueezeResult result = engine.run();
    result.placement.layers = g.layers;
    return result;
}

SqueezeResult squeeze_bundles(const GeometricPlacement& g, const SqueezeParams& params) {
    SqueezeParams p = params;
    p.bundles = true;
    return squeeze(g, p);
}

BoundingVolume bounding_volume(const GeometricPlacement& g) {
    if (g.boxes.empty()) throw EmptyPlacement();
    double minx = g.boxes[0].x, maxx = g.boxes[0].x2();
    double miny = g.boxes[0].y, maxy = g.boxes[0].y2();
    int minl = g.boxes[0].layer, maxl = g.boxes[0].layer;
    for (const auto& b : g.boxes) {
        minx = std::min(minx, b.x);
        maxx = std::max(maxx, b.x2());
        miny = std::min(miny, b.y);
        maxy = std::max(maxy, b.y2());
        minl = std::min(minl, b.layer);
        maxl = std::max(maxl, b.layer);
    }
    return {maxx - minx, maxy - miny, maxl - minl + 1};
}

}  // namespace fp3d
