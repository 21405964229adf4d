#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fp3d/eo.hpp"
#include "fp3d/hypergraph.hpp"

namespace fp3d {

// Designer-chosen point the squeezer pulls components toward; shared by all
// layers.
struct RallyPoint {
    double px = 0;
    double py = 0;

    bool operator==(const RallyPoint&) const = default;
};

struct PlacedBox {
    ComponentId component = -1;
    std::string name;
    double x = 0;  // lower-left corner, um
    double y = 0;
    int layer = 0;
    double w = 0;
    double h = 0;

    double x2() const { return x + w; }
    double y2() const { return y + h; }
    bool operator==(const PlacedBox&) const = default;
};

// Touching edges do not collide: open-interval test on both axes.
bool boxes_overlap(const PlacedBox& a, const PlacedBox& b);

struct GeometricPlacement {
    std::vector<PlacedBox> boxes;  // component-id order when built by seed_geometry
    int layers = 1;
    RallyPoint rally;

    bool overlap_free() const;
    // first overlapping same-layer pair, if any
    std::optional<std::pair<std::size_t, std::size_t>> first_overlap() const;
    const PlacedBox* find(const std::string& name) const;

    bool operator==(const GeometricPlacement&) const = default;
};

struct ComponentDims {
    std::string name;
    double w = 0;
    double h = 0;
};

// Real-dimension geometry from a grid placement: uniform cell pitch equal to
// the largest width/height, component at cell (cx,cy,cz) placed at
// (cx*pitch_x, cy*pitch_y) on layer cz. Throws MissingDimensions.
GeometricPlacement seed_geometry(const GridPlacement& p, const std::vector<ComponentDims>& dims,
                                 RallyPoint rally);

enum class Axis { X, Y };

struct SlideResult {
    double distance = 0;
    std::optional<ComponentId> blocker;  // box contacted when contact limits the slide
};

// Largest collision-free slide of c toward the rally along axis; never
// overshoots the rally coordinate. Throws UnknownComponent.
SlideResult max_slide(const GeometricPlacement& g, ComponentId c, Axis axis);

struct MoveEvent {
    ComponentId component = -1;
    Axis axis = Axis::X;
    double from = 0;
    double to = 0;
    int layer = 0;
    bool bundle = false;
};

// Pending per-component moves plus the per-axis blocked sets. Contact-based
// blocks are revisable markers (any later move may open the path again, so
// the axis is re-tried every pass); positional blocks (near edge at the rally
// coordinate, or astride it) can never change and retire the component's
// entries once both axes are dead.
struct MoveQueue {
    std::vector<std::pair<ComponentId, Axis>> entries;  // no duplicates
    std::set<ComponentId> immobile_x;
    std::set<ComponentId> immobile_y;
    std::set<ComponentId> dead_x;  // positional, permanent
    std::set<ComponentId> dead_y;

    void block(ComponentId c, Axis axis, bool positional = false);
    void unblock(ComponentId c, Axis axis);  // a move on the axis disproved the marker
    bool blocked(ComponentId c, Axis axis) const;
    bool fully_immobile(ComponentId c) const;
    bool retired(ComponentId c) const;  // positionally dead on both axes
};

struct SqueezeParams {
    double p1 = 0.5;  // probability of re-enqueuing a moved component at the front
    double p2 = 0.5;  // must satisfy p1 + p2 = 1
    std::uint64_t seed = 1;
    bool bundles = false;
    long max_passes = 100000;
    bool check_each_move = false;  // overlap check after every accepted move
    std::function<void(const MoveEvent&)> observer;
};

struct SqueezeResult {
    GeometricPlacement placement;
    long moves = 0;
    long passes = 0;
    std::set<ComponentId> immobile_x;
    std::set<ComponentId> immobile_y;
};

// Single Component Move loop: shuffle the move queue, slide components
// maximally toward the rally, block axes that cannot strictly approach it,
// repeat until a full pass performs no move. Throws OverlappingInput,
// ConfigInvalid.
SqueezeResult squeeze(const GeometricPlacement& g, const SqueezeParams& params);

// Same loop, but a maximal chain of mutually contacting same-layer boxes
// translates as a unit whenever every member can approach the rally and no
// collision occurs; falls back to the single-component move otherwise.
SqueezeResult squeeze_bundles(const GeometricPlacement& g, const SqueezeParams& params);

struct BoundingVolume {
    double vx = 0;
    double vy = 0;
    int layers = 0;

    double product() const { return vx * vy * layers; }
};

// Tight bounding extents over all boxes plus the layer count.
// Throws EmptyPlacement.
BoundingVolume bounding_volume(const GeometricPlacement& g);

}  // namespace fp3d
