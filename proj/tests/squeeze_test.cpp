#include "fp3d/squeeze.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "fp3d/errors.hpp"
#include "helpers.hpp"

using namespace fp3d;

namespace {

PlacedBox box(int id, double x, double y, double w, double h, int layer = 0) {
    return {id, "c" + std::to_string(id), x, y, layer, w, h};
}

GeometricPlacement make_placement(std::vector<PlacedBox> boxes, RallyPoint rally = {0, 0},
                                  int layers = 1) {
    GeometricPlacement g;
    g.boxes = std::move(boxes);
    g.rally = rally;
    g.layers = layers;
    return g;
}

// independent fixed-point oracle for corner-rally X-only scenarios: every box
// packs left against the rally or its nearest y-overlapping predecessor
std::vector<double> left_pack_oracle(const GeometricPlacement& g) {
    std::vector<std::size_t> order(g.boxes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return g.boxes[a].x < g.boxes[b].x; });
    std::vector<double> final_x(g.boxes.size(), 0);
    for (const std::size_t i : order) {
        double x = g.rally.px;
        for (const std::size_t j : order) {
            if (j == i || g.boxes[j].x >= g.boxes[i].x) continue;
            const bool y_overlap = g.boxes[i].y < g.boxes[j].y2() && g.boxes[j].y < g.boxes[i].y2();
            if (y_overlap && g.boxes[i].layer == g.boxes[j].layer) {
                x = std::max(x, final_x[j] + g.boxes[j].w);
            }
        }
        final_x[i] = x;
    }
    return final_x;
}

// Canonical scenario: a three-box wall column at the rally plus a packed
// train of four mobile boxes on the bottom band
GeometricPlacement wall_and_train() {
    return make_placement({
        box(0, 0, 0, 2, 2),    // wall, bottom
        box(1, 0, 2, 2, 2),    // wall, middle
        box(2, 0, 4, 2, 2),    // wall, top
        box(3, 4, 0, 2, 2),    // train, front
        box(4, 6, 0, 2, 2),
        box(5, 8, 0, 2, 2),
        box(6, 10, 0, 2, 2),   // train, rear
    });
}

struct RandomInstance {
    GeometricPlacement g;
};

RandomInstance random_instance(std::mt19937& gen, int max_boxes = 20, int max_layers = 3) {
    std::uniform_int_distribution<int> n_dist(1, max_boxes);
    std::uniform_int_distribution<int> layer_dist(1, max_layers);
    std::uniform_int_distribution<int> pos(0, 40);
    std::uniform_int_distribution<int> dim(1, 8);
    std::uniform_int_distribution<int> rally_pos(0, 20);

    RandomInstance inst;
    const int layers = layer_dist(gen);
    inst.g.layers = layers;
    inst.g.rally = {static_cast<double>(rally_pos(gen)), static_cast<double>(rally_pos(gen))};
    const int want = n_dist(gen);
    std::uniform_int_distribution<int> layer_of(0, layers - 1);
    int id = 0;
    for (int i = 0; i < want; ++i) {
        for (int attempt = 0; attempt < 60; ++attempt) {
            PlacedBox b = box(id, pos(gen), pos(gen), dim(gen), dim(gen), layer_of(gen));
            const bool clash = std::any_of(inst.g.boxes.begin(), inst.g.boxes.end(),
                                           [&](const PlacedBox& o) { return boxes_overlap(b, o); });
            if (!clash) {
                inst.g.boxes.push_back(b);
                ++id;
                break;
            }
        }
    }
    return inst;
}

double interval_distance(double origin, double ext, double rally) {
    return std::max({0.0, origin - rally, rally - (origin + ext)});
}

}  // namespace

TEST_CASE("seed_geometry uses the max dimensions as uniform pitch") {
    GridPlacement p = GridPlacement::initial({2, 1, 1}, 2);
    const std::vector<ComponentDims> dims{{"a", 2, 3}, {"b", 4, 1}};
    const GeometricPlacement g = seed_geometry(p, dims, {0, 0});
    REQUIRE(g.boxes.size() == 2);
    CHECK(g.boxes[0].x == 0);
    CHECK(g.boxes[0].y == 0);
    CHECK(g.boxes[1].x == 4);  // pitch_x = max width = 4
    CHECK(g.boxes[1].y == 0);
    CHECK(g.boxes[0].w == 2);
    CHECK(g.boxes[0].h == 3);
    CHECK(g.overlap_free());
}

TEST_CASE("an empty grid column leaves a full-pitch gap") {
    GridPlacement p = GridPlacement::initial({3, 1, 1}, 2);
    p.swap_cells({1, 0, 0}, {2, 0, 0});  // occupy columns 0 and 2
    const std::vector<ComponentDims> dims{{"a", 5, 5}, {"b", 5, 5}};
    const GeometricPlacement g = seed_geometry(p, dims, {0, 0});
    CHECK(g.boxes[1].x - g.boxes[0].x2() == 5.0);  // one full pitch of air
}

TEST_CASE("layer count follows the grid depth") {
    GridPlacement p = GridPlacement::initial({2, 2, 3}, 9);
    std::vector<ComponentDims> dims(9, {"x", 10, 10});
    for (int i = 0; i < 9; ++i) dims[static_cast<std::size_t>(i)].name = "c" + std::to_string(i);
    const GeometricPlacement g = seed_geometry(p, dims, {0, 0});
    CHECK(g.layers == 3);
    CHECK(g.overlap_free());
}

TEST_CASE("seed_geometry needs positive dimensions for every component") {
    GridPlacement p = GridPlacement::initial({2, 1, 1}, 2);
    CHECK_THROWS_AS(seed_geometry(p, {{"a", 2, 3}}, {0, 0}), MissingDimensions);
    CHECK_THROWS_AS(seed_geometry(p, {{"a", 2, 3}, {"b", 0, 1}}, {0, 0}), MissingDimensions);
}

TEST_CASE("max_slide: free run to the rally") {
    const auto g = make_placement({box(0, 5, 0, 2, 2)});
    const SlideResult r = max_slide(g, 0, Axis::X);
    CHECK(r.distance == 5);
    CHECK_FALSE(r.blocker.has_value());
}

TEST_CASE("max_slide: contact with a same-layer obstacle") {
    const auto g = make_placement({box(0, 5, 0, 2, 2), box(1, 0, 1, 2, 2)});
    const SlideResult r = max_slide(g, 0, Axis::X);
    CHECK(r.distance == 3);  // stops at the obstacle's right edge x=2
    REQUIRE(r.blocker.has_value());
    CHECK(*r.blocker == 1);
}

TEST_CASE("max_slide: obstacles on other layers do not collide") {
    const auto g = make_placement({box(0, 5, 0, 2, 2), box(1, 0, 1, 2, 2, 1)}, {0, 0}, 2);
    const SlideResult r = max_slide(g, 0, Axis::X);
    CHECK(r.distance == 5);
    CHECK_FALSE(r.blocker.has_value());
}

TEST_CASE("max_slide: moving away from the near edge is impossible") {
    // rally inside the box extent: no strictly-closer move exists
    const auto g = make_placement({box(0, 2, 0, 4, 2)}, {3, 0});
    const SlideResult r = max_slide(g, 0, Axis::X);
    CHECK(r.distance == 0);
    // rally on the right: slide right up to the rally coordinate
    const auto g2 = make_placement({box(1, 0, 0, 2, 2)}, {10, 0});
    const SlideResult r2 = max_slide(g2, 1, Axis::X);
    CHECK(r2.distance == 8);  // right edge travels from 2 to 10
    CHECK_THROWS_AS(max_slide(g2, 99, Axis::X), UnknownComponent);
}

TEST_CASE("a single box squeezes onto the rally corner") {
    const auto g = make_placement({box(0, 7, 9, 3, 2)});
    const SqueezeResult r = squeeze(g, {});
    CHECK(r.placement.boxes[0].x == 0);
    CHECK(r.placement.boxes[0].y == 0);
    CHECK(r.moves == 2);  // one slide per axis
}

TEST_CASE("already packed input is a fixed point reached in one pass") {
    const auto g = make_placement({box(0, 0, 0, 4, 4), box(1, 4, 0, 4, 4), box(2, 0, 4, 4, 4)});
    const SqueezeResult r = squeeze(g, {});
    CHECK(r.placement.boxes == g.boxes);
    CHECK(r.moves == 0);
    CHECK(r.passes == 1);
}

TEST_CASE("wall-and-train scenario: the train packs against the wall") {
    const GeometricPlacement g = wall_and_train();
    const std::vector<double> expect = left_pack_oracle(g);
    // frozen from the oracle: walls stay, train packs to 2,4,6,8
    REQUIRE(expect == std::vector<double>{0, 0, 0, 2, 4, 6, 8});

    for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL, 17ULL}) {
        SqueezeParams params;
        params.seed = seed;
        const SqueezeResult r = squeeze(g, params);
        for (std::size_t i = 0; i < g.boxes.size(); ++i) {
            CHECK(r.placement.boxes[i].x == expect[i]);
            CHECK(r.placement.boxes[i].y == g.boxes[i].y);  // only X moves exist here
        }
        CHECK(r.moves == 4);  // each train box slides exactly once
        // every mobile box ends in contact with its blocker chain
        CHECK(r.placement.boxes[3].x == 2);
        CHECK(r.placement.boxes[4].x == r.placement.boxes[3].x2());
        CHECK(r.placement.boxes[5].x == r.placement.boxes[4].x2());
        CHECK(r.placement.boxes[6].x == r.placement.boxes[5].x2());
    }
}

TEST_CASE("wall-and-train scenario: bundles reach the same packing in fewer moves") {
    const GeometricPlacement g = wall_and_train();
    const std::vector<double> expect = left_pack_oracle(g);
    for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL, 17ULL}) {
        SqueezeParams params;
        params.seed = seed;
        const SqueezeResult individual = squeeze(g, params);
        const SqueezeResult bundled = squeeze_bundles(g, params);
        for (std::size_t i = 0; i < g.boxes.size(); ++i) {
            CHECK(bundled.placement.boxes[i].x == expect[i]);
            CHECK(bundled.placement.boxes[i].x == individual.placement.boxes[i].x);
        }
        CHECK(bundled.moves == 1);  // the whole train translates as one chain
        CHECK(bundled.moves < individual.moves);
    }
}

TEST_CASE("a chain resting on an immobile box blocks as a whole") {
    // wall at the rally corner; a three-box chain one unit away from it.
    // Hand enumeration: the chain slides onto the wall as one move, then the
    // wall (dead on both axes) blocks the whole chain on X.
    const auto g = make_placement({
        box(0, 0, 0, 2, 2),  // wall: immobile once processed
        box(1, 3, 0, 2, 2),
        box(2, 5, 0, 2, 2),
        box(3, 7, 0, 2, 2),
    });
    for (const std::uint64_t seed : {1ULL, 5ULL, 11ULL}) {
        SqueezeParams params;
        params.bundles = true;
        params.seed = seed;
        const SqueezeResult r = squeeze(g, params);
        CHECK(r.moves == 1);
        CHECK(r.placement.boxes[1].x == 2);
        CHECK(r.placement.boxes[2].x == 4);
        CHECK(r.placement.boxes[3].x == 6);
        for (const ComponentId c : {0, 1, 2, 3}) CHECK(r.immobile_x.count(c) == 1);
        for (const ComponentId c : {0, 1, 2, 3}) CHECK(r.immobile_y.count(c) == 1);
    }
}

TEST_CASE("bundle mode degenerates to single moves when nothing ever touches") {
    // one box per layer: no box can contact another at any point of the run
    std::mt19937 gen(555);
    std::uniform_int_distribution<int> pos(1, 40), dim(2, 9);
    for (int round = 0; round < 20; ++round) {
        GeometricPlacement g;
        g.layers = 4;
        g.rally = {static_cast<double>(pos(gen) / 2), static_cast<double>(pos(gen) / 2)};
        for (int layer = 0; layer < 4; ++layer) {
            PlacedBox b = box(layer, pos(gen), pos(gen), dim(gen), dim(gen), layer);
            g.boxes.push_back(b);
        }
        SqueezeParams params;
        params.seed = static_cast<std::uint64_t>(round + 77);
        const SqueezeResult plain = squeeze(g, params);
        const SqueezeResult bundled = squeeze_bundles(g, params);
        CHECK(plain.placement.boxes == bundled.placement.boxes);
        CHECK(plain.moves == bundled.moves);
    }
}

TEST_CASE("overlapping input is rejected") {
    const auto g = make_placement({box(0, 0, 0, 4, 4), box(1, 2, 2, 4, 4)});
    CHECK_THROWS_AS(squeeze(g, {}), OverlappingInput);
    // touching edges are not an overlap
    const auto ok = make_placement({box(0, 0, 0, 4, 4), box(1, 4, 0, 4, 4)});
    CHECK_NOTHROW(squeeze(ok, {}));
}

TEST_CASE("parameter validation") {
    const auto g = make_placement({box(0, 1, 1, 2, 2)});
    SqueezeParams params;
    params.p1 = 0.7;
    params.p2 = 0.7;
    CHECK_THROWS_AS(squeeze(g, params), ConfigInvalid);

    auto bad_rally = g;
    bad_rally.rally = {-1, 0};
    CHECK_THROWS_AS(squeeze(bad_rally, {}), ConfigInvalid);

    auto dup = make_placement({box(0, 0, 0, 2, 2), box(0, 4, 0, 2, 2)});
    CHECK_THROWS_AS(squeeze(dup, {}), ConfigInvalid);
}

TEST_CASE("move queue bookkeeping") {
    MoveQueue q;
    q.entries = {{0, Axis::X}, {0, Axis::Y}, {1, Axis::X}};

    // contact-based markers are revisable and keep the entries alive
    q.block(0, Axis::X);
    CHECK(q.blocked(0, Axis::X));
    CHECK_FALSE(q.blocked(0, Axis::Y));
    CHECK_FALSE(q.fully_immobile(0));
    CHECK(q.entries.size() == 3);
    q.unblock(0, Axis::X);
    CHECK_FALSE(q.blocked(0, Axis::X));

    q.block(0, Axis::X);
    q.block(0, Axis::Y);
    CHECK(q.fully_immobile(0));
    CHECK_FALSE(q.retired(0));
    CHECK(q.entries.size() == 3);

    // positional blocks on both axes retire the component for good
    q.block(1, Axis::X, true);
    q.block(1, Axis::Y, true);
    CHECK(q.retired(1));
    q.unblock(1, Axis::X);  // cannot be disproven
    CHECK(q.blocked(1, Axis::X));
    CHECK(q.entries.size() == 2);
    for (const auto& [c, axis] : q.entries) CHECK(c != 1);
}

// Tracks, move by move, which box pairs keep their orthogonal overlap for the
// whole run; only those pairs carry an order-preservation obligation (a pair
// whose overlap lapses may legitimately pass by on the other axis).
struct OverlapTracker {
    std::vector<PlacedBox> state;
    std::vector<std::vector<char>> cont_y;  // continuous y-overlap: X order applies
    std::vector<std::vector<char>> cont_x;  // continuous x-overlap: Y order applies

    explicit OverlapTracker(const GeometricPlacement& g) : state(g.boxes) {
        const std::size_t n = state.size();
        cont_y.assign(n, std::vector<char>(n, 0));
        cont_x.assign(n, std::vector<char>(n, 0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j || state[i].layer != state[j].layer) continue;
                cont_y[i][j] = state[i].y < state[j].y2() && state[j].y < state[i].y2();
                cont_x[i][j] = state[i].x < state[j].x2() && state[j].x < state[i].x2();
            }
        }
    }

    void apply(const MoveEvent& e) {
        std::size_t k = state.size();
        for (std::size_t i = 0; i < state.size(); ++i) {
            if (state[i].component == e.component) k = i;
        }
        REQUIRE(k < state.size());
        if (e.axis == Axis::X) {
            state[k].x = e.to;
        } else {
            state[k].y = e.to;
        }
        for (std::size_t j = 0; j < state.size(); ++j) {
            if (j == k || state[j].layer != state[k].layer) continue;
            if (!(state[k].y < state[j].y2() && state[j].y < state[k].y2())) {
                cont_y[k][j] = cont_y[j][k] = 0;
            }
            if (!(state[k].x < state[j].x2() && state[j].x < state[k].x2())) {
                cont_x[k][j] = cont_x[j][k] = 0;
            }
        }
    }
};

TEST_CASE("property suite: random instances under both modes") {
    std::mt19937 gen(987654);
    for (int round = 0; round < 120; ++round) {
        const RandomInstance inst = random_instance(gen);
        const GeometricPlacement& g = inst.g;
        if (g.boxes.empty()) continue;

        for (const bool bundles : {false, true}) {
            SqueezeParams params;
            params.bundles = bundles;
            params.seed = static_cast<std::uint64_t>(round * 2 + bundles + 1);
            params.check_each_move = true;

            // per-move monotone approach toward the rally on the move axis
            std::map<ComponentId, const PlacedBox*> original;
            for (const auto& b : g.boxes) original[b.component] = &b;
            OverlapTracker tracker(g);
            params.observer = [&](const MoveEvent& e) {
                const PlacedBox* b = original.at(e.component);
                const double ext = e.axis == Axis::X ? b->w : b->h;
                const double rally = e.axis == Axis::X ? g.rally.px : g.rally.py;
                CHECK(interval_distance(e.to, ext, rally) < interval_distance(e.from, ext, rally));
                tracker.apply(e);
            };

            const SqueezeResult r = squeeze(g, params);

            // overlap-free output
            CHECK(r.placement.overlap_free());

            // termination within a bounded pass count
            CHECK(r.passes <= 4 * (static_cast<long>(g.boxes.size()) + 2));

            // volume non-increase, measured from the rally the boxes move
            // toward: the farthest per-axis reach never grows
            const auto rally_extent = [&](const GeometricPlacement& p, Axis axis) {
                double m = 0;
                for (const auto& b : p.boxes) {
                    const double lo = axis == Axis::X ? b.x : b.y;
                    const double hi = axis == Axis::X ? b.x2() : b.y2();
                    const double rc = axis == Axis::X ? g.rally.px : g.rally.py;
                    m = std::max({m, hi - rc, rc - lo});
                }
                return m;
            };
            CHECK(rally_extent(r.placement, Axis::X) <= rally_extent(g, Axis::X));
            CHECK(rally_extent(r.placement, Axis::Y) <= rally_extent(g, Axis::Y));
            CHECK(bounding_volume(r.placement).layers == bounding_volume(g).layers);

            // order preservation for pairs that stayed orthogonally overlapping
            for (std::size_t i = 0; i < g.boxes.size(); ++i) {
                for (std::size_t j = 0; j < g.boxes.size(); ++j) {
                    if (i == j || g.boxes[i].layer != g.boxes[j].layer) continue;
                    const PlacedBox &a0 = g.boxes[i], &b0 = g.boxes[j];
                    const PlacedBox &a1 = r.placement.boxes[i], &b1 = r.placement.boxes[j];
                    if (tracker.cont_y[i][j] && a0.x2() <= b0.x) CHECK(a1.x2() <= b1.x);
                    if (tracker.cont_x[i][j] && a0.y2() <= b0.y) CHECK(a1.y2() <= b1.y);
                }
            }

            // idempotence: the settled placement is a fixed point for any seed
            SqueezeParams again;
            again.bundles = bundles;
            again.seed = params.seed + 991;
            const SqueezeResult r2 = squeeze(r.placement, again);
            CHECK(r2.placement.boxes == r.placement.boxes);
            CHECK(r2.moves == 0);
            CHECK(r2.passes == 1);
        }
    }
}

TEST_CASE("squeeze is bit-reproducible for a fixed seed") {
    std::mt19937 gen(424242);
    const RandomInstance inst = random_instance(gen);
    SqueezeParams params;
    params.seed = 5150;
    const SqueezeResult a = squeeze(inst.g, params);
    const SqueezeResult b = squeeze(inst.g, params);
    CHECK(a.placement.boxes == b.placement.boxes);
    CHECK(a.moves == b.moves);
    CHECK(a.passes == b.passes);
}

TEST_CASE("bounding volume") {
    const auto g = make_placement({box(0, 0, 0, 10, 20)});
    const BoundingVolume v = bounding_volume(g);
    CHECK(v.vx == 10);
    CHECK(v.vy == 20);
    CHECK(v.layers == 1);

    GeometricPlacement empty;
    CHECK_THROWS_AS(bounding_volume(empty), EmptyPlacement);

    // tight extents, not extents-from-origin
    const auto shifted = make_placement({box(0, 5, 7, 2, 3), box(1, 9, 7, 2, 3, 1)}, {0, 0}, 2);
    const BoundingVolume sv = bounding_volume(shifted);
    CHECK(sv.vx == 6);
    CHECK(sv.vy == 3);
    CHECK(sv.layers == 2);
}

TEST_CASE("layers are independent for collision but share the rally") {
    const auto g = make_placement(
        {box(0, 5, 5, 2, 2, 0), box(1, 5, 5, 2, 2, 1), box(2, 0, 0, 3, 3, 1)}, {0, 0}, 2);
    const SqueezeResult r = squeeze(g, {});
    // layer 0 box falls straight to the corner
    CHECK(r.placement.boxes[0].x == 0);
    CHECK(r.placement.boxes[0].y == 0);
    // layer 1 box is stopped by the corner box of its own layer; which flank
    // it lands on depends on the axis order the shuffle produced
    const PlacedBox& b1 = r.placement.boxes[1];
    const bool beside = b1.x == 3 && b1.y == 0;
    const bool above = b1.x == 0 && b1.y == 3;
    CHECK((beside || above));
    // z never changes
    for (std::size_t i = 0; i < g.boxes.size(); ++i) {
        CHECK(r.placement.boxes[i].layer == g.boxes[i].layer);
    }
}
