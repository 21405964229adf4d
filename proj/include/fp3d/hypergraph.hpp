#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fp3d/yal.hpp"

namespace fp3d {

using ComponentId = int;
using RelationId = int;
using NodeId = int;

// Pin-point node; owned by exactly one component hyperedge.
struct PinNode {
    ComponentId owner = -1;
    std::string terminal;

    bool operator==(const PinNode&) const = default;
};

struct ComponentEdge {
    std::string label;  // instance name, unique
    double width = 0;
    double height = 0;
    std::vector<NodeId> nodes;

    bool operator==(const ComponentEdge&) const = default;
};

struct RelationEdge {
    std::string label;  // signal name
    std::vector<NodeId> nodes;

    bool operator==(const RelationEdge&) const = default;
};

struct NeighborStats {
    int blocks = 0;
    int nets = 0;
    int neighbor_min = 0;
    int neighbor_max = 0;
    double neighbor_avg = 0;  // exact mean

    // printed form used by the benchmark tables: half-up
    int neighbor_avg_rounded() const;
};

// Layout hypergraph: components and wire relations are both hyperedges,
// attached to each other through pin-point nodes.
class LayoutHypergraph {
public:
    // One component edge per placeable block, one relation edge per net with
    // at least two distinct block members, ids dense in declaration order.
    // Throws EmptyNetlist when there is nothing placeable.
    static LayoutHypergraph from_netlist(const Netlist& netlist);

    int component_count() const { return static_cast<int>(components_.size()); }
    int relation_count() const { return static_cast<int>(relations_.size()); }
    int node_count() const { return static_cast<int>(nodes_.size()); }

    const ComponentEdge& component(ComponentId c) const;
    const RelationEdge& relation(RelationId r) const;
    const PinNode& node(NodeId n) const { return nodes_[static_cast<std::size_t>(n)]; }

    std::optional<ComponentId> component_by_label(const std::string& label) const;

    // distinct components attached to a relation, declaration order
    const std::vector<ComponentId>& relation_members(RelationId r) const;
    const std::vector<RelationId>& relations_of(ComponentId c) const;

    // distinct components != c sharing at least one relation with c, sorted.
    // Throws UnknownComponent.
    std::vector<ComponentId> neighbors(ComponentId c) const;

    NeighborStats stats() const;

    // Child-nesting relation; present in the representation, never populated
    // by from_netlist.
    const std::vector<std::pair<ComponentId, ComponentId>>& hierarchy() const { return hierarchy_; }

private:
    void check_component(ComponentId c) const;

    std::vector<ComponentEdge> components_;
    std::vector<RelationEdge> relations_;
    std::vector<PinNode> nodes_;
    std::vector<std::vector<RelationId>> comp_rels_;
    std::vector<std::vector<ComponentId>> rel_comps_;
    std::vector<std::pair<ComponentId, ComponentId>> hierarchy_;
};

}  // namespace fp3d
