#include "fp3d/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "fp3d/errors.hpp"

namespace fp3d {

int NeighborStats::neighbor_avg_rounded() const {
    return static_cast<int>(std::floor(neighbor_avg + 0.5));
}

LayoutHypergraph LayoutHypergraph::from_netlist(const Netlist& netlist) {
    LayoutHypergraph h;

    const std::vector<std::size_t> blocks = netlist.block_instance_indices();
    if (blocks.empty()) throw EmptyNetlist();

    std::unordered_map<std::size_t, ComponentId> comp_of_instance;
    for (const std::size_t inst_idx : blocks) {
        const Instance& inst = netlist.instances[inst_idx];
        const YalModule& mod = netlist.module_of(inst);
        const ComponentId cid = static_cast<ComponentId>(h.components_.size());
        comp_of_instance[inst_idx] = cid;
        h.components_.push_back({inst.name, mod.width, mod.height, {}});
    }
    h.comp_rels_.resize(h.components_.size());

    for (const Net& net : netlist.nets) {
        // distinct block members, first-binding order
        std::vector<std::size_t> members;
        for (const std::size_t inst_idx : net.instances) {
            if (comp_of_instance.count(inst_idx)) members.push_back(inst_idx);
        }
        if (members.size() < 2) continue;  // pad-only and single-block nets carry no block-to-block wire

        const RelationId rid = static_cast<RelationId>(h.relations_.size());
        h.relations_.push_back({net.name, {}});
        h.rel_comps_.emplace_back();
        for (const std::size_t inst_idx : members) {
            const ComponentId cid = comp_of_instance.at(inst_idx);
            const Instance& inst = netlist.instances[inst_idx];
            // terminal at the first binding position of this signal, when the
            // module declares one there
            std::string term_name;
            const YalModule& mod = netlist.module_of(inst);
            for (std::size_t pos = 0; pos < inst.signals.size(); ++pos) {
                if (inst.signals[pos] == net.name) {
                    term_name = pos < mod.terminals.size() ? mod.terminals[pos].name
                                                           : "p" + std::to_string(pos);
                    break;
                }
            }
            const NodeId nid = static_cast<NodeId>(h.nodes_.size());
            h.nodes_.push_back({cid, term_name});
            h.components_[static_cast<std::size_t>(cid)].nodes.push_back(nid);
            h.relations_[static_cast<std::size_t>(rid)].nodes.push_back(nid);
            h.comp_rels_[static_cast<std::size_t>(cid)].push_back(rid);
            h.rel_comps_[static_cast<std::size_t>(rid)].push_back(cid);
        }
    }
    return h;
}

void LayoutHypergraph::check_component(ComponentId c) const {
    if (c < 0 || c >= component_count()) {
        throw UnknownComponent("component id " + std::to_string(c));
    }
}

const ComponentEdge& LayoutHypergraph::component(ComponentId c) const {
    check_component(c);
    return components_[static_cast<std::size_t>(c)];
}

const RelationEdge& LayoutHypergraph::relation(RelationId r) const {
    return relations_.at(static_cast<std::size_t>(r));
}

std::optional<ComponentId> LayoutHypergraph::component_by_label(const std::string& label) const {
    for (std::size_t i = 0; i < components_.size(); ++i) {
        if (components_[i].label == label) return static_cast<ComponentId>(i);
    }
    return std::nullopt;
}

const std::vector<ComponentId>& LayoutHypergraph::relation_members(RelationId r) const {
    return rel_comps_.at(static_cast<std::size_t>(r));
}

const std::vector<RelationId>& LayoutHypergraph::relations_of(ComponentId c) const {
    check_component(c);
    return comp_rels_[static_cast<std::size_t>(c)];
}

std::vector<ComponentId> LayoutHypergraph::neighbors(ComponentId c) const {
    check_component(c);
    std::set<ComponentId> out;
    for (const RelationId r : comp_rels_[static_cast<std::size_t>(c)]) {
        for (const ComponentId other : rel_comps_[static_cast<std::size_t>(r)]) {
            if (other != c) out.insert(other);
        }
    }
    return {out.begin(), out.end()};
}

NeighborStats LayoutHypergraph::stats() const {
    NeighborStats s;
    s.blocks = component_count();
    s.nets = relation_count();
    long total = 0;
    for (ComponentId c = 0; c < component_count(); ++c) {
        const int n = static_cast<int>(neighbors(c).size());
        if (c == 0) {
            s.neighbor_min = s.neighbor_max = n;
        } else {
            s.neighbor_min = std::min(s.neighbor_min, n);
            s.neighbor_max = std::max(s.neighbor_max, n);
        }
        total += n;
    }
    s.neighbor_avg = s.blocks > 0 ? static_cast<double>(total) / s.blocks : 0.0;
    return s;
}

}  // namespace fp3d
