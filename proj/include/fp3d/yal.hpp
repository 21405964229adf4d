#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace fp3d {

enum class ModuleType { standard, general, parent, pad };
enum class IoKind { input, output, bidirectional, unknown };

struct Terminal {
    std::string name;
    double x = 0;  // module-local, relative to the bounding rectangle origin
    double y = 0;
    IoKind kind = IoKind::unknown;

    bool operator==(const Terminal&) const = default;
};

struct YalModule {
    std::string name;
    ModuleType type = ModuleType::standard;
    double width = 0;   // bounding rectangle of the DIMENSIONS vertex list
    double height = 0;
    std::vector<Terminal> terminals;

    bool placeable() const {
        return type == ModuleType::standard || type == ModuleType::general;
    }
    bool operator==(const YalModule&) const = default;
};

struct Instance {
    std::string name;
    std::string module_name;
    std::vector<std::string> signals;  // positional bindings, NETWORK order

    bool operator==(const Instance&) const = default;
};

struct Net {
    std::string name;
    std::vector<std::size_t> instances;  // indices into Netlist::instances, first-binding order, deduped

    bool operator==(const Net&) const = default;
};

struct Netlist {
    std::vector<YalModule> modules;    // declaration order
    std::vector<Instance> instances;   // NETWORK order
    std::vector<Net> nets;             // first-occurrence order
    std::size_t parent_module = static_cast<std::size_t>(-1);

    const YalModule* find_module(const std::string& name) const;
    const YalModule& module_of(const Instance& inst) const;
    const Net* find_net(const std::string& name) const;

    // indices of instances whose module is a placeable block, declaration order
    std::vector<std::size_t> block_instance_indices() const;

    bool operator==(const Netlist&) const = default;
};

// Parse a YAL document (MCNC subset: MODULE/TYPE/DIMENSIONS/IOLIST/NETWORK).
// Throws SyntaxError, UnknownModule, MissingParent.
Netlist parse_yal(std::string_view text);

// Convenience: read the file, then parse. Throws IoError on read failure.
Netlist parse_yal_file(const std::string& path);

// Names of placeable block instances, declaration order.
std::vector<std::string> block_instances(const Netlist& netlist);

}  // namespace fp3d
