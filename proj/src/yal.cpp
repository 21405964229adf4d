#include "fp3d/yal.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "fp3d/errors.hpp"

namespace fp3d {

namespace {

struct Token {
    std::string text;
    int line;
};

using Statement = std::vector<Token>;

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

bool is_keyword(const Token& t, const char* kw) { return upper(t.text) == kw; }

// Strip /* */ comments, split on whitespace, cut statements at ';'.
std::vector<Statement> split_statements(std::string_view text) {
    std::vector<Statement> stmts;
    Statement cur;
    std::string tok;
    int line = 1;
    int tok_line = 1;
    bool in_comment = false;
    int comment_line = 0;

    auto flush_token = [&] {
        if (!tok.empty()) {
            cur.push_back({tok, tok_line});
            tok.clear();
        }
    };
    auto flush_statement = [&](int at_line) {
        flush_token();
        if (!cur.empty()) {
            stmts.push_back(cur);
            cur.clear();
        } else {
            // stray ';' is harmless
            (void)at_line;
        }
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '\n') ++line;
        if (in_comment) {
            if (c == '*' && i + 1 < text.size() && text[i + 1] == '/') {
                in_comment = false;
                ++i;
            }
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
            in_comment = true;
            comment_line = line;
            flush_token();
            ++i;
            continue;
        }
        if (c == ';') {
            flush_statement(line);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush_token();
            continue;
        }
        if (tok.empty()) tok_line = line;
        tok.push_back(c);
    }
    if (in_comment) throw SyntaxError(comment_line, "unterminated comment");
    flush_token();
    if (!cur.empty()) throw SyntaxError(cur.front().line, "statement not terminated by ';'");
    return stmts;
}

double parse_number(const Token& t) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(t.text, &pos);
    } catch (const std::exception&) {
        throw SyntaxError(t.line, "expected a number, got '" + t.text + "'");
    }
    if (pos != t.text.size()) throw SyntaxError(t.line, "expected a number, got '" + t.text + "'");
    return v;
}

ModuleType parse_type(const Token& t) {
    const std::string u = upper(t.text);
    if (u == "STANDARD") return ModuleType::standard;
    if (u == "GENERAL") return ModuleType::general;
    if (u == "PARENT") return ModuleType::parent;
    if (u == "PAD") return ModuleType::pad;
    throw SyntaxError(t.line, "unknown module TYPE '" + t.text + "'");
}

IoKind parse_io_kind(const Token& t) {
    const std::string u = upper(t.text);
    if (u == "I") return IoKind::input;
    if (u == "O") return IoKind::output;
    if (u == "B") return IoKind::bidirectional;
    return IoKind::unknown;  // PI/PO/PB/F/PWR/GND and friends
}

struct RawNetworkEntry {
    Token instance;
    Token module_name;
    std::vector<std::string> signals;
};

}  // namespace

const YalModule* Netlist::find_module(const std::string& name) const {
    for (const auto& m : modules) {
        if (m.name == name) return &m;
    }
    return nullptr;
}

const YalModule& Netlist::module_of(const Instance& inst) const {
    const YalModule* m = find_module(inst.module_name);
    if (!m) throw UnknownModule(inst.name, inst.module_name);
    return *m;
}

const Net* Netlist::find_net(const std::string& name) const {
    for (const auto& n : nets) {
        if (n.name == name) return &n;
    }
    return nullptr;
}

std::vector<std::size_t> Netlist::block_instance_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        if (module_of(instances[i]).placeable()) out.push_back(i);
    }
    return out;
}

Netlist parse_yal(std::string_view text) {
    const std::vector<Statement> stmts = split_statements(text);

    Netlist netlist;
    std::vector<RawNetworkEntry> network;
    std::unordered_set<std::string> module_names;
    bool network_seen = false;
    std::size_t network_module = static_cast<std::size_t>(-1);

    std::size_t si = 0;
    while (si < stmts.size()) {
        const Statement& head = stmts[si];
        if (!is_keyword(head[0], "MODULE") || head.size() != 2) {
            throw SyntaxError(head[0].line, "expected 'MODULE <name>;', got '" + head[0].text + "'");
        }
        const int module_line = head[0].line;
        YalModule mod;
        mod.name = head[1].text;
        if (!module_names.insert(mod.name).second) {
            throw SyntaxError(module_line, "module '" + mod.name + "' redefined");
        }
        ++si;

        bool have_dims = false;
        double minx = 0, maxx = 0, miny = 0, maxy = 0;
        bool has_network_here = false;

        for (;;) {
            if (si >= stmts.size()) throw SyntaxError(module_line, "missing ENDMODULE for '" + mod.name + "'");
            const Statement& st = stmts[si];
            const std::string kw = upper(st[0].text);
            if (kw == "ENDMODULE") {
                ++si;
                break;
            }
            if (kw == "TYPE") {
                if (st.size() != 2) throw SyntaxError(st[0].line, "TYPE takes one value");
                mod.type = parse_type(st[1]);
                ++si;
            } else if (kw == "DIMENSIONS") {
                if (st.size() < 5 || (st.size() - 1) % 2 != 0) {
                    throw SyntaxError(st[0].line, "DIMENSIONS needs an even list of at least 4 coordinates");
                }
                for (std::size_t i = 1; i + 1 < st.size(); i += 2) {
                    const double x = parse_number(st[i]);
                    const double y = parse_number(st[i + 1]);
                    if (!have_dims) {
                        minx = maxx = x;
                        miny = maxy = y;
                        have_dims = true;
                    } else {
                        minx = std::min(minx, x);
                        maxx = std::max(maxx, x);
                        miny = std::min(miny, y);
                        maxy = std::max(maxy, y);
                    }
                }
                mod.width = maxx - minx;
                mod.height = maxy - miny;
                ++si;
            } else if (kw == "IOLIST") {
                ++si;
                for (;;) {
                    if (si >= stmts.size()) throw SyntaxError(st[0].line, "missing ENDIOLIST");
                    const Statement& ts = stmts[si];
                    if (is_keyword(ts[0], "ENDIOLIST")) {
                        ++si;
                        break;
                    }
                    if (ts.size() < 4) {
                        throw SyntaxError(ts[0].line, "terminal needs 'name kind x y'");
                    }
                    Terminal term;
                    term.name = ts[0].text;
                    term.kind = parse_io_kind(ts[1]);
                    term.x = parse_number(ts[2]);
                    term.y = parse_number(ts[3]);
                    // width/layer/attribute tails are ignored
                    mod.terminals.push_back(term);
                    ++si;
                }
            } else if (kw == "NETWORK") {
                if (network_seen) throw SyntaxError(st[0].line, "more than one NETWORK section");
                network_seen = true;
                has_network_here = true;
                ++si;
                for (;;) {
                    if (si >= stmts.size()) throw SyntaxError(st[0].line, "missing ENDNETWORK");
                    const Statement& ns = stmts[si];
                    if (is_keyword(ns[0], "ENDNETWORK")) {
                        ++si;
                        break;
                    }
                    if (ns.size() < 2) throw SyntaxError(ns[0].line, "network entry needs 'instance module ...'");
                    RawNetworkEntry e;
                    e.instance = ns[0];
                    e.module_name = ns[1];
                    for (std::size_t i = 2; i < ns.size(); ++i) e.signals.push_back(ns[i].text);
                    network.push_back(std::move(e));
                    ++si;
                }
            } else {
                // CURRENT, VOLTAGE, PROFILE, placement attributes: skipped
                ++si;
            }
        }

        if (mod.type != ModuleType::parent) {
            if (!have_dims || mod.width <= 0 || mod.height <= 0) {
                throw SyntaxError(module_line,
                                  "module '" + mod.name + "' needs a non-degenerate DIMENSIONS rectangle");
            }
        }
        if (has_network_here && mod.type != ModuleType::parent) {
            throw SyntaxError(module_line, "NETWORK section outside a PARENT module");
        }
        if (has_network_here) network_module = netlist.modules.size();

        // terminals: unique names, inside the extracted rectangle, normalized to its origin
        std::unordered_set<std::string> term_names;
        for (auto& t : mod.terminals) {
            if (!term_names.insert(t.name).second) {
                throw SyntaxError(module_line,
                                  "module '" + mod.name + "': duplicate terminal '" + t.name + "'");
            }
            if (have_dims) {
                if (t.x < minx || t.x > maxx || t.y < miny || t.y > maxy) {
                    throw SyntaxError(module_line, "module '" + mod.name + "': terminal '" + t.name +
                                                       "' lies outside the module rectangle");
                }
                t.x -= minx;
                t.y -= miny;
            }
        }

        netlist.modules.push_back(std::move(mod));
    }

    if (!network_seen) throw MissingParent();
    netlist.parent_module = network_module;

    // instances + nets
    std::unordered_map<std::string, std::size_t> module_index;
    for (std::size_t i = 0; i < netlist.modules.size(); ++i) module_index[netlist.modules[i].name] = i;

    std::unordered_set<std::string> instance_names;
    std::unordered_map<std::string, std::size_t> net_index;
    for (const auto& e : network) {
        if (!module_index.count(e.module_name.text)) {
            throw UnknownModule(e.instance.text, e.module_name.text);
        }
        if (!instance_names.insert(e.instance.text).second) {
            throw SyntaxError(e.instance.line, "instance '" + e.instance.text + "' redefined");
        }
        const std::size_t inst_idx = netlist.instances.size();
        netlist.instances.push_back({e.instance.text, e.module_name.text, e.signals});
        for (const auto& sig : e.signals) {
            auto [it, inserted] = net_index.try_emplace(sig, netlist.nets.size());
            if (inserted) netlist.nets.push_back({sig, {}});
            auto& members = netlist.nets[it->second].instances;
            if (members.empty() || members.back() != inst_idx) {
                if (std::find(members.begin(), members.end(), inst_idx) == members.end()) {
                    members.push_back(inst_idx);
                }
            }
        }
    }
    return netlist;
}

Netlist parse_yal_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_yal(ss.str());
}

std::vector<std::string> block_instances(const Netlist& netlist) {
    std::vector<std::string> out;
    for (const std::size_t i : netlist.block_instance_indices()) {
        out.push_back(netlist.instances[i].name);
    }
    return out;
}

}  // namespace fp3d
