#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fp3d/errors.hpp"
#include "fp3d/hypergraph.hpp"
#include "fp3d/json_io.hpp"
#include "fp3d/pipeline.hpp"
#include "fp3d/runner.hpp"
#include "fp3d/svg.hpp"
#include "fp3d/wirelength.hpp"
#include "fp3d/yal.hpp"

namespace {

using fp3d::json;

// exit codes: 0 ok, 1 usage, 2 input error, 3 runtime error
constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kInputError = 2;
constexpr int kRuntimeError = 3;

void emit_json(const json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        fp3d::write_text_file(out_path, text);
    }
}

fp3d::GridShape parse_grid(const std::string& text) {
    fp3d::GridShape shape;
    if (std::sscanf(text.c_str(), "%d,%d,%d", &shape.nx, &shape.ny, &shape.nz) != 3) {
        throw fp3d::ConfigInvalid("--grid expects NX,NY,NZ, got '" + text + "'");
    }
    return shape;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    if (text.find(',') == std::string::npos) {
        const long n = std::stol(text);
        if (n < 1) throw fp3d::ConfigInvalid("--seeds needs a positive count or a list");
        for (long s = 1; s <= n; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
        return seeds;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) seeds.push_back(std::stoull(item));
    }
    if (seeds.empty()) throw fp3d::ConfigInvalid("--seeds list is empty");
    return seeds;
}

struct PipelineFlags {
    std::string grid;
    double tau = 1.5;
    long iters = -1;
    std::string rally = "corner";
    double p1 = 0.5;
    std::string seeds = "1";
    double die_height = 1.0;
    bool bundles = false;
    int threads = 0;
    std::string config;
};

struct PipelineFlagOpts {
    CLI::Option* grid = nullptr;
    CLI::Option* tau = nullptr;
    CLI::Option* iters = nullptr;
    CLI::Option* rally = nullptr;
    CLI::Option* p1 = nullptr;
    CLI::Option* seeds = nullptr;
    CLI::Option* die_height = nullptr;
    CLI::Option* bundles = nullptr;
    CLI::Option* threads = nullptr;
    CLI::Option* config = nullptr;
};

PipelineFlagOpts add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
    PipelineFlagOpts o;
    o.grid = cmd->add_option("--grid", f.grid, "grid shape NX,NY,NZ (default: per-instance)");
    o.tau = cmd->add_option("--tau", f.tau, "rank-selection exponent, > 1");
    o.iters = cmd->add_option("--iters", f.iters, "EO iteration budget (default 100*m^2)");
    o.rally = cmd->add_option("--rally", f.rally, "rally point: corner|center|X,Y");
    o.p1 = cmd->add_option("--p1", f.p1, "front-requeue probability");
    o.seeds = cmd->add_option("--seeds", f.seeds, "seed count N (runs 1..N) or list S1,S2,...");
    o.die_height = cmd->add_option("--die-height", f.die_height, "layer-to-layer distance");
    o.bundles = cmd->add_flag("--bundles", f.bundles, "move contact chains as bundles");
    o.threads = cmd->add_option("--threads", f.threads, "parallel runs (default: hardware)");
    o.config = cmd->add_option("--config", f.config, "JSON file mirroring these flags");
    return o;
}

// values from --config fill in whatever the command line left untouched
void apply_config(const PipelineFlagOpts& opts, PipelineFlags& f) {
    if (!opts.config || opts.config->count() == 0) return;
    const json cfg = fp3d::load_json_file(f.config);
    if (!cfg.is_object()) throw fp3d::ConfigInvalid("config file must hold a JSON object");

    const auto fresh = [](const CLI::Option* o) { return o->count() == 0; };
    if (cfg.contains("grid") && fresh(opts.grid)) {
        if (cfg["grid"].is_array()) {
            f.grid = std::to_string(cfg["grid"].at(0).get<int>()) + "," +
                     std::to_string(cfg["grid"].at(1).get<int>()) + "," +
                     std::to_string(cfg["grid"].at(2).get<int>());
        } else {
            f.grid = cfg["grid"].get<std::string>();
        }
    }
    if (cfg.contains("tau") && fresh(opts.tau)) f.tau = cfg["tau"].get<double>();
    if (cfg.contains("iters") && fresh(opts.iters)) f.iters = cfg["iters"].get<long>();
    if (cfg.contains("rally") && fresh(opts.rally)) {
        f.rally = cfg["rally"].is_array()
                      ? std::to_string(cfg["rally"].at(0).get<double>()) + "," +
                            std::to_string(cfg["rally"].at(1).get<double>())
                      : cfg["rally"].get<std::string>();
    }
    if (cfg.contains("p1") && fresh(opts.p1)) f.p1 = cfg["p1"].get<double>();
    if (cfg.contains("seeds") && fresh(opts.seeds)) {
        if (cfg["seeds"].is_array()) {
            std::string list;
            for (const auto& s : cfg["seeds"]) {
                if (!list.empty()) list += ",";
                list += std::to_string(s.get<long>());
            }
            f.seeds = list;
        } else if (cfg["seeds"].is_number()) {
            f.seeds = std::to_string(cfg["seeds"].get<long>());
        } else {
            f.seeds = cfg["seeds"].get<std::string>();
        }
    }
    if (cfg.contains("die_height") && fresh(opts.die_height)) {
        f.die_height = cfg["die_height"].get<double>();
    }
    if (cfg.contains("bundles") && fresh(opts.bundles)) f.bundles = cfg["bundles"].get<bool>();
    if (cfg.contains("threads") && fresh(opts.threads)) f.threads = cfg["threads"].get<int>();
}

fp3d::PipelineJob job_from_flags(const PipelineFlags& f, const std::string& instance,
                                 int component_count) {
    fp3d::PipelineJob job;
    job.grid = f.grid.empty() ? fp3d::default_grid(instance, component_count) : parse_grid(f.grid);
    job.tau = f.tau;
    job.max_iters = f.iters;
    job.rally = fp3d::RallySpec::parse(f.rally);
    job.p1 = f.p1;
    job.bundles = f.bundles;
    job.die_height = f.die_height;
    return job;
}

std::string instance_name(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

// fan one instance's seeds out through the in-process runner
fp3d::ServeReport run_seeds(const std::string& yal_path, const fp3d::PipelineJob& base,
                            const std::vector<std::uint64_t>& seeds, int threads) {
    std::vector<json> payloads;
    for (const std::uint64_t s : seeds) {
        fp3d::PipelineJob job = base;
        job.seed = s;
        payloads.push_back(fp3d::pipeline_payload(job, yal_path, false));
    }
    const int workers = threads > 0
                            ? threads
                            : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return fp3d::run_parallel(payloads, workers);
}

// published references for the MCNC set: 3D flow results and 2D optima
struct McncReference {
    const char* name;
    fp3d::GridShape grid;
    double wirelength_3d;
    double wirelength_2d;
};
constexpr McncReference kMcncReferences[] = {
    {"apte", {2, 2, 3}, 137325, 513061},
    {"xerox", {2, 2, 3}, 290183, 370993},
    {"hp", {2, 2, 3}, 105848, 153328},
    {"ami33", {3, 3, 4}, 42183, 58627},
    {"ami49", {4, 4, 4}, 704135, 640509},
};

const McncReference* find_reference(const std::string& name) {
    for (const auto& r : kMcncReferences) {
        if (name == r.name) return &r;
    }
    return nullptr;
}

int cmd_stats(const std::string& yal_path, const std::string& out_path) {
    const fp3d::Netlist netlist = fp3d::parse_yal_file(yal_path);
    const auto h = fp3d::LayoutHypergraph::from_netlist(netlist);
    const fp3d::NeighborStats s = h.stats();
    emit_json(fp3d::stats_json(s), out_path);
    std::cerr << instance_name(yal_path) << ": blocks " << s.blocks << ", nets " << s.nets
              << ", neighbors " << s.neighbor_min << "/" << s.neighbor_max << "/"
              << s.neighbor_avg_rounded() << " (avg " << s.neighbor_avg << ")\n";
    return kOk;
}

int cmd_place(const std::string& yal_path, const PipelineFlags& f, const std::string& out_path) {
    const fp3d::Netlist netlist = fp3d::parse_yal_file(yal_path);
    const auto h = fp3d::LayoutHypergraph::from_netlist(netlist);
    const auto seeds = parse_seeds(f.seeds);
    fp3d::EoParams params;
    params.shape = f.grid.empty() ? fp3d::default_grid(instance_name(yal_path), h.component_count())
                                  : parse_grid(f.grid);
    params.tau = f.tau;
    params.max_iters = f.iters;
    params.seed = seeds.front();
    const fp3d::EoResult r = fp3d::run_eo(h, params);
    emit_json(fp3d::grid_placement_json(h, r.best, r.best_fitness), out_path);
    std::cerr << "fitness " << r.best_fitness << "/" << h.component_count() << " after " << r.iters
              << " iterations\n";
    return kOk;
}

int cmd_squeeze(const std::string& layout_path, const std::string& yal_path,
                const PipelineFlags& f, const std::string& out_path) {
    const json doc = fp3d::load_json_file(layout_path);
    fp3d::GeometricPlacement g;
    if (doc.contains("boxes")) {
        g = fp3d::geometry_from_json(doc);
    } else if (doc.contains("cells")) {
        if (yal_path.empty()) {
            throw fp3d::ConfigInvalid("grid layouts need --yal for the component dimensions");
        }
        const fp3d::Netlist netlist = fp3d::parse_yal_file(yal_path);
        const auto h = fp3d::LayoutHypergraph::from_netlist(netlist);
        const fp3d::GridPlacement p = fp3d::grid_placement_from_json(h, doc);
        std::vector<fp3d::ComponentDims> dims;
        for (fp3d::ComponentId c = 0; c < h.component_count(); ++c) {
            const auto& e = h.component(c);
            dims.push_back({e.label, e.width, e.height});
        }
        g = fp3d::seed_geometry(p, dims, {0, 0});
    } else {
        throw fp3d::InputError("'" + layout_path + "' is neither a grid nor a geometric layout");
    }

    const fp3d::RallySpec rally = fp3d::RallySpec::parse(f.rally);
    if (rally.mode == fp3d::RallySpec::Mode::center) {
        const auto v = fp3d::bounding_volume(g);
        g.rally = {v.vx / 2, v.vy / 2};
    } else if (rally.mode == fp3d::RallySpec::Mode::point) {
        g.rally = {rally.px, rally.py};
    } else {
        g.rally = {0, 0};
    }

    fp3d::SqueezeParams params;
    params.p1 = f.p1;
    params.p2 = 1.0 - f.p1;
    params.seed = parse_seeds(f.seeds).front();
    const fp3d::SqueezeResult r =
        f.bundles ? fp3d::squeeze_bundles(g, params) : fp3d::squeeze(g, params);
    auto out = r.placement;
    out.layers = g.layers;
    emit_json(fp3d::geometry_json(out), out_path);
    const auto v = fp3d::bounding_volume(out);
    std::cerr << "squeezed in " << r.moves << " moves over " << r.passes << " passes; extents "
              << v.vx << " x " << v.vy << " x " << v.layers << "\n";
    return kOk;
}

int cmd_wirelength(const std::string& yal_path, const std::string& layout_path, double die_height,
                   bool per_net, const std::string& out_path) {
    const fp3d::Netlist netlist = fp3d::parse_yal_file(yal_path);
    const auto h = fp3d::LayoutHypergraph::from_netlist(netlist);
    const fp3d::GeometricPlacement g = fp3d::geometry_from_json(fp3d::load_json_file(layout_path));
    const fp3d::WirelengthReport report = fp3d::total_wirelength(h, g, die_height);
    emit_json(fp3d::wirelength_json(report, per_net), out_path);
    std::cerr << "total wire-length " << report.total << " um over " << report.per_net.size()
              << " nets\n";
    return kOk;
}

int cmd_pipeline(const std::string& yal_path, const PipelineFlags& f, const std::string& out_path,
                 const std::string& svg_path) {
    const fp3d::Netlist netlist = fp3d::parse_yal_file(yal_path);
    const auto h = fp3d::LayoutHypergraph::from_netlist(netlist);
    const fp3d::PipelineJob base = job_from_flags(f, instance_name(yal_path), h.component_count());
    const auto seeds = parse_seeds(f.seeds);
    const fp3d::ServeReport report = run_seeds(yal_path, base, seeds, f.threads);
    if (!report.has_best()) throw fp3d::Error("every seed failed");
    const fp3d::RunResult& best = report.best();

    json runs = json::array();
    for (std::size_t i = 0; i < report.results.size(); ++i) {
        const auto& r = report.results[i];
        json row{{"seed", seeds[i]}};
        if (r.failed()) {
            row["error"] = r.raw["error"];
        } else {
            row["total_wirelength"] = r.total_wirelength;
            row["volume"] = {r.volume.vx, r.volume.vy, r.volume.layers};
        }
        runs.push_back(row);
    }
    json out{{"layout", best.placement},
             {"wirelength", {{"total", best.total_wirelength}, {"die_height", f.die_height}}},
             {"volume", {best.volume.vx, best.volume.vy, best.volume.layers}},
             {"seed", best.raw.value("seed", std::uint64_t{0})},
             {"grid", {base.grid.nx, base.grid.ny, base.grid.nz}},
             {"runs", runs}};
    emit_json(out, out_path);
    if (!svg_path.empty()) {
        fp3d::write_text_file(svg_path, fp3d::render_svg(fp3d::geometry_from_json(best.placement)));
    }
    std::cerr << instance_name(yal_path) << ": best wire-length " << best.total_wirelength
              << " um, volume " << best.volume.vx << " x " << best.volume.vy << " x "
              << best.volume.layers << " (" << seeds.size() << " seeds)\n";
    return kOk;
}

int cmd_bench(const std::vector<std::string>& yal_paths, const PipelineFlags& f,
              const std::string& out_path) {
    json rows = json::array();
    int failures = 0;
    for (const auto& path : yal_paths) {
        const std::string name = instance_name(path);
        try {
            const fp3d::Netlist netlist = fp3d::parse_yal_file(path);
            const auto h = fp3d::LayoutHypergraph::from_netlist(netlist);
            const fp3d::PipelineJob base = job_from_flags(f, name, h.component_count());
            const auto seeds = parse_seeds(f.seeds);
            const fp3d::ServeReport report = run_seeds(path, base, seeds, f.threads);
            if (!report.has_best()) throw fp3d::Error("every seed failed");

            double sum = 0;
            int ok = 0;
            for (const auto& r : report.results) {
                if (!r.failed()) {
                    sum += r.total_wirelength;
                    ++ok;
                }
            }
            const fp3d::RunResult& best = report.best();
            json row{{"name", name},
                     {"grid", {base.grid.nx, base.grid.ny, base.grid.nz}},
                     {"volume", {best.volume.vx, best.volume.vy, best.volume.layers}},
                     {"wirelength_best", best.total_wirelength},
                     {"wirelength_mean", ok > 0 ? sum / ok : 0.0}};
            if (const McncReference* ref = find_reference(name)) {
                row["reference_wirelength"] = ref->wirelength_3d;
                row["reference_2d"] = ref->wirelength_2d;
                row["ratio_vs_reference"] = best.total_wirelength / ref->wirelength_3d;
                row["ratio_vs_2d"] = best.total_wirelength / ref->wirelength_2d;
            }
            rows.push_back(row);
            std::cerr << name << ": best " << best.total_wirelength << " um, mean "
                      << (ok > 0 ? sum / ok : 0.0) << " um over " << ok << " runs\n";
        } catch (const std::exception& e) {
            ++failures;
            std::cerr << name << ": FAILED: " << e.what() << "\n";
        }
    }
    emit_json(json{{"instances", rows}}, out_path);
    return failures == 0 ? kOk : (rows.empty() ? kInputError : kOk);
}

int cmd_render(const std::string& layout_path, const std::string& svg_path) {
    const fp3d::GeometricPlacement g = fp3d::geometry_from_json(fp3d::load_json_file(layout_path));
    const std::string svg = fp3d::render_svg(g);
    if (svg_path.empty() || svg_path == "-") {
        std::cout << svg;
    } else {
        fp3d::write_text_file(svg_path, svg);
    }
    return kOk;
}

int cmd_serve(const std::string& yal_path, const PipelineFlags& f, std::uint16_t port,
              double hello_period, double timeout, bool inline_netlist, bool embed_worker,
              const std::string& out_path) {
    const fp3d::Netlist netlist = fp3d::parse_yal_file(yal_path);
    const auto h = fp3d::LayoutHypergraph::from_netlist(netlist);
    const fp3d::PipelineJob base = job_from_flags(f, instance_name(yal_path), h.component_count());

    fp3d::ServeConfig config;
    config.port = port;
    config.hello_period = hello_period;
    config.timeout = timeout;
    config.embed_worker = embed_worker;
    for (const std::uint64_t s : parse_seeds(f.seeds)) {
        fp3d::PipelineJob job = base;
        job.seed = s;
        config.payloads.push_back(fp3d::pipeline_payload(job, yal_path, inline_netlist));
    }
    config.on_listening = [](std::uint16_t p) { std::cerr << "serving on port " << p << "\n"; };
    config.observer = [](const fp3d::ServerEvent& e) {
        switch (e.kind) {
            case fp3d::ServerEvent::Kind::worker_joined:
                std::cerr << "worker joined: " << e.worker_id << "\n";
                break;
            case fp3d::ServerEvent::Kind::leased:
                std::cerr << "leased " << e.task_id << " to " << e.worker_id << "\n";
                break;
            case fp3d::ServerEvent::Kind::requeued:
                std::cerr << "requeued " << e.task_id << " (worker timed out)\n";
                break;
            case fp3d::ServerEvent::Kind::completed:
                std::cerr << "completed " << e.task_id << " by " << e.worker_id << "\n";
                break;
            case fp3d::ServerEvent::Kind::duplicate_discarded:
                std::cerr << "discarded duplicate result for " << e.task_id << "\n";
                break;
            default: break;
        }
    };
    const fp3d::ServeReport report = fp3d::serve(config);
    emit_json(report.to_json(), out_path);
    return kOk;
}

int cmd_work(const std::string& server, const std::string& worker_id, double hello_period,
             const std::string& out_path) {
    fp3d::WorkConfig config;
    const auto colon = server.rfind(':');
    if (colon == std::string::npos) throw fp3d::ConfigInvalid("--server expects HOST:PORT");
    config.host = server.substr(0, colon);
    config.port = static_cast<std::uint16_t>(std::stoi(server.substr(colon + 1)));
    config.worker_id = worker_id;
    config.hello_period = hello_period;
    const long done = fp3d::work(config);
    emit_json(json{{"worker_id", worker_id}, {"tasks_done", done}}, out_path);
    std::cerr << "worker " << worker_id << " done after " << done << " tasks\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"3D floorplanning toolkit: netlist stats, grid placement, squeezing, "
                 "wire-length evaluation and distributed runs"};
    app.require_subcommand(1);

    std::string yal_path, layout_path, out_path, svg_path, server, worker_id = "worker";
    std::vector<std::string> bench_paths;
    PipelineFlags flags;
    double die_height = 1.0;
    bool per_net = false;
    std::uint16_t port = 0;
    double hello_period = 5.0, timeout = 15.0;
    bool inline_netlist = false, embed_worker = false;

    auto* stats = app.add_subcommand("stats", "netlist and hypergraph statistics");
    stats->add_option("yal", yal_path, "YAL netlist file")->required();
    stats->add_option("--out", out_path, "JSON output path (default stdout)");

    auto* place = app.add_subcommand("place", "grid placement only");
    place->add_option("yal", yal_path)->required();
    place->add_option("--out", out_path);
    const PipelineFlagOpts place_opts = add_pipeline_flags(place, flags);

    auto* squeeze = app.add_subcommand("squeeze", "volume-optimize a layout");
    squeeze->add_option("layout", layout_path, "layout JSON (grid or geometric)")->required();
    squeeze->add_option("--yal", yal_path, "netlist (needed for grid layouts)");
    squeeze->add_option("--out", out_path);
    const PipelineFlagOpts squeeze_opts = add_pipeline_flags(squeeze, flags);

    auto* wl = app.add_subcommand("wirelength", "evaluate a layout's wire-length");
    wl->add_option("yal", yal_path)->required();
    wl->add_option("layout", layout_path, "geometric layout JSON")->required();
    wl->add_option("--die-height", die_height);
    wl->add_flag("--per-net", per_net, "include the per-net breakdown");
    wl->add_option("--out", out_path);

    auto* pipeline = app.add_subcommand("pipeline", "place, squeeze and evaluate");
    pipeline->add_option("yal", yal_path)->required();
    pipeline->add_option("--out", out_path);
    pipeline->add_option("--svg", svg_path, "render the best layout");
    const PipelineFlagOpts pipeline_opts = add_pipeline_flags(pipeline, flags);

    auto* bench = app.add_subcommand("bench", "run instances and compare to references");
    bench->add_option("yal", bench_paths, "YAL files")->required();
    bench->add_option("--out", out_path);
    const PipelineFlagOpts bench_opts = add_pipeline_flags(bench, flags);

    auto* render = app.add_subcommand("render", "layout JSON to SVG");
    render->add_option("layout", layout_path)->required();
    render->add_option("--svg", svg_path, "SVG output path (default stdout)");

    auto* serve = app.add_subcommand("serve", "spool tasks to workers over TCP");
    serve->add_option("yal", yal_path)->required();
    serve->add_option("--port", port, "listen port (0: ephemeral)");
    serve->add_option("--hello-period", hello_period, "expected heartbeat period, seconds");
    serve->add_option("--timeout", timeout, "lease timeout, seconds (> hello period)");
    serve->add_flag("--inline-netlist", inline_netlist, "embed the netlist text in payloads");
    serve->add_flag("--embed-worker", embed_worker, "also execute tasks locally");
    serve->add_option("--out", out_path);
    const PipelineFlagOpts serve_opts = add_pipeline_flags(serve, flags);

    auto* workcmd = app.add_subcommand("work", "execute tasks from a server");
    workcmd->add_option("--server", server, "HOST:PORT")->required();
    workcmd->add_option("--worker-id", worker_id);
    workcmd->add_option("--hello-period", hello_period);
    workcmd->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (stats->parsed()) return cmd_stats(yal_path, out_path);
        if (place->parsed()) {
            apply_config(place_opts, flags);
            return cmd_place(yal_path, flags, out_path);
        }
        if (squeeze->parsed()) {
            apply_config(squeeze_opts, flags);
            return cmd_squeeze(layout_path, yal_path, flags, out_path);
        }
        if (wl->parsed()) return cmd_wirelength(yal_path, layout_path, die_height, per_net, out_path);
        if (pipeline->parsed()) {
            apply_config(pipeline_opts, flags);
            return cmd_pipeline(yal_path, flags, out_path, svg_path);
        }
        if (bench->parsed()) {
            apply_config(bench_opts, flags);
            return cmd_bench(bench_paths, flags, out_path);
        }
        if (render->parsed()) return cmd_render(layout_path, svg_path);
        if (serve->parsed()) {
            apply_config(serve_opts, flags);
            return cmd_serve(yal_path, flags, port, hello_period, timeout, inline_netlist,
                             embed_worker, out_path);
        }
        if (workcmd->parsed()) return cmd_work(server, worker_id, hello_period, out_path);
    } catch (const fp3d::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kUsage;
}
