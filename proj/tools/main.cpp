// lstgrid: land-surface temperature and land-cover classification over a
// tiled worker pool.

#include <algorithm>
#include <memory>
#include <optional>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "lstgrid/compare.hpp"
#include "lstgrid/error.hpp"
#include "lstgrid/engine/net.hpp"
#include "lstgrid/engine/worker.hpp"
#include "lstgrid/io/raster_file.hpp"
#include "lstgrid/pipeline.hpp"
#include "lstgrid/synthetic.hpp"

namespace {

using namespace lstgrid;

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kFormat = 3, kTask = 4 };

struct PipelineFlags {
    PipelineRequest req;
    std::vector<std::string> bands;
    std::string workers;
    std::vector<std::string> remote;
    std::string training;
    std::string truth;
    std::string mode = "minmax";
    std::vector<std::string> class_bands;
    std::string metadata;
    std::string out;
};

void add_pipeline_flags(CLI::App& cmd, PipelineFlags& f, bool classification) {
    cmd.add_option("--metadata", f.metadata, "Scene metadata file (key = value)")->required();
    cmd.add_option("--band", f.bands, "Band input as ID=PATH (repeatable)")->required();
    cmd.add_option("--out", f.out, "Output directory")->required();
    cmd.add_option("--tag", f.req.tag, "Suffix of output file names")->capture_default_str();
    cmd.add_option("--workers", f.workers, "Local pool as local:N (default: one slot per core)");
    cmd.add_option("--worker", f.remote, "Remote worker host:port (repeatable)");
    cmd.add_flag("--static-tiling", f.req.run.static_tiling,
                 "One tile per worker slot instead of the pull queue");
    cmd.add_option("--retry", f.req.run.retry_limit, "Extra attempts per failed job")
        ->capture_default_str();
    cmd.add_option("--dos-fraction", f.req.dos_fraction, "Dark-object pixel fraction")
        ->capture_default_str();
    cmd.add_flag("--ndvi-toa", f.req.ndvi_toa, "NDVI from top-of-atmosphere reflectance");
    auto& e = f.req.emissivity;
    cmd.add_option("--ndvi-soil", e.ndvi_low, "NDVI below which soil emissivity applies")
        ->capture_default_str();
    cmd.add_option("--ndvi-veg", e.ndvi_high, "NDVI above which vegetation emissivity applies")
        ->capture_default_str();
    cmd.add_option("--eps-soil", e.eps_soil)->capture_default_str();
    cmd.add_option("--eps-veg", e.eps_veg)->capture_default_str();
    cmd.add_option("--eps-water", e.eps_water)->capture_default_str();
    if (!classification) return;
    cmd.add_option("--train", f.training, "Training regions: name row0 col0 row1 col1");
    cmd.add_option("--truth", f.truth, "Reference classified TIFF for the confusion matrix");
    cmd.add_option("--classifier-mode", f.mode, "minmax or meansigma:K")->capture_default_str();
    cmd.add_option("--class-band", f.class_bands,
                   "Classification band id (repeatable; default per sensor)");
}

PipelineRequest finish(PipelineFlags& f, Operation op) {
    auto req = f.req;
    req.operation = op;
    req.metadata = f.metadata;
    req.out_dir = f.out;
    for (const auto& b : f.bands) {
        const auto eq = b.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == b.size())
            throw UsageError("--band expects ID=PATH, got '" + b + "'");
        const auto id = b.substr(0, eq);
        if (!req.bands.emplace(id, b.substr(eq + 1)).second)
            throw UsageError("--band " + id + " given twice");
    }
    req.workers.clear();
    try {
        if (!f.workers.empty()) req.workers.push_back(engine::parse_worker(f.workers));
        for (const auto& r : f.remote) {
            auto w = engine::parse_worker(r);
            if (w.is_local()) throw UsageError("--worker expects host:port, got '" + r + "'");
            req.workers.push_back(w);
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--workers/--worker: ") + e.what());
    }
    if (req.workers.empty())
        req.workers.push_back(
            engine::WorkerDescriptor::local(std::max(1u, std::thread::hardware_concurrency())));
    if (!f.training.empty()) req.training = f.training;
    if (!f.truth.empty()) req.truth = f.truth;
    try {
        req.classifier_mode = parse_training_mode(f.mode);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--classifier-mode: ") + e.what());
    }
    req.classification_bands = f.class_bands;
    return req;
}

struct CompareFlags {
    std::string lst;
    std::optional<double> estimated;
    std::vector<std::string> stations;
    std::string overpass;
    std::string reference;
    std::string date;
    std::optional<double> w;
};

int run_compare(const CompareFlags& f) {
    Comparison c;
    c.date = f.date;
    try {
        c.overpass_hour = parse_clock(f.overpass);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--overpass: ") + e.what());
    }
    for (const auto& s : f.stations) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw UsageError("--station expects HH:MM=CELSIUS, got '" + s + "'");
        try {
            c.readings.push_back({parse_clock(s.substr(0, eq)), std::stod(s.substr(eq + 1))});
        } catch (const std::exception&) {
            throw UsageError("--station expects HH:MM=CELSIUS, got '" + s + "'");
        }
    }
    if (c.readings.size() < 2) throw UsageError("--station: at least two readings are required");
    if (!f.reference.empty()) c.reference = f.reference;
    c.water_vapour_g_cm2 = f.w;
    if (f.estimated) {
        c.estimated_mean_c = *f.estimated;
    } else if (!f.lst.empty()) {
        const auto s = stats(io::read_raster(f.lst));
        if (s.count == 0) throw FormatError(f.lst + ": no valid LST pixels");
        c.estimated_mean_c = s.mean;
    } else {
        throw UsageError("compare needs --lst FILE or --estimated VALUE");
    }
    try {
        std::cout << format_comparison(c);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--overpass: ") + e.what());
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Land-surface temperature and land-cover classification on a worker grid"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* cmd;
        Operation op;
        PipelineFlags flags;
    };
    std::vector<std::unique_ptr<Sub>> pipelines;
    auto add_pipeline = [&](const char* name, Operation op, const char* help, bool classification) {
        auto s = std::make_unique<Sub>();
        s->cmd = app.add_subcommand(name, help);
        s->op = op;
        add_pipeline_flags(*s->cmd, s->flags, classification);
        pipelines.push_back(std::move(s));
    };
    add_pipeline("calibrate", Operation::Calibrate, "DN to radiance / surface reflectance", false);
    add_pipeline("ndvi", Operation::Ndvi, "NDVI from red and NIR", false);
    add_pipeline("emissivity", Operation::Emissivity, "Land-surface emissivity from NDVI", false);
    add_pipeline("lst", Operation::Lst, "Land-surface temperature map", false);
    add_pipeline("classify", Operation::Classify, "Parallelepiped land-cover classification", true);
    add_pipeline("pipeline", Operation::Pipeline,
                 "NDVI, emissivity and LST in one pass (plus classification with --train)", true);

    CompareFlags cf;
    auto* compare = app.add_subcommand("compare", "Station vs remote-sensed mean LST");
    compare->add_option("--lst", cf.lst, "LST map (.txt, .tif or ASCII grid)");
    compare->add_option("--estimated", cf.estimated, "Remote-sensed mean LST in C");
    compare->add_option("--station", cf.stations, "Station reading HH:MM=CELSIUS (repeatable)")
        ->required();
    compare->add_option("--overpass", cf.overpass, "Local overpass time HH:MM")->required();
    compare->add_option("--reference", cf.reference, "Quoted station value at overpass (echoed)");
    compare->add_option("--date", cf.date, "Date label");
    compare->add_option("--w", cf.w, "Water vapour g/cm2 (echoed)");

    std::string listen = "0.0.0.0:7070";
    std::optional<std::size_t> exit_after;
    auto* worker = app.add_subcommand("worker", "Serve tile jobs over TCP");
    worker->add_option("--listen", listen, "Bind address host:port (port 0 picks one)")
        ->capture_default_str();
    worker->add_option("--exit-after-results", exit_after,
                       "Fault injection: drop all connections after N results");

    SyntheticSceneOptions so;
    std::string synth_out;
    std::string sensor = "TM";
    auto* synth = app.add_subcommand("synth", "Write a synthetic seven-class test scene");
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->add_option("--width", so.width)->capture_default_str();
    synth->add_option("--height", so.height)->capture_default_str();
    synth->add_option("--patch", so.patch, "Land-cover patch size in pixels")->capture_default_str();
    synth->add_option("--seed", so.seed)->capture_default_str();
    synth->add_option("--sensor", sensor, "TM or ETM+")->capture_default_str();
    synth->add_option("--water-vapour", so.water_vapour_g_cm2)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        for (auto& s : pipelines) {
            if (!s->cmd->parsed()) continue;
            run_pipeline(finish(s->flags, s->op), std::cout);
            return kOk;
        }
        if (compare->parsed()) return run_compare(cf);
        if (worker->parsed()) {
            engine::WorkerServerOptions opts;
            opts.exit_after_results = exit_after;
            engine::WorkerServer server(opts);
            engine::net::Endpoint ep;
            try {
                ep = engine::net::parse_endpoint(listen);
            } catch (const std::invalid_argument& e) {
                throw UsageError(std::string("--listen: ") + e.what());
            }
            const auto port = server.bind(ep);
            std::cout << "listening on port " << port << std::endl;
            server.serve();
            std::cout << "worker stopped after " << server.results_sent() << " results" << std::endl;
            return kOk;
        }
        if (synth->parsed()) {
            const auto parsed = parse_sensor(sensor);
            if (!parsed) throw UsageError("--sensor must be TM or ETM+, got '" + sensor + "'");
            so.sensor = *parsed;
            write_synthetic_scene(make_synthetic_scene(so), synth_out);
            std::cout << "wrote synthetic scene to " << synth_out << '\n';
            return kOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const FormatError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kFormat;
    } catch (const TaskError& e) {
        std::cerr << "task failed: " << e.what() << '\n';
        return kTask;
    } catch (const ProtocolError& e) {
        std::cerr << "worker failure: " << e.what() << '\n';
        return kTask;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}
