#include "lstgrid/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>

#include "json.hpp"

#include "lstgrid/error.hpp"
#include "lstgrid/io/lst_text.hpp"
#include "lstgrid/io/raster_file.hpp"
#include "lstgrid/io/tiff.hpp"
#include "lstgrid/lst.hpp"
#include "lstgrid/scene.hpp"

namespace lstgrid {

namespace {

namespace fs = std::filesystem;
using engine::OpOutput;
using engine::RasterPayload;
using engine::Task;

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

class Runner {
public:
    Runner(const PipelineRequest& req, std::ostream& log) : req_(req), log_(log) {}

    PipelineResult run();

private:
    std::vector<std::string> required_bands() const;
    void load();
    const RasterGrid& band(const std::string& id) const { return bands_.at(id); }

    OpOutput execute(engine::OpParams params, std::vector<const RasterGrid*> inputs);
    RasterPayload raster(engine::OpParams params, std::vector<const RasterGrid*> inputs) {
        return std::get<RasterPayload>(execute(std::move(params), std::move(inputs)));
    }

    AtmosphericCorrection correction(const std::string& id);
    ReflectanceModel reflectance_model(const std::string& id);

    void calibrate();
    RasterGrid ndvi();
    RasterGrid emissivity(const RasterGrid& ndvi_grid);
    void lst(const RasterGrid& ndvi_grid);
    void classify();

    fs::path out(const std::string& stem, const std::string& ext) const {
        return req_.out_dir / (stem + "_" + req_.tag + ext);
    }
    void record(const fs::path& path);
    void write_manifest();

    const PipelineRequest& req_;
    std::ostream& log_;
    SceneMetadata meta_;
    DefaultBands defaults_;
    std::map<std::string, RasterGrid> bands_;
    PipelineResult result_;
};

std::vector<std::string> Runner::required_bands() const {
    std::vector<std::string> ids;
    auto add = [&](const std::string& id) {
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    };
    const auto classification = req_.classification_bands.empty() ? defaults_.classification
                                                                   : req_.classification_bands;
    switch (req_.operation) {
    case Operation::Calibrate:
        for (const auto& [id, _] : req_.bands) add(id);
        break;
    case Operation::Ndvi:
    case Operation::Emissivity:
        add(defaults_.red);
        add(defaults_.nir);
        break;
    case Operation::Lst:
        add(defaults_.red);
        add(defaults_.nir);
        add(defaults_.thermal);
        break;
    case Operation::Pipeline:
        add(defaults_.red);
        add(defaults_.nir);
        add(defaults_.thermal);
        if (req_.training)
            for (const auto& id : classification) add(id);
        break;
    case Operation::Classify:
        for (const auto& id : classification) add(id);
        break;
    }
    return ids;
}

void Runner::load() {
    if (req_.metadata.empty()) throw UsageError("--metadata is required");
    if (req_.out_dir.empty()) throw UsageError("--out is required");
    if (req_.tag.empty()) throw UsageError("--tag must not be empty");
    if (req_.workers.empty()) throw UsageError("--workers: at least one worker is required");
    for (const auto& w : req_.workers)
        if (w.capacity == 0) throw UsageError("--workers: capacity must be >= 1 for " + w.endpoint);
    if (!(req_.dos_fraction > 0.0 && req_.dos_fraction < 1.0))
        throw UsageError("--dos-fraction must be in (0, 1)");
    try {
        req_.emissivity.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("emissivity config: ") + e.what());
    }
    const bool classifying = req_.operation == Operation::Classify ||
                             (req_.operation == Operation::Pipeline && req_.training);
    if (req_.operation == Operation::Classify && !req_.training)
        throw UsageError("--train is required for classify");
    if (req_.truth && !classifying) throw UsageError("--truth needs --train");

    meta_ = read_scene_metadata(req_.metadata);
    defaults_ = default_bands(meta_.context.sensor);

    const auto ids = required_bands();
    if (ids.empty()) throw UsageError("--band: " + std::string(to_string(req_.operation)) +
                                      " needs at least one --band ID=PATH");
    for (const auto& id : ids)
        if (!req_.bands.count(id))
            throw UsageError("--band " + id + "=PATH is required for " +
                             std::string(to_string(req_.operation)));

    switch (req_.operation) {
    case Operation::Lst:
    case Operation::Pipeline: {
        const std::string thermal[] = {defaults_.thermal};
        require_metadata(meta_, MetadataNeeds::Lst, thermal);
        [[fallthrough]];
    }
    case Operation::Ndvi:
    case Operation::Emissivity: {
        const std::string vis[] = {defaults_.red, defaults_.nir};
        require_metadata(meta_, MetadataNeeds::Reflectance, vis);
        break;
    }
    default: require_metadata(meta_, MetadataNeeds::Basic, ids); break;
    }

    const RasterGrid* first = nullptr;
    std::string first_id;
    for (const auto& id : ids) {
        auto grid = io::read_raster(req_.bands.at(id));
        if (first && !first->same_shape(grid))
            throw FormatError("band " + id + " is " + std::to_string(grid.width()) + "x" +
                              std::to_string(grid.height()) + ", band " + first_id + " is " +
                              std::to_string(first->width()) + "x" +
                              std::to_string(first->height()));
        auto [it, _] = bands_.emplace(id, std::move(grid));
        if (!first) {
            first = &it->second;
            first_id = id;
        }
    }
}

OpOutput Runner::execute(engine::OpParams params, std::vector<const RasterGrid*> inputs) {
    Task task(std::move(params), std::move(inputs));
    return engine::run_task(task, req_.workers, req_.run);
}

AtmosphericCorrection Runner::correction(const std::string& id) {
    if (req_.ndvi_toa) return {};
    const auto& grid = band(id);
    double max_dn = 255.0;
    for (double v : grid.samples()) {
        if (grid.is_nodata(v)) continue;
        if (!(v >= 0.0) || v != std::floor(v) || v > 65535.0)
            throw FormatError("band " + id + ": DN samples must be integers in [0, 65535]");
        max_dn = std::max(max_dn, v);
    }
    const auto hist = engine::reduce_histogram(grid, req_.workers, static_cast<int>(max_dn),
                                               req_.run);
    const auto c = dark_object_subtraction(hist, meta_.context, meta_.band(id), req_.dos_fraction);
    log_ << "band " << id << ": L_min " << fixed(c.l_min, 4) << ", L_1% " << fixed(c.l_one_percent, 4)
         << ", L_p " << fixed(c.l_path, 4) << (c.clamped ? " (clamped)" : "") << '\n';
    result_.corrections[id] = c;
    return c;
}

ReflectanceModel Runner::reflectance_model(const std::string& id) {
    const auto c = correction(id);
    return ReflectanceModel::for_band(meta_.context, meta_.band(id), c.l_path);
}

void Runner::calibrate() {
    for (const auto& [id, grid] : bands_) {
        const auto& cal = meta_.band(id);
        engine::CalibrateParams p;
        std::string stem;
        if (cal.e0) {
            p.output = engine::CalibrateParams::Output::Reflectance;
            p.model = reflectance_model(id);
            stem = "reflectance_" + id;
        } else {
            p.output = engine::CalibrateParams::Output::Radiance;
            p.model.gain = cal.gain;
            p.model.bias = cal.bias;
            stem = "radiance_" + id;
        }
        auto r = raster(p, {&grid});
        if (r.flagged) {
            log_ << "band " << id << ": " << r.flagged << " reflectance values clamped to ["
                 << kMinReflectance << ", " << kMaxReflectance << "]\n";
            result_.clamped_pixels += r.flagged;
        }
        const auto path = out(stem, ".tif");
        io::write_tiff(r.grid, path, io::TiffSampleType::Float64);
        record(path);
    }
}

RasterGrid Runner::ndvi() {
    engine::NdviParams p{reflectance_model(defaults_.red), reflectance_model(defaults_.nir)};
    auto r = raster(p, {&band(defaults_.red), &band(defaults_.nir)});
    const auto path = out("ndvi", ".tif");
    io::write_tiff(r.grid, path, io::TiffSampleType::Float32);
    record(path);
    return std::move(r.grid);
}

RasterGrid Runner::emissivity(const RasterGrid& ndvi_grid) {
    auto r = raster(engine::EmissivityParams{req_.emissivity}, {&ndvi_grid});
    const auto path = out("emissivity", ".tif");
    io::write_tiff(r.grid, path, io::TiffSampleType::Float32);
    record(path);
    return std::move(r.grid);
}

void Runner::lst(const RasterGrid& ndvi_grid) {
    const auto& cal = meta_.band(defaults_.thermal);
    const auto coeffs = psi(*meta_.context.water_vapour_g_cm2);
    const auto params = engine::LstMapParams::from(coeffs, cal, req_.emissivity);
    auto r = raster(params, {&band(defaults_.thermal), &ndvi_grid});

    const auto txt = out("lst", ".txt");
    io::write_lst_text(r.grid, txt);
    record(txt);
    const auto tif = out("lst", ".tif");
    io::write_tiff(r.grid, tif, io::TiffSampleType::Float32);
    record(tif);

    const auto s = stats(r.grid);
    result_.lst_stats = s;
    if (s.count == 0) {
        log_ << "LST: no valid pixels\n";
        return;
    }
    log_ << "LST (C): mean " << fixed(s.mean) << ", min " << fixed(s.min) << ", max "
         << fixed(s.max) << ", stddev " << fixed(s.stddev) << ", pixels " << s.count << '\n';
}

void Runner::classify() {
    const auto ids = req_.classification_bands.empty() ? defaults_.classification
                                                        : req_.classification_bands;
    std::vector<RasterGrid> inputs;
    std::vector<const RasterGrid*> refs;
    for (const auto& id : ids) {
        inputs.push_back(band(id));
        refs.push_back(&band(id));
    }
    const auto regions = read_training_regions(*req_.training);
    std::vector<ClassSignature> signatures;
    try {
        signatures = train_classes(inputs, regions, req_.classifier_mode);
    } catch (const std::invalid_argument& e) {
        throw FormatError(req_.training->string() + ": " + e.what());
    }
    if (signatures.size() > 255) throw FormatError("more than 255 training classes");

    const auto sig_path = out("signatures", ".txt");
    {
        std::ofstream f(sig_path, std::ios::binary);
        f << format_signatures(signatures);
        if (!f) throw FormatError("cannot write " + sig_path.string());
    }
    record(sig_path);

    engine::ClassifyParams p{ids.size(), signatures};
    auto labels = std::get<ClassifiedGrid>(execute(std::move(p), refs));
    const auto map_path = out("classified", ".tif");
    io::write_tiff(labels, map_path);
    record(map_path);

    std::size_t unclassified = std::count(labels.labels.begin(), labels.labels.end(), kUnclassified);
    log_ << "classified " << labels.labels.size() - unclassified << " of " << labels.labels.size()
         << " pixels into " << signatures.size() << " classes\n";

    if (!req_.truth) return;
    auto truth = io::read_classified_tiff(*req_.truth);
    if (truth.width != labels.width || truth.height != labels.height)
        throw FormatError("--truth: " + req_.truth->string() + " does not match the band shape");
    const auto cm = confusion_matrix(labels, truth);
    result_.overall_accuracy = cm.overall_accuracy();
    const auto report_path = out("confusion", ".txt");
    {
        std::ofstream f(report_path, std::ios::binary);
        f << format_confusion_report(cm, labels.legend);
        if (!f) throw FormatError("cannot write " + report_path.string());
    }
    record(report_path);
    log_ << "overall accuracy " << fixed(cm.overall_accuracy(), 4) << " (" << cm.trace() << "/"
         << cm.total() << ")\n";
}

void Runner::record(const fs::path& path) {
    result_.outputs.push_back(
        {path.filename().string(), fs::file_size(path), sha256_file(path)});
    log_ << "wrote " << path.string() << '\n';
}

void Runner::write_manifest() {
    nlohmann::ordered_json j;
    j["tag"] = req_.tag;
    j["operation"] = std::string(to_string(req_.operation));
    auto& files = j["files"] = nlohmann::ordered_json::array();
    for (const auto& f : result_.outputs)
        files.push_back({{"name", f.name}, {"bytes", f.bytes}, {"sha256", f.sha256}});
    std::ofstream out(req_.out_dir / "manifest.json", std::ios::binary);
    out << j.dump(2) << '\n';
    if (!out) throw FormatError("cannot write manifest.json");
}

PipelineResult Runner::run() {
    load();
    fs::create_directories(req_.out_dir);
    switch (req_.operation) {
    case Operation::Calibrate: calibrate(); break;
    case Operation::Ndvi: ndvi(); break;
    case Operation::Emissivity: emissivity(ndvi()); break;
    case Operation::Lst: lst(ndvi()); break;
    case Operation::Pipeline: {
        const auto n = ndvi();
        emissivity(n);
        lst(n);
        if (req_.training) classify();
        break;
    }
    case Operation::Classify: classify(); break;
    }
    write_manifest();
    return std::move(result_);
}

} // namespace

std::string_view to_string(Operation op) {
    switch (op) {
    case Operation::Calibrate: return "calibrate";
    case Operation::Ndvi: return "ndvi";
    case Operation::Emissivity: return "emissivity";
    case Operation::Lst: return "lst";
    case Operation::Classify: return "classify";
    case Operation::Pipeline: return "pipeline";
    }
    return "?";
}

Operation parse_operation(std::string_view name) {
    for (auto op : {Operation::Calibrate, Operation::Ndvi, Operation::Emissivity, Operation::Lst,
                    Operation::Classify, Operation::Pipeline})
        if (name == to_string(op)) return op;
    throw UsageError("unknown operation '" + std::string(name) + "'");
}

PipelineResult run_pipeline(const PipelineRequest& req, std::ostream& log) {
    return Runner(req, log).run();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256: digest init failed");
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

} // namespace lstgrid
