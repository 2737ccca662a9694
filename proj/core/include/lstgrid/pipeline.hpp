#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lstgrid/calibration.hpp"
#include "lstgrid/classifier.hpp"
#include "lstgrid/engine/scheduler.hpp"
#include "lstgrid/indices.hpp"
#include "lstgrid/raster.hpp"

namespace lstgrid {

enum class Operation { Calibrate, Ndvi, Emissivity, Lst, Classify, Pipeline };

std::string_view to_string(Operation op);
/// Throws UsageError for unknown names.
Operation parse_operation(std::string_view name);

struct PipelineRequest {
    Operation operation = Operation::Pipeline;
    std::map<std::string, std::filesystem::path> bands; // band id -> file
    std::filesystem::path metadata;
    std::filesystem::path out_dir;
    std::string tag = "scene";

    std::vector<engine::WorkerDescriptor> workers{engine::WorkerDescriptor::local(1)};
    engine::RunOptions run;

    double dos_fraction = kDefaultDosFraction;
    /// NDVI from top-of-atmosphere reflectance (no path radiance removal).
    bool ndvi_toa = false;
    EmissivityConfig emissivity;

    std::optional<std::filesystem::path> training;
    std::optional<std::filesystem::path> truth;
    TrainingMode classifier_mode;
    /// Empty: the sensor's default classification bands.
    std::vector<std::string> classification_bands;
};

struct OutputFile {
    std::string name;
    std::uintmax_t bytes = 0;
    std::string sha256;
};

struct PipelineResult {
    std::vector<OutputFile> outputs; // manifest.json excluded
    std::map<std::string, AtmosphericCorrection> corrections;
    std::optional<GridStats> lst_stats;
    std::optional<double> overall_accuracy;
    std::size_t clamped_pixels = 0;
};

/// Runs the operation and writes its files plus manifest.json into out_dir.
/// Configuration problems throw UsageError naming the flag or key at fault,
/// bad inputs FormatError, execution failures TaskError. Progress lines go
/// to `log`.
PipelineResult run_pipeline(const PipelineRequest& req, std::ostream& log);

/// Lowercase hex SHA-256 of a file.
std::string sha256_file(const std::filesystem::path& path);

} // namespace lstgrid
