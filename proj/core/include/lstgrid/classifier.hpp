#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lstgrid/classified.hpp"
#include "lstgrid/raster.hpp"

namespace lstgrid {

/// Inclusive pixel rectangle of known land cover.
struct TrainingRegion {
    std::string class_name;
    std::size_t row0 = 0;
    std::size_t col0 = 0;
    std::size_t row1 = 0;
    std::size_t col1 = 0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const noexcept { return lo <= v && v <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// One closed interval per classification band (the "box").
struct ClassSignature {
    std::string class_name;
    std::vector<Interval> intervals;

    bool contains(std::span<const double> values) const noexcept;
    friend bool operator==(const ClassSignature&, const ClassSignature&) = default;
};

struct TrainingMode {
    enum class Kind { MinMax, MeanSigma };
    Kind kind = Kind::MinMax;
    double k = 2.0;

    static TrainingMode min_max() { return {}; }
    static TrainingMode mean_sigma(double k = 2.0) { return {Kind::MeanSigma, k}; }
};

/// Parses `minmax` or `meansigma:K` (K optional, default 2).
TrainingMode parse_training_mode(std::string_view text);

/// Pools the valid pixels of every region (all must name the same class) and
/// derives one interval per band. mean_sigma uses the population sigma.
/// Throws std::invalid_argument for out-of-bounds or fully-nodata regions.
ClassSignature train_class(std::span<const RasterGrid> bands,
                           std::span<const TrainingRegion> regions, TrainingMode mode = {});
ClassSignature train_class(std::span<const RasterGrid> bands, const TrainingRegion& region,
                           TrainingMode mode = {});

/// One signature per distinct class name, in order of first appearance.
std::vector<ClassSignature> train_classes(std::span<const RasterGrid> bands,
                                          std::span<const TrainingRegion> regions,
                                          TrainingMode mode = {});

/// 1-based index of the first signature (training order) whose box contains
/// the pixel, 0 when none does. Overlapping boxes resolve to the earlier class.
std::uint8_t classify_pixel(std::span<const double> values,
                            std::span<const ClassSignature> signatures);

/// Pixel-wise classify_pixel; nodata in any band -> unclassified.
ClassifiedGrid classify_map(std::span<const RasterGrid> bands,
                            std::span<const ClassSignature> signatures);

/// Rows = truth label, columns = predicted label, both 0..classes.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t classes);

    std::size_t classes() const noexcept { return classes_; }
    std::uint64_t at(std::size_t truth, std::size_t predicted) const;
    void add(std::size_t truth, std::size_t predicted, std::uint64_t n = 1);

    std::uint64_t total() const noexcept;
    std::uint64_t trace() const noexcept;
    /// trace / total, 0 when nothing was evaluated.
    double overall_accuracy() const noexcept;

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
    std::size_t classes_;
    std::vector<std::uint64_t> counts_;
};

/// Pixels that are unclassified in `truth` are skipped.
ConfusionMatrix confusion_matrix(const ClassifiedGrid& predicted, const ClassifiedGrid& truth);

std::string format_confusion_report(const ConfusionMatrix& m,
                                    std::span<const std::string> legend);

/// `class_name row0 col0 row1 col1` per line, `#` comments allowed.
std::vector<TrainingRegion> parse_training_regions(std::string_view text,
                                                   std::string_view source = "<training>");
std::vector<TrainingRegion> read_training_regions(const std::filesystem::path& path);

/// key = value form, one `[class <name>]` section per signature with
/// `band_<i> = lo hi` entries.
std::string format_signatures(std::span<const ClassSignature> signatures);
std::vector<ClassSignature> parse_signatures(std::string_view text,
                                             std::string_view source = "<signatures>");

} // namespace lstgrid
