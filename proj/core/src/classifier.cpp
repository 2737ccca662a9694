#include "lstgrid/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lstgrid/error.hpp"
#include "text_util.hpp"

namespace lstgrid {

bool ClassSignature::contains(std::span<const double> values) const noexcept {
    if (values.size() != intervals.size()) return false;
    for (std::size_t b = 0; b < values.size(); ++b)
        if (!intervals[b].contains(values[b])) return false;
    return true;
}

TrainingMode parse_training_mode(std::string_view text) {
    const std::string t = detail::lower(detail::trim(text));
    if (t == "minmax") return TrainingMode::min_max();
    if (t.rfind("meansigma", 0) == 0) {
        if (t == "meansigma") return TrainingMode::mean_sigma();
        if (t.size() > 10 && t[9] == ':') {
            const auto k = detail::parse_double(std::string_view(t).substr(10));
            if (k && *k > 0.0) return TrainingMode::mean_sigma(*k);
        }
    }
    throw std::invalid_argument("classifier mode must be minmax or meansigma:K (K > 0), got '" +
                                std::string(text) + "'");
}

namespace {

void check_bands(std::span<const RasterGrid> bands) {
    if (bands.empty()) throw std::invalid_argument("classifier: no input bands");
    for (const auto& b : bands)
        if (!b.same_shape(bands.front()))
            throw std::invalid_argument("classifier: band shapes differ");
}

} // namespace

ClassSignature train_class(std::span<const RasterGrid> bands,
                           std::span<const TrainingRegion> regions, TrainingMode mode) {
    check_bands(bands);
    if (regions.empty()) throw std::invalid_argument("train_class: no regions");
    const auto& name = regions.front().class_name;
    const std::size_t width = bands.front().width();
    const std::size_t height = bands.front().height();

    struct Acc {
        std::size_t n = 0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        double mean = 0.0;
        double m2 = 0.0; // Welford
    };
    std::vector<Acc> acc(bands.size());

    for (const auto& region : regions) {
        if (region.class_name != name)
            throw std::invalid_argument("train_class: regions name different classes");
        if (region.row0 > region.row1 || region.col0 > region.col1)
            throw std::invalid_argument("train_class: empty rectangle for class " + name);
        if (region.row1 >= height || region.col1 >= width)
            throw std::invalid_argument("train_class: rectangle for class " + name +
                                        " exceeds image bounds");
        for (std::size_t r = region.row0; r <= region.row1; ++r) {
            for (std::size_t c = region.col0; c <= region.col1; ++c) {
                // A pixel trains the class only if every band is valid there.
                bool valid = true;
                for (const auto& b : bands)
                    if (b.is_nodata(b.samples()[r * width + c])) valid = false;
                if (!valid) continue;
                for (std::size_t k = 0; k < bands.size(); ++k) {
                    const double v = bands[k].samples()[r * width + c];
                    auto& a = acc[k];
                    ++a.n;
                    a.lo = std::min(a.lo, v);
                    a.hi = std::max(a.hi, v);
                    const double d = v - a.mean;
                    a.mean += d / static_cast<double>(a.n);
                    a.m2 += d * (v - a.mean);
                }
            }
        }
    }
    if (acc.front().n == 0)
        throw std::invalid_argument("train_class: no valid pixels for class " + name);

    ClassSignature sig{name, {}};
    for (const auto& a : acc) {
        if (mode.kind == TrainingMode::Kind::MinMax) {
            sig.intervals.push_back({a.lo, a.hi});
        } else {
            const double sigma = std::sqrt(a.m2 / static_cast<double>(a.n));
            sig.intervals.push_back({a.mean - mode.k * sigma, a.mean + mode.k * sigma});
        }
    }
    return sig;
}

ClassSignature train_class(std::span<const RasterGrid> bands, const TrainingRegion& region,
                           TrainingMode mode) {
    return train_class(bands, std::span<const TrainingRegion>(&region, 1), mode);
}

std::vector<ClassSignature> train_classes(std::span<const RasterGrid> bands,
                                          std::span<const TrainingRegion> regions,
                                          TrainingMode mode) {
    std::vector<std::string> order;
    for (const auto& r : regions)
        if (std::find(order.begin(), order.end(), r.class_name) == order.end())
            order.push_back(r.class_name);
    if (order.size() > 255) throw std::invalid_argument("classifier: at most 255 classes");
    std::vector<ClassSignature> out;
    for (const auto& name : order) {
        std::vector<TrainingRegion> mine;
        for (const auto& r : regions)
            if (r.class_name == name) mine.push_back(r);
        out.push_back(train_class(bands, mine, mode));
    }
    return out;
}

std::uint8_t classify_pixel(std::span<const double> values,
                            std::span<const ClassSignature> signatures) {
    if (signatures.size() > 255) throw std::invalid_argument("classifier: at most 255 classes");
    for (std::size_t k = 0; k < signatures.size(); ++k) {
        if (signatures[k].intervals.size() != values.size())
            throw std::invalid_argument("classify: signature '" + signatures[k].class_name +
                                        "' has " + std::to_string(signatures[k].intervals.size()) +
                                        " bands, pixel has " + std::to_string(values.size()));
        if (signatures[k].contains(values)) return static_cast<std::uint8_t>(k + 1);
    }
    return kUnclassified;
}

ClassifiedGrid classify_map(std::span<const RasterGrid> bands,
                            std::span<const ClassSignature> signatures) {
    check_bands(bands);
    std::vector<std::string> legend;
    for (const auto& s : signatures) {
        if (s.intervals.size() != bands.size())
            throw std::invalid_argument("classify: signature '" + s.class_name + "' has " +
                                        std::to_string(s.intervals.size()) + " bands, image has " +
                                        std::to_string(bands.size()));
        legend.push_back(s.class_name);
    }
    ClassifiedGrid out(bands.front().width(), bands.front().height(), std::move(legend));
    std::vector<double> px(bands.size());
    for (std::size_t i = 0; i < out.labels.size(); ++i) {
        bool valid = true;
        for (std::size_t b = 0; b < bands.size(); ++b) {
            px[b] = bands[b].samples()[i];
            if (bands[b].is_nodata(px[b])) valid = false;
        }
        out.labels[i] = valid ? classify_pixel(px, signatures) : kUnclassified;
    }
    return out;
}

ConfusionMatrix::ConfusionMatrix(std::size_t classes)
    : classes_(classes), counts_((classes + 1) * (classes + 1), 0) {}

std::uint64_t ConfusionMatrix::at(std::size_t truth, std::size_t predicted) const {
    if (truth > classes_ || predicted > classes_) throw std::out_of_range("confusion index");
    return counts_[truth * (classes_ + 1) + predicted];
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::uint64_t n) {
    if (truth > classes_ || predicted > classes_) throw std::out_of_range("confusion index");
    counts_[truth * (classes_ + 1) + predicted] += n;
}

std::uint64_t ConfusionMatrix::total() const noexcept {
    std::uint64_t t = 0;
    for (auto c : counts_) t += c;
    return t;
}

std::uint64_t ConfusionMatrix::trace() const noexcept {
    std::uint64_t t = 0;
    for (std::size_t k = 1; k <= classes_; ++k) t += counts_[k * (classes_ + 1) + k];
    return t;
}

double ConfusionMatrix::overall_accuracy() const noexcept {
    const auto n = total();
    return n == 0 ? 0.0 : static_cast<double>(trace()) / static_cast<double>(n);
}

ConfusionMatrix confusion_matrix(const ClassifiedGrid& predicted, const ClassifiedGrid& truth) {
    if (predicted.width != truth.width || predicted.height != truth.height)
        throw std::invalid_argument("confusion matrix: shapes differ");
    std::size_t classes = std::max(predicted.legend.size(), truth.legend.size());
    for (auto l : predicted.labels) classes = std::max<std::size_t>(classes, l);
    for (auto l : truth.labels) classes = std::max<std::size_t>(classes, l);
    ConfusionMatrix m(classes);
    for (std::size_t i = 0; i < truth.labels.size(); ++i) {
        if (truth.labels[i] == kUnclassified) continue;
        m.add(truth.labels[i], predicted.labels[i]);
    }
    return m;
}

std::string format_confusion_report(const ConfusionMatrix& m, std::span<const std::string> legend) {
    auto name = [&](std::size_t k) -> std::string {
        if (k == 0) return "unclassified";
        if (k - 1 < legend.size()) return legend[k - 1];
        return "class_" + std::to_string(k);
    };
    std::ostringstream out;
    out << "# confusion matrix: rows = truth, columns = predicted (0 = unclassified)\n";
    out << std::setw(16) << "truth\\pred";
    for (std::size_t p = 0; p <= m.classes(); ++p) out << ' ' << std::setw(10) << p;
    out << '\n';
    for (std::size_t t = 1; t <= m.classes(); ++t) {
        out << std::setw(16) << name(t).substr(0, 16);
        for (std::size_t p = 0; p <= m.classes(); ++p) out << ' ' << std::setw(10) << m.at(t, p);
        out << '\n';
    }
    out << "evaluated_pixels " << m.total() << '\n';
    out << "correct_pixels " << m.trace() << '\n';
    out << "overall_accuracy " << std::fixed << std::setprecision(4) << m.overall_accuracy() << '\n';
    return out.str();
}

std::vector<TrainingRegion> parse_training_regions(std::string_view text, std::string_view source) {
    const std::string src(source);
    std::vector<TrainingRegion> out;
    detail::for_each_line(text, [&](std::size_t line_no, std::string_view raw) {
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        const auto words = detail::split_ws(line);
        if (words.empty()) return;
        auto fail = [&](const std::string& msg) {
            throw FormatError(src + ":" + std::to_string(line_no) + ": " + msg);
        };
        if (words.size() != 5) fail("expected 'class_name row0 col0 row1 col1'");
        TrainingRegion r;
        r.class_name = std::string(words[0]);
        std::size_t* fields[] = {&r.row0, &r.col0, &r.row1, &r.col1};
        for (int i = 0; i < 4; ++i) {
            const auto v = detail::parse_int<std::size_t>(words[i + 1]);
            if (!v) fail("bad pixel coordinate '" + std::string(words[i + 1]) + "'");
            *fields[i] = *v;
        }
        if (r.row0 > r.row1 || r.col0 > r.col1) fail("empty rectangle (row0 > row1 or col0 > col1)");
        out.push_back(std::move(r));
    });
    return out;
}

std::vector<TrainingRegion> read_training_regions(const std::filesystem::path& path) {
    return parse_training_regions(detail::read_file(path.string()), path.string());
}

std::string format_signatures(std::span<const ClassSignature> signatures) {
    std::ostringstream out;
    char buf[64];
    auto num = [&](double v) {
        const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
        return std::string(buf, res.ptr);
    };
    for (std::size_t k = 0; k < signatures.size(); ++k) {
        if (k) out << '\n';
        out << "[class " << signatures[k].class_name << "]\n";
        for (std::size_t b = 0; b < signatures[k].intervals.size(); ++b) {
            const auto& iv = signatures[k].intervals[b];
            out << "band_" << b << " = " << num(iv.lo) << ' ' << num(iv.hi) << '\n';
        }
    }
    return out.str();
}

std::vector<ClassSignature> parse_signatures(std::string_view text, std::string_view source) {
    const std::string src(source);
    std::vector<ClassSignature> out;
    detail::for_each_line(text, [&](std::size_t line_no, std::string_view raw) {
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) return;
        auto fail = [&](const std::string& msg) {
            throw FormatError(src + ":" + std::to_string(line_no) + ": " + msg);
        };
        if (line.front() == '[') {
            const auto inner = line.back() == ']' ? detail::trim(line.substr(1, line.size() - 2))
                                                  : std::string_view{};
            if (inner.rfind("class", 0) != 0 || inner.size() < 7 || !std::isspace(static_cast<unsigned char>(inner[5])))
                fail("expected [class <name>]");
            out.push_back({std::string(detail::trim(inner.substr(6))), {}});
            return;
        }
        if (out.empty()) fail("band entry before any [class] section");
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail("expected band_<i> = lo hi");
        const auto key = detail::trim(line.substr(0, eq));
        const auto idx = key.rfind("band_", 0) == 0 ? detail::parse_int<std::size_t>(key.substr(5))
                                                    : std::nullopt;
        if (!idx || *idx != out.back().intervals.size())
            fail("expected key band_" + std::to_string(out.back().intervals.size()));
        const auto words = detail::split_ws(line.substr(eq + 1));
        if (words.size() != 2) fail("expected two bounds");
        const auto lo = detail::parse_double(words[0]);
        const auto hi = detail::parse_double(words[1]);
        if (!lo || !hi) fail("unparsable bound");
        if (*lo > *hi) fail("lo > hi");
        out.back().intervals.push_back({*lo, *hi});
    });
    return out;
}

} // namespace lstgrid
