#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lstgrid/calibration.hpp"
#include "lstgrid/classified.hpp"
#include "lstgrid/classifier.hpp"
#include "lstgrid/indices.hpp"
#include "lstgrid/lst.hpp"
#include "lstgrid/raster.hpp"

namespace lstgrid::engine {

/// Tile kernels. Values are the wire op codes.
enum class OpCode : std::uint8_t {
    Identity = 0,
    Histogram = 1,
    Calibrate = 2,
    Ndvi = 3,
    Emissivity = 4,
    LstMap = 5,
    ClassifyMap = 6,
};

std::string_view to_string(OpCode op);

struct IdentityParams {};

struct HistogramParams {
    std::int32_t max_dn = 255;
};

/// DN -> radiance or clamped reflectance.
struct CalibrateParams {
    enum class Output : std::uint8_t { Radiance = 0, Reflectance = 1 };
    Output output = Output::Radiance;
    ReflectanceModel model;
};

/// Red DN, NIR DN -> NDVI of (clamped) reflectances.
struct NdviParams {
    ReflectanceModel red;
    ReflectanceModel nir;
};

/// NDVI -> emissivity.
struct EmissivityParams {
    EmissivityConfig config;
};

/// Thermal DN, NDVI -> LST (deg C).
struct LstMapParams {
    PsiCoefficients psi;
    double gain = 1.0;
    double bias = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
    double lambda_um = 0.0;
    EmissivityConfig emissivity;

    static LstMapParams from(const PsiCoefficients& psi, const BandCalibration& cal,
                             const EmissivityConfig& cfg);
    BandCalibration calibration() const;
};

struct ClassifyParams {
    std::size_t bands = 0;
    std::vector<ClassSignature> signatures;
};

/// Alternative index matches OpCode.
using OpParams = std::variant<IdentityParams, HistogramParams, CalibrateParams, NdviParams,
                              EmissivityParams, LstMapParams, ClassifyParams>;

OpCode op_code(const OpParams& params) noexcept;

/// Number of input bands the op consumes.
std::size_t band_count(const OpParams& params);

struct RasterPayload {
    RasterGrid grid;
    std::uint64_t flagged = 0; // e.g. clamped reflectance pixels
    friend bool operator==(const RasterPayload&, const RasterPayload&) = default;
};

using OpOutput = std::variant<RasterPayload, ClassifiedGrid, DnHistogram>;

/// Runs the kernel on equally-shaped input tiles. Pure; throws
/// std::invalid_argument on arity/shape problems.
OpOutput execute_op(const OpParams& params, std::span<const RasterGrid> bands);

} // namespace lstgrid::engine
