#include "lstgrid/engine/ops.hpp"

#include <stdexcept>
#include <string>

namespace lstgrid::engine {

std::string_view to_string(OpCode op) {
    switch (op) {
    case OpCode::Identity: return "identity";
    case OpCode::Histogram: return "histogram";
    case OpCode::Calibrate: return "calibrate";
    case OpCode::Ndvi: return "ndvi";
    case OpCode::Emissivity: return "emissivity";
    case OpCode::LstMap: return "lst_map";
    case OpCode::ClassifyMap: return "classify_map";
    }
    return "unknown";
}

LstMapParams LstMapParams::from(const PsiCoefficients& psi, const BandCalibration& cal,
                                const EmissivityConfig& cfg) {
    if (!cal.k1 || !cal.k2 || !cal.lambda_um)
        throw std::invalid_argument("lst_map: band " + cal.band_id + " needs k1, k2 and lambda_um");
    return {psi, cal.gain, cal.bias, *cal.k1, *cal.k2, *cal.lambda_um, cfg};
}

BandCalibration LstMapParams::calibration() const {
    BandCalibration cal;
    cal.band_id = "thermal";
    cal.gain = gain;
    cal.bias = bias;
    cal.k1 = k1;
    cal.k2 = k2;
    cal.lambda_um = lambda_um;
    return cal;
}

OpCode op_code(const OpParams& params) noexcept {
    return static_cast<OpCode>(params.index());
}

std::size_t band_count(const OpParams& params) {
    switch (op_code(params)) {
    case OpCode::Identity:
    case OpCode::Histogram:
    case OpCode::Calibrate:
    case OpCode::Emissivity: return 1;
    case OpCode::Ndvi:
    case OpCode::LstMap: return 2;
    case OpCode::ClassifyMap: return std::get<ClassifyParams>(params).bands;
    }
    return 0;
}

namespace {

void check_inputs(const OpParams& params, std::span<const RasterGrid> bands) {
    const std::size_t want = band_count(params);
    if (bands.size() != want)
        throw std::invalid_argument(std::string(to_string(op_code(params))) + ": expected " +
                                    std::to_string(want) + " input bands, got " +
                                    std::to_string(bands.size()));
    for (const auto& b : bands)
        if (!b.same_shape(bands.front()))
            throw std::invalid_argument(std::string(to_string(op_code(params))) +
                                        ": input band shapes differ");
}

struct Executor {
    std::span<const RasterGrid> bands;

    OpOutput operator()(const IdentityParams&) const { return RasterPayload{bands[0], 0}; }

    OpOutput operator()(const HistogramParams& p) const { return dn_histogram(bands[0], p.max_dn); }

    OpOutput operator()(const CalibrateParams& p) const {
        if (p.output == CalibrateParams::Output::Reflectance) {
            auto r = reflectance_grid(bands[0], p.model);
            return RasterPayload{std::move(r.reflectance), r.clamped_pixels};
        }
        RasterGrid out = bands[0];
        for (double& v : out.samples())
            if (!out.is_nodata(v)) v = p.model.gain * v + p.model.bias;
        return RasterPayload{std::move(out), 0};
    }

    OpOutput operator()(const NdviParams& p) const {
        auto red = reflectance_grid(bands[0], p.red);
        auto nir = reflectance_grid(bands[1], p.nir);
        return RasterPayload{ndvi(red.reflectance, nir.reflectance),
                             red.clamped_pixels + nir.clamped_pixels};
    }

    OpOutput operator()(const EmissivityParams& p) const {
        return RasterPayload{lse(bands[0], p.config), 0};
    }

    OpOutput operator()(const LstMapParams& p) const {
        return RasterPayload{lst_map(bands[0], bands[1], p.psi, p.calibration(), p.emissivity), 0};
    }

    OpOutput operator()(const ClassifyParams& p) const {
        return classify_map(bands, p.signatures);
    }
};

} // namespace

OpOutput execute_op(const OpParams& params, std::span<const RasterGrid> bands) {
    check_inputs(params, bands);
    return std::visit(Executor{bands}, params);
}

} // namespace lstgrid::engine
