#include "lcl/rope.hpp"

#include <cmath>
#include <numbers>

#include "lcl/errors.hpp"

namespace lcl {

void validate(const RopeConfig& cfg) {
    if (cfg.head_dim == 0 || cfg.head_dim % 2 != 0) {
        throw ArgumentError("rope: head_dim must be a positive even integer");
    }
    if (!(cfg.base > 1.0)) {
        throw ArgumentError("rope: base must be > 1");
    }
}

std::vector<double> dim_frequencies(const RopeConfig& cfg) {
    validate(cfg);
    const double d = static_cast<double>(cfg.head_dim);
    std::vector<double> freqs(cfg.head_dim / 2);
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        freqs[i] = std::pow(cfg.base, -2.0 * static_cast<double>(i) / d);
    }
    return freqs;
}

std::vector<double> wavelengths(const RopeConfig& cfg) {
    auto freqs = dim_frequencies(cfg);
    for (auto& f : freqs) f = 2.0 * std::numbers::pi / f;
    return freqs;
}

double max_supported_context(const RopeConfig& cfg) {
    validate(cfg);
    const double d = static_cast<double>(cfg.head_dim);
    return 2.0 * std::numbers::pi * std::pow(cfg.base, (d - 2.0) / d);
}

RopeScaleResult scale_base_for_context(const RopeConfig& cfg, double old_ctx, double new_ctx,
                                       RopeScaleMethod method, double new_base) {
    validate(cfg);
    if (new_ctx < old_ctx) {
        throw ArgumentError("rope scale: new context must be >= old context");
    }
    const double s = new_ctx / old_ctx;
    RopeScaleResult res;
    res.config = cfg;
    res.method = method;
    switch (method) {
        case RopeScaleMethod::ExplicitBase:
            if (!(new_base > 1.0)) throw ArgumentError("rope scale: explicit base must be > 1");
            res.config.base = new_base;
            break;
        case RopeScaleMethod::NtkAware: {
            const double d = static_cast<double>(cfg.head_dim);
            if (cfg.head_dim == 2) throw ArgumentError("rope scale: ntk undefined for head_dim=2");
            res.config.base = cfg.base * std::pow(s, d / (d - 2.0));
            break;
        }
        case RopeScaleMethod::PositionInterpolation:
            res.position_scale = s;
            break;
    }
    return res;
}

}  // namespace lcl
