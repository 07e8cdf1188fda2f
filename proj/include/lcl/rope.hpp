#pragma once

#include <cstddef>
#include <vector>

namespace lcl {

struct RopeConfig {
    std::size_t head_dim = 128;  // must be even
    double base = 500000.0;      // must be > 1
};

enum class RopeScaleMethod { ExplicitBase, NtkAware, PositionInterpolation };

struct RopeScaleResult {
    RopeConfig config;            // possibly rescaled base
    double position_scale = 1.0;  // != 1 only for position interpolation
    RopeScaleMethod method = RopeScaleMethod::ExplicitBase;
};

// Per-dimension rotation frequencies f_i = base^(-2i/d), i in [0, d/2).
// Strictly decreasing, f_0 = 1.
std::vector<double> dim_frequencies(const RopeConfig& cfg);

// Wavelengths lambda_i = 2*pi / f_i. Strictly increasing, lambda_0 = 2*pi.
std::vector<double> wavelengths(const RopeConfig& cfg);

// Longest wavelength 2*pi * base^((d-2)/d); positions beyond it revisit no
// full rotation of the slowest dimension. Heuristic supported-context bound.
double max_supported_context(const RopeConfig& cfg);

// Rescale for a context extension old_ctx -> new_ctx.
//   ExplicitBase: adopt new_base verbatim.
//   NtkAware:     base' = base * s^(d/(d-2)) with s = new_ctx/old_ctx.
//   PositionInterpolation: base unchanged, position_scale = s.
// Throws ArgumentError when new_ctx < old_ctx.
RopeScaleResult scale_base_for_context(const RopeConfig& cfg, double old_ctx, double new_ctx,
                                       RopeScaleMethod method, double new_base = 0.0);

void validate(const RopeConfig& cfg);  // throws ArgumentError

}  // namespace lcl
