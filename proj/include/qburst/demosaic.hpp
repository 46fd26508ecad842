#pragma once

#include "qburst/bayer.hpp"
#include "qburst/image.hpp"

namespace qburst {

enum class DemosaicMethod { Bilinear, MalvarHeCutler };

/// Full RGB from a one-channel CFA image.
///
/// Bilinear: each missing channel is the mean of the same-channel samples in
/// the 3x3 neighbourhood (in-bounds only); native samples are kept as is.
/// MalvarHeCutler: gradient-corrected 5x5 kernels with mirrored borders.
Image demosaic(const Image& cfa, BayerPattern pattern,
               DemosaicMethod method = DemosaicMethod::Bilinear);

}  // namespace qburst
