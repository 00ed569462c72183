#pragma once

#include <string>

#include "posefuse/image.hpp"

namespace posefuse {

/// 8-bit PNG to [0, 1] samples (v / 255). Gray inputs load as 1 channel,
/// everything else as RGB; alpha is dropped. Throws IoError.
Image read_png(const std::string& path);

/// Writes round(v * 255) as 8-bit gray or RGB. Throws IoError.
void write_png(const Image& img, const std::string& path);

}  // namespace posefuse
