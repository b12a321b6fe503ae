#pragma once

#include <string>

#include "egolearn/core.hpp"

namespace egolearn {

// 8-bit RGB PNG. Float channels are quantized with round(v*255).
void write_png(const std::string& path, const Image& img);
Image read_png(const std::string& path);

}  // namespace egolearn
