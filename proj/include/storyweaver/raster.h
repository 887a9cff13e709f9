#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace storyweaver {

// Packed 8-bit RGB pixels, row-major.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  bool empty() const { return rgb.empty(); }
};

// Decodes PNG or JPEG bytes (sniffed from the signature). Fully transparent
// PNG pixels are dropped, so the result may be shorter than width * height.
// Returns nullopt for anything else or on a decode failure.
std::optional<Raster> decode_raster(const std::vector<std::uint8_t>& bytes);
std::optional<Raster> decode_raster_file(const std::filesystem::path& path);

}  // namespace storyweaver
