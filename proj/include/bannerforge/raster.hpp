#pragma once

/// @file raster.hpp
/// 8-bit RGBA pixel grid and PNG file round-trip.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bannerforge/geometry.hpp"
#include "bannerforge/hash.hpp"

namespace bannerforge {

struct Rgba {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  std::uint8_t a = 255;
  friend constexpr bool operator==(const Rgba&, const Rgba&) = default;
};

class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, Rgba fill = {0, 0, 0, 0});

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] bool empty() const { return width_ == 0 || height_ == 0; }
  [[nodiscard]] PixelRect bounds() const { return {0, 0, width_, height_}; }

  [[nodiscard]] Rgba at(int x, int y) const;
  void set(int x, int y, Rgba c);

  /// Row-major RGBA bytes.
  [[nodiscard]] std::span<const std::uint8_t> bytes() const { return data_; }
  [[nodiscard]] std::span<std::uint8_t> bytes() { return data_; }

  [[nodiscard]] Raster crop(const PixelRect& r) const;

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Lossless RGBA PNG encoding.
[[nodiscard]] std::vector<std::uint8_t> encode_png(const Raster& raster);
/// Any PNG color type is expanded to 8-bit RGBA. Throws DataError.
[[nodiscard]] Raster decode_png(std::span<const std::uint8_t> bytes);

[[nodiscard]] Raster read_png(const std::filesystem::path& path);
/// Writes via a temporary file and rename so a failed write never leaves a
/// truncated image behind.
void write_png(const std::filesystem::path& path, const Raster& raster);

/// Replace `path` atomically with `contents`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> contents);
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);

}  // namespace bannerforge
