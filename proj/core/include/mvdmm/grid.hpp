#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace mvdmm {

/// Dense row-major 2D grid with a top-left origin.
template <typename T>
struct Grid {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(std::size_t w, std::size_t h, T fill = T{}) : width(w), height(h), data(w * h, fill) {}

  T& operator()(std::size_t x, std::size_t y) { return data[y * width + x]; }
  const T& operator()(std::size_t x, std::size_t y) const { return data[y * width + x]; }

  [[nodiscard]] std::size_t size() const { return data.size(); }
  [[nodiscard]] bool empty() const { return data.empty(); }
  [[nodiscard]] bool same_shape(const Grid& other) const {
    return width == other.width && height == other.height;
  }

  friend bool operator==(const Grid&, const Grid&) = default;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

using ScalarGrid = Grid<double>;
using ColorImage = Grid<Rgb>;

}  // namespace mvdmm
