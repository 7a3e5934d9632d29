#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gaitsom {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Strict parse of a whole field; std::nullopt on trailing junk or empty input.
/// NaN and infinities are parsed (callers decide whether they are allowed).
std::optional<double> parse_double(std::string_view text);

std::vector<std::string_view> split_csv_line(std::string_view line);
std::string_view trim(std::string_view text);

/// Row-major dense matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// 8-bit binary PGM (P5), min-max normalized: the smallest value maps to 0
/// (dark) and the largest to 255 (bright). A constant matrix is all black.
void write_pgm(std::ostream& out, const Matrix& m);
void write_pgm(const std::filesystem::path& path, const Matrix& m);

/// Reads back a P5 image; used by tests and tooling.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
};
GrayImage read_pgm(std::istream& in);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace gaitsom
