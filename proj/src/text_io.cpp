#include "gaitsom/text_io.hpp"

#include "gaitsom/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace gaitsom {

std::string format_double(double value) {
  if (value == 0.0) return "0";  // folds -0 into 0
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw ArgumentError("cannot format number");
  return std::string(buf.data(), end);
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string_view trim(std::string_view text) {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = text.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(ws);
  return text.substr(first, last - first + 1);
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

void write_pgm(std::ostream& out, const Matrix& m) {
  if (m.rows == 0 || m.cols == 0) throw ArgumentError("cannot write an empty image");
  const auto [lo_it, hi_it] = std::minmax_element(m.data.begin(), m.data.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  out << "P5\n" << m.cols << ' ' << m.rows << "\n255\n";
  std::vector<char> bytes(m.data.size());
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    const double v = range > 0.0 ? (m.data[i] - lo) / range : 0.0;
    bytes[i] = static_cast<char>(static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_pgm(const std::filesystem::path& path, const Matrix& m) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot open " + path.string() + " for writing");
  write_pgm(out, m);
}

GrayImage read_pgm(std::istream& in) {
  std::string magic;
  GrayImage img;
  int maxval = 0;
  in >> magic >> img.width >> img.height >> maxval;
  if (!in || magic != "P5" || maxval != 255) throw ParseError("not an 8-bit P5 image");
  in.get();
  img.pixels.resize(img.width * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (!in) throw ParseError("truncated PGM data");
  return img;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gaitsom
