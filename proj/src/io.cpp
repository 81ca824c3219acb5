#include "sjhdr/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace sjhdr::io {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw ParseError("cannot open " + p.string());
  f.seekg(0, std::ios::end);
  const std::streamoff n = f.tellg();
  f.seekg(0);
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(n));
  if (n > 0) f.read(reinterpret_cast<char*>(buf.data()), n);
  if (!f) throw ParseError("short read on " + p.string());
  return buf;
}

void write_bytes(const std::filesystem::path& p, const void* data, std::size_t n) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + p.string());
  f.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!f) throw DataError("write failed on " + p.string());
}

std::string read_text(const std::filesystem::path& p) {
  auto b = read_bytes(p);
  return std::string(b.begin(), b.end());
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  write_bytes(p, s.data(), s.size());
}

void write_f32(const std::filesystem::path& p, const float* data, std::size_t n) {
  static_assert(sizeof(float) == 4);
  write_bytes(p, data, n * 4);
}

std::vector<float> read_f32(const std::filesystem::path& p, std::size_t expected_count,
                            const std::string& what) {
  auto bytes = read_bytes(p);
  if (bytes.size() != expected_count * 4)
    throw ParseError(what + ": " + p.string() + " holds " +
                     std::to_string(bytes.size()) + " bytes, expected " +
                     std::to_string(expected_count * 4));
  std::vector<float> out(expected_count);
  std::memcpy(out.data(), bytes.data(), bytes.size());
  return out;
}

void write_f64(const std::filesystem::path& p, const double* data, std::size_t n) {
  static_assert(sizeof(double) == 8);
  write_bytes(p, data, n * 8);
}

std::vector<double> read_f64(const std::filesystem::path& p, std::size_t expected_count,
                             const std::string& what) {
  auto bytes = read_bytes(p);
  if (bytes.size() != expected_count * 8)
    throw ParseError(what + ": " + p.string() + " holds " +
                     std::to_string(bytes.size()) + " bytes, expected " +
                     std::to_string(expected_count * 8));
  std::vector<double> out(expected_count);
  std::memcpy(out.data(), bytes.data(), bytes.size());
  return out;
}

std::uint64_t fnv1a(const void* data, std::size_t n) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a_file(const std::filesystem::path& p) {
  auto b = read_bytes(p);
  return fnv1a(b.data(), b.size());
}

void write_ppm(const std::filesystem::path& p, const Tensor& rgb) {
  if (rgb.rank() != 3 || rgb.dim(0) != 3)
    throw ShapeError("PPM preview needs {3,H,W}, got " + rgb.shape_str());
  const int h = rgb.dim(1), w = rgb.dim(2);
  std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(3) * h * w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        const double v = std::min(1.0, std::max(0.0, static_cast<double>(rgb.at(c, y, x))));
        out.push_back(static_cast<char>(std::lround(v * 255.0)));
      }
  write_bytes(p, out.data(), out.size());
}

}  // namespace sjhdr::io
