#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sjhdr/tensor.hpp"

namespace sjhdr::io {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p);
void write_bytes(const std::filesystem::path& p, const void* data, std::size_t n);

std::string read_text(const std::filesystem::path& p);
void write_text(const std::filesystem::path& p, const std::string& s);

// Raw little-endian float32 pixel/parameter blobs.
void write_f32(const std::filesystem::path& p, const float* data, std::size_t n);
std::vector<float> read_f32(const std::filesystem::path& p, std::size_t expected_count,
                            const std::string& what);

// Raw float64 blobs (optimizer state in checkpoints).
void write_f64(const std::filesystem::path& p, const double* data, std::size_t n);
std::vector<double> read_f64(const std::filesystem::path& p, std::size_t expected_count,
                             const std::string& what);

// FNV-1a 64-bit; used to detect container corruption.
std::uint64_t fnv1a(const void* data, std::size_t n);
std::uint64_t fnv1a_file(const std::filesystem::path& p);

// 8-bit binary PPM preview of a {3,H,W} tensor with values in [0,1].
void write_ppm(const std::filesystem::path& p, const Tensor& rgb);

}  // namespace sjhdr::io
