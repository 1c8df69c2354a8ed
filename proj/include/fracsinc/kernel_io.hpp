#ifndef FRACSINC_KERNEL_IO_HPP
#define FRACSINC_KERNEL_IO_HPP

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracsinc/error.hpp"
#include "fracsinc/kernel.hpp"

// Cache file layout:
//   {"magic":"FSK1","d":..,"N":..,"s":..,"oversample":..,"checksum":"<16 hex>"}\n
//   N^d little-endian IEEE-754 doubles (nonnegative octant, row-major)
// checksum = FNV-1a 64 over the payload bytes.

namespace fracsinc {

inline constexpr const char* kernel_magic = "FSK1";

inline std::uint64_t fnv1a64(const unsigned char* data, std::size_t len) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace detail {

inline std::vector<unsigned char> encode_le(const std::vector<double>& values) {
  std::vector<unsigned char> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  return bytes;
}

inline std::vector<double> decode_le(const unsigned char* bytes, std::size_t count) {
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
    values[i] = std::bit_cast<double>(bits);
  }
  return values;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace detail

inline void kernel_save(const SpectralKernel& kernel, const std::string& path) {
  const auto payload = detail::encode_le(kernel.octant());
  nlohmann::ordered_json header;
  header["magic"] = kernel_magic;
  header["d"] = kernel.dim();
  header["N"] = kernel.n();
  header["s"] = kernel.s();
  header["oversample"] = kernel.oversample();
  header["checksum"] = detail::hex64(fnv1a64(payload.data(), payload.size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open kernel file for writing: " + path);
  const std::string line = header.dump() + "\n";
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!out) throw Error(Errc::io, "failed writing kernel file: " + path);
}

inline SpectralKernel kernel_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open kernel file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::bad_header, "kernel file has no header line");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::bad_magic, "kernel file header is not FSK1 JSON");
  }
  if (!header.is_object() || !header.contains("magic") || header["magic"] != kernel_magic)
    throw Error(Errc::bad_magic, "kernel file magic mismatch");

  int d = 0, n = 0, oversample = 0;
  double s = 0.0;
  std::string checksum;
  try {
    d = header.at("d").get<int>();
    n = header.at("N").get<int>();
    s = header.at("s").get<double>();
    oversample = header.at("oversample").get<int>();
    checksum = header.at("checksum").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::bad_header, std::string("kernel file header incomplete: ") + e.what());
  }
  if (!(s > 0.0 && s < 1.0)) throw Error(Errc::bad_header, "invalid fractional order");
  if (d < 1 || d > max_dim || n < 4) throw Error(Errc::bad_header, "invalid kernel dimensions in header");

  std::size_t count = 1;
  for (int i = 0; i < d; ++i) count *= static_cast<std::size_t>(n);
  const std::vector<unsigned char> payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (payload.size() != count * 8) {
    std::ostringstream msg;
    msg << "kernel payload truncated: expected " << count * 8 << " bytes, found " << payload.size();
    throw Error(Errc::truncated, msg.str());
  }
  if (detail::hex64(fnv1a64(payload.data(), payload.size())) != checksum)
    throw Error(Errc::bad_checksum, "kernel checksum mismatch");

  return SpectralKernel(d, n, FracOrder(s), oversample, detail::decode_le(payload.data(), count));
}

}  // namespace fracsinc

#endif  // FRACSINC_KERNEL_IO_HPP
