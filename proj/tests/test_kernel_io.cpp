#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "fracsinc/kernel_io.hpp"

using namespace fracsinc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "fracsinc_kernel_io";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Errc load_error(const fs::path& p, std::string* what = nullptr) {
  try {
    kernel_load(p.string());
  } catch (const Error& e) {
    if (what) *what = e.what();
    return e.code();
  }
  ADD_FAILURE() << "load succeeded unexpectedly";
  return Errc::io;
}

}  // namespace

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a64(nullptr, 0), 0xcbf29ce484222325ULL);
  const unsigned char a[] = {'a'};
  EXPECT_EQ(fnv1a64(a, 1), 0xaf63dc4c8601ec8cULL);
}

TEST(KernelIo, RoundTripBitExact) {
  const auto k = assemble_kernel(2, 8, FracOrder(0.5));
  const auto path = scratch("rt.fsk");
  kernel_save(k, path.string());
  const auto back = kernel_load(path.string());
  ASSERT_EQ(back.octant().size(), k.octant().size());
  EXPECT_EQ(std::memcmp(back.octant().data(), k.octant().data(), k.octant().size() * sizeof(double)), 0);
  EXPECT_EQ(back.dim(), 2);
  EXPECT_EQ(back.n(), 8);
  EXPECT_EQ(back.s(), 0.5);
  EXPECT_EQ(back.oversample(), k.oversample());
  EXPECT_EQ(back.padded_spectrum(), k.padded_spectrum());
}

TEST(KernelIo, HeaderLayout) {
  const auto k = assemble_kernel(1, 4, FracOrder(0.25));
  const auto path = scratch("layout.fsk");
  kernel_save(k, path.string());
  const std::string bytes = slurp(path);
  const auto nl = bytes.find('\n');
  ASSERT_NE(nl, std::string::npos);
  const auto header = nlohmann::json::parse(bytes.substr(0, nl));
  EXPECT_EQ(header["magic"], "FSK1");
  EXPECT_EQ(header["checksum"].get<std::string>().size(), 16u);
  EXPECT_EQ(bytes.size() - nl - 1, 4u * 8u);
  double first = 0.0;
  std::memcpy(&first, bytes.data() + nl + 1, 8);  // host is little-endian here
  EXPECT_EQ(first, k.octant()[0]);
}

TEST(KernelIo, InvalidOrderInHeader) {
  const auto path = scratch("order.fsk");
  kernel_save(assemble_kernel(1, 4, FracOrder(0.5)), path.string());
  std::string bytes = slurp(path);
  const auto at = bytes.find("\"s\":0.5");
  ASSERT_NE(at, std::string::npos);
  bytes.replace(at, 7, "\"s\":1.5");
  dump(path, bytes);
  std::string what;
  EXPECT_EQ(load_error(path, &what), Errc::bad_header);
  EXPECT_NE(what.find("invalid fractional order"), std::string::npos);
}

TEST(KernelIo, CorruptedPayload) {
  const auto path = scratch("corrupt.fsk");
  kernel_save(assemble_kernel(1, 8, FracOrder(0.5)), path.string());
  std::string bytes = slurp(path);
  bytes[bytes.size() - 3] ^= 0x40;
  dump(path, bytes);
  std::string what;
  EXPECT_EQ(load_error(path, &what), Errc::bad_checksum);
  EXPECT_NE(what.find("checksum"), std::string::npos);
}

TEST(KernelIo, TruncatedPayload) {
  const auto path = scratch("trunc.fsk");
  kernel_save(assemble_kernel(1, 8, FracOrder(0.5)), path.string());
  std::string bytes = slurp(path);
  bytes.resize(bytes.size() - 8);
  dump(path, bytes);
  EXPECT_EQ(load_error(path), Errc::truncated);
}

TEST(KernelIo, MagicMismatch) {
  const auto path = scratch("magic.fsk");
  kernel_save(assemble_kernel(1, 8, FracOrder(0.5)), path.string());
  std::string bytes = slurp(path);
  bytes.replace(bytes.find("FSK1"), 4, "FSK2");
  dump(path, bytes);
  EXPECT_EQ(load_error(path), Errc::bad_magic);
  dump(path, "not json at all\n12345678");
  EXPECT_EQ(load_error(path), Errc::bad_magic);
}

TEST(KernelIo, MissingFile) { EXPECT_EQ(load_error(scratch("does_not_exist.fsk")), Errc::io); }
