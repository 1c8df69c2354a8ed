#ifndef FRACSINC_ERROR_HPP
#define FRACSINC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fracsinc {

enum class Errc {
  invalid_argument,
  degenerate_shape,
  empty_domain,
  enlarged_out_of_box,
  size_guard,
  kernel_too_large,
  oracle_failed,
  convolution_integrity,
  not_spd,
  not_psd,
  not_converged,
  non_finite,
  extension_insufficient,
  invalid_sequence,
  io,
  bad_magic,
  bad_header,
  bad_checksum,
  truncated,
  config,
};

/// Numerical failures map to CLI exit code 2; everything else is a usage or
/// input problem (exit code 1).
constexpr bool is_numerical(Errc c) {
  switch (c) {
    case Errc::oracle_failed:
    case Errc::convolution_integrity:
    case Errc::not_spd:
    case Errc::not_psd:
    case Errc::not_converged:
    case Errc::non_finite:
    case Errc::extension_insufficient:
    case Errc::kernel_too_large:
    case Errc::bad_checksum:
    case Errc::truncated:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace fracsinc

#endif  // FRACSINC_ERROR_HPP
