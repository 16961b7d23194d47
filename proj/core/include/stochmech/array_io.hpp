#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "stochmech/grid_fields.hpp"

namespace stochmech {

/// Binary array container. Layout on disk (all integers little-endian):
///
///   bytes 0..3   magic "SMAR"
///   u16          format version (1)
///   u8           endianness of the payload (0 = little)
///   u8           element type (0 = float64, 1 = complex128 as re,im pairs)
///   u32          rank
///   u64[rank]    shape, slowest-varying first
///   payload      row-major elements
struct BinaryArray {
  enum class Type : std::uint8_t { Float64 = 0, Complex128 = 1 };
  static constexpr std::uint16_t kVersion = 1;

  Type type = Type::Float64;
  std::vector<std::uint64_t> shape;
  std::vector<double> data;  // complex payloads are stored interleaved

  std::size_t element_count() const;
};

void write_binary(std::ostream& out, const BinaryArray& array);
BinaryArray read_binary(std::istream& in);

BinaryArray to_binary(const ScalarField& f);
BinaryArray to_binary(const VectorField& f);

/// CSV with header "t,x,value" (d = 1) in full double precision.
void write_csv(std::ostream& out, const ScalarField& f);
void write_csv(std::ostream& out, const VectorField& f);

/// Formats a double with enough digits to round-trip.
std::string format_double(double v);

}  // namespace stochmech
