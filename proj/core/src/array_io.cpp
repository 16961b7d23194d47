#include "stochmech/array_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

namespace stochmech {

namespace {

constexpr std::array<char, 4> kMagic = {'S', 'M', 'A', 'R'};

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

template <class T>
void put(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  require(static_cast<bool>(in), ErrorCode::Io, "truncated binary array");
  return to_little(v);
}

}  // namespace

std::size_t BinaryArray::element_count() const {
  std::size_t n = 1;
  for (auto s : shape) n *= static_cast<std::size_t>(s);
  return n;
}

void write_binary(std::ostream& out, const BinaryArray& array) {
  const std::size_t scalars = array.element_count() * (array.type == BinaryArray::Type::Complex128 ? 2 : 1);
  require(scalars == array.data.size(), ErrorCode::InvalidArgument, "binary array shape/data mismatch");
  out.write(kMagic.data(), kMagic.size());
  put<std::uint16_t>(out, BinaryArray::kVersion);
  put<std::uint8_t>(out, 0);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(array.type));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(array.shape.size()));
  for (auto s : array.shape) put<std::uint64_t>(out, s);
  for (double v : array.data) put<double>(out, v);
  require(static_cast<bool>(out), ErrorCode::Io, "failed writing binary array");
}

BinaryArray read_binary(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  require(static_cast<bool>(in) && magic == kMagic, ErrorCode::Io, "not a binary array (bad magic)");
  const auto version = get<std::uint16_t>(in);
  require(version == BinaryArray::kVersion, ErrorCode::Io, "unsupported binary array version");
  const auto endian = get<std::uint8_t>(in);
  require(endian == 0, ErrorCode::Io, "only little-endian payloads are supported");
  const auto type = get<std::uint8_t>(in);
  require(type <= 1, ErrorCode::Io, "unknown element type");
  BinaryArray array;
  array.type = static_cast<BinaryArray::Type>(type);
  const auto rank = get<std::uint32_t>(in);
  array.shape.resize(rank);
  for (auto& s : array.shape) s = get<std::uint64_t>(in);
  const std::size_t scalars = array.element_count() * (array.type == BinaryArray::Type::Complex128 ? 2 : 1);
  array.data.resize(scalars);
  for (auto& v : array.data) v = get<double>(in);
  return array;
}

BinaryArray to_binary(const ScalarField& f) {
  BinaryArray a;
  a.shape = {f.grid().time_nodes(), f.grid().n_x};
  a.data.assign(f.values().begin(), f.values().end());
  return a;
}

BinaryArray to_binary(const VectorField& f) {
  BinaryArray a;
  a.shape = {f.grid().time_nodes(), f.grid().n_x, f.grid().d};
  a.data.assign(f.values().begin(), f.values().end());
  return a;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

void write_csv(std::ostream& out, const ScalarField& f) {
  const auto& g = f.grid();
  out << "t,x,value\n";
  for (std::size_t j = 0; j < g.time_nodes(); ++j)
    for (std::size_t k = 0; k < g.n_x; ++k)
      out << format_double(g.t(j)) << ',' << format_double(g.x(k)) << ',' << format_double(f(j, k)) << '\n';
}

void write_csv(std::ostream& out, const VectorField& f) {
  const auto& g = f.grid();
  require(g.d == 1, ErrorCode::Unsupported, "CSV export supports d = 1 only");
  out << "t,x,value\n";
  for (std::size_t j = 0; j < g.time_nodes(); ++j)
    for (std::size_t k = 0; k < g.n_x; ++k)
      out << format_double(g.t(j)) << ',' << format_double(g.x(k)) << ',' << format_double(f(j, k)) << '\n';
}

}  // namespace stochmech
