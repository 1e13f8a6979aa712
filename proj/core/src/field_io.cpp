#include "boundstate/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace boundstate {

namespace {

constexpr char kMagic[6] = {'B', 'S', 'F', 'L', 'D', '1'};

template <class T>
void put(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw std::runtime_error("field dump truncated");
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

void write_components(std::ostream& os, const ScalarField* const* comps, std::uint32_t count) {
  const Grid& g = comps[0]->grid();
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.n()));
  put<double>(os, g.box());
  put<std::uint32_t>(os, count);
  put<std::uint8_t>(os, static_cast<std::uint8_t>(comps[0]->space()));
  for (std::uint32_t c = 0; c < count; ++c) {
    for (const cplx& v : comps[c]->values()) {
      put<double>(os, v.real());
      put<double>(os, v.imag());
    }
  }
  if (!os) throw std::runtime_error("field dump write failed");
}

}  // namespace

void write_field_dump(std::ostream& os, const ScalarField& field) {
  const ScalarField* comps[] = {&field};
  write_components(os, comps, 1);
}

void write_field_dump(std::ostream& os, const SpinorField& field) {
  const ScalarField* comps[] = {&field[0], &field[1], &field[2], &field[3]};
  write_components(os, comps, 4);
}

FieldDump read_field_dump(std::istream& is) {
  char magic[6];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw std::runtime_error("not a BSFLD1 field dump");
  }
  const auto n = get<std::uint32_t>(is);
  const auto box = get<double>(is);
  const auto count = get<std::uint32_t>(is);
  const auto tag = get<std::uint8_t>(is);
  if (count != 1 && count != 4) throw std::runtime_error("field dump component count must be 1 or 4");
  if (tag > 1) throw std::runtime_error("field dump has an unknown space tag");
  const Grid grid(n, box);
  const auto space = static_cast<Space>(tag);
  FieldDump dump{grid, space, {}};
  for (std::uint32_t c = 0; c < count; ++c) {
    ScalarField f(grid, space);
    for (auto& v : f.values()) {
      const double re = get<double>(is);
      const double im = get<double>(is);
      v = cplx(re, im);
    }
    dump.components.push_back(std::move(f));
  }
  return dump;
}

}  // namespace boundstate
