#include <gtest/gtest.h>

#include <cstring>
#include <sstream>

#include "boundstate/field_io.hpp"

namespace bs = boundstate;
using bs::cplx;

TEST(FieldDump, ScalarRoundTripIsBitExact) {
  const bs::Grid g(16, 7.5);
  const auto f = bs::sample(g, [](double x, double y, double z) { return cplx(x + 0.1 * y, z * z); });
  std::stringstream ss;
  bs::write_field_dump(ss, f);
  const auto dump = bs::read_field_dump(ss);
  ASSERT_EQ(dump.components.size(), 1u);
  EXPECT_EQ(dump.grid, g);
  EXPECT_EQ(dump.space, bs::Space::Real);
  EXPECT_EQ(std::memcmp(dump.components[0].data(), f.data(), f.size() * sizeof(cplx)), 0);
}

TEST(FieldDump, HeaderLayout) {
  const bs::Grid g(16, 2.0);
  const bs::ScalarField f = bs::transform(bs::ScalarField(g), bs::Direction::Forward);
  std::stringstream ss;
  bs::write_field_dump(ss, f);
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 6u + 4u + 8u + 4u + 1u + g.size() * 16u);
  EXPECT_EQ(bytes.substr(0, 6), "BSFLD1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[6]), 16u);
  EXPECT_EQ(bytes[7], 0);
  double box = 0.0;
  std::memcpy(&box, bytes.data() + 10, 8);
  EXPECT_EQ(box, 2.0);
  EXPECT_EQ(static_cast<unsigned char>(bytes[18]), 1u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[22]), 1u);
}

TEST(FieldDump, SpinorKeepsComponentOrder) {
  const bs::Grid g(16, 4.0);
  bs::SpinorField s(g);
  for (std::size_t c = 0; c < 4; ++c) s[c][c] = cplx(static_cast<double>(c + 1), -1.0);
  std::stringstream ss;
  bs::write_field_dump(ss, s);
  const auto dump = bs::read_field_dump(ss);
  ASSERT_EQ(dump.components.size(), 4u);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(dump.components[c][c], cplx(static_cast<double>(c + 1), -1.0));
}

TEST(FieldDump, RejectsBadMagicAndTruncation) {
  std::stringstream bad("BSFLD9xxxxxxxxxxxxxxxxxxxxx");
  EXPECT_THROW(bs::read_field_dump(bad), std::runtime_error);
  const bs::Grid g(16, 4.0);
  std::stringstream ss;
  bs::write_field_dump(ss, bs::ScalarField(g));
  std::stringstream cut(ss.str().substr(0, 100));
  EXPECT_THROW(bs::read_field_dump(cut), std::runtime_error);
}
