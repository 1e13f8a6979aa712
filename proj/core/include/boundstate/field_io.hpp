#pragma once

#include <iosfwd>
#include <vector>

#include "boundstate/fields.hpp"

namespace boundstate {

/// Contents of a BSFLD1 dump: one scalar or four spinor components.
struct FieldDump {
  Grid grid;
  Space space;
  std::vector<ScalarField> components;
};

void write_field_dump(std::ostream& os, const ScalarField& field);
void write_field_dump(std::ostream& os, const SpinorField& field);
FieldDump read_field_dump(std::istream& is);

}  // namespace boundstate
