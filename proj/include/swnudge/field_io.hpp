#pragma once

#include <iosfwd>
#include <string>

#include "swnudge/grid.hpp"

namespace swnudge {

// Snapshot format: magic "SWF1", u32 nx, u32 ny, f64 dx, f64 dy, then
// nx*ny f64 values row-major. All fields little-endian.
void write_field(std::ostream& os, const ScalarField& f);
ScalarField read_field(std::istream& is);

void save_field(const std::string& path, const ScalarField& f);
ScalarField load_field(const std::string& path);

}  // namespace swnudge
