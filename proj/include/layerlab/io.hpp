#pragma once

#include <span>
#include <string>
#include <vector>

#include "layerlab/curve.hpp"
#include "layerlab/field.hpp"
#include "layerlab/interface.hpp"

namespace layerlab {

// 16-bit binary PGM, top row first, values mapped linearly from [min, max].
// A sidecar `<path>.txt` records min, max, grid geometry and the time.
void write_pgm(const std::string& path, const ScalarField& f, double t);

// Reads back the grey levels and the sidecar range; values are quantised.
ScalarField read_pgm(const std::string& path);

// "x,y" rows; components separated by one blank line.
void write_curves_csv(const std::string& path, std::span<const Curve> curves);
std::vector<Curve> read_curves_csv(const std::string& path);

// "arclength,theta" rows with theta = offset / eps.
void write_theta_csv(const std::string& path, std::span<const GraphSample> samples, double eps);

// Shortest round-trip decimal representation.
std::string format_double(double x);

}  // namespace layerlab
