#pragma once

#include <string>

#include "vortexlab/metric.hpp"

namespace vortexlab {

/// Binary metric snapshot: a text header "VORTEXLAB-METRIC v1", a line
/// "rank N n", then the matrices as little-endian (re, im) doubles, grid point
/// by grid point, column-major within each matrix.
void write_snapshot(const std::string& path, const MetricField& h);

/// Reads a snapshot for the given bundle and grid; IoError on mismatch or corruption.
MetricField read_snapshot(const std::string& path, const FlatBundle& bundle, const GridPtr& grid);

}  // namespace vortexlab
