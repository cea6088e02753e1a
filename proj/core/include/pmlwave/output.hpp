#pragma once

#include "pmlwave/mesh.hpp"
#include "pmlwave/quadrature.hpp"
#include "pmlwave/state.hpp"

#include <fstream>
#include <string>
#include <vector>

namespace pmlwave {

// Streaming CSV writer with deterministic %.17g number formatting.
class CsvWriter {
public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);

private:
  std::ofstream out_;
  std::size_t ncols_;
  std::string path_;
};

// Nodal pressure (and |p|) on the structured node grid as a legacy-ASCII VTK
// structured grid. Interface nodes are duplicated points, which VTK accepts.
void write_vtk_snapshot(const std::string& path, const Mesh& mesh,
                        const Operators1D& op, const State& q, double time_s);

// Writes text to path, creating parent directories; ConfigError on failure.
void write_text_file(const std::string& path, const std::string& text);

} // namespace pmlwave
