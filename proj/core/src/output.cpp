#include "pmlwave/output.hpp"

#include "pmlwave/errors.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

namespace pmlwave {

namespace {

void ensure_parent(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec)
      throw ConfigError("cannot create output directory \"" + parent.string() +
                        "\": " + ec.message());
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& columns)
    : ncols_(columns.size()), path_(path) {
  ensure_parent(path);
  out_.open(path, std::ios::trunc);
  if (!out_) throw ConfigError("cannot open \"" + path + "\" for writing");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out_ << ',';
    out_ << columns[i];
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != ncols_)
    throw ContractViolation("CsvWriter: row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ << ',';
    out_ << fmt(values[i]);
  }
  out_ << '\n';
  if (!out_) throw ConfigError("write failed on \"" + path_ + "\"");
}

void write_vtk_snapshot(const std::string& path, const Mesh& mesh,
                        const Operators1D& op, const State& q, double time_s) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot open \"" + path + "\" for writing");

  const int n1 = op.n();
  const StateLayout& L = q.layout;
  int gx[3] = {mesh.counts[0] * n1, mesh.counts[1] * n1, 1};
  if (mesh.dim == 3) gx[2] = mesh.counts[2] * n1;
  const long npts = static_cast<long>(gx[0]) * gx[1] * gx[2];

  out << "# vtk DataFile Version 3.0\n";
  out << "nodal pressure at t=" << fmt(time_s) << " s\n";
  out << "ASCII\n";
  out << "DATASET STRUCTURED_GRID\n";
  out << "DIMENSIONS " << gx[0] << ' ' << gx[1] << ' ' << gx[2] << '\n';
  out << "POINTS " << npts << " double\n";
  for (int kz = 0; kz < gx[2]; ++kz)
    for (int jy = 0; jy < gx[1]; ++jy)
      for (int ix = 0; ix < gx[0]; ++ix) {
        const double x =
            reference_to_physical(mesh, 0, ix / n1, op.nodes[ix % n1]);
        const double y =
            reference_to_physical(mesh, 1, jy / n1, op.nodes[jy % n1]);
        const double z =
            mesh.dim == 3
                ? reference_to_physical(mesh, 2, kz / n1, op.nodes[kz % n1])
                : 0.0;
        out << fmt(x) << ' ' << fmt(y) << ' ' << fmt(z) << '\n';
      }

  out << "POINT_DATA " << npts << '\n';
  for (const char* name : {"p", "abs_p"}) {
    out << "SCALARS " << name << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    const bool absval = name[0] == 'a';
    for (int kz = 0; kz < gx[2]; ++kz)
      for (int jy = 0; jy < gx[1]; ++jy)
        for (int ix = 0; ix < gx[0]; ++ix) {
          const int e = mesh.index(ix / n1, jy / n1, mesh.dim == 3 ? kz / n1 : 0);
          const int nd =
              L.node(ix % n1, jy % n1, mesh.dim == 3 ? kz % n1 : 0);
          const double v = q.field(e, L.field_p())[nd];
          out << fmt(absval ? std::abs(v) : v) << '\n';
        }
  }
  if (!out) throw ConfigError("write failed on \"" + path + "\"");
}

void write_text_file(const std::string& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot open \"" + path + "\" for writing");
  out << text;
  if (!out) throw ConfigError("write failed on \"" + path + "\"");
}

} // namespace pmlwave
