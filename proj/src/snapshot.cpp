#include "vortexlab/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace vortexlab {

namespace {

constexpr const char* kMagic = "VORTEXLAB-METRIC v1";

void put_double(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_double(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw Error(ErrorCode::IoError, "snapshot is truncated");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t(bytes[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

}  // namespace

void write_snapshot(const std::string& path, const MetricField& h) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write snapshot " + path);
  out << kMagic << '\n' << h.rank() << ' ' << h.grid()->points_per_axis() << ' ' << h.grid()->dim() << '\n';
  for (const CMat& m : h.H())
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        put_double(out, m(i, j).real());
        put_double(out, m(i, j).imag());
      }
  if (!out) throw Error(ErrorCode::IoError, "failed writing snapshot " + path);
}

MetricField read_snapshot(const std::string& path, const FlatBundle& bundle, const GridPtr& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open snapshot " + path);
  std::string magic, dims;
  std::getline(in, magic);
  if (magic != kMagic) throw Error(ErrorCode::IoError, path + " is not a metric snapshot");
  std::getline(in, dims);
  std::istringstream header(dims);
  int r = 0, N = 0, n = 0;
  if (!(header >> r >> N >> n)) throw Error(ErrorCode::IoError, "bad snapshot header in " + path);
  if (r != bundle.rank() || N != grid->points_per_axis() || n != grid->dim())
    throw Error(ErrorCode::IoError, "snapshot " + path + " does not match rank/grid");
  EndField H(grid->size(), CMat::Zero(r, r));
  for (CMat& m : H)
    for (int j = 0; j < r; ++j)
      for (int i = 0; i < r; ++i) {
        const double re = get_double(in);
        m(i, j) = cplx(re, get_double(in));
      }
  return MetricField(bundle, grid, std::move(H));
}

}  // namespace vortexlab
