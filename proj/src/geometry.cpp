#include "sphfit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "sphfit/batch.hpp"
#include "sphfit/error.hpp"
#include "sphfit/io.hpp"

namespace sphfit {

namespace {

constexpr double kDuplicateChordal = 1e-12;

Eigen::VectorXd normalized(Eigen::VectorXd v) {
  if (v.size() < 2) {
    throw InvalidArgument("geometry", "a sphere point needs at least 2 coordinates (d >= 1)");
  }
  if (!v.allFinite()) throw InvalidArgument("geometry", "non-finite coordinate");
  const double norm = v.norm();
  if (norm == 0.0) throw InvalidArgument("geometry", "cannot normalize the zero vector");
  if (std::abs(norm - 1.0) <= 4 * std::numeric_limits<double>::epsilon()) return v;
  return v / norm;
}

void require_distinct(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return x(0, a) < x(0, b); });
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      if (x(0, order[b]) - x(0, order[a]) > kDuplicateChordal) break;
      if ((x.col(order[a]) - x.col(order[b])).norm() <= kDuplicateChordal) {
        throw InvalidArgument("geometry",
                              "duplicate points in point set (indices " +
                                  std::to_string(order[a]) + " and " +
                                  std::to_string(order[b]) + ")");
      }
    }
  }
}

double clamp_unit(double t) { return std::clamp(t, -1.0, 1.0); }

}  // namespace

SpherePoint::SpherePoint(Eigen::VectorXd coords) : coords_(normalized(std::move(coords))) {}

SpherePoint::SpherePoint(std::initializer_list<double> coords)
    : SpherePoint(Eigen::Map<const Eigen::VectorXd>(coords.begin(),
                                                    static_cast<Eigen::Index>(coords.size()))) {}

double SpherePoint::dot(const SpherePoint& other) const {
  if (other.coords_.size() != coords_.size()) {
    throw DimensionMismatch("geometry", "points live on spheres of different dimension");
  }
  return clamp_unit(coords_.dot(other.coords_));
}

PointSet::PointSet(Eigen::MatrixXd columns, std::string label)
    : coords_(std::move(columns)), label_(std::move(label)) {
  if (coords_.cols() == 0) throw InvalidArgument("geometry", "point set must be nonempty");
  if (coords_.rows() < 2) throw InvalidArgument("geometry", "point set needs d >= 1");
  for (Eigen::Index i = 0; i < coords_.cols(); ++i) {
    coords_.col(i) = normalized(coords_.col(i));
  }
  require_distinct(coords_);
}

PointSet::PointSet(const std::vector<SpherePoint>& points, std::string label)
    : label_(std::move(label)) {
  if (points.empty()) throw InvalidArgument("geometry", "point set must be nonempty");
  const Eigen::Index rows = points.front().coords().size();
  coords_.resize(rows, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].coords().size() != rows) {
      throw DimensionMismatch("geometry", "points of a set must share the sphere dimension");
    }
    coords_.col(static_cast<Eigen::Index>(i)) = points[i].coords();
  }
  require_distinct(coords_);
}

SpherePoint PointSet::point(std::size_t i) const { return SpherePoint(Eigen::VectorXd(column(i))); }

PointSet PointSet::subset(std::span<const std::size_t> indices) const {
  Eigen::MatrixXd out(coords_.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] >= size()) throw InvalidArgument("geometry", "subset index out of range");
    out.col(static_cast<Eigen::Index>(j)) = column(indices[j]);
  }
  return PointSet(std::move(out), label_);
}

PointSet PointSet::concat(std::span<const PointSet> parts, std::string label) {
  if (parts.empty()) throw InvalidArgument("geometry", "nothing to concatenate");
  Eigen::Index total = 0;
  for (const auto& p : parts) {
    if (p.dim() != parts.front().dim()) {
      throw DimensionMismatch("geometry", "cannot concatenate point sets of different dimension");
    }
    total += p.coords().cols();
  }
  Eigen::MatrixXd out(parts.front().coords().rows(), total);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleCols(at, p.coords().cols()) = p.coords();
    at += p.coords().cols();
  }
  return PointSet(std::move(out), std::move(label));
}

bool PointSet::same_nodes(const PointSet& other, double tol) const {
  if (other.coords_.rows() != coords_.rows() || other.coords_.cols() != coords_.cols()) {
    return false;
  }
  return (other.coords_ - coords_).cwiseAbs().maxCoeff() <= tol;
}

double geodesic_distance(const SpherePoint& a, const SpherePoint& b) {
  return std::acos(a.dot(b));
}

double mesh_norm(const PointSet& pts, const PointSet& probes) {
  if (pts.dim() != probes.dim()) {
    throw DimensionMismatch("geometry", "probe grid dimension differs from point set");
  }
  const Eigen::VectorXd nearest = batch::omp::max_dot(probes.coords(), pts.coords());
  return std::acos(clamp_unit(nearest.minCoeff()));
}

double separation_radius(const PointSet& pts) {
  if (pts.size() < 2) throw InvalidArgument("geometry", "separation radius needs at least 2 points");
  return 0.5 * std::acos(clamp_unit(batch::omp::max_pair_dot(pts.coords())));
}

MeshMetrics mesh_metrics(const PointSet& pts, const MeshOptions& options) {
  if (pts.size() < 2) throw InvalidArgument("geometry", "mesh metrics need at least 2 points");
  if (pts.dim() != 2) {
    throw InvalidArgument("geometry", "mesh metrics use an S^2 probe grid; d must be 2");
  }
  MeshMetrics m;
  m.separation_radius = separation_radius(pts);
  if (!(m.separation_radius > 0.0)) {
    throw InvalidArgument("geometry", "separation radius is zero (duplicate points)");
  }
  const PointSet probes = fibonacci_points(std::max<std::size_t>(1, options.probe_factor) * pts.size());
  m.mesh_norm = mesh_norm(pts, probes);
  m.mesh_ratio = m.mesh_norm / m.separation_radius;
  m.quasi_uniformity_tau = options.declared_tau.value_or(std::max(2.0, m.mesh_ratio));
  return m;
}

GeneratorKind parse_generator_kind(const std::string& name) {
  if (name == "spiral") return GeneratorKind::spiral;
  if (name == "fibonacci") return GeneratorKind::fibonacci;
  if (name == "equal_area_centers" || name == "equal-area-centers") {
    return GeneratorKind::equal_area_centers;
  }
  if (name == "file") return GeneratorKind::file;
  throw InvalidArgument("geometry", "unknown generator kind '" + name + "'");
}

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::spiral: return "spiral";
    case GeneratorKind::fibonacci: return "fibonacci";
    case GeneratorKind::equal_area_centers: return "equal_area_centers";
    case GeneratorKind::file: return "file";
  }
  return "?";
}

PointSet generate_points(const GeneratorSpec& spec, std::size_t n, std::uint64_t /*seed*/) {
  if (spec.kind == GeneratorKind::file) {
    PointSet pts = io::read_points_csv(spec.path, spec.lenient);
    if (n != 0 && pts.size() != n) {
      throw InvalidArgument("geometry", "point file '" + spec.path + "' holds " +
                                            std::to_string(pts.size()) + " points, expected " +
                                            std::to_string(n));
    }
    return pts;
  }
  if (spec.d != 2) throw InvalidArgument("geometry", "point generators only support S^2 (d = 2)");
  if (n == 0) throw InvalidArgument("geometry", "need at least one point");
  switch (spec.kind) {
    case GeneratorKind::spiral: return spiral_points(n);
    case GeneratorKind::fibonacci: return fibonacci_points(n);
    case GeneratorKind::equal_area_centers: return equal_area_centers(n);
    default: break;
  }
  throw InvalidArgument("geometry", "unsupported generator");
}

PointSet fibonacci_points(std::size_t n) {
  if (n == 0) throw InvalidArgument("geometry", "need at least one point");
  const double golden = std::numbers::phi;
  Eigen::MatrixXd x(3, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double turns = static_cast<double>(i) / golden;
    const double phi = 2.0 * std::numbers::pi * (turns - std::floor(turns));
    const auto c = static_cast<Eigen::Index>(i);
    x(0, c) = r * std::cos(phi);
    x(1, c) = r * std::sin(phi);
    x(2, c) = z;
  }
  return PointSet(std::move(x), "fibonacci");
}

PointSet spiral_points(std::size_t n) {
  if (n == 0) throw InvalidArgument("geometry", "need at least one point");
  Eigen::MatrixXd x(3, static_cast<Eigen::Index>(n));
  if (n == 1) {
    x.col(0) << 0.0, 0.0, 1.0;
    return PointSet(std::move(x), "spiral");
  }
  const double nn = static_cast<double>(n);
  double phi = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double h = -1.0 + 2.0 * static_cast<double>(k) / (nn - 1.0);
    if (k == 0 || k == n - 1) {
      phi = 0.0;
    } else {
      phi = std::fmod(phi + 3.6 / std::sqrt(nn * (1.0 - h * h)), 2.0 * std::numbers::pi);
    }
    const double r = std::sqrt(std::max(0.0, 1.0 - h * h));
    const auto c = static_cast<Eigen::Index>(k);
    x(0, c) = r * std::cos(phi);
    x(1, c) = r * std::sin(phi);
    x(2, c) = h;
  }
  return PointSet(std::move(x), "spiral");
}

namespace {

double cap_area(double colatitude) {
  const double s = std::sin(0.5 * colatitude);
  return 4.0 * std::numbers::pi * s * s;
}

double cap_colatitude(double area) {
  return 2.0 * std::asin(std::sqrt(std::clamp(area / (4.0 * std::numbers::pi), 0.0, 1.0)));
}

// Longitude offset between successive collars (fraction of a full turn).
double circle_offset(int n_top, int n_bot) {
  return (1.0 / n_bot - 1.0 / n_top) / 2.0 +
         static_cast<double>(std::gcd(n_top, n_bot)) / (2.0 * n_top * n_bot);
}

}  // namespace

EqualAreaPartition equal_area_partition(std::size_t n) {
  if (n == 0) throw InvalidArgument("geometry", "need at least one region");
  EqualAreaPartition p;
  const double pi = std::numbers::pi;
  if (n == 1) {
    p.cap_colatitudes = {pi};
    p.regions_per_zone = {1};
    p.center_colatitude = {0.0};
    p.center_longitude = {0.0};
    return p;
  }
  const double area = 4.0 * pi / static_cast<double>(n);
  const double polar = cap_colatitude(area);
  int collars = 0;
  if (n > 2) {
    const double ideal = (pi - 2.0 * polar) / std::sqrt(area);
    collars = std::max(1, static_cast<int>(std::lround(ideal)));
  }
  p.regions_per_zone.push_back(1);
  if (collars > 0) {
    const double fitted = (pi - 2.0 * polar) / collars;
    double carry = 0.0;
    for (int i = 1; i <= collars; ++i) {
      const double ideal_regions =
          (cap_area(polar + i * fitted) - cap_area(polar + (i - 1) * fitted)) / area;
      const int count = static_cast<int>(std::lround(ideal_regions + carry));
      carry += ideal_regions - count;
      p.regions_per_zone.push_back(count);
    }
  }
  p.regions_per_zone.push_back(1);

  double cumulative = 0.0;
  for (std::size_t z = 0; z + 1 < p.regions_per_zone.size(); ++z) {
    cumulative += p.regions_per_zone[z];
    p.cap_colatitudes.push_back(cap_colatitude(area * cumulative));
  }
  p.cap_colatitudes.push_back(pi);

  p.center_colatitude.push_back(0.0);
  p.center_longitude.push_back(0.0);
  double offset = 0.0;
  for (int c = 1; c <= collars; ++c) {
    const double top = p.cap_colatitudes[static_cast<std::size_t>(c - 1)];
    const double bottom = p.cap_colatitudes[static_cast<std::size_t>(c)];
    const int count = p.regions_per_zone[static_cast<std::size_t>(c)];
    for (int j = 1; j <= count; ++j) {
      double lon = 2.0 * pi * ((j - 0.5) / count + offset);
      lon = std::fmod(lon, 2.0 * pi);
      p.center_colatitude.push_back(0.5 * (top + bottom));
      p.center_longitude.push_back(lon);
    }
    offset += circle_offset(count, p.regions_per_zone[static_cast<std::size_t>(c + 1)]);
    offset -= std::floor(offset);
  }
  p.center_colatitude.push_back(pi);
  p.center_longitude.push_back(0.0);
  return p;
}

PointSet equal_area_centers(std::size_t n) {
  const EqualAreaPartition p = equal_area_partition(n);
  Eigen::MatrixXd x(3, static_cast<Eigen::Index>(p.center_colatitude.size()));
  for (std::size_t i = 0; i < p.center_colatitude.size(); ++i) {
    const double th = p.center_colatitude[i];
    const double ph = p.center_longitude[i];
    const auto c = static_cast<Eigen::Index>(i);
    x(0, c) = std::sin(th) * std::cos(ph);
    x(1, c) = std::sin(th) * std::sin(ph);
    x(2, c) = std::cos(th);
  }
  return PointSet(std::move(x), "equal_area_centers");
}

Eigen::Matrix3d rotation_matrix(int j) {
  if (j < 0) throw InvalidArgument("geometry", "rotation index must be nonnegative");
  const double angle = j * std::numbers::pi / 10.0;
  Eigen::Matrix3d a;
  a << std::cos(angle), -std::sin(angle), 0.0,
       std::sin(angle), std::cos(angle), 0.0,
       0.0, 0.0, 1.0;
  return a;
}

PointSet rotate(const PointSet& pts, int j) {
  if (pts.dim() != 2) throw InvalidArgument("geometry", "rotation is defined on S^2 only");
  if (j == 0) return pts;
  Eigen::MatrixXd rotated = rotation_matrix(j) * pts.coords();
  return PointSet(std::move(rotated), pts.label());
}

}  // namespace sphfit
