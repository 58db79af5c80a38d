#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sphfit {

/// A unit vector in R^{d+1}. Construction normalizes the input.
class SpherePoint {
 public:
  explicit SpherePoint(Eigen::VectorXd coords);
  SpherePoint(std::initializer_list<double> coords);

  /// Dimension d of the sphere S^d (ambient dimension minus one).
  int dim() const { return static_cast<int>(coords_.size()) - 1; }
  const Eigen::VectorXd& coords() const { return coords_; }
  double operator[](int i) const { return coords_[i]; }

  /// Inner product, clamped to [-1, 1].
  double dot(const SpherePoint& other) const;

 private:
  Eigen::VectorXd coords_;
};

/// A nonempty set of distinct points on a common sphere S^d, stored
/// column-wise as a (d+1) x n matrix.
class PointSet {
 public:
  explicit PointSet(Eigen::MatrixXd columns, std::string label = {});
  explicit PointSet(const std::vector<SpherePoint>& points,
                    std::string label = {});

  std::size_t size() const { return static_cast<std::size_t>(coords_.cols()); }
  int dim() const { return static_cast<int>(coords_.rows()) - 1; }
  const Eigen::MatrixXd& coords() const { return coords_; }
  auto column(std::size_t i) const { return coords_.col(static_cast<Eigen::Index>(i)); }
  SpherePoint point(std::size_t i) const;

  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  PointSet subset(std::span<const std::size_t> indices) const;
  static PointSet concat(std::span<const PointSet> parts, std::string label = {});

  /// True when both sets hold the same points in the same order.
  bool same_nodes(const PointSet& other, double tol = 1e-14) const;

 private:
  Eigen::MatrixXd coords_;
  std::string label_;
};

/// Geodesic (great-circle) distance in radians, in [0, pi].
double geodesic_distance(const SpherePoint& a, const SpherePoint& b);

struct MeshMetrics {
  double mesh_norm = 0.0;          // h, radians
  double separation_radius = 0.0;  // q, radians
  double mesh_ratio = 1.0;         // h / q
  double quasi_uniformity_tau = 2.0;

  bool quasi_uniform() const { return mesh_ratio <= quasi_uniformity_tau; }
};

struct MeshOptions {
  /// Probe grid size is probe_factor * |points| Fibonacci nodes.
  std::size_t probe_factor = 100;
  /// Declared quasi-uniformity bound; defaults to max(2, mesh_ratio).
  std::optional<double> declared_tau;
};

MeshMetrics mesh_metrics(const PointSet& pts, const MeshOptions& options = {});

/// Mesh norm over an explicit probe set (max over probes of the distance to
/// the nearest point of `pts`).
double mesh_norm(const PointSet& pts, const PointSet& probes);
double separation_radius(const PointSet& pts);

enum class GeneratorKind { spiral, fibonacci, equal_area_centers, file };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::fibonacci;
  std::string path;      // for GeneratorKind::file
  bool lenient = false;  // skip the unit-norm check when loading
  int d = 2;
};

GeneratorKind parse_generator_kind(const std::string& name);
std::string to_string(GeneratorKind kind);

/// Deterministic point sets on S^2. `seed` is accepted for interface
/// uniformity; none of the current generators consume randomness.
PointSet generate_points(const GeneratorSpec& spec, std::size_t n,
                         std::uint64_t seed = 0);

PointSet fibonacci_points(std::size_t n);
/// Rakhmanov-Saff-Zhou generalized spiral.
PointSet spiral_points(std::size_t n);

/// Zonal equal-area partition of S^2 into n regions.
struct EqualAreaPartition {
  std::vector<double> cap_colatitudes;  // boundaries, north to south, ending in pi
  std::vector<int> regions_per_zone;    // north cap, collars..., south cap
  std::vector<double> center_colatitude;
  std::vector<double> center_longitude;
};

EqualAreaPartition equal_area_partition(std::size_t n);
PointSet equal_area_centers(std::size_t n);

/// Rotation about the z axis by j*pi/10.
Eigen::Matrix3d rotation_matrix(int j);
PointSet rotate(const PointSet& pts, int j);

}  // namespace sphfit
