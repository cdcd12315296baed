#include "confsec/error.hpp"
#include "confsec/kernels.hpp"
#include "confsec/selfmaps.hpp"

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>

namespace confsec {

namespace {

constexpr double kPi = std::numbers::pi;

int winding_number(const SelfMap& f) {
  for (std::size_t n = 4096; n <= (std::size_t{1} << 22); n *= 4) {
    double total = 0.0;
    bool resolved = true;
    auto angle_of = [&](std::size_t j) {
      const SpacePoint img = f(SpacePoint::circle(2.0 * kPi * static_cast<double>(j % n) / static_cast<double>(n)));
      return std::atan2(img.coords()(1), img.coords()(0));
    };
    double previous = angle_of(0);
    for (std::size_t j = 1; j <= n; ++j) {
      const double current = angle_of(j);
      const double step = kernels::signed_angle_difference(previous, current);
      if (std::abs(step) > kPi / 2) {
        resolved = false;
        break;
      }
      total += step;
      previous = current;
    }
    if (!resolved) continue;
    const double turns = total / (2.0 * kPi);
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) < 1e-6) return static_cast<int>(rounded);
  }
  throw Error(ErrorCode::DegenerateRegularValue, "loop image not resolved for " + f.name());
}

struct Mesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;  // outward (counterclockwise seen from outside)
};

Mesh icosphere(int levels) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  Mesh mesh;
  const double raw[12][3] = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                             {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (const auto& v : raw) mesh.vertices.push_back(Eigen::Vector3d(v[0], v[1], v[2]).normalized());
  mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (auto& f : mesh.faces) {
    const auto& a = mesh.vertices[f[0]];
    const auto& b = mesh.vertices[f[1]];
    const auto& c = mesh.vertices[f[2]];
    if (a.dot(b.cross(c)) < 0) std::swap(f[1], f[2]);
  }
  for (int level = 0; level < levels; ++level) {
    std::map<std::pair<int, int>, int> midpoints;
    auto midpoint = [&](int i, int j) {
      const auto key = std::minmax(i, j);
      auto it = midpoints.find(key);
      if (it != midpoints.end()) return it->second;
      mesh.vertices.push_back((mesh.vertices[i] + mesh.vertices[j]).normalized());
      const int id = static_cast<int>(mesh.vertices.size()) - 1;
      midpoints.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(mesh.faces.size() * 4);
    for (const auto& f : mesh.faces) {
      const int ab = midpoint(f[0], f[1]);
      const int bc = midpoint(f[1], f[2]);
      const int ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    mesh.faces = std::move(next);
  }
  return mesh;
}

double det3(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  return a.dot(b.cross(c));
}

Eigen::Vector3d apply(const SelfMap& f, const Eigen::Vector3d& v) {
  return f(SpacePoint(SpaceDescriptor::sphere(2), Eigen::VectorXd(v))).coords();
}

// Signed containment of y in the image of one triangle. Returns nullopt when y
// sits too close to an edge of the image to decide.
std::optional<int> triangle_contribution(const std::array<Eigen::Vector3d, 3>& w,
                                         const Eigen::Vector3d& y) {
  double longest = 0.0;
  double nearest = 4.0;
  for (int i = 0; i < 3; ++i) {
    longest = std::max(longest, (w[i] - w[(i + 1) % 3]).norm());
    nearest = std::min(nearest, (w[i] - y).norm());
  }
  if (nearest > longest + 1e-9) return 0;
  const double orientation = det3(w[0], w[1], w[2]);
  const double d0 = det3(y, w[1], w[2]);
  const double d1 = det3(w[0], y, w[2]);
  const double d2 = det3(w[0], w[1], y);
  constexpr double tol = 1e-13;
  if (std::abs(d0) < tol || std::abs(d1) < tol || std::abs(d2) < tol) return std::nullopt;
  if (std::abs(orientation) < tol * tol) return std::nullopt;
  const int s = orientation > 0 ? 1 : -1;
  const auto sign = [](double v) { return v > 0 ? 1 : -1; };
  if (sign(d0) == s && sign(d1) == s && sign(d2) == s) return s;
  return 0;
}

// Recount inside a single domain triangle after two subdivisions.
std::optional<int> refined_contribution(const SelfMap& f, const std::array<Eigen::Vector3d, 3>& v,
                                        const Eigen::Vector3d& y) {
  std::vector<std::array<Eigen::Vector3d, 3>> tris{v};
  for (int level = 0; level < 2; ++level) {
    std::vector<std::array<Eigen::Vector3d, 3>> next;
    for (const auto& t : tris) {
      const Eigen::Vector3d ab = (t[0] + t[1]).normalized();
      const Eigen::Vector3d bc = (t[1] + t[2]).normalized();
      const Eigen::Vector3d ca = (t[2] + t[0]).normalized();
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }
  int total = 0;
  for (const auto& t : tris) {
    const auto c = triangle_contribution({apply(f, t[0]), apply(f, t[1]), apply(f, t[2])}, y);
    if (!c) return std::nullopt;
    total += *c;
  }
  return total;
}

std::optional<int> count_preimages(const SelfMap& f, const Mesh& mesh,
                                   const std::vector<Eigen::Vector3d>& images, const Eigen::Vector3d& y) {
  int total = 0;
  for (const auto& face : mesh.faces) {
    const std::array<Eigen::Vector3d, 3> w{images[face[0]], images[face[1]], images[face[2]]};
    const auto c = triangle_contribution(w, y);
    if (!c) return std::nullopt;
    if (*c != 0) {
      const std::array<Eigen::Vector3d, 3> v{mesh.vertices[face[0]], mesh.vertices[face[1]],
                                             mesh.vertices[face[2]]};
      const auto refined = refined_contribution(f, v, y);
      if (!refined || *refined != *c) return std::nullopt;
    }
    total += *c;
  }
  return total;
}

int sphere_degree(const SelfMap& f) {
  static const Mesh mesh = icosphere(7);
  std::vector<Eigen::Vector3d> images;
  images.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) images.push_back(apply(f, v));

  const std::array<Eigen::Vector3d, 6> candidates{
      Eigen::Vector3d(0.3127, 0.5419, 0.7801).normalized(),
      Eigen::Vector3d(-0.6211, 0.2113, -0.7547).normalized(),
      Eigen::Vector3d(0.1234, -0.9012, 0.4155).normalized(),
      Eigen::Vector3d(0.8071, -0.3013, -0.5077).normalized(),
      Eigen::Vector3d(-0.2719, -0.4471, -0.8522).normalized(),
      Eigen::Vector3d(-0.7331, 0.6607, 0.1613).normalized()};
  std::vector<int> degrees;
  for (const auto& y : candidates) {
    if (auto d = count_preimages(f, mesh, images, y)) {
      degrees.push_back(*d);
      if (degrees.size() == 2) break;
    }
  }
  if (degrees.size() < 2) {
    throw Error(ErrorCode::DegenerateRegularValue, "could not isolate preimages for " + f.name());
  }
  if (degrees[0] != degrees[1]) {
    throw Error(ErrorCode::DegenerateRegularValue,
                "regular values disagree (" + std::to_string(degrees[0]) + " vs " +
                    std::to_string(degrees[1]) + ") for " + f.name());
  }
  return degrees[0];
}

}  // namespace

int degree(const SelfMap& f) {
  if (f.space().kind() == SpaceKind::Sphere && f.space().parameter() == 1) return winding_number(f);
  if (f.space().kind() == SpaceKind::Sphere && f.space().parameter() == 2) return sphere_degree(f);
  throw Error(ErrorCode::Unsupported, "degree is implemented on S1 and S2 only, got " + f.space().id());
}

}  // namespace confsec
