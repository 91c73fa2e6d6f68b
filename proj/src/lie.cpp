#include "prequant/lie.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "prequant/errors.hpp"

namespace prequant {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const std::complex<double> kI{0.0, 1.0};

std::array<Eigen::Matrix2cd, 3> pauli() {
  Eigen::Matrix2cd s1, s2, s3;
  s1 << 0, 1, 1, 0;
  s2 << 0, -kI, kI, 0;
  s3 << 1, 0, 0, -1;
  return {s1, s2, s3};
}

void require_concrete(const GroupSpec& g, const char* op) {
  if (!g.concrete()) throw CatalogError(std::string(op) + ": unsupported for " + g.id());
}

bool near_multiple(double x, double period, double tol) {
  return std::abs(x - period * std::round(x / period)) < tol;
}

}  // namespace

GroupSpec GroupSpec::circle() { return GroupSpec{GroupKind::Circle, 0, 1, 1, {}, 1, true}; }

GroupSpec GroupSpec::torus(int n) {
  if (n < 1) throw CatalogError("torus rank must be positive");
  return GroupSpec{GroupKind::Torus, n, n, n, {}, n, true};
}

GroupSpec GroupSpec::so3() { return GroupSpec{GroupKind::SO3, 0, 3, 0, {2}, 0, true}; }

GroupSpec GroupSpec::su2() { return GroupSpec{GroupKind::SU2, 0, 3, 0, {}, 0, true}; }

GroupSpec GroupSpec::abstract(int free_rank, std::vector<int> torsion) {
  if (free_rank < 0) throw CatalogError("free rank must be non-negative");
  for (int d : torsion) {
    if (d < 2) throw CatalogError("torsion invariants must be >= 2");
  }
  return GroupSpec{GroupKind::AbstractCompact, 0, 0, free_rank, std::move(torsion), free_rank, true};
}

std::string GroupSpec::id() const {
  switch (kind) {
    case GroupKind::Circle:
      return "circle";
    case GroupKind::Torus:
      return "torus:" + std::to_string(torus_rank);
    case GroupKind::SO3:
      return "so3";
    case GroupKind::SU2:
      return "su2";
    case GroupKind::AbstractCompact: {
      std::ostringstream os;
      os << "abstract:k=" << pi1_free_rank << ";torsion=";
      for (std::size_t i = 0; i < pi1_torsion.size(); ++i) os << (i ? "," : "") << pi1_torsion[i];
      return os.str();
    }
  }
  return "?";
}

namespace {

int parse_int(std::string_view s, std::string_view whole) {
  if (s.empty()) throw CatalogError("malformed group id: " + std::string(whole));
  int value = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw CatalogError("malformed group id: " + std::string(whole));
    value = value * 10 + (c - '0');
  }
  return value;
}

}  // namespace

GroupSpec parse_group_id(std::string_view id) {
  if (id == "circle") return GroupSpec::circle();
  if (id == "so3") return GroupSpec::so3();
  if (id == "su2") return GroupSpec::su2();
  if (id.starts_with("torus:")) return GroupSpec::torus(parse_int(id.substr(6), id));
  if (id.starts_with("abstract:")) {
    std::string_view rest = id.substr(9);
    int k = 0;
    std::vector<int> torsion;
    while (!rest.empty()) {
      const auto semi = rest.find(';');
      std::string_view item = rest.substr(0, semi);
      rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
      if (item.starts_with("k=")) {
        k = parse_int(item.substr(2), id);
      } else if (item.starts_with("torsion=")) {
        std::string_view list = item.substr(8);
        while (!list.empty()) {
          const auto comma = list.find(',');
          torsion.push_back(parse_int(list.substr(0, comma), id));
          list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 1);
        }
      } else if (!item.empty()) {
        throw CatalogError("malformed group id: " + std::string(id));
      }
    }
    return GroupSpec::abstract(k, std::move(torsion));
  }
  throw CatalogError("unknown group id: " + std::string(id));
}

AlgebraElement::AlgebraElement(std::initializer_list<double> coords) : coords_(static_cast<Eigen::Index>(coords.size())) {
  Eigen::Index i = 0;
  for (double c : coords) coords_[i++] = c;
}

AlgebraElement AlgebraElement::zero(const GroupSpec& g) {
  require_concrete(g, "zero");
  return AlgebraElement(Eigen::VectorXd::Zero(g.algebra_dim));
}

AlgebraElement AlgebraElement::basis(const GroupSpec& g, int i) {
  require_concrete(g, "basis");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(g.algebra_dim);
  v[i] = 1.0;
  return AlgebraElement(std::move(v));
}

Eigen::Vector3d AlgebraElement::vec3() const {
  if (coords_.size() != 3) throw PreconditionError("algebra element is not three-dimensional");
  return {coords_[0], coords_[1], coords_[2]};
}

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
  if (a.size() != b.size()) throw PreconditionError("algebra elements of different dimension");
  return AlgebraElement(a.coords_ + b.coords_);
}

AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
  if (a.size() != b.size()) throw PreconditionError("algebra elements of different dimension");
  return AlgebraElement(a.coords_ - b.coords_);
}

AlgebraElement operator-(const AlgebraElement& a) { return AlgebraElement(-a.coords_); }

AlgebraElement operator*(double s, const AlgebraElement& a) { return AlgebraElement(s * a.coords_); }

void check_dimension(const GroupSpec& g, const AlgebraElement& x) {
  require_concrete(g, "algebra");
  if (x.size() != g.algebra_dim) {
    throw PreconditionError("algebra element has " + std::to_string(x.size()) + " coordinates, " + g.id() +
                            " needs " + std::to_string(g.algebra_dim));
  }
}

Eigen::Matrix3d so3_matrix(const Eigen::Vector3d& v) {
  // X = [[0, a, b], [-a, 0, c], [-b, -c, 0]] with v = (c, -b, a).
  const double a = v[2], b = -v[1], c = v[0];
  Eigen::Matrix3d x;
  x << 0, a, b, -a, 0, c, -b, -c, 0;
  return x;
}

Eigen::Vector3d so3_vector(const Eigen::Matrix3d& x) { return {x(1, 2), -x(0, 2), x(0, 1)}; }

Eigen::Matrix2cd su2_matrix(const Eigen::Vector3d& v) {
  const auto s = pauli();
  return (0.5 * kI) * (v[0] * s[0] + v[1] * s[1] + v[2] * s[2]);
}

Eigen::Vector3d su2_vector(const Eigen::Matrix2cd& x) {
  const auto s = pauli();
  return {(s[0] * x).trace().imag(), (s[1] * x).trace().imag(), (s[2] * x).trace().imag()};
}

Eigen::Matrix3d su2_to_so3(const Eigen::Matrix2cd& u) {
  const auto s = pauli();
  Eigen::Matrix3d r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r(i, j) = 0.5 * (s[i] * u * s[j] * u.adjoint()).trace().real();
  }
  return r;
}

Eigen::Matrix3d rotation_of(const GroupElement& g) {
  if (g.kind == GroupKind::SO3) return g.matrix.real();
  if (g.kind == GroupKind::SU2) return su2_to_so3(g.matrix);
  throw PreconditionError("rotation_of: element is neither SO3 nor SU2");
}

double circle_angle(const GroupElement& g) {
  if (g.kind != GroupKind::Circle) throw PreconditionError("circle_angle: not a circle element");
  return std::arg(g.matrix(0, 0));
}

GroupElement identity(const GroupSpec& g) {
  require_concrete(g, "identity");
  const int n = g.kind == GroupKind::SO3 ? 3 : g.kind == GroupKind::SU2 ? 2 : g.algebra_dim;
  return {g.kind, Eigen::MatrixXcd::Identity(n, n)};
}

GroupElement exp_group(const GroupSpec& g, const AlgebraElement& x) {
  check_dimension(g, x);
  switch (g.kind) {
    case GroupKind::Circle:
    case GroupKind::Torus: {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(g.algebra_dim, g.algebra_dim);
      for (int i = 0; i < g.algebra_dim; ++i) m(i, i) = std::polar(1.0, x[i]);
      return {g.kind, m};
    }
    case GroupKind::SO3: {
      // Rodrigues on the skew matrix: exp(K) = 1 + sin(t)/t K + (1 - cos t)/t^2 K^2.
      const Eigen::Vector3d v = x.vec3();
      const Eigen::Matrix3d k = so3_matrix(v);
      const double t = v.norm();
      double s1, s2;
      if (t < 1e-6) {
        s1 = 1.0 - t * t / 6.0;
        s2 = 0.5 - t * t / 24.0;
      } else {
        s1 = std::sin(t) / t;
        s2 = (1.0 - std::cos(t)) / (t * t);
      }
      const Eigen::Matrix3d r = Eigen::Matrix3d::Identity() + s1 * k + s2 * k * k;
      return {g.kind, r.cast<std::complex<double>>()};
    }
    case GroupKind::SU2: {
      const Eigen::Vector3d v = x.vec3();
      const double t = v.norm();
      const double c = std::cos(0.5 * t);
      const double s = t < 1e-8 ? 0.5 - t * t / 48.0 : std::sin(0.5 * t) / t;
      const auto p = pauli();
      Eigen::Matrix2cd u = c * Eigen::Matrix2cd::Identity() + (kI * s) * (v[0] * p[0] + v[1] * p[1] + v[2] * p[2]);
      return {g.kind, u};
    }
    case GroupKind::AbstractCompact:
      break;
  }
  throw CatalogError("exp_group: unsupported group " + g.id());
}

double identity_distance(const GroupElement& g) {
  const auto n = g.matrix.rows();
  return (g.matrix - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

bool in_ker_exp(const GroupSpec& g, const AlgebraElement& x, double tol) {
  check_dimension(g, x);
  switch (g.kind) {
    case GroupKind::Circle:
    case GroupKind::Torus:
      for (int i = 0; i < x.size(); ++i) {
        if (!near_multiple(x[i], kTwoPi, tol)) return false;
      }
      return true;
    case GroupKind::SO3:
      return near_multiple(x.norm(), kTwoPi, tol);
    case GroupKind::SU2:
      return near_multiple(x.norm(), 2.0 * kTwoPi, tol);
    case GroupKind::AbstractCompact:
      break;
  }
  throw CatalogError("in_ker_exp: unsupported group " + g.id());
}

bool in_torsion_cone(const GroupSpec& g, const AlgebraElement& x, double tol) {
  if (!in_ker_exp(g, x, tol)) throw PreconditionError("in_torsion_cone: element is not in ker exp");
  switch (g.kind) {
    case GroupKind::Circle:
    case GroupKind::Torus:
      // The universal cover is R^n, whose exponential kernel is {0}.
      return x.is_zero(tol);
    case GroupKind::SO3:  // 2X lies in ker exp of SU(2)
    case GroupKind::SU2:  // simply connected
      return true;
    case GroupKind::AbstractCompact:
      break;
  }
  throw CatalogError("in_torsion_cone: unsupported group " + g.id());
}

std::vector<AlgebraElement> ker_exp_generators(const GroupSpec& g) {
  require_concrete(g, "ker_exp_generators");
  const double scale = g.kind == GroupKind::SU2 ? 2.0 * kTwoPi : kTwoPi;
  std::vector<AlgebraElement> out;
  for (int i = 0; i < g.algebra_dim; ++i) out.push_back(scale * AlgebraElement::basis(g, i));
  return out;
}

std::vector<AlgebraElement> free_generators(const GroupSpec& g) {
  require_concrete(g, "free_generators");
  if (g.abelian()) return ker_exp_generators(g);
  return {};
}

KerExpSampler::KerExpSampler(GroupSpec g, std::uint64_t seed) : group_(std::move(g)), rng_(seed) {
  require_concrete(group_, "KerExpSampler");
}

AlgebraElement KerExpSampler::next() {
  if (group_.abelian()) {
    std::uniform_int_distribution<int> coef(-3, 3);
    Eigen::VectorXd v(group_.algebra_dim);
    do {
      for (int i = 0; i < group_.algebra_dim; ++i) v[i] = kTwoPi * coef(rng_);
    } while (v.isZero());
    return AlgebraElement(v);
  }
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> turns(1, 3);
  Eigen::Vector3d axis;
  do {
    axis = {normal(rng_), normal(rng_), normal(rng_)};
  } while (axis.norm() < 1e-3);
  const double period = group_.kind == GroupKind::SU2 ? 2.0 * kTwoPi : kTwoPi;
  const Eigen::Vector3d v = (period * turns(rng_)) * axis.normalized();
  return AlgebraElement{v[0], v[1], v[2]};
}

std::vector<AlgebraElement> KerExpSampler::take(int n) {
  std::vector<AlgebraElement> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(next());
  return out;
}

AlgebraElement random_algebra_element(const GroupSpec& g, std::mt19937_64& rng, double scale) {
  require_concrete(g, "random_algebra_element");
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd v(g.algebra_dim);
  for (int i = 0; i < g.algebra_dim; ++i) v[i] = u(rng);
  return AlgebraElement(v);
}

int torsion_exponent(const GroupSpec& g) {
  int r = 1;
  for (int d : g.pi1_torsion) r = std::lcm(r, d);
  return r;
}

AlgebraElement bracket(const GroupSpec& g, const AlgebraElement& x, const AlgebraElement& y) {
  check_dimension(g, x);
  check_dimension(g, y);
  switch (g.kind) {
    case GroupKind::Circle:
    case GroupKind::Torus:
      return AlgebraElement::zero(g);
    case GroupKind::SO3: {
      const Eigen::Matrix3d a = so3_matrix(x.vec3()), b = so3_matrix(y.vec3());
      const Eigen::Vector3d v = so3_vector(a * b - b * a);
      return AlgebraElement{v[0], v[1], v[2]};
    }
    case GroupKind::SU2: {
      const Eigen::Matrix2cd a = su2_matrix(x.vec3()), b = su2_matrix(y.vec3());
      const Eigen::Vector3d v = su2_vector(a * b - b * a);
      return AlgebraElement{v[0], v[1], v[2]};
    }
    case GroupKind::AbstractCompact:
      break;
  }
  throw CatalogError("bracket: unsupported group " + g.id());
}

AlgebraElement adjoint_action(const GroupSpec& g, const GroupElement& phi, const AlgebraElement& x) {
  check_dimension(g, x);
  if (phi.kind != g.kind) throw PreconditionError("adjoint_action: element belongs to another group");
  switch (g.kind) {
    case GroupKind::Circle:
    case GroupKind::Torus:
      return x;
    case GroupKind::SO3: {
      const Eigen::Matrix3d r = phi.matrix.real();
      const Eigen::Vector3d v = so3_vector(r * so3_matrix(x.vec3()) * r.transpose());
      return AlgebraElement{v[0], v[1], v[2]};
    }
    case GroupKind::SU2: {
      const Eigen::Matrix2cd u = phi.matrix;
      const Eigen::Vector3d v = su2_vector(u * su2_matrix(x.vec3()) * u.adjoint());
      return AlgebraElement{v[0], v[1], v[2]};
    }
    case GroupKind::AbstractCompact:
      break;
  }
  throw CatalogError("adjoint_action: unsupported group " + g.id());
}

double h1_pairing(const GroupSpec& g, const std::vector<double>& b, const AlgebraElement& x) {
  check_dimension(g, x);
  if (static_cast<int>(b.size()) != g.h1_algebra_dim) {
    throw PreconditionError("H^1 coefficient vector has wrong length for " + g.id());
  }
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) s += b[i] * x[static_cast<int>(i)];
  return s;
}

}  // namespace prequant
