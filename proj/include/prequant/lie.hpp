#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace prequant {

enum class GroupKind { Circle, Torus, SO3, SU2, AbstractCompact };

/// A compact connected Lie group from the closed catalog.
///
/// pi1_free_rank and pi1_torsion describe H_1(G, Z) = T_G + Z^k with
/// T_G = Z_{d_1} + ... + Z_{d_m}. AbstractCompact carries only that data and
/// supports nothing beyond torsion_exponent().
struct GroupSpec {
  GroupKind kind = GroupKind::Circle;
  int torus_rank = 0;
  int algebra_dim = 1;
  int pi1_free_rank = 1;
  std::vector<int> pi1_torsion;
  int h1_algebra_dim = 1;
  bool w_exponential = true;

  static GroupSpec circle();
  static GroupSpec torus(int n);
  static GroupSpec so3();
  static GroupSpec su2();
  static GroupSpec abstract(int free_rank, std::vector<int> torsion);

  /// Catalog string: "circle", "torus:n", "so3", "su2", "abstract:k=K;torsion=d1,d2".
  [[nodiscard]] std::string id() const;
  [[nodiscard]] bool concrete() const { return kind != GroupKind::AbstractCompact; }
  [[nodiscard]] bool abelian() const { return kind == GroupKind::Circle || kind == GroupKind::Torus; }

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

GroupSpec parse_group_id(std::string_view id);

/// Coordinates of an element of the Lie algebra in the catalog basis.
/// For SO3 and SU2 the three coordinates are the rotation vector v_X, so the
/// norm is the rotation angle of exp(X) acting on R^3.
class AlgebraElement {
 public:
  AlgebraElement() = default;
  explicit AlgebraElement(Eigen::VectorXd coords) : coords_(std::move(coords)) {}
  AlgebraElement(std::initializer_list<double> coords);

  static AlgebraElement zero(const GroupSpec& g);
  static AlgebraElement basis(const GroupSpec& g, int i);

  [[nodiscard]] const Eigen::VectorXd& coords() const { return coords_; }
  [[nodiscard]] int size() const { return static_cast<int>(coords_.size()); }
  [[nodiscard]] double operator[](int i) const { return coords_[i]; }
  [[nodiscard]] double norm() const { return coords_.norm(); }
  [[nodiscard]] bool is_zero(double tol = 0.0) const { return coords_.lpNorm<Eigen::Infinity>() <= tol; }
  [[nodiscard]] Eigen::Vector3d vec3() const;

  friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b);
  friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b);
  friend AlgebraElement operator-(const AlgebraElement& a);
  friend AlgebraElement operator*(double s, const AlgebraElement& a);
  friend AlgebraElement operator*(const AlgebraElement& a, double s) { return s * a; }

 private:
  Eigen::VectorXd coords_;
};

/// A group element as a unitary matrix: 1x1 phase for Circle, diagonal phases
/// for Torus(n), a real rotation for SO3, a 2x2 special unitary for SU2.
struct GroupElement {
  GroupKind kind = GroupKind::Circle;
  Eigen::MatrixXcd matrix;

  [[nodiscard]] GroupElement inverse() const { return {kind, matrix.adjoint()}; }
  friend GroupElement operator*(const GroupElement& a, const GroupElement& b) { return {a.kind, a.matrix * b.matrix}; }
};

void check_dimension(const GroupSpec& g, const AlgebraElement& x);

GroupElement identity(const GroupSpec& g);
GroupElement exp_group(const GroupSpec& g, const AlgebraElement& x);
/// Max-abs entry of (g - 1).
double identity_distance(const GroupElement& g);

bool in_ker_exp(const GroupSpec& g, const AlgebraElement& x, double tol = 1e-9);
/// Membership in the torsion cone: x in ker exp_G and n x in ker exp of the
/// universal cover for some n. Throws PreconditionError if x is not in ker exp_G.
bool in_torsion_cone(const GroupSpec& g, const AlgebraElement& x, double tol = 1e-9);

/// Deterministic generators of ker exp_G: the lattice basis for abelian groups,
/// axis-aligned minimal-norm elements for SO3 and SU2.
std::vector<AlgebraElement> ker_exp_generators(const GroupSpec& g);

/// Generators of ker exp_G whose images span the free part of H_1(G, Z).
std::vector<AlgebraElement> free_generators(const GroupSpec& g);

/// Random elements of ker exp_G. Abelian: nonzero integer combinations of the
/// lattice basis with coefficients in [-3, 3]. SO3: random axis, norm 2 pi k,
/// k in {1, 2, 3}. SU2: norm 4 pi k.
class KerExpSampler {
 public:
  KerExpSampler(GroupSpec g, std::uint64_t seed);
  AlgebraElement next();
  std::vector<AlgebraElement> take(int n);

 private:
  GroupSpec group_;
  std::mt19937_64 rng_;
};

/// Uniform coordinates in [-scale, scale].
AlgebraElement random_algebra_element(const GroupSpec& g, std::mt19937_64& rng, double scale = 1.0);

/// r_G: the exponent (lcm of invariants) of the torsion of H_1(G, Z).
int torsion_exponent(const GroupSpec& g);

AlgebraElement bracket(const GroupSpec& g, const AlgebraElement& x, const AlgebraElement& y);
AlgebraElement adjoint_action(const GroupSpec& g, const GroupElement& phi, const AlgebraElement& x);

/// Value of the H^1(g) element with coefficients b on x. The basis is the
/// coordinate functionals for abelian groups and empty for SO3/SU2.
double h1_pairing(const GroupSpec& g, const std::vector<double>& b, const AlgebraElement& x);

// Matrix realizations used by SO3/SU2.
Eigen::Matrix3d so3_matrix(const Eigen::Vector3d& v);
Eigen::Vector3d so3_vector(const Eigen::Matrix3d& x);
Eigen::Matrix2cd su2_matrix(const Eigen::Vector3d& v);
Eigen::Vector3d su2_vector(const Eigen::Matrix2cd& x);
/// Covering homomorphism SU(2) -> SO(3), compatible with exp on both sides.
Eigen::Matrix3d su2_to_so3(const Eigen::Matrix2cd& u);
/// The rotation of R^3 an SO3 or SU2 element induces.
Eigen::Matrix3d rotation_of(const GroupElement& g);
/// Angle in (-pi, pi] of a Circle element.
double circle_angle(const GroupElement& g);

}  // namespace prequant
