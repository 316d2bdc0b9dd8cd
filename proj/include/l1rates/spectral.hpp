#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "l1rates/error.hpp"

namespace l1rates {

inline constexpr double kPi = std::numbers::pi;

enum class ManifoldKind { Circle, Interval, Sphere };

inline std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Circle: return "circle";
    case ManifoldKind::Interval: return "interval";
    case ManifoldKind::Sphere: return "sphere";
  }
  return "unknown";
}

struct Manifold {
  ManifoldKind kind = ManifoldKind::Circle;

  double measure_total() const {
    switch (kind) {
      case ManifoldKind::Circle: return 2.0 * kPi;
      case ManifoldKind::Interval: return 2.0;
      case ManifoldKind::Sphere: return 4.0 * kPi;
    }
    return 0.0;
  }
  bool operator==(const Manifold&) const = default;
};

// Circle: a = angle. Interval: a = abscissa. Sphere: a = colatitude, b = azimuth.
struct Point {
  double a = 0.0;
  double b = 0.0;
};

inline Eigen::Vector3d to_cartesian(const Point& p) {
  const double s = std::sin(p.a);
  return {s * std::cos(p.b), s * std::sin(p.b), std::cos(p.a)};
}

inline Point from_cartesian(const Eigen::Vector3d& v) {
  const Eigen::Vector3d u = v.normalized();
  return {std::acos(std::clamp(u.z(), -1.0, 1.0)), std::atan2(u.y(), u.x())};
}

struct Grid {
  Manifold manifold;
  std::vector<Point> nodes;
  Eigen::VectorXd weights;

  std::size_t size() const { return nodes.size(); }
};

// Gauss–Legendre nodes (ascending) and weights on [-1, 1].
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw InputError("gauss_legendre: n must be positive");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

// P_0..P_m at real x.
inline void legendre_all(int m, double x, double* out) {
  out[0] = 1.0;
  if (m >= 1) out[1] = x;
  for (int k = 1; k < m; ++k) out[k + 1] = ((2.0 * k + 1.0) * x * out[k] - k * out[k - 1]) / (k + 1.0);
}

inline std::complex<double> legendre_eval(int m, std::complex<double> z) {
  if (m < 0) throw InputError("legendre_eval: degree must be non-negative");
  if (m == 0) return 1.0;
  std::complex<double> p0 = 1.0, p1 = z;
  for (int k = 1; k < m; ++k) {
    const std::complex<double> p2 = ((2.0 * k + 1.0) * z * p1 - static_cast<double>(k) * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

inline double legendre_eval(int m, double x) { return legendre_eval(m, std::complex<double>(x, 0.0)).real(); }

inline int sphere_index(int l, int m) { return l * l + l + m; }

// Normalised associated Legendre factor of each real harmonic: out[l^2 + l ± m] = P̄_l^m(cos θ).
inline void sphere_legendre(int L, double theta, double* out) {
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  std::vector<double> pmm(L + 1);
  pmm[0] = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 1; m <= L; ++m) pmm[m] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * pmm[m - 1];
  for (int m = 0; m <= L; ++m) {
    double prev2 = 0.0, prev = pmm[m];
    for (int l = m; l <= L; ++l) {
      double cur;
      if (l == m) {
        cur = pmm[m];
      } else if (l == m + 1) {
        cur = std::sqrt(2.0 * m + 3.0) * ct * pmm[m];
      } else {
        const double ll = l, mm = m;
        const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
        const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
        cur = a * (ct * prev - b * prev2);
      }
      if (l > m) {
        prev2 = prev;
        prev = cur;
      }
      out[sphere_index(l, m)] = cur;
      out[sphere_index(l, -m)] = cur;
    }
  }
}

// Azimuthal factor of the real harmonic of order m: 1, √2 cos(mφ) or √2 sin(|m|φ).
inline double sphere_trig(int m, double phi) {
  if (m == 0) return 1.0;
  return m > 0 ? std::sqrt(2.0) * std::cos(m * phi) : std::sqrt(2.0) * std::sin(-m * phi);
}

// Real orthonormal spherical harmonics, index l^2 + l + m.
inline void sphere_basis(int L, double theta, double phi, double* out) {
  sphere_legendre(L, theta, out);
  for (int l = 0; l <= L; ++l)
    for (int m = -l; m <= l; ++m) out[sphere_index(l, m)] *= sphere_trig(m, phi);
}

class SpectralSpace {
 public:
  // Uniform grid; default 4(N+1) nodes.
  static std::shared_ptr<const SpectralSpace> circle(int bandwidth, int num_nodes = 0) {
    if (bandwidth < 0) throw InputError("circle: bandwidth must be non-negative");
    if (num_nodes == 0) num_nodes = 4 * (bandwidth + 1);
    if (num_nodes < 2 * bandwidth + 1) throw InputError("circle: need at least 2N+1 nodes");
    Grid g;
    g.manifold = {ManifoldKind::Circle};
    g.nodes.resize(num_nodes);
    g.weights = Eigen::VectorXd::Constant(num_nodes, 2.0 * kPi / num_nodes);
    for (int i = 0; i < num_nodes; ++i) g.nodes[i] = {2.0 * kPi * i / num_nodes, 0.0};
    return std::shared_ptr<const SpectralSpace>(new SpectralSpace(std::move(g), bandwidth));
  }

  // Gauss–Legendre grid; default 2N+2 nodes.
  static std::shared_ptr<const SpectralSpace> interval(int bandwidth, int num_nodes = 0) {
    if (bandwidth < 0) throw InputError("interval: bandwidth must be non-negative");
    if (num_nodes == 0) num_nodes = 2 * bandwidth + 2;
    if (num_nodes < 2 * bandwidth + 1) throw InputError("interval: need at least 2N+1 nodes");
    std::vector<double> x, w;
    gauss_legendre(num_nodes, x, w);
    Grid g;
    g.manifold = {ManifoldKind::Interval};
    g.nodes.resize(num_nodes);
    g.weights.resize(num_nodes);
    for (int i = 0; i < num_nodes; ++i) {
      g.nodes[i] = {x[i], 0.0};
      g.weights[i] = w[i];
    }
    return std::shared_ptr<const SpectralSpace>(new SpectralSpace(std::move(g), bandwidth));
  }

  // (Lq+1) Gauss–Legendre colatitudes x (2Lq+2) azimuths; Lq defaults to L.
  static std::shared_ptr<const SpectralSpace> sphere(int max_degree, int quad_degree = 0) {
    if (max_degree < 0) throw InputError("sphere: max_degree must be non-negative");
    if (quad_degree == 0) quad_degree = max_degree;
    if (quad_degree < max_degree) throw InputError("sphere: quad_degree below max_degree");
    const int nt = quad_degree + 1, np = 2 * quad_degree + 2;
    std::vector<double> x, w;
    gauss_legendre(nt, x, w);
    Grid g;
    g.manifold = {ManifoldKind::Sphere};
    g.nodes.reserve(nt * np);
    g.weights.resize(nt * np);
    int idx = 0;
    for (int i = 0; i < nt; ++i) {
      for (int j = 0; j < np; ++j) {
        g.nodes.push_back({std::acos(x[i]), 2.0 * kPi * j / np});
        g.weights[idx++] = w[i] * 2.0 * kPi / np;
      }
    }
    return std::shared_ptr<const SpectralSpace>(new SpectralSpace(std::move(g), max_degree, nt));
  }

  const Grid& grid() const { return grid_; }
  const Manifold& manifold() const { return grid_.manifold; }
  ManifoldKind kind() const { return grid_.manifold.kind; }
  int bandwidth() const { return bandwidth_; }
  int size() const { return static_cast<int>(degree_.size()); }
  int degree(int k) const { return degree_[k]; }
  const std::vector<int>& degrees() const { return degree_; }

  // Nodal values = synthesis() * coeffs.
  const Eigen::MatrixXd& synthesis() const { return synthesis_; }
  // coeffs = analysis() * values (quadrature inner products).
  const Eigen::MatrixXd& analysis() const { return analysis_; }

  Eigen::VectorXd basis_at(const Point& p) const {
    Eigen::VectorXd out(size());
    switch (kind()) {
      case ManifoldKind::Circle: {
        out[0] = 1.0 / std::sqrt(2.0 * kPi);
        const double s = 1.0 / std::sqrt(kPi);
        for (int n = 1; n <= bandwidth_; ++n) {
          out[2 * n - 1] = s * std::cos(n * p.a);
          out[2 * n] = s * std::sin(n * p.a);
        }
        break;
      }
      case ManifoldKind::Interval: {
        legendre_all(bandwidth_, p.a, out.data());
        for (int j = 0; j <= bandwidth_; ++j) out[j] *= std::sqrt(j + 0.5);
        break;
      }
      case ManifoldKind::Sphere:
        sphere_basis(bandwidth_, p.a, p.b, out.data());
        break;
    }
    return out;
  }

  // Φ[:, cols]ᵀ diag(d) Φ[:, cols]. On the sphere the basis factors over the tensor grid as
  // P̄_l^m(θ_i) · trig_m(φ_j), so the product is assembled per pair of orders.
  Eigen::MatrixXd weighted_gram(const Eigen::VectorXd& d, const std::vector<int>& cols) const {
    const Eigen::Index nc = static_cast<Eigen::Index>(cols.size());
    if (kind() != ManifoldKind::Sphere || nt_ == 0) {
      Eigen::MatrixXd B(synthesis_.rows(), nc);
      for (Eigen::Index c = 0; c < nc; ++c) B.col(c) = synthesis_.col(cols[c]).cwiseProduct(d);
      Eigen::MatrixXd S(synthesis_.rows(), nc);
      for (Eigen::Index c = 0; c < nc; ++c) S.col(c) = synthesis_.col(cols[c]);
      return S.transpose() * B;
    }
    const int L = bandwidth_, no = 2 * L + 1;
    const int np = static_cast<int>(grid_.size()) / nt_;
    std::vector<std::vector<Eigen::Index>> pos(no);
    for (Eigen::Index c = 0; c < nc; ++c) pos[order_[cols[c]] + L].push_back(c);
    // E_i(m, m') = Σ_j d_ij T_j(m) T_j(m')
    std::vector<Eigen::MatrixXd> E(nt_);
    for (int i = 0; i < nt_; ++i) {
      const Eigen::VectorXd di = d.segment(static_cast<Eigen::Index>(i) * np, np);
      E[i] = trig_.transpose() * di.asDiagonal() * trig_;
    }
    Eigen::MatrixXd M(nc, nc);
    Eigen::VectorXd e(nt_);
    for (int a = 0; a < no; ++a) {
      if (pos[a].empty()) continue;
      Eigen::MatrixXd Ta(nt_, pos[a].size());
      for (std::size_t u = 0; u < pos[a].size(); ++u) Ta.col(u) = theta_.col(cols[pos[a][u]]);
      for (int b = 0; b <= a; ++b) {
        if (pos[b].empty()) continue;
        Eigen::MatrixXd Tb(nt_, pos[b].size());
        for (std::size_t v = 0; v < pos[b].size(); ++v) Tb.col(v) = theta_.col(cols[pos[b][v]]);
        for (int i = 0; i < nt_; ++i) e[i] = E[i](a, b);
        const Eigen::MatrixXd blk = Ta.transpose() * e.asDiagonal() * Tb;
        for (std::size_t u = 0; u < pos[a].size(); ++u)
          for (std::size_t v = 0; v < pos[b].size(); ++v) {
            M(pos[a][u], pos[b][v]) = blk(u, v);
            M(pos[b][v], pos[a][u]) = blk(u, v);
          }
      }
    }
    return M;
  }

  bool compatible(const SpectralSpace& other) const {
    return this == &other || (kind() == other.kind() && bandwidth_ == other.bandwidth_ &&
                              grid_.size() == other.grid_.size());
  }

 private:
  SpectralSpace(Grid grid, int bandwidth, int nt = 0) : grid_(std::move(grid)), bandwidth_(bandwidth), nt_(nt) {
    switch (kind()) {
      case ManifoldKind::Circle:
        degree_.push_back(0);
        for (int n = 1; n <= bandwidth_; ++n) {
          degree_.push_back(n);
          degree_.push_back(n);
        }
        break;
      case ManifoldKind::Interval:
        for (int j = 0; j <= bandwidth_; ++j) degree_.push_back(j);
        break;
      case ManifoldKind::Sphere:
        for (int l = 0; l <= bandwidth_; ++l)
          for (int m = -l; m <= l; ++m) {
            degree_.push_back(l);
            order_.push_back(m);
          }
        break;
    }
    if (kind() == ManifoldKind::Sphere && nt_ > 0) {
      const int np = static_cast<int>(grid_.size()) / nt_;
      theta_.resize(nt_, size());
      for (int i = 0; i < nt_; ++i) {
        Eigen::VectorXd row(size());
        sphere_legendre(bandwidth_, grid_.nodes[static_cast<std::size_t>(i) * np].a, row.data());
        theta_.row(i) = row.transpose();
      }
      trig_.resize(np, 2 * bandwidth_ + 1);
      for (int j = 0; j < np; ++j)
        for (int m = -bandwidth_; m <= bandwidth_; ++m) trig_(j, m + bandwidth_) = sphere_trig(m, grid_.nodes[j].b);
    }
    const int nn = static_cast<int>(grid_.size());
    synthesis_.resize(nn, size());
    for (int i = 0; i < nn; ++i) synthesis_.row(i) = basis_at(grid_.nodes[i]).transpose();
    analysis_ = synthesis_.transpose() * grid_.weights.asDiagonal();
  }

  Grid grid_;
  int bandwidth_;
  int nt_ = 0;  // colatitude rows of a tensor sphere grid
  std::vector<int> degree_;
  std::vector<int> order_;
  Eigen::MatrixXd theta_, trig_;
  Eigen::MatrixXd synthesis_;
  Eigen::MatrixXd analysis_;
};

using SpacePtr = std::shared_ptr<const SpectralSpace>;

// Coefficients in the real orthonormal basis of the space.
class SpectralFunction {
 public:
  SpectralFunction() = default;
  SpectralFunction(SpacePtr space, Eigen::VectorXd coeffs) : space_(std::move(space)), coeffs_(std::move(coeffs)) {
    if (!space_) throw InputError("SpectralFunction: null space");
    if (coeffs_.size() != space_->size()) throw InputError("SpectralFunction: coefficient count mismatch");
  }

  static SpectralFunction zero(SpacePtr space) {
    const int n = space->size();
    return SpectralFunction(std::move(space), Eigen::VectorXd::Zero(n));
  }

  const SpacePtr& space() const { return space_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }
  const Grid& grid() const { return space_->grid(); }

  Eigen::VectorXd values() const { return space_->synthesis() * coeffs_; }
  double eval(const Point& p) const { return space_->basis_at(p).dot(coeffs_); }

 private:
  SpacePtr space_;
  Eigen::VectorXd coeffs_;
};

inline void require_same_space(const SpectralFunction& f, const SpectralFunction& g, const char* who) {
  if (!f.space() || !g.space() || !f.space()->compatible(*g.space()))
    throw InputError(std::string(who) + ": functions live on different grids");
}

inline SpectralFunction analyze(const Eigen::VectorXd& values, const SpacePtr& space) {
  if (values.size() != static_cast<Eigen::Index>(space->grid().size()))
    throw InputError("analyze: value count does not match node count");
  return SpectralFunction(space, space->analysis() * values);
}

inline Eigen::VectorXd synthesize(const SpectralFunction& f) {
  if (!f.coeffs().allFinite()) throw InputError("synthesize: non-finite coefficients");
  return f.values();
}

// Zero every coefficient of degree above m.
inline SpectralFunction project(const SpectralFunction& f, int m) {
  if (m < 0) throw InputError("project: m must be non-negative");
  SpectralFunction out = f;
  const auto& deg = f.space()->degrees();
  for (int k = 0; k < out.space()->size(); ++k)
    if (deg[k] > m) out.coeffs()[k] = 0.0;
  return out;
}

inline double kernel_sup_bound(ManifoldKind kind, int m) {
  if (m < 0) throw InputError("kernel_sup_bound: m must be non-negative");
  const double mm = m;
  switch (kind) {
    case ManifoldKind::Circle: return (2.0 * mm + 1.0) / (2.0 * kPi);
    case ManifoldKind::Interval: return (mm + 1.0) * (mm + 1.0) / 2.0;
    case ManifoldKind::Sphere: return (mm + 1.0) * (mm + 1.0) / (4.0 * kPi);
  }
  return 0.0;
}

inline double l2_norm(const SpectralFunction& f) { return f.coeffs().norm(); }

inline double quadrature_l2_norm(const Eigen::VectorXd& values, const Grid& grid) {
  return std::sqrt(grid.weights.dot(values.cwiseAbs2()));
}

inline double l1_norm(const Eigen::VectorXd& values, const Grid& grid) { return grid.weights.dot(values.cwiseAbs()); }

inline double sup_norm(const Eigen::VectorXd& values) { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }

// ĝ(n) for g(x) = sum ĝ(n) e^{inx}.
inline std::complex<double> fourier_coeff(const SpectralFunction& f, int n) {
  if (f.space()->kind() != ManifoldKind::Circle) throw InputError("fourier_coeff: circle only");
  const int an = std::abs(n);
  if (an > f.space()->bandwidth()) return 0.0;
  const auto& c = f.coeffs();
  if (an == 0) return c[0] / std::sqrt(2.0 * kPi);
  const double s = 1.0 / (2.0 * std::sqrt(kPi));
  const double b = n > 0 ? -c[2 * an] : c[2 * an];
  return {s * c[2 * an - 1], s * b};
}

// hat[n] = ĝ(n) for n = 0..N; ĝ(-n) = conj(ĝ(n)).
inline SpectralFunction from_fourier(const SpacePtr& space, const std::vector<std::complex<double>>& hat) {
  if (space->kind() != ManifoldKind::Circle) throw InputError("from_fourier: circle only");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(space->size());
  const int n_max = std::min<int>(space->bandwidth(), static_cast<int>(hat.size()) - 1);
  if (n_max >= 0) c[0] = std::sqrt(2.0 * kPi) * hat[0].real();
  for (int n = 1; n <= n_max; ++n) {
    c[2 * n - 1] = 2.0 * std::sqrt(kPi) * hat[n].real();
    c[2 * n] = -2.0 * std::sqrt(kPi) * hat[n].imag();
  }
  return SpectralFunction(space, c);
}

// Maps values of a degree-<=N polynomial at the N+1 Chebyshev points cos(pi(j+1/2)/(N+1))
// to a_0..a_N with g = a_0/2 + sum a_n T_n.
inline Eigen::MatrixXd chebyshev_analysis_matrix(int N) {
  const int K = N + 1;
  Eigen::MatrixXd C(K, K);
  for (int n = 0; n < K; ++n)
    for (int j = 0; j < K; ++j) C(n, j) = 2.0 / K * std::cos(n * kPi * (j + 0.5) / K);
  return C;
}

inline std::vector<double> chebyshev_points(int N) {
  std::vector<double> t(N + 1);
  for (int j = 0; j <= N; ++j) t[j] = std::cos(kPi * (j + 0.5) / (N + 1));
  return t;
}

// Chebyshev coefficients of sum_l G_l P_l (unnormalised Legendre), as a matrix acting on G.
inline Eigen::MatrixXd legendre_series_to_chebyshev(int L) {
  const auto t = chebyshev_points(L);
  Eigen::MatrixXd P(L + 1, L + 1);
  std::vector<double> row(L + 1);
  for (int j = 0; j <= L; ++j) {
    legendre_all(L, t[j], row.data());
    for (int l = 0; l <= L; ++l) P(j, l) = row[l];
  }
  return chebyshev_analysis_matrix(L) * P;
}

inline Eigen::VectorXd chebyshev_coeffs(const SpectralFunction& f) {
  if (f.space()->kind() != ManifoldKind::Interval) throw InputError("chebyshev_coeffs: interval only");
  const int N = f.space()->bandwidth();
  const auto t = chebyshev_points(N);
  Eigen::VectorXd v(N + 1);
  for (int j = 0; j <= N; ++j) v[j] = f.eval({t[j], 0.0});
  return chebyshev_analysis_matrix(N) * v;
}

inline double chebyshev_eval(const Eigen::VectorXd& a, double x) {
  double b1 = 0.0, b2 = 0.0;
  for (Eigen::Index n = a.size() - 1; n >= 1; --n) {
    const double b0 = 2.0 * x * b1 - b2 + a[n];
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + 0.5 * a[0];
}

inline SpectralFunction from_chebyshev(const SpacePtr& space, const Eigen::VectorXd& a) {
  if (space->kind() != ManifoldKind::Interval) throw InputError("from_chebyshev: interval only");
  if (a.size() > space->bandwidth() + 1) throw InputError("from_chebyshev: degree exceeds bandwidth");
  const auto& nodes = space->grid().nodes;
  Eigen::VectorXd v(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) v[i] = chebyshev_eval(a, nodes[i].a);
  return analyze(v, space);
}

// Truncation a_0/2 + sum_{n<=m} a_n T_n (orthogonal for the Chebyshev weight, not plain L2).
inline SpectralFunction project_chebyshev(const SpectralFunction& f, int m) {
  if (m < 0) throw InputError("project_chebyshev: m must be non-negative");
  Eigen::VectorXd a = chebyshev_coeffs(f);
  for (Eigen::Index n = m + 1; n < a.size(); ++n) a[n] = 0.0;
  return from_chebyshev(f.space(), a);
}

inline double addition_formula_kernel(int m, const Eigen::Vector3d& x, const Eigen::Vector3d& y) {
  const double t = std::clamp(x.normalized().dot(y.normalized()), -1.0, 1.0);
  return (2.0 * m + 1.0) / (4.0 * kPi) * legendre_eval(m, t);
}

// Per-degree components G_l(x) = (Q_l g)(x); rows are nodes, columns degrees.
inline Eigen::MatrixXd degree_components(const SpectralFunction& g) {
  const auto& sp = *g.space();
  if (sp.kind() != ManifoldKind::Sphere) throw InputError("degree_components: sphere only");
  const int L = sp.bandwidth();
  Eigen::MatrixXd G(sp.grid().size(), L + 1);
  for (int l = 0; l <= L; ++l) {
    const int k0 = l * l, len = 2 * l + 1;
    G.col(l) = sp.synthesis().middleCols(k0, len) * g.coeffs().segment(k0, len);
  }
  return G;
}

// Mean of g over {y : <y,x> = t}.
inline double average_operator(const SpectralFunction& g, const Eigen::Vector3d& x_in, double t) {
  if (g.space()->kind() != ManifoldKind::Sphere) throw InputError("average_operator: sphere only");
  if (!(std::abs(t) <= 1.0)) throw InputError("average_operator: |t| must be <= 1");
  const Eigen::Vector3d x = x_in.normalized();
  if (t == 1.0) return g.eval(from_cartesian(x));
  if (t == -1.0) return g.eval(from_cartesian(-x));
  Eigen::Vector3d e1 = std::abs(x.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  e1 = (e1 - e1.dot(x) * x).normalized();
  const Eigen::Vector3d e2 = x.cross(e1);
  const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
  const int K = 2 * g.space()->bandwidth() + 2;
  double acc = 0.0;
  for (int j = 0; j < K; ++j) {
    const double ph = 2.0 * kPi * j / K;
    const Eigen::Vector3d y = t * x + s * (std::cos(ph) * e1 + std::sin(ph) * e2);
    acc += g.eval(from_cartesian(y));
  }
  return acc / K;
}

}  // namespace l1rates
