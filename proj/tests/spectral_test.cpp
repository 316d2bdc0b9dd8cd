#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "l1rates/spectral.hpp"
#include "l1rates/random.hpp"

using namespace l1rates;

namespace {

std::vector<SpacePtr> small_spaces() {
  return {SpectralSpace::circle(12), SpectralSpace::interval(12), SpectralSpace::sphere(6)};
}

Eigen::VectorXd random_coeffs(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) c[i] = rng.uniform(-1.0, 1.0);
  return c;
}

}  // namespace

TEST(GaussLegendre, IntegratesMonomialsExactly) {
  std::vector<double> x, w;
  gauss_legendre(10, x, w);
  for (int k = 0; k <= 19; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], k);
    const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
    EXPECT_NEAR(s, exact, 1e-14) << "k=" << k;
  }
}

TEST(Legendre, MatchesExplicitPolynomials) {
  for (double x : {-1.0, -0.7, -0.2, 0.0, 0.3, 0.9, 1.0}) {
    EXPECT_NEAR(legendre_eval(0, x), 1.0, 1e-15);
    EXPECT_NEAR(legendre_eval(1, x), x, 1e-15);
    EXPECT_NEAR(legendre_eval(2, x), 0.5 * (3 * x * x - 1), 1e-15);
    EXPECT_NEAR(legendre_eval(3, x), 0.5 * (5 * x * x * x - 3 * x), 1e-15);
    EXPECT_NEAR(legendre_eval(4, x), (35 * std::pow(x, 4) - 30 * x * x + 3) / 8, 1e-14);
  }
}

TEST(Legendre, IntegralIdentity) {
  std::vector<double> x, w;
  gauss_legendre(24, x, w);
  for (int m = 0; m <= 15; ++m)
    for (int n = 0; n <= 15; ++n) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * legendre_eval(m, x[i]) * legendre_eval(n, x[i]);
      EXPECT_NEAR(s, m == n ? 2.0 / (2 * n + 1) : 0.0, 1e-13) << m << "," << n;
    }
}

TEST(Legendre, BoundedOnBernsteinEllipse) {
  for (double r : {0.1, 0.5, 1.0})
    for (int m = 0; m <= 30; ++m)
      for (int j = 0; j < 90; ++j) {
        const std::complex<double> om = std::polar(std::exp(r), 2.0 * kPi * j / 90);
        EXPECT_LE(std::abs(legendre_eval(m, 0.5 * (om + 1.0 / om))), std::exp(m * r) * (1 + 1e-12));
      }
}

TEST(SpectralSpace, BasisIsOrthonormalUnderQuadrature) {
  for (const auto& sp : small_spaces()) {
    const Eigen::MatrixXd& P = sp->synthesis();
    const Eigen::MatrixXd G = P.transpose() * sp->grid().weights.asDiagonal() * P;
    EXPECT_LT((G - Eigen::MatrixXd::Identity(sp->size(), sp->size())).cwiseAbs().maxCoeff(), 1e-12)
        << to_string(sp->kind());
  }
}

TEST(SpectralSpace, AnalysisInvertsSynthesis) {
  for (const auto& sp : small_spaces()) {
    const Eigen::VectorXd c = random_coeffs(sp->size(), 7);
    const SpectralFunction f(sp, c);
    const SpectralFunction back = analyze(synthesize(f), sp);
    EXPECT_LT((back.coeffs() - c).cwiseAbs().maxCoeff(), 1e-12) << to_string(sp->kind());
  }
}

TEST(SpectralSpace, PointEvaluationMatchesNodalValues) {
  for (const auto& sp : small_spaces()) {
    const SpectralFunction f(sp, random_coeffs(sp->size(), 8));
    const Eigen::VectorXd v = f.values();
    for (std::size_t i = 0; i < sp->grid().size(); i += 7) EXPECT_NEAR(f.eval(sp->grid().nodes[i]), v[i], 1e-12);
  }
}

TEST(SpectralSpace, ProjectZeroesHighDegrees) {
  const auto sp = SpectralSpace::sphere(5);
  const SpectralFunction f(sp, random_coeffs(sp->size(), 9));
  const SpectralFunction p = project(f, 2);
  for (int k = 0; k < sp->size(); ++k) EXPECT_EQ(p.coeffs()[k], sp->degree(k) <= 2 ? f.coeffs()[k] : 0.0);
}

TEST(SphereBasis, MatchesExplicitLowDegreeHarmonics) {
  const double a = std::sqrt(3.0 / (4.0 * kPi));
  std::vector<double> y(9);
  for (double th : {0.3, 1.1, 2.5})
    for (double ph : {0.0, 0.7, 4.0}) {
      sphere_basis(2, th, ph, y.data());
      EXPECT_NEAR(y[sphere_index(0, 0)], 1.0 / std::sqrt(4.0 * kPi), 1e-14);
      EXPECT_NEAR(y[sphere_index(1, 0)], a * std::cos(th), 1e-14);
      EXPECT_NEAR(y[sphere_index(1, 1)], a * std::sin(th) * std::cos(ph), 1e-14);
      EXPECT_NEAR(y[sphere_index(1, -1)], a * std::sin(th) * std::sin(ph), 1e-14);
      const double c = std::cos(th);
      EXPECT_NEAR(y[sphere_index(2, 0)], std::sqrt(5.0 / (16.0 * kPi)) * (3 * c * c - 1), 1e-14);
      EXPECT_NEAR(y[sphere_index(2, 2)], std::sqrt(15.0 / (16.0 * kPi)) * std::pow(std::sin(th), 2) * std::cos(2 * ph),
                  1e-14);
    }
}

TEST(SphereBasis, AdditionFormula) {
  Rng rng(11);
  std::vector<double> bx(121), by(121);
  for (int t = 0; t < 20; ++t) {
    const Point x{std::acos(rng.uniform(-1, 1)), rng.uniform(0, 2 * kPi)};
    const Point y{std::acos(rng.uniform(-1, 1)), rng.uniform(0, 2 * kPi)};
    sphere_basis(10, x.a, x.b, bx.data());
    sphere_basis(10, y.a, y.b, by.data());
    for (int m = 0; m <= 10; ++m) {
      double s = 0.0;
      for (int k = -m; k <= m; ++k) s += bx[sphere_index(m, k)] * by[sphere_index(m, k)];
      EXPECT_NEAR(s, addition_formula_kernel(m, to_cartesian(x), to_cartesian(y)), 1e-12);
    }
  }
}

TEST(SpectralSpace, WeightedGramMatchesDenseProduct) {
  for (const auto& sp : {SpectralSpace::sphere(7, 9), SpectralSpace::circle(10)}) {
    Rng rng(12);
    Eigen::VectorXd d(sp->grid().size());
    for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = rng.uniform(0.1, 3.0);
    std::vector<int> cols;
    for (int k = 0; k < sp->size(); ++k)
      if (k % 3 != 1) cols.push_back(k);
    Eigen::MatrixXd S(sp->grid().size(), cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) S.col(c) = sp->synthesis().col(cols[c]);
    const Eigen::MatrixXd ref = S.transpose() * d.asDiagonal() * S;
    EXPECT_LT((sp->weighted_gram(d, cols) - ref).cwiseAbs().maxCoeff(), 1e-12 * ref.cwiseAbs().maxCoeff());
  }
}

TEST(Fourier, RoundTrip) {
  const auto sp = SpectralSpace::circle(8);
  const SpectralFunction f(sp, random_coeffs(sp->size(), 13));
  std::vector<std::complex<double>> hat(9);
  for (int n = 0; n <= 8; ++n) hat[n] = fourier_coeff(f, n);
  EXPECT_LT((from_fourier(sp, hat).coeffs() - f.coeffs()).cwiseAbs().maxCoeff(), 1e-14);
  // ĝ(n) = (1/2π) ∫ g e^{-inx} by direct quadrature
  const auto& g = sp->grid();
  const Eigen::VectorXd v = f.values();
  for (int n : {0, 1, 3, -2}) {
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * v[i] * std::polar(1.0, -n * g.nodes[i].a);
    s /= 2.0 * kPi;
    EXPECT_NEAR(std::abs(s - fourier_coeff(f, n)), 0.0, 1e-14);
  }
}

TEST(Chebyshev, RoundTripAndTruncation) {
  const auto sp = SpectralSpace::interval(10);
  Eigen::VectorXd a = random_coeffs(11, 14);
  const SpectralFunction f = from_chebyshev(sp, a);
  EXPECT_LT((chebyshev_coeffs(f) - a).cwiseAbs().maxCoeff(), 1e-12);
  for (double x : {-0.9, 0.1, 0.77}) {
    double direct = 0.5 * a[0];
    for (int n = 1; n <= 10; ++n) direct += a[n] * std::cos(n * std::acos(x));
    EXPECT_NEAR(f.eval({x, 0.0}), direct, 1e-12);
  }
  const Eigen::VectorXd t = chebyshev_coeffs(project_chebyshev(f, 4));
  for (int n = 0; n <= 10; ++n) EXPECT_NEAR(t[n], n <= 4 ? a[n] : 0.0, 1e-12);
}

TEST(Spectral, RejectsBadInput) {
  EXPECT_THROW(SpectralSpace::sphere(-1), InputError);
  EXPECT_THROW(SpectralSpace::sphere(8, 4), InputError);
  const auto sp = SpectralSpace::circle(4);
  EXPECT_THROW(project(SpectralFunction::zero(sp), -1), InputError);
  EXPECT_THROW(chebyshev_coeffs(SpectralFunction::zero(sp)), InputError);
}
