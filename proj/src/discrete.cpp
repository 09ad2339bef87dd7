#include "wavedamp/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "wavedamp/analytic.hpp"

namespace wavedamp {

namespace {

constexpr double kPivotTol = 1e-14;
constexpr double kStabilityMargin = 1e-12;

// Thomas algorithm for (a_diag) on the diagonal and a constant off-diagonal.
class TridiagonalSolver {
 public:
  TridiagonalSolver(Complex diag, double offdiag, int size)
      : offdiag_(offdiag), pivots_(size) {
    const double scale = std::abs(diag) + 2.0 * std::abs(offdiag);
    Complex prev{};
    for (int i = 0; i < size; ++i) {
      const Complex pivot = i == 0 ? diag : diag - offdiag * offdiag / prev;
      if (std::abs(pivot) <= kPivotTol * scale) {
        throw SingularPencil("tridiagonal factorization broke down at row " +
                             std::to_string(i));
      }
      pivots_[i] = pivot;
      prev = pivot;
    }
  }

  std::vector<Complex> solve(const std::vector<Complex>& rhs) const {
    const int size = static_cast<int>(pivots_.size());
    std::vector<Complex> y(size);
    for (int i = 0; i < size; ++i) {
      y[i] = i == 0 ? rhs[0] : rhs[i] - offdiag_ * y[i - 1] / pivots_[i - 1];
    }
    std::vector<Complex> x(size);
    for (int i = size - 1; i >= 0; --i) {
      x[i] = (i == size - 1 ? y[i] : y[i] - offdiag_ * x[i + 1]) / pivots_[i];
    }
    return x;
  }

 private:
  double offdiag_;
  std::vector<Complex> pivots_;
};

Complex dot(const std::vector<double>& a, const std::vector<Complex>& b) {
  Complex acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

SecondOrderSystem discretize(int n, const StringParams& params,
                             const Damper& damper, Forcing forcing) {
  if (n < 4) throw InvalidGrid("grid needs n >= 4 intervals, got " + std::to_string(n));
  params.validate();
  damper.validate(params);

  const double l = params.length;
  const double k = params.stiffness;
  SecondOrderSystem sys;
  sys.n = n;
  sys.h = l / n;
  const double h2 = sys.h * sys.h;
  sys.stiffness_diag = 2.0 * k / h2;
  sys.stiffness_offdiag = -k / h2;
  sys.internal_damping = params.internal_damping;
  sys.damper_node = std::clamp(static_cast<int>(std::lround(damper.position / sys.h)),
                               1, n - 1);
  sys.damper_gain_scaled = damper.gain / sys.h;

  const int dim = n - 1;
  if (forcing == Forcing::Uniform) {
    sys.input_vec.assign(dim, 1.0);
    sys.output_vec.assign(dim, 1.0 / n);
    sys.feedthrough = 0.0;
  } else {
    sys.input_vec.assign(dim, 0.0);
    sys.input_vec[0] = k / h2;
    sys.output_vec.assign(dim, sys.h / l);
    sys.feedthrough = sys.h / (2.0 * l);
  }
  return sys;
}

Complex discrete_tf(const SecondOrderSystem& sys, Complex s) {
  const int dim = sys.dimension();
  const Complex diag = s * s * sys.mass + s * sys.internal_damping + sys.stiffness_diag;
  const TridiagonalSolver solver(diag, sys.stiffness_offdiag, dim);

  std::vector<Complex> rhs(sys.input_vec.begin(), sys.input_vec.end());
  const std::vector<Complex> u = solver.solve(rhs);
  Complex y = dot(sys.output_vec, u);

  const Complex sigma = s * sys.damper_gain_scaled;
  if (sigma != Complex{}) {
    const int j = sys.damper_node - 1;
    std::vector<Complex> unit(dim, Complex{});
    unit[j] = 1.0;
    const std::vector<Complex> v = solver.solve(unit);
    const Complex denom = 1.0 + sigma * v[j];
    if (std::abs(denom) <= kPivotTol * (1.0 + std::abs(sigma * v[j]))) {
      throw SingularPencil("rank-one damper update is singular");
    }
    y -= sigma * u[j] / denom * dot(sys.output_vec, v);
  }
  return y + sys.feedthrough;
}

double discrete_h2_lyapunov(const SecondOrderSystem& sys, int max_grid) {
  if (sys.n > max_grid) {
    throw InvalidArgument("grid n = " + std::to_string(sys.n) +
                          " exceeds the dense Lyapunov cap " + std::to_string(max_grid));
  }
  if (sys.feedthrough != 0.0) {
    throw FeedthroughNonzero("H2 is infinite with a nonzero feedthrough term");
  }
  if (std::all_of(sys.input_vec.begin(), sys.input_vec.end(),
                  [](double b) { return b == 0.0; })) {
    return 0.0;
  }

  using Eigen::MatrixXcd;
  using Eigen::MatrixXd;
  using Eigen::VectorXcd;
  using Eigen::VectorXd;
  const int dim = sys.dimension();
  const int size = 2 * dim;

  MatrixXd a = MatrixXd::Zero(size, size);
  a.topRightCorner(dim, dim).setIdentity();
  for (int i = 0; i < dim; ++i) {
    a(dim + i, i) = -sys.stiffness_diag / sys.mass;
    if (i > 0) a(dim + i, i - 1) = -sys.stiffness_offdiag / sys.mass;
    if (i + 1 < dim) a(dim + i, i + 1) = -sys.stiffness_offdiag / sys.mass;
    a(dim + i, dim + i) = -sys.internal_damping / sys.mass;
  }
  const int j = sys.damper_node - 1;
  a(dim + j, dim + j) -= sys.damper_gain_scaled / sys.mass;

  VectorXd b = VectorXd::Zero(size);
  VectorXd c = VectorXd::Zero(size);
  for (int i = 0; i < dim; ++i) {
    b(dim + i) = sys.input_vec[i] / sys.mass;
    c(i) = sys.output_vec[i];
  }

  // A = U T U^*, solve T Y + Y T^* = -U^* b b^T U column by column from the
  // right; then H2^2 = (c^T U) Y (c^T U)^*.
  const Eigen::ComplexSchur<MatrixXd> schur(a);
  if (schur.info() != Eigen::Success) {
    throw UnstableSystem("Schur factorization failed");
  }
  const MatrixXcd& t = schur.matrixT();
  const MatrixXcd& u = schur.matrixU();
  for (int i = 0; i < size; ++i) {
    // Relative margin: an undamped realization has Re = +/- round-off.
    if (!(t(i, i).real() < -kStabilityMargin * std::abs(t(i, i)))) {
      throw UnstableSystem("realization has an eigenvalue with Re >= 0");
    }
  }
  const VectorXcd ub = u.adjoint() * b.cast<Complex>();
  const MatrixXcd f = -ub * ub.adjoint();

  MatrixXcd y = MatrixXcd::Zero(size, size);
  VectorXcd rhs(size);
  for (int col = size - 1; col >= 0; --col) {
    rhs = f.col(col);
    for (int m = col + 1; m < size; ++m) rhs -= std::conj(t(col, m)) * y.col(m);
    const Complex shift = std::conj(t(col, col));
    for (int row = size - 1; row >= 0; --row) {
      Complex acc = rhs(row);
      for (int q = row + 1; q < size; ++q) acc -= t(row, q) * y(q, col);
      y(row, col) = acc / (t(row, row) + shift);
    }
  }
  const Eigen::RowVectorXcd cu = c.cast<Complex>().transpose() * u;
  const double h2_sq = (cu * y * cu.adjoint())(0, 0).real();
  if (!(h2_sq >= 0.0)) throw UnstableSystem("Gramian is not positive semidefinite");
  return std::sqrt(h2_sq);
}

std::vector<ConvergenceRow> convergence_study(const StringParams& params,
                                              const Damper& damper,
                                              Forcing forcing, Complex s,
                                              const std::vector<int>& n_list) {
  const Complex exact = output_h(s, params, damper, forcing);
  std::vector<ConvergenceRow> rows;
  rows.reserve(n_list.size());
  for (int n : n_list) {
    const SecondOrderSystem sys = discretize(n, params, damper, forcing);
    ConvergenceRow row;
    row.n = n;
    row.h = sys.h;
    row.discrete = discrete_tf(sys, s);
    row.analytic = exact;
    row.abs_error = std::abs(row.discrete - exact);
    rows.push_back(row);
  }
  return rows;
}

double fitted_order(const std::vector<ConvergenceRow>& rows) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (const ConvergenceRow& row : rows) {
    if (!(row.abs_error > 0.0)) continue;
    const double x = std::log(row.h);
    const double y = std::log(row.abs_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  const double denom = count * sxx - sx * sx;
  if (count < 2 || !(std::abs(denom) > 0.0)) {
    throw InvalidArgument("convergence order needs two rows with distinct h");
  }
  return (count * sxy - sx * sy) / denom;
}

}  // namespace wavedamp
