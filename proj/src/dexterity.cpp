#include "screwkin/dexterity.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "screwkin/derivatives.hpp"
#include "screwkin/screw.hpp"

namespace screwkin {

double manipulability(const MatX& J) {
  const MatX A = J * J.transpose();
  return std::sqrt(std::max(0.0, A.determinant()));
}

double inverse_condition(const MatX& J) {
  const MatX A = J * J.transpose();
  Eigen::FullPivLU<MatX> lu(A);
  if (!lu.isInvertible()) return 0.0;
  const MatX Ainv = lu.inverse();
  return 1.0 / (A.norm() * Ainv.norm());
}

namespace {

// First partials of the columns of J: the j-th column moves under joint i
// only when i < j, in which case its rate is the bracket of the two
// instantaneous screws.
std::vector<MatX> jacobian_partials(const std::vector<ScrewVec>& S) {
  const int n = static_cast<int>(S.size());
  std::vector<MatX> dJ(static_cast<size_t>(n), MatX::Zero(6, n));
  for (int i = 1; i <= n; ++i) {
    for (int m = i + 1; m <= n; ++m) {
      dJ[static_cast<size_t>(i) - 1].col(m - 1) =
          screw_bracket(S[static_cast<size_t>(i) - 1], S[static_cast<size_t>(m) - 1]);
    }
  }
  return dJ;
}

// det with one column replaced; used for the column-expansion rule
// d(det A) = sum_k det(A with column k replaced by dA's column k).
double det_col_swap(const MatX& A, int k, const VecX& col) {
  MatX B = A;
  B.col(k) = col;
  return B.determinant();
}

double det_col_swap2(const MatX& A, int k, const VecX& ck, int l, const VecX& cl) {
  MatX B = A;
  B.col(k) = ck;
  B.col(l) = cl;
  return B.determinant();
}

struct GramDerivs {
  MatX J;
  MatX A;
  double detA = 0.0;
  std::vector<MatX> dJ;   // dJ[i-1] = partial_i J
  std::vector<MatX> dA;   // dA[i-1] = partial_i A
};

GramDerivs gram_first_order(const Chain& c, const VecX& q) {
  GramDerivs g;
  const int n = c.n();
  g.J = jacobian_spatial(c, q, n);
  g.A = g.J * g.J.transpose();
  g.detA = g.A.determinant();
  const std::vector<ScrewVec> S = joint_screws_spatial(c, q);
  g.dJ = jacobian_partials(S);
  g.dA.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const MatX& dJi = g.dJ[static_cast<size_t>(i)];
    g.dA.push_back(dJi * g.J.transpose() + g.J * dJi.transpose());
  }
  return g;
}

double det_directional(const MatX& A, const MatX& dA) {
  double s = 0.0;
  for (int k = 0; k < A.cols(); ++k) s += det_col_swap(A, k, dA.col(k));
  return s;
}

}  // namespace

VecX manipulability_gradient(const Chain& c, const VecX& q) {
  const GramDerivs g = gram_first_order(c, q);
  const double mu = std::sqrt(std::max(0.0, g.detA));
  if (mu <= 0.0) {
    throw NumericError("manipulability gradient undefined at a singular configuration");
  }
  const int n = c.n();
  VecX grad(n);
  for (int i = 0; i < n; ++i) {
    grad[i] = det_directional(g.A, g.dA[static_cast<size_t>(i)]) / (2.0 * mu);
  }
  return grad;
}

VecX manipulability_gradient_trace(const Chain& c, const VecX& q) {
  const int n = c.n();
  const MatX J = jacobian_spatial(c, q, n);
  if (J.rows() != J.cols()) {
    throw std::invalid_argument("trace form needs a square Jacobian");
  }
  Eigen::FullPivLU<MatX> lu(J);
  if (!lu.isInvertible()) {
    throw NumericError("trace form undefined at a singular configuration");
  }
  const MatX Jinv = lu.inverse();
  const double mu = std::abs(lu.determinant());
  const std::vector<ScrewVec> S = joint_screws_spatial(c, q);
  const std::vector<MatX> dJ = jacobian_partials(S);
  VecX grad(n);
  for (int i = 0; i < n; ++i) {
    grad[i] = mu * (Jinv * dJ[static_cast<size_t>(i)]).trace();
  }
  return grad;
}

MatX manipulability_hessian(const Chain& c, const VecX& q) {
  const GramDerivs g = gram_first_order(c, q);
  const double mu = std::sqrt(std::max(0.0, g.detA));
  if (mu <= 0.0) {
    throw NumericError("manipulability Hessian undefined at a singular configuration");
  }
  const int n = c.n();
  const std::vector<ScrewVec> S = joint_screws_spatial(c, q);

  VecX dD(n);
  for (int i = 0; i < n; ++i) {
    dD[i] = det_directional(g.A, g.dA[static_cast<size_t>(i)]);
  }

  MatX H(n, n);
  for (int i = 1; i <= n; ++i) {
    for (int j = i; j <= n; ++j) {
      // Second partial of J: column m responds to the pair (i, j) only when
      // both indices precede m, through the nested bracket with the smaller
      // index outermost.
      MatX d2J = MatX::Zero(6, n);
      for (int m = j + 1; m <= n; ++m) {
        d2J.col(m - 1) = screw_bracket(
            S[static_cast<size_t>(i) - 1],
            screw_bracket(S[static_cast<size_t>(j) - 1], S[static_cast<size_t>(m) - 1]));
      }
      const MatX& dJi = g.dJ[static_cast<size_t>(i) - 1];
      const MatX& dJj = g.dJ[static_cast<size_t>(j) - 1];
      const MatX d2A = d2J * g.J.transpose() + dJi * dJj.transpose() +
                       dJj * dJi.transpose() + g.J * d2J.transpose();

      double d2D = 0.0;
      const MatX& dAi = g.dA[static_cast<size_t>(i) - 1];
      const MatX& dAj = g.dA[static_cast<size_t>(j) - 1];
      for (int k = 0; k < g.A.cols(); ++k) {
        for (int l = 0; l < g.A.cols(); ++l) {
          if (k == l) continue;
          d2D += det_col_swap2(g.A, k, dAi.col(k), l, dAj.col(l));
        }
        d2D += det_col_swap(g.A, k, d2A.col(k));
      }

      const double h =
          d2D / (2.0 * mu) - dD[i - 1] * dD[j - 1] / (4.0 * mu * mu * mu);
      H(i - 1, j - 1) = h;
      H(j - 1, i - 1) = h;
    }
  }
  return H;
}

MatX manipulability_hessian_trace(const Chain& c, const VecX& q) {
  const int n = c.n();
  const MatX J = jacobian_spatial(c, q, n);
  if (J.rows() != J.cols()) {
    throw std::invalid_argument("trace form needs a square Jacobian");
  }
  Eigen::FullPivLU<MatX> lu(J);
  if (!lu.isInvertible()) {
    throw NumericError("trace form undefined at a singular configuration");
  }
  const MatX Jinv = lu.inverse();
  const double mu = std::abs(lu.determinant());
  const std::vector<ScrewVec> S = joint_screws_spatial(c, q);
  const std::vector<MatX> dJ = jacobian_partials(S);

  std::vector<MatX> JinvdJ;
  JinvdJ.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) JinvdJ.push_back(Jinv * dJ[static_cast<size_t>(i)]);

  MatX H(n, n);
  for (int i = 1; i <= n; ++i) {
    for (int j = i; j <= n; ++j) {
      MatX d2J = MatX::Zero(6, n);
      for (int m = j + 1; m <= n; ++m) {
        d2J.col(m - 1) = screw_bracket(
            S[static_cast<size_t>(i) - 1],
            screw_bracket(S[static_cast<size_t>(j) - 1], S[static_cast<size_t>(m) - 1]));
      }
      const MatX& Pi = JinvdJ[static_cast<size_t>(i) - 1];
      const MatX& Pj = JinvdJ[static_cast<size_t>(j) - 1];
      const double h = mu * ((Jinv * d2J).trace() + Pi.trace() * Pj.trace() -
                             (Pi * Pj).trace());
      H(i - 1, j - 1) = h;
      H(j - 1, i - 1) = h;
    }
  }
  return H;
}

VecX inverse_condition_gradient(const Chain& c, const VecX& q) {
  const GramDerivs g = gram_first_order(c, q);
  Eigen::FullPivLU<MatX> lu(g.A);
  if (!lu.isInvertible()) {
    throw NumericError("inverse condition gradient undefined at a singular configuration");
  }
  const MatX Ainv = lu.inverse();
  const double nA = g.A.norm();
  const double nAi = Ainv.norm();
  const double kappa = nA * nAi;
  const int n = c.n();
  VecX grad(n);
  for (int i = 0; i < n; ++i) {
    const MatX& dAi = g.dA[static_cast<size_t>(i)];
    const MatX dAinv = -Ainv * dAi * Ainv;
    // kappa = ||A|| ||A^{-1}||; differentiate each Frobenius factor.
    const double dkappa = (nAi / nA) * (dAi.array() * g.A.array()).sum() +
                          (nA / nAi) * (dAinv.array() * Ainv.array()).sum();
    grad[i] = -dkappa / (kappa * kappa);
  }
  return grad;
}

}  // namespace screwkin
