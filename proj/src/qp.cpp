#include "likertopt/qp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "likertopt/error.hpp"

namespace likertopt {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double QuadraticProgram::objective(const VectorXd& z) const {
  return 0.5 * z.dot(q_diag.cwiseProduct(z)) + c.dot(z);
}

void check_qp(const QuadraticProgram& qp) {
  const Index n = qp.c.size();
  if (qp.q_diag.size() != n || qp.A.cols() != n || qp.A.rows() != qp.b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "quadratic program dimensions are inconsistent");
  }
  if ((qp.q_diag.array() < 0.0).any()) {
    throw Error(ErrorCode::NumericalBreakdown, "Hessian diagonal must be nonnegative");
  }
  if (!qp.q_diag.allFinite() || !qp.c.allFinite() || !qp.b.allFinite()) {
    throw Error(ErrorCode::NonFinite, "quadratic program data must be finite");
  }
}

namespace {

constexpr Index kMaxEliminableNnz = 8;

/// Constraint matrix split into a dense block (rows grouped by identical
/// coefficients up to sign) and at most one coefficient per row on an
/// eliminable column.
class StructuredMatrix {
 public:
  explicit StructuredMatrix(const QuadraticProgram& qp) : m_(qp.A.rows()), n_(qp.A.cols()) {
    const auto& A = qp.A;
    std::vector<Index> col_nnz(static_cast<std::size_t>(n_), 0);
    for (Index r = 0; r < m_; ++r) {
      for (decltype(qp.A)::InnerIterator it(A, r); it; ++it) {
        if (it.value() != 0.0) ++col_nnz[static_cast<std::size_t>(it.col())];
      }
    }
    std::vector<bool> elim(static_cast<std::size_t>(n_));
    for (Index k = 0; k < n_; ++k) {
      elim[static_cast<std::size_t>(k)] = col_nnz[static_cast<std::size_t>(k)] <= kMaxEliminableNnz;
    }
    // Each row may touch at most one eliminable column, so that the
    // eliminated block of the normal matrix stays diagonal.
    for (Index r = 0; r < m_; ++r) {
      bool seen = false;
      for (decltype(qp.A)::InnerIterator it(A, r); it; ++it) {
        if (it.value() == 0.0) continue;
        auto k = static_cast<std::size_t>(it.col());
        if (!elim[k]) continue;
        if (seen) elim[k] = false;
        seen = true;
      }
    }

    dense_of_.assign(static_cast<std::size_t>(n_), -1);
    elim_of_.assign(static_cast<std::size_t>(n_), -1);
    for (Index k = 0; k < n_; ++k) {
      if (elim[static_cast<std::size_t>(k)]) {
        elim_of_[static_cast<std::size_t>(k)] = static_cast<Index>(elim_vars_.size());
        elim_vars_.push_back(k);
      } else {
        dense_of_[static_cast<std::size_t>(k)] = static_cast<Index>(dense_vars_.size());
        dense_vars_.push_back(k);
      }
    }

    const Index nd = num_dense();
    row_group_.assign(static_cast<std::size_t>(m_), -1);
    row_sign_.assign(static_cast<std::size_t>(m_), 1.0);
    row_elim_.assign(static_cast<std::size_t>(m_), -1);
    row_elim_val_.assign(static_cast<std::size_t>(m_), 0.0);
    elim_rows_.resize(elim_vars_.size());

    std::unordered_map<std::uint64_t, std::vector<Index>> buckets;
    std::vector<VectorXd> groups;
    VectorXd row(nd);
    for (Index r = 0; r < m_; ++r) {
      row.setZero();
      bool any_dense = false;
      for (decltype(qp.A)::InnerIterator it(A, r); it; ++it) {
        if (it.value() == 0.0) continue;
        const auto k = static_cast<std::size_t>(it.col());
        if (elim_of_[k] >= 0) {
          row_elim_[static_cast<std::size_t>(r)] = elim_of_[k];
          row_elim_val_[static_cast<std::size_t>(r)] = it.value();
          elim_rows_[static_cast<std::size_t>(elim_of_[k])].push_back(r);
        } else {
          row[dense_of_[k]] = it.value();
          any_dense = true;
        }
      }
      if (!any_dense) continue;
      double sign = 1.0;
      for (Index k = 0; k < nd; ++k) {
        if (row[k] != 0.0) {
          sign = row[k] > 0.0 ? 1.0 : -1.0;
          break;
        }
      }
      row *= sign;
      std::uint64_t h = 1469598103934665603ULL;
      for (Index k = 0; k < nd; ++k) {
        h ^= std::bit_cast<std::uint64_t>(row[k] + 0.0);
        h *= 1099511628211ULL;
      }
      auto& bucket = buckets[h];
      Index gid = -1;
      for (Index cand : bucket) {
        if (groups[static_cast<std::size_t>(cand)] == row) {
          gid = cand;
          break;
        }
      }
      if (gid < 0) {
        gid = static_cast<Index>(groups.size());
        groups.push_back(row);
        bucket.push_back(gid);
      }
      row_group_[static_cast<std::size_t>(r)] = gid;
      row_sign_[static_cast<std::size_t>(r)] = sign;
    }
    G_.resize(static_cast<Index>(groups.size()), nd);
    for (std::size_t g = 0; g < groups.size(); ++g) G_.row(static_cast<Index>(g)) = groups[g].transpose();
  }

  [[nodiscard]] Index rows() const noexcept { return m_; }
  [[nodiscard]] Index cols() const noexcept { return n_; }
  [[nodiscard]] Index num_dense() const noexcept { return static_cast<Index>(dense_vars_.size()); }
  [[nodiscard]] Index num_elim() const noexcept { return static_cast<Index>(elim_vars_.size()); }
  [[nodiscard]] Index num_groups() const noexcept { return G_.rows(); }

  [[nodiscard]] VectorXd dense_part(const VectorXd& z) const {
    VectorXd out(num_dense());
    for (Index i = 0; i < num_dense(); ++i) out[i] = z[dense_vars_[static_cast<std::size_t>(i)]];
    return out;
  }
  [[nodiscard]] VectorXd elim_part(const VectorXd& z) const {
    VectorXd out(num_elim());
    for (Index i = 0; i < num_elim(); ++i) out[i] = z[elim_vars_[static_cast<std::size_t>(i)]];
    return out;
  }
  [[nodiscard]] VectorXd join(const VectorXd& zd, const VectorXd& ze) const {
    VectorXd z(n_);
    for (Index i = 0; i < num_dense(); ++i) z[dense_vars_[static_cast<std::size_t>(i)]] = zd[i];
    for (Index i = 0; i < num_elim(); ++i) z[elim_vars_[static_cast<std::size_t>(i)]] = ze[i];
    return z;
  }

  [[nodiscard]] VectorXd apply(const VectorXd& z) const {
    const VectorXd gz = G_ * dense_part(z);
    VectorXd out = VectorXd::Zero(m_);
    for (Index r = 0; r < m_; ++r) {
      const auto ru = static_cast<std::size_t>(r);
      if (row_group_[ru] >= 0) out[r] += row_sign_[ru] * gz[row_group_[ru]];
      if (row_elim_[ru] >= 0) {
        out[r] += row_elim_val_[ru] * z[elim_vars_[static_cast<std::size_t>(row_elim_[ru])]];
      }
    }
    return out;
  }

  [[nodiscard]] VectorXd apply_transpose(const VectorXd& y) const {
    VectorXd yg = VectorXd::Zero(num_groups());
    VectorXd ze = VectorXd::Zero(num_elim());
    for (Index r = 0; r < m_; ++r) {
      const auto ru = static_cast<std::size_t>(r);
      if (row_group_[ru] >= 0) yg[row_group_[ru]] += row_sign_[ru] * y[r];
      if (row_elim_[ru] >= 0) ze[row_elim_[ru]] += row_elim_val_[ru] * y[r];
    }
    return join(G_.transpose() * yg, ze);
  }

  [[nodiscard]] const MatrixXd& groups() const noexcept { return G_; }
  [[nodiscard]] Index row_group(Index r) const { return row_group_[static_cast<std::size_t>(r)]; }
  [[nodiscard]] double row_sign(Index r) const { return row_sign_[static_cast<std::size_t>(r)]; }
  [[nodiscard]] Index row_elim(Index r) const { return row_elim_[static_cast<std::size_t>(r)]; }
  [[nodiscard]] double row_elim_val(Index r) const { return row_elim_val_[static_cast<std::size_t>(r)]; }
  [[nodiscard]] const std::vector<Index>& elim_rows(Index k) const {
    return elim_rows_[static_cast<std::size_t>(k)];
  }

 private:
  Index m_;
  Index n_;
  std::vector<Index> dense_vars_;
  std::vector<Index> elim_vars_;
  std::vector<Index> dense_of_;
  std::vector<Index> elim_of_;
  std::vector<Index> row_group_;
  std::vector<double> row_sign_;
  std::vector<Index> row_elim_;
  std::vector<double> row_elim_val_;
  std::vector<std::vector<Index>> elim_rows_;
  MatrixXd G_;
};

/// Factorization of H = diag(q) + Aᵀ diag(w) A using the split above.
class NormalSolver {
 public:
  NormalSolver(const StructuredMatrix& A, const VectorXd& q) : A_(A), qd_(A.dense_part(q)), qe_(A.elim_part(q)) {}

  void factor(const VectorXd& w) {
    w_ = w;
    const Index ng = A_.num_groups();
    const Index ne = A_.num_elim();
    VectorXd wg = VectorXd::Zero(ng);
    he_ = qe_;
    for (Index r = 0; r < A_.rows(); ++r) {
      if (A_.row_group(r) >= 0) wg[A_.row_group(r)] += w[r];
      if (A_.row_elim(r) >= 0) he_[A_.row_elim(r)] += w[r] * A_.row_elim_val(r) * A_.row_elim_val(r);
    }
    const double he_scale = he_.size() > 0 ? std::max(1.0, he_.cwiseAbs().maxCoeff()) : 1.0;
    for (Index k = 0; k < ne; ++k) he_[k] = std::max(he_[k], 1e-14 * he_scale);

    // C(k, g) = Σ_{rows r of k in group g} w_r e_r sign_r
    c_entries_.assign(static_cast<std::size_t>(ne), {});
    std::vector<Eigen::Triplet<double>> m_trip;
    for (Index g = 0; g < ng; ++g) m_trip.emplace_back(g, g, wg[g]);
    for (Index k = 0; k < ne; ++k) {
      auto& entries = c_entries_[static_cast<std::size_t>(k)];
      for (Index r : A_.elim_rows(k)) {
        const Index g = A_.row_group(r);
        if (g < 0) continue;
        const double v = w[r] * A_.row_elim_val(r) * A_.row_sign(r);
        auto it = std::find_if(entries.begin(), entries.end(), [g](const auto& e) { return e.first == g; });
        if (it == entries.end()) {
          entries.emplace_back(g, v);
        } else {
          it->second += v;
        }
      }
      for (const auto& [gi, vi] : entries) {
        for (const auto& [gj, vj] : entries) m_trip.emplace_back(gi, gj, -vi * vj / he_[k]);
      }
    }
    Eigen::SparseMatrix<double> M(ng, ng);
    M.setFromTriplets(m_trip.begin(), m_trip.end());

    const Index nd = A_.num_dense();
    MatrixXd S = qd_.asDiagonal();
    if (ng > 0 && nd > 0) {
      const MatrixXd MG = M * A_.groups();
      S.noalias() += A_.groups().transpose() * MG;
    }
    const double s_scale = nd > 0 ? std::max(1.0, S.diagonal().cwiseAbs().maxCoeff()) : 1.0;
    S.diagonal().array() += 1e-13 * s_scale;
    llt_.compute(S);
    use_ldlt_ = llt_.info() != Eigen::Success;
    if (use_ldlt_) {
      ldlt_.compute(S);
      if (ldlt_.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalBreakdown, "normal matrix factorization failed");
      }
    }
  }

  [[nodiscard]] VectorXd solve(const VectorXd& rhs) const {
    VectorXd x = solve_once(rhs);
    // One step of iterative refinement against the unreduced operator.
    const VectorXd resid = rhs - apply_h(x);
    x += solve_once(resid);
    return x;
  }

 private:
  [[nodiscard]] VectorXd apply_h(const VectorXd& x) const {
    const VectorXd ax = A_.apply(x);
    VectorXd out = A_.apply_transpose(w_.cwiseProduct(ax));
    out += A_.join(qd_.cwiseProduct(A_.dense_part(x)), qe_.cwiseProduct(A_.elim_part(x)));
    return out;
  }

  // H_de v = Gᵀ (Cᵀ v)
  [[nodiscard]] VectorXd apply_hde(const VectorXd& ve) const {
    VectorXd g = VectorXd::Zero(A_.num_groups());
    for (std::size_t k = 0; k < c_entries_.size(); ++k) {
      for (const auto& [gi, vi] : c_entries_[k]) g[gi] += vi * ve[static_cast<Index>(k)];
    }
    return A_.groups().transpose() * g;
  }

  // H_ed v = C (G v)
  [[nodiscard]] VectorXd apply_hed(const VectorXd& vd) const {
    const VectorXd gv = A_.groups() * vd;
    VectorXd out = VectorXd::Zero(A_.num_elim());
    for (std::size_t k = 0; k < c_entries_.size(); ++k) {
      for (const auto& [gi, vi] : c_entries_[k]) out[static_cast<Index>(k)] += vi * gv[gi];
    }
    return out;
  }

  [[nodiscard]] VectorXd solve_once(const VectorXd& rhs) const {
    const VectorXd rd = A_.dense_part(rhs);
    const VectorXd re = A_.elim_part(rhs);
    VectorXd xd;
    if (A_.num_dense() > 0) {
      const VectorXd reduced = rd - apply_hde(re.cwiseQuotient(he_));
      xd = use_ldlt_ ? VectorXd(ldlt_.solve(reduced)) : VectorXd(llt_.solve(reduced));
    } else {
      xd = VectorXd(0);
    }
    const VectorXd xe = (re - apply_hed(xd)).cwiseQuotient(he_);
    return A_.join(xd, xe);
  }

  const StructuredMatrix& A_;
  VectorXd qd_;
  VectorXd qe_;
  VectorXd w_;
  VectorXd he_;
  std::vector<std::vector<std::pair<Index, double>>> c_entries_;
  Eigen::LLT<MatrixXd> llt_;
  Eigen::LDLT<MatrixXd> ldlt_;
  bool use_ldlt_ = false;
};

double max_step(const VectorXd& v, const VectorXd& dv) {
  double alpha = 1.0;
  for (Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
  }
  return alpha;
}

double inf_norm(const VectorXd& v) { return v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0; }

QPSolution solve_unconstrained(const QuadraticProgram& qp) {
  QPSolution sol;
  sol.z = VectorXd::Zero(qp.num_variables());
  for (Index k = 0; k < qp.num_variables(); ++k) {
    if (qp.q_diag[k] > 0.0) {
      sol.z[k] = -qp.c[k] / qp.q_diag[k];
    } else if (qp.c[k] != 0.0) {
      throw Error(ErrorCode::NumericalBreakdown, "objective is unbounded below");
    }
  }
  sol.objective = qp.objective(sol.z);
  sol.status = QPStatus::Optimal;
  return sol;
}

}  // namespace

QPSolution solve_qp(const QuadraticProgram& qp, const QPOptions& options) {
  check_qp(qp);
  if (!(options.tol > 0.0)) throw Error(ErrorCode::BadConfig, "tolerance must be positive");
  if (qp.num_constraints() == 0) return solve_unconstrained(qp);

  const StructuredMatrix A(qp);
  NormalSolver normal(A, qp.q_diag);
  const Index m = qp.num_constraints();
  const double b_scale = 1.0 + inf_norm(qp.b);
  const double c_scale = 1.0 + inf_norm(qp.c);

  VectorXd z = VectorXd::Zero(qp.num_variables());
  VectorXd s = (qp.b - A.apply(z)).cwiseMax(1.0);
  VectorXd y = VectorXd::Ones(m);

  QPSolution sol;
  for (int iter = 0; iter < options.max_iter; ++iter) {
    const VectorXd rp = A.apply(z) + s - qp.b;
    const VectorXd rd = qp.q_diag.cwiseProduct(z) + qp.c + A.apply_transpose(y);
    const double gap = s.dot(y);
    const double obj = qp.objective(z);
    const double rp_rel = inf_norm(rp) / b_scale;
    const double rd_rel = inf_norm(rd) / c_scale;
    const double gap_rel = gap / (1.0 + std::abs(obj));
    sol.iterations = iter;
    sol.kkt_residual = std::max({rp_rel, rd_rel, gap_rel});
    // Diverging multipliers with a primal residual that will not close are
    // the interior point signature of an infeasible constraint set.
    if (!(inf_norm(y) <= 1e10 * c_scale * b_scale) && !(rp_rel <= options.tol)) {
      throw Error(ErrorCode::Infeasible, "dual iterates diverge; constraints appear infeasible");
    }
    if (!std::isfinite(sol.kkt_residual)) {
      throw Error(ErrorCode::NumericalBreakdown, "non-finite interior point iterate");
    }
    if (sol.kkt_residual <= options.tol) {
      sol.status = QPStatus::Optimal;
      break;
    }

    const double mu = gap / static_cast<double>(m);
    normal.factor(y.cwiseQuotient(s));

    auto newton = [&](const VectorXd& rc) {
      const VectorXd rhs = -rd + A.apply_transpose((rc - y.cwiseProduct(rp)).cwiseQuotient(s));
      VectorXd dz = normal.solve(rhs);
      VectorXd ds = -rp - A.apply(dz);
      VectorXd dy = (-rc - y.cwiseProduct(ds)).cwiseQuotient(s);
      return std::tuple{std::move(dz), std::move(ds), std::move(dy)};
    };

    // Predictor
    const VectorXd rc_aff = s.cwiseProduct(y);
    auto [dz_a, ds_a, dy_a] = newton(rc_aff);
    const double a_aff = std::min(max_step(s, ds_a), max_step(y, dy_a));
    const double mu_aff = (s + a_aff * ds_a).dot(y + a_aff * dy_a) / static_cast<double>(m);
    const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

    // Corrector
    VectorXd rc = rc_aff + ds_a.cwiseProduct(dy_a);
    rc.array() -= sigma * mu;
    auto [dz, ds, dy] = newton(rc);
    const double a_max = std::min(max_step(s, ds), max_step(y, dy));
    const double step = std::min(1.0, 0.995 * a_max);

    z += step * dz;
    s += step * ds;
    y += step * dy;
    s = s.cwiseMax(1e-300);
    y = y.cwiseMax(1e-300);
    sol.iterations = iter + 1;
  }
  sol.z = std::move(z);
  sol.objective = qp.objective(sol.z);
  return sol;
}

}  // namespace likertopt
