// Primal-dual interior-point method for block-diagonal conic programs.
//
// The problem is brought to the standard form
//     minimize <C, X>  s.t.  <A_k, X> = b_k,  X in R_+^p x S_+^{d_1} x ... ,
// plus unrestricted scalars, where the R_+ part collects nonnegative scalars
// and row slacks. Free scalars enter the Newton system through a small
// bordered solve instead of being split into two nonnegative halves, which
// would let both halves drift off to infinity. Iterations follow Mehrotra's predictor-corrector scheme with the
// HKM search direction. The Schur complement is assembled on a fixed sparse
// pattern and factorized with a sparse LDL^T, so long LP rows (as produced by
// sampled menu LPs) stay cheap: they only contribute to the dense border.

#include "infomenu/conic.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace infomenu::conic {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

struct BlockRow {
  Eigen::Index row;
  MatrixXd coef;  // symmetric
};

struct StandardForm {
  Eigen::Index m = 0;
  Eigen::Index n_lin = 0;
  SpMat a_lin;  // m x n_lin, column-major
  VectorXd c_lin;
  Eigen::Index n_free = 0;
  MatrixXd a_free;  // m x n_free
  VectorXd c_free;
  std::vector<Eigen::Index> block_dims;
  std::vector<std::vector<BlockRow>> block_rows;
  std::vector<MatrixXd> c_blocks;
  VectorXd b;
  double sign = 1.0;  // original objective = sign * (standard objective) + constant

  // scalar var -> (coordinate, is free)
  std::vector<std::pair<Eigen::Index, bool>> scalar_map;
};

StandardForm to_standard_form(const ConicProblem& p) {
  StandardForm sf;
  sf.m = static_cast<Eigen::Index>(p.num_rows());
  sf.sign = p.sense() == Sense::maximize ? -1.0 : 1.0;

  Eigen::Index next = 0;
  for (std::size_t i = 0; i < p.num_scalars(); ++i) {
    if (p.scalar_domain(i) == Domain::free) {
      sf.scalar_map.emplace_back(sf.n_free++, true);
    } else {
      sf.scalar_map.emplace_back(next++, false);
    }
  }
  std::vector<Eigen::Index> slack_of_row(p.num_rows(), -1);
  for (std::size_t k = 0; k < p.num_rows(); ++k) {
    if (p.rows()[k].relation != Relation::equal) slack_of_row[k] = next++;
  }
  sf.n_lin = next;

  sf.block_dims.resize(p.num_blocks());
  sf.block_rows.resize(p.num_blocks());
  sf.c_blocks.resize(p.num_blocks());
  for (std::size_t bl = 0; bl < p.num_blocks(); ++bl) {
    const auto d = static_cast<Eigen::Index>(p.block_dim(bl));
    sf.block_dims[bl] = d;
    sf.c_blocks[bl] = MatrixXd::Zero(d, d);
  }

  auto add_matrix_term = [](MatrixXd& target, const MatrixTerm& t, double scale) {
    const auto r = static_cast<Eigen::Index>(t.row);
    const auto c = static_cast<Eigen::Index>(t.col);
    if (r == c) {
      target(r, r) += scale * t.coef;
    } else {
      target(r, c) += 0.5 * scale * t.coef;
      target(c, r) += 0.5 * scale * t.coef;
    }
  };

  sf.c_lin = VectorXd::Zero(sf.n_lin);
  sf.c_free = VectorXd::Zero(sf.n_free);
  sf.a_free = MatrixXd::Zero(sf.m, sf.n_free);
  for (const auto& t : p.objective().scalar_terms()) {
    const auto [idx, is_free] = sf.scalar_map[t.var];
    (is_free ? sf.c_free : sf.c_lin)(idx) += sf.sign * t.coef;
  }
  for (const auto& t : p.objective().matrix_terms()) add_matrix_term(sf.c_blocks[t.block], t, sf.sign);

  std::vector<Eigen::Triplet<double>> trips;
  sf.b.resize(sf.m);
  for (std::size_t k = 0; k < p.num_rows(); ++k) {
    const Row& row = p.rows()[k];
    const auto kk = static_cast<Eigen::Index>(k);
    sf.b(kk) = row.rhs;
    for (const auto& t : row.expr.scalar_terms()) {
      const auto [idx, is_free] = sf.scalar_map[t.var];
      if (is_free) {
        sf.a_free(kk, idx) += t.coef;
      } else {
        trips.emplace_back(kk, idx, t.coef);
      }
    }
    if (slack_of_row[k] >= 0) {
      trips.emplace_back(kk, slack_of_row[k], row.relation == Relation::less_equal ? 1.0 : -1.0);
    }
    std::vector<bool> touched(p.num_blocks(), false);
    for (const auto& t : row.expr.matrix_terms()) touched[t.block] = true;
    for (std::size_t bl = 0; bl < p.num_blocks(); ++bl) {
      if (!touched[bl]) continue;
      MatrixXd coef = MatrixXd::Zero(sf.block_dims[bl], sf.block_dims[bl]);
      for (const auto& t : row.expr.matrix_terms()) {
        if (t.block == bl) add_matrix_term(coef, t, 1.0);
      }
      if (coef.cwiseAbs().maxCoeff() > 0.0) sf.block_rows[bl].push_back({kk, std::move(coef)});
    }
  }
  sf.a_lin.resize(sf.m, sf.n_lin);
  sf.a_lin.setFromTriplets(trips.begin(), trips.end());
  sf.a_lin.prune(0.0);
  sf.a_lin.makeCompressed();
  return sf;
}

// Largest alpha in (0, inf] with x + alpha dx >= 0 (elementwise).
double max_step_lin(const VectorXd& x, const VectorXd& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (dx(j) < 0.0) alpha = std::min(alpha, -x(j) / dx(j));
  }
  return alpha;
}

// Largest alpha with X + alpha dX PSD, given the Cholesky factor of X.
double max_step_psd(const Eigen::LLT<MatrixXd>& chol, const MatrixXd& dx) {
  const MatrixXd l = chol.matrixL();
  MatrixXd s = l.triangularView<Eigen::Lower>().solve(dx);
  s = l.triangularView<Eigen::Lower>().solve(s.transpose()).transpose();
  s = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

class InteriorPoint {
 public:
  InteriorPoint(const StandardForm& sf, const SolveParams& params) : sf_(sf), params_(params) {
    build_schur_pattern();
  }

  struct Outcome {
    Status status = Status::numerical_failure;
    VectorXd x;
    VectorXd xf;
    std::vector<MatrixXd> xb;
    VectorXd y;
    double pobj = 0.0;
    double dobj = 0.0;
    int iterations = 0;
  };

  Outcome run();

 private:
  struct Direction {
    VectorXd dx, dz, dy, dxf;
    std::vector<MatrixXd> dxb, dzb;
  };

  void build_schur_pattern();
  void assemble_schur();
  bool factorize();
  bool prepare_free_border();
  VectorXd solve_schur(const VectorXd& rhs) const;
  // The Schur operator y -> A(D A^T y) applied without the assembled matrix.
  VectorXd apply_m(const VectorXd& y) const;
  VectorXd apply_a(const VectorXd& x, const std::vector<MatrixXd>& xb) const;
  void apply_at(const VectorXd& y, VectorXd& out_lin, std::vector<MatrixXd>& out_b) const;
  Direction direction(double sigma_mu, const Direction* predictor);

  const StandardForm& sf_;
  const SolveParams& params_;

  // iterate
  VectorXd x_, z_, y_, xf_;
  std::vector<MatrixXd> xb_, zb_, zb_inv_;
  VectorXd rp_, rd_lin_, rf_;
  // Border for free scalars: W = M^-1 F and the factorized F^T W.
  MatrixXd border_w_;
  Eigen::LDLT<MatrixXd> border_s_;
  std::vector<MatrixXd> rd_b_;

  // Schur complement on a fixed lower-triangular pattern
  SpMat schur_;
  std::vector<Eigen::Index> lin_pair_start_;
  std::vector<Eigen::Index> lin_pair_index_;
  std::vector<double> lin_pair_coef_;
  std::vector<std::vector<std::vector<Eigen::Index>>> block_pair_index_;  // [block][a][b<=a]
  std::vector<Eigen::Index> diag_index_;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt_;
  bool analyzed_ = false;
};

void InteriorPoint::build_schur_pattern() {
  const Eigen::Index m = sf_.m;
  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index k = 0; k < m; ++k) trips.emplace_back(k, k, 0.0);
  for (Eigen::Index j = 0; j < sf_.a_lin.outerSize(); ++j) {
    for (SpMat::InnerIterator it1(sf_.a_lin, j); it1; ++it1) {
      for (SpMat::InnerIterator it2(sf_.a_lin, j); it2; ++it2) {
        if (it2.row() <= it1.row()) trips.emplace_back(it1.row(), it2.row(), 0.0);
      }
    }
  }
  for (const auto& rows : sf_.block_rows) {
    for (const auto& r1 : rows) {
      for (const auto& r2 : rows) {
        if (r2.row <= r1.row) trips.emplace_back(r1.row, r2.row, 0.0);
      }
    }
  }
  schur_.resize(m, m);
  schur_.setFromTriplets(trips.begin(), trips.end());
  schur_.makeCompressed();

  auto value_index = [this](Eigen::Index r, Eigen::Index c) {
    // lower triangle: r >= c, stored in column c
    const auto* outer = schur_.outerIndexPtr();
    const auto* inner = schur_.innerIndexPtr();
    const auto* begin = inner + outer[c];
    const auto* end = inner + outer[c + 1];
    const auto* it = std::lower_bound(begin, end, static_cast<int>(r));
    if (it == end || *it != r) throw std::logic_error("schur pattern lookup failed");
    return static_cast<Eigen::Index>(it - inner);
  };

  diag_index_.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) diag_index_[k] = value_index(k, k);

  lin_pair_start_.assign(sf_.n_lin + 1, 0);
  lin_pair_index_.clear();
  lin_pair_coef_.clear();
  for (Eigen::Index j = 0; j < sf_.a_lin.outerSize(); ++j) {
    lin_pair_start_[j] = static_cast<Eigen::Index>(lin_pair_index_.size());
    for (SpMat::InnerIterator it1(sf_.a_lin, j); it1; ++it1) {
      for (SpMat::InnerIterator it2(sf_.a_lin, j); it2; ++it2) {
        if (it2.row() <= it1.row()) {
          lin_pair_index_.push_back(value_index(it1.row(), it2.row()));
          lin_pair_coef_.push_back(it1.value() * it2.value());
        }
      }
    }
  }
  lin_pair_start_[sf_.n_lin] = static_cast<Eigen::Index>(lin_pair_index_.size());

  block_pair_index_.resize(sf_.block_rows.size());
  for (std::size_t bl = 0; bl < sf_.block_rows.size(); ++bl) {
    const auto& rows = sf_.block_rows[bl];
    auto& idx = block_pair_index_[bl];
    idx.resize(rows.size());
    for (std::size_t a = 0; a < rows.size(); ++a) {
      idx[a].resize(rows.size());
      for (std::size_t b = 0; b < rows.size(); ++b) {
        const Eigen::Index r = std::max(rows[a].row, rows[b].row);
        const Eigen::Index c = std::min(rows[a].row, rows[b].row);
        idx[a][b] = value_index(r, c);
      }
    }
  }
}

void InteriorPoint::assemble_schur() {
  double* val = schur_.valuePtr();
  std::fill(val, val + schur_.nonZeros(), 0.0);
  for (Eigen::Index j = 0; j < sf_.n_lin; ++j) {
    const double d = x_(j) / z_(j);
    for (Eigen::Index p = lin_pair_start_[j]; p < lin_pair_start_[j + 1]; ++p) {
      val[lin_pair_index_[p]] += d * lin_pair_coef_[p];
    }
  }
  for (std::size_t bl = 0; bl < sf_.block_rows.size(); ++bl) {
    const auto& rows = sf_.block_rows[bl];
    std::vector<MatrixXd> g(rows.size());
    for (std::size_t a = 0; a < rows.size(); ++a) g[a] = xb_[bl] * rows[a].coef * zb_inv_[bl];
    for (std::size_t a = 0; a < rows.size(); ++a) {
      for (std::size_t b = 0; b <= a; ++b) {
        // tr(A_a X A_b Z^-1)
        const double v = rows[a].coef.cwiseProduct(g[b].transpose()).sum();
        val[block_pair_index_[bl][a][b]] += v;
      }
    }
  }
}

bool InteriorPoint::factorize() {
  double max_diag = 0.0;
  for (const auto idx : diag_index_) max_diag = std::max(max_diag, schur_.valuePtr()[idx]);
  const double reg = 1e-14 * std::max(1.0, max_diag);
  for (const auto idx : diag_index_) schur_.valuePtr()[idx] += reg;
  if (!analyzed_) {
    ldlt_.analyzePattern(schur_);
    analyzed_ = true;
  }
  for (int attempt = 0; attempt < 6; ++attempt) {
    ldlt_.factorize(schur_);
    if (ldlt_.info() == Eigen::Success && (ldlt_.vectorD().array() > 0.0).all()) return true;
    const double bump = std::pow(100.0, attempt + 1) * reg;
#ifdef INFOMENU_IPM_TRACE
    std::fprintf(stderr, "    bump %.2e\n", bump);
#endif
    for (const auto idx : diag_index_) schur_.valuePtr()[idx] += bump;
  }
  return false;
}

VectorXd InteriorPoint::apply_m(const VectorXd& y) const {
  VectorXd lin;
  std::vector<MatrixXd> blocks;
  apply_at(y, lin, blocks);
  lin.array() *= x_.array() / z_.array();
  for (std::size_t bl = 0; bl < blocks.size(); ++bl) blocks[bl] = xb_[bl] * blocks[bl] * zb_inv_[bl];
  return apply_a(lin, blocks);
}

// Refinement residuals use the operator form, which stays accurate when the
// assembled matrix has lost digits near the end of the path.
VectorXd InteriorPoint::solve_schur(const VectorXd& rhs) const {
  VectorXd sol = ldlt_.solve(rhs);
  for (int refine = 0; refine < 3; ++refine) {
    const VectorXd res = rhs - apply_m(sol);
    sol += ldlt_.solve(res);
  }
  return sol;
}

bool InteriorPoint::prepare_free_border() {
  if (sf_.n_free == 0) return true;
  border_w_.resize(sf_.m, sf_.n_free);
  for (Eigen::Index j = 0; j < sf_.n_free; ++j) border_w_.col(j) = solve_schur(sf_.a_free.col(j));
  MatrixXd s = sf_.a_free.transpose() * border_w_;
  s = 0.5 * (s + s.transpose());
  const double reg = 1e-14 * std::max(1.0, s.diagonal().cwiseAbs().maxCoeff());
  s.diagonal().array() += reg;
  border_s_.compute(s);
  return border_s_.info() == Eigen::Success;
}

VectorXd InteriorPoint::apply_a(const VectorXd& x, const std::vector<MatrixXd>& xb) const {
  VectorXd out = sf_.a_lin * x;
  for (std::size_t bl = 0; bl < sf_.block_rows.size(); ++bl) {
    for (const auto& r : sf_.block_rows[bl]) out(r.row) += r.coef.cwiseProduct(xb[bl]).sum();
  }
  return out;
}

void InteriorPoint::apply_at(const VectorXd& y, VectorXd& out_lin, std::vector<MatrixXd>& out_b) const {
  out_lin = sf_.a_lin.transpose() * y;
  out_b.resize(sf_.block_rows.size());
  for (std::size_t bl = 0; bl < sf_.block_rows.size(); ++bl) {
    out_b[bl] = MatrixXd::Zero(sf_.block_dims[bl], sf_.block_dims[bl]);
    for (const auto& r : sf_.block_rows[bl]) out_b[bl] += y(r.row) * r.coef;
  }
}

InteriorPoint::Direction InteriorPoint::direction(double sigma_mu, const Direction* predictor) {
  const std::size_t nb = sf_.block_dims.size();
  // h collects every term of dX that does not depend on dy.
  VectorXd h(sf_.n_lin);
  for (Eigen::Index j = 0; j < sf_.n_lin; ++j) {
    double corr = predictor ? predictor->dx(j) * predictor->dz(j) : 0.0;
    h(j) = (sigma_mu - x_(j) * z_(j) - corr) / z_(j) - (x_(j) / z_(j)) * rd_lin_(j);
  }
  std::vector<MatrixXd> hb(nb);
  for (std::size_t bl = 0; bl < nb; ++bl) {
    const MatrixXd& x = xb_[bl];
    const MatrixXd& zi = zb_inv_[bl];
    hb[bl] = sigma_mu * zi - x - x * rd_b_[bl] * zi;
    if (predictor) hb[bl] -= predictor->dxb[bl] * predictor->dzb[bl] * zi;
  }

  Direction dir;
  const VectorXd g = solve_schur(rp_ - apply_a(h, hb));
  if (sf_.n_free > 0) {
    dir.dxf = border_s_.solve(sf_.a_free.transpose() * g - rf_);
    dir.dy = g - border_w_ * dir.dxf;
  } else {
    dir.dxf = VectorXd::Zero(0);
    dir.dy = g;
  }
  VectorXd aty;
  std::vector<MatrixXd> aty_b;
  apply_at(dir.dy, aty, aty_b);
  dir.dz = rd_lin_ - aty;
  dir.dx = h.array() + (x_.array() / z_.array()) * aty.array();
  dir.dzb.resize(nb);
  dir.dxb.resize(nb);
  for (std::size_t bl = 0; bl < nb; ++bl) {
    dir.dzb[bl] = rd_b_[bl] - aty_b[bl];
    MatrixXd dx = hb[bl] + xb_[bl] * aty_b[bl] * zb_inv_[bl];
    dir.dxb[bl] = 0.5 * (dx + dx.transpose());
  }
  return dir;
}

InteriorPoint::Outcome InteriorPoint::run() {
  const std::size_t nb = sf_.block_dims.size();
  Eigen::Index cone_dim = sf_.n_lin;
  for (auto d : sf_.block_dims) cone_dim += d;

  double c_norm = sf_.c_lin.size() ? sf_.c_lin.cwiseAbs().maxCoeff() : 0.0;
  for (const auto& c : sf_.c_blocks) c_norm = std::max(c_norm, c.size() ? c.cwiseAbs().maxCoeff() : 0.0);
  const double b_norm = sf_.b.size() ? sf_.b.cwiseAbs().maxCoeff() : 0.0;
  const double xi = std::max(1.0, b_norm);
  const double eta = std::max(1.0, c_norm);

  x_ = VectorXd::Constant(sf_.n_lin, xi);
  z_ = VectorXd::Constant(sf_.n_lin, eta);
  y_ = VectorXd::Zero(sf_.m);
  xf_ = VectorXd::Zero(sf_.n_free);
  xb_.resize(nb);
  zb_.resize(nb);
  zb_inv_.resize(nb);
  for (std::size_t bl = 0; bl < nb; ++bl) {
    xb_[bl] = xi * MatrixXd::Identity(sf_.block_dims[bl], sf_.block_dims[bl]);
    zb_[bl] = eta * MatrixXd::Identity(sf_.block_dims[bl], sf_.block_dims[bl]);
  }

  const double b_scale = 1.0 + b_norm;
  double c_scale = sf_.c_lin.squaredNorm() + sf_.c_free.squaredNorm();
  for (const auto& c : sf_.c_blocks) c_scale += c.squaredNorm();
  c_scale = 1.0 + std::sqrt(c_scale);

  Outcome out;
  int stalls = 0;
  // Best iterate seen, returned when the run ends without converging.
  double best_merit = std::numeric_limits<double>::infinity();
  Outcome best;
  for (int iter = 0; iter <= params_.max_iterations; ++iter) {
    out.iterations = iter;
    for (std::size_t bl = 0; bl < nb; ++bl) {
      zb_inv_[bl] = zb_[bl].llt().solve(MatrixXd::Identity(sf_.block_dims[bl], sf_.block_dims[bl]));
      zb_inv_[bl] = 0.5 * (zb_inv_[bl] + zb_inv_[bl].transpose());
    }
    rp_ = sf_.b - apply_a(x_, xb_) - sf_.a_free * xf_;
    VectorXd aty;
    std::vector<MatrixXd> aty_b;
    apply_at(y_, aty, aty_b);
    rd_lin_ = sf_.c_lin - aty - z_;
    rf_ = sf_.c_free - sf_.a_free.transpose() * y_;
    rd_b_.resize(nb);
    double rd_sq = rd_lin_.squaredNorm() + rf_.squaredNorm();
    double pobj = sf_.c_lin.dot(x_) + sf_.c_free.dot(xf_);
    double gap_abs = x_.dot(z_);
    for (std::size_t bl = 0; bl < nb; ++bl) {
      rd_b_[bl] = sf_.c_blocks[bl] - aty_b[bl] - zb_[bl];
      rd_sq += rd_b_[bl].squaredNorm();
      pobj += sf_.c_blocks[bl].cwiseProduct(xb_[bl]).sum();
      gap_abs += xb_[bl].cwiseProduct(zb_[bl]).sum();
    }
    const double dobj = sf_.b.dot(y_);
    // Max-norm so the stopping rule matches the per-row residual contract.
    const double pinf = (rp_.size() ? rp_.cwiseAbs().maxCoeff() : 0.0) / b_scale;
    const double dinf = std::sqrt(rd_sq) / c_scale;
    const double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double mu = gap_abs / static_cast<double>(std::max<Eigen::Index>(cone_dim, 1));
    out.pobj = pobj;
    out.dobj = dobj;
#ifdef INFOMENU_IPM_TRACE
    std::fprintf(stderr, "it %3d pobj % .10e dobj % .10e pinf %.2e dinf %.2e gap %.2e mu %.2e\n", iter, pobj, dobj,
                 pinf, dinf, rel_gap, mu);
#endif

    const double merit = std::max({pinf, dinf, rel_gap, gap_abs / (1.0 + std::abs(pobj))});
    if (merit < best_merit) {
      best_merit = merit;
      best.x = x_;
      best.xf = xf_;
      best.xb = xb_;
      best.y = y_;
      best.pobj = pobj;
      best.dobj = dobj;
    }

    if (pinf <= params_.tolerance && dinf <= params_.tolerance && rel_gap <= params_.tolerance &&
        gap_abs / (1.0 + std::abs(pobj)) <= params_.tolerance) {
      out.status = Status::optimal;
      break;
    }

    // Farkas-style certificates read off diverging iterates.
    if (dobj > 0.0) {
      double cert = (sf_.c_lin - rd_lin_).norm() + (sf_.c_free - rf_).norm();
      for (std::size_t bl = 0; bl < nb; ++bl) cert += (sf_.c_blocks[bl] - rd_b_[bl]).norm();
      if (cert / dobj < params_.tolerance && dinf < 1e3) {
        out.status = Status::infeasible;
        break;
      }
    }
    if (pobj < 0.0) {
      const double cert = (sf_.b - rp_).norm();
      if (cert / (-pobj) < params_.tolerance && pinf < 1e3) {
        out.status = Status::unbounded;
        break;
      }
    }
    if (iter == params_.max_iterations) break;

    assemble_schur();
    if (!factorize() || !prepare_free_border()) break;

    std::vector<Eigen::LLT<MatrixXd>> x_chol(nb), z_chol(nb);
    bool interior = true;
    for (std::size_t bl = 0; bl < nb && interior; ++bl) {
      x_chol[bl].compute(xb_[bl]);
      z_chol[bl].compute(zb_[bl]);
      interior = x_chol[bl].info() == Eigen::Success && z_chol[bl].info() == Eigen::Success;
    }
    if (!interior) {
      out.status = Status::numerical_failure;
      break;
    }
    auto step_lengths = [&](const Direction& d) {
      double ap = max_step_lin(x_, d.dx);
      double ad = max_step_lin(z_, d.dz);
      for (std::size_t bl = 0; bl < nb; ++bl) {
        ap = std::min(ap, max_step_psd(x_chol[bl], d.dxb[bl]));
        ad = std::min(ad, max_step_psd(z_chol[bl], d.dzb[bl]));
      }
      return std::pair{ap, ad};
    };

    const Direction pred = direction(0.0, nullptr);
    auto [ap_aff, ad_aff] = step_lengths(pred);
    ap_aff = std::min(1.0, ap_aff);
    ad_aff = std::min(1.0, ad_aff);
    double gap_aff = (x_ + ap_aff * pred.dx).dot(z_ + ad_aff * pred.dz);
    for (std::size_t bl = 0; bl < nb; ++bl) {
      gap_aff += (xb_[bl] + ap_aff * pred.dxb[bl]).cwiseProduct(zb_[bl] + ad_aff * pred.dzb[bl]).sum();
    }
    const double mu_aff = gap_aff / static_cast<double>(std::max<Eigen::Index>(cone_dim, 1));
    const double ratio = std::clamp(mu_aff / mu, 0.0, 1.0);
    const double sigma = ratio * ratio * ratio;

    const Direction corr = direction(sigma * mu, &pred);
#ifdef INFOMENU_IPM_TRACE
    {
      const VectorXd lin = rp_ - apply_a(corr.dx, corr.dxb) - sf_.a_free * corr.dxf;
      std::fprintf(stderr, "    newton residual %.2e  free %.2e\n", lin.cwiseAbs().maxCoeff(),
                   sf_.n_free ? (sf_.a_free.transpose() * corr.dy - rf_).cwiseAbs().maxCoeff() : 0.0);
    }
#endif
    auto [ap, ad] = step_lengths(corr);
    const double gamma = std::max(0.9, 1.0 - 10.0 * mu / (1.0 + std::abs(pobj)));
    ap = std::min(1.0, std::min(gamma, 0.995) * ap);
    ad = std::min(1.0, std::min(gamma, 0.995) * ad);
    if (ap < 1e-10 && ad < 1e-10) {
      if (++stalls >= 3) break;
    } else {
      stalls = 0;
    }

    x_ += ap * corr.dx;
    xf_ += ap * corr.dxf;
    z_ += ad * corr.dz;
    y_ += ad * corr.dy;
    for (std::size_t bl = 0; bl < nb; ++bl) {
      xb_[bl] += ap * corr.dxb[bl];
      zb_[bl] += ad * corr.dzb[bl];
      xb_[bl] = 0.5 * (xb_[bl] + xb_[bl].transpose());
      zb_[bl] = 0.5 * (zb_[bl] + zb_[bl].transpose());
    }
  }
  if (out.status == Status::numerical_failure && best.x.size() == x_.size()) {
    best.status = best_merit <= params_.acceptable_tolerance ? Status::optimal : out.status;
    best.iterations = out.iterations;
    return best;
  }
  out.x = x_;
  out.xf = xf_;
  out.xb = xb_;
  out.y = y_;
  return out;
}

}  // namespace

ConicResult solve(const ConicProblem& problem) {
  for (const auto& row : problem.rows()) {
    if (row.expr.empty()) {
      const bool ok = (row.relation == Relation::equal && row.rhs == 0.0) ||
                      (row.relation == Relation::less_equal && row.rhs >= 0.0) ||
                      (row.relation == Relation::greater_equal && row.rhs <= 0.0);
      if (!ok) {
        ConicResult infeasible;
        infeasible.status = Status::infeasible;
        return infeasible;
      }
    }
  }
  ConicProblem trimmed;
  const ConicProblem* target = &problem;
  if (std::any_of(problem.rows().begin(), problem.rows().end(), [](const Row& r) { return r.expr.empty(); })) {
    for (std::size_t i = 0; i < problem.num_scalars(); ++i) trimmed.add_scalar(problem.scalar_domain(i), problem.scalar_name(i));
    for (std::size_t b = 0; b < problem.num_blocks(); ++b) trimmed.add_psd_block(problem.block_dim(b), problem.block_name(b));
    trimmed.set_objective(problem.sense(), problem.objective(), problem.objective_constant());
    for (const auto& row : problem.rows()) {
      if (!row.expr.empty()) trimmed.add_row(row.expr, row.relation, row.rhs, row.label);
    }
    trimmed.params = problem.params;
    target = &trimmed;
  }

  const StandardForm sf = to_standard_form(*target);
  InteriorPoint ipm(sf, target->params);
  const auto outcome = ipm.run();

  ConicResult result;
  result.iterations = outcome.iterations;
  result.status = outcome.status;
  if (outcome.x.size() == sf.n_lin) {
    result.scalars.resize(problem.num_scalars());
    for (std::size_t i = 0; i < problem.num_scalars(); ++i) {
      const auto [idx, is_free] = sf.scalar_map[i];
      result.scalars[i] = is_free ? outcome.xf(idx) : outcome.x(idx);
    }
    result.blocks = outcome.xb;
  } else {
    result.scalars.assign(problem.num_scalars(), 0.0);
    for (std::size_t b = 0; b < problem.num_blocks(); ++b) {
      const auto d = static_cast<Eigen::Index>(problem.block_dim(b));
      result.blocks.push_back(MatrixXd::Zero(d, d));
    }
  }
  result.objective = evaluate(problem.objective(), result.scalars, result.blocks) + problem.objective_constant();
  result.primal_residual = max_violation(problem, result.scalars, result.blocks);
  if (result.status == Status::optimal) {
    result.dual_objective = sf.sign * outcome.dobj + problem.objective_constant();
    if (result.primal_residual > problem.params.acceptable_tolerance) result.status = Status::numerical_failure;
  }
  return result;
}

}  // namespace infomenu::conic
