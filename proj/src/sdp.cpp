#include "dlab/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "dlab/config.hpp"
#include "dlab/error.hpp"

namespace dlab::sdp {

namespace {

struct BlockTerm {
  std::size_t var;
  std::vector<std::size_t> entries;  // indices into the variable's entry list
};

// Largest alpha with M + alpha * D >= 0, given the Cholesky factor of M.
double max_step(const Eigen::LLT<ComplexMatrix>& chol, const ComplexMatrix& d) {
  const ComplexMatrix left = chol.matrixL().solve(d);
  const ComplexMatrix both = chol.matrixL().solve(left.adjoint()).adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (both + both.adjoint()),
                                                  Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

double frob(const std::vector<ComplexMatrix>& blocks) {
  double s = 0.0;
  for (const auto& b : blocks) s += b.squaredNorm();
  return std::sqrt(s);
}

double real_trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.cwiseProduct(b.transpose())).sum().real();
}

}  // namespace

std::size_t Problem::add_block(std::size_t size) {
  require(size >= 1, ErrorCode::InvalidArgument, "sdp: empty block");
  require(size <= numeric_config().max_sdp_dim * 2, ErrorCode::InvalidArgument,
          "sdp: block exceeds the supported envelope");
  sizes_.push_back(size);
  constants_.push_back(ComplexMatrix::Zero(static_cast<Eigen::Index>(size),
                                           static_cast<Eigen::Index>(size)));
  return sizes_.size() - 1;
}

std::size_t Problem::add_variables(std::size_t count) {
  const std::size_t first = objective_.size();
  objective_.resize(first + count, 0.0);
  coefficients_.resize(first + count);
  return first;
}

HermitianVar Problem::add_hermitian(std::size_t size) {
  HermitianVar h;
  h.size = size;
  h.first = add_variables(size * size);
  return h;
}

ComplexVar Problem::add_complex(std::size_t rows, std::size_t cols) {
  ComplexVar v;
  v.rows = rows;
  v.cols = cols;
  v.first = add_variables(2 * rows * cols);
  return v;
}

void Problem::add_constant(std::size_t block, std::size_t row, std::size_t col,
                           const ComplexMatrix& m) {
  require(block < sizes_.size(), ErrorCode::InvalidArgument, "sdp: bad block");
  require(row + static_cast<std::size_t>(m.rows()) <= sizes_[block] &&
              col + static_cast<std::size_t>(m.cols()) <= sizes_[block],
          ErrorCode::DimensionMismatch, "sdp: constant does not fit its block");
  constants_[block].block(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col),
                          m.rows(), m.cols()) += m;
}

void Problem::add_coefficient(std::size_t var, std::size_t block, std::size_t row,
                              std::size_t col, Complex value) {
  require(var < objective_.size() && block < sizes_.size() && row < sizes_[block] &&
              col < sizes_[block],
          ErrorCode::InvalidArgument, "sdp: coefficient out of range");
  if (value == Complex(0.0)) return;
  coefficients_[var].push_back(Entry{block, row, col, value});
}

void Problem::place_hermitian(std::size_t block, const HermitianVar& h, std::size_t offset,
                              double scale, std::size_t copies) {
  const std::size_t n = h.size;
  for (std::size_t c = 0; c < copies; ++c) {
    const std::size_t base = offset + c * n;
    std::size_t p = h.first + n;
    for (std::size_t k = 0; k < n; ++k) {
      add_coefficient(h.first + k, block, base + k, base + k, scale);
      for (std::size_t l = k + 1; l < n; ++l, p += 2) {
        add_coefficient(p, block, base + k, base + l, scale);
        add_coefficient(p, block, base + l, base + k, scale);
        add_coefficient(p + 1, block, base + k, base + l, Complex(0.0, scale));
        add_coefficient(p + 1, block, base + l, base + k, Complex(0.0, -scale));
      }
    }
  }
}

void Problem::place_complex(std::size_t block, const ComplexVar& y, std::size_t row,
                            std::size_t col, double scale) {
  for (std::size_t r = 0; r < y.rows; ++r)
    for (std::size_t c = 0; c < y.cols; ++c) {
      add_coefficient(y.re(r, c), block, row + r, col + c, scale);
      add_coefficient(y.re(r, c), block, col + c, row + r, scale);
      add_coefficient(y.im(r, c), block, row + r, col + c, Complex(0.0, scale));
      add_coefficient(y.im(r, c), block, col + c, row + r, Complex(0.0, -scale));
    }
}

void Problem::add_trace_objective(const HermitianVar& h, double scale) {
  for (std::size_t k = 0; k < h.size; ++k) objective_[h.first + k] += scale;
}

ComplexMatrix Problem::value(const HermitianVar& h, const RealVector& y) {
  const auto n = static_cast<Eigen::Index>(h.size);
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  auto p = static_cast<Eigen::Index>(h.first + h.size);
  for (Eigen::Index k = 0; k < n; ++k) {
    m(k, k) = y(static_cast<Eigen::Index>(h.first) + k);
    for (Eigen::Index l = k + 1; l < n; ++l, p += 2) {
      m(k, l) = Complex(y(p), y(p + 1));
      m(l, k) = std::conj(m(k, l));
    }
  }
  return m;
}

ComplexMatrix Problem::value(const ComplexVar& v, const RealVector& y) {
  ComplexMatrix m(static_cast<Eigen::Index>(v.rows), static_cast<Eigen::Index>(v.cols));
  for (std::size_t r = 0; r < v.rows; ++r)
    for (std::size_t c = 0; c < v.cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          Complex(y(static_cast<Eigen::Index>(v.re(r, c))), y(static_cast<Eigen::Index>(v.im(r, c))));
  return m;
}

Solution Problem::solve(const Options& options) const {
  const auto& cfg = numeric_config();
  const std::size_t m = objective_.size();
  const std::size_t nb = sizes_.size();
  require(m >= 1 && nb >= 1, ErrorCode::InvalidArgument, "sdp: empty problem");

  // Group coefficient entries by block for the Schur complement.
  std::vector<std::vector<BlockTerm>> terms(nb);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::vector<std::size_t>> per(nb);
    for (std::size_t e = 0; e < coefficients_[i].size(); ++e)
      per[coefficients_[i][e].block].push_back(e);
    for (std::size_t k = 0; k < nb; ++k)
      if (!per[k].empty()) terms[k].push_back(BlockTerm{i, std::move(per[k])});
  }

  RealVector b(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) b(static_cast<Eigen::Index>(i)) = objective_[i];

  // A_i(M) = -Re Tr(F_i M)
  auto apply_a = [&](const std::vector<ComplexMatrix>& mats) {
    RealVector out = RealVector::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
      Complex s = 0.0;
      for (const auto& e : coefficients_[i])
        s += e.value * mats[e.block](static_cast<Eigen::Index>(e.col), static_cast<Eigen::Index>(e.row));
      out(static_cast<Eigen::Index>(i)) = -s.real();
    }
    return out;
  };
  // sum_i y_i F_i per block
  auto apply_f = [&](const RealVector& y) {
    std::vector<ComplexMatrix> out;
    for (std::size_t k = 0; k < nb; ++k)
      out.push_back(ComplexMatrix::Zero(static_cast<Eigen::Index>(sizes_[k]),
                                        static_cast<Eigen::Index>(sizes_[k])));
    for (std::size_t i = 0; i < m; ++i) {
      const double yi = y(static_cast<Eigen::Index>(i));
      if (yi == 0.0) continue;
      for (const auto& e : coefficients_[i])
        out[e.block](static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) += yi * e.value;
    }
    return out;
  };

  // Starting point.
  double norm_c = frob(constants_);
  double max_f = 0.0, max_ratio = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (const auto& e : coefficients_[i]) s += std::norm(e.value);
    max_f = std::max(max_f, std::sqrt(s));
    max_ratio = std::max(max_ratio, (1.0 + std::abs(objective_[i])) / (1.0 + std::sqrt(s)));
  }
  std::size_t total = 0;
  std::vector<ComplexMatrix> X, S;
  for (std::size_t k = 0; k < nb; ++k) {
    const double n = static_cast<double>(sizes_[k]);
    const double xi = std::max({10.0, std::sqrt(n), n * max_ratio});
    const double eta = std::max({10.0, std::sqrt(n), norm_c, max_f});
    const auto nk = static_cast<Eigen::Index>(sizes_[k]);
    X.push_back(xi * ComplexMatrix::Identity(nk, nk));
    S.push_back(eta * ComplexMatrix::Identity(nk, nk));
    total += sizes_[k];
  }
  RealVector y = RealVector::Zero(static_cast<Eigen::Index>(m));

  const double norm_b = b.norm();
  Solution sol;
  double best_score = std::numeric_limits<double>::infinity();
  Solution best;
  int stall = 0;

  for (int iter = 0; iter <= cfg.sdp_max_iter; ++iter) {
    // Residuals and progress measures.
    const RealVector rp = b - apply_a(X);
    std::vector<ComplexMatrix> rd = apply_f(y);
    for (std::size_t k = 0; k < nb; ++k) rd[k] += constants_[k] - S[k];
    double pobj = 0.0, xs = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      pobj += real_trace_product(constants_[k], X[k]);
      xs += real_trace_product(X[k], S[k]);
    }
    const double dobj = b.dot(y);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double pinf = rp.norm() / (1.0 + norm_b);
    const double dinf = frob(rd) / (1.0 + norm_c);
    const double mu = xs / static_cast<double>(total);
    const double score = std::max({gap, pinf, dinf});

    sol.iterations = iter;
    if (score < best_score) {
      best_score = score;
      best.y = y;
      best.primal = X;
      best.dual_value = dobj;
      best.primal_value = pobj;
      best.gap = gap;
      best.primal_infeasibility = pinf;
      best.dual_infeasibility = dinf;
      best.iterations = iter;
    }
    if (score <= cfg.sdp_target_gap || iter == cfg.sdp_max_iter || stall >= 5) break;

    // Inverses and Cholesky factors.
    std::vector<ComplexMatrix> sinv(nb);
    std::vector<Eigen::LLT<ComplexMatrix>> cx(nb), cs(nb);
    bool broken = false;
    for (std::size_t k = 0; k < nb; ++k) {
      cx[k].compute(X[k]);
      cs[k].compute(S[k]);
      if (cx[k].info() != Eigen::Success || cs[k].info() != Eigen::Success) {
        broken = true;
        break;
      }
      const auto nk = S[k].rows();
      sinv[k] = cs[k].solve(ComplexMatrix::Identity(nk, nk));
      sinv[k] = 0.5 * (sinv[k] + sinv[k].adjoint()).eval();
    }
    if (broken) break;

    // Schur complement M_ij = Re Tr(F_i X F_j S^-1).
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < nb; ++k) {
      const auto& tk = terms[k];
      const ComplexMatrix& xk = X[k];
      const ComplexMatrix& sk = sinv[k];
      for (std::size_t p = 0; p < tk.size(); ++p) {
        const auto& ei = coefficients_[tk[p].var];
        for (std::size_t q = p; q < tk.size(); ++q) {
          const auto& ej = coefficients_[tk[q].var];
          Complex acc = 0.0;
          for (std::size_t ia : tk[p].entries) {
            const Entry& a = ei[ia];
            for (std::size_t jb : tk[q].entries) {
              const Entry& c = ej[jb];
              acc += a.value * c.value *
                     xk(static_cast<Eigen::Index>(a.col), static_cast<Eigen::Index>(c.row)) *
                     sk(static_cast<Eigen::Index>(c.col), static_cast<Eigen::Index>(a.row));
            }
          }
          const auto vi = static_cast<Eigen::Index>(tk[p].var);
          const auto vj = static_cast<Eigen::Index>(tk[q].var);
          M(vi, vj) += acc.real();
          if (vi != vj) M(vj, vi) += acc.real();
        }
      }
    }
    Eigen::LLT<Eigen::MatrixXd> mchol(M);
    if (mchol.info() != Eigen::Success) {
      const double reg = 1e-13 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
      M.diagonal().array() += reg;
      mchol.compute(M);
      if (mchol.info() != Eigen::Success) break;
    }

    // X Rd S^-1 + X, shared by predictor and corrector.
    std::vector<ComplexMatrix> base(nb);
    for (std::size_t k = 0; k < nb; ++k) base[k] = X[k] * rd[k] * sinv[k] + X[k];

    auto direction = [&](double target_mu, const std::vector<ComplexMatrix>* corr,
                         RealVector& dy, std::vector<ComplexMatrix>& dx,
                         std::vector<ComplexMatrix>& ds) {
      std::vector<ComplexMatrix> r(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        r[k] = base[k] - target_mu * sinv[k];
        if (corr) r[k] += (*corr)[k];
      }
      dy = mchol.solve(rp + apply_a(r));
      ds = apply_f(dy);
      dx.resize(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        ds[k] += rd[k];
        ds[k] = 0.5 * (ds[k] + ds[k].adjoint()).eval();
        ComplexMatrix d = target_mu * sinv[k] - X[k] - X[k] * ds[k] * sinv[k];
        if (corr) d -= (*corr)[k];
        dx[k] = 0.5 * (d + d.adjoint());
      }
    };
    auto steps = [&](const std::vector<ComplexMatrix>& dx, const std::vector<ComplexMatrix>& ds) {
      double ap = std::numeric_limits<double>::infinity(), ad = ap;
      for (std::size_t k = 0; k < nb; ++k) {
        ap = std::min(ap, max_step(cx[k], dx[k]));
        ad = std::min(ad, max_step(cs[k], ds[k]));
      }
      return std::pair<double, double>(ap, ad);
    };

    RealVector dy;
    std::vector<ComplexMatrix> dx, ds;
    direction(0.0, nullptr, dy, dx, ds);
    auto [ap_aff, ad_aff] = steps(dx, ds);
    ap_aff = std::min(1.0, ap_aff);
    ad_aff = std::min(1.0, ad_aff);
    double xs_aff = 0.0;
    for (std::size_t k = 0; k < nb; ++k)
      xs_aff += real_trace_product(X[k] + ap_aff * dx[k], S[k] + ad_aff * ds[k]);
    const double mu_aff = xs_aff / static_cast<double>(total);
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    std::vector<ComplexMatrix> corr(nb);
    for (std::size_t k = 0; k < nb; ++k) corr[k] = dx[k] * ds[k] * sinv[k];
    direction(sigma * mu, &corr, dy, dx, ds);
    auto [ap, ad] = steps(dx, ds);
    const double gamma = 0.9 + 0.09 * std::min({1.0, ap, ad});
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);

    for (std::size_t k = 0; k < nb; ++k) {
      X[k] += ap * dx[k];
      S[k] += ad * ds[k];
    }
    y += ad * dy;

    if (ap < 1e-8 && ad < 1e-8) ++stall;
    else if (score > 10.0 * best_score && best_score < cfg.sdp_gap) ++stall;

    if (options.trace) {
      nlohmann::json rec = {{"iter", iter}, {"primal", pobj}, {"dual", dobj}, {"gap", gap},
                            {"pinf", pinf}, {"dinf", dinf}, {"mu", mu}, {"sigma", sigma},
                            {"step_p", ap}, {"step_d", ad}};
      *options.trace << rec.dump() << '\n';
    }
  }

  best.slack = apply_f(best.y);
  for (std::size_t k = 0; k < nb; ++k) best.slack[k] += constants_[k];
  best.converged = std::max({best.gap, best.primal_infeasibility, best.dual_infeasibility}) <= cfg.sdp_gap;
  best.iterations = sol.iterations;
  return best;
}

}  // namespace dlab::sdp
